"""String specs for players and referees, as used in experiment configs."""

from __future__ import annotations

from dataclasses import dataclass

from .algorithms import resolve_algorithm
from .families import SetFamily, sample_candidate_family
from .game import FixedReferee, UniformFamilyReferee, all_pairs_referee, singletons_referee
from .model import InvalidInputError
from .reductions import (basic_player, broadcast_multihit_player, cd_player, cdmc_tree_player,
                         mc_channel_player, mc_two_proposal_player, tree_player)

PLAYER_KINDS = ("basic", "cd", "tree", "mc", "mc2", "cdmc-tree", "bcast")
# players whose guarantees only hold for pair targets
RESTRICTED_KINDS = frozenset({"cd", "tree", "mc2", "cdmc-tree"})
_CD_KINDS = frozenset({"cd", "tree", "cdmc-tree"})


class SpecError(ValueError):
    pass


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise SpecError(f"{what} must be an integer, got {text!r}") from None


@dataclass(frozen=True)
class PlayerSpec:
    kind: str
    algorithm: str
    channels: int = 1
    depth: int | None = None
    layers: int | None = None

    @property
    def restricted(self) -> bool:
        return self.kind in RESTRICTED_KINDS

    @property
    def multi(self) -> bool:
        return self.kind == "bcast"

    def check(self, k: int) -> None:
        """Resolve the algorithm once so bad names fail before any trial."""
        alg = self._algorithm(k)
        if alg.requires_cd and self.kind not in _CD_KINDS | {"bcast"}:
            raise SpecError(f"{self.algorithm!r} needs collision detection; player {self.kind!r} has none")
        if alg.channels > self.channels:
            raise SpecError(f"{self.algorithm!r} uses {alg.channels} channels, player simulates {self.channels}")

    def _algorithm(self, k: int):
        try:
            return resolve_algorithm(self.algorithm, k, self.channels, broadcast=self.kind == "bcast")
        except InvalidInputError as exc:
            raise SpecError(str(exc)) from None

    def build(self, k: int, tape, *, layers: int | None = None, record: bool = False):
        alg = self._algorithm(k)
        if self.kind == "basic":
            return basic_player(alg, k, tape, record=record)
        if self.kind == "cd":
            return cd_player(alg, k, tape, record=record)
        if self.kind == "tree":
            return tree_player(alg, k, self.depth, tape, record=record)
        if self.kind == "mc":
            return mc_channel_player(alg, k, self.channels, tape, record=record)
        if self.kind == "mc2":
            return mc_two_proposal_player(alg, k, self.channels, tape, record=record)
        if self.kind == "cdmc-tree":
            return cdmc_tree_player(alg, k, self.channels, self.depth, tape, record=record)
        D = self.layers if self.layers is not None else layers
        if D is None:
            raise SpecError("bcast player needs a layer count")
        return broadcast_multihit_player(alg, k, self.channels, D, tape)


def parse_player(spec: str) -> PlayerSpec:
    """``basic:<alg>``, ``cd:<alg>``, ``tree:<alg>:<depth>``, ``mc:<alg>:<C>``,
    ``mc2:<alg>:<C>``, ``cdmc-tree:<alg>:<C>:<depth>``, ``bcast:<alg>[:<D>]``.

    Trailing numeric fields are split off from the right, so algorithm names
    may themselves contain colons (``basic:uniform:1/2,1/4``).
    """
    kind, sep, rest = spec.partition(":")
    if not sep or not rest:
        raise SpecError(f"player spec {spec!r} needs the form <kind>:<algorithm>[...]")
    if kind in ("basic", "cd"):
        return PlayerSpec(kind, rest)
    if kind == "tree":
        alg, _, depth = rest.rpartition(":")
        return PlayerSpec(kind, alg, depth=_int(depth, "tree depth"))
    if kind in ("mc", "mc2"):
        alg, _, c = rest.rpartition(":")
        return PlayerSpec(kind, alg, channels=_int(c, "channel count"))
    if kind == "cdmc-tree":
        parts = rest.rsplit(":", 2)
        if len(parts) != 3:
            raise SpecError(f"{spec!r}: expected cdmc-tree:<alg>:<C>:<depth>")
        return PlayerSpec(kind, parts[0], channels=_int(parts[1], "channel count"),
                          depth=_int(parts[2], "tree depth"))
    if kind == "bcast":
        alg, _, d = rest.rpartition(":")
        if alg and d.isdigit():
            return PlayerSpec(kind, alg, layers=int(d))
        return PlayerSpec(kind, rest)
    raise SpecError(f"unknown player kind {kind!r}; expected one of {', '.join(PLAYER_KINDS)}")


@dataclass(frozen=True)
class RefereeSpec:
    kind: str
    arg: str = ""

    def build(self, universe: int, *, seed: int = 0):
        """Referee over [universe]. ``seed`` only affects the ``density`` family."""
        if self.kind == "pairs":
            return all_pairs_referee(universe)
        if self.kind == "singletons":
            return singletons_referee(universe)
        if self.kind == "fixed":
            return FixedReferee(_int(x, "target element") for x in self.arg.split(","))
        if self.kind == "density":
            size = _int(self.arg, "family size") if self.arg else 200
            return UniformFamilyReferee(sample_candidate_family(universe, size, seed=seed))
        family = SetFamily.load(self.arg)
        if family.l > universe:
            raise SpecError(f"family over [{family.l}] does not fit universe [{universe}]")
        return UniformFamilyReferee(family)

    def pairs_only(self, universe: int) -> bool:
        if self.kind == "pairs":
            return True
        if self.kind in ("singletons", "density"):
            return False
        ref = self.build(universe)
        sets = ref.sets if hasattr(ref, "sets") else [ref.target]
        return all(len(s) == 2 for s in sets)


def parse_referee(spec: str) -> RefereeSpec:
    """``pairs``, ``singletons``, ``family:<path>``, ``density[:<size>]``
    (a sampled candidate family over the universe) or ``fixed:<i,j,...>``."""
    kind, _, arg = spec.partition(":")
    if kind in ("pairs", "singletons") and not arg:
        return RefereeSpec(kind)
    if kind == "density":
        return RefereeSpec(kind, arg)
    if kind in ("family", "fixed") and arg:
        return RefereeSpec(kind, arg)
    raise SpecError(f"unknown referee spec {spec!r}")
