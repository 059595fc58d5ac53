"""The k-hitting game, its restricted (pair-target) variant and the
multi-hitting generalisation, plus the referees used against players.

A player is anything with a ``moves()`` method returning a generator. The
generator yields proposals (iterables of ints in [k]). After a failed proposal
the play loop resumes it with ``next()`` and so passes nothing back; in the
multi-hitting game a won instance is announced by ``send(Reveal(...))``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

from .tape import RandomTape


class GameError(ValueError):
    pass


class InvalidProposalError(GameError):
    pass


def hits(a, b) -> bool:
    """True iff ``|a & b| == 1``."""
    return len(set(a) & set(b)) == 1


@dataclass(frozen=True)
class HittingInstance:
    k: int
    target: frozenset
    restricted: bool = False

    def __post_init__(self):
        if self.k < 2:
            raise GameError("k must be >= 2")
        if not self.target:
            raise GameError("target must be non-empty")
        if not self.target <= frozenset(range(1, self.k + 1)):
            raise GameError(f"target {sorted(self.target)} not within [1, {self.k}]")
        if self.restricted and len(self.target) != 2:
            raise GameError("restricted game needs a target of size two")


@dataclass(frozen=True)
class Reveal:
    instance: int
    target: frozenset


@dataclass
class GameTranscript:
    proposals: list = field(default_factory=list)
    target: frozenset | None = None
    win_round: int | None = None
    # multi-hitting only
    targets: list = field(default_factory=list)
    instance_wins: list = field(default_factory=list)
    instance_starts: list = field(default_factory=list)

    @property
    def won(self) -> bool:
        return self.win_round is not None

    @property
    def exhausted(self) -> bool:
        return self.win_round is None

    @property
    def rounds(self) -> int:
        return len(self.proposals)

    def to_jsonl(self) -> str:
        lines = []
        wins = set(self.instance_wins) | ({self.win_round} if self.win_round else set())
        for i, p in enumerate(self.proposals, 1):
            lines.append(json.dumps({"round": i, "proposal": sorted(p),
                                     "result": "win" if i in wins else "failed"}))
        return "\n".join(lines) + ("\n" if lines else "")


def _check_proposal(p, universe: int) -> frozenset:
    p = frozenset(int(x) for x in p)
    if p and (min(p) < 1 or max(p) > universe):
        raise InvalidProposalError(f"proposal {sorted(p)} not within [1, {universe}]")
    return p


def play(player, referee, k: int, restricted: bool = False, max_rounds: int | None = None,
         *, seed: int = 0) -> GameTranscript:
    """One game. The referee fixes the target from its own key domain before
    round 1; the player learns nothing but that a proposal failed."""
    if k < 2:
        raise GameError("k must be >= 2")
    if max_rounds is None:
        max_rounds = 4 * k
    target = frozenset(referee.draw(RandomTape(seed).referee_stream(0)))
    HittingInstance(k, target, restricted)
    transcript = GameTranscript(target=target)
    moves = player.moves()
    try:
        for rnd in range(1, max_rounds + 1):
            p = _check_proposal(next(moves), k)
            transcript.proposals.append(p)
            if len(p & target) == 1:
                transcript.win_round = rnd
                break
    except StopIteration:
        pass
    finally:
        moves.close()
    return transcript


@dataclass(frozen=True)
class MultiHittingConfig:
    k: int
    k_prime: int

    def __post_init__(self):
        if not 1 <= self.k_prime <= self.k:
            raise GameError("need 1 <= k' <= k")
        if self.universe < 1:
            raise GameError("empty per-instance universe")

    @property
    def universe(self) -> int:
        return self.k // self.k_prime


def play_multi(player, referees, config: MultiHittingConfig, max_rounds: int, *, seed: int = 0) -> GameTranscript:
    """k' consecutive hitting instances over [k // k'].

    All targets are drawn up front with independent referee substreams. When
    instance i is won, its target is sent to the player, and instance i+1
    starts in the next round.
    """
    if isinstance(referees, (list, tuple)):
        if len(referees) != config.k_prime:
            raise GameError(f"need {config.k_prime} referees, got {len(referees)}")
    else:
        referees = [referees] * config.k_prime
    tape = RandomTape(seed)
    targets = [frozenset(ref.draw(tape.referee_stream(i))) for i, ref in enumerate(referees)]
    for t in targets:
        if not t or not t <= frozenset(range(1, config.universe + 1)):
            raise GameError(f"target {sorted(t)} not a non-empty subset of [1, {config.universe}]")
    transcript = GameTranscript(targets=targets)
    moves = player.moves()
    instance = 0
    message = None
    try:
        transcript.instance_starts.append(1)
        for rnd in range(1, max_rounds + 1):
            p = _check_proposal(moves.send(message) if message is not None else next(moves), config.universe)
            message = None
            transcript.proposals.append(p)
            if len(p & targets[instance]) == 1:
                transcript.instance_wins.append(rnd)
                message = Reveal(instance, targets[instance])
                instance += 1
                if instance == config.k_prime:
                    transcript.win_round = rnd
                    break
                transcript.instance_starts.append(rnd + 1)
    except StopIteration:
        pass
    finally:
        moves.close()
    return transcript


# --- referees -------------------------------------------------------------

class FixedReferee:
    def __init__(self, target):
        self.target = frozenset(target)

    def draw(self, stream) -> frozenset:
        return self.target


class UniformFamilyReferee:
    """Draws the target uniformly from a family with referee-private bits."""

    def __init__(self, family):
        sets = getattr(family, "sets", family)
        if not sets:
            raise GameError("referee family is empty")
        self.sets = [frozenset(s) for s in sets]

    def draw(self, stream) -> frozenset:
        return self.sets[stream.randbelow(len(self.sets))]


def uniform_family_referee(family) -> UniformFamilyReferee:
    return UniformFamilyReferee(family)


class AllPairsReferee:
    """Uniform over all 2-subsets of [k] without materialising them.

    Draws the same pair as indexing the lexicographic list of pairs.
    """

    def __init__(self, k: int):
        if k < 2:
            raise GameError("k must be >= 2")
        self.k = k
        self.count = k * (k - 1) // 2

    @property
    def sets(self) -> list:
        return [frozenset(p) for p in itertools.combinations(range(1, self.k + 1), 2)]

    def pair(self, index: int) -> frozenset:
        for a in range(1, self.k):
            row = self.k - a
            if index < row:
                return frozenset((a, a + 1 + index))
            index -= row
        raise IndexError("pair index out of range")

    def draw(self, stream) -> frozenset:
        return self.pair(stream.randbelow(self.count))


def all_pairs_referee(k: int) -> AllPairsReferee:
    return AllPairsReferee(k)


def singletons_referee(k: int) -> UniformFamilyReferee:
    return UniformFamilyReferee([frozenset([i]) for i in range(1, k + 1)])


# --- simple players -------------------------------------------------------

class SequencePlayer:
    """Replays a fixed list of proposals, optionally forever."""

    def __init__(self, proposals, cycle: bool = False):
        self.proposals = [frozenset(p) for p in proposals]
        self.cycle = cycle

    def moves(self):
        source = itertools.cycle(self.proposals) if self.cycle else self.proposals
        for p in source:
            yield p


class SingletonSweep:
    """Proposes {1}, {2}, ... {m} in turn, cycling.

    In the multi-hitting game it restarts its sweep for each new instance.
    """

    def __init__(self, m: int):
        self.m = m

    def moves(self):
        i = 0
        while True:
            got = yield frozenset([i % self.m + 1])
            i = 0 if isinstance(got, Reveal) else i + 1
