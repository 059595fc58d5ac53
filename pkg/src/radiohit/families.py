"""Set families over [l] and brute-force verifiers for their hitting properties.

Sets are handled as frozensets at the surface and as int bitmasks
(bit i-1 <=> element i) inside the verifiers.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np


class FamilyError(ValueError):
    pass


def to_mask(s) -> int:
    m = 0
    for x in s:
        m |= 1 << (x - 1)
    return m


def from_mask(m: int) -> frozenset:
    out = []
    i = 1
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return frozenset(out)


@dataclass(frozen=True)
class SetFamily:
    l: int
    sets: tuple

    def __post_init__(self):
        if self.l < 1:
            raise FamilyError("universe size must be >= 1")
        sets = tuple(frozenset(s) for s in self.sets)
        for s in sets:
            if not s:
                raise FamilyError("family members must be non-empty")
            if min(s) < 1 or max(s) > self.l:
                raise FamilyError(f"member {sorted(s)} not within [1, {self.l}]")
        object.__setattr__(self, "sets", sets)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    @property
    def size(self) -> int:
        return len(self.sets)

    @property
    def has_duplicates(self) -> bool:
        return len(set(self.sets)) != len(self.sets)

    @property
    def masks(self) -> list[int]:
        return [to_mask(s) for s in self.sets]

    def to_json(self) -> dict:
        return {"l": self.l, "sets": [sorted(s) for s in self.sets]}

    @classmethod
    def from_json(cls, data) -> "SetFamily":
        return cls(int(data["l"]), tuple(frozenset(s) for s in data["sets"]))

    @classmethod
    def load(cls, path) -> "SetFamily":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class FamilyCertificate:
    kind: str  # "property1" or "property2"
    exhaustive: bool
    max_hit_fraction: Fraction | None = None
    witness: frozenset | None = None
    min_hitting_size: int | None = None
    l: int = 0
    family_size: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def beta(self) -> float | None:
        """Empirical constant with max fraction = 1 / (beta * log2 l)."""
        if self.max_hit_fraction is None or self.l < 2 or self.max_hit_fraction == 0:
            return None
        return 1.0 / (float(self.max_hit_fraction) * math.log2(self.l))

    def to_json(self) -> dict:
        out = {"kind": self.kind, "exhaustive": self.exhaustive, "l": self.l,
               "family_size": self.family_size}
        if self.max_hit_fraction is not None:
            out["max_hit_fraction"] = str(self.max_hit_fraction)
            out["max_hit_fraction_float"] = float(self.max_hit_fraction)
            out["witness"] = sorted(self.witness)
            out["beta"] = self.beta
        if self.min_hitting_size is not None:
            out["min_hitting_size"] = self.min_hitting_size
        out.update(self.extra)
        return out


def family_hits(a: SetFamily, b: SetFamily) -> bool:
    """True iff every member of ``b`` is hit (|A & B| = 1) by some member of ``a``."""
    if a.l != b.l:
        raise FamilyError(f"universe mismatch: {a.l} vs {b.l}")
    am = set(a.masks)
    return all(any((x & y).bit_count() == 1 for x in am) for y in set(b.masks))


def all_pairs_family(k: int) -> SetFamily:
    if k < 2:
        raise FamilyError("k must be >= 2")
    return SetFamily(k, tuple(frozenset(p) for p in itertools.combinations(range(1, k + 1), 2)))


def signature(family, i: int) -> str:
    """Bit r is 1 iff ``i`` lies in the r-th set of ``family`` (in order)."""
    return "".join("1" if i in s else "0" for s in family)


def find_unhit_pair(family, k: int) -> tuple | None:
    """Smallest pair (lexicographically) with equal signatures, or None.

    Equal signatures mean no member contains exactly one of the two, so the
    pair is hit by nothing in ``family``. Fewer than log2(k) sets leave fewer
    than k distinct signatures, so a pair always exists then.
    """
    seen: dict[str, int] = {}
    best = None
    for i in range(1, k + 1):
        sig = signature(family, i)
        if sig in seen:
            cand = (seen[sig], i)
            if best is None or cand < best:
                best = cand
        else:
            seen[sig] = i
    return best


def sample_candidate_family(l: int, size: int, density_levels=None, seed: int = 0) -> SetFamily:
    """Random family whose j-th member includes each element with probability
    2^-d, d cycling through ``density_levels`` (default 1..ceil(log2 l)).
    Empty draws are redrawn."""
    if l < 2:
        raise FamilyError("l must be >= 2")
    if density_levels is None:
        density_levels = range(1, max(1, math.ceil(math.log2(l))) + 1)
    levels = list(density_levels)
    rng = np.random.default_rng([int(seed), l, size])
    sets = []
    for j in range(size):
        p = 2.0 ** -levels[j % len(levels)]
        while True:
            row = np.flatnonzero(rng.random(l) < p)
            if row.size:
                break
        sets.append(frozenset(int(x) + 1 for x in row))
    return SetFamily(l, tuple(sets))


def hit_counts(masks, l: int) -> np.ndarray:
    """For every non-empty H in [l] (H as mask 1..2^l-1), the number of
    family members H hits. Entry i corresponds to H = i + 1."""
    hs = np.arange(1, 1 << l, dtype=np.uint32)
    counts = np.zeros(hs.shape, dtype=np.int64)
    for m in masks:
        counts += np.bitwise_count(hs & np.uint32(m)) == 1
    return counts


def verify_hit_fraction(family: SetFamily, *, limit: int = 16, sampled: bool = False,
                        samples: int = 20000, seed: int = 0) -> FamilyCertificate:
    """Largest fraction of the family hit by a single H in [l].

    Exhaustive over all 2^l - 1 sets H when l <= limit. Above the limit a
    sampled certificate is produced only on request and is marked as such.
    """
    if not family.sets:
        raise FamilyError("family is empty")
    masks = family.masks
    if family.l <= limit:
        counts = hit_counts(masks, family.l)
        best = int(np.argmax(counts))
        return FamilyCertificate("property2", True, Fraction(int(counts[best]), len(masks)),
                                 from_mask(best + 1), l=family.l, family_size=len(masks))
    if not sampled:
        raise FamilyError(f"l={family.l} exceeds exhaustive limit {limit}; request sampled mode")
    rng = np.random.default_rng([int(seed), family.l])
    best_count, best_h = -1, None
    sets = family.sets
    for _ in range(samples):
        density = 2.0 ** -rng.integers(1, max(2, math.ceil(math.log2(family.l))) + 1)
        h = frozenset(int(x) + 1 for x in np.flatnonzero(rng.random(family.l) < density))
        if not h:
            continue
        c = sum(1 for s in sets if len(h & s) == 1)
        if c > best_count:
            best_count, best_h = c, h
    return FamilyCertificate("property2", False, Fraction(best_count, len(sets)), best_h,
                             l=family.l, family_size=len(sets), extra={"samples": samples})


def recount(family: SetFamily, h) -> Fraction:
    h = frozenset(h)
    return Fraction(sum(1 for s in family.sets if len(h & s) == 1), len(family.sets))


class HittingBound(NamedTuple):
    size: int
    exact: bool  # False: only proven that no family smaller than ``size`` hits


def min_hitting_family_size(family: SetFamily, budget: int | None = None, *, limit: int = 10) -> HittingBound:
    """Smallest number of subsets of [l] that together hit every member.

    Exact set cover by iterative deepening with branch and bound: every
    candidate A covers the members it hits; branching is on the uncovered
    member with the fewest covering candidates. When ``budget`` search nodes
    run out, the deepest fully refuted size + 1 is returned as a lower bound.
    """
    if family.l > limit:
        raise FamilyError(f"l={family.l} exceeds search limit {limit}")
    members = sorted(set(family.masks))
    if not members:
        return HittingBound(0, True)
    full = (1 << len(members)) - 1

    covers: dict[int, int] = {}
    for a in range(1, 1 << family.l):
        cov = 0
        for idx, b in enumerate(members):
            if (a & b).bit_count() == 1:
                cov |= 1 << idx
        if cov and cov not in covers:
            covers[cov] = a
    # drop candidates dominated by another candidate
    ordered = sorted(covers, key=lambda c: -c.bit_count())
    kept: list[int] = []
    for c in ordered:
        if not any(c & k == c for k in kept):
            kept.append(c)
    max_cover = kept[0].bit_count()
    covering = [[c for c in kept if c >> e & 1] for e in range(len(members))]

    nodes = 0

    class _OutOfBudget(Exception):
        pass

    def search(uncovered: int, depth: int) -> bool:
        nonlocal nodes
        if uncovered == 0:
            return True
        if depth == 0 or -(-uncovered.bit_count() // max_cover) > depth:
            return False
        nodes += 1
        if budget is not None and nodes > budget:
            raise _OutOfBudget
        e = min((i for i in range(len(members)) if uncovered >> i & 1),
                key=lambda i: len(covering[i]))
        return any(search(uncovered & ~c, depth - 1) for c in covering[e])

    for size in range(1, len(members) + 1):
        try:
            if search(full, size):
                return HittingBound(size, True)
        except _OutOfBudget:
            return HittingBound(size, False)
    raise AssertionError("singletons always hit every member")
