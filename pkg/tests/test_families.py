import itertools
import json
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from radiohit.families import (FamilyError, SetFamily, all_pairs_family, family_hits, find_unhit_pair,
                               hit_counts, min_hitting_family_size, recount, sample_candidate_family,
                               signature, verify_hit_fraction)

from oracles import hits_by_loop


def fam(l, *sets):
    return SetFamily(l, tuple(frozenset(s) for s in sets))


def test_family_validation_and_duplicates():
    with pytest.raises(FamilyError):
        fam(3, set())
    with pytest.raises(FamilyError):
        fam(3, {4})
    assert fam(3, {1}, {1}).has_duplicates
    assert not fam(3, {1}, {2}).has_duplicates


def test_family_json_roundtrip(tmp_path):
    f = fam(4, {1, 2}, {4})
    p = tmp_path / "f.json"
    p.write_text(json.dumps(f.to_json()))
    assert SetFamily.load(p) == f


def test_family_hits_examples():
    singletons = fam(3, {1}, {2}, {3})
    assert family_hits(singletons, fam(3, {1, 2}, {2, 3}, {1, 2, 3}))
    assert not family_hits(fam(2, {1, 2}), fam(2, {1, 2}))
    with pytest.raises(FamilyError):
        family_hits(fam(2, {1}), fam(3, {1}))


def test_family_hits_matches_loop_oracle():
    subsets = [frozenset(c) for r in range(1, 6) for c in itertools.combinations(range(1, 6), r)]
    small = [list(c) for r in range(1, 4) for c in itertools.combinations(subsets, r)]
    rng = random.Random(7)
    a_side = rng.sample(small, 150)
    for a in a_side:
        fa = SetFamily(5, tuple(a))
        for b in small[::7]:
            assert family_hits(fa, SetFamily(5, tuple(b))) == hits_by_loop(a, b)


def test_all_pairs_family():
    assert set(all_pairs_family(3)) == {frozenset(p) for p in ({1, 2}, {1, 3}, {2, 3})}
    assert all_pairs_family(2).size == 1
    assert all_pairs_family(10).size == 45


def test_signatures():
    h = [{1, 2}, {2, 3}]
    assert signature(h, 2) == "11"
    assert signature(h, 1) == "10"
    assert signature([], 5) == ""


def test_find_unhit_pair_examples():
    assert find_unhit_pair([{1, 2, 3, 4}, {1, 2, 5, 6}], 8) == (1, 2)
    assert find_unhit_pair([{1}, {2}], 4) == (3, 4)
    assert find_unhit_pair([], 2) == (1, 2)
    assert find_unhit_pair([{1}], 2) is None


@given(st.integers(2, 64), st.data())
def test_short_families_always_miss_a_pair(k, data):
    t = data.draw(st.integers(0, max(0, math.ceil(math.log2(k)) - 1)))
    h = data.draw(st.lists(st.frozensets(st.integers(1, k), min_size=1), min_size=t, max_size=t))
    if len(h) >= math.log2(k):
        return
    pair = find_unhit_pair(h, k)
    assert pair is not None
    assert not any(len(set(pair) & s) == 1 for s in h)


def test_sampler_support_and_determinism():
    f = sample_candidate_family(2, 50, density_levels=[1], seed=3)
    assert set(f) <= {frozenset({1}), frozenset({2}), frozenset({1, 2})}
    assert sample_candidate_family(8, 64, seed=9) == sample_candidate_family(8, 64, seed=9)
    assert sample_candidate_family(8, 64, seed=9) != sample_candidate_family(8, 64, seed=10)


def test_hit_fraction_examples():
    cert = verify_hit_fraction(fam(3, {1}, {2}, {3}))
    assert cert.exhaustive and cert.max_hit_fraction == 1
    assert cert.witness == {1, 2, 3}
    cert = verify_hit_fraction(fam(2, {1, 2}))
    assert cert.max_hit_fraction == 1 and len(cert.witness) == 1


def test_hit_counts_match_direct_count():
    f = sample_candidate_family(6, 30, seed=1)
    counts = hit_counts(f.masks, 6)
    for h in range(1, 64):
        hs = {i + 1 for i in range(6) if h >> i & 1}
        assert counts[h - 1] == sum(1 for s in f if len(hs & s) == 1)


def test_sampled_certificate_matches_recount():
    f = sample_candidate_family(10, 150, seed=4)
    exact = verify_hit_fraction(f)
    assert exact.max_hit_fraction == recount(f, exact.witness)
    with pytest.raises(FamilyError):
        verify_hit_fraction(f, limit=8)
    sampled = verify_hit_fraction(f, limit=8, sampled=True, samples=2000)
    assert not sampled.exhaustive
    assert sampled.max_hit_fraction == recount(f, sampled.witness) <= exact.max_hit_fraction


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_adding_sets_respects_recount(seed):
    f = sample_candidate_family(6, 20, seed=seed)
    extra = sample_candidate_family(6, 5, seed=seed + 1)
    g = SetFamily(6, f.sets + extra.sets)
    before = verify_hit_fraction(f).max_hit_fraction
    after = verify_hit_fraction(g)
    # the old maximiser's count can only grow by the number of added sets
    assert after.max_hit_fraction == recount(g, after.witness)
    assert after.max_hit_fraction <= Fraction(before * len(f) + len(extra), len(g))


def test_certificate_beta_and_json():
    cert = verify_hit_fraction(sample_candidate_family(8, 40, seed=0))
    assert cert.beta == pytest.approx(1 / (float(cert.max_hit_fraction) * 3))
    data = cert.to_json()
    assert data["kind"] == "property2" and data["exhaustive"]


def test_min_hitting_examples():
    assert min_hitting_family_size(fam(4, {1}, {2}, {3}, {4})) == (1, True)
    assert min_hitting_family_size(fam(2, {1, 2})) == (1, True)
    assert min_hitting_family_size(all_pairs_family(8)).size >= 3
    with pytest.raises(FamilyError):
        min_hitting_family_size(all_pairs_family(11))


def test_min_hitting_pairs_exact_values():
    # a family hits every pair iff member signatures separate all elements,
    # so the exact minimum is ceil(log2 k)
    for k in (3, 4, 5, 8):
        assert min_hitting_family_size(all_pairs_family(k)) == (math.ceil(math.log2(k)), True)


def test_min_hitting_budget_gives_lower_bound():
    bound = min_hitting_family_size(all_pairs_family(8), budget=1)
    assert not bound.exact and bound.size <= 3
