import io
import json
import math
import statistics

import pytest
from hypothesis import given, strategies as st

from radiohit.harness import (CSV_HEADER, ConfigError, ExperimentConfig, ResultRow, draw_subset,
                              high_probability_round, read_csv, resolve_active, run_checks, run_experiment,
                              summarize, to_csv, trial_seed)
from radiohit.tape import RandomTape


def config(**kw):
    return ExperimentConfig.from_json(kw)


def rows(point, rounds, timeouts=0, max_rounds=99):
    out = [ResultRow("wakeup", point, i, r, 0, False) for i, r in enumerate(rounds)]
    out += [ResultRow("wakeup", point, 100 + i, max_rounds, 0, True) for i in range(timeouts)]
    return out


def test_wakeup_rows_and_determinism():
    cfg = config(scenario="wakeup", sweep=[16], algorithm="decay", trials=10, base_seed=5)
    a = run_experiment(cfg)
    assert len(a) == 10 and {r.point for r in a} == {"n=16"}
    assert to_csv(a) == to_csv(run_experiment(cfg))
    assert to_csv(a).splitlines()[0] == ",".join(CSV_HEADER)


def test_parallel_matches_serial():
    cfg = config(scenario="hitting", sweep=[8, 16], player="basic:decay", referee="pairs", trials=6)
    assert to_csv(run_experiment(cfg, jobs=2)) == to_csv(run_experiment(cfg))


def test_csv_roundtrip():
    cfg = config(scenario="hitting", sweep=[8], player="cd:willard", referee="pairs", trials=5)
    out = run_experiment(cfg)
    back = read_csv(io.StringIO(to_csv(out)))
    assert [r.csv_fields() for r in back] == [r.csv_fields() for r in out]
    with pytest.raises(ConfigError):
        read_csv(io.StringIO("a,b\n"))


def test_timeouts_carry_max_rounds():
    cfg = config(scenario="wakeup", sweep=[64], algorithm="uniform:1/1024", trials=3, max_rounds=5)
    out = run_experiment(cfg)
    assert all(r.timeout and r.rounds == 5 for r in out)


def test_broadcast_scenarios_run():
    for topology in ("layered", "path", "clique"):
        cfg = config(scenario="broadcast", sweep=[2], n=8, algorithm="decay", topology=topology,
                     trials=3, referee="singletons")
        assert all(not r.timeout for r in run_experiment(cfg))
    cfg = config(scenario="broadcast-reduction", sweep=[1, 2], n_per_layer=8, player="bcast:decay",
                 referee="singletons", trials=3)
    out = run_experiment(cfg)
    assert [r.point for r in out] == ["D=1 n=8"] * 3 + ["D=2 n=16"] * 3
    assert all(r.proposals >= 1 for r in out)


def test_trial_seed_stable_and_disjoint():
    assert trial_seed(0, "n=16", 0) == trial_seed(0, "n=16", 0)
    a = {trial_seed(7, "n=16", t) for t in range(0, 500)}
    b = {trial_seed(7, "n=16", t) for t in range(500, 1000)}
    assert len(a) == len(b) == 500 and not a & b
    assert trial_seed(1, "n=16", 0) != trial_seed(0, "n=16", 0)


@given(st.integers(1, 500), st.data(), st.integers(0, 2**32))
def test_draw_subset(n, data, seed):
    size = data.draw(st.integers(1, n))
    out = draw_subset(RandomTape(seed).referee_stream(0), n, size)
    assert len(set(out)) == size and min(out) >= 1 and max(out) <= n


def test_resolve_active():
    assert resolve_active("sqrt", 16) == 4
    assert resolve_active("sqrt", 17) == 5
    assert resolve_active("all", 9) == 9
    assert resolve_active(3, 9) == 3
    with pytest.raises(ConfigError):
        resolve_active(10, 9)


# --- summaries ------------------------------------------------------------

def test_summary_constant():
    (s,) = summarize(rows("n=8", [3, 3, 3, 3]))
    assert s["mean"] == s["median"] == s["p95"] == 3


def test_summary_high_probability_round():
    (s,) = summarize(rows("n=4", [1, 2, 3, 4]))
    assert s["hp_round"] == 3
    assert high_probability_round([1, 2, 3, 4], 0, 4) == 3


def test_summary_timeouts():
    (s,) = summarize(rows("n=4", [1, 2, 3], timeouts=1))
    assert s["mean"] == 2 and s["timeouts"] == 1
    assert s["median"] == 2.5 and s["p95"] == math.inf
    assert s["hp_round"] == 3
    (s,) = summarize(rows("n=4", [1, 2], timeouts=2))
    assert s["hp_round"] is None and s["median"] == math.inf


@given(st.lists(st.integers(1, 50), min_size=1, max_size=40), st.integers(2, 64))
def test_summary_against_direct_statistics(rs, n):
    (s,) = summarize(rows(f"n={n}", rs))
    assert s["mean"] == pytest.approx(statistics.fmean(rs))
    assert s["median"] == statistics.median(rs)
    hp = s["hp_round"]
    assert sum(r <= hp for r in rs) >= (1 - 1 / n) * len(rs) - 1e-9
    assert all(sum(r <= x for r in rs) < (1 - 1 / n) * len(rs) - 1e-9 for x in set(rs) if x < hp)


def test_summary_empty():
    with pytest.raises(ValueError):
        summarize([])


# --- configuration errors -------------------------------------------------

@pytest.mark.parametrize("bad", [
    dict(scenario="nope", sweep=[4]),
    dict(scenario="wakeup", sweep=[]),
    dict(scenario="wakeup", sweep=[4], trials=0),
    dict(scenario="wakeup", sweep=[4], colour="red"),
])
def test_config_rejected_at_construction(bad):
    with pytest.raises(ConfigError):
        config(**bad)


@pytest.mark.parametrize("bad", [
    dict(scenario="wakeup", sweep=[16], algorithm="bogus"),
    dict(scenario="wakeup", sweep=[16], algorithm="willard"),
    dict(scenario="wakeup", sweep=[16], algorithm="decay", active=40),
    dict(scenario="hitting", sweep=[16], player="basic:willard", referee="pairs"),
    dict(scenario="hitting", sweep=[16], player="cd:willard", referee="singletons"),
    dict(scenario="hitting", sweep=[16], player="warp:decay", referee="pairs"),
    dict(scenario="hitting", sweep=[16], player="basic:decay", referee="family:/nonexistent.json"),
    dict(scenario="hitting", sweep=[16], player="bcast:decay", referee="pairs"),
    dict(scenario="broadcast-reduction", sweep=[4], n=2, player="bcast:decay", referee="singletons"),
    dict(scenario="broadcast", sweep=[2], n=8, algorithm="decay", topology="torus"),
])
def test_config_rejected_before_trials(bad):
    with pytest.raises(ConfigError):
        run_experiment(config(**bad))


def test_config_file_roundtrip(tmp_path):
    cfg = config(scenario="hitting", sweep=[8], player="basic:decay", referee="pairs", trials=2)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_json()))
    assert ExperimentConfig.load(path) == cfg
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "missing.json")


# --- check mode ------------------------------------------------------------

@pytest.mark.parametrize("player", ["basic:decay", "cd:cd-binsearch", "tree:willard:5", "mc:mc-decay:4",
                                    "mc2:mc-decay:4", "cdmc-tree:mc-decay:4:5"])
def test_checks_pass(player):
    cfg = config(scenario="hitting", sweep=[8], player=player, referee="pairs", trials=8)
    results = run_checks(cfg)
    assert len(results) == 8 and all(r.ok for r in results), [str(r) for r in results if not r.ok]


def test_broadcast_and_gadget_checks():
    cfg = config(scenario="broadcast-reduction", sweep=[2, 4], n=16, player="bcast:decay",
                 referee="singletons", trials=4)
    assert all(r.ok for r in run_checks(cfg))
    results = run_checks(config(scenario="gadget", sweep=[3, 4]))
    assert len(results) == 9 + 16 and all(r.ok for r in results)
    with pytest.raises(ConfigError):
        run_experiment(config(scenario="gadget", sweep=[3]))
    with pytest.raises(ConfigError):
        run_checks(config(scenario="wakeup", sweep=[3], algorithm="decay"))


def test_tree_check_not_cut_by_game_cap():
    # the hitting default cap 4k is below the tree capacity for deep trees
    cfg = config(scenario="hitting", sweep=[16], player="tree:willard:8", referee="pairs", trials=200,
                 base_seed=5)
    assert all(r.ok for r in run_checks(cfg))


def _by_point(cfg):
    return {s["point"]: s for s in summarize(run_experiment(cfg))}


def test_hitting_trend_in_k():
    cfg = config(scenario="hitting", sweep=[16, 64, 256], player="basic:decay", referee="pairs",
                 trials=300, base_seed=2)
    s = _by_point(cfg)
    medians = [s[f"k={k}"]["median"] for k in (16, 64, 256)]
    hp = [s[f"k={k}"]["hp_round"] for k in (16, 64, 256)]
    assert medians == sorted(medians)
    assert hp[0] < hp[1] < hp[2]


def test_broadcast_reduction_roughly_linear_in_depth():
    cfg = config(scenario="broadcast-reduction", sweep=[1, 2, 4], n_per_layer=8, player="bcast:decay",
                 referee="density:200", trials=150, base_seed=4)
    s = _by_point(cfg)
    m1, m2, m4 = (s[f"D={d} n={8 * d}"]["median"] for d in (1, 2, 4))
    assert m1 < m2 < m4
    assert 1.4 < m2 / m1 < 3 and 1.4 < m4 / m2 < 3
