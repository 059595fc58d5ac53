"""Seeded experiment batches, result tables and their summaries."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .algorithms import ceil_log2, resolve_algorithm
from .game import MultiHittingConfig, play, play_multi
from .model import InvalidInputError, ModelConfig, Topology, run_broadcast, run_wakeup
from .reductions import channel_equality_probe, checks, layer_layout, layered_broadcast_network
from .registry import SpecError, parse_player, parse_referee
from .tape import RandomTape

SCENARIOS = ("wakeup", "hitting", "broadcast", "broadcast-reduction")
CHECK_SCENARIOS = ("hitting", "broadcast-reduction", "gadget")
CSV_HEADER = ("scenario", "point", "seed", "rounds", "proposals", "timeout")
_DEFAULT_SWEEP = {"wakeup": "n", "hitting": "k", "broadcast": "D", "broadcast-reduction": "D", "gadget": "C"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    scenario: str
    sweep: list
    sweep_param: str | None = None
    n: int | None = None
    n_per_layer: int | None = None
    channels: int = 1
    D: int = 1
    cd: bool = False
    algorithm: str | None = None
    player: str | None = None
    referee: str | None = None
    active: int | str = 2
    topology: str = "layered"
    trials: int = 10
    base_seed: int = 0
    max_rounds: int | None = None
    skip_empty: bool = False
    output: str | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS + ("gadget",):
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if not self.sweep:
            raise ConfigError("sweep list must be non-empty")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.sweep_param is None:
            self.sweep_param = _DEFAULT_SWEEP[self.scenario]
        if self.sweep_param not in ("n", "k", "D", "C"):
            raise ConfigError(f"cannot sweep over {self.sweep_param!r}")

    @classmethod
    def from_json(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                return cls.from_json(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None

    def to_json(self) -> dict:
        return dataclasses.asdict(self)

    def points(self) -> list[dict]:
        """One parameter dict per sweep value, with n/D/k filled in."""
        out = []
        for v in self.sweep:
            p = {"n": self.n, "D": self.D, "C": self.channels}
            key = "n" if self.sweep_param == "k" else self.sweep_param
            p[key] = int(v)
            if self.scenario == "broadcast-reduction" and self.sweep_param != "D" and self.player:
                layers = parse_player(self.player).layers
                if layers is not None:
                    p["D"] = layers
            if self.sweep_param == "D" and self.n_per_layer is not None:
                p["n"] = self.n_per_layer * p["D"]
            if p["n"] is None and self.scenario != "gadget":
                raise ConfigError("n is neither swept nor fixed")
            out.append(p)
        return out

    def point_label(self, p: dict) -> str:
        if self.scenario in ("broadcast", "broadcast-reduction"):
            return f"D={p['D']} n={p['n']}"
        if self.scenario == "gadget":
            return f"C={p['C']}"
        return f"{'k' if self.scenario == 'hitting' else 'n'}={p['n']}"

    def default_max_rounds(self, p: dict) -> int:
        if self.max_rounds is not None:
            return self.max_rounds
        log2n = max(1, ceil_log2(p["n"]))
        if self.scenario == "hitting":
            return 4 * p["n"]
        if self.scenario == "wakeup":
            return 64 * log2n ** 2
        return 64 * p["D"] * log2n ** 2


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    point: str
    seed: int
    rounds: int
    proposals: int
    timeout: bool
    wall_time: float = 0.0

    def csv_fields(self) -> list:
        return [self.scenario, self.point, self.seed, self.rounds, self.proposals, int(self.timeout)]


def trial_seed(base_seed: int, point: str, trial: int) -> int:
    digest = hashlib.blake2b(f"{point}|{trial}".encode(), digest_size=8).digest()
    return (base_seed ^ int.from_bytes(digest, "big")) & ((1 << 64) - 1)


def resolve_active(active, n: int) -> int:
    if active == "sqrt":
        return max(1, math.isqrt(n - 1) + 1) if n > 1 else 1
    if active == "all":
        return n
    a = int(active)
    if not 1 <= a <= n:
        raise ConfigError(f"active set size {a} not within [1, {n}]")
    return a


def draw_subset(stream, n: int, size: int) -> list[int]:
    """``size`` distinct ids from [n] by a partial Fisher-Yates shuffle."""
    swapped: dict[int, int] = {}
    out = []
    for i in range(size):
        j = i + stream.randbelow(n - i)
        out.append(swapped.get(j, j + 1))
        swapped[j] = swapped.get(i, i + 1)
    return sorted(out)


def model_config(cfg: ExperimentConfig, channels: int) -> ModelConfig:
    return ModelConfig(channels=channels, receiver_cd=cfg.cd, transmitter_cd=cfg.cd)


def validate(cfg: ExperimentConfig) -> None:
    """Resolve every spec string once; raises ConfigError before any trial."""
    try:
        for p in cfg.points():
            if cfg.scenario == "gadget":
                if p["C"] < 1:
                    raise ConfigError("channel count must be >= 1")
                continue
            if cfg.scenario in ("wakeup", "broadcast"):
                if not cfg.algorithm:
                    raise ConfigError(f"scenario {cfg.scenario} needs an algorithm")
                alg = resolve_algorithm(cfg.algorithm, p["n"], p["C"], broadcast=cfg.scenario == "broadcast")
                if alg.requires_cd and not cfg.cd:
                    raise ConfigError(f"{cfg.algorithm!r} requires collision detection (set cd: true)")
                if alg.channels > p["C"]:
                    raise ConfigError(f"{cfg.algorithm!r} uses {alg.channels} channels, model has {p['C']}")
            if cfg.scenario == "wakeup":
                resolve_active(cfg.active, p["n"])
            if cfg.scenario in ("broadcast", "broadcast-reduction"):
                layer_layout(p["n"], p["D"])
            if cfg.scenario == "broadcast" and cfg.topology not in ("layered", "path", "clique"):
                raise ConfigError(f"unknown topology {cfg.topology!r}")
            if cfg.scenario in ("hitting", "broadcast-reduction"):
                if not cfg.player or not cfg.referee:
                    raise ConfigError(f"scenario {cfg.scenario} needs a player and a referee")
                spec = parse_player(cfg.player)
                if spec.multi != (cfg.scenario == "broadcast-reduction"):
                    raise ConfigError(f"player {cfg.player!r} does not play scenario {cfg.scenario}")
                spec.check(p["n"])
                if spec.multi and spec.layers is not None and spec.layers != p["D"]:
                    raise ConfigError(f"player {cfg.player!r} is fixed to D={spec.layers}, point has D={p['D']}")
                universe = p["n"] // p["D"] if spec.multi else p["n"]
                ref = parse_referee(cfg.referee)
                ref.build(universe, seed=cfg.base_seed)
                if spec.restricted and not ref.pairs_only(universe):
                    raise ConfigError(f"player {cfg.player!r} plays the restricted game; referee must draw pairs")
            if cfg.scenario == "broadcast" and cfg.topology == "layered" and cfg.referee:
                parse_referee(cfg.referee).build(p["n"] // p["D"], seed=cfg.base_seed)
    except (SpecError, InvalidInputError, OSError, KeyError) as exc:
        raise ConfigError(str(exc)) from None


# --- scenarios ------------------------------------------------------------

def _wakeup(cfg, p, seed, max_rounds):
    alg = resolve_algorithm(cfg.algorithm, p["n"], p["C"])
    tape = RandomTape(seed)
    active = draw_subset(tape.referee_stream(0), p["n"], resolve_active(cfg.active, p["n"]))
    trace = run_wakeup(alg, active, model_config(cfg, p["C"]), tape, max_rounds, n=p["n"], record=False)
    return trace.solved_round, 0


def _layer_targets(cfg, p, tape):
    s = p["n"] // p["D"]
    referee = parse_referee(cfg.referee or "singletons").build(s, seed=cfg.base_seed)
    return [referee.draw(tape.referee_stream(i)) for i in range(p["D"])]


def _broadcast(cfg, p, seed, max_rounds):
    alg = resolve_algorithm(cfg.algorithm, p["n"], p["C"], broadcast=True)
    tape = RandomTape(seed)
    if cfg.topology == "path":
        topo = Topology.path(p["n"])
    elif cfg.topology == "clique":
        topo = Topology.clique(p["n"])
    else:
        topo = layered_broadcast_network(p["n"], p["D"], _layer_targets(cfg, p, tape))
    config = ModelConfig(channels=p["C"], receiver_cd=cfg.cd)
    trace = run_broadcast(alg, topo, 1, config, tape, max_rounds, record=False)
    return trace.solved_round, 0


def _hitting(cfg, p, seed, max_rounds):
    spec = parse_player(cfg.player)
    referee = parse_referee(cfg.referee).build(p["n"], seed=cfg.base_seed)
    player = spec.build(p["n"], RandomTape(seed))
    game = play(player, referee, p["n"], spec.restricted, max_rounds, seed=seed)
    return game.win_round, game.rounds


def _broadcast_reduction(cfg, p, seed, max_rounds):
    spec = parse_player(cfg.player)
    n, D = p["n"], p["D"]
    referee = parse_referee(cfg.referee).build(n // D, seed=cfg.base_seed)
    player = spec.build(n, RandomTape(seed), layers=D)
    player.skip_empty = cfg.skip_empty
    game = play_multi(player, referee, MultiHittingConfig(n, D), max_rounds, seed=seed)
    if not game.won:
        return None, game.rounds
    return player.game_to_sim[game.win_round - 1], game.rounds


_RUNNERS = {"wakeup": _wakeup, "broadcast": _broadcast, "hitting": _hitting,
            "broadcast-reduction": _broadcast_reduction}


def _run_one(args) -> ResultRow:
    cfg, p, label, seed = args
    max_rounds = cfg.default_max_rounds(p)
    start = time.perf_counter()
    rounds, proposals = _RUNNERS[cfg.scenario](cfg, p, seed, max_rounds)
    elapsed = time.perf_counter() - start
    timeout = rounds is None
    return ResultRow(cfg.scenario, label, seed, max_rounds if timeout else rounds, proposals, timeout, elapsed)


def trial_plan(cfg: ExperimentConfig) -> list[tuple]:
    plan = []
    for p in cfg.points():
        label = cfg.point_label(p)
        for t in range(cfg.trials):
            plan.append((cfg, p, label, trial_seed(cfg.base_seed, label, t)))
    return plan


def run_experiment(cfg: ExperimentConfig, *, jobs: int = 1) -> list[ResultRow]:
    """One ResultRow per (point, trial), in sweep order then trial order."""
    if cfg.scenario not in SCENARIOS:
        raise ConfigError(f"scenario {cfg.scenario!r} is only available in check mode")
    validate(cfg)
    plan = trial_plan(cfg)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(_run_one, plan, chunksize=max(1, len(plan) // (4 * jobs))))
    return [_run_one(item) for item in plan]


def write_csv(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(r.csv_fields())


def to_csv(rows) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def read_csv(fh) -> list[ResultRow]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ConfigError(f"expected CSV header {','.join(CSV_HEADER)}")
    return [ResultRow(s, pt, int(seed), int(rounds), int(props), bool(int(to)))
            for s, pt, seed, rounds, props, to in reader]


# --- summaries ------------------------------------------------------------

def _point_size(point: str) -> int | None:
    fields = dict(part.split("=", 1) for part in point.split() if "=" in part)
    for key in ("n", "k"):
        if key in fields:
            return int(fields[key])
    return None


def high_probability_round(rounds, timeouts, n: int) -> int | None:
    """Smallest r such that at least a 1 - 1/n fraction of all trials
    (timeouts included in the denominator) finished within r rounds."""
    total = len(rounds) + timeouts
    need = (1 - 1 / n) * total
    for i, r in enumerate(sorted(rounds), 1):
        if i >= need - 1e-9:
            return r
    return None


def _nearest_rank(values, q: float) -> float:
    return values[max(0, math.ceil(q * len(values)) - 1)]


def summarize(rows) -> list[dict]:
    """Per (scenario, point): mean over solved trials, median and p95 with
    timeouts counted as +inf, and the high-probability round."""
    rows = list(rows)
    if not rows:
        raise ValueError("cannot summarize an empty result table")
    groups: dict[tuple, list[ResultRow]] = {}
    for r in rows:
        groups.setdefault((r.scenario, r.point), []).append(r)
    out = []
    for (scenario, point), rs in groups.items():
        solved = [r.rounds for r in rs if not r.timeout]
        timeouts = len(rs) - len(solved)
        ranked = sorted(solved) + [math.inf] * timeouts
        n = _point_size(point)
        out.append({
            "scenario": scenario,
            "point": point,
            "trials": len(rs),
            "timeouts": timeouts,
            "mean": statistics.fmean(solved) if solved else None,
            "median": statistics.median(ranked),
            "p95": _nearest_rank(ranked, 0.95),
            "hp_round": high_probability_round(solved, timeouts, n) if n and n > 1 else None,
            "mean_proposals": statistics.fmean(r.proposals for r in rs),
        })
    return out


def summary_json(summary) -> str:
    def clean(v):
        return None if isinstance(v, float) and math.isinf(v) else v
    return json.dumps([{k: clean(v) for k, v in s.items()} for s in summary], indent=2)


# --- consistency checks ---------------------------------------------------

def run_checks(cfg: ExperimentConfig) -> list:
    """Pair every trial with its target execution and check the identity
    the player's reduction guarantees."""
    if cfg.scenario not in CHECK_SCENARIOS:
        raise ConfigError(f"no consistency check for scenario {cfg.scenario!r}")
    validate(cfg)
    results = []
    for p in cfg.points():
        if cfg.scenario == "gadget":
            results.extend(gadget_checks(p["C"]))
            continue
        label = cfg.point_label(p)
        spec = parse_player(cfg.player)
        n = p["n"]
        max_rounds = cfg.default_max_rounds(p)
        for t in range(cfg.trials):
            seed = trial_seed(cfg.base_seed, label, t)
            stream = RandomTape(seed).referee_stream
            if spec.multi:
                D = p["D"]
                referee = parse_referee(cfg.referee).build(n // D, seed=cfg.base_seed)
                targets = [referee.draw(stream(i)) for i in range(D)]
                alg = spec._algorithm(n)
                results.append(checks.check_broadcast(alg, n, spec.channels, D, targets, seed, max_rounds,
                                                      skip_empty=cfg.skip_empty))
                continue
            referee = parse_referee(cfg.referee).build(n, seed=cfg.base_seed)
            target = frozenset(referee.draw(stream(0)))
            results.append(check_player(spec, n, target, seed, max_rounds))
    return results


def check_player(spec, k: int, target, seed: int, max_rounds: int):
    alg = spec._algorithm(k)
    if spec.kind == "basic":
        return checks.check_basic(alg, k, target, seed, max_rounds)
    if spec.kind == "cd":
        return checks.check_cd(alg, k, target, seed, max_rounds)
    if spec.kind == "tree":
        return checks.check_tree(alg, k, spec.depth, target, seed, max_rounds)
    if spec.kind == "mc":
        return checks.check_mc(alg, k, spec.channels, target, seed, max_rounds)
    if spec.kind == "mc2":
        return checks.check_mc2(alg, k, spec.channels, target, seed, max_rounds)
    return checks.check_cdmc_tree(alg, k, spec.channels, spec.depth, target, seed, max_rounds)


def gadget_checks(channels: int) -> list:
    results = []
    full = ceil_log2(channels) + 1
    for ci in range(1, channels + 1):
        for cj in range(1, channels + 1):
            equal, rounds = channel_equality_probe(ci, cj, channels)
            ok = equal == (ci == cj) and (rounds == full if equal else rounds <= full)
            results.append(checks.CheckResult("gadget", ok, ci == cj, equal,
                                              {"C": channels, "ci": ci, "cj": cj, "rounds": rounds}))
    return results
