"""Oracles pairing a player's game with the target execution on the same tape.

Each ``check_*`` function plays one game against a fixed target, runs the
algorithm with exactly the target active, and compares what the reduction
argument says must coincide. The result records the expected and observed
values so failures can be reported verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..game import FixedReferee, MultiHittingConfig, play, play_multi
from ..model import DEFAULT_CHANNEL, ExecutionTrace, ModelConfig, run_broadcast, run_wakeup
from ..tape import RandomTape
from .broadcast import broadcast_multihit_player, layered_broadcast_network
from .simulation import check_consistency
from .wakeup import (CD, PLAIN, basic_player, cd_player, cdmc_pair_simulator, cdmc_tree_player,
                     mc_channel_player, mc_two_proposal_player, tree_player)


@dataclass
class CheckResult:
    name: str
    ok: bool
    expected: object = None
    observed: object = None
    detail: dict = field(default_factory=dict)

    def __str__(self) -> str:
        status = "ok" if self.ok else "VIOLATION"
        return f"{self.name}: {status} expected={self.expected} observed={self.observed} {self.detail}"


def target_execution(algorithm, target, config: ModelConfig, tape: RandomTape, max_rounds: int,
                     *, n: int) -> ExecutionTrace:
    return run_wakeup(algorithm, target, config, tape, max_rounds, n=n)


def first_lone_broadcast(trace: ExecutionTrace, target) -> tuple[int, int] | None:
    """First (round, smallest channel) in which exactly one target node transmits on that channel."""
    target = set(target)
    for rec in trace.rounds:
        per_channel: dict[int, int] = {}
        for u, a in rec.actions.items():
            if u in target and a.transmits:
                per_channel[a.channel] = per_channel.get(a.channel, 0) + 1
        lone = [c for c, cnt in per_channel.items() if cnt == 1]
        if lone:
            return rec.round, min(lone)
    return None


def first_meaningful_round(trace: ExecutionTrace, target) -> tuple[int, int] | None:
    """First round in which exactly one target node transmits at all (index 0)
    or exactly one transmits on channel 1 (index 1), as (round, proposal index)."""
    target = set(target)
    for rec in trace.rounds:
        tx = [u for u in target if rec.actions[u].transmits]
        if len(tx) == 1:
            return rec.round, 0
        if sum(1 for u in tx if rec.actions[u].channel == DEFAULT_CHANNEL) == 1:
            return rec.round, 1
    return None


def _game(player, k, target, max_rounds, restricted=False):
    return play(player, FixedReferee(target), k, restricted, max_rounds)


def check_basic(algorithm, k: int, target, seed: int, max_rounds: int) -> CheckResult:
    """Win round of the basic player equals the target execution's solve round."""
    tape = RandomTape(seed)
    player = basic_player(algorithm, k, tape)
    game = _game(player, k, target, max_rounds)
    ref = target_execution(algorithm, target, PLAIN, tape, max_rounds, n=k)
    diverged = check_consistency(player.trace, ref, target)
    ok = game.win_round == ref.solved_round and (diverged is None)
    return CheckResult("basic", ok, ref.solved_round, game.win_round,
                       {"target": sorted(target), "seed": seed, "diverged": diverged})


def check_cd(algorithm, k: int, target, seed: int, max_rounds: int) -> CheckResult:
    """Restricted consistency: no divergence before the win, and the win
    coincides with the target execution's solve round."""
    tape = RandomTape(seed)
    player = cd_player(algorithm, k, tape)
    game = _game(player, k, target, max_rounds)
    ref = target_execution(algorithm, target, CD, tape, max_rounds, n=k)
    diverged = check_consistency(player.trace, ref, target)
    ok = diverged is None and game.win_round == ref.solved_round
    return CheckResult("cd", ok, ref.solved_round, game.win_round,
                       {"target": sorted(target), "seed": seed, "diverged": diverged})


def cd_divergence(algorithm, k: int, target, seed: int, max_rounds: int) -> int | None:
    """First divergence between the CD player's simulation and the target
    execution, without any expectation attached (used for |T| != 2)."""
    tape = RandomTape(seed)
    player = cd_player(algorithm, k, tape)
    _game(player, k, target, max_rounds)
    ref = target_execution(algorithm, target, CD, tape, max_rounds, n=k)
    return check_consistency(player.trace, ref, target)


def _tree_budget(player, game, ref, name, target, seed) -> CheckResult:
    r = ref.solved_round
    detail = {"target": sorted(target), "seed": seed, "capacity": player.capacity,
              "proposals": game.rounds}
    ok = game.rounds <= player.capacity
    expected = None
    if r is not None and r <= player.depth + 1:
        expected = 2 ** r - 1
        ok = ok and game.won and game.win_round <= expected
    return CheckResult(name, ok, expected, game.win_round, detail)


def check_tree(algorithm, k: int, depth: int, target, seed: int, max_rounds: int) -> CheckResult:
    """A target solve round r <= f+1 is matched within 2^r - 1 proposals, and
    the player never exceeds its 2^(f+1) - 1 capacity."""
    tape = RandomTape(seed)
    player = tree_player(algorithm, k, depth, tape, record=False)
    # the player stops by itself after its capacity; a smaller game cap
    # would cut off proposals the budget bound allows
    game = _game(player, k, target, max(max_rounds, player.capacity))
    ref = target_execution(algorithm, target, CD, tape, max(depth + 1, 1), n=k)
    return _tree_budget(player, game, ref, "tree", target, seed)


def check_cdmc_tree(algorithm, k: int, channels: int, depth: int, target, seed: int,
                    max_rounds: int) -> CheckResult:
    tape = RandomTape(seed)
    player = cdmc_tree_player(algorithm, k, channels, depth, tape, record=False)
    game = _game(player, k, target, max(max_rounds, player.capacity))
    ref = target_execution(cdmc_pair_simulator(algorithm, channels), target, CD, tape, depth + 1, n=k)
    return _tree_budget(player, game, ref, "cdmc-tree", target, seed)


def check_mc(algorithm, k: int, channels: int, target, seed: int, max_rounds: int) -> CheckResult:
    """The per-channel player wins at game round (r-1)*C + c for the target
    execution's first lone target broadcaster (round r, smallest channel c)."""
    tape = RandomTape(seed)
    player = mc_channel_player(algorithm, k, channels, tape)
    game = _game(player, k, target, max_rounds)
    ref = target_execution(algorithm, target, ModelConfig(channels=channels), tape,
                           -(-max_rounds // channels), n=k)
    lone = first_lone_broadcast(ref, target)
    expected = (lone[0] - 1) * channels + lone[1] if lone else None
    if expected is not None and expected > max_rounds:
        expected = None
    return CheckResult("mc", game.win_round == expected, expected, game.win_round,
                       {"target": sorted(target), "seed": seed, "lone": lone})


def check_mc2(algorithm, k: int, channels: int, target, seed: int, max_rounds: int) -> CheckResult:
    """The two-proposal player wins in the first meaningful simulated round,
    with the proposal that isolates the lone target broadcaster."""
    tape = RandomTape(seed)
    player = mc_two_proposal_player(algorithm, k, channels, tape)
    game = _game(player, k, target, max_rounds)
    ref = target_execution(algorithm, target, ModelConfig(channels=channels), tape, max_rounds, n=k)
    meaningful = first_meaningful_round(ref, target)
    observed = None
    if game.won:
        o = player.origin(game.win_round)
        observed = (o.sim_round, o.index)
    diverged = check_consistency(player.trace, ref, target)
    ok = diverged is None or (meaningful is not None and diverged > meaningful[0])
    if observed is None:
        # ran out of game rounds: the meaningful round must lie beyond them
        ok = ok and (meaningful is None or meaningful[0] >= player.origin(game.rounds).sim_round)
    else:
        ok = ok and observed == meaningful
    return CheckResult("mc2", ok, meaningful, observed,
                       {"target": sorted(target), "seed": seed, "diverged": diverged})


def check_broadcast(algorithm, n: int, channels: int, D: int, targets, seed: int, max_rounds: int,
                    *, skip_empty: bool = False) -> CheckResult:
    """Every instance i is won in the simulated round in which the target
    execution on the fully wired network first informs L_{i+1}."""
    tape = RandomTape(seed)
    player = broadcast_multihit_player(algorithm, n, channels, D, tape, skip_empty=skip_empty)
    game = play_multi(player, [FixedReferee(t) for t in targets], MultiHittingConfig(n, D), max_rounds)
    topo = layered_broadcast_network(n, D, targets)
    sim_rounds = player.game_to_sim[-1] if player.game_to_sim else 0
    ref = run_broadcast(algorithm, topo, 1, player.config, tape, max(sim_rounds, 1))
    delivered = []
    for i in range(2, D + 2):
        times = [ref.informed_at[v] for v in topo.layer_nodes(i) if v in ref.informed_at]
        if not times:
            break
        delivered.append(min(times))
    observed = [player.game_to_sim[w - 1] for w in game.instance_wins]
    return CheckResult("bcast", observed == delivered, delivered, observed,
                       {"targets": [sorted(t) for t in targets], "seed": seed, "won": game.won})
