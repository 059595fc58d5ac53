"""Players built from wake-up algorithms."""

from __future__ import annotations

from dataclasses import dataclass

from ..algorithms import Algorithm, Program, ScriptedAlgorithm, ceil_log2
from ..model import (FEEDBACK_NOT_ALONE, LISTEN, ModelConfig, NodeAction, NodeContext, ObsKind,
                     resolve_round, Topology)
from ..tape import RandomTape
from .simulation import (Simulation, SimulationPlayer, SimulationStrategy, all_broadcasters,
                         all_then_default_channel, broadcasters_collide, per_channel, receive_nothing,
                         universal)

PLAIN = ModelConfig()
CD = ModelConfig.with_cd()


def basic_player(algorithm, k: int, tape: RandomTape, *, record: bool = True) -> SimulationPlayer:
    """Propose this round's broadcasters; everyone then hears nothing."""
    return SimulationPlayer(algorithm, k, PLAIN, tape,
                            SimulationStrategy(all_broadcasters, receive_nothing), record=record)


def cd_player(algorithm, k: int, tape: RandomTape, *, record: bool = True) -> SimulationPlayer:
    """Propose this round's broadcasters; broadcasters then detect a collision
    and everyone else hears silence. Consistent only for pair targets."""
    return SimulationPlayer(algorithm, k, CD, tape,
                            SimulationStrategy(all_broadcasters, broadcasters_collide), record=record)


def mc_channel_player(algorithm, k: int, channels: int, tape: RandomTape, *, record: bool = True) -> SimulationPlayer:
    """One proposal per channel per simulated round (channel 1 first)."""
    return SimulationPlayer(algorithm, k, ModelConfig(channels=channels), tape,
                            SimulationStrategy(per_channel, receive_nothing), record=record)


def mc_two_proposal_player(algorithm, k: int, channels: int, tape: RandomTape, *,
                           record: bool = True) -> SimulationPlayer:
    """All broadcasters, then the channel-1 broadcasters when that set is new
    and non-empty."""
    return SimulationPlayer(algorithm, k, ModelConfig(channels=channels), tape,
                            SimulationStrategy(all_then_default_channel, receive_nothing), record=record)


@dataclass(frozen=True)
class SimTreeNode:
    path: str  # one bit per simulated round: 0 silence, 1 collision

    @property
    def depth(self) -> int:
        return len(self.path)

    @property
    def label(self) -> int | None:
        return int(self.path[-1]) if self.path else None


def tree_nodes(depth: int):
    """Nodes of the full binary tree of the given depth in breadth-first
    order, left (silence) before right (collision)."""
    for d in range(depth + 1):
        for i in range(2 ** d):
            yield SimTreeNode(format(i, f"0{d}b") if d else "")


class TreePlayer:
    """One proposal per node u of the depth-f simulation tree.

    For u, the algorithm is re-run from round 1 for depth(u) rounds with every
    node forced to observe silence or collision as dictated by path(u); the
    proposal is the set of nodes broadcasting in round depth(u)+1. Every re-run
    draws each node's bits from the start of the same tape substream. After
    the 2^(f+1)-1 proposals the player stops.
    """

    def __init__(self, algorithm, k: int, depth: int, tape: RandomTape, config: ModelConfig = CD,
                 *, record: bool = True):
        if depth < 0:
            raise ValueError("tree depth must be >= 0")
        self.algorithm = algorithm
        self.record = record
        self.k = k
        self.depth = depth
        self.tape = tape
        self.config = config
        self.nodes: list[SimTreeNode] = []
        self.last_sim: Simulation | None = None

    @property
    def capacity(self) -> int:
        return 2 ** (self.depth + 1) - 1

    def simulate(self, node: SimTreeNode, *, record: bool = False) -> Simulation:
        sim = Simulation(self.algorithm, self.k, self.config, self.tape, record=record)
        for bit in node.path:
            actions = sim.decide()
            sim.deliver(universal(int(bit))(actions, self.config))
        return sim

    def moves(self):
        self.nodes = []
        for node in tree_nodes(self.depth):
            sim = self.simulate(node, record=self.record)
            actions = sim.decide()
            self.last_sim = sim
            self.nodes.append(node)
            yield all_broadcasters(actions, self.config)[0]


def tree_player(algorithm, k: int, depth: int, tape: RandomTape, *, record: bool = True) -> TreePlayer:
    return TreePlayer(algorithm, k, depth, tape, record=record)


# --- collision detection + multiple channels ------------------------------

class _PairProgram(Program):
    """Outer single-channel node simulating one multichannel inner node.

    A group starts by mirroring the inner node's transmit decision. Double
    transmission is followed by one round per bit of (channel - 1), MSB
    first, transmitting on 1-bits; surviving every bit means both inner nodes
    chose the same channel and both are fed a collision.
    """

    def __init__(self, ctx, alg):
        super().__init__(ctx)
        self.bits = ceil_log2(alg.inner_channels)
        inner_cfg = ModelConfig(channels=alg.inner_channels, receiver_cd=True, transmitter_cd=True)
        self.inner = alg.inner.spawn(NodeContext(ctx.node, ctx.n, inner_cfg, ctx.stream, ctx.message))
        self.phase = 0  # 0: group start, 1..bits: bit rounds
        self.inner_action = None
        self.group_start = 1
        self.groups = []  # (first round, last round, outcome)

    def decide(self):
        if self.phase == 0:
            self.inner_action = self.inner.act()
            self.group_start = self.round
            return NodeAction.transmit(self.payload) if self.inner_action.transmits else LISTEN
        bit = (self.inner_action.channel - 1) >> (self.bits - self.phase) & 1
        return NodeAction.transmit(self.payload) if bit else LISTEN

    def observe(self, obs):
        if obs.kind is ObsKind.RECEIVED or (obs.kind is ObsKind.FEEDBACK and obs.alone):
            self.done = True
            self.groups.append((self.group_start, self.round, "solved"))
            return
        if self.phase == 0 and not self.inner_action.transmits:
            self.inner.observe(obs)
            self.groups.append((self.group_start, self.round, obs.kind.value))
            return
        if self.phase < self.bits:
            self.phase += 1
            return
        self.phase = 0
        self.inner.observe(FEEDBACK_NOT_ALONE)
        self.groups.append((self.group_start, self.round, "same-channel"))


class PairSimulator(Algorithm):
    """Two-node single-channel CD algorithm simulating a C-channel CD algorithm."""

    name = "cdmc-pair"
    requires_cd = True
    required_active = 2

    def __init__(self, inner, channels: int):
        super().__init__(inner.n)
        self.inner = inner
        self.inner_channels = channels

    def __repr__(self):
        return f"{self.name}({self.inner!r}, C={self.inner_channels})"

    @property
    def group_length(self) -> int:
        return ceil_log2(self.inner_channels) + 1

    def spawn(self, ctx):
        return _PairProgram(ctx, self)


def cdmc_pair_simulator(algorithm, channels: int) -> PairSimulator:
    return PairSimulator(algorithm, channels)


def cdmc_tree_player(algorithm, k: int, channels: int, depth: int, tape: RandomTape, *,
                     record: bool = True) -> TreePlayer:
    return TreePlayer(cdmc_pair_simulator(algorithm, channels), k, depth, tape, record=record)


def channel_equality_probe(ci: int, cj: int, channels: int) -> tuple[bool, int]:
    """Run one gadget group for two inner nodes transmitting on ``ci``/``cj``.

    Returns (declared equal, rounds used). Unequal channels end the group
    early with a lone transmission.
    """
    chans = {1: ci, 2: cj}
    inner = ScriptedAlgorithm(lambda node, rnd, stream, seen: chans[node] if rnd == 1 else None,
                              2, channels=channels, requires_cd=True)
    alg = PairSimulator(inner, channels)
    topo = Topology.clique(2)
    progs = {u: alg.spawn(NodeContext(u, 2, CD, RandomTape(0).stream(u))) for u in (1, 2)}
    for rnd in range(1, alg.group_length + 1):
        actions = {u: p.act() for u, p in progs.items()}
        if sum(a.transmits for a in actions.values()) == 1:
            return False, rnd
        obs = resolve_round(topo, CD, actions)
        for u, p in progs.items():
            p.observe(obs[u])
        if all(p.groups for p in progs.values()):
            outcomes = {p.groups[0][2] for p in progs.values()}
            return outcomes == {"same-channel"}, rnd
    raise AssertionError("group did not conclude")
