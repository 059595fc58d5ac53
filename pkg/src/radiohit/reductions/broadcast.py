"""Layered networks and the broadcast player for the multi-hitting game."""

from __future__ import annotations

from ..model import (BROADCAST_MESSAGE, LISTEN, DEFAULT_CHANNEL, ExecutionTrace, InvalidInputError,
                     ModelConfig, NodeContext, ObsKind, RoundRecord, Topology, resolve_round)
from ..tape import RandomTape
from ..game import Reveal


def layer_layout(n: int, D: int) -> list[int]:
    """Sizes of layers L_1..L_{D+1}.

    The first D layers get n // D nodes each and the last layer the leftover
    nodes, or a single extra node when D divides n.
    """
    if D < 1:
        raise InvalidInputError("D must be >= 1")
    if n < D:
        raise InvalidInputError(f"need n >= D, got n={n}, D={D}")
    s = n // D
    return [s] * D + [n - D * s or 1]


class LayeredTopology(Topology):
    """Cliques L_1..L_{D+1}; the T_i-labelled nodes of L_i see all of L_{i+1}.

    Node with label j in layer i has global id (i-1)*s + j, s = n // D.
    """

    def __init__(self, n: int, D: int, targets):
        sizes = layer_layout(n, D)
        targets = [frozenset(t) for t in targets]
        if len(targets) != D:
            raise InvalidInputError(f"need {D} targets, got {len(targets)}")
        s = sizes[0]
        for i, t in enumerate(targets, 1):
            if not t:
                raise InvalidInputError(f"target {i} is empty: layer {i + 1} would be disconnected")
            if min(t) < 1 or max(t) > s:
                raise InvalidInputError(f"target {i} not within [1, {s}]")
        self.sizes = sizes
        self.D = D
        self.layer_size = s
        self.targets = targets
        edges = []
        for i in range(1, D + 2):
            members = self.layer_nodes(i)
            edges += [(u, v) for a, u in enumerate(members) for v in members[a + 1:]]
            if i <= D:
                nxt = self.layer_nodes(i + 1)
                edges += [(self.node_id(i, j), v) for j in sorted(targets[i - 1]) for v in nxt]
        super().__init__(sum(sizes), edges)

    def node_id(self, layer: int, label: int) -> int:
        return (layer - 1) * self.layer_size + label

    def layer_nodes(self, layer: int) -> list[int]:
        first = (layer - 1) * self.layer_size + 1
        return list(range(first, first + self.sizes[layer - 1]))

    def layer_of(self, u: int) -> int:
        return min((u - 1) // self.layer_size + 1, self.D + 1)

    def label_of(self, u: int) -> int:
        return u - (self.layer_of(u) - 1) * self.layer_size


def layered_broadcast_network(n: int, D: int, targets) -> LayeredTopology:
    return LayeredTopology(n, D, targets)


class _PartialView:
    """The layered network as known to the player: cut i is wired only once
    T_i has been revealed."""

    complete = False

    def __init__(self, n: int, D: int):
        self.sizes = layer_layout(n, D)
        self.s = self.sizes[0]
        self.D = D
        self.n = sum(self.sizes)
        self.known: list[frozenset] = []

    def layer_of(self, u: int) -> int:
        return min((u - 1) // self.s + 1, self.D + 1)

    def label_of(self, u: int) -> int:
        return u - (self.layer_of(u) - 1) * self.s

    def adjacent(self, u: int, v: int) -> bool:
        lu, lv = self.layer_of(u), self.layer_of(v)
        if lu == lv:
            return u != v
        if abs(lu - lv) != 1:
            return False
        if lu > lv:
            u, lu = v, lv
        return lu <= len(self.known) and self.label_of(u) in self.known[lu - 1]


class BroadcastMultiHitPlayer:
    """Multi-hitting player (k = n, k' = D) simulating a broadcast algorithm
    on the layered network.

    Each simulated round proposes the labels of the deepest informed layer's
    channel-1 broadcasters. Winning instance i reveals T_i, after which the
    cut L_i -> L_{i+1} is part of the simulation and the message crosses it
    in that same round. With ``skip_empty`` rounds with no such broadcaster
    are simulated without charging a game round.
    """

    def __init__(self, algorithm, n: int, channels: int, D: int, tape: RandomTape, *,
                 skip_empty: bool = False, config: ModelConfig | None = None,
                 max_sim_rounds: int = 1_000_000):
        self.algorithm = algorithm
        self.n = n
        self.D = D
        self.tape = tape
        self.skip_empty = skip_empty
        self.config = config or ModelConfig(channels=channels, receiver_cd=True)
        self.max_sim_rounds = max_sim_rounds
        self.trace = ExecutionTrace()
        self.informed_at: dict[int, int] = {}
        self.instance_rounds: list[int] = []  # simulated round in which each instance was won
        self.game_to_sim: list[int] = []
        self.view: _PartialView | None = None

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.algorithm!r}, n={self.n}, D={self.D})"

    @property
    def source(self) -> int:
        return 1

    def moves(self):
        view = self.view = _PartialView(self.n, self.D)
        cfg = self.config

        def spawn(u):
            return self.algorithm.spawn(NodeContext(u, view.n, cfg, self.tape.stream(u), BROADCAST_MESSAGE))

        programs = {self.source: spawn(self.source)}
        self.trace = ExecutionTrace(informed_at={self.source: 0})
        self.informed_at = self.trace.informed_at
        self.instance_rounds = []
        self.game_to_sim = []
        deepest = 1
        for rnd in range(1, self.max_sim_rounds + 1):
            actions = {u: p.act() for u, p in programs.items()}
            proposal = frozenset(view.label_of(u) for u, a in actions.items()
                                 if a.transmits and a.channel == DEFAULT_CHANNEL
                                 and view.layer_of(u) == deepest)
            if proposal or not self.skip_empty:
                self.game_to_sim.append(rnd)
                got = yield proposal
                if isinstance(got, Reveal):
                    view.known.append(frozenset(got.target))
                    self.instance_rounds.append(rnd)
            everyone = dict.fromkeys(range(1, view.n + 1), LISTEN)
            everyone.update(actions)
            obs = resolve_round(view, cfg, everyone)
            self.trace.rounds.append(RoundRecord(rnd, actions, {u: obs[u] for u in actions}))
            for u, p in programs.items():
                p.observe(obs[u])
            for v in range(1, view.n + 1):
                if v not in programs and obs[v].kind is ObsKind.RECEIVED:
                    programs[v] = spawn(v)
                    self.informed_at[v] = rnd
                    deepest = max(deepest, view.layer_of(v))
            if len(programs) == view.n:
                self.trace.solved_round = rnd
                return


def broadcast_multihit_player(algorithm, n: int, channels: int, D: int, tape: RandomTape, *,
                              skip_empty: bool = False, config: ModelConfig | None = None) -> BroadcastMultiHitPlayer:
    return BroadcastMultiHitPlayer(algorithm, n, channels, D, tape, skip_empty=skip_empty, config=config)
