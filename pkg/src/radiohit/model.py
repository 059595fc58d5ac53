"""Synchronous radio network model: rounds, channels, collisions and the two
problems run on top of it (wake-up and global broadcast)."""

from __future__ import annotations

import enum
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from .tape import RandomTape

DEFAULT_CHANNEL = 1
BROADCAST_MESSAGE = b"m"


class ModelError(ValueError):
    pass


class InvalidActionError(ModelError):
    pass


class InvalidNodeError(ModelError):
    pass


class InvalidInputError(ModelError):
    pass


class PreconditionError(ModelError):
    """An algorithm was run under a model it does not support."""


@dataclass(frozen=True)
class ModelConfig:
    channels: int = 1
    receiver_cd: bool = False
    transmitter_cd: bool = False
    default_channel: int = DEFAULT_CHANNEL

    def __post_init__(self):
        if self.channels < 1:
            raise InvalidInputError("channels must be >= 1")
        if self.default_channel != DEFAULT_CHANNEL:
            raise InvalidInputError("default channel is fixed to 1")
        if self.transmitter_cd and not self.receiver_cd:
            raise InvalidInputError("transmitter feedback requires receiver collision detection")

    @classmethod
    def with_cd(cls, channels: int = 1) -> "ModelConfig":
        return cls(channels=channels, receiver_cd=True, transmitter_cd=True)


class Topology:
    """Connected undirected graph over node ids 1..n."""

    def __init__(self, n: int, edges=(), *, complete: bool = False):
        if n < 1:
            raise InvalidInputError("n must be >= 1")
        self.n = n
        self.complete = complete
        if complete:
            self._adj = None
        else:
            adj = [set() for _ in range(n + 1)]
            for u, v in edges:
                u, v = int(u), int(v)
                if u == v:
                    raise InvalidInputError(f"self-loop at {u}")
                if not (1 <= u <= n and 1 <= v <= n):
                    raise InvalidNodeError(f"edge ({u}, {v}) outside [1, {n}]")
                adj[u].add(v)
                adj[v].add(u)
            self._adj = tuple(frozenset(a) for a in adj)
        self.diameter = self._compute_diameter()

    @classmethod
    def clique(cls, n: int) -> "Topology":
        return cls(n, complete=True)

    @classmethod
    def path(cls, n: int) -> "Topology":
        return cls(n, [(i, i + 1) for i in range(1, n)])

    def __repr__(self) -> str:
        kind = "clique" if self.complete else f"{len(self.edges)} edges"
        return f"Topology(n={self.n}, {kind}, D={self.diameter})"

    @property
    def nodes(self) -> range:
        return range(1, self.n + 1)

    @property
    def edges(self) -> frozenset:
        if self.complete:
            return frozenset((u, v) for u in self.nodes for v in range(u + 1, self.n + 1))
        return frozenset((u, v) for u in self.nodes for v in self._adj[u] if u < v)

    def neighbors(self, u: int) -> frozenset:
        if self.complete:
            return frozenset(v for v in self.nodes if v != u)
        return self._adj[u]

    def adjacent(self, u: int, v: int) -> bool:
        if self.complete:
            return u != v
        return v in self._adj[u]

    def eccentricity(self, u: int) -> int:
        dist = {u: 0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in self.neighbors(x):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        if len(dist) != self.n:
            raise InvalidInputError("topology is not connected")
        return max(dist.values())

    def _compute_diameter(self) -> int:
        if self.complete:
            return 0 if self.n == 1 else 1
        return max(self.eccentricity(u) for u in self.nodes)

    def to_json(self) -> dict:
        return {"n": self.n, "edges": sorted([u, v] for u, v in self.edges)}

    @classmethod
    def from_json(cls, data: Mapping) -> "Topology":
        return cls(int(data["n"]), [tuple(e) for e in data["edges"]])


class ActionKind(enum.Enum):
    TRANSMIT = "transmit"
    LISTEN = "listen"


@dataclass(frozen=True)
class NodeAction:
    kind: ActionKind
    channel: int = DEFAULT_CHANNEL
    payload: bytes | None = None
    transmits: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tx = self.kind is ActionKind.TRANSMIT
        if tx != (self.payload is not None):
            raise InvalidActionError("payload is present iff the action transmits")
        object.__setattr__(self, "transmits", tx)

    @classmethod
    def transmit(cls, payload: bytes, channel: int = DEFAULT_CHANNEL) -> "NodeAction":
        return cls(ActionKind.TRANSMIT, channel, payload)

    @classmethod
    def listen(cls, channel: int = DEFAULT_CHANNEL) -> "NodeAction":
        return cls(ActionKind.LISTEN, channel)

    def to_json(self):
        if self.transmits:
            return {"tx": self.channel, "payload": self.payload.hex()}
        return {"rx": self.channel}


LISTEN = NodeAction.listen()


class ObsKind(enum.Enum):
    SILENCE = "silence"
    RECEIVED = "received"
    COLLISION = "collision"
    FEEDBACK = "feedback"
    NO_FEEDBACK = "no-feedback"


@dataclass(frozen=True)
class Observation:
    kind: ObsKind
    payload: bytes | None = None
    sender: int | None = None
    alone: bool | None = None

    @classmethod
    def received(cls, payload: bytes, sender: int) -> "Observation":
        return cls(ObsKind.RECEIVED, payload, sender)

    @classmethod
    def feedback(cls, alone: bool) -> "Observation":
        return FEEDBACK_ALONE if alone else FEEDBACK_NOT_ALONE

    @property
    def is_collision(self) -> bool:
        """Collision as seen by either a listener or a transmitter."""
        return self.kind is ObsKind.COLLISION or (self.kind is ObsKind.FEEDBACK and not self.alone)

    def to_json(self):
        if self.kind is ObsKind.RECEIVED:
            return {"kind": self.kind.value, "sender": self.sender, "payload": self.payload.hex()}
        if self.kind is ObsKind.FEEDBACK:
            return {"kind": self.kind.value, "alone": self.alone}
        return {"kind": self.kind.value}


SILENCE = Observation(ObsKind.SILENCE)
COLLISION = Observation(ObsKind.COLLISION)
NO_FEEDBACK = Observation(ObsKind.NO_FEEDBACK)
FEEDBACK_ALONE = Observation(ObsKind.FEEDBACK, alone=True)
FEEDBACK_NOT_ALONE = Observation(ObsKind.FEEDBACK, alone=False)


def resolve_round(topology: Topology, config: ModelConfig,
                  actions: Mapping[int, NodeAction]) -> dict[int, Observation]:
    """Resolve one synchronous round for every acting node.

    A listener on channel c receives iff exactly one of its neighbours
    transmits on c. Transmitter feedback only exists on single-hop (clique)
    topologies; elsewhere transmitters get NO_FEEDBACK.
    """
    tx_by_channel: dict[int, list[int]] = {}
    for u, a in actions.items():
        if not 1 <= u <= topology.n:
            raise InvalidNodeError(f"node {u} outside [1, {topology.n}]")
        if not 1 <= a.channel <= config.channels:
            raise InvalidActionError(f"node {u} uses channel {a.channel} > {config.channels}")
        if a.transmits:
            tx_by_channel.setdefault(a.channel, []).append(u)

    feedback = config.transmitter_cd and topology.complete
    out = {}
    for u, a in actions.items():
        txs = tx_by_channel.get(a.channel, ())
        if a.transmits:
            out[u] = Observation.feedback(len(txs) == 1) if feedback else NO_FEEDBACK
            continue
        if topology.complete:
            heard = txs
        else:
            heard = [v for v in txs if topology.adjacent(u, v)]
        if len(heard) == 1:
            v = heard[0]
            out[u] = Observation.received(actions[v].payload, v)
        elif len(heard) >= 2 and config.receiver_cd:
            out[u] = COLLISION
        else:
            out[u] = SILENCE
    return out


@dataclass
class RoundRecord:
    round: int
    actions: dict[int, NodeAction]
    observations: dict[int, Observation] = field(default_factory=dict)

    def transmitters(self, channel: int | None = None) -> list[int]:
        return sorted(u for u, a in self.actions.items()
                      if a.transmits and (channel is None or a.channel == channel))


@dataclass
class ExecutionTrace:
    rounds: list[RoundRecord] = field(default_factory=list)
    solved_round: int | None = None
    max_rounds: int = 0
    informed_at: dict[int, int] = field(default_factory=dict)

    @property
    def solved(self) -> bool:
        return self.solved_round is not None

    def __len__(self) -> int:
        return len(self.rounds)

    def record(self, rnd: int) -> RoundRecord:
        return self.rounds[rnd - 1]

    def to_jsonl(self) -> str:
        lines = []
        for rec in self.rounds:
            lines.append(json.dumps({
                "round": rec.round,
                "actions": {str(u): a.to_json() for u, a in sorted(rec.actions.items())},
                "observations": {str(u): o.to_json() for u, o in sorted(rec.observations.items())},
            }, sort_keys=True))
        lines.append(json.dumps({"solved_round": self.solved_round, "max_rounds": self.max_rounds}))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class NodeContext:
    """Everything a node program may depend on besides its observations."""

    node: int
    n: int
    config: ModelConfig
    stream: object
    message: bytes | None = None


def _check_algorithm(algorithm, config: ModelConfig) -> None:
    if getattr(algorithm, "requires_cd", False) and not (config.receiver_cd and config.transmitter_cd):
        raise PreconditionError(f"{algorithm!r} requires collision detection")
    needed = getattr(algorithm, "channels", 1)
    if needed > config.channels:
        raise PreconditionError(f"{algorithm!r} needs {needed} channels, model has {config.channels}")


def run_wakeup(algorithm, active_set, config: ModelConfig, tape: RandomTape,
               max_rounds: int, *, n: int | None = None, record: bool = True) -> ExecutionTrace:
    """Run single-hop wake-up with exactly ``active_set`` active.

    Inactive nodes are implicit listeners on the default channel, so they never
    appear in the trace. The run is solved in the first round in which exactly
    one active node transmits on channel 1.
    """
    active = sorted(set(active_set))
    if not active:
        raise InvalidInputError("active set must be non-empty")
    n = n if n is not None else algorithm.n
    if active[0] < 1 or active[-1] > n:
        raise InvalidInputError(f"active set not within [1, {n}]")
    _check_algorithm(algorithm, config)
    required = getattr(algorithm, "required_active", None)
    if required is not None and len(active) != required:
        raise PreconditionError(f"{algorithm!r} is defined for exactly {required} active nodes")

    topology = Topology.clique(n)
    programs = {u: algorithm.spawn(NodeContext(u, n, config, tape.stream(u))) for u in active}
    trace = ExecutionTrace(max_rounds=max_rounds)
    for rnd in range(1, max_rounds + 1):
        actions = {u: p.act() for u, p in programs.items()}
        obs = resolve_round(topology, config, actions)
        if record:
            trace.rounds.append(RoundRecord(rnd, actions, obs))
        lone = [u for u, a in actions.items() if a.transmits and a.channel == DEFAULT_CHANNEL]
        if len(lone) == 1:
            trace.solved_round = rnd
            break
        for u, p in programs.items():
            p.observe(obs[u])
    return trace


def run_broadcast(algorithm, topology: Topology, source: int, config: ModelConfig,
                  tape: RandomTape, max_rounds: int, *, record: bool = True) -> ExecutionTrace:
    """Run global broadcast of BROADCAST_MESSAGE from ``source``.

    A node is activated only by receiving the message; collisions never wake
    anyone. Newly informed nodes start acting in the following round.
    """
    if not 1 <= source <= topology.n:
        raise InvalidInputError(f"source {source} not in [1, {topology.n}]")
    _check_algorithm(algorithm, config)
    n = topology.n

    def spawn(u):
        return algorithm.spawn(NodeContext(u, n, config, tape.stream(u), BROADCAST_MESSAGE))

    programs = {source: spawn(source)}
    trace = ExecutionTrace(max_rounds=max_rounds, informed_at={source: 0})
    if n == 1:
        trace.solved_round = 0
        return trace
    for rnd in range(1, max_rounds + 1):
        actions = {u: p.act() for u, p in programs.items()}
        everyone = dict.fromkeys(topology.nodes, LISTEN)
        everyone.update(actions)
        obs = resolve_round(topology, config, everyone)
        newly = [v for v in topology.nodes
                 if v not in programs and obs[v].kind is ObsKind.RECEIVED]
        if record:
            trace.rounds.append(RoundRecord(rnd, actions, {u: obs[u] for u in actions}))
        for u, p in programs.items():
            p.observe(obs[u])
        for v in newly:
            trace.informed_at[v] = rnd
            programs[v] = spawn(v)
        if len(programs) == n:
            trace.solved_round = rnd
            break
    return trace
