"""Reference wake-up and broadcast algorithms.

Each algorithm is a factory of per-node programs. A program exposes
``act() -> NodeAction`` and ``observe(Observation)``; its behaviour is a
deterministic function of its context (id, n, model), the observations it has
seen, and the bits it pulls from its own tape stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import DEFAULT_CHANNEL, InvalidInputError, NodeAction, NodeContext, ObsKind, LISTEN


def ceil_log2(n: int) -> int:
    return max(0, (n - 1).bit_length())


def wake_payload(node: int) -> bytes:
    return b"w%d" % node


@dataclass(frozen=True)
class ProbabilitySchedule:
    probabilities: tuple

    def __post_init__(self):
        if not self.probabilities:
            raise InvalidInputError("schedule must be non-empty")
        for p in self.probabilities:
            if not 0 < p <= 1:
                raise InvalidInputError(f"probability {p} outside (0, 1]")
        object.__setattr__(self, "_floats", tuple(float(p) for p in self.probabilities))

    @property
    def cycle(self) -> int:
        return len(self.probabilities)

    def at(self, rnd: int) -> float:
        """Probability for 1-based round ``rnd``."""
        return self._floats[(rnd - 1) % self.cycle]

    @classmethod
    def decay(cls, n: int) -> "ProbabilitySchedule":
        return cls(tuple(Fraction(1, 2 ** i) for i in range(1, ceil_log2(n) + 1)))


class Algorithm:
    name = "algorithm"
    requires_cd = False
    channels = 1
    uniform = False

    def __init__(self, n: int):
        self.n = n

    def __repr__(self) -> str:
        return f"{self.name}(n={self.n})"

    def spawn(self, ctx: NodeContext):
        raise NotImplementedError


class Program:
    """Base node program: counts its own rounds."""

    def __init__(self, ctx: NodeContext):
        self.ctx = ctx
        self.round = 0
        self.done = False

    @property
    def payload(self) -> bytes:
        return self.ctx.message if self.ctx.message is not None else wake_payload(self.ctx.node)

    def act(self) -> NodeAction:
        self.round += 1
        if self.done:
            return LISTEN
        return self.decide()

    def decide(self) -> NodeAction:
        raise NotImplementedError

    def observe(self, obs) -> None:
        if obs.kind is ObsKind.RECEIVED or (obs.kind is ObsKind.FEEDBACK and obs.alone):
            if self.ctx.message is None:
                self.done = True


class _UniformProgram(Program):
    def __init__(self, ctx, schedule):
        super().__init__(ctx)
        self.schedule = schedule

    def decide(self):
        if self.ctx.stream.random() < self.schedule.at(self.round):
            return NodeAction.transmit(self.payload)
        return LISTEN


class UniformWakeup(Algorithm):
    """Transmit on channel 1 with a fixed cyclic probability sequence."""

    name = "uniform"
    uniform = True

    def __init__(self, schedule: ProbabilitySchedule, n: int = 2):
        super().__init__(n)
        self.schedule = schedule

    def __repr__(self):
        return f"{self.name}({[float(p) for p in self.schedule.probabilities]}, n={self.n})"

    def spawn(self, ctx):
        return _UniformProgram(ctx, self.schedule)


def uniform_wakeup(schedule, n: int = 2) -> UniformWakeup:
    if not isinstance(schedule, ProbabilitySchedule):
        schedule = ProbabilitySchedule(tuple(schedule))
    return UniformWakeup(schedule, n)


def decay_wakeup(n: int) -> UniformWakeup:
    if n < 2:
        raise InvalidInputError("decay needs n >= 2")
    alg = UniformWakeup(ProbabilitySchedule.decay(n), n)
    alg.name = "decay"
    return alg


class DecayBroadcast(Algorithm):
    """Informed nodes run the decay cycle on channel 1 from the round after activation."""

    name = "decay-bcast"

    def __init__(self, n: int):
        if n < 2:
            raise InvalidInputError("decay needs n >= 2")
        super().__init__(n)
        self.schedule = ProbabilitySchedule.decay(n)

    def spawn(self, ctx):
        return _UniformProgram(ctx, self.schedule)


def decay_broadcast(n: int) -> DecayBroadcast:
    return DecayBroadcast(n)


class _FloodProgram(Program):
    def decide(self):
        return NodeAction.transmit(self.payload)


class Flooding(Algorithm):
    """Informed nodes transmit every round."""

    name = "flood"

    def spawn(self, ctx):
        return _FloodProgram(ctx)


class _BinarySearchProgram(Program):
    def __init__(self, ctx):
        super().__init__(ctx)
        self.lo, self.hi = 1, ctx.n

    def decide(self):
        if self.lo > self.hi:
            self.lo, self.hi = 1, self.ctx.n
        self.mid = (self.lo + self.hi) // 2
        if self.lo <= self.ctx.node <= self.mid:
            return NodeAction.transmit(self.payload)
        return LISTEN

    def observe(self, obs):
        super().observe(obs)
        if self.done:
            return
        if obs.is_collision:
            self.hi = self.mid
        else:
            self.lo = self.mid + 1


class CDBinarySearch(Algorithm):
    """Deterministic: actives in the lower half of the candidate id interval
    transmit; a collision narrows to that half, silence to the upper half."""

    name = "cd-binsearch"
    requires_cd = True

    def spawn(self, ctx):
        return _BinarySearchProgram(ctx)


def cd_binary_search_wakeup(n: int) -> CDBinarySearch:
    return CDBinarySearch(n)


class _WillardProgram(Program):
    def __init__(self, ctx):
        super().__init__(ctx)
        self.levels = max(1, ceil_log2(ctx.n))
        self.lo, self.hi = 1, self.levels

    def decide(self):
        if self.lo > self.hi:
            self.lo, self.hi = 1, self.levels
        self.mid = (self.lo + self.hi) // 2
        if self.ctx.stream.random() < 2.0 ** -self.mid:
            return NodeAction.transmit(self.payload)
        return LISTEN

    def observe(self, obs):
        super().observe(obs)
        if self.done:
            return
        if obs.is_collision:
            self.lo = self.mid + 1
        else:
            self.hi = self.mid - 1


class Willard(Algorithm):
    """Binary search over the transmit-probability exponent 1..ceil(log n).

    Collision means the probe was too dense for the contention (move to a
    larger exponent), silence means too sparse. An empty interval restarts
    the search.
    """

    name = "willard"
    requires_cd = True

    def spawn(self, ctx):
        return _WillardProgram(ctx)


def willard_wakeup(n: int) -> Willard:
    return Willard(n)


class _MultichannelProgram(Program):
    def __init__(self, ctx, alg):
        super().__init__(ctx)
        self.levels = max(1, ceil_log2(ctx.n))
        self.width = min(alg.channels, self.levels)
        self.stride = -(-self.levels // self.width)

    def decide(self):
        stream = self.ctx.stream
        c = 1 + stream.randbelow(self.width) if self.width > 1 else DEFAULT_CHANNEL
        level = (self.round - 1 + (c - 1) * self.stride) % self.levels + 1
        if stream.random() < 2.0 ** -level:
            return NodeAction.transmit(self.payload, c)
        return NodeAction.listen(c)


class MultichannelDecay(Algorithm):
    """Decay with its levels striped across min(C, ceil(log n)) channels.

    Channel 1 walks the plain decay cycle; channel c is offset by
    (c-1)*ceil(L/C') levels. A node that hears a lone transmitter on any
    channel withdraws. With one channel this is exactly decay.
    """

    name = "mc-decay"

    def __init__(self, n: int, channels: int):
        if channels < 1:
            raise InvalidInputError("channels must be >= 1")
        super().__init__(n)
        self.channels = channels

    def __repr__(self):
        return f"{self.name}(n={self.n}, C={self.channels})"

    def spawn(self, ctx):
        return _MultichannelProgram(ctx, self)


def multichannel_wakeup(n: int, channels: int) -> MultichannelDecay:
    return MultichannelDecay(n, channels)


class _ScriptProgram(Program):
    def __init__(self, ctx, fn):
        super().__init__(ctx)
        self.fn = fn
        self.seen = []

    def decide(self):
        out = self.fn(self.ctx.node, self.round, self.ctx.stream, self.seen)
        if out is None or out is False:
            return LISTEN
        if out is True:
            return NodeAction.transmit(self.payload)
        if isinstance(out, int):
            return NodeAction.transmit(self.payload, out)
        return out

    def observe(self, obs):
        self.seen.append(obs)


class ScriptedAlgorithm(Algorithm):
    """Wrap ``fn(node, round, stream, history)``.

    ``fn`` returns False/None to listen on channel 1, True to transmit on
    channel 1, an int to transmit on that channel, or a NodeAction.
    """

    name = "scripted"

    def __init__(self, fn, n: int, *, channels: int = 1, requires_cd: bool = False, name: str | None = None):
        super().__init__(n)
        self.fn = fn
        self.channels = channels
        self.requires_cd = requires_cd
        if name:
            self.name = name

    def spawn(self, ctx):
        return _ScriptProgram(ctx, self.fn)


def resolve_algorithm(spec: str, n: int, channels: int = 1, *, broadcast: bool = False) -> Algorithm:
    """Build an algorithm from its registry name.

    Names: ``decay``, ``uniform:<p1,p2,...>``, ``cd-binsearch``, ``willard``,
    ``mc-decay``, ``flood``.
    """
    name, _, arg = spec.partition(":")
    if name == "decay":
        return decay_broadcast(n) if broadcast else decay_wakeup(n)
    if name == "uniform":
        if not arg:
            raise InvalidInputError("uniform needs a probability list")
        return uniform_wakeup([Fraction(p) for p in arg.split(",")], n)
    if name == "cd-binsearch":
        return cd_binary_search_wakeup(n)
    if name == "willard":
        return willard_wakeup(n)
    if name == "mc-decay":
        return multichannel_wakeup(n, int(arg) if arg else channels)
    if name == "flood":
        return Flooding(n)
    raise InvalidInputError(f"unknown algorithm {spec!r}")


ALGORITHM_NAMES = ("decay", "uniform:<p,...>", "cd-binsearch", "willard", "mc-decay", "flood")
