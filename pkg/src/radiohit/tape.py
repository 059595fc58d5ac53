"""Keyed, position-addressable random tapes.

Every stream is a SplitMix64 sequence whose starting state is derived from
``(seed, domain, key)``. Word ``i`` of a stream is a pure function of those
three values and ``i``, so a stream can be rewound to position 0 and replayed
bit for bit, and a batch of streams can be evaluated with numpy in one shot.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15

NODE_DOMAIN = 0x4E4F4445  # "NODE"
REFEREE_DOMAIN = 0x52454652  # "REFR"

_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, domain: int, key: int) -> int:
    h = mix64((seed & MASK64) + GAMMA)
    h = mix64(h ^ (domain & MASK64))
    return mix64(h ^ ((key & MASK64) * GAMMA & MASK64))


def word_at(state: int, position: int) -> int:
    return mix64(state + (position + 1) * GAMMA)


class Stream:
    """A rewindable random stream for one (seed, domain, key) triple."""

    __slots__ = ("state", "position")

    def __init__(self, state: int):
        self.state = state
        self.position = 0

    def next_word(self) -> int:
        w = word_at(self.state, self.position)
        self.position += 1
        return w

    def random(self) -> float:
        """Uniform double in [0, 1) built from the top 53 bits of the next word."""
        self.position += 1
        z = (self.state + self.position * GAMMA) & MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return ((z ^ (z >> 31)) >> 11) * _INV53

    def bit(self) -> int:
        return self.next_word() >> 63

    def randbelow(self, m: int) -> int:
        if m <= 0:
            raise ValueError("m must be positive")
        return int(self.random() * m)

    def reset(self) -> None:
        self.position = 0

    def fork(self) -> "Stream":
        """Fresh stream at position 0 over the same bits."""
        return Stream(self.state)


class RandomTape:
    """The global tape: one independent keyed substream per node id.

    Referee randomness lives in a separate key domain, so the player's node
    streams and the referee's draws never share bits even under the same seed.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64

    def __repr__(self) -> str:
        return f"RandomTape(seed={self.seed})"

    def stream(self, node: int) -> Stream:
        return Stream(stream_key(self.seed, NODE_DOMAIN, node))

    def referee_stream(self, instance: int = 0) -> Stream:
        return Stream(stream_key(self.seed, REFEREE_DOMAIN, instance))

    def words(self, nodes, position: int) -> np.ndarray:
        """Vectorised word ``position`` of the streams of ``nodes``."""
        states = np.array([stream_key(self.seed, NODE_DOMAIN, int(u)) for u in nodes], dtype=np.uint64)
        return _mix64_vec(states + np.uint64(((position + 1) * GAMMA) & MASK64))

    def uniforms(self, nodes, position: int) -> np.ndarray:
        return (self.words(nodes, position) >> np.uint64(11)).astype(np.float64) * _INV53


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))
