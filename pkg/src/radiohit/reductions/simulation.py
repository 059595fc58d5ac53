"""Simulation strategies: a player runs an algorithm on all k ids locally and
turns each simulated round into proposals (proposal rule), then decides what
every simulated node hears (receive rule)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from ..model import (COLLISION, FEEDBACK_NOT_ALONE, NO_FEEDBACK, SILENCE, ExecutionTrace, ModelConfig,
                     NodeContext, RoundRecord)
from ..tape import RandomTape


class Simulation:
    """k simulated nodes running one algorithm on the player's tape.

    Node i always draws from the tape substream keyed by i, so two
    simulations built from the same tape consume identical bits per node.
    """

    def __init__(self, algorithm, k: int, config: ModelConfig, tape: RandomTape, *, record: bool = True):
        self.config = config
        self.programs = {u: algorithm.spawn(NodeContext(u, k, config, tape.stream(u)))
                         for u in range(1, k + 1)}
        self.trace = ExecutionTrace() if record else None
        self.round = 0

    def decide(self) -> dict:
        self.round += 1
        actions = {u: p.act() for u, p in self.programs.items()}
        if self.trace is not None:
            self.trace.rounds.append(RoundRecord(self.round, actions))
        return actions

    def deliver(self, observations: dict) -> None:
        for u, p in self.programs.items():
            p.observe(observations[u])
        if self.trace is not None:
            self.trace.rounds[-1].observations = observations


# --- proposal rules -------------------------------------------------------

def all_broadcasters(actions, config) -> list[frozenset]:
    return [frozenset(u for u, a in actions.items() if a.transmits)]


def per_channel(actions, config) -> list[frozenset]:
    return [frozenset(u for u, a in actions.items() if a.transmits and a.channel == c)
            for c in range(1, config.channels + 1)]


def all_then_default_channel(actions, config) -> list[frozenset]:
    everyone = frozenset(u for u, a in actions.items() if a.transmits)
    first = frozenset(u for u, a in actions.items() if a.transmits and a.channel == 1)
    if first and first != everyone:
        return [everyone, first]
    return [everyone]


# --- receive rules --------------------------------------------------------

def _tx_obs(config):
    return FEEDBACK_NOT_ALONE if config.transmitter_cd else NO_FEEDBACK


def receive_nothing(actions, config) -> dict:
    return {u: NO_FEEDBACK if a.transmits else SILENCE for u, a in actions.items()}


def broadcasters_collide(actions, config) -> dict:
    """Transmitters detect a collision, everyone else hears silence."""
    tx = _tx_obs(config)
    return {u: tx if a.transmits else SILENCE for u, a in actions.items()}


def universal(bit: int) -> Callable:
    """Everyone detects silence (bit 0) or a collision (bit 1).

    Transmitters never learn they were alone in a forced round.
    """
    def rule(actions, config):
        tx = _tx_obs(config)
        heard = COLLISION if bit else SILENCE
        return {u: tx if a.transmits else heard for u, a in actions.items()}
    return rule


@dataclass(frozen=True)
class SimulationStrategy:
    proposal_rule: Callable
    receive_rule: Callable


@dataclass(frozen=True)
class ProposalOrigin:
    """Where a game round's proposal came from."""

    sim_round: int
    index: int  # position within the simulated round's proposals (0-based)


class SimulationPlayer:
    """Hitting-game player driven by a simulation strategy."""

    def __init__(self, algorithm, k: int, config: ModelConfig, tape: RandomTape,
                 strategy: SimulationStrategy, *, record: bool = True):
        self.algorithm = algorithm
        self.k = k
        self.config = config
        self.tape = tape
        self.strategy = strategy
        self.record = record
        self.sim = None
        self.origins: list[ProposalOrigin] = []

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.algorithm!r}, k={self.k})"

    @property
    def trace(self) -> ExecutionTrace | None:
        return self.sim.trace if self.sim is not None else None

    def origin(self, game_round: int) -> ProposalOrigin:
        return self.origins[game_round - 1]

    def moves(self):
        self.sim = sim = Simulation(self.algorithm, self.k, self.config, self.tape, record=self.record)
        self.origins = []
        while True:
            actions = sim.decide()
            for i, p in enumerate(self.strategy.proposal_rule(actions, self.config)):
                self.origins.append(ProposalOrigin(sim.round, i))
                yield p
            sim.deliver(self.strategy.receive_rule(actions, self.config))


def check_consistency(player_trace: ExecutionTrace, target_trace: ExecutionTrace, nodes) -> int | None:
    """First round in which ``nodes`` act or observe differently in the two
    traces, or None. Only the common prefix is compared, and observations
    only where both traces recorded them."""
    nodes = sorted(nodes)
    for mine, theirs in zip(player_trace.rounds, target_trace.rounds):
        for u in nodes:
            if mine.actions.get(u) != theirs.actions.get(u):
                return mine.round
        if mine.observations and theirs.observations:
            for u in nodes:
                if mine.observations.get(u) != theirs.observations.get(u):
                    return mine.round
    return None
