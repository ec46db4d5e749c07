"""Per-step decision policies for swarm members."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

from .agents import AgentState, Role, current_opinion, observed_ratio


class BroadcastKind(str, Enum):
    RANDOM = "random"
    PARAMETERISED = "parameterised"


class CommitKind(str, Enum):
    RANDOM_COMMIT = "random-commit"
    QUORUM = "quorum"
    NEVER = "none"


class MaliciousMode(str, Enum):
    """How malicious members behave apart from what they broadcast.

    ``constant``: broadcast the wrong opinion every step from the first
    second, never sense, ignore received opinions. ``mimic``: run the
    regular cycle (sensing, exploration gate, broadcast policy, fusion)
    but send the wrong opinion and never commit, so the member looks
    like a regular one apart from its message.
    """

    CONSTANT = "constant"
    MIMIC = "mimic"


class Choice(str, Enum):
    SENSE = "sense"
    BROADCAST = "broadcast"


@dataclass(frozen=True)
class BroadcastPolicy:
    kind: BroadcastKind = BroadcastKind.PARAMETERISED

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", BroadcastKind(self.kind))


@dataclass(frozen=True)
class CommitPolicy:
    """``theta`` is used by ``quorum``, ``p`` by ``random-commit``.

    ``none`` never commits; it exists for navigation-only runs.
    """

    kind: CommitKind = CommitKind.QUORUM
    theta: float = 0.1
    p: float = 0.05

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", CommitKind(self.kind))
        if self.kind is CommitKind.QUORUM and not 0.0 < self.theta < 0.5:
            raise ValueError(f"theta must lie in (0, 0.5), got {self.theta}")
        if self.kind is CommitKind.RANDOM_COMMIT and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"commit probability must lie in [0, 1], got {self.p}")


def exploration_gate_open(agent: AgentState, length: int, width: int) -> bool:
    """True once the observed ratio strictly exceeds ``1 / length``."""
    # obs / (L*W) > 1 / L, cross-multiplied to stay in integers
    return agent.observation_count * length > length * width


def broadcast_probability(agent: AgentState, length: int, width: int) -> float:
    omega = current_opinion(agent)
    r_k = observed_ratio(agent, length, width)
    p = 0.5 * (r_k + (1.0 - abs(omega - agent.gamma)))
    return min(1.0, max(0.0, p))


def choose_sense_or_broadcast(policy: BroadcastPolicy, agent: AgentState,
                              length: int, width: int, rng: random.Random) -> Choice:
    if policy.kind is BroadcastKind.RANDOM:
        p = 0.5
    else:
        p = broadcast_probability(agent, length, width)
    return Choice.BROADCAST if rng.random() < p else Choice.SENSE


def should_commit(policy: CommitPolicy, agent: AgentState, rng: random.Random) -> bool:
    if policy.kind is CommitKind.QUORUM:
        return agent.gamma < policy.theta or agent.gamma > 1.0 - policy.theta
    if policy.kind is CommitKind.RANDOM_COMMIT:
        return rng.random() < policy.p
    return False


def broadcast_value(agent: AgentState, correct: int) -> int:
    """Opinion the agent sends if it broadcasts this step.

    Malicious members always send the wrong answer, committed members
    their final decision, everyone else their own current opinion.
    """
    if agent.role is Role.MALICIOUS:
        return 1 - correct
    if agent.committed is not None:
        return agent.committed.final_opinion
    return current_opinion(agent)
