"""Swarm member state and the belief quantities derived from it."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum, IntEnum


class Heading(IntEnum):
    """Compass heading. North is -y (rows grow southward)."""

    NORTH = 0
    EAST = 1
    SOUTH = 2
    WEST = 3

    @property
    def delta(self) -> tuple[int, int]:
        return _DELTAS[self]

    def left(self) -> "Heading":
        return Heading((self - 1) % 4)

    def right(self) -> "Heading":
        return Heading((self + 1) % 4)


_DELTAS = {
    Heading.NORTH: (0, -1),
    Heading.EAST: (1, 0),
    Heading.SOUTH: (0, 1),
    Heading.WEST: (-1, 0),
}


class Role(str, Enum):
    REGULAR = "regular"
    MALICIOUS = "malicious"


@dataclass(frozen=True)
class Commitment:
    final_opinion: int
    commit_time: int
    forced: bool = False


@dataclass(slots=True)
class AgentState:
    id: int
    role: Role
    x: int
    y: int
    heading: Heading
    observation_count: int = 0
    white_count: int = 0
    gamma: float = 0.5
    committed: Commitment | None = None
    visited_cells: set[tuple[int, int]] = field(default_factory=set)

    @property
    def is_regular(self) -> bool:
        return self.role is Role.REGULAR


def current_opinion(agent: AgentState) -> int:
    """The agent's own opinion: its observed white fraction rounded half-up."""
    if agent.observation_count < 1:
        raise ValueError(f"agent {agent.id} has no observations")
    # 2*white >= obs is round-half-up of white/obs without float error
    return 1 if 2 * agent.white_count >= agent.observation_count else 0


def observed_ratio(agent: AgentState, length: int, width: int) -> float:
    """Observations made so far over the number of cells; not clamped at 1."""
    return agent.observation_count / (length * width)


def opinion_distance(agent: AgentState) -> float:
    return abs(current_opinion(agent) - agent.gamma)
