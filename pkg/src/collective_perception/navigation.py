"""Local perception and navigation policies.

The occupancy map is a flat list of length ``length * width`` indexed by
``y * length + x``; each entry is the occupying agent id or ``-1``.
"""

from __future__ import annotations

import random
from enum import IntEnum
from typing import NamedTuple, Sequence

from .agents import AgentState, Heading

EMPTY = -1


class PerceivedObject(IntEnum):
    NONE = 0
    WALL = 1
    CORNER = 2
    AGENT = 3


class RelativePosition(IntEnum):
    FRONT = 0
    LEFT = 1
    RIGHT = 2
    FRONT_LEFT = 3
    FRONT_RIGHT = 4


class Percept(NamedTuple):
    object: PerceivedObject
    relative_position: RelativePosition


class NavAction(IntEnum):
    STEP_FORWARD = 0
    TURN_LEFT = 1
    TURN_RIGHT = 2


# heading -> (dx, dy) of front, left, right
_FRAME = {
    h: (h.delta, h.left().delta, h.right().delta) for h in Heading
}

_NONE, _WALL, _CORNER, _AGENT = 0, 1, 2, 3


def new_occupancy(length: int, width: int) -> list[int]:
    return [EMPTY] * (length * width)


def _probe(x: int, y: int, length: int, width: int, occupancy: Sequence[int]) -> int:
    if x < 0 or y < 0 or x >= length or y >= width:
        return _WALL
    return _AGENT if occupancy[y * length + x] != EMPTY else _NONE


def scan(x: int, y: int, heading: int, length: int, width: int,
         occupancy: Sequence[int]) -> tuple[int, int, int]:
    """Object codes in front, to the left and to the right."""
    (fx, fy), (lx, ly), (rx, ry) = _FRAME[heading]
    return (
        _probe(x + fx, y + fy, length, width, occupancy),
        _probe(x + lx, y + ly, length, width, occupancy),
        _probe(x + rx, y + ry, length, width, occupancy),
    )


def _diagonal(x: int, y: int, a: tuple[int, int], b: tuple[int, int],
              obj_a: int, obj_b: int, length: int, width: int,
              occupancy: Sequence[int]) -> int:
    obj = _probe(x + a[0] + b[0], y + a[1] + b[1], length, width, occupancy)
    if obj == _WALL and obj_a == _WALL and obj_b == _WALL:
        return _CORNER
    return obj


def perceive(agent: AgentState, length: int, width: int,
             occupancy: Sequence[int]) -> list[Percept]:
    """One percept for each of the five cells ahead of and beside the agent.

    Off-grid cells read as walls. A diagonal cell reads as a corner when
    both orthogonal cells next to it are walls too.
    """
    front_d, left_d, right_d = _FRAME[agent.heading]
    front, left, right = scan(agent.x, agent.y, agent.heading, length, width, occupancy)
    front_left = _diagonal(agent.x, agent.y, front_d, left_d, front, left,
                           length, width, occupancy)
    front_right = _diagonal(agent.x, agent.y, front_d, right_d, front, right,
                            length, width, occupancy)
    codes = (front, left, right, front_left, front_right)
    return [Percept(PerceivedObject(c), RelativePosition(i)) for i, c in enumerate(codes)]


def decide(front: int, left: int, right: int, rng: random.Random) -> NavAction:
    """Rules-based choice from the front/left/right object codes."""
    if front == _NONE:
        return NavAction.STEP_FORWARD
    if front == _WALL and (left == _WALL) != (right == _WALL):
        # corner: turn away from the side wall
        return NavAction.TURN_RIGHT if left == _WALL else NavAction.TURN_LEFT
    return NavAction.TURN_LEFT if rng.random() < 0.5 else NavAction.TURN_RIGHT


def rules_based_action(percepts: Sequence[Percept], rng: random.Random) -> NavAction:
    """Move forward when clear, turn inward at corners, otherwise turn at random."""
    seen = {p.relative_position: int(p.object) for p in percepts}
    return decide(seen[RelativePosition.FRONT], seen[RelativePosition.LEFT],
                  seen[RelativePosition.RIGHT], rng)


def random_action(rng: random.Random) -> NavAction:
    return NavAction(rng.randrange(3))


def apply_action(agent: AgentState, action: NavAction, length: int, width: int,
                 occupancy: list[int]) -> AgentState:
    """Execute one action in place.

    A forward step into a wall or an occupied cell leaves the agent where
    it is. The resulting cell is added to ``visited_cells`` either way.
    """
    if action == NavAction.TURN_LEFT:
        agent.heading = Heading((agent.heading - 1) % 4)
    elif action == NavAction.TURN_RIGHT:
        agent.heading = Heading((agent.heading + 1) % 4)
    else:
        dx, dy = _FRAME[agent.heading][0]
        nx, ny = agent.x + dx, agent.y + dy
        if 0 <= nx < length and 0 <= ny < width and occupancy[ny * length + nx] == EMPTY:
            occupancy[agent.y * length + agent.x] = EMPTY
            occupancy[ny * length + nx] = agent.id
            agent.x, agent.y = nx, ny
    agent.visited_cells.add((agent.x, agent.y))
    return agent
