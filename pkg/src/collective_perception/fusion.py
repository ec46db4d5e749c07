"""Momentum-based opinion fusion and its weighting rules.

Every rule has the same shape: a received opinion ``omega`` pulls the
quorum variable ``gamma`` toward it with weight ``w``::

    gamma' = (1 - w) * gamma + w * omega

The rules differ only in how ``w`` is chosen. ``static`` uses a constant.
``equation`` scales ``weight_param`` by the agreement ``1 - |omega - gamma|``,
so opinions far from the current quorum barely move it. ``inverted-equation``
measures agreement against the opposite opinion instead, so opinions far
from the quorum get the larger weight.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum


class WeightingKind(str, Enum):
    STATIC = "static"
    EQUATION = "equation"
    INVERTED_EQUATION = "inverted-equation"


@dataclass(frozen=True)
class WeightingMethod:
    kind: WeightingKind = WeightingKind.STATIC
    weight_param: float = 0.1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", WeightingKind(self.kind))
        if not 0.0 < self.weight_param <= 1.0:
            raise ValueError(f"weight_param must lie in (0, 1], got {self.weight_param}")

    @property
    def w_max(self) -> float:
        return self.weight_param

    @property
    def label(self) -> str:
        return f"{self.kind.value}-{self.weight_param:g}"


def effective_new_opinion_weight(method: WeightingMethod, gamma: float, omega: int) -> float:
    """Weight the method puts on an incoming ``omega`` at quorum ``gamma``."""
    kind = method.kind
    if kind is WeightingKind.STATIC:
        return method.weight_param
    if kind is WeightingKind.EQUATION:
        return method.weight_param * (1.0 - abs(omega - gamma))
    return method.weight_param * (1.0 - abs((omega + 1) % 2 - gamma))


def fuse(method: WeightingMethod, gamma: float, omega: int) -> float:
    """Fold one received opinion into ``gamma``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    w = effective_new_opinion_weight(method, gamma, omega)
    # a convex combination, clamped only against rounding at the ends
    return min(1.0, max(0.0, (1.0 - w) * gamma + w * omega))


def weighting_distance(w_max: float, w_correct: float, w_incorrect: float) -> float:
    """Distance of an applied weight pair from the ideal (w_max, 0)."""
    for name, w in (("w_correct", w_correct), ("w_incorrect", w_incorrect)):
        if not 0.0 <= w <= w_max:
            raise ValueError(f"{name}={w} outside [0, {w_max}]")
    return abs(w_max - w_correct + w_incorrect)
