"""Grid environments for the collective perception task.

A grid is ``length`` columns by ``width`` rows of black/white cells. White
cells carry the feature being estimated, so the ground-truth opinion is 1
when white cells are the strict majority.

Coordinates: ``x`` is the column (east positive), ``y`` is the row (south
positive). ``cells[y, x]`` holds the colour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, IntEnum

import numpy as np


class CellColor(IntEnum):
    BLACK = 0
    WHITE = 1


class DistributionKind(str, Enum):
    UNIFORM = "uniform"
    CLUSTERED_MAJORITY_FIRST = "clustered-majority-first"
    CLUSTERED_MINORITY_FIRST = "clustered-minority-first"

    @property
    def clustered(self) -> bool:
        return self is not DistributionKind.UNIFORM


def round_half_up(value: float) -> int:
    return int(math.floor(value + 0.5))


@dataclass(frozen=True, eq=False)
class GridEnvironment:
    """An immutable coloured grid.

    For clustered kinds ``boundary`` is the column index holding the seam
    between the two regions and ``majority_left`` tells which side the
    majority colour occupies. Both are ``None`` for uniform grids.
    """

    length: int
    width: int
    ratio: float
    kind: DistributionKind
    seed: int
    cells: np.ndarray
    boundary: int | None = None
    majority_left: bool | None = None

    @property
    def n_cells(self) -> int:
        return self.length * self.width

    @property
    def white_count(self) -> int:
        return int(self.cells.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GridEnvironment):
            return NotImplemented
        return (
            (self.length, self.width, self.ratio, self.kind, self.seed)
            == (other.length, other.width, other.ratio, other.kind, other.seed)
            and np.array_equal(self.cells, other.cells)
        )

    __hash__ = None  # type: ignore[assignment]

    def region_columns(self, majority: bool) -> range:
        """Columns lying wholly inside the majority (or minority) region."""
        if self.boundary is None:
            raise ValueError("uniform environments have no regions")
        left = range(0, self.boundary)
        right = range(self.boundary + 1, self.length)
        return left if majority == self.majority_left else right


def _check_args(length: int, width: int, ratio: float) -> None:
    if length < 2 or width < 2:
        raise ValueError(f"invalid dimensions {length}x{width}: both must be >= 2")
    if not 0.0 < ratio < 1.0 or ratio == 0.5:
        raise ValueError(f"invalid ratio {ratio}: must lie in (0, 1) and differ from 0.5")


def generate_environment(
    length: int,
    width: int,
    ratio: float,
    kind: DistributionKind | str = DistributionKind.UNIFORM,
    seed: int = 0,
) -> GridEnvironment:
    """Build a grid holding exactly ``round(ratio * length * width)`` white cells.

    Uniform grids scatter white cells by a random permutation. Clustered
    grids split along one vertical seam column: the majority colour fills
    whole columns from one wall and the top of the seam column, the
    minority colour fills the rest. Which wall the majority touches is
    drawn from ``seed``.
    """
    kind = DistributionKind(kind)
    _check_args(length, width, ratio)
    n = length * width
    white = round_half_up(ratio * n)
    if 2 * white == n:
        raise ValueError(f"invalid ratio {ratio}: {white} of {n} cells is an exact tie")
    if white in (0, n) and kind.clustered:
        raise ValueError(f"invalid ratio {ratio}: clustered grid needs both colours")

    rng = np.random.default_rng(seed)
    if kind is DistributionKind.UNIFORM:
        flat = np.zeros(n, dtype=np.uint8)
        flat[rng.permutation(n)[:white]] = 1
        cells = flat.reshape(width, length)
        boundary = majority_left = None
    else:
        majority_colour = 1 if 2 * white > n else 0
        majority = max(white, n - white)
        full_cols, rem = divmod(majority, width)
        majority_left = bool(rng.integers(2))
        cells = np.full((width, length), 1 - majority_colour, dtype=np.uint8)
        cells[:, :full_cols] = majority_colour
        cells[:rem, full_cols] = majority_colour
        boundary = full_cols
        if not majority_left:
            cells = cells[:, ::-1].copy()
            boundary = length - 1 - full_cols
    cells.setflags(write=False)
    return GridEnvironment(length, width, float(ratio), kind, int(seed), cells,
                           boundary, majority_left)


def sample_feature_ratio(
    mean: float = 0.5,
    sigma: float = 0.1,
    seed: int | None = None,
    size: int | None = None,
) -> float | np.ndarray:
    """Draw from a normal truncated to the open unit interval.

    Rejection sampling: draws outside (0, 1) and exact 0.5 are redrawn.
    Returns a float, or an array when ``size`` is given.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    rng = np.random.default_rng(seed)
    count = 1 if size is None else int(size)
    out = np.empty(count)
    filled = 0
    while filled < count:
        draw = rng.normal(mean, sigma, size=max(count - filled, 16))
        draw = draw[(draw > 0.0) & (draw < 1.0) & (draw != 0.5)]
        take = min(draw.size, count - filled)
        out[filled:filled + take] = draw[:take]
        filled += take
    return float(out[0]) if size is None else out


def correct_opinion(env: GridEnvironment) -> int:
    """Ground-truth opinion: 1 if white cells are the strict majority, else 0."""
    white = env.white_count
    if 2 * white == env.n_cells:
        raise ValueError("environment is an exact tie; no correct opinion exists")
    return 1 if 2 * white > env.n_cells else 0


def cell_color(env: GridEnvironment, x: int, y: int) -> CellColor:
    if not (0 <= x < env.length and 0 <= y < env.width):
        raise IndexError(f"cell ({x}, {y}) outside {env.length}x{env.width} grid")
    return CellColor(int(env.cells[y, x]))
