"""Stream splitting from a single root seed.

A child seed is addressed by a path of non-negative integers under the
root, via :class:`numpy.random.SeedSequence` spawn keys. Adding new paths
never changes the seed at an existing path.
"""

from __future__ import annotations

import random

import numpy as np

ENVIRONMENT = 0
PLACEMENT = 1
SCHEDULE = 2
AGENTS = 3


def derive_seed(root: int, *path: int) -> int:
    seq = np.random.SeedSequence(int(root), spawn_key=tuple(int(p) for p in path))
    return int(seq.generate_state(1, np.uint64)[0])


def stream(root: int, *path: int) -> random.Random:
    return random.Random(derive_seed(root, *path))
