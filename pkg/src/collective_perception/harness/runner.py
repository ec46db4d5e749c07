"""Batch execution over a configuration's run matrix."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

from ..engine import EpisodeResult, ScenarioConfig, run_episode
from ..metrics import METRIC_NAMES, EpisodeMetrics, episode_metrics
from .config import BatchConfig, Coordinates

log = logging.getLogger(__name__)

EPISODE_COLUMNS = (
    "index", "ratio", "kind", "malicious_fraction", "weighting", "w_max", "repetition",
    "seed", "navigation", "broadcast", "commit", "correct_opinion", "wall_steps",
    *METRIC_NAMES, "tp", "fp", "tn", "fn",
)
TRACE_COLUMNS = ("step", "agent", "role", "x", "y", "heading", "activity", "action",
                 "observations", "white", "gamma", "committed")


class BatchError(RuntimeError):
    pass


@dataclass(frozen=True)
class BatchRow:
    coords: Coordinates
    scenario: ScenarioConfig
    result: EpisodeResult
    metrics: EpisodeMetrics
    trace: tuple[tuple, ...] | None = None

    def as_record(self) -> dict[str, object]:
        """Flat row in ``episodes.csv`` column order."""
        s = self.scenario
        record = {
            "index": self.coords.index,
            "ratio": s.ratio,
            "kind": s.kind.value,
            "malicious_fraction": s.malicious_fraction,
            "weighting": s.weighting.kind.value,
            "w_max": s.weighting.weight_param,
            "repetition": self.coords.repetition,
            "seed": s.seed,
            "navigation": s.navigation.value,
            "broadcast": s.broadcast_policy.kind.value,
            "commit": s.commit_policy.kind.value,
            "correct_opinion": self.result.correct_opinion,
            "wall_steps": self.result.wall_steps,
        }
        record.update(self.metrics.as_dict())
        return {k: record[k] for k in EPISODE_COLUMNS}


def _run_one(job: tuple[Coordinates, ScenarioConfig, bool]) -> BatchRow:
    coords, scenario, want_trace = job
    rows: list[tuple] | None = [] if want_trace else None

    def sink(clock, agent, activity, action):
        rows.append((clock, agent.id, agent.role.value, agent.x, agent.y,
                     agent.heading.name.lower(), activity, action.name.lower(),
                     agent.observation_count, agent.white_count, agent.gamma,
                     int(agent.committed is not None)))

    try:
        result = run_episode(scenario, sink if want_trace else None)
    except Exception as exc:
        raise BatchError(
            f"episode {coords.index} (ratio={scenario.ratio}, kind={scenario.kind.value}, "
            f"malicious={scenario.malicious_fraction}, weighting={scenario.weighting.label}, "
            f"repetition={coords.repetition}, seed={scenario.seed}) failed: {exc}"
        ) from exc
    return BatchRow(coords, scenario, result, episode_metrics(result),
                    tuple(rows) if rows is not None else None)


def run_batch(config: BatchConfig, workers: int = 1, trace: bool = False) -> Iterator[BatchRow]:
    """Run every scenario in the matrix, yielding rows in matrix order.

    With ``workers > 1`` episodes run in a process pool; output order is
    unchanged.
    """
    jobs = [(coords, scenario, trace) for coords, scenario in config.matrix()]
    log.info("batch %s: %d episodes on %d worker(s)", config.name, len(jobs), workers)
    if workers <= 1 or len(jobs) <= 1:
        for job in jobs:
            yield _run_one(job)
        return
    chunk = max(1, math.ceil(len(jobs) / (workers * 8)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(_run_one, jobs, chunksize=chunk)
