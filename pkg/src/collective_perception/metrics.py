"""Performance measures computed from finished episodes.

Column names used throughout (and in ``episodes.csv``):

==========  ===========================================================
pm1_1       distinct cells visited per agent per minute
pm1_2       distinct cells visited per agent over the episode
pm2_1       share of broadcasts that carried the correct opinion
pm2_2       share of broadcasts that carried the wrong opinion
pm2_3       sense/broadcast accuracy, (TP + TN) / all classified steps
pm3_1       share of regular agents whose final decision is correct
pm3_2       mean decision time of regular agents, minutes
pm4_1       mean |gamma - correct| over regular agents at episode end
pm4_2       mean weighting distance over all fusion events
==========  ===========================================================

Malicious members count towards the coverage measures only.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import IntEnum
from typing import TYPE_CHECKING, Iterable, Sequence

from .fusion import weighting_distance

if TYPE_CHECKING:
    from .engine import AgentRecord, EpisodeResult

STEPS_PER_MINUTE = 60


class Outcome(IntEnum):
    TP = 0
    FP = 1
    TN = 2
    FN = 3


@dataclass(frozen=True)
class BroadcastTally:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "BroadcastTally") -> "BroadcastTally":
        return BroadcastTally(self.tp + other.tp, self.fp + other.fp,
                              self.tn + other.tn, self.fn + other.fn)


@dataclass(frozen=True)
class EpisodeMetrics:
    pm1_1: float
    pm1_2: float
    pm2_1: float
    pm2_2: float
    pm2_3: float
    pm3_1: float
    pm3_2: float
    pm4_1: float
    pm4_2: float
    tp: int
    fp: int
    tn: int
    fn: int

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


METRIC_NAMES = ("pm1_1", "pm1_2", "pm2_1", "pm2_2", "pm2_3",
                "pm3_1", "pm3_2", "pm4_1", "pm4_2")


def classify_step(did_broadcast: bool, opinion: int, correct: int) -> Outcome:
    """Classify one sense-or-broadcast decision.

    Broadcasting the correct opinion is a true positive, broadcasting the
    wrong one a false positive. Sensing while holding a wrong opinion
    (withholding it) is a true negative, sensing while holding the correct
    one a false negative.
    """
    if did_broadcast:
        return Outcome.TP if opinion == correct else Outcome.FP
    return Outcome.TN if opinion != correct else Outcome.FN


def accuracy(tally: BroadcastTally) -> float:
    if tally.total == 0:
        raise ValueError("accuracy of an empty tally is undefined")
    return (tally.tp + tally.tn) / tally.total


def episode_tally(result: "EpisodeResult") -> BroadcastTally:
    total = BroadcastTally()
    for a in result.regular:
        total = total + BroadcastTally(a.tp, a.fp, a.tn, a.fn)
    return total


def commit_stats(result: "EpisodeResult") -> dict[str, float]:
    regular = result.regular
    if not regular:
        raise ValueError("episode has no regular agents")
    correct = sum(a.final_opinion == result.correct_opinion for a in regular)
    minutes = sum(a.commit_time for a in regular) / STEPS_PER_MINUTE
    return {"pm3_1": correct / len(regular), "pm3_2": minutes / len(regular)}


def quorum_distance(agents: Sequence["AgentRecord"], correct: int) -> float:
    if not agents:
        raise ValueError("no regular agents")
    return sum(abs(a.final_gamma - correct) for a in agents) / len(agents)


def minute_increments(record: "AgentRecord") -> list[int]:
    """New distinct cells gained in each whole minute."""
    marks = (0,) + record.coverage_by_minute
    return [b - a for a, b in zip(marks, marks[1:])]


def coverage_stats(result: "EpisodeResult", episode_minutes: float) -> dict[str, float]:
    """Mean distinct cells per agent, in total and per minute.

    Over whole minutes the mean of per-minute increments equals the total
    over the number of minutes, which also covers a trailing partial minute.
    """
    if episode_minutes <= 0:
        raise ValueError("episode_minutes must be positive")
    total = sum(a.distinct_cells for a in result.agents) / len(result.agents)
    return {"pm1_1": total / episode_minutes, "pm1_2": total}


def mean_weighting_distance(events: Iterable[tuple[float, float]], w_max: float) -> float:
    """Average weighting distance over ``(w_correct, w_incorrect)`` pairs."""
    if w_max <= 0:
        raise ValueError("w_max must be positive")
    total, n = 0.0, 0
    for w_co, w_ic in events:
        total += weighting_distance(w_max, w_co, w_ic)
        n += 1
    if n == 0:
        raise ValueError("no fusion events")
    return total / n


def _ratio(num: float, den: float) -> float:
    return num / den if den else math.nan


def episode_metrics(result: "EpisodeResult") -> EpisodeMetrics:
    """All performance measures for one episode; undefined ones are NaN."""
    minutes = result.wall_steps / STEPS_PER_MINUTE
    if minutes > 0:
        cov = coverage_stats(result, minutes)
    else:
        cov = {"pm1_1": math.nan, "pm1_2": 0.0}
    tally = episode_tally(result)
    commits = commit_stats(result)
    regular = result.regular
    wd_sum = sum(a.weighting_distance_sum for a in regular)
    wd_n = sum(a.weighting_events for a in regular)
    broadcasts = tally.tp + tally.fp
    return EpisodeMetrics(
        pm1_1=cov["pm1_1"],
        pm1_2=cov["pm1_2"],
        pm2_1=_ratio(tally.tp, broadcasts),
        pm2_2=_ratio(tally.fp, broadcasts),
        pm2_3=accuracy(tally) if tally.total else math.nan,
        pm3_1=commits["pm3_1"],
        pm3_2=commits["pm3_2"],
        pm4_1=quorum_distance(regular, result.correct_opinion),
        pm4_2=_ratio(wd_sum, wd_n),
        tp=tally.tp, fp=tally.fp, tn=tally.tn, fn=tally.fn,
    )
