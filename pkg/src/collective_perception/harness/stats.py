"""Group summaries and significance tests over episode rows.

Rows are flat mappings with the ``episodes.csv`` columns, so summaries can
be rebuilt from a CSV file as easily as from a live batch.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import special

from ..metrics import METRIC_NAMES

GROUP_KEYS = ("ratio", "kind", "malicious_fraction", "weighting", "w_max")


@dataclass(frozen=True)
class SummaryRow:
    key: tuple
    n: int
    means: dict[str, float]
    stds: dict[str, float]

    def as_record(self, keys: Sequence[str] = GROUP_KEYS) -> dict[str, object]:
        record: dict[str, object] = dict(zip(keys, self.key))
        record["n"] = self.n
        for name in self.means:
            record[f"{name}_mean"] = self.means[name]
            record[f"{name}_std"] = self.stds[name]
        return record


def summary_columns(keys: Sequence[str] = GROUP_KEYS,
                    metrics: Sequence[str] = METRIC_NAMES) -> tuple[str, ...]:
    cols = [*keys, "n"]
    for name in metrics:
        cols += [f"{name}_mean", f"{name}_std"]
    return tuple(cols)


def mean_std(values: Iterable[float]) -> tuple[float, float]:
    """Mean and sample (n-1) standard deviation, skipping NaN.

    The std is NaN unless at least two finite values remain.
    """
    finite = [float(v) for v in values if not math.isnan(float(v))]
    if not finite:
        return math.nan, math.nan
    mean = math.fsum(finite) / len(finite)
    if len(finite) < 2:
        return mean, math.nan
    var = math.fsum((v - mean) ** 2 for v in finite) / (len(finite) - 1)
    return mean, math.sqrt(var)


def summarize(rows: Iterable[Mapping[str, object]], keys: Sequence[str] = GROUP_KEYS,
              metrics: Sequence[str] = METRIC_NAMES) -> list[SummaryRow]:
    """Group rows by ``keys`` (first-seen order) and summarise each metric."""
    groups: dict[tuple, list[Mapping[str, object]]] = defaultdict(list)
    for row in rows:
        groups[tuple(row[k] for k in keys)].append(row)
    if not groups:
        raise ValueError("no rows to summarise")
    out = []
    for key, members in groups.items():
        means, stds = {}, {}
        for name in metrics:
            means[name], stds[name] = mean_std(float(m[name]) for m in members)
        out.append(SummaryRow(key, len(members), means, stds))
    return out


def welch_t_test(sample_a: Sequence[float], sample_b: Sequence[float]) -> float:
    """Two-sided p-value of Welch's unequal-variance t-test."""
    a = np.asarray(sample_a, dtype=float)
    b = np.asarray(sample_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ValueError("each sample needs at least two values")
    va, vb = a.var(ddof=1) / a.size, b.var(ddof=1) / b.size
    se2 = va + vb
    if se2 == 0.0:
        raise ValueError("both samples have zero variance")
    t = (a.mean() - b.mean()) / math.sqrt(se2)
    # Welch-Satterthwaite, with shares of se2 so tiny variances cannot underflow
    sa, sb = va / se2, vb / se2
    df = 1.0 / (sa * sa / (a.size - 1) + sb * sb / (b.size - 1))
    # two-sided tail of Student's t via the regularised incomplete beta
    return float(special.betainc(df / 2.0, 0.5, df / (df + t * t)))


def compare_groups(rows: Sequence[Mapping[str, object]], metric: str,
                   a: Mapping[str, object], b: Mapping[str, object],
                   by: str = "malicious_fraction") -> tuple[dict[object, float], float]:
    """Welch p-values between two row selections at each level of ``by``.

    ``a`` and ``b`` are column filters such as ``{"weighting": "static"}``.
    Returns the per-level p-values and their average. Levels where the
    test is degenerate (no variance) are reported as NaN and skipped in
    the average.
    """
    def pick(sel, level):
        return [float(r[metric]) for r in rows
                if r[by] == level and all(r[k] == v for k, v in sel.items())
                and not math.isnan(float(r[metric]))]

    levels = list(dict.fromkeys(r[by] for r in rows))
    pvalues = {}
    for level in levels:
        xa, xb = pick(a, level), pick(b, level)
        try:
            pvalues[level] = welch_t_test(xa, xb)
        except ValueError:
            pvalues[level] = math.nan
    finite = [p for p in pvalues.values() if not math.isnan(p)]
    return pvalues, (sum(finite) / len(finite) if finite else math.nan)
