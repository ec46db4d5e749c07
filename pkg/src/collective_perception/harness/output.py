"""CSV emission and reading.

An output directory holds:

* ``episodes.csv``: one row per episode, columns ``EPISODE_COLUMNS``
* ``summary.csv``: one row per (ratio, kind, malicious_fraction,
  weighting, w_max) group with ``<metric>_mean``/``<metric>_std`` columns
* ``plot_<metric>.csv``: bar-chart data per (weighting, w_max,
  malicious_fraction) group, pooled over ratios and kinds, with columns
  ``weighting, w_max, x, mean, std, n`` where ``x`` is the malicious fraction
* ``traces/episode_NNNNN.csv`` when tracing is on
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..metrics import METRIC_NAMES
from .runner import EPISODE_COLUMNS, TRACE_COLUMNS, BatchRow
from .stats import GROUP_KEYS, SummaryRow, summarize, summary_columns

PLOT_KEYS = ("weighting", "w_max", "malicious_fraction")
PLOT_COLUMNS = ("weighting", "w_max", "x", "mean", "std", "n")

_INT_COLUMNS = {"index", "repetition", "seed", "correct_opinion", "wall_steps",
                "tp", "fp", "tn", "fn", "n"}
_STR_COLUMNS = {"kind", "weighting", "navigation", "broadcast", "commit"}


def _write(path: Path, columns: Sequence[str], records: Iterable[Mapping[str, object]]) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        for record in records:
            writer.writerow(record)


def _typed(record: Mapping[str, str]) -> dict[str, object]:
    out: dict[str, object] = {}
    for key, value in record.items():
        if key in _STR_COLUMNS:
            out[key] = value
        elif key in _INT_COLUMNS:
            out[key] = int(value)
        else:
            out[key] = float(value)
    return out


def read_episodes(path: str | Path) -> list[dict[str, object]]:
    path = Path(path)
    if path.is_dir():
        path = path / "episodes.csv"
    with path.open(newline="", encoding="utf-8") as fh:
        return [_typed(r) for r in csv.DictReader(fh)]


def plot_data(records: Sequence[Mapping[str, object]]) -> dict[str, list[dict[str, object]]]:
    """Per-metric bar data, pooled over ratios and distribution kinds."""
    out: dict[str, list[dict[str, object]]] = {m: [] for m in METRIC_NAMES}
    if not records:
        return out
    for group in summarize(records, keys=PLOT_KEYS):
        weighting, w_max, fraction = group.key
        for m in METRIC_NAMES:
            out[m].append({"weighting": weighting, "w_max": w_max, "x": fraction,
                           "mean": group.means[m], "std": group.stds[m], "n": group.n})
    return out


def emit(rows: Sequence[BatchRow | Mapping[str, object]], summaries: Sequence[SummaryRow] | None,
         out_dir: str | Path) -> list[Path]:
    """Write episodes, summary and plot-data CSVs; returns the paths written.

    ``summaries`` defaults to grouping ``rows``. Rewriting the same rows
    produces byte-identical files.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = [r.as_record() if isinstance(r, BatchRow) else dict(r) for r in rows]
    if summaries is None:
        summaries = summarize(records) if records else []

    written = []
    path = out / "episodes.csv"
    _write(path, EPISODE_COLUMNS, records)
    written.append(path)
    path = out / "summary.csv"
    _write(path, summary_columns(), (s.as_record(GROUP_KEYS) for s in summaries))
    written.append(path)
    for metric, data in plot_data(records).items():
        path = out / f"plot_{metric}.csv"
        _write(path, PLOT_COLUMNS, data)
        written.append(path)

    traced = [r for r in rows if isinstance(r, BatchRow) and r.trace is not None]
    if traced:
        trace_dir = out / "traces"
        trace_dir.mkdir(exist_ok=True)
        for row in traced:
            path = trace_dir / f"episode_{row.coords.index:05d}.csv"
            with path.open("w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh, lineterminator="\n")
                writer.writerow(TRACE_COLUMNS)
                writer.writerows(row.trace)
            written.append(path)
    return written
