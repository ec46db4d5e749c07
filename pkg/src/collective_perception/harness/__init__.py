"""Experiment batches: configuration, execution, statistics and CSV output."""

from .config import BatchConfig, ConfigError, load_config, parse_config, preset_path
from .output import emit, read_episodes
from .runner import BatchError, BatchRow, run_batch
from .stats import SummaryRow, compare_groups, summarize, welch_t_test

__all__ = [
    "BatchConfig", "BatchError", "BatchRow", "ConfigError", "SummaryRow",
    "compare_groups", "emit", "load_config", "parse_config", "preset_path",
    "read_episodes", "run_batch", "summarize", "welch_t_test",
]
