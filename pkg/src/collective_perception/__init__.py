"""Seeded simulator and experiment harness for swarm collective perception.

A swarm on a black/white grid must agree whether white cells are the
majority, using only local sensing and one-cell-radius broadcasts, while
some members may broadcast the wrong answer on purpose.
"""

from .agents import AgentState, Heading, Role, current_opinion, observed_ratio, opinion_distance
from .behavior import BroadcastPolicy, CommitPolicy, MaliciousMode
from .engine import EpisodeResult, ScenarioConfig, initialize, run_episode, step
from .environment import (
    CellColor,
    DistributionKind,
    GridEnvironment,
    cell_color,
    correct_opinion,
    generate_environment,
    sample_feature_ratio,
)
from .fusion import WeightingKind, WeightingMethod, fuse
from .metrics import EpisodeMetrics, episode_metrics

__version__ = "0.1.0"

__all__ = [
    "AgentState", "BroadcastPolicy", "CellColor", "CommitPolicy", "DistributionKind",
    "EpisodeMetrics", "EpisodeResult", "GridEnvironment", "Heading", "MaliciousMode", "Role",
    "ScenarioConfig", "WeightingKind", "WeightingMethod", "cell_color", "correct_opinion",
    "current_opinion", "episode_metrics", "fuse", "generate_environment", "initialize",
    "observed_ratio", "opinion_distance", "run_episode", "sample_feature_ratio", "step",
]
