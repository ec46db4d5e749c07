"""Deterministic discrete-time episode execution.

One call to :func:`step` is one simulated second. Within a step, agents act
in a fresh random order: each regular, uncommitted agent first checks
whether to commit, then senses or broadcasts, then moves. Messages queued
during that pass are delivered afterwards to every agent in the sender's
Moore neighbourhood (its eight surrounding cells, at post-move positions).
Each receiver folds its messages into its quorum variable in random order.

All randomness derives from ``ScenarioConfig.seed``:

* environment layout: ``derive_seed(seed, ENVIRONMENT)``
* placement headings: ``stream(seed, PLACEMENT)``
* per-step agent order: ``stream(seed, SCHEDULE)``
* agent ``i`` (turns, sense/broadcast, random commits, message order):
  ``stream(seed, AGENTS, i)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

from . import seeding
from .agents import AgentState, Commitment, Heading, Role, current_opinion
from .behavior import (
    BroadcastPolicy,
    Choice,
    CommitKind,
    CommitPolicy,
    MaliciousMode,
    choose_sense_or_broadcast,
    should_commit,
)
from .environment import (
    DistributionKind,
    GridEnvironment,
    correct_opinion,
    generate_environment,
    round_half_up,
)
from .fusion import WeightingMethod, effective_new_opinion_weight, fuse
from .metrics import classify_step
from .navigation import EMPTY, NavAction, apply_action, decide, new_occupancy, random_action, scan

STEPS_PER_MINUTE = 60

PRESETS = {
    "formative": dict(length=38, width=38, n_agents=25, t_max=125),
    "learning": dict(length=75, width=75, n_agents=50, t_max=250),
    "summative": dict(length=150, width=150, n_agents=100, t_max=500),
}

_MOORE = tuple((dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if dx or dy)


class NavigationKind(str, Enum):
    RULES = "rules"
    RANDOM = "random"


@dataclass(frozen=True)
class ScenarioConfig:
    length: int = 38
    width: int = 38
    ratio: float = 0.52
    kind: DistributionKind = DistributionKind.UNIFORM
    n_agents: int = 25
    malicious_fraction: float = 0.0
    t_max: int = 125
    broadcast_policy: BroadcastPolicy = BroadcastPolicy()
    commit_policy: CommitPolicy = CommitPolicy()
    weighting: WeightingMethod = WeightingMethod()
    seed: int = 0
    navigation: NavigationKind = NavigationKind.RULES
    malicious_mode: MaliciousMode = MaliciousMode.CONSTANT
    # diagnostic switch: False isolates agents from each other's broadcasts
    deliver_broadcasts: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", DistributionKind(self.kind))
        object.__setattr__(self, "navigation", NavigationKind(self.navigation))
        object.__setattr__(self, "malicious_mode", MaliciousMode(self.malicious_mode))
        if self.length < 2 or self.width < 2:
            raise ValueError(f"invalid dimensions {self.length}x{self.width}")
        if not 0.0 < self.ratio < 1.0 or self.ratio == 0.5:
            raise ValueError(f"ratio must lie in (0, 1) and differ from 0.5, got {self.ratio}")
        if not 1 <= self.n_agents <= self.length * self.width:
            raise ValueError(f"n_agents={self.n_agents} must lie in [1, L*W]")
        if not 0.0 <= self.malicious_fraction < 1.0:
            raise ValueError(f"malicious_fraction must lie in [0, 1), got {self.malicious_fraction}")
        if self.n_malicious >= self.n_agents:
            raise ValueError("scenario needs at least one regular agent")
        if self.t_max < 0:
            raise ValueError(f"t_max must be non-negative, got {self.t_max}")

    @classmethod
    def preset(cls, name: str, **overrides) -> "ScenarioConfig":
        return cls(**{**PRESETS[name], **overrides})

    @property
    def n_malicious(self) -> int:
        return round_half_up(self.malicious_fraction * self.n_agents)

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class AgentRecord:
    id: int
    role: Role
    commit_time: int
    final_opinion: int | None
    forced: bool
    distinct_cells: int
    tp: int
    fp: int
    tn: int
    fn: int
    final_gamma: float
    # distinct cells visited at the end of each whole minute
    coverage_by_minute: tuple[int, ...]
    weighting_distance_sum: float
    weighting_events: int


@dataclass(frozen=True)
class EpisodeResult:
    config: ScenarioConfig
    correct_opinion: int
    wall_steps: int
    agents: tuple[AgentRecord, ...]

    @property
    def regular(self) -> tuple[AgentRecord, ...]:
        return tuple(a for a in self.agents if a.role is Role.REGULAR)


TraceSink = Callable[[int, AgentState, str, NavAction], None]


@dataclass
class SimulationState:
    config: ScenarioConfig
    env: GridEnvironment
    correct: int
    agents: list[AgentState]
    occupancy: list[int]
    clock: int = 0
    trace: TraceSink | None = None
    _cells: list[int] = field(default_factory=list, repr=False)
    _rngs: list = field(default_factory=list, repr=False)
    _schedule: object = None
    _tallies: list[list[int]] = field(default_factory=list, repr=False)
    _coverage: list[list[int]] = field(default_factory=list, repr=False)
    _wd_sum: list[float] = field(default_factory=list, repr=False)
    _wd_n: list[int] = field(default_factory=list, repr=False)
    _uncommitted: int = 0

    @property
    def done(self) -> bool:
        return self.clock >= self.config.t_max or self._uncommitted == 0


def _block_origin(config: ScenarioConfig, env: GridEnvironment, cols: int, rows: int) -> tuple[int, int]:
    L, W = config.length, config.width
    if cols > L or rows > W:
        raise ValueError(f"{cols}x{rows} starting block does not fit a {L}x{W} grid")
    x0 = L // 2 - cols // 2
    y0 = W // 2 - rows // 2
    if config.kind.clustered:
        region = env.region_columns(config.kind is DistributionKind.CLUSTERED_MAJORITY_FIRST)
        if len(region) < cols:
            raise ValueError(
                f"{cols}-column starting block does not fit the {len(region)}-column "
                f"{'majority' if config.kind is DistributionKind.CLUSTERED_MAJORITY_FIRST else 'minority'} region"
            )
        # nearest position to the grid centre that lies inside the region
        x0 = min(max(x0, region.start), region.stop - cols)
    x0 = min(max(x0, 0), L - cols)
    y0 = min(max(y0, 0), W - rows)
    return x0, y0


def initialize(config: ScenarioConfig, trace: TraceSink | None = None) -> SimulationState:
    """Build the environment and pack the swarm into a block near the centre.

    The block is ``ceil(sqrt(N))`` columns wide and filled row-major,
    malicious ids first, so the malicious members form one contiguous
    group. In clustered environments the block is shifted sideways into
    the region named by the distribution kind.
    """
    env = generate_environment(config.length, config.width, config.ratio, config.kind,
                               seeding.derive_seed(config.seed, seeding.ENVIRONMENT))
    correct = correct_opinion(env)
    n = config.n_agents
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    x0, y0 = _block_origin(config, env, cols, rows)

    placement = seeding.stream(config.seed, seeding.PLACEMENT)
    occupancy = new_occupancy(config.length, config.width)
    agents = []
    for i in range(n):
        x, y = x0 + i % cols, y0 + i // cols
        role = Role.MALICIOUS if i < config.n_malicious else Role.REGULAR
        agent = AgentState(i, role, x, y, Heading(placement.randrange(4)))
        occupancy[y * config.length + x] = i
        agents.append(agent)

    state = SimulationState(config, env, correct, agents, occupancy, trace=trace)
    state._cells = env.cells.ravel().tolist()
    state._rngs = [seeding.stream(config.seed, seeding.AGENTS, i) for i in range(n)]
    state._schedule = seeding.stream(config.seed, seeding.SCHEDULE)
    state._tallies = [[0, 0, 0, 0] for _ in range(n)]
    state._coverage = [[] for _ in range(n)]
    state._wd_sum = [0.0] * n
    state._wd_n = [0] * n
    state._uncommitted = n - config.n_malicious
    return state


def step(state: SimulationState) -> SimulationState:
    """Advance the simulation by one second."""
    cfg = state.config
    L, W = cfg.length, cfg.width
    LW = L * W
    cells = state._cells
    occ = state.occupancy
    agents = state.agents
    rngs = state._rngs
    tallies = state._tallies
    correct = state.correct
    clock = state.clock
    commit_policy = cfg.commit_policy
    broadcast_policy = cfg.broadcast_policy
    rules_nav = cfg.navigation is NavigationKind.RULES
    can_commit = commit_policy.kind is not CommitKind.NEVER
    trace = state.trace
    malicious_value = 1 - correct
    constant_malice = cfg.malicious_mode is MaliciousMode.CONSTANT

    order = list(range(len(agents)))
    state._schedule.shuffle(order)
    outbox: list[tuple[int, int]] = []

    for i in order:
        a = agents[i]
        rng = rngs[i]
        activity = ""
        regular = a.role is Role.REGULAR
        if not regular and constant_malice:
            outbox.append((i, malicious_value))
            activity = "broadcast"
        elif a.committed is not None:
            outbox.append((i, a.committed.final_opinion))
            activity = "broadcast"
        else:
            if a.observation_count * L > LW:
                if regular and can_commit and should_commit(commit_policy, a, rng):
                    final = 1 if a.gamma >= 0.5 else 0
                    a.committed = Commitment(final, clock, False)
                    state._uncommitted -= 1
                    outbox.append((i, final))
                    activity = "commit"
                else:
                    choice = choose_sense_or_broadcast(broadcast_policy, a, L, W, rng)
                    omega = current_opinion(a)
                    if regular:
                        tallies[i][classify_step(choice is Choice.BROADCAST, omega, correct)] += 1
                    if choice is Choice.BROADCAST:
                        outbox.append((i, omega if regular else malicious_value))
                        activity = "broadcast"
            if not activity:
                a.observation_count += 1
                a.white_count += cells[a.y * L + a.x]
                activity = "sense"

        if rules_nav:
            front, left, right = scan(a.x, a.y, a.heading, L, W, occ)
            action = decide(front, left, right, rng)
        else:
            action = random_action(rng)
        apply_action(a, action, L, W, occ)
        if trace is not None:
            trace(clock, a, activity, action)

    if cfg.deliver_broadcasts and outbox:
        _deliver(state, outbox)

    state.clock = clock + 1
    if state.clock % STEPS_PER_MINUTE == 0:
        for a, cov in zip(agents, state._coverage):
            cov.append(len(a.visited_cells))
    return state


def _deliver(state: SimulationState, outbox: list[tuple[int, int]]) -> None:
    cfg = state.config
    L, W = cfg.length, cfg.width
    occ = state.occupancy
    agents = state.agents
    inbox: dict[int, list[int]] = {}
    for sender, value in outbox:
        s = agents[sender]
        for dx, dy in _MOORE:
            nx, ny = s.x + dx, s.y + dy
            if 0 <= nx < L and 0 <= ny < W:
                j = occ[ny * L + nx]
                if j != EMPTY:
                    inbox.setdefault(j, []).append(value)

    method = cfg.weighting
    w_max = method.weight_param
    correct = state.correct
    wrong = 1 - correct
    mimic = cfg.malicious_mode is MaliciousMode.MIMIC
    for j, messages in inbox.items():
        a = agents[j]
        if a.committed is not None or (a.role is Role.MALICIOUS and not mimic):
            continue
        if len(messages) > 1:
            state._rngs[j].shuffle(messages)
        gamma = a.gamma
        wd = 0.0
        for omega in messages:
            w_co = effective_new_opinion_weight(method, gamma, correct)
            w_ic = effective_new_opinion_weight(method, gamma, wrong)
            wd += abs(w_max - w_co + w_ic)
            gamma = fuse(method, gamma, omega)
        a.gamma = gamma
        if a.role is Role.REGULAR:
            state._wd_sum[j] += wd
            state._wd_n[j] += len(messages)


def finalize(state: SimulationState) -> EpisodeResult:
    """Close the episode; agents still undecided are forced to ``round(gamma)``."""
    records = []
    end = state.clock
    for a in state.agents:
        tp, fp, tn, fn = state._tallies[a.id]
        if a.role is Role.MALICIOUS:
            final, commit_time, forced = None, end, False
        elif a.committed is None:
            final, commit_time, forced = (1 if a.gamma >= 0.5 else 0), end, True
        else:
            final, commit_time, forced = (a.committed.final_opinion,
                                          a.committed.commit_time, False)
        records.append(AgentRecord(
            id=a.id, role=a.role, commit_time=commit_time, final_opinion=final,
            forced=forced, distinct_cells=len(a.visited_cells),
            tp=tp, fp=fp, tn=tn, fn=fn, final_gamma=a.gamma,
            coverage_by_minute=tuple(state._coverage[a.id]),
            weighting_distance_sum=state._wd_sum[a.id],
            weighting_events=state._wd_n[a.id],
        ))
    return EpisodeResult(state.config, state.correct, end, tuple(records))


def run_episode(config: ScenarioConfig, trace: TraceSink | None = None) -> EpisodeResult:
    """Run until every regular agent has committed or ``t_max`` is reached."""
    state = initialize(config, trace)
    while not state.done:
        step(state)
    return finalize(state)
