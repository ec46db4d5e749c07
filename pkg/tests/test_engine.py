from collections import deque

import pytest
from hypothesis import given, strategies as st

from collective_perception.agents import Commitment, Role
from collective_perception.behavior import BroadcastPolicy, CommitKind, CommitPolicy, MaliciousMode
from collective_perception.engine import (
    PRESETS,
    NavigationKind,
    ScenarioConfig,
    _deliver,
    finalize,
    initialize,
    run_episode,
    step,
)
from collective_perception.environment import DistributionKind
from collective_perception.fusion import WeightingMethod
from collective_perception.navigation import EMPTY


def small(**kw):
    base = dict(length=20, width=20, n_agents=9, t_max=60, ratio=0.7)
    return ScenarioConfig(**{**base, **kw})


def connected(cells):
    cells = set(cells)
    start = next(iter(cells))
    seen, todo = {start}, deque([start])
    while todo:
        x, y = todo.popleft()
        for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if n in cells and n not in seen:
                seen.add(n)
                todo.append(n)
    return seen == cells


def test_presets():
    assert PRESETS["formative"] == dict(length=38, width=38, n_agents=25, t_max=125)
    assert PRESETS["learning"] == dict(length=75, width=75, n_agents=50, t_max=250)
    assert PRESETS["summative"] == dict(length=150, width=150, n_agents=100, t_max=500)
    cfg = ScenarioConfig.preset("summative", ratio=0.65)
    assert (cfg.length, cfg.n_agents, cfg.t_max, cfg.ratio) == (150, 100, 500, 0.65)


@pytest.mark.parametrize("kw", [
    dict(ratio=0.5), dict(ratio=1.0), dict(n_agents=401), dict(n_agents=0),
    dict(malicious_fraction=1.0), dict(malicious_fraction=0.95), dict(t_max=-1),
    dict(length=1),
])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        small(**kw)


def test_block_of_25():
    state = initialize(ScenarioConfig.preset("formative", seed=3))
    xs = sorted({a.x for a in state.agents})
    ys = sorted({a.y for a in state.agents})
    assert len(xs) == 5 and len(ys) == 5
    assert xs == list(range(xs[0], xs[0] + 5)) and ys == list(range(ys[0], ys[0] + 5))
    # interior agents have all eight Moore neighbours occupied
    interior = [a for a in state.agents if xs[0] < a.x < xs[-1] and ys[0] < a.y < ys[-1]]
    assert len(interior) == 9
    occupied = {(a.x, a.y) for a in state.agents}
    for a in interior:
        assert all((a.x + dx, a.y + dy) in occupied
                   for dx in (-1, 0, 1) for dy in (-1, 0, 1))


def test_malicious_ids_first_and_contiguous():
    state = initialize(ScenarioConfig.preset("summative", ratio=0.55, malicious_fraction=0.1))
    roles = [a.role for a in state.agents]
    assert roles[:10] == [Role.MALICIOUS] * 10
    assert all(r is Role.REGULAR for r in roles[10:])
    assert connected((a.x, a.y) for a in state.agents[:10])


@pytest.mark.parametrize("preset", ["formative", "summative"])
@pytest.mark.parametrize("seed", range(5))
def test_minority_first_starts_on_black(preset, seed):
    cfg = ScenarioConfig.preset(preset, ratio=0.75, seed=seed,
                                kind=DistributionKind.CLUSTERED_MINORITY_FIRST)
    state = initialize(cfg)
    assert all(state.env.cells[a.y, a.x] == 0 for a in state.agents)


@pytest.mark.parametrize("seed", range(5))
def test_majority_first_starts_on_majority(seed):
    cfg = ScenarioConfig.preset("formative", ratio=0.38, seed=seed,
                                kind=DistributionKind.CLUSTERED_MAJORITY_FIRST)
    state = initialize(cfg)
    assert all(state.env.cells[a.y, a.x] == 0 for a in state.agents)


def test_block_must_fit_region():
    cfg = ScenarioConfig(length=6, width=40, ratio=0.55, n_agents=25,
                         kind=DistributionKind.CLUSTERED_MINORITY_FIRST)
    with pytest.raises(ValueError, match="region"):
        initialize(cfg)


def test_initial_state():
    state = initialize(small(seed=1))
    assert state.clock == 0
    assert all(a.gamma == 0.5 and a.observation_count == 0 and not a.visited_cells
               for a in state.agents)
    assert sorted(i for i in state.occupancy if i != EMPTY) == list(range(9))


def test_isolated_broadcaster_changes_nobody():
    state = initialize(small(n_agents=2, seed=5))
    a, b = state.agents
    a.committed = Commitment(1, 0)
    # move b to the far corner so no broadcast can reach it
    state.occupancy[b.y * 20 + b.x] = EMPTY
    b.x, b.y = 19, 19
    state.occupancy[19 * 20 + 19] = b.id
    step(state)
    assert b.gamma == 0.5


def test_adjacent_delivery():
    state = initialize(small(n_agents=2, seed=2, weighting=WeightingMethod("static", 0.1)))
    a, b = state.agents
    assert max(abs(a.x - b.x), abs(a.y - b.y)) == 1
    _deliver(state, [(a.id, 1)])
    assert abs(b.gamma - 0.55) <= 1e-12
    assert a.gamma == 0.5


def test_delivery_skips_committed_receivers():
    state = initialize(small(n_agents=2, seed=2))
    a, b = state.agents
    b.committed = Commitment(0, 3)
    b.gamma = 0.2
    _deliver(state, [(a.id, 1)])
    assert b.gamma == 0.2


def test_sensing_updates_tallies():
    state = initialize(small(n_agents=1, seed=4))
    a = state.agents[0]
    colour = int(state.env.cells[a.y, a.x])
    step(state)
    assert a.observation_count == 1
    assert a.white_count == colour
    assert state.clock == 1


def test_t_max_zero():
    result = run_episode(small(t_max=0, malicious_fraction=0.2))
    assert result.wall_steps == 0
    for rec in result.regular:
        assert rec.forced and rec.commit_time == 0 and rec.final_opinion == 1
    assert all(r.final_opinion is None for r in result.agents if r.role is Role.MALICIOUS)


def test_loose_quorum_commits_early():
    for seed in range(3):
        cfg = ScenarioConfig.preset("formative", ratio=0.75, seed=seed,
                                    commit_policy=CommitPolicy(CommitKind.QUORUM, theta=0.49))
        result = run_episode(cfg)
        assert not any(r.forced for r in result.agents)
        assert max(r.commit_time for r in result.agents) < 0.75 * cfg.t_max
        assert result.wall_steps < cfg.t_max


def test_determinism():
    cfg = small(seed=11, malicious_fraction=0.2, kind=DistributionKind.CLUSTERED_MAJORITY_FIRST)
    assert run_episode(cfg) == run_episode(cfg)
    assert run_episode(cfg) != run_episode(cfg.with_(seed=12))


def test_isolation_switch():
    result = run_episode(small(deliver_broadcasts=False, seed=3))
    assert all(r.final_gamma == 0.5 and r.forced for r in result.agents)
    assert all(r.weighting_events == 0 for r in result.agents)
    # gamma never moves, so every decision falls to the tie rule
    assert all(r.final_opinion == 1 for r in result.agents)


def test_constant_malice_broadcasts_every_step():
    rows = []
    cfg = small(malicious_fraction=0.3, seed=8, malicious_mode=MaliciousMode.CONSTANT)
    result = run_episode(cfg, lambda t, a, act, nav: rows.append((a.id, a.role, act,
                                                                  a.observation_count, a.gamma)))
    bad = [r for r in rows if r[1] is Role.MALICIOUS]
    assert bad and all(act == "broadcast" and obs == 0 and g == 0.5 for _, _, act, obs, g in bad)
    for rec in result.agents:
        if rec.role is Role.MALICIOUS:
            assert (rec.tp, rec.fp, rec.tn, rec.fn) == (0, 0, 0, 0)
            assert rec.weighting_events == 0


def test_mimic_malice_senses_but_never_commits():
    rows = []
    cfg = small(malicious_fraction=0.3, seed=8, t_max=120, malicious_mode=MaliciousMode.MIMIC)
    result = run_episode(cfg, lambda t, a, act, nav: rows.append((a.id, a.role, act,
                                                                  a.committed)))
    bad = [r for r in rows if r[1] is Role.MALICIOUS]
    assert {act for _, _, act, _ in bad} <= {"sense", "broadcast"}
    assert "sense" in {act for _, _, act, _ in bad}
    assert all(c is None for *_, c in bad)
    assert all(rec.tp + rec.fp + rec.tn + rec.fn == 0
               for rec in result.agents if rec.role is Role.MALICIOUS)


def test_malicious_default_is_constant():
    assert ScenarioConfig().malicious_mode is MaliciousMode.CONSTANT


scenarios = st.builds(
    ScenarioConfig,
    length=st.integers(6, 16),
    width=st.integers(6, 16),
    ratio=st.sampled_from([0.3, 0.45, 0.55, 0.7, 0.85]),
    kind=st.sampled_from(list(DistributionKind)),
    n_agents=st.integers(1, 9),
    malicious_fraction=st.sampled_from([0.0, 0.0, 0.2, 0.4]),
    t_max=st.integers(0, 80),
    broadcast_policy=st.builds(BroadcastPolicy, st.sampled_from(["random", "parameterised"])),
    commit_policy=st.sampled_from([CommitPolicy(CommitKind.QUORUM, 0.1),
                                   CommitPolicy(CommitKind.QUORUM, 0.3),
                                   CommitPolicy(CommitKind.RANDOM_COMMIT, p=0.05)]),
    weighting=st.builds(WeightingMethod, st.sampled_from(["static", "equation", "inverted-equation"]),
                        st.sampled_from([0.1, 0.4, 1.0])),
    seed=st.integers(0, 2**32 - 1),
    navigation=st.sampled_from(list(NavigationKind)),
    malicious_mode=st.sampled_from(list(MaliciousMode)),
)


def _valid(cfg):
    try:
        initialize(cfg)
    except ValueError:
        return False
    return True


@given(scenarios.filter(_valid))
def test_step_invariants(cfg):
    L, W = cfg.length, cfg.width
    gate_open_steps = [0]

    def sink(clock, a, activity, action):
        assert activity in ("sense", "broadcast", "commit")
        if a.role is Role.REGULAR and a.committed is None and activity != "commit":
            obs_before = a.observation_count - (activity == "sense")
            if obs_before * L > L * W:
                gate_open_steps[0] += 1
            else:
                # gate closed: sense only
                assert activity == "sense"

    state = initialize(cfg, sink)
    commitments = {}
    while not state.done:
        step(state)
        positions = [(a.x, a.y) for a in state.agents]
        assert len(set(positions)) == len(positions)
        assert all(0 <= x < L and 0 <= y < W for x, y in positions)
        for a in state.agents:
            assert 0.0 <= a.gamma <= 1.0
            assert a.white_count <= a.observation_count
            if a.id in commitments:
                assert a.committed == commitments[a.id]
            elif a.committed is not None:
                assert a.role is Role.REGULAR
                commitments[a.id] = a.committed
    result = finalize(state)
    assert len(result.agents) == cfg.n_agents
    assert all(r.commit_time <= cfg.t_max for r in result.agents)
    tally = sum(r.tp + r.fp + r.tn + r.fn for r in result.regular)
    assert tally == gate_open_steps[0]
    assert all(r.distinct_cells <= L * W for r in result.agents)
    for r in result.regular:
        if r.forced:
            assert r.final_opinion == (1 if r.final_gamma >= 0.5 else 0)
            assert r.commit_time == result.wall_steps
