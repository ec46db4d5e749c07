import random

import pytest

from collective_perception.agents import AgentState, Commitment, Heading, Role
from collective_perception.behavior import (
    BroadcastKind,
    BroadcastPolicy,
    Choice,
    CommitKind,
    CommitPolicy,
    broadcast_probability,
    broadcast_value,
    choose_sense_or_broadcast,
    exploration_gate_open,
    should_commit,
)


def agent(white=0, obs=0, gamma=0.5, role=Role.REGULAR, committed=None):
    return AgentState(0, role, 0, 0, Heading.NORTH, observation_count=obs,
                      white_count=white, gamma=gamma, committed=committed)


@pytest.mark.parametrize("obs, expected", [(38, False), (39, True), (0, False)])
def test_exploration_gate(obs, expected):
    assert exploration_gate_open(agent(obs=obs), 38, 38) is expected


def test_gate_is_strict_on_rectangles():
    # obs/(L*W) > 1/L  <=>  obs > W
    for L, W in [(10, 4), (4, 10), (150, 150)]:
        assert not exploration_gate_open(agent(obs=W), L, W)
        assert exploration_gate_open(agent(obs=W + 1), L, W)


def test_broadcast_probability_examples():
    # r_k = 0 is approached with one observation on a huge grid
    big = 10**12
    assert abs(broadcast_probability(agent(1, 1, 1.0), big, 1) - 0.5) <= 1e-12
    assert broadcast_probability(agent(100, 100, 1.0), 10, 10) == 1.0
    assert abs(broadcast_probability(agent(20, 20, 0.4), 10, 10) - 0.3) <= 1e-12


def test_broadcast_probability_clamped():
    assert broadcast_probability(agent(500, 500, 1.0), 10, 10) == 1.0


def test_broadcast_probability_needs_observation():
    with pytest.raises(ValueError):
        broadcast_probability(agent(), 10, 10)


def frequency(policy, a, L, W, n=10_000, seed=7):
    rng = random.Random(seed)
    hits = sum(choose_sense_or_broadcast(policy, a, L, W, rng) is Choice.BROADCAST
               for _ in range(n))
    return hits / n


def test_random_choice_is_even():
    assert abs(frequency(BroadcastPolicy(BroadcastKind.RANDOM), agent(1, 5), 10, 10) - 0.5) < 0.02


def test_parameterised_certain():
    assert frequency(BroadcastPolicy(), agent(100, 100, 1.0), 10, 10, n=1000) == 1.0


def test_parameterised_rate():
    a = agent(20, 20, 0.4)  # p = 0.3
    assert abs(frequency(BroadcastPolicy(), a, 10, 10) - 0.3) < 0.02


@pytest.mark.parametrize("gamma, expected", [(0.05, True), (0.5, False), (0.95, True),
                                             (0.1, False), (0.9, False)])
def test_quorum_commit(gamma, expected):
    assert should_commit(CommitPolicy(CommitKind.QUORUM, theta=0.1), agent(gamma=gamma),
                         random.Random(0)) is expected


def test_random_commit_rate():
    rng = random.Random(3)
    policy = CommitPolicy(CommitKind.RANDOM_COMMIT, p=0.05)
    rate = sum(should_commit(policy, agent(), rng) for _ in range(20_000)) / 20_000
    assert abs(rate - 0.05) < 0.01


def test_never_commit():
    assert not should_commit(CommitPolicy(CommitKind.NEVER), agent(gamma=0.0), random.Random(0))


@pytest.mark.parametrize("theta", [0.0, 0.5, 0.7, -0.1])
def test_theta_range(theta):
    with pytest.raises(ValueError):
        CommitPolicy(CommitKind.QUORUM, theta=theta)


def test_commit_probability_range():
    with pytest.raises(ValueError):
        CommitPolicy(CommitKind.RANDOM_COMMIT, p=1.5)


def test_broadcast_values():
    assert broadcast_value(agent(role=Role.MALICIOUS), correct=1) == 0
    assert broadcast_value(agent(role=Role.MALICIOUS), correct=0) == 1
    committed = agent(0, 10, 0.0, committed=Commitment(1, 42))
    assert all(broadcast_value(committed, c) == 1 for c in (0, 1))
    assert broadcast_value(agent(4, 5), correct=0) == 1
    with pytest.raises(ValueError):
        broadcast_value(agent(), correct=1)
