"""Payoff unit tests: stage reward, discounting, scaling invariance."""

import random

import pytest

from crossgame.game import (
    HorizonParams,
    PayoffWeights,
    StageOutcome,
    discounted_payoff,
    stage_reward,
)
from crossgame.policy import level0_action
from helpers import random_params, random_snapshot


def test_stage_reward_examples():
    w = PayoffWeights()
    assert stage_reward(StageOutcome(2, False, False, False), w, False) == 2.0
    assert stage_reward(StageOutcome(1, False, False, False), w, True) == 3.0
    assert stage_reward(StageOutcome(0, True, True, False), w, False) == -5.5


def test_stage_reward_collision_penalty():
    w = PayoffWeights()
    assert stage_reward(StageOutcome(0, True, False, True), w, False) == -100.5


def test_stage_reward_monotonicity():
    rng = random.Random(3)
    for _ in range(200):
        w = PayoffWeights(
            w_prog=rng.random() * 2,
            w_wait=rng.random(),
            w_safe=rng.random() * 5,
            c_col=rng.random() * 100,
            rho=1 + rng.random(),
        )
        base = StageOutcome(1, False, False, False)
        more = StageOutcome(2, False, False, False)
        assert stage_reward(more, w, False) >= stage_reward(base, w, False)
        for flagged in (
            StageOutcome(1, True, False, False),
            StageOutcome(1, False, True, False),
            StageOutcome(1, False, False, True),
        ):
            assert stage_reward(flagged, w, False) <= stage_reward(base, w, False)


def test_weights_bounds():
    with pytest.raises(ValueError):
        PayoffWeights(w_prog=-0.1)
    with pytest.raises(ValueError):
        PayoffWeights(rho=0.5)


def test_discounted_payoff_examples():
    assert discounted_payoff([2, 2, 2, 2], 0.5) == 3.75
    assert discounted_payoff([7.5], 0.25) == 7.5
    assert discounted_payoff([1, -100], 0.5) == -49.0


def test_discounted_payoff_gamma_one_is_plain_sum():
    rng = random.Random(5)
    for _ in range(50):
        rewards = [rng.randrange(-8, 9) / 2 for _ in range(rng.randint(1, 6))]
        assert discounted_payoff(rewards, 1.0) == sum(rewards)


def test_discounted_payoff_empty_rejected():
    with pytest.raises(ValueError):
        discounted_payoff([], 0.5)


def test_horizon_bounds():
    with pytest.raises(ValueError):
        HorizonParams(T=0)
    with pytest.raises(ValueError):
        HorizonParams(gamma=0.0)
    with pytest.raises(ValueError):
        HorizonParams(gamma=1.5)


def test_scaling_invariance_of_chosen_action():
    # Multiplying all four weights by c > 0 scales payoffs but must not
    # change the chosen action (rho stays fixed: it is a ratio, not a weight).
    rng = random.Random(11)
    checked = 0
    for _ in range(60):
        snap = random_snapshot(rng, max_vehicles=4)
        weights, horizon = random_params(rng)
        ego = rng.choice(snap.vehicles).id
        base = level0_action(snap, ego, weights, horizon)
        for c in (2.0, 4.0, 0.5):
            scaled = PayoffWeights(
                w_prog=weights.w_prog * c,
                w_wait=weights.w_wait * c,
                w_safe=weights.w_safe * c,
                c_col=weights.c_col * c,
                rho=weights.rho,
            )
            assert level0_action(snap, ego, scaled, horizon) == base
        checked += 1
    assert checked == 60
