"""Decision-making tests: level-0/level-k, the brute-force oracle, SPNE."""

import random

import pytest

from crossgame.game import HorizonParams, PayoffWeights
from crossgame.policy import (
    K_MAX,
    DecisionMemo,
    best_response_exhaustive,
    constant_speed_schedule,
    FrozenStep,
    level0_action,
    levelk_action,
    make_snapshot,
    solve_spne,
)
from crossgame.world import (
    Action,
    KinematicLimits,
    VehicleState,
    build_layout,
    feasible_actions,
)
from helpers import random_params, random_snapshot

W = PayoffWeights()
H = HorizonParams()
LIMITS = KinematicLimits(2, 1)


def veh(route, idx, speed, vid=0, emergency=False, level=1):
    return VehicleState(vid, emergency, route, idx, speed, level, 0)


# --- level-0 ----------------------------------------------------------------


def test_level0_single_vehicle_accelerates():
    layout = build_layout(10, 10)
    snap = make_snapshot([veh(("S", "straight"), 0, 0)], layout, LIMITS)
    assert level0_action(snap, 0, W, H) == Action.ACCEL
    # Matches the exhaustive rollout oracle.
    plan = best_response_exhaustive(snap, 0, constant_speed_schedule(snap, 0, H.T), W, H)
    assert plan[0] == Action.ACCEL


def test_level0_blocked_at_gap_zero_keeps():
    layout = build_layout(10, 10)
    ego = veh(("S", "straight"), 3, 0, vid=0)
    blocker = veh(("S", "straight"), 4, 0, vid=1)
    snap = make_snapshot([ego, blocker], layout, LIMITS)
    assert level0_action(snap, 0, W, H) == Action.KEEP


def test_level0_never_accelerates_into_occupied_box():
    layout = build_layout(10, 10)
    ego = veh(("S", "straight"), 8, 2, vid=0)  # box entry 2 cells ahead
    parked = veh(("W", "straight"), 11, 0, vid=1)  # sitting on SE
    snap = make_snapshot([ego, parked], layout, LIMITS)
    action = level0_action(snap, 0, W, H)
    assert action in (Action.DECEL, Action.HARD_STOP)


def test_level0_requires_active_ego():
    layout = build_layout(10, 10)
    snap = make_snapshot([veh(("S", "straight"), 0, 0)], layout, LIMITS)
    with pytest.raises(ValueError):
        level0_action(snap, 99, W, H)


# --- level-k ----------------------------------------------------------------


def test_levelk_single_vehicle_matches_level0_all_k():
    layout = build_layout(10, 10)
    rng = random.Random(31)
    for _ in range(20):
        snap = random_snapshot(rng, max_vehicles=1)
        weights, horizon = random_params(rng)
        base = level0_action(snap, snap.vehicles[0].id, weights, horizon)
        for k in range(0, K_MAX + 1):
            assert levelk_action(snap, snap.vehicles[0].id, k, weights, horizon) == base


def test_levelk_two_vehicle_yield():
    # Symmetric straight conflict: E has priority (approach order) and
    # proceeds; S yields with a non-accelerating action.
    layout = build_layout(10, 10)
    vS = veh(("S", "straight"), 8, 1, vid=0)
    vE = veh(("E", "straight"), 8, 1, vid=1)
    snap = make_snapshot([vS, vE], layout, LIMITS)
    aE = levelk_action(snap, 1, 1, W, H)
    aS = levelk_action(snap, 0, 1, W, H)
    assert aE == Action.ACCEL
    assert aS in (Action.KEEP, Action.DECEL, Action.HARD_STOP)
    # Backward induction on the same state agrees qualitatively at T=2.
    profile = solve_spne(snap, 2, W, HorizonParams(T=2, gamma=0.5))
    assert profile[1][0] in (Action.KEEP, Action.ACCEL)
    assert profile[0][0] in (Action.KEEP, Action.DECEL, Action.HARD_STOP)


def test_level2_matches_level1_on_conflict_state():
    layout = build_layout(10, 10)
    vS = veh(("S", "straight"), 8, 1, vid=0)
    vE = veh(("E", "straight"), 8, 1, vid=1)
    snap = make_snapshot([vS, vE], layout, LIMITS)
    for vid in (0, 1):
        assert levelk_action(snap, vid, 2, W, H) == levelk_action(snap, vid, 1, W, H)


def test_levelk_rejects_bad_k():
    layout = build_layout(10, 10)
    snap = make_snapshot([veh(("S", "straight"), 0, 0)], layout, LIMITS)
    with pytest.raises(ValueError):
        levelk_action(snap, 0, K_MAX + 1, W, H)
    with pytest.raises(ValueError):
        levelk_action(snap, 0, -1, W, H)


def test_level0_delegation_from_levelk():
    layout = build_layout(10, 10)
    snap = make_snapshot([veh(("S", "straight"), 5, 1)], layout, LIMITS)
    assert levelk_action(snap, 0, 0, W, H) == level0_action(snap, 0, W, H)


# --- brute-force oracle -----------------------------------------------------


def test_exhaustive_empty_road_plan_hand_checked():
    layout = build_layout(10, 10)
    limits = KinematicLimits(v_max=1, d_min=1)
    snap = make_snapshot([veh(("S", "straight"), 0, 0)], layout, limits)
    horizon = HorizonParams(T=2, gamma=0.5)
    plan = best_response_exhaustive(
        snap, 0, constant_speed_schedule(snap, 0, 2), W, horizon
    )
    assert plan == (Action.ACCEL, Action.KEEP)


def test_exhaustive_blocked_forever_keeps():
    layout = build_layout(10, 10)
    cells = layout.route_table[("S", "straight")]
    snap = make_snapshot([veh(("S", "straight"), 3, 0)], layout, LIMITS)
    frozen = [FrozenStep(frozenset(), frozenset({cells[4]})) for _ in range(H.T)]
    plan = best_response_exhaustive(snap, 0, frozen, W, H)
    assert plan == (Action.KEEP,) * H.T


def test_exhaustive_requires_full_schedule():
    layout = build_layout(10, 10)
    snap = make_snapshot([veh(("S", "straight"), 3, 0)], layout, LIMITS)
    with pytest.raises(ValueError):
        best_response_exhaustive(snap, 0, [], W, H)


def test_oracle_equivalence_sample():
    # The fast plan search equals brute-force enumeration under the
    # constant-speed frozen schedule (full 1000-case run in acceptance).
    rng = random.Random(1234)
    for _ in range(150):
        snap = random_snapshot(rng)
        weights, horizon = random_params(rng)
        ego = rng.choice(snap.vehicles).id
        frozen = constant_speed_schedule(snap, ego, horizon.T)
        plan = best_response_exhaustive(snap, ego, frozen, weights, horizon)
        assert level0_action(snap, ego, weights, horizon) == plan[0]


# --- cross-cutting properties ----------------------------------------------


def test_returned_action_always_feasible():
    rng = random.Random(77)
    for _ in range(120):
        snap = random_snapshot(rng)
        weights, horizon = random_params(rng)
        ego = rng.choice(snap.vehicles)
        k = rng.randint(0, 2)
        action = levelk_action(snap, ego.id, k, weights, horizon)
        table = snap.layout.route_table
        end_occ = {
            table[v.route][v.cell_index] for v in snap.vehicles if v.id != ego.id
        }
        options = feasible_actions(snap.layout, ego, [], end_occ, snap.limits)
        assert action in options


def test_determinism_across_fresh_memos():
    rng = random.Random(55)
    for _ in range(40):
        snap = random_snapshot(rng, max_vehicles=4)
        weights, horizon = random_params(rng)
        ego = rng.choice(snap.vehicles).id
        k = rng.randint(0, 2)
        a1 = levelk_action(snap, ego, k, weights, horizon, DecisionMemo())
        a2 = levelk_action(snap, ego, k, weights, horizon, DecisionMemo())
        assert a1 == a2


def test_memo_soundness_on_off():
    rng = random.Random(99)
    for _ in range(30):
        snap = random_snapshot(rng, max_vehicles=3)
        weights, horizon = random_params(rng)
        ego = rng.choice(snap.vehicles).id
        k = rng.randint(0, 2)
        with_memo = levelk_action(snap, ego, k, weights, horizon, DecisionMemo(True))
        without = levelk_action(snap, ego, k, weights, horizon, DecisionMemo(False))
        assert with_memo == without


def test_snapshot_validation():
    layout = build_layout(10, 10)
    with pytest.raises(ValueError):
        make_snapshot(
            [veh(("S", "straight"), 3, 0, vid=0), veh(("S", "straight"), 3, 0, vid=1)],
            layout,
            LIMITS,
        )
    with pytest.raises(ValueError):
        make_snapshot(
            [veh(("S", "straight"), 3, 0, vid=0), veh(("N", "left"), 2, 0, vid=0)],
            layout,
            LIMITS,
        )


# --- SPNE reference ---------------------------------------------------------


def test_spne_single_vehicle_equals_exhaustive():
    layout = build_layout(6, 6)
    limits = KinematicLimits(2, 1)
    snap = make_snapshot([veh(("N", "left"), 2, 1)], layout, limits)
    horizon = HorizonParams(T=3, gamma=0.5)
    profile = solve_spne(snap, 3, W, horizon)
    plan = best_response_exhaustive(snap, 0, constant_speed_schedule(snap, 0, 3), W, horizon)
    assert profile[0] == plan


def test_spne_decoupled_vehicles_play_solo_optima():
    layout = build_layout(6, 6)
    limits = KinematicLimits(2, 1)
    a = veh(("S", "right"), 2, 1, vid=0)  # box cell SE only, exits E
    b = veh(("N", "right"), 2, 1, vid=1)  # box cell NW only, exits W
    snap = make_snapshot([a, b], layout, limits)
    horizon = HorizonParams(T=2, gamma=0.5)
    profile = solve_spne(snap, 2, W, horizon)
    for state in (a, b):
        solo = make_snapshot([state], layout, limits)
        plan = best_response_exhaustive(
            solo, state.id, constant_speed_schedule(solo, state.id, 2), W, horizon
        )
        assert profile[state.id] == plan


def test_spne_hand_built_conflict():
    # Both one cell from the box on conflicting straights, v_max=1, T=2.
    # Hand backward induction: E (higher priority) advances both steps,
    # S waits one step (Decel is the canonical-first standstill) then goes.
    layout = build_layout(10, 10)
    limits = KinematicLimits(v_max=1, d_min=1)
    vS = veh(("S", "straight"), 9, 1, vid=0)
    vE = veh(("E", "straight"), 9, 1, vid=1)
    snap = make_snapshot([vS, vE], layout, limits)
    profile = solve_spne(snap, 2, W, HorizonParams(T=2, gamma=0.5))
    assert profile[1] == (Action.KEEP, Action.KEEP)
    assert profile[0] == (Action.DECEL, Action.ACCEL)


def test_spne_input_validation():
    layout = build_layout(4, 4)
    vs = [veh(("S", "straight"), i, 0, vid=i) for i in range(3)]
    snap3 = make_snapshot(vs, layout, LIMITS)
    with pytest.raises(ValueError):
        solve_spne(snap3, 2, W, H)
    snap1 = make_snapshot(vs[:1], layout, LIMITS)
    with pytest.raises(ValueError):
        solve_spne(snap1, 4, W, H)
