"""Level-k decision making over a discounted receding horizon.

A level-0 vehicle best-responds to the assumption that everyone else keeps
their current speed.  A level-k vehicle (k >= 1) first predicts how the
next T steps unfold when every vehicle reasons at level k-1 (a "base
rollout": sequential decisions within each step, safety-filtered), then
best-responds to the predicted cell-time occupancy.  Only the first action
of the chosen plan is executed each simulation step.

The plan search is exact: it returns the same action as brute-force
enumeration of all action sequences with per-step feasibility degradation,
the same payoff, and the same canonical tie-break (Keep, Accel, Decel,
HardStop on the first action, then lexicographically).  The brute force,
``best_response_exhaustive``, is kept deliberately independent: it walks
real cell ids through the world ops so it can serve as a test oracle for
the fast search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .game import (
    HorizonParams,
    PayoffWeights,
    StageOutcome,
    discounted_payoff,
    stage_reward,
)
from .world import (
    CANONICAL_ACTIONS,
    Action,
    IntersectionLayout,
    KinematicLimits,
    Traversal,
    VehicleState,
    apply_action,
    feasible_actions,
    gap_ahead,
    priority_sort_key,
    resulting_speed,
)

Plan = tuple[Action, ...]

# Reasoning-level cap.  Deeper models add little over level 1.
K_MAX = 3


@dataclass(frozen=True)
class WorldSnapshot:
    """All active vehicles plus the fixed world, ordered by vehicle id."""

    vehicles: tuple[VehicleState, ...]
    layout: IntersectionLayout
    limits: KinematicLimits
    emergency_order_priority: bool = True

    def state_of(self, vehicle_id: int) -> Optional[VehicleState]:
        for v in self.vehicles:
            if v.id == vehicle_id:
                return v
        return None

    def key(self) -> tuple:
        return tuple(
            (v.id, v.emergency, v.route[0], v.route[1], v.cell_index, v.speed)
            for v in self.vehicles
        )


def make_snapshot(
    vehicles: Iterable[VehicleState],
    layout: IntersectionLayout,
    limits: KinematicLimits,
    emergency_order_priority: bool = True,
) -> WorldSnapshot:
    """Validated snapshot constructor: active vehicles on distinct cells."""
    vs = tuple(sorted(vehicles, key=lambda v: v.id))
    seen_ids: set[int] = set()
    seen_cells: set[int] = set()
    for v in vs:
        if v.exited:
            raise ValueError(f"vehicle {v.id} is exited; snapshots hold active vehicles")
        if v.id in seen_ids:
            raise ValueError(f"duplicate vehicle id {v.id}")
        seen_ids.add(v.id)
        cell = layout.route_table[v.route][v.cell_index]
        if cell in seen_cells:
            raise ValueError(f"vehicle {v.id} overlaps an occupied cell")
        seen_cells.add(cell)
    return WorldSnapshot(vs, layout, limits, emergency_order_priority)


@dataclass(frozen=True)
class FrozenStep:
    """Predicted cells of the other vehicles over one lookahead step."""

    covered: frozenset[int]
    ends: frozenset[int]


@dataclass(frozen=True)
class CommitContext:
    """Moves already committed by earlier deciders within the current step."""

    actions: tuple[tuple[int, Action], ...] = ()
    cells: frozenset[int] = frozenset()
    ends: frozenset[int] = frozenset()

    @property
    def ids(self) -> frozenset[int]:
        return frozenset(vid for vid, _ in self.actions)

    def key(self) -> tuple:
        return self.actions


EMPTY_CONTEXT = CommitContext()


def context_from_commitments(
    commitments: Sequence[tuple[VehicleState, Action, Traversal]],
) -> CommitContext:
    cells: set[int] = set()
    ends: set[int] = set()
    actions: list[tuple[int, Action]] = []
    for state, action, trav in commitments:
        actions.append((state.id, action))
        cells.update(trav.cells)
        if trav.end_cell is not None:
            ends.add(trav.end_cell)
    return CommitContext(tuple(actions), frozenset(cells), frozenset(ends))


class DecisionMemo:
    """Caches shared across the decisions of one run.

    Every key is a pure function of the inputs it stands for, so hits can
    never change behaviour; ``enabled=False`` turns all reuse off (used by
    the memo-soundness tests).
    """

    def __init__(self, enabled: bool = True) -> None:
        self.enabled = enabled
        self.plan_cache: dict = {}
        self.rollout_cache: dict = {}
        self.decision_cache: dict = {}


def _weights_key(weights: PayoffWeights) -> tuple:
    return (weights.w_prog, weights.w_wait, weights.w_safe, weights.c_col, weights.rho)


# ---------------------------------------------------------------------------
# Exact plan search against a frozen schedule
# ---------------------------------------------------------------------------


def _search_best_plan(
    route_cells: tuple[int, ...],
    pos0: int,
    speed0: int,
    emergency: bool,
    schedule: Sequence[FrozenStep],
    depth: int,
    weights: PayoffWeights,
    gamma: float,
    limits: KinematicLimits,
    box_entry: int,
    box_exit: int,
    memo: DecisionMemo,
) -> tuple[float, Plan]:
    """Best executed action sequence for one vehicle vs. a frozen world.

    Returns (discounted payoff, executed plan).  The plan is the
    lexicographically first maximizer in canonical action order; steps
    after a route exit are padded with Keep.  Feasibility mirrors
    ``world.feasible_actions`` exactly, including the box-clearance rule.
    """
    v_max, d_min = limits.v_max, limits.d_min
    # +3 keeps the whole box segment inside the event window.
    window = depth * v_max + d_min + 3
    L = len(route_cells)
    hi = min(pos0 + window, L - 1)

    # Occupancy events mapped onto the vehicle's own route indices.
    cov_idx: list[frozenset[int]] = []
    end_idx: list[frozenset[int]] = []
    for t in range(depth):
        step = schedule[t]
        cov_idx.append(
            frozenset(i for i in range(pos0 + 1, hi + 1) if route_cells[i] in step.covered)
        )
        end_idx.append(
            frozenset(i for i in range(pos0, hi + 1) if route_cells[i] in step.ends)
        )

    dist = L - 1 - pos0
    # The box-entry rule is inert unless the entry is ahead and reachable.
    rel_entry = box_entry - pos0
    if not (1 <= rel_entry <= depth * v_max):
        rel_entry, seg_len = 0, 0
    else:
        seg_len = box_exit - box_entry
    key = None
    if memo.enabled:
        events = tuple(
            (
                tuple(sorted(i - pos0 for i in cov_idx[t])),
                tuple(sorted(i - pos0 for i in end_idx[t])),
            )
            for t in range(depth)
        )
        key = (
            depth,
            speed0,
            emergency,
            min(dist, window + 1),
            rel_entry,
            seg_len,
            events,
            _weights_key(weights),
            gamma,
            v_max,
            d_min,
        )
        hit = memo.plan_cache.get(key)
        if hit is not None:
            return hit

    mwp = (weights.rho if emergency else 1.0) * weights.w_prog
    w_wait, w_safe, c_col = weights.w_wait, weights.w_safe, weights.c_col
    node: dict[tuple[int, int, int], tuple[float, Action]] = {}

    def best_value(t: int, pos: int, speed: int) -> float:
        cached = node.get((t, pos, speed))
        if cached is not None:
            return cached[0]
        covs_t = cov_idx[t - 1]
        ends_t = end_idx[t - 1]
        best_v: Optional[float] = None
        best_a = Action.KEEP
        for a in CANONICAL_ACTIONS:
            ns = resulting_speed(speed, a, limits)
            end = pos + ns
            exited = end >= L
            last = L - 1 if exited else end
            if ns > 0:
                blocked = False
                for i in range(pos + 1, last + 1):
                    if i in covs_t or i in ends_t:
                        blocked = True
                        break
                if not blocked and not exited:
                    for i in range(end + 1, min(end + d_min, L - 1) + 1):
                        if i in ends_t:
                            blocked = True
                            break
                if not blocked and pos < box_entry <= end:
                    for i in range(box_entry, box_exit):
                        if i in ends_t:
                            blocked = True
                            break
                if blocked:
                    continue
            advanced = last - pos
            r = mwp * advanced
            if not exited:
                # A feasible move already guarantees gap >= d_min and no
                # overlap, so only standstill can incur the flag penalties.
                if ns == 0:
                    r -= w_wait
                    for i in range(pos + 1, min(pos + d_min, L - 1) + 1):
                        if i in ends_t:
                            r -= w_safe
                            break
                    if pos in ends_t:
                        r -= c_col
                v = r if t == depth else r + gamma * best_value(t + 1, end, ns)
            else:
                v = r
            if best_v is None or v > best_v:
                best_v, best_a = v, a
        assert best_v is not None  # standstill is always feasible
        node[(t, pos, speed)] = (best_v, best_a)
        return best_v

    value = best_value(1, pos0, speed0)

    plan: list[Action] = []
    t, pos, speed = 1, pos0, speed0
    while t <= depth:
        _, a = node[(t, pos, speed)]
        plan.append(a)
        speed = resulting_speed(speed, a, limits)
        pos += speed
        t += 1
        if pos >= L:
            plan.extend([Action.KEEP] * (depth - t + 1))
            break

    result = (value, tuple(plan))
    if memo.enabled and key is not None:
        memo.plan_cache[key] = result
    return result


# ---------------------------------------------------------------------------
# Frozen schedules
# ---------------------------------------------------------------------------


def constant_speed_schedule(
    snapshot: WorldSnapshot, ego_id: int, depth: int
) -> list[FrozenStep]:
    """Others glide at their current speed, parked at their route's last cell."""
    covered: list[set[int]] = [set() for _ in range(depth)]
    ends: list[set[int]] = [set() for _ in range(depth)]
    table = snapshot.layout.route_table
    for v in snapshot.vehicles:
        if v.id == ego_id:
            continue
        cells = table[v.route]
        last = len(cells) - 1
        pos = v.cell_index
        for t in range(depth):
            np_ = min(pos + v.speed, last)
            covered[t].update(cells[pos + 1 : np_ + 1])
            ends[t].add(cells[np_])
            pos = np_
    return [FrozenStep(frozenset(covered[t]), frozenset(ends[t])) for t in range(depth)]


def _augment_first_step(
    snapshot: WorldSnapshot,
    ego_id: int,
    schedule: list[FrozenStep],
    context: CommitContext,
) -> list[FrozenStep]:
    """Make step 1 at least as strict as the real feasibility filter.

    Undecided vehicles might stay put (standstill is always available to
    them), so their current cells are blocked; already-committed moves are
    blocked exactly as committed.
    """
    committed_ids = context.ids
    extra_ends: set[int] = set(context.ends)
    table = snapshot.layout.route_table
    for v in snapshot.vehicles:
        if v.id == ego_id or v.id in committed_ids:
            continue
        extra_ends.add(table[v.route][v.cell_index])
    first = schedule[0]
    return [
        FrozenStep(first.covered | context.cells, first.ends | frozenset(extra_ends))
    ] + schedule[1:]


# ---------------------------------------------------------------------------
# Public decisions
# ---------------------------------------------------------------------------


def _require_ego(snapshot: WorldSnapshot, ego_id: int) -> VehicleState:
    ego = snapshot.state_of(ego_id)
    if ego is None or ego.exited:
        raise ValueError(f"vehicle {ego_id} is not active in the snapshot")
    return ego


def level0_action(
    snapshot: WorldSnapshot,
    ego_id: int,
    weights: PayoffWeights,
    horizon: HorizonParams,
    memo: Optional[DecisionMemo] = None,
    context: CommitContext = EMPTY_CONTEXT,
) -> Action:
    """Instinctive decision: best response to constant-speed predictions."""
    memo = memo if memo is not None else DecisionMemo()
    ego = _require_ego(snapshot, ego_id)
    schedule = constant_speed_schedule(snapshot, ego_id, horizon.T)
    schedule = _augment_first_step(snapshot, ego_id, schedule, context)
    route_cells = snapshot.layout.route_table[ego.route]
    _, plan = _search_best_plan(
        route_cells,
        ego.cell_index,
        ego.speed,
        ego.emergency,
        schedule,
        horizon.T,
        weights,
        horizon.gamma,
        snapshot.limits,
        snapshot.layout.box_entry_index,
        len(route_cells) - snapshot.layout.L_out,
        memo,
    )
    return plan[0]


def levelk_action(
    snapshot: WorldSnapshot,
    ego_id: int,
    k: int,
    weights: PayoffWeights,
    horizon: HorizonParams,
    memo: Optional[DecisionMemo] = None,
    context: CommitContext = EMPTY_CONTEXT,
) -> Action:
    """Level-k decision: best response to a level-(k-1) prediction of others.

    The current step keeps the exact sequential-game semantics: for every
    feasible first action the later deciders' level-(k-1) reactions are
    simulated with that action committed, so a vehicle with priority sees
    that others will yield to it.  The remaining lookahead steps use the
    shared level-(k-1) base rollout as a frozen prediction.
    """
    if k < 0 or k > K_MAX:
        raise ValueError(f"k: must be in [0, {K_MAX}]")
    memo = memo if memo is not None else DecisionMemo()
    if k == 0:
        return level0_action(snapshot, ego_id, weights, horizon, memo, context)
    ego = _require_ego(snapshot, ego_id)
    layout, limits = snapshot.layout, snapshot.limits

    dkey = None
    if memo.enabled:
        dkey = (
            snapshot.key(),
            ego_id,
            k,
            horizon.T,
            context.key(),
            _weights_key(weights),
            horizon.gamma,
            limits.v_max,
            limits.d_min,
            snapshot.emergency_order_priority,
        )
        hit = memo.decision_cache.get(dkey)
        if hit is not None:
            return hit

    # Frozen prediction for lookahead steps 2..T.
    moves = _base_rollout(snapshot, k - 1, horizon.T, weights, horizon.gamma, memo)
    tail_schedule: list[FrozenStep] = []
    for t in range(1, horizon.T):
        covered: set[int] = set()
        ends: set[int] = set()
        for vid, cells, end_cell in moves[t]:
            if vid == ego_id:
                continue
            covered.update(cells)
            if end_cell is not None:
                ends.add(end_cell)
        tail_schedule.append(FrozenStep(frozenset(covered), frozenset(ends)))

    # Step-1 round, exactly as the simulator runs it: committed vehicles are
    # fixed, earlier undecided vehicles act without seeing the ego, later
    # ones react to the ego's candidate commitment.
    order = sorted(
        snapshot.vehicles,
        key=lambda s: priority_sort_key(s, layout.L_in, snapshot.emergency_order_priority),
    )
    committed_by_vid = dict(context.actions)

    def decide_at(v: VehicleState, ctx: CommitContext, depth: int) -> Action:
        sub_horizon = HorizonParams(T=depth, gamma=horizon.gamma)
        if k - 1 == 0:
            return level0_action(snapshot, v.id, weights, sub_horizon, memo, ctx)
        return levelk_action(snapshot, v.id, k - 1, weights, sub_horizon, memo, ctx)

    pre: list[tuple[VehicleState, Action, Traversal]] = []
    for v in order:
        if v.id == ego_id:
            break
        if v.id in committed_by_vid:
            a = committed_by_vid[v.id]
        else:
            a = decide_at(v, context_from_commitments(pre), horizon.T)
        _, trav = apply_action(v, a, layout, limits)
        pre.append((v, a, trav))
    pre_ctx = context_from_commitments(pre)

    # Safety: any vehicle that has not truly committed can still stand pat,
    # so simulated moves never release a currently occupied cell.
    table = layout.route_table
    stay_put = {
        table[v.route][v.cell_index]
        for v in snapshot.vehicles
        if v.id != ego_id and v.id not in committed_by_vid
    }
    feas_ends = pre_ctx.ends | stay_put
    options = feasible_actions(layout, ego, [t for _, _, t in pre], feas_ends, limits)

    route_cells = table[ego.route]
    box_entry = layout.box_entry_index
    box_exit = len(route_cells) - layout.L_out
    mwp = (weights.rho if ego.emergency else 1.0) * weights.w_prog

    best_value: Optional[float] = None
    best_action = options[0]
    ego_index = next(i for i, v in enumerate(order) if v.id == ego_id)
    for e in options:
        ego_after, ego_trav = apply_action(ego, e, layout, limits)
        round_commits = pre + [(ego, e, ego_trav)]
        for v in order[ego_index + 1 :]:
            ctx_v = context_from_commitments(round_commits)
            if v.id in committed_by_vid:
                a = committed_by_vid[v.id]
            else:
                a = decide_at(v, ctx_v, horizon.T)
            _, trav = apply_action(v, a, layout, limits)
            round_commits.append((v, a, trav))

        end_occ = {
            t.end_cell for s, _, t in round_commits if s.id != ego_id and t.end_cell is not None
        }
        r = mwp * len(ego_trav.cells)
        if not ego_after.exited:
            if ego_after.speed == 0:
                r -= weights.w_wait
            gap = gap_ahead(layout, end_occ, ego.route, ego_after.cell_index)
            if gap is not None and gap < limits.d_min:
                r -= weights.w_safe
            if ego_after.speed == 0 and route_cells[ego_after.cell_index] in end_occ:
                r -= weights.c_col
        if ego_after.exited or horizon.T == 1:
            value = r
        else:
            tail_value, _ = _search_best_plan(
                route_cells,
                ego_after.cell_index,
                ego_after.speed,
                ego.emergency,
                tail_schedule,
                horizon.T - 1,
                weights,
                horizon.gamma,
                limits,
                box_entry,
                box_exit,
                memo,
            )
            value = r + horizon.gamma * tail_value
        if best_value is None or value > best_value:
            best_value, best_action = value, e

    if memo.enabled and dkey is not None:
        memo.decision_cache[dkey] = best_action
    return best_action


def _base_rollout(
    snapshot: WorldSnapshot,
    level: int,
    depth: int,
    weights: PayoffWeights,
    gamma: float,
    memo: DecisionMemo,
) -> list[tuple[tuple[int, tuple[int, ...], Optional[int]], ...]]:
    """Simulate ``depth`` steps with every vehicle reasoning at ``level``.

    Within each step vehicles decide in priority order and later deciders
    must stay clear of earlier commitments, mirroring the real step loop
    (without disturbances, which deciders cannot anticipate).  Returns, per
    step, the (vehicle id, covered cells, end cell) of every move.
    """
    rkey = None
    if memo.enabled:
        rkey = (
            snapshot.key(),
            level,
            depth,
            _weights_key(weights),
            gamma,
            snapshot.limits.v_max,
            snapshot.limits.d_min,
            snapshot.emergency_order_priority,
        )
        hit = memo.rollout_cache.get(rkey)
        if hit is not None:
            return hit

    layout, limits = snapshot.layout, snapshot.limits
    flag = snapshot.emergency_order_priority
    states = list(snapshot.vehicles)
    result: list[tuple[tuple[int, tuple[int, ...], Optional[int]], ...]] = []

    for t in range(depth):
        order = sorted(states, key=lambda s: priority_sort_key(s, layout.L_in, flag))
        cur = WorldSnapshot(tuple(sorted(states, key=lambda s: s.id)), layout, limits, flag)
        horizon_t = HorizonParams(T=depth - t, gamma=gamma)
        commitments: list[tuple[VehicleState, Action, Traversal]] = []
        advanced: list[VehicleState] = []
        ctx = EMPTY_CONTEXT
        for v in order:
            if level == 0:
                a = level0_action(cur, v.id, weights, horizon_t, memo, ctx)
            else:
                a = levelk_action(cur, v.id, level, weights, horizon_t, memo, ctx)
            new_state, trav = apply_action(v, a, layout, limits)
            commitments.append((v, a, trav))
            advanced.append(new_state)
            ctx = context_from_commitments(commitments)

        moves: list[tuple[int, tuple[int, ...], Optional[int]]] = []
        next_states: list[VehicleState] = []
        for (v, a, trav), new_state in zip(commitments, advanced):
            moves.append((v.id, trav.cells, trav.end_cell))
            if not new_state.exited:
                next_states.append(new_state)
        result.append(tuple(sorted(moves)))
        states = next_states
        if not states:
            result.extend([()] * (depth - t - 1))
            break

    if memo.enabled and rkey is not None:
        memo.rollout_cache[rkey] = result
    return result


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------


def best_response_exhaustive(
    snapshot: WorldSnapshot,
    ego_id: int,
    frozen: Sequence[FrozenStep],
    weights: PayoffWeights,
    horizon: HorizonParams,
) -> Plan:
    """Exact argmax over every action sequence against a frozen schedule.

    Enumerates all |A|^T planned sequences, degrading each infeasible
    planned action to the first feasible one in canonical order, and keeps
    the executed sequence with the highest discounted payoff (ties: the
    lexicographically first executed sequence).  Deliberately slow and
    simple; used as the test oracle for the plan search.
    """
    ego = _require_ego(snapshot, ego_id)
    layout, limits = snapshot.layout, snapshot.limits
    if len(frozen) < horizon.T:
        raise ValueError("frozen schedule must cover the full horizon")
    frozen = list(frozen[: horizon.T])
    frozen = _augment_first_step(snapshot, ego_id, frozen, EMPTY_CONTEXT)
    route_cells = layout.route_table[ego.route]

    best_value: Optional[float] = None
    best_exec: Optional[Plan] = None
    for planned in itertools.product(CANONICAL_ACTIONS, repeat=horizon.T):
        state = ego
        rewards: list[float] = []
        executed: list[Action] = []
        for t, a in enumerate(planned):
            if state.exited:
                executed.append(Action.KEEP)
                rewards.append(0.0)
                continue
            step = frozen[t]
            blocker = Traversal(-1, tuple(step.covered), -1, None)
            options = feasible_actions(layout, state, [blocker], step.ends, limits)
            exec_a = a if a in options else options[0]
            executed.append(exec_a)
            state, trav = apply_action(state, exec_a, layout, limits)
            stopped = (not state.exited) and state.speed == 0
            gap_v = False
            collided = False
            if not state.exited:
                gap = gap_ahead(layout, step.ends, state.route, state.cell_index)
                gap_v = gap is not None and gap < limits.d_min
                collided = trav.cells == () and route_cells[state.cell_index] in step.ends
            rewards.append(
                stage_reward(
                    StageOutcome(len(trav.cells), stopped, gap_v, collided),
                    weights,
                    ego.emergency,
                )
            )
        value = discounted_payoff(rewards, horizon.gamma)
        exec_t = tuple(executed)
        if best_value is None or value > best_value or (
            value == best_value and best_exec is not None and exec_t < best_exec
        ):
            best_value, best_exec = value, exec_t
    assert best_exec is not None
    return best_exec


# ---------------------------------------------------------------------------
# Reverse-induction reference solver
# ---------------------------------------------------------------------------


def solve_spne(
    snapshot: WorldSnapshot,
    depth: int,
    weights: PayoffWeights,
    horizon: HorizonParams,
) -> dict[int, Plan]:
    """Backward induction on the full sequential game tree.

    Reference solver for tiny instances: at most 2 vehicles and depth <= 3.
    Within each step vehicles move in priority order, later movers observing
    earlier choices; each picks the feasible action maximizing its own
    discounted payoff over the remaining tree (ties: canonical order).
    Returns the executed action sequence per vehicle along the equilibrium
    path, padded with Keep after a vehicle exits.
    """
    if len(snapshot.vehicles) > 2:
        raise ValueError("solve_spne: at most 2 vehicles")
    if not (1 <= depth <= 3):
        raise ValueError("solve_spne: depth must be in [1, 3]")
    layout, limits = snapshot.layout, snapshot.limits
    flag = snapshot.emergency_order_priority
    gamma = horizon.gamma
    table = layout.route_table

    def stage_for(
        v: VehicleState, trav: Traversal, new_state: VehicleState, all_ends: set[int]
    ) -> float:
        stopped = (not new_state.exited) and new_state.speed == 0
        gap_v = False
        collided = False
        if not new_state.exited:
            others = all_ends - {table[new_state.route][new_state.cell_index]}
            gap = gap_ahead(layout, others, new_state.route, new_state.cell_index)
            gap_v = gap is not None and gap < limits.d_min
        return stage_reward(
            StageOutcome(len(trav.cells), stopped, gap_v, collided), weights, v.emergency
        )

    def play(states: list[VehicleState], t: int) -> tuple[dict[int, float], dict[int, list[Action]]]:
        if t > depth or not states:
            return {v.id: 0.0 for v in states}, {v.id: [] for v in states}
        order = sorted(states, key=lambda s: priority_sort_key(s, layout.L_in, flag))

        def choose(
            idx: int, commitments: list[tuple[VehicleState, Action, Traversal]]
        ) -> tuple[dict[int, float], dict[int, list[Action]]]:
            if idx == len(order):
                ends: set[int] = set()
                new_states: list[VehicleState] = []
                moved: dict[int, tuple[VehicleState, Traversal, VehicleState]] = {}
                for v, a, trav in commitments:
                    ns, _ = apply_action(v, a, layout, limits)
                    moved[v.id] = (v, trav, ns)
                    if not ns.exited:
                        new_states.append(ns)
                        ends.add(table[ns.route][ns.cell_index])
                future_pay, future_plan = play(new_states, t + 1)
                pay: dict[int, float] = {}
                plans: dict[int, list[Action]] = {}
                discount = gamma ** (t - 1)
                for v, a, trav in commitments:
                    _, trav_v, ns = moved[v.id]
                    r = stage_for(v, trav_v, ns, ends) * discount
                    pay[v.id] = r + future_pay.get(v.id, 0.0)
                    tail = future_plan.get(v.id, [])
                    if ns.exited:
                        tail = [Action.KEEP] * (depth - t)
                    plans[v.id] = [a] + tail
                return pay, plans

            mover = order[idx]
            committed_travs = [trav for _, _, trav in commitments]
            end_occ: set[int] = set()
            for v, a, trav in commitments:
                if trav.end_cell is not None:
                    end_occ.add(trav.end_cell)
            for v in order[idx + 1 :]:
                end_occ.add(table[v.route][v.cell_index])
            options = feasible_actions(layout, mover, committed_travs, end_occ, limits)
            best: Optional[tuple[dict[int, float], dict[int, list[Action]]]] = None
            for a in options:
                _, trav = apply_action(mover, a, layout, limits)
                pay, plans = choose(idx + 1, commitments + [(mover, a, trav)])
                if best is None or pay[mover.id] > best[0][mover.id]:
                    best = (pay, plans)
            assert best is not None
            return best

        return choose(0, [])

    _, plans = play(list(snapshot.vehicles), 1)
    return {vid: tuple(acts) for vid, acts in plans.items()}
