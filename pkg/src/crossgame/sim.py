"""The simulation loop: arrivals, priority-ordered decisions, disturbances,
simultaneous motion, collision audit and metrics.

Determinism contract: a run is a pure function of (config, initial vehicles).
One ``random.Random(seed)`` stream is consumed in a fixed, documented order:
first the entire arrival schedule is drawn up front (steps ascending, then
approaches N, E, S, W; per arrival: route turn, class, level), then during
each step one disturbance draw per active vehicle in priority order.
Drawing arrivals up front keeps the arrival pattern of paired seeds
identical across disturbance settings.
"""

from __future__ import annotations

import json
import random
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .game import HorizonParams, PayoffWeights
from .policy import (
    DecisionMemo,
    WorldSnapshot,
    context_from_commitments,
    levelk_action,
    K_MAX,
)
from .world import (
    APPROACHES,
    Action,
    KinematicLimits,
    Traversal,
    TURNS,
    VehicleState,
    apply_action,
    build_layout,
    detect_collisions,
    feasible_actions,
    gap_ahead,
    priority_sort_key,
    resulting_speed,
)

CONFIG_SCHEMA = "crossgame-config/1"
TRACE_SCHEMA = "crossgame-trace/1"


class ConfigError(ValueError):
    """Invalid scenario configuration; message starts with the field name."""


class CollisionError(RuntimeError):
    """A step produced overlapping traversals: an implementation bug.

    Carries the trace recorded so far (including the fatal step) so the
    caller can dump a diagnostic trace.
    """

    def __init__(self, step: int, pairs: set[tuple[int, int]], records: list["StepRecord"]):
        super().__init__(f"collision at step {step}: {sorted(pairs)}")
        self.step = step
        self.pairs = pairs
        self.records = records


@dataclass(frozen=True)
class ArrivalSpec:
    """Arrival process per approach: periodic or Bernoulli."""

    mode: str = "fixed_interval"
    h: int = 4
    rate: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in ("fixed_interval", "bernoulli"):
            raise ConfigError("arrival.mode: must be 'fixed_interval' or 'bernoulli'")
        if self.mode == "fixed_interval" and self.h < 1:
            raise ConfigError("arrival.h: must be >= 1")
        if not (0.0 <= self.rate <= 1.0):
            raise ConfigError("arrival.rate: must be in [0, 1]")


def _default_level_mix() -> dict[int, float]:
    return {1: 1.0}


def _default_route_probs() -> dict[str, float]:
    return {"straight": 0.5, "left": 0.25, "right": 0.25}


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete experiment input; see ``config_from_dict`` for the JSON form."""

    seed: int = 0
    steps: int = 300
    limits: KinematicLimits = field(default_factory=KinematicLimits)
    weights: PayoffWeights = field(default_factory=PayoffWeights)
    horizon: HorizonParams = field(default_factory=HorizonParams)
    level_mix: Mapping[int, float] = field(default_factory=_default_level_mix)
    arrival: ArrivalSpec = field(default_factory=ArrivalSpec)
    route_probs: Mapping[str, float] = field(default_factory=_default_route_probs)
    p_rand: float = 0.1
    emergency_prob: float = 0.05
    emergency_order_priority: bool = True
    L_in: int = 10
    L_out: int = 10

    def __post_init__(self) -> None:
        if self.steps < 0:
            raise ConfigError("steps: must be >= 0")
        if not (0.0 <= self.p_rand <= 1.0):
            raise ConfigError("p_rand: must be in [0, 1]")
        if not (0.0 <= self.emergency_prob <= 1.0):
            raise ConfigError("emergency_prob: must be in [0, 1]")
        if self.L_in < 1:
            raise ConfigError("L_in: must be >= 1")
        if self.L_out < 1:
            raise ConfigError("L_out: must be >= 1")
        if not self.level_mix:
            raise ConfigError("level_mix: must not be empty")
        for k, p in self.level_mix.items():
            if not (0 <= k <= K_MAX):
                raise ConfigError(f"level_mix: level {k} outside [0, {K_MAX}]")
            if p < 0:
                raise ConfigError("level_mix: probabilities must be >= 0")
        if abs(sum(self.level_mix.values()) - 1.0) > 1e-9:
            raise ConfigError("level_mix: probabilities must sum to 1")
        if set(self.route_probs) != set(TURNS):
            raise ConfigError("route_probs: keys must be exactly straight/left/right")
        for t, p in self.route_probs.items():
            if p < 0:
                raise ConfigError(f"route_probs.{t}: must be >= 0")
        if abs(sum(self.route_probs.values()) - 1.0) > 1e-9:
            raise ConfigError("route_probs: probabilities must sum to 1")

    def to_dict(self) -> dict:
        return {
            "schema": CONFIG_SCHEMA,
            "seed": self.seed,
            "steps": self.steps,
            "limits": {"v_max": self.limits.v_max, "d_min": self.limits.d_min},
            "weights": {
                "w_prog": self.weights.w_prog,
                "w_wait": self.weights.w_wait,
                "w_safe": self.weights.w_safe,
                "c_col": self.weights.c_col,
                "rho": self.weights.rho,
            },
            "horizon": {"T": self.horizon.T, "gamma": self.horizon.gamma},
            "level_mix": {str(k): self.level_mix[k] for k in sorted(self.level_mix)},
            "arrival": (
                {"mode": "fixed_interval", "h": self.arrival.h}
                if self.arrival.mode == "fixed_interval"
                else {"mode": "bernoulli", "rate": self.arrival.rate}
            ),
            "route_probs": {t: self.route_probs[t] for t in TURNS},
            "p_rand": self.p_rand,
            "emergency_prob": self.emergency_prob,
            "emergency_order_priority": self.emergency_order_priority,
            "L_in": self.L_in,
            "L_out": self.L_out,
        }


def _require_keys(d: Mapping, allowed: set[str], where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"{where}{'.' if where else ''}{sorted(unknown)[0]}: unknown field")


def _get_num(d: Mapping, key: str, where: str, default):
    val = d.get(key, default)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{where}{key}: must be a number")
    return val


def _get_int(d: Mapping, key: str, where: str, default):
    val = d.get(key, default)
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{where}{key}: must be an integer")
    return val


def config_from_dict(data: Mapping) -> ScenarioConfig:
    """Parse and validate the JSON form of a scenario.  Fail-closed: the
    schema field is required and unknown fields anywhere are rejected."""
    if not isinstance(data, Mapping):
        raise ConfigError("config: must be a JSON object")
    if data.get("schema") != CONFIG_SCHEMA:
        raise ConfigError(f"schema: must be '{CONFIG_SCHEMA}'")
    _require_keys(
        dict(data),
        {
            "schema",
            "seed",
            "steps",
            "limits",
            "weights",
            "horizon",
            "level_mix",
            "arrival",
            "route_probs",
            "p_rand",
            "emergency_prob",
            "emergency_order_priority",
            "L_in",
            "L_out",
        },
        "",
    )
    try:
        limits_d = data.get("limits", {})
        _require_keys(limits_d, {"v_max", "d_min"}, "limits")
        limits = KinematicLimits(
            v_max=_get_int(limits_d, "v_max", "limits.", 2),
            d_min=_get_int(limits_d, "d_min", "limits.", 1),
        )
        weights_d = data.get("weights", {})
        _require_keys(weights_d, {"w_prog", "w_wait", "w_safe", "c_col", "rho"}, "weights")
        weights = PayoffWeights(
            w_prog=float(_get_num(weights_d, "w_prog", "weights.", 1.0)),
            w_wait=float(_get_num(weights_d, "w_wait", "weights.", 0.5)),
            w_safe=float(_get_num(weights_d, "w_safe", "weights.", 5.0)),
            c_col=float(_get_num(weights_d, "c_col", "weights.", 100.0)),
            rho=float(_get_num(weights_d, "rho", "weights.", 3.0)),
        )
        horizon_d = data.get("horizon", {})
        _require_keys(horizon_d, {"T", "gamma"}, "horizon")
        horizon = HorizonParams(
            T=_get_int(horizon_d, "T", "horizon.", 4),
            gamma=float(_get_num(horizon_d, "gamma", "horizon.", 0.5)),
        )
        mix_d = data.get("level_mix", {"1": 1.0})
        level_mix: dict[int, float] = {}
        for key, prob in mix_d.items():
            try:
                k = int(key)
            except (TypeError, ValueError):
                raise ConfigError(f"level_mix.{key}: level must be an integer")
            level_mix[k] = float(prob)
        arrival_d = data.get("arrival", {"mode": "fixed_interval", "h": 4})
        _require_keys(arrival_d, {"mode", "h", "rate"}, "arrival")
        mode = arrival_d.get("mode", "fixed_interval")
        arrival = ArrivalSpec(
            mode=mode,
            h=_get_int(arrival_d, "h", "arrival.", 4),
            rate=float(_get_num(arrival_d, "rate", "arrival.", 0.0)),
        )
        if mode == "bernoulli" and "rate" not in arrival_d:
            raise ConfigError("arrival.rate: required for bernoulli mode")
        route_d = data.get("route_probs", _default_route_probs())
        _require_keys(route_d, set(TURNS), "route_probs")
        route_probs = {t: float(_get_num(route_d, t, "route_probs.", 0.0)) for t in TURNS}
        return ScenarioConfig(
            seed=_get_int(data, "seed", "", 0),
            steps=_get_int(data, "steps", "", 300),
            limits=limits,
            weights=weights,
            horizon=horizon,
            level_mix=level_mix,
            arrival=arrival,
            route_probs=route_probs,
            p_rand=float(_get_num(data, "p_rand", "", 0.1)),
            emergency_prob=float(_get_num(data, "emergency_prob", "", 0.05)),
            emergency_order_priority=bool(data.get("emergency_order_priority", True)),
            L_in=_get_int(data, "L_in", "", 10),
            L_out=_get_int(data, "L_out", "", 10),
        )
    except ConfigError:
        raise
    except ValueError as exc:  # bounds raised by the dataclasses
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Step records and metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VehicleStepRecord:
    state_before: VehicleState
    chosen: Action
    executed: Action
    disturbed: bool
    advanced: int


@dataclass(frozen=True)
class StepRecord:
    step: int
    vehicles: tuple[VehicleStepRecord, ...]
    spawns: tuple[tuple[int, int], ...]  # (id, scheduled arrival step)
    exits: tuple[tuple[int, int, bool], ...]  # (id, travel time, emergency)
    collisions: tuple[tuple[int, int], ...]
    queue_len: Mapping[str, int]
    backlog: Mapping[str, int]


@dataclass(frozen=True)
class MetricsSummary:
    steps: int
    spawned: int
    exited: int
    remaining: int
    backlog: int
    collisions: int
    mean_travel_time: Optional[float]
    median_travel_time: Optional[float]
    mean_travel_time_normal: Optional[float]
    mean_travel_time_emergency: Optional[float]
    mean_speed: float
    throughput: float
    mean_queue_len: float
    max_queue_len: int

    def to_dict(self) -> dict:
        return {
            "schema": TRACE_SCHEMA,
            "steps": self.steps,
            "spawned": self.spawned,
            "exited": self.exited,
            "remaining": self.remaining,
            "backlog": self.backlog,
            "collisions": self.collisions,
            "mean_travel_time": self.mean_travel_time,
            "median_travel_time": self.median_travel_time,
            "mean_travel_time_normal": self.mean_travel_time_normal,
            "mean_travel_time_emergency": self.mean_travel_time_emergency,
            "mean_speed": self.mean_speed,
            "throughput": self.throughput,
            "mean_queue_len": self.mean_queue_len,
            "max_queue_len": self.max_queue_len,
        }


METRIC_FIELDS = (
    "steps",
    "spawned",
    "exited",
    "remaining",
    "backlog",
    "collisions",
    "mean_travel_time",
    "median_travel_time",
    "mean_travel_time_normal",
    "mean_travel_time_emergency",
    "mean_speed",
    "throughput",
    "mean_queue_len",
    "max_queue_len",
)


def collect_metrics(records: Sequence[StepRecord], steps: Optional[int] = None) -> MetricsSummary:
    """Aggregate a trace.  Travel time includes backlog wait; queue length is
    stopped-on-entry plus backlog, summed over approaches."""
    n_steps = steps if steps is not None else len(records)
    travel: list[int] = []
    travel_normal: list[int] = []
    travel_emergency: list[int] = []
    placed = 0
    advanced_total = 0
    vehicle_steps = 0
    queue_series: list[int] = []
    collisions = 0
    final_backlog = 0
    for rec in records:
        placed += len(rec.spawns)
        collisions += len(rec.collisions)
        for ventry in rec.vehicles:
            advanced_total += ventry.advanced
            vehicle_steps += 1
        for _, tt, emergency in rec.exits:
            travel.append(tt)
            (travel_emergency if emergency else travel_normal).append(tt)
        queue_series.append(
            sum(rec.queue_len.values()) + sum(rec.backlog.values())
        )
        final_backlog = sum(rec.backlog.values())
    exited = len(travel)

    def _mean(xs: list[int]) -> Optional[float]:
        return sum(xs) / len(xs) if xs else None

    return MetricsSummary(
        steps=n_steps,
        spawned=placed + final_backlog,
        exited=exited,
        remaining=placed - exited,
        backlog=final_backlog,
        collisions=collisions,
        mean_travel_time=_mean(travel),
        median_travel_time=statistics.median(travel) if travel else None,
        mean_travel_time_normal=_mean(travel_normal),
        mean_travel_time_emergency=_mean(travel_emergency),
        mean_speed=advanced_total / vehicle_steps if vehicle_steps else 0.0,
        throughput=exited / n_steps if n_steps else 0.0,
        mean_queue_len=sum(queue_series) / len(queue_series) if queue_series else 0.0,
        max_queue_len=max(queue_series) if queue_series else 0,
    )


# ---------------------------------------------------------------------------
# Arrivals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PendingVehicle:
    id: int
    route: tuple[str, str]
    emergency: bool
    level: int
    scheduled_step: int


def priority_order(
    vehicles: Sequence[VehicleState], L_in: int, emergency_order_priority: bool = True
) -> list[int]:
    """Decision order for one step: emergency class first (when enabled),
    then proximity to the box, arrival time, approach (N<E<S<W), id."""
    ordered = sorted(
        vehicles, key=lambda v: priority_sort_key(v, L_in, emergency_order_priority)
    )
    return [v.id for v in ordered]


def apply_disturbance(
    chosen: Action,
    speed: int,
    p_rand: float,
    rng: random.Random,
    limits: KinematicLimits,
) -> tuple[Action, bool]:
    """Random slowdown: with probability p_rand the executed action becomes
    Decel, except it never yields a higher speed than the chosen action
    (a disturbance may only slow down, which keeps it safe)."""
    disturbed = rng.random() < p_rand
    if not disturbed:
        return chosen, False
    if resulting_speed(speed, Action.DECEL, limits) <= resulting_speed(speed, chosen, limits):
        return Action.DECEL, True
    return chosen, True


def draw_arrival_schedule(
    config: ScenarioConfig, rng: random.Random, first_id: int
) -> dict[tuple[int, str], list[PendingVehicle]]:
    """Pre-draw every arrival for the whole run (steps ascending, approaches
    N,E,S,W; per arrival: turn, class, level)."""
    schedule: dict[tuple[int, str], list[PendingVehicle]] = {}
    turn_items = [(t, config.route_probs[t]) for t in TURNS]
    level_items = sorted(config.level_mix.items())
    next_id = first_id
    for step in range(1, config.steps + 1):
        for approach in APPROACHES:
            if config.arrival.mode == "fixed_interval":
                due = step % config.arrival.h == 0
            else:
                due = rng.random() < config.arrival.rate
            if not due:
                continue
            u = rng.random()
            turn = turn_items[-1][0]
            acc = 0.0
            for t_name, p in turn_items:
                acc += p
                if u < acc:
                    turn = t_name
                    break
            emergency = rng.random() < config.emergency_prob
            u = rng.random()
            level = level_items[-1][0]
            acc = 0.0
            for lvl, p in level_items:
                acc += p
                if u < acc:
                    level = lvl
                    break
            schedule.setdefault((step, approach), []).append(
                PendingVehicle(next_id, (approach, turn), emergency, level, step)
            )
            next_id += 1
    return schedule


# ---------------------------------------------------------------------------
# The simulation proper
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    config: ScenarioConfig
    records: list[StepRecord]
    summary: MetricsSummary


class Simulation:
    """Mutable run state; one instance per run, strictly single-threaded."""

    def __init__(
        self, config: ScenarioConfig, initial_vehicles: Sequence[VehicleState] = ()
    ) -> None:
        self.config = config
        self.layout = build_layout(config.L_in, config.L_out)
        self.rng = random.Random(config.seed)
        self.memo = DecisionMemo()
        self.active: list[VehicleState] = sorted(initial_vehicles, key=lambda v: v.id)
        for v in self.active:
            if v.exited:
                raise ValueError("initial vehicles must be active")
        first_id = max((v.id for v in self.active), default=-1) + 1
        self.arrivals = draw_arrival_schedule(config, self.rng, first_id)
        self.backlog: dict[str, list[PendingVehicle]] = {a: [] for a in APPROACHES}
        self.records: list[StepRecord] = []
        self.step_index = 0
        self.scheduled_count = len(self.active)
        self.placed_count = len(self.active)
        self.exited_count = 0

    def _occupied_cells(self) -> set[int]:
        table = self.layout.route_table
        return {table[v.route][v.cell_index] for v in self.active}

    def _enqueue_backlog(self, approach: str, pending: PendingVehicle) -> None:
        """FIFO within class; emergencies go ahead of normal vehicles when
        class order priority is on (they bypass the waiting line)."""
        queue = self.backlog[approach]
        if self.config.emergency_order_priority and pending.emergency:
            pos = len(queue)
            for i, other in enumerate(queue):
                if not other.emergency:
                    pos = i
                    break
            queue.insert(pos, pending)
        else:
            queue.append(pending)

    def step(self) -> StepRecord:
        """One simulation step; raises CollisionError on a safety violation."""
        self.step_index += 1
        t = self.step_index
        cfg = self.config
        layout, limits = self.layout, cfg.limits
        flag = cfg.emergency_order_priority

        order = sorted(
            self.active, key=lambda v: priority_sort_key(v, layout.L_in, flag)
        )
        snapshot = WorldSnapshot(tuple(self.active), layout, limits, flag)

        commitments: list[tuple[VehicleState, Action, Traversal]] = []
        ventries: list[tuple[VehicleState, Action, Action, bool, Traversal, VehicleState]] = []
        ctx_commit: list[tuple[VehicleState, Action, Traversal]] = []
        undecided = {v.id for v in order}
        table = layout.route_table
        for v in order:
            ctx = context_from_commitments(ctx_commit)
            chosen = levelk_action(
                snapshot, v.id, v.level, cfg.weights, cfg.horizon, self.memo, ctx
            )
            # Re-filter against the committed moves.  Decisions are already
            # feasibility-constrained, so this is a no-op unless the policy
            # is broken (a property test pins that down).
            undecided.discard(v.id)
            end_occ = set(ctx.ends)
            for other in order:
                if other.id in undecided:
                    end_occ.add(table[other.route][other.cell_index])
            options = feasible_actions(
                layout, v, [trav for _, _, trav in ctx_commit], end_occ, limits
            )
            if chosen not in options:
                chosen = options[0]
            executed, disturbed = apply_disturbance(
                chosen, v.speed, cfg.p_rand, self.rng, limits
            )
            new_state, trav = apply_action(v, executed, layout, limits)
            commitments.append((v, executed, trav))
            ctx_commit.append((v, executed, trav))
            ventries.append((v, chosen, executed, disturbed, trav, new_state))

        collisions = detect_collisions([trav for _, _, trav in commitments])

        exits: list[tuple[int, int, bool]] = []
        next_active: list[VehicleState] = []
        for v, chosen, executed, disturbed, trav, new_state in ventries:
            if new_state.exited:
                exits.append((v.id, t - v.spawn_step + 1, v.emergency))
                self.exited_count += 1
            else:
                next_active.append(new_state)
        self.active = sorted(next_active, key=lambda v: v.id)

        spawned: list[tuple[int, int]] = []
        if not collisions:
            occupied = self._occupied_cells()
            for approach in APPROACHES:
                for pending in self.arrivals.get((t, approach), ()):
                    self._enqueue_backlog(approach, pending)
                    self.scheduled_count += 1
                queue = self.backlog[approach]
                while queue:
                    head = queue[0]
                    cell0 = layout.entry_cells[approach][0]
                    if cell0 in occupied:
                        break
                    gap = gap_ahead(layout, occupied, head.route, 0)
                    if gap is not None and gap < limits.d_min:
                        break
                    queue.pop(0)
                    state = VehicleState(
                        id=head.id,
                        emergency=head.emergency,
                        route=head.route,
                        cell_index=0,
                        speed=1,
                        level=head.level,
                        spawn_step=head.scheduled_step,
                        exited=False,
                    )
                    self.active.append(state)
                    occupied.add(cell0)
                    spawned.append((head.id, head.scheduled_step))
                    self.placed_count += 1
            self.active.sort(key=lambda v: v.id)

        queue_len = {}
        for approach in APPROACHES:
            entry_set = set(layout.entry_cells[approach])
            queue_len[approach] = sum(
                1
                for v in self.active
                if v.speed == 0 and table[v.route][v.cell_index] in entry_set
            )
        backlog_len = {a: len(self.backlog[a]) for a in APPROACHES}

        record = StepRecord(
            step=t,
            vehicles=tuple(
                VehicleStepRecord(v, chosen, executed, disturbed, len(trav.cells))
                for v, chosen, executed, disturbed, trav, _ in ventries
            ),
            spawns=tuple(spawned),
            exits=tuple(exits),
            collisions=tuple(sorted(collisions)),
            queue_len=queue_len,
            backlog=backlog_len,
        )
        self.records.append(record)

        # Conservation audit: every scheduled vehicle is placed or pending.
        assert self.scheduled_count == self.placed_count + sum(backlog_len.values())
        assert self.placed_count == self.exited_count + len(self.active)

        if collisions:
            raise CollisionError(t, collisions, self.records)
        return record

    def run(self) -> RunResult:
        for _ in range(self.config.steps):
            self.step()
        return RunResult(
            config=self.config,
            records=self.records,
            summary=collect_metrics(self.records, self.config.steps),
        )


def run(config: ScenarioConfig, initial_vehicles: Sequence[VehicleState] = ()) -> RunResult:
    """Run ``config.steps`` steps from an empty intersection (or the given
    pre-seeded vehicles).  Deterministic given (config, initial vehicles)."""
    return Simulation(config, initial_vehicles).run()


# ---------------------------------------------------------------------------
# Trace serialization
# ---------------------------------------------------------------------------


def _route_str(route: tuple[str, str]) -> str:
    return f"{route[0]}-{route[1]}"


def record_to_dict(record: StepRecord) -> dict:
    return {
        "step": record.step,
        "vehicles": [
            {
                "id": ve.state_before.id,
                "class": "emergency" if ve.state_before.emergency else "normal",
                "route": _route_str(ve.state_before.route),
                "cell_index": ve.state_before.cell_index,
                "speed": ve.state_before.speed,
                "level": ve.state_before.level,
                "chosen": ve.chosen.name.lower(),
                "executed": ve.executed.name.lower(),
                "disturbed": ve.disturbed,
                "advanced": ve.advanced,
            }
            for ve in record.vehicles
        ],
        "spawns": [{"id": i, "arrival_step": s} for i, s in record.spawns],
        "exits": [
            {"id": i, "travel_time": tt, "class": "emergency" if em else "normal"}
            for i, tt, em in record.exits
        ],
        "collisions": [list(p) for p in record.collisions],
        "queue_len": dict(record.queue_len),
        "backlog": dict(record.backlog),
    }


def trace_lines(config: ScenarioConfig, records: Sequence[StepRecord]) -> list[str]:
    """JSONL trace: a header line, then one line per step."""
    dump = lambda obj: json.dumps(obj, sort_keys=True, separators=(",", ":"))
    lines = [dump({"schema": TRACE_SCHEMA, "config": config.to_dict()})]
    lines.extend(dump(record_to_dict(r)) for r in records)
    return lines


def summary_json(summary: MetricsSummary) -> str:
    return json.dumps(summary.to_dict(), sort_keys=True, indent=2) + "\n"
