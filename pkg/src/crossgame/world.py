"""Intersection geometry, vehicle kinematics, occupancy and the safety filter.

The road model is a cell lattice: each of the four approaches (N, E, S, W)
has a single entry lane of ``L_in`` cells feeding a 2x2 conflict box
(corner cells NW, NE, SW, SE), and each leg has a single exit lane of
``L_out`` cells.  A route is the full ordered cell sequence for one
(approach, turn) pair.  Cells carry global integer ids, so two routes
conflict exactly where their sequences share an id (box cells and merged
exit lanes).

Everything here is a pure function over immutable values.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import IntEnum
from typing import Iterable, Mapping, Optional

APPROACHES = ("N", "E", "S", "W")
TURNS = ("straight", "left", "right")
BOX_CORNERS = ("NW", "NE", "SW", "SE")

# Box cell sequence per (approach, turn), right-hand traffic.  The table is
# invariant under the 90-degree rotation N->E->S->W with NW->NE->SE->SW.
BOX_SEGMENTS: Mapping[tuple[str, str], tuple[str, ...]] = {
    ("S", "right"): ("SE",),
    ("S", "straight"): ("SE", "NE"),
    ("S", "left"): ("SE", "NE", "NW"),
    ("W", "right"): ("SW",),
    ("W", "straight"): ("SW", "SE"),
    ("W", "left"): ("SW", "SE", "NE"),
    ("N", "right"): ("NW",),
    ("N", "straight"): ("NW", "SW"),
    ("N", "left"): ("NW", "SW", "SE"),
    ("E", "right"): ("NE",),
    ("E", "straight"): ("NE", "NW"),
    ("E", "left"): ("NE", "NW", "SW"),
}

# Leg whose exit lane a route drains into.
EXIT_LEG: Mapping[tuple[str, str], str] = {
    ("S", "right"): "E",
    ("S", "straight"): "N",
    ("S", "left"): "W",
    ("W", "right"): "S",
    ("W", "straight"): "E",
    ("W", "left"): "N",
    ("N", "right"): "W",
    ("N", "straight"): "S",
    ("N", "left"): "E",
    ("E", "right"): "N",
    ("E", "straight"): "W",
    ("E", "left"): "S",
}


class Action(IntEnum):
    """Longitudinal action.  Enum order is the canonical tie-break order."""

    KEEP = 0
    ACCEL = 1
    DECEL = 2
    HARD_STOP = 3


CANONICAL_ACTIONS = (Action.KEEP, Action.ACCEL, Action.DECEL, Action.HARD_STOP)

_ACTION_DELTA = {Action.KEEP: 0, Action.ACCEL: 1, Action.DECEL: -1}


@dataclass(frozen=True)
class KinematicLimits:
    """Speed cap and required end-of-step gap, both in cells."""

    v_max: int = 2
    d_min: int = 1

    def __post_init__(self) -> None:
        if self.v_max < 1:
            raise ValueError("v_max: must be >= 1")
        if self.d_min < 0:
            raise ValueError("d_min: must be >= 0")


@dataclass(frozen=True)
class VehicleState:
    """One vehicle: identity, route, position along the route, speed."""

    id: int
    emergency: bool
    route: tuple[str, str]
    cell_index: int
    speed: int
    level: int
    spawn_step: int
    exited: bool = False


@dataclass(frozen=True)
class Traversal:
    """Cells newly entered by one vehicle during a step.

    ``cells`` holds exactly the on-map cells covered by the move (empty for
    a standstill); ``end_cell`` is None once the vehicle has left the map.
    """

    vehicle_id: int
    cells: tuple[int, ...]
    end_index: int
    end_cell: Optional[int]


@dataclass(frozen=True)
class IntersectionLayout:
    """Cell-discretized four-approach intersection with a 2x2 conflict box."""

    L_in: int
    L_out: int
    box_cells: Mapping[str, int]
    entry_cells: Mapping[str, tuple[int, ...]]
    exit_cells: Mapping[str, tuple[int, ...]]
    route_table: Mapping[tuple[str, str], tuple[int, ...]]
    cell_names: tuple[str, ...]

    @property
    def approaches(self) -> tuple[str, ...]:
        return APPROACHES

    @property
    def box_entry_index(self) -> int:
        """Route index of the first box cell (identical for all routes)."""
        return self.L_in

    def route_cells(self, route: tuple[str, str]) -> tuple[int, ...]:
        return self.route_table[route]

    def num_cells(self) -> int:
        return len(self.cell_names)


def build_layout(L_in: int = 10, L_out: int = 10) -> IntersectionLayout:
    """Construct the layout and the full 12-route table.

    Every route is L_in entry cells, its box segment, then L_out exit cells
    on the leg it drains into.  Entry lanes are private per approach; exit
    lanes are shared by the three routes that merge into them.
    """
    if L_in < 1:
        raise ValueError("L_in: must be >= 1")
    if L_out < 1:
        raise ValueError("L_out: must be >= 1")

    names: list[str] = []

    def alloc(name: str) -> int:
        names.append(name)
        return len(names) - 1

    entry = {
        a: tuple(alloc(f"{a}_in{i}") for i in range(L_in)) for a in APPROACHES
    }
    box = {c: alloc(f"box_{c}") for c in BOX_CORNERS}
    exits = {
        a: tuple(alloc(f"{a}_out{i}") for i in range(L_out)) for a in APPROACHES
    }

    table: dict[tuple[str, str], tuple[int, ...]] = {}
    for approach in APPROACHES:
        for turn in TURNS:
            route = (approach, turn)
            seg = tuple(box[c] for c in BOX_SEGMENTS[route])
            table[route] = entry[approach] + seg + exits[EXIT_LEG[route]]

    return IntersectionLayout(
        L_in=L_in,
        L_out=L_out,
        box_cells=box,
        entry_cells=entry,
        exit_cells=exits,
        route_table=table,
        cell_names=tuple(names),
    )


def resulting_speed(speed: int, action: Action, limits: KinematicLimits) -> int:
    """Speed after applying an action; HardStop forces exactly 0."""
    if action is Action.HARD_STOP:
        return 0
    return max(0, min(speed + _ACTION_DELTA[action], limits.v_max))


def traversal_for(
    layout: IntersectionLayout,
    state: VehicleState,
    new_speed: int,
) -> Traversal:
    """Cells covered when ``state`` advances by ``new_speed`` cells.

    Overshooting the route end is allowed; the cell list is truncated at the
    last route cell and ``end_cell`` becomes None (vehicle off map).
    """
    cells = layout.route_table[state.route]
    end_index = state.cell_index + new_speed
    covered = cells[state.cell_index + 1 : end_index + 1]
    end_cell = cells[end_index] if end_index < len(cells) else None
    return Traversal(
        vehicle_id=state.id,
        cells=covered,
        end_index=end_index,
        end_cell=end_cell,
    )


def apply_action(
    state: VehicleState,
    action: Action,
    layout: IntersectionLayout,
    limits: KinematicLimits,
) -> tuple[VehicleState, Traversal]:
    """Advance one vehicle by one step.  Total on all non-exited states."""
    if state.exited:
        raise ValueError(f"vehicle {state.id} has already exited")
    new_speed = resulting_speed(state.speed, action, limits)
    trav = traversal_for(layout, state, new_speed)
    exited = trav.end_index >= len(layout.route_table[state.route])
    new_state = replace(
        state, cell_index=trav.end_index, speed=new_speed, exited=exited
    )
    return new_state, trav


def gap_ahead(
    layout: IntersectionLayout,
    occupied: frozenset[int] | set[int],
    route: tuple[str, str],
    cell_index: int,
) -> Optional[int]:
    """Empty cells between ``cell_index`` and the nearest occupied cell
    strictly ahead on the route.  None means open road."""
    cells = layout.route_table[route]
    for i in range(cell_index + 1, len(cells)):
        if cells[i] in occupied:
            return i - cell_index - 1
    return None


def vehicle_gap_ahead(
    layout: IntersectionLayout,
    occupied: frozenset[int] | set[int],
    vehicle: VehicleState,
) -> Optional[int]:
    return gap_ahead(layout, occupied, vehicle.route, vehicle.cell_index)


def feasible_actions(
    layout: IntersectionLayout,
    vehicle: VehicleState,
    committed: Iterable[Traversal],
    end_occupancy: frozenset[int] | set[int],
    limits: KinematicLimits,
) -> tuple[Action, ...]:
    """Actions safe against committed moves and predicted end positions.

    A moving action is feasible iff (a) its covered cells avoid every
    committed traversal cell, (b) they avoid every predicted end cell,
    (c) the end-of-step gap to the nearest predicted end cell ahead is at
    least d_min, and (d) when the move crosses into the conflict box, the
    vehicle's whole box segment is clear of predicted end occupancy (the
    "don't block the box" rule; it keeps waits across the box acyclic).
    Standstill actions are always feasible, so the result is never empty
    (HardStop is always a member).  Returned in canonical order.
    """
    committed_cells: set[int] = set()
    for trav in committed:
        committed_cells.update(trav.cells)

    route_cells = layout.route_table[vehicle.route]
    box_entry = layout.box_entry_index
    box_exit = len(route_cells) - layout.L_out  # first exit-lane index
    out: list[Action] = []
    for action in CANONICAL_ACTIONS:
        new_speed = resulting_speed(vehicle.speed, action, limits)
        if new_speed == 0:
            out.append(action)
            continue
        end_index = vehicle.cell_index + new_speed
        covered = route_cells[vehicle.cell_index + 1 : end_index + 1]
        if any(c in committed_cells for c in covered):
            continue
        if any(c in end_occupancy for c in covered):
            continue
        if end_index < len(route_cells):
            # d_min applies to the moved-into position only.
            blocked = False
            for i in range(end_index + 1, min(end_index + 1 + limits.d_min, len(route_cells))):
                if route_cells[i] in end_occupancy:
                    blocked = True
                    break
            if blocked:
                continue
        if vehicle.cell_index < box_entry <= end_index and any(
            route_cells[i] in end_occupancy for i in range(box_entry, box_exit)
        ):
            continue
        out.append(action)
    return tuple(out)


def detect_collisions(traversals: Iterable[Traversal]) -> set[tuple[int, int]]:
    """Vehicle-id pairs whose covered cells intersect or end cells coincide."""
    pairs: set[tuple[int, int]] = set()
    cell_owners: dict[int, list[int]] = {}
    end_owners: dict[int, list[int]] = {}
    for trav in traversals:
        for c in trav.cells:
            cell_owners.setdefault(c, []).append(trav.vehicle_id)
        if trav.end_cell is not None:
            end_owners.setdefault(trav.end_cell, []).append(trav.vehicle_id)
    for owners in list(cell_owners.values()) + list(end_owners.values()):
        if len(owners) > 1:
            uniq = sorted(set(owners))
            for i in range(len(uniq)):
                for j in range(i + 1, len(uniq)):
                    pairs.add((uniq[i], uniq[j]))
    return pairs


def priority_sort_key(
    state: VehicleState,
    L_in: int,
    emergency_order_priority: bool,
) -> tuple[int, int, int, int, int]:
    """Ascending sort key for the per-step decision order.

    Components: emergency rank, signed distance to the box entry (negative
    once inside or past the box), spawn step, approach index (N<E<S<W), id.
    """
    rank = 0 if (emergency_order_priority and state.emergency) else 1
    dist = L_in - 1 - state.cell_index
    return (rank, dist, state.spawn_step, APPROACHES.index(state.route[0]), state.id)
