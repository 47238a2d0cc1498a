"""Shared test utilities: random state generators and config builders."""

from __future__ import annotations

import random

from crossgame.game import HorizonParams, PayoffWeights
from crossgame.policy import WorldSnapshot, make_snapshot
from crossgame.sim import ArrivalSpec, ScenarioConfig
from crossgame.world import (
    APPROACHES,
    TURNS,
    IntersectionLayout,
    KinematicLimits,
    VehicleState,
    build_layout,
)


def dyadic(rng: random.Random, lo: float, hi: float) -> float:
    """Random multiple of 1/8 in [lo, hi]; keeps float comparisons exact."""
    return rng.randrange(int(lo * 8), int(hi * 8) + 1) / 8.0


def random_vehicles(
    rng: random.Random,
    layout: IntersectionLayout,
    limits: KinematicLimits,
    n: int,
    emergency_frac: float = 0.2,
) -> list[VehicleState]:
    used: set[int] = set()
    vehicles: list[VehicleState] = []
    tries = 0
    while len(vehicles) < n and tries < 200:
        tries += 1
        route = (rng.choice(APPROACHES), rng.choice(TURNS))
        cells = layout.route_table[route]
        idx = rng.randrange(0, len(cells) - 1)
        if cells[idx] in used:
            continue
        used.add(cells[idx])
        vehicles.append(
            VehicleState(
                id=len(vehicles),
                emergency=rng.random() < emergency_frac,
                route=route,
                cell_index=idx,
                speed=rng.randint(0, limits.v_max),
                level=rng.randint(0, 2),
                spawn_step=rng.randint(0, 5),
            )
        )
    return vehicles


def random_snapshot(rng: random.Random, max_vehicles: int = 5) -> WorldSnapshot:
    layout = build_layout(rng.randint(2, 8), rng.randint(2, 8))
    limits = KinematicLimits(v_max=rng.randint(1, 3), d_min=rng.randint(0, 2))
    vehicles = random_vehicles(rng, layout, limits, rng.randint(1, max_vehicles))
    return make_snapshot(vehicles, layout, limits)


def random_params(rng: random.Random) -> tuple[PayoffWeights, HorizonParams]:
    weights = PayoffWeights(
        w_prog=dyadic(rng, 0.5, 2),
        w_wait=dyadic(rng, 0, 2),
        w_safe=dyadic(rng, 0, 8),
        c_col=dyadic(rng, 10, 100),
        rho=1.0 + dyadic(rng, 0, 2),
    )
    horizon = HorizonParams(T=rng.randint(1, 4), gamma=rng.choice([0.25, 0.5, 1.0]))
    return weights, horizon


def standard_config(seed: int, **overrides) -> ScenarioConfig:
    """The acceptance scenario: h=3, 300 steps, defaults elsewhere."""
    kw = dict(
        seed=seed,
        steps=300,
        arrival=ArrivalSpec(mode="fixed_interval", h=3),
        p_rand=0.1,
    )
    kw.update(overrides)
    return ScenarioConfig(**kw)


def small_config(seed: int, **overrides) -> ScenarioConfig:
    """A fast scenario for unit tests."""
    kw = dict(
        seed=seed,
        steps=40,
        arrival=ArrivalSpec(mode="fixed_interval", h=4),
        p_rand=0.1,
        L_in=5,
        L_out=5,
    )
    kw.update(overrides)
    return ScenarioConfig(**kw)
