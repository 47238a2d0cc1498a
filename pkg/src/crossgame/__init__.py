"""Level-k game simulation of an unsignalized four-way intersection."""

from .game import HorizonParams, PayoffWeights, StageOutcome, discounted_payoff, stage_reward
from .policy import (
    K_MAX,
    DecisionMemo,
    FrozenStep,
    Plan,
    WorldSnapshot,
    best_response_exhaustive,
    constant_speed_schedule,
    level0_action,
    levelk_action,
    make_snapshot,
    solve_spne,
)
from .sim import (
    CollisionError,
    ConfigError,
    MetricsSummary,
    RunResult,
    ScenarioConfig,
    Simulation,
    StepRecord,
    apply_disturbance,
    collect_metrics,
    config_from_dict,
    priority_order,
    run,
)
from .world import (
    Action,
    CANONICAL_ACTIONS,
    IntersectionLayout,
    KinematicLimits,
    Traversal,
    VehicleState,
    apply_action,
    build_layout,
    detect_collisions,
    feasible_actions,
    gap_ahead,
)

__version__ = "0.1.0"
