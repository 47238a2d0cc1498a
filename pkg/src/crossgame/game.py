"""Per-step payoff and its discounted accumulation over the lookahead.

The stage reward is a weighted linear combination of the step observables:
progress earns, waiting / tailgating / colliding cost.  Emergency vehicles
scale their progress term by ``rho``, which is what makes clearing the way
for them collectively rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class PayoffWeights:
    """Stage-reward weights.  All nonnegative; rho >= 1."""

    w_prog: float = 1.0
    w_wait: float = 0.5
    w_safe: float = 5.0
    c_col: float = 100.0
    rho: float = 3.0

    def __post_init__(self) -> None:
        for name in ("w_prog", "w_wait", "w_safe", "c_col"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name}: must be >= 0")
        if self.rho < 1:
            raise ValueError("rho: must be >= 1")


@dataclass(frozen=True)
class HorizonParams:
    """Lookahead depth T and discount factor gamma in (0, 1]."""

    T: int = 4
    gamma: float = 0.5

    def __post_init__(self) -> None:
        if self.T < 1:
            raise ValueError("T: must be >= 1")
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError("gamma: must be in (0, 1]")


@dataclass(frozen=True)
class StageOutcome:
    """Observables of one vehicle over one step."""

    cells_advanced: int
    stopped: bool
    gap_violation: bool
    collided: bool


def stage_reward(
    outcome: StageOutcome, weights: PayoffWeights, emergency: bool
) -> float:
    """m*w_prog*advance - w_wait*[stopped] - w_safe*[gap] - c_col*[collided]."""
    m = weights.rho if emergency else 1.0
    r = m * weights.w_prog * outcome.cells_advanced
    if outcome.stopped:
        r -= weights.w_wait
    if outcome.gap_violation:
        r -= weights.w_safe
    if outcome.collided:
        r -= weights.c_col
    return r


def discounted_payoff(rewards: Sequence[float], gamma: float) -> float:
    """Sum of gamma^(t-1) * r_t; the first lookahead step is undiscounted."""
    if not rewards:
        raise ValueError("rewards: must contain at least one stage")
    total = 0.0
    factor = 1.0
    for r in rewards:
        total += factor * r
        factor *= gamma
    return total
