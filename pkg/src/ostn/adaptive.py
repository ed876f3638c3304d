"""QoS-constrained choice of the power-splitting factor mu."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError
from .system import NetworkConfig

MU_EDGE = 1e-6
RESIDUAL_TOL = 1e-3


class MuStatus(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class MuSolution:
    status: MuStatus
    mu_star: float | None
    achieved_op_sat: float
    iterations: int

    @property
    def feasible(self) -> bool:
        return self.status is MuStatus.FEASIBLE


def feasible_mu_range(gamma_p: float) -> tuple[float, float]:
    if gamma_p < 0:
        raise ConfigurationError("gamma_p must be nonnegative")
    return gamma_p / (1.0 + gamma_p), 1.0


def solve_mu(cfg: NetworkConfig, epsilon: float,
             evaluator: Callable[[NetworkConfig], float] | None = None,
             tol: float = RESIDUAL_TOL) -> MuSolution:
    """Largest-IoT-share mu meeting op_sat(mu) <= epsilon, taken at equality.

    op_sat decreases in mu, so the smallest admissible mu solves
    op_sat(mu) = epsilon.  Bisection runs after an 8-point monotonicity probe;
    a failed probe switches to a refined grid search.
    """
    if not 0.0 < epsilon <= 1.0:
        raise ConfigurationError("epsilon must lie in (0, 1]")
    if evaluator is None:
        from .analysis import op_sat_lb as evaluator
    lo, _ = feasible_mu_range(cfg.gamma_p)
    a, b = lo + MU_EDGE, 1.0 - MU_EDGE

    def op(mu: float) -> float:
        return float(evaluator(cfg.with_mu(mu)))

    calls = 0
    f_b = op(b)
    calls += 1
    if f_b > epsilon:
        return MuSolution(MuStatus.INFEASIBLE, None, f_b, calls)
    f_a = op(a)
    calls += 1
    if f_a <= epsilon:
        return MuSolution(MuStatus.FEASIBLE, a, f_a, calls)

    probe = np.linspace(a, b, 8)
    vals = [f_a] + [op(m) for m in probe[1:-1]] + [f_b]
    calls += 6
    if any(v2 > v1 + 1e-12 for v1, v2 in zip(vals, vals[1:])):
        return _grid_refine(op, epsilon, a, b, tol, calls)

    # bracket from the probe, then bisect keeping op(hi) <= epsilon < op(lo)
    i = next(k for k, v in enumerate(vals) if v <= epsilon)
    lo_m, hi_m = probe[i - 1], probe[i]
    f_hi = vals[i]
    while calls < 200:
        if epsilon - f_hi <= tol * 0.1 or hi_m - lo_m < 1e-13:
            break
        mid = 0.5 * (lo_m + hi_m)
        f_mid = op(mid)
        calls += 1
        if f_mid <= epsilon:
            hi_m, f_hi = mid, f_mid
        else:
            lo_m = mid
    return MuSolution(MuStatus.FEASIBLE, float(hi_m), f_hi, calls)


def _grid_refine(op, epsilon, a, b, tol, calls) -> MuSolution:
    # smallest grid mu with op <= epsilon, zooming into the crossing cell
    for _ in range(12):
        grid = np.linspace(a, b, 33)
        vals = [op(m) for m in grid]
        calls += len(grid)
        ok = [k for k, v in enumerate(vals) if v <= epsilon]
        k = ok[0]
        best, f_best = grid[k], vals[k]
        if k == 0 or epsilon - f_best <= tol * 0.1:
            return MuSolution(MuStatus.FEASIBLE, float(best), f_best, calls)
        a, b = grid[k - 1], grid[k]
    return MuSolution(MuStatus.FEASIBLE, float(best), f_best, calls)
