"""
Nelder-Mead simplex minimization with restarts.

Wraps ``scipy.optimize.minimize(method="Nelder-Mead")`` with a scale-aware
initial simplex, a +inf barrier for non-finite objective values, and
restarts from the incumbent once a run converges.
"""

import math
import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, minimize

from .errors import DomainError, StartPointError

# Set up logging
logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]


@dataclass(frozen=True)
class NmOptions:
    """Nelder-Mead settings; max_iterations=None means 200 * dimension per run."""

    max_iterations: Optional[int] = None
    f_tolerance: float = 1e-10
    x_tolerance: float = 1e-8
    initial_step: float = 0.05
    restarts: int = 2

    def __post_init__(self):
        if not (self.f_tolerance > 0 and self.x_tolerance > 0):
            raise DomainError("optimizer tolerances must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")
        if self.initial_step <= 0:
            raise DomainError("initial_step must be positive")
        if self.restarts < 0:
            raise DomainError("restarts cannot be negative")

    def iterations_for(self, dimension: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 200 * dimension


@dataclass(frozen=True)
class NmOutcome:
    minimizer: np.ndarray
    minimum: float
    iterations: int
    converged: bool
    evaluations: int = 0
    history: tuple = field(default=(), repr=False)


class _Barrier:
    """Objective wrapper: non-finite values and arithmetic failures become +inf."""

    def __init__(self, objective: Objective):
        self.objective = objective
        self.evaluations = 0

    def __call__(self, point: np.ndarray) -> float:
        self.evaluations += 1
        try:
            value = float(self.objective(np.array(point, dtype=float)))
        except (ArithmeticError, ValueError):
            return math.inf
        return value if math.isfinite(value) else math.inf


def initial_simplex(start: np.ndarray, step: float) -> np.ndarray:
    """start plus one vertex per coordinate, offset by step * max(1, |start_i|)."""
    dim = start.size
    simplex = np.tile(start, (dim + 1, 1))
    for i in range(dim):
        simplex[i + 1, i] += step * max(1.0, abs(start[i]))
    return simplex


def nelder_mead_minimize(objective: Objective, start: Sequence[float],
                         options: Optional[NmOptions] = None) -> NmOutcome:
    options = options or NmOptions()
    x0 = np.asarray(start, dtype=float).ravel()
    if x0.size < 1:
        raise DomainError("nelder_mead_minimize needs at least one dimension")

    barrier = _Barrier(objective)
    f0 = barrier(x0)
    if not math.isfinite(f0):
        raise StartPointError(f"objective is not finite at start {x0.tolist()}")

    best_x, best_f = x0, f0
    total_iterations = 0
    converged = False
    history = [best_f]
    max_iter = options.iterations_for(x0.size)

    for run in range(options.restarts + 1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            result = minimize(
                barrier,
                best_x,
                method="Nelder-Mead",
                options={
                    "initial_simplex": initial_simplex(best_x, options.initial_step),
                    "xatol": options.x_tolerance,
                    "fatol": options.f_tolerance,
                    "maxiter": max_iter,
                    "adaptive": False,
                },
            )
        total_iterations += int(result.nit)
        converged = bool(result.status == 0)
        improvement = best_f - float(result.fun)

        if float(result.fun) < best_f:
            best_x, best_f = np.asarray(result.x, dtype=float), float(result.fun)
        history.append(best_f)

        logger.debug(f"🔄 Nelder-Mead run {run}: f={result.fun:.12g}, nit={result.nit}, "
                     f"status={result.status}")

        # a converged restart that no longer moves the incumbent ends the schedule
        if run > 0 and converged and improvement <= options.f_tolerance:
            break

    if not converged:
        logger.warning(f"⚠️ Nelder-Mead did not converge after {total_iterations} iterations "
                       f"(best f={best_f:.10g})")

    return NmOutcome(
        minimizer=best_x,
        minimum=best_f,
        iterations=total_iterations,
        converged=converged,
        evaluations=barrier.evaluations,
        history=tuple(history),
    )
