"""
Special functions and small dense linear algebra.

Everything here is a thin, validated layer over numpy/scipy/statsmodels so
the statistical modules can rely on one set of domain checks and one set of
error types. Matrices are 2-D ``float64`` ndarrays.
"""

import math
import logging
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
import scipy.linalg
import scipy.special
import scipy.stats
import statsmodels.api as sm

from .errors import DomainError, EvaluationError, SingularMatrixError

# Set up logging
logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

PIVOT_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-10
HESSIAN_STEP_SCALE = np.finfo(float).eps ** (1.0 / 3.0)


@dataclass(frozen=True)
class OlsResult:
    coefficients: np.ndarray
    r_squared: float
    slope_p_values: np.ndarray
    residuals: np.ndarray


def _scalar_or_array(values: np.ndarray, original: ArrayLike):
    if np.ndim(original) == 0:
        return float(values)
    return values


def std_normal_cdf(x: ArrayLike):
    """Standard normal CDF; accepts a scalar or an array."""
    values = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(values)):
        raise DomainError("std_normal_cdf requires finite input")
    return _scalar_or_array(scipy.special.ndtr(values), x)


def std_normal_quantile(p: ArrayLike):
    """Inverse of the standard normal CDF on the open unit interval."""
    values = np.asarray(p, dtype=float)
    if not np.all((values > 0.0) & (values < 1.0)):
        raise DomainError("std_normal_quantile requires 0 < p < 1")
    return _scalar_or_array(scipy.special.ndtri(values), p)


def ln_gamma(x: float) -> float:
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return float(scipy.special.gammaln(x))


def chi_squared_sf(x: float, df: int) -> float:
    """Upper-tail chi-squared probability P(X > x)."""
    if df < 1:
        raise DomainError(f"chi_squared_sf requires df >= 1, got {df}")
    if not x >= 0:
        raise DomainError(f"chi_squared_sf requires x >= 0, got {x}")
    if x == 0:
        return 1.0
    # Q(df/2, x/2) is the regularized upper incomplete gamma
    return float(scipy.special.gammaincc(df / 2.0, x / 2.0))


def ks_p_value(d: float, n: int) -> float:
    """Asymptotic Kolmogorov tail probability with the small-sample argument correction."""
    if not 0.0 <= d <= 1.0:
        raise DomainError(f"KS statistic must lie in [0, 1], got {d}")
    if n < 1:
        raise DomainError(f"KS sample size must be positive, got {n}")
    root_n = math.sqrt(n)
    argument = d * (root_n + 0.12 + 0.11 / root_n)
    return float(min(1.0, max(0.0, scipy.special.kolmogorov(argument))))


def _as_matrix(a) -> np.ndarray:
    matrix = np.asarray(a, dtype=float)
    if matrix.ndim != 2:
        raise DomainError(f"expected a 2-D matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("matrix entries must be finite")
    return matrix


def mat_inverse(a) -> np.ndarray:
    """
    Inverse via LU with partial pivoting.

    A pivot smaller than PIVOT_TOLERANCE times the largest absolute entry
    marks the matrix singular; the error names that pivot column.
    """
    matrix = _as_matrix(a)
    rows, cols = matrix.shape
    if rows != cols:
        raise DomainError(f"mat_inverse requires a square matrix, got {rows}x{cols}")

    scale = float(np.max(np.abs(matrix))) if matrix.size else 0.0
    if scale == 0.0:
        raise SingularMatrixError("matrix is identically zero", column=0)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(matrix, check_finite=False)

    pivots = np.abs(np.diag(lu))
    small = np.flatnonzero(pivots <= PIVOT_TOLERANCE * scale)
    if small.size:
        raise SingularMatrixError("matrix is singular within pivot tolerance", column=int(small[0]))

    return scipy.linalg.lu_solve((lu, piv), np.eye(rows), check_finite=False)


def sym_eigenvalues(a) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, largest first."""
    matrix = _as_matrix(a)
    if matrix.shape[0] != matrix.shape[1]:
        raise DomainError("sym_eigenvalues requires a square matrix")
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    if np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_TOLERANCE * scale:
        raise DomainError("sym_eigenvalues requires a symmetric matrix")
    symmetric = 0.5 * (matrix + matrix.T)
    return np.sort(np.linalg.eigvalsh(symmetric))[::-1]


def ols_fit(x, y: Sequence[float]) -> OlsResult:
    """
    Ordinary least squares with an intercept in the first design column.

    Slope p-values come from t statistics with n - k degrees of freedom.
    A response with no variation yields R^2 = 0 and p = 1 for every slope.
    """
    design = _as_matrix(x)
    response = np.asarray(y, dtype=float)
    n, k = design.shape
    if response.shape != (n,):
        raise DomainError(f"response length {response.shape} does not match design rows {n}")
    if not np.all(np.isfinite(response)):
        raise DomainError("response values must be finite")
    if n <= k:
        raise DomainError(f"ols_fit needs more rows than columns ({n} <= {k})")
    rank = np.linalg.matrix_rank(design)
    if rank < k:
        raise SingularMatrixError(f"design has rank {rank} < {k} columns", column=int(rank))

    with warnings.catch_warnings(), np.errstate(divide='ignore', invalid='ignore'):
        warnings.simplefilter("ignore", RuntimeWarning)
        results = sm.OLS(response, design).fit()
        coefficients = np.asarray(results.params, dtype=float)
        p_values = np.asarray(results.pvalues, dtype=float)

    residuals = response - design @ coefficients
    ssr = float(residuals @ residuals)
    centered = response - response.mean()
    tss = float(centered @ centered)

    if tss <= np.finfo(float).tiny:
        r_squared = 0.0
        p_values = np.ones(k)
    else:
        r_squared = min(1.0, max(0.0, 1.0 - ssr / tss))
        # exact fits give 0/0 t statistics for zero coefficients
        undefined = ~np.isfinite(p_values)
        p_values[undefined] = np.where(coefficients[undefined] == 0.0, 1.0, 0.0)

    return OlsResult(
        coefficients=coefficients,
        r_squared=r_squared,
        slope_p_values=p_values[1:],
        residuals=residuals,
    )


def default_hessian_steps(x: Sequence[float]) -> np.ndarray:
    point = np.asarray(x, dtype=float)
    return HESSIAN_STEP_SCALE * np.maximum(1.0, np.abs(point))


def hessian_central_diff(
    f: Callable[[np.ndarray], float],
    x: Sequence[float],
    h: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """
    Central-difference Hessian of a scalar function.

    Diagonal entries use the three-point second difference, off-diagonal
    entries the four-point cross formula; the result is symmetrized.
    """
    point = np.asarray(x, dtype=float)
    dim = point.size
    steps = default_hessian_steps(point) if h is None else np.asarray(h, dtype=float)
    if steps.shape != (dim,) or not np.all(steps > 0):
        raise DomainError("Hessian steps must be positive, one per coordinate")

    def evaluate(offset: np.ndarray) -> float:
        at = point + offset
        value = float(f(at))
        if not math.isfinite(value):
            raise EvaluationError("objective not finite during Hessian evaluation", at)
        return value

    centre = evaluate(np.zeros(dim))
    hessian = np.zeros((dim, dim))
    unit = np.eye(dim)

    for i in range(dim):
        ei = steps[i] * unit[i]
        hessian[i, i] = (evaluate(ei) - 2.0 * centre + evaluate(-ei)) / steps[i] ** 2
        for j in range(i + 1, dim):
            ej = steps[j] * unit[j]
            cross = (evaluate(ei + ej) - evaluate(ei - ej) - evaluate(-ei + ej) + evaluate(-ei - ej))
            hessian[i, j] = cross / (4.0 * steps[i] * steps[j])
            hessian[j, i] = hessian[i, j]

    return 0.5 * (hessian + hessian.T)
