"""
Descriptive statistics, Kendall correlation matrices, VIF and condition indices.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Tuple

import numpy as np
import scipy.stats

from .errors import DomainError, MburQregError, SingularMatrixError, UndefinedCorrelationError
from .numerics import ols_fit, sym_eigenvalues

# Set up logging
logger = logging.getLogger(__name__)

# 1 - R^2 at or below this counts as perfect collinearity
COLLINEAR_TOLERANCE = 1e-12


@dataclass(frozen=True)
class DescriptiveStats:
    mean: float
    sd: float
    skewness: float
    kurtosis: float
    min: float
    max: float
    q25: float
    median: float
    q75: float
    n: int = 0
    degenerate: bool = False

    def to_dict(self) -> Dict[str, float]:
        return {
            "n": self.n,
            "mean": self.mean,
            "sd": self.sd,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "min": self.min,
            "q25": self.q25,
            "median": self.median,
            "q75": self.q75,
            "max": self.max,
            "degenerate": self.degenerate,
        }


@dataclass(frozen=True)
class KendallResult:
    tau: float
    p_value: float
    n: int

    def __iter__(self):
        return iter((self.tau, self.p_value))


@dataclass(frozen=True)
class KendallMatrix:
    labels: Tuple[str, ...]
    tau: np.ndarray
    p: np.ndarray
    n: np.ndarray
    errors: Dict[Tuple[str, str], str] = field(default_factory=dict)

    def entry(self, a: str, b: str) -> KendallResult:
        i, j = self.labels.index(a), self.labels.index(b)
        return KendallResult(float(self.tau[i, j]), float(self.p[i, j]), int(self.n[i, j]))


def _finite_values(x: Sequence[float]) -> np.ndarray:
    values = np.asarray(x, dtype=float).ravel()
    return values[~np.isnan(values)]


def describe(x: Sequence[float], bias: bool = False) -> DescriptiveStats:
    """
    Summary statistics of the non-missing values of x.

    sd uses the n-1 divisor; skewness and kurtosis are the bias-corrected
    sample estimators (kurtosis is not excess, so a normal sample sits near 3).
    bias=True gives the plain moment ratios m3/m2^1.5 and m4/m2^2 instead.
    Quartiles use the Hazen plotting position n*q + 0.5 with linear
    interpolation.
    """
    values = _finite_values(x)
    if values.size < 2:
        raise DomainError(f"describe needs at least two values, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise DomainError("describe requires finite values")

    sd = float(np.std(values, ddof=1))
    degenerate = sd == 0.0
    if degenerate:
        logger.warning("⚠️ Constant column: skewness and kurtosis undefined, reported as 0")
        skewness, kurtosis = 0.0, 0.0
    else:
        skewness = float(scipy.stats.skew(values, bias=bias))
        kurtosis = float(scipy.stats.kurtosis(values, fisher=False, bias=bias))

    q25, median, q75 = np.quantile(values, [0.25, 0.5, 0.75], method="hazen")
    return DescriptiveStats(
        mean=float(np.mean(values)),
        sd=sd,
        skewness=skewness,
        kurtosis=kurtosis,
        min=float(values.min()),
        max=float(values.max()),
        q25=float(q25),
        median=float(median),
        q75=float(q75),
        n=int(values.size),
        degenerate=degenerate,
    )


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> KendallResult:
    """Kendall tau-b with the tie-adjusted normal approximation for the p-value."""
    xs = np.asarray(x, dtype=float).ravel()
    ys = np.asarray(y, dtype=float).ravel()
    if xs.size != ys.size:
        raise DomainError(f"kendall_tau needs equal lengths, got {xs.size} and {ys.size}")
    if xs.size < 3:
        raise DomainError(f"kendall_tau needs at least 3 pairs, got {xs.size}")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise DomainError("kendall_tau requires finite values")
    if np.ptp(xs) == 0 or np.ptp(ys) == 0:
        raise UndefinedCorrelationError("Kendall tau is undefined for a constant sequence")

    tau, p_value = scipy.stats.kendalltau(xs, ys, variant="b", method="asymptotic")
    return KendallResult(tau=float(tau), p_value=float(p_value), n=int(xs.size))


def kendall_matrix(columns: Mapping[str, Sequence[float]]) -> KendallMatrix:
    """Pairwise tau on pairwise-complete rows; failing pairs are NaN and listed in errors."""
    labels = tuple(columns)
    if len(labels) < 2:
        raise DomainError("kendall_matrix needs at least two columns")
    data = [np.asarray(columns[label], dtype=float).ravel() for label in labels]
    length = data[0].size
    if any(column.size != length for column in data):
        raise DomainError("kendall_matrix columns must have equal lengths")

    k = len(labels)
    tau = np.eye(k)
    p = np.zeros((k, k))
    counts = np.zeros((k, k), dtype=int)
    errors: Dict[Tuple[str, str], str] = {}

    for i in range(k):
        counts[i, i] = int(np.sum(~np.isnan(data[i])))
        for j in range(i + 1, k):
            complete = ~(np.isnan(data[i]) | np.isnan(data[j]))
            counts[i, j] = counts[j, i] = int(complete.sum())
            try:
                result = kendall_tau(data[i][complete], data[j][complete])
                tau[i, j] = tau[j, i] = result.tau
                p[i, j] = p[j, i] = result.p_value
            except MburQregError as e:
                logger.warning(f"⚠️ Kendall tau for ({labels[i]}, {labels[j]}) unavailable: {e}")
                tau[i, j] = tau[j, i] = math.nan
                p[i, j] = p[j, i] = math.nan
                errors[(labels[i], labels[j])] = str(e)

    return KendallMatrix(labels=labels, tau=tau, p=p, n=counts, errors=errors)


def _predictor_matrix(x, minimum_columns: int = 2) -> np.ndarray:
    matrix = np.asarray(x, dtype=float)
    if matrix.ndim != 2:
        raise DomainError(f"expected an n x k predictor matrix, got shape {matrix.shape}")
    n, k = matrix.shape
    if k < minimum_columns:
        raise DomainError(f"need at least {minimum_columns} predictor columns, got {k}")
    if not np.all(np.isfinite(matrix)):
        raise DomainError("predictor matrix must be complete and finite")
    return matrix


def vif(x) -> np.ndarray:
    """Variance inflation factors; perfectly collinear columns get inf (with a warning)."""
    matrix = _predictor_matrix(x)
    n, k = matrix.shape
    if n <= k:
        raise DomainError(f"VIF needs more rows than columns ({n} <= {k})")

    factors = np.empty(k)
    for j in range(k):
        others = np.delete(matrix, j, axis=1)
        design = np.column_stack([np.ones(n), others])
        try:
            r_squared = ols_fit(design, matrix[:, j]).r_squared
        except SingularMatrixError:
            r_squared = 1.0
        if 1.0 - r_squared <= COLLINEAR_TOLERANCE:
            logger.warning(f"⚠️ Column {j} is perfectly collinear with the others; VIF is infinite")
            factors[j] = math.inf
        else:
            factors[j] = 1.0 / (1.0 - r_squared)
    return factors


def condition_indices(x) -> np.ndarray:
    """
    sqrt(lambda_max / lambda_j) over the eigenvalues of the predictor
    correlation matrix (columns standardized, no intercept), largest first.
    """
    matrix = _predictor_matrix(x)
    sd = np.std(matrix, axis=0, ddof=1)
    flat = np.flatnonzero(sd == 0)
    if flat.size:
        raise DomainError(f"columns {flat.tolist()} have zero variance")

    eigenvalues = sym_eigenvalues(np.corrcoef(matrix, rowvar=False))
    with np.errstate(divide='ignore', invalid='ignore'):
        indices = np.where(eigenvalues > 0, np.sqrt(eigenvalues[0] / eigenvalues), math.inf)
    return np.sort(indices)[::-1]
