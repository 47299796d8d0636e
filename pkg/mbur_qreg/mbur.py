"""
The Median-Based Unit Rayleigh (MBUR) distribution on (0, 1).

    pdf(y)      = (6 / a2) (1 - y^(1/a2)) y^(2/a2 - 1)
    cdf(y)      = 3 y^(2/a2) - 2 y^(3/a2)
    quantile(u) = c(u)^a2

with a2 = alpha^2 and c(u) the root in (0, 1) of 3c^2 - 2c^3 = u.
Densities are evaluated in log space.
"""

import math
import logging
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DomainError
from .optimizer import NmOptions, nelder_mead_minimize

# Set up logging
logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

LN6 = math.log(6.0)
SQRT3 = math.sqrt(3.0)

# Seed-to-stream mapping: numpy PCG64 seeded with the integer seed; each
# uniform is (k + 0.5) / 2^53 for k drawn uniformly from [0, 2^53).
_UNIFORM_BITS = 53


@dataclass(frozen=True)
class MburParams:
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha > 0):
            raise DomainError(f"MBUR alpha must be positive and finite, got {self.alpha}")

    @property
    def alpha_sq(self) -> float:
        return self.alpha * self.alpha

    @classmethod
    def from_alpha_sq(cls, alpha_sq: float) -> "MburParams":
        if not alpha_sq > 0:
            raise DomainError(f"alpha^2 must be positive, got {alpha_sq}")
        return cls(math.sqrt(alpha_sq))


@dataclass(frozen=True)
class QuantileLevel:
    """A modeled quantile level u with its constant c(u) and ln c(u) precomputed."""

    u: float
    c: float
    ln_c: float

    @classmethod
    def of(cls, u: float) -> "QuantileLevel":
        c = c_factor(u)
        return cls(u=float(u), c=c, ln_c=math.log(c))


@dataclass(frozen=True)
class AlphaFit:
    params: MburParams
    log_likelihood: float
    converged: bool
    n: int


def _scalar_or_array(values: np.ndarray, original: ArrayLike):
    if np.ndim(original) == 0:
        return float(values)
    return values


def _check_open_unit(values: np.ndarray, what: str):
    if not np.all((values > 0.0) & (values < 1.0)):
        raise DomainError(f"{what} must lie strictly inside (0, 1)")


def c_factor(u: ArrayLike):
    """Quantile-level constant: the u-quantile of MBUR(alpha) equals c(u)^(alpha^2)."""
    levels = np.asarray(u, dtype=float)
    _check_open_unit(levels, "quantile level u")
    theta = np.arccos(1.0 - 2.0 * levels) / 3.0
    return _scalar_or_array(-0.5 * (np.cos(theta) - SQRT3 * np.sin(theta)) + 0.5, u)


def log_pdf(y: ArrayLike, alpha_sq: ArrayLike):
    ys = np.asarray(y, dtype=float)
    _check_open_unit(ys, "MBUR density argument")
    a2 = np.asarray(alpha_sq, dtype=float)
    ln_y = np.log(ys)
    inv = 1.0 / a2
    values = LN6 - np.log(a2) + np.log(-np.expm1(inv * ln_y)) + (2.0 * inv - 1.0) * ln_y
    return _scalar_or_array(values, y)


def pdf(y: ArrayLike, p: MburParams):
    values = np.exp(log_pdf(y, p.alpha_sq))
    return _scalar_or_array(values, y)


def cdf(y: ArrayLike, p: MburParams):
    ys = np.asarray(y, dtype=float)
    if not np.all((ys >= 0.0) & (ys <= 1.0)):
        raise DomainError("MBUR cdf argument must lie in [0, 1]")
    return _scalar_or_array(cdf_alpha_sq(ys, p.alpha_sq), y)


def cdf_alpha_sq(ys: np.ndarray, alpha_sq: ArrayLike) -> np.ndarray:
    """cdf for per-observation alpha^2 (no validation; used by residuals)."""
    with np.errstate(divide='ignore'):
        t = np.exp(np.log(ys) / np.asarray(alpha_sq, dtype=float))
    return t * t * (3.0 - 2.0 * t)


def quantile(u: ArrayLike, p: MburParams):
    c = np.asarray(c_factor(u), dtype=float)
    return _scalar_or_array(np.exp(p.alpha_sq * np.log(c)), u)


def sample_from_uniforms(uniforms: ArrayLike, p: MburParams) -> np.ndarray:
    """Inverse-transform sampling through the closed-form quantile."""
    return np.atleast_1d(np.asarray(quantile(np.asarray(uniforms, dtype=float), p), dtype=float))


def uniform_stream(n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise DomainError(f"sample size must be positive, got {n}")
    rng = np.random.default_rng(seed)
    k = rng.integers(0, 2 ** _UNIFORM_BITS, size=n, dtype=np.int64)
    return (k.astype(float) + 0.5) / float(2 ** _UNIFORM_BITS)


def sample(n: int, p: MburParams, seed: int) -> np.ndarray:
    return sample_from_uniforms(uniform_stream(n, seed), p)


def log_likelihood(y: ArrayLike, p: MburParams) -> float:
    return float(np.sum(log_pdf(np.asarray(y, dtype=float), p.alpha_sq)))


def fit_alpha(y: Sequence[float], options: NmOptions = None) -> AlphaFit:
    """
    Single-sample maximum likelihood for alpha.

    Optimizes over log(alpha) so the search is unconstrained; starts from the
    alpha whose median matches the sample median.
    """
    ys = np.asarray(y, dtype=float)
    if ys.ndim != 1 or ys.size < 2:
        raise DomainError("fit_alpha needs at least two observations")
    outside = np.flatnonzero(~((ys > 0.0) & (ys < 1.0)))
    if outside.size:
        raise DomainError(f"fit_alpha requires 0 < y < 1; offending indices {outside.tolist()}")

    ln_y = np.log(ys)
    sum_ln_y = float(ln_y.sum())
    n = ys.size

    def negative_ll(v: np.ndarray) -> float:
        inv = math.exp(-2.0 * v[0])
        return -(n * (LN6 + math.log(inv))
                 + float(np.sum(np.log(-np.expm1(inv * ln_y))))
                 + (2.0 * inv - 1.0) * sum_ln_y)

    start_alpha_sq = math.log(float(np.median(ys))) / math.log(0.5)
    start = [0.5 * math.log(start_alpha_sq)]
    options = options or NmOptions(f_tolerance=1e-12, x_tolerance=1e-10)
    outcome = nelder_mead_minimize(negative_ll, start, options)

    alpha = math.exp(float(outcome.minimizer[0]))
    logger.info(f"✅ fit_alpha: alpha={alpha:.6f}, LL={-outcome.minimum:.6f} (n={n})")
    return AlphaFit(
        params=MburParams(alpha),
        log_likelihood=-outcome.minimum,
        converged=outcome.converged,
        n=n,
    )
