"""
Residuals and model-adequacy checks for fitted MBUR quantile regressions.

Quantile (RQ) residuals are the normal scores of the fitted CDF and Cox-Snell
(CS) residuals its exponential scores, so both KS tests share one
sup-distance and both residual kinds give the same Kendall tau against any
predictor.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.stats

from .association import KendallResult, kendall_tau
from .errors import DomainError, MburQregError
from .links import alpha_sq_from_phi
from .mbur import cdf_alpha_sq
from .numerics import ks_p_value, ols_fit, std_normal_quantile
from .qreg import DesignData, FitResult

# Set up logging
logger = logging.getLogger(__name__)

CDF_CLIP = 1e-12
LARGE_CS_THRESHOLD = 2.0
MIN_TEST_SIZE = 5


class ResidualKind(str, Enum):
    RQ = "RQ"
    CS = "CS"


@dataclass(frozen=True)
class ResidualSet:
    rq: np.ndarray
    cs: np.ndarray
    fitted_cdf: np.ndarray
    row_labels: Tuple[str, ...] = ()
    clipped: int = 0

    def of_kind(self, kind: ResidualKind) -> np.ndarray:
        return self.rq if ResidualKind(kind) is ResidualKind.RQ else self.cs


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float

    def __iter__(self):
        return iter((self.statistic, self.p_value))


@dataclass(frozen=True)
class HomoscedasticityResult:
    p_value: float
    r_squared: float
    residual_kind: ResidualKind


@dataclass(frozen=True)
class LargeResidualSummary:
    threshold: float
    count: int
    minimum: Optional[float]
    maximum: Optional[float]
    row_labels: Tuple[str, ...] = ()


@dataclass(frozen=True)
class DiagnosticsReport:
    residuals: ResidualSet
    ks_rq: KsResult
    ks_cs: KsResult
    tau: Dict[str, Dict[str, Optional[KendallResult]]] = field(default_factory=dict)
    homoscedasticity: Dict[str, Dict[str, Optional[HomoscedasticityResult]]] = field(default_factory=dict)
    large_cs: Optional[LargeResidualSummary] = None
    errors: Tuple[str, ...] = ()


def residuals(fit_result: FitResult, data: DesignData) -> ResidualSet:
    if tuple(fit_result.spec.predictors) != tuple(data.predictors):
        raise DomainError("fit and design use different predictors")
    if not fit_result.converged:
        logger.warning("⚠️ Residuals computed from a fit that did not converge")

    phi = data.x @ fit_result.beta_hat
    alpha_sq = np.asarray(alpha_sq_from_phi(fit_result.spec.link, phi, fit_result.spec.level))
    fitted = cdf_alpha_sq(data.y, alpha_sq)

    clipped = int(np.sum((fitted < CDF_CLIP) | (fitted > 1.0 - CDF_CLIP)))
    if clipped:
        logger.warning(f"⚠️ {clipped} fitted CDF values clipped to [{CDF_CLIP:g}, 1 - {CDF_CLIP:g}]")
    fitted = np.clip(fitted, CDF_CLIP, 1.0 - CDF_CLIP)

    return ResidualSet(
        rq=np.asarray(std_normal_quantile(fitted)),
        cs=-np.log1p(-fitted),
        fitted_cdf=fitted,
        row_labels=data.row_labels,
        clipped=clipped,
    )


def _sample(r: Sequence[float], what: str) -> np.ndarray:
    values = np.asarray(r, dtype=float).ravel()
    if values.size < MIN_TEST_SIZE:
        raise DomainError(f"{what} needs at least {MIN_TEST_SIZE} values, got {values.size}")
    if not np.all(np.isfinite(values)):
        raise DomainError(f"{what} requires finite values")
    return values


def ks_test_normal(r: Sequence[float]) -> KsResult:
    values = _sample(r, "ks_test_normal")
    d = float(scipy.stats.kstest(values, "norm").statistic)
    return KsResult(d, ks_p_value(d, values.size))


def ks_test_exponential(r: Sequence[float]) -> KsResult:
    values = _sample(r, "ks_test_exponential")
    negative = np.flatnonzero(values < 0)
    if negative.size:
        raise DomainError(f"exponential KS test needs r >= 0; negative at {negative.tolist()}")
    d = float(scipy.stats.kstest(values, "expon").statistic)
    return KsResult(d, ks_p_value(d, values.size))


def residual_predictor_tau(r: Sequence[float], x: Sequence[float]) -> KendallResult:
    values = _sample(r, "residual_predictor_tau")
    return kendall_tau(values, x)


def homoscedasticity_test(r: Sequence[float], x: Sequence[float],
                          kind: ResidualKind) -> HomoscedasticityResult:
    """OLS of squared residuals on an intercept and x; reports slope p and R^2."""
    values = _sample(r, "homoscedasticity_test")
    xs = np.asarray(x, dtype=float).ravel()
    if xs.size != values.size:
        raise DomainError("residuals and predictor must have equal lengths")
    result = ols_fit(np.column_stack([np.ones(xs.size), xs]), values ** 2)
    return HomoscedasticityResult(
        p_value=float(result.slope_p_values[0]),
        r_squared=result.r_squared,
        residual_kind=ResidualKind(kind),
    )


def large_cs_summary(residual_set: ResidualSet, threshold: float = LARGE_CS_THRESHOLD) -> LargeResidualSummary:
    mask = residual_set.cs > threshold
    large = residual_set.cs[mask]
    labels = tuple(label for label, hit in zip(residual_set.row_labels, mask) if hit)
    return LargeResidualSummary(
        threshold=threshold,
        count=int(large.size),
        minimum=float(large.min()) if large.size else None,
        maximum=float(large.max()) if large.size else None,
        row_labels=labels,
    )


def diagnose(fit_result: FitResult, data: DesignData) -> DiagnosticsReport:
    """Every residual check for one fit; per-predictor failures are collected, not raised."""
    residual_set = residuals(fit_result, data)
    tau: Dict[str, Dict[str, Optional[KendallResult]]] = {}
    homoscedasticity: Dict[str, Dict[str, Optional[HomoscedasticityResult]]] = {}
    errors = []

    for name in data.predictors:
        column = data.column(name)
        tau[name], homoscedasticity[name] = {}, {}
        for kind in ResidualKind:
            r = residual_set.of_kind(kind)
            try:
                tau[name][kind.value] = residual_predictor_tau(r, column)
            except MburQregError as e:
                tau[name][kind.value] = None
                errors.append(f"tau {kind.value} vs {name}: {e}")
            try:
                homoscedasticity[name][kind.value] = homoscedasticity_test(r, column, kind)
            except MburQregError as e:
                homoscedasticity[name][kind.value] = None
                errors.append(f"homoscedasticity {kind.value} vs {name}: {e}")

    for message in errors:
        logger.warning(f"⚠️ {message}")

    return DiagnosticsReport(
        residuals=residual_set,
        ks_rq=ks_test_normal(residual_set.rq),
        ks_cs=ks_test_exponential(residual_set.cs),
        tau=tau,
        homoscedasticity=homoscedasticity,
        large_cs=large_cs_summary(residual_set),
        errors=tuple(errors),
    )
