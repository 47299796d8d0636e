"""
Parametric MBUR quantile regression.

For observation i the linear predictor phi_i = x_i . beta is the link of the
modeled u-quantile; alpha_i^2 follows from links.alpha_sq_from_phi and the
log-likelihood is the MBUR log density evaluated at alpha_i^2. Coefficients
are found by Nelder-Mead, the covariance is the inverse of the
central-difference Hessian of the negative log-likelihood.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DomainError,
    EvaluationError,
    InsufficientDataError,
    LinkOverflowError,
    NumericalError,
    ResponseDomainError,
    SingularMatrixError,
    StartPointError,
)
from .links import LinkKind, alpha_sq_from_phi, inv_link, link
from .mbur import LN6, QuantileLevel, c_factor
from .numerics import hessian_central_diff, mat_inverse, std_normal_cdf
from .optimizer import NmOptions, nelder_mead_minimize

# Set up logging
logger = logging.getLogger(__name__)

INTERCEPT_LABEL = "intercept"


@dataclass(frozen=True)
class ModelSpec:
    response: str
    predictors: Tuple[str, ...] = ()
    link: LinkKind = LinkKind.LOGIT
    level: QuantileLevel = field(default_factory=lambda: QuantileLevel.of(0.5))
    transform: bool = True

    def __post_init__(self):
        object.__setattr__(self, "predictors", tuple(self.predictors))
        object.__setattr__(self, "link", LinkKind.parse(self.link))
        if len(set(self.predictors)) != len(self.predictors):
            raise DomainError(f"predictor names must be distinct: {self.predictors}")
        if self.response in self.predictors:
            raise DomainError(f"response {self.response!r} cannot also be a predictor")

    @property
    def k(self) -> int:
        return len(self.predictors)

    def with_predictors(self, predictors: Sequence[str]) -> "ModelSpec":
        return ModelSpec(self.response, tuple(predictors), self.link, self.level, self.transform)

    def with_link(self, kind: LinkKind) -> "ModelSpec":
        return ModelSpec(self.response, self.predictors, kind, self.level, self.transform)

    def null(self) -> "ModelSpec":
        return self.with_predictors(())

    def coefficient_names(self) -> List[str]:
        return [INTERCEPT_LABEL, *self.predictors]


@dataclass(frozen=True)
class DesignData:
    """Complete-case design: response in (0,1), intercept column first."""

    y: np.ndarray
    x: np.ndarray
    row_labels: Tuple[str, ...]
    predictors: Tuple[str, ...]

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        x = np.asarray(self.x, dtype=float)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "row_labels", tuple(self.row_labels))
        object.__setattr__(self, "predictors", tuple(self.predictors))

        if x.ndim != 2 or x.shape[0] != y.size or x.shape[1] != len(self.predictors) + 1:
            raise DomainError(f"design shape {x.shape} does not match {y.size} rows "
                              f"and {len(self.predictors)} predictors")
        if len(self.row_labels) != y.size:
            raise DomainError("one row label per observation is required")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DomainError("design contains missing or non-finite values")
        if not np.all(x[:, 0] == 1.0):
            raise DomainError("first design column must be the intercept (all ones)")
        outside = [label for label, value in zip(self.row_labels, y) if not 0.0 < value < 1.0]
        if outside:
            raise ResponseDomainError("response must lie strictly inside (0, 1)", outside)

    @property
    def n(self) -> int:
        return int(self.y.size)

    @property
    def k(self) -> int:
        return len(self.predictors)

    @property
    def ln_y(self) -> np.ndarray:
        return np.log(self.y)

    def column(self, name: str) -> np.ndarray:
        return self.x[:, 1 + self.predictors.index(name)]

    def select(self, predictors: Sequence[str]) -> "DesignData":
        """Same rows, a subset of predictor columns (in the given order)."""
        missing = [name for name in predictors if name not in self.predictors]
        if missing:
            raise DomainError(f"predictors {missing} are not in this design")
        columns = [0] + [1 + self.predictors.index(name) for name in predictors]
        return DesignData(self.y, self.x[:, columns], self.row_labels, tuple(predictors))


@dataclass(frozen=True)
class FitResult:
    spec: ModelSpec
    beta_hat: np.ndarray
    vcov: Optional[np.ndarray]
    log_likelihood: float
    converged: bool
    n: int
    iterations: int = 0
    vcov_error: Optional[str] = None

    @property
    def p(self) -> int:
        return int(self.beta_hat.size)

    @property
    def std_errors(self) -> Optional[np.ndarray]:
        if self.vcov is None:
            return None
        with np.errstate(invalid='ignore'):
            return np.sqrt(np.diag(self.vcov))


@dataclass(frozen=True)
class WaldRow:
    name: str
    estimate: float
    std_error: float
    z: float
    p_two_sided: float
    error: Optional[str] = None

    @property
    def significant(self) -> bool:
        return self.error is None and self.p_two_sided < 0.05


def _check_design(spec: ModelSpec, data: DesignData):
    if tuple(spec.predictors) != tuple(data.predictors):
        raise DomainError(f"model predictors {spec.predictors} do not match design "
                          f"columns {data.predictors}")


def log_likelihood_terms(spec: ModelSpec, beta: Sequence[float], data: DesignData) -> np.ndarray:
    """Per-observation log density; non-finite entries mark rows outside the domain."""
    phi = data.x @ np.asarray(beta, dtype=float)
    alpha_sq = np.asarray(alpha_sq_from_phi(spec.link, phi, spec.level), dtype=float)
    ln_y = data.ln_y
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        inv = 1.0 / alpha_sq
        return LN6 + np.log(inv) + np.log(-np.expm1(inv * ln_y)) + (2.0 * inv - 1.0) * ln_y


def nonfinite_rows(spec: ModelSpec, beta: Sequence[float], data: DesignData) -> List[str]:
    """Labels of the rows whose log density is not finite at beta (all rows on link overflow)."""
    try:
        terms = log_likelihood_terms(spec, beta, data)
    except LinkOverflowError:
        return list(data.row_labels)
    return [label for label, ok in zip(data.row_labels, np.isfinite(terms)) if not ok]


def neg_log_likelihood(spec: ModelSpec, beta: Sequence[float], data: DesignData) -> float:
    """-sum of log densities; +inf when any row leaves the domain (optimizer barrier)."""
    try:
        terms = log_likelihood_terms(spec, beta, data)
    except LinkOverflowError:
        return math.inf
    if not np.all(np.isfinite(terms)):
        if logger.isEnabledFor(logging.DEBUG):
            logger.debug(f"non-finite likelihood rows {nonfinite_rows(spec, beta, data)} at beta={list(beta)}")
        return math.inf
    return -float(terms.sum())


def starting_values(spec: ModelSpec, data: DesignData) -> np.ndarray:
    """Intercept at the link of the sample u-quantile, slopes at zero."""
    start = np.zeros(data.k + 1)
    start[0] = link(spec.link, float(np.quantile(data.y, spec.level.u)))
    return start


def fit(spec: ModelSpec, data: DesignData, options: Optional[NmOptions] = None) -> FitResult:
    _check_design(spec, data)
    if data.n < data.k + 2:
        raise InsufficientDataError(f"{data.n} rows cannot support {data.k + 1} coefficients")

    def objective(beta: np.ndarray) -> float:
        return neg_log_likelihood(spec, beta, data)

    start = starting_values(spec, data)
    try:
        outcome = nelder_mead_minimize(objective, start, options)
    except StartPointError as e:
        raise StartPointError(str(e), rows=nonfinite_rows(spec, start, data)) from e
    beta_hat = np.asarray(outcome.minimizer, dtype=float)

    vcov, vcov_error = None, None
    try:
        vcov = mat_inverse(hessian_central_diff(objective, beta_hat))
        vcov = 0.5 * (vcov + vcov.T)
    except (SingularMatrixError, EvaluationError) as e:
        vcov_error = str(e)
        logger.warning(f"⚠️ Covariance unavailable for {describe_spec(spec)}: {e}")

    result = FitResult(
        spec=spec,
        beta_hat=beta_hat,
        vcov=vcov,
        log_likelihood=-outcome.minimum,
        converged=outcome.converged,
        n=data.n,
        iterations=outcome.iterations,
        vcov_error=vcov_error,
    )
    logger.info(f"✅ Fitted {describe_spec(spec)}: LL={result.log_likelihood:.4f}, "
                f"beta={np.round(beta_hat, 4).tolist()}")
    return result


def wald_tests(fit_result: FitResult) -> List[WaldRow]:
    if fit_result.vcov is None:
        raise NumericalError(f"Wald tests need a covariance matrix: {fit_result.vcov_error}")

    rows = []
    names = fit_result.spec.coefficient_names()
    for j, (name, estimate) in enumerate(zip(names, fit_result.beta_hat)):
        variance = float(fit_result.vcov[j, j])
        if not (math.isfinite(variance) and variance > 0):
            rows.append(WaldRow(name, float(estimate), math.nan, math.nan, math.nan,
                                error=f"non-positive variance {variance:.4g}"))
            continue
        se = math.sqrt(variance)
        z = float(estimate) / se
        rows.append(WaldRow(name, float(estimate), se, z, 2.0 * std_normal_cdf(-abs(z))))
    return rows


def linear_predictor(fit_result: FitResult, x_rows) -> np.ndarray:
    rows = np.atleast_2d(np.asarray(x_rows, dtype=float))
    if rows.shape[1] != fit_result.p:
        raise DomainError(f"x_row needs {fit_result.p} entries (intercept first), got {rows.shape[1]}")
    return rows @ fit_result.beta_hat


def predict_quantile(fit_result: FitResult, x_row, u: float):
    """
    The u-quantile of the fitted MBUR at covariates x_row.

    x_row includes the leading 1; a 2-D array predicts one value per row.
    At u equal to the modeled level this is the fitted quantile curve itself.
    """
    phi = linear_predictor(fit_result, x_row)
    alpha_sq = np.asarray(alpha_sq_from_phi(fit_result.spec.link, phi, fit_result.spec.level))
    values = np.exp(alpha_sq * math.log(c_factor(u)))
    if np.ndim(x_row) <= 1:
        return float(values[0])
    return values


def fitted_quantiles(fit_result: FitResult, data: DesignData) -> np.ndarray:
    return np.asarray(inv_link(fit_result.spec.link, data.x @ fit_result.beta_hat))


def describe_spec(spec: ModelSpec) -> str:
    rhs = " + ".join(spec.predictors) if spec.predictors else "1"
    return f"{spec.response} ~ {rhs} [{spec.link.value}, u={spec.level.u:g}]"
