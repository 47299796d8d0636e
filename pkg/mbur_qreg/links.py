"""
Quantile link functions and the map from linear predictor to MBUR alpha^2.

The linear predictor phi is the link of the modeled u-quantile m, and the
reparameterization alpha^2 = ln(m) / ln(c(u)) makes c(u)^(alpha^2) = m.
All ln(m) forms are evaluated stably (softplus / log1p / expm1).
"""

import math
import logging
from enum import Enum
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, LinkOverflowError
from .mbur import QuantileLevel

# Set up logging
logger = logging.getLogger(__name__)

ArrayLike = Union[float, Sequence[float], np.ndarray]

PHI_OVERFLOW = 700.0
LN2 = math.log(2.0)
# below this, ln(1 - exp(-exp(phi))) equals phi - exp(phi)/2 in double precision
CLOGLOG_SERIES_BELOW = -37.0


class LinkKind(str, Enum):
    LOGIT = "logit"
    CLOGLOG = "cloglog"
    LOGLOG = "loglog"

    @classmethod
    def parse(cls, token: Union[str, "LinkKind"]) -> "LinkKind":
        if isinstance(token, cls):
            return token
        try:
            return cls(str(token).strip().lower())
        except ValueError:
            valid = ", ".join(kind.value for kind in cls)
            raise DomainError(f"Unknown link {token!r}; valid links: {valid}") from None


def _scalar_or_array(values: np.ndarray, original: ArrayLike):
    if np.ndim(original) == 0:
        return float(values)
    return values


def _log1mexp(a: np.ndarray) -> np.ndarray:
    """ln(1 - exp(-a)) for a > 0."""
    with np.errstate(divide='ignore'):
        return np.where(a < LN2, np.log(-np.expm1(-a)), np.log1p(-np.exp(-a)))


def inv_link(kind: LinkKind, phi: ArrayLike):
    """Modeled quantile from the linear predictor."""
    kind = LinkKind.parse(kind)
    values = np.asarray(phi, dtype=float)
    if kind is LinkKind.LOGIT:
        result = np.exp(-np.logaddexp(0.0, -values))
    elif kind is LinkKind.CLOGLOG:
        result = -np.expm1(-np.exp(values))
    else:
        result = np.exp(-np.exp(values))
    return _scalar_or_array(result, phi)


def link(kind: LinkKind, m: ArrayLike):
    kind = LinkKind.parse(kind)
    values = np.asarray(m, dtype=float)
    if not np.all((values > 0.0) & (values < 1.0)):
        raise DomainError(f"{kind.value} link requires 0 < m < 1")
    if kind is LinkKind.LOGIT:
        result = np.log(values) - np.log1p(-values)
    elif kind is LinkKind.CLOGLOG:
        result = np.log(-np.log1p(-values))
    else:
        result = np.log(-np.log(values))
    return _scalar_or_array(result, m)


def log_quantile_from_phi(kind: LinkKind, phi: ArrayLike):
    """ln of the modeled quantile, ln(inv_link(phi)), without forming inv_link."""
    kind = LinkKind.parse(kind)
    values = np.asarray(phi, dtype=float)
    if np.any(values > PHI_OVERFLOW):
        raise LinkOverflowError(f"exp(phi) overflows for phi > {PHI_OVERFLOW:g}")
    if kind is LinkKind.LOGIT:
        result = -np.logaddexp(0.0, -values)
    elif kind is LinkKind.CLOGLOG:
        result = np.where(values < CLOGLOG_SERIES_BELOW,
                          values - 0.5 * np.exp(values),
                          _log1mexp(np.exp(values)))
    else:
        result = -np.exp(values)
    return _scalar_or_array(result, phi)


def alpha_sq_from_phi(kind: LinkKind, phi: ArrayLike, level: QuantileLevel):
    """
    alpha^2 = ln(modeled quantile) / ln(c(u)).

    The log-log link has the closed form -exp(phi) / ln(c), positive until
    exp(phi) underflows. Logit and cloglog stay finite and positive for every
    finite phi at or below the overflow guard.
    """
    result = np.asarray(log_quantile_from_phi(kind, phi), dtype=float) / level.ln_c
    return _scalar_or_array(result, phi)
