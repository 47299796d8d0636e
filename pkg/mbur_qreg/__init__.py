# MBUR Quantile Regression Toolkit
# Parametric quantile regression for responses on (0, 1) under the
# Median-Based Unit Rayleigh distribution
#
# Features:
# - MBUR density, CDF, closed-form quantile, sampling and single-sample MLE
# - logit / cloglog / loglog quantile links
# - Nelder-Mead maximum likelihood with finite-difference covariance
# - Wald tests, AIC/CAIC/BIC/HQIC, likelihood-ratio ladders, pseudo R^2
# - Quantile and Cox-Snell residual diagnostics
# - Kendall correlation matrices, VIF and condition indices
# - Embedded OECD Better Life Index fixture and a reporting CLI

from .errors import DataError, DomainError, MburQregError, NumericalError, UsageError
from .links import LinkKind
from .mbur import MburParams, QuantileLevel
from .qreg import DesignData, FitResult, ModelSpec, fit, predict_quantile, wald_tests

__version__ = "1.0.0"
__author__ = "MBUR QReg Team"
__description__ = "Parametric MBUR quantile regression for unit-interval responses"

__all__ = [
    'MburQregError', 'DomainError', 'DataError', 'NumericalError', 'UsageError',
    'LinkKind', 'MburParams', 'QuantileLevel',
    'ModelSpec', 'DesignData', 'FitResult',
    'fit', 'wald_tests', 'predict_quantile',
]
