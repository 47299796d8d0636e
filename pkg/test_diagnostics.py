#!/usr/bin/env python3
"""
Tests for residuals and adequacy checks (mbur_qreg.diagnostics).
"""

import math
import sys
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.stats

# Add the current directory to the path so we can import our modules
sys.path.insert(0, str(Path(__file__).parent))

from mbur_qreg.dataio import build_design, load_fixture
from mbur_qreg.diagnostics import (
    ResidualKind,
    diagnose,
    homoscedasticity_test,
    ks_test_exponential,
    ks_test_normal,
    large_cs_summary,
    residual_predictor_tau,
    residuals,
)
from mbur_qreg.errors import DomainError
from mbur_qreg.links import alpha_sq_from_phi
from mbur_qreg.mbur import MburParams, c_factor, quantile, uniform_stream
from mbur_qreg.optimizer import NmOptions
from mbur_qreg.qreg import DesignData, FitResult, ModelSpec, fit


@lru_cache(maxsize=None)
def education_fit():
    spec = ModelSpec("education", ("employment",))
    data = build_design(load_fixture(), spec)
    return fit(spec, data, NmOptions(restarts=4)), data


def unit_null_fit(ys):
    """Logit null model with beta0 = 0, i.e. alpha^2 = 1 for every row."""
    data = DesignData(y=ys, x=np.ones((len(ys), 1)), row_labels=[f"r{i}" for i in range(len(ys))],
                      predictors=())
    result = FitResult(spec=ModelSpec("y"), beta_hat=np.zeros(1), vcov=None, log_likelihood=0.0,
                       converged=True, n=len(ys))
    return result, data


def test_median_observation_has_zero_rq():
    result, data = unit_null_fit([0.5])
    r = residuals(result, data)
    assert math.isclose(r.fitted_cdf[0], 0.5, abs_tol=1e-15)
    assert abs(r.rq[0]) < 1e-12
    assert math.isclose(r.cs[0], math.log(2.0), abs_tol=1e-12)


def test_cox_snell_of_one():
    y = quantile(1.0 - math.exp(-1.0), MburParams(1.0))
    result, data = unit_null_fit([y])
    assert math.isclose(residuals(result, data).cs[0], 1.0, abs_tol=1e-9)


def test_ks_normal_on_exact_scores():
    n = 40
    scores = scipy.stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    d, p = ks_test_normal(scores)
    assert math.isclose(d, 0.5 / n, abs_tol=1e-12)
    assert p > 0.99


def test_ks_exponential_on_exact_scores():
    n = 25
    scores = -np.log1p(-(np.arange(1, n + 1) - 0.5) / n)
    d, _ = ks_test_exponential(scores)
    assert math.isclose(d, 0.5 / n, abs_tol=1e-12)


def test_ks_p_values_uniform_under_fitted_model():
    result, data = education_fit()
    alpha_sq = np.asarray(alpha_sq_from_phi(result.spec.link, data.x @ result.beta_hat, result.spec.level))
    p_values = []
    for seed in range(200):
        u = uniform_stream(data.n, seed)
        simulated = DesignData(np.exp(alpha_sq * np.log(c_factor(u))), data.x, data.row_labels, data.predictors)
        p_values.append(ks_test_normal(residuals(result, simulated).rq).p_value)
    p_values = np.array(p_values)
    assert 0.01 <= np.mean(p_values < 0.05) <= 0.12
    assert 0.35 <= np.mean(p_values < 0.5) <= 0.65


def test_ks_exponential_rejects_shifted_sample():
    d, p = ks_test_exponential(np.full(20, 5.0))
    assert d > 0.99 and p < 1e-6


def test_ks_exponential_rejects_negative_values():
    try:
        ks_test_exponential([0.1, 0.2, -0.3, 0.4, 0.5])
    except DomainError as e:
        assert "2" in str(e)
        return
    raise AssertionError("negative residuals should raise")


def test_rq_and_cs_agree():
    result, data = education_fit()
    r = residuals(result, data)
    assert r.clipped == 0
    assert math.isclose(ks_test_normal(r.rq).statistic, ks_test_exponential(r.cs).statistic, abs_tol=1e-12)
    column = data.column("employment")
    assert residual_predictor_tau(r.rq, column).tau == residual_predictor_tau(r.cs, column).tau


def test_education_employment_reference_diagnostics():
    result, data = education_fit()
    report = diagnose(result, data)
    assert report.errors == ()
    assert abs(report.ks_rq.p_value - 0.4557) <= 0.1

    # weak, non-significant dependence on the predictor
    tau = report.tau["employment"]["RQ"]
    assert math.isclose(tau.tau, -0.0639, abs_tol=0.01)
    assert math.isclose(tau.p_value, 0.567, abs_tol=0.05)
    assert report.tau["employment"]["CS"].tau == tau.tau
    assert report.tau["employment"]["CS"].p_value == tau.p_value

    cs = report.homoscedasticity["employment"]["CS"]
    assert math.isclose(cs.p_value, 0.702, abs_tol=0.02)
    assert math.isclose(cs.r_squared, 0.00389, abs_tol=0.005)
    rq = report.homoscedasticity["employment"]["RQ"]
    assert math.isclose(rq.p_value, 0.681, abs_tol=0.02)
    assert math.isclose(rq.r_squared, 0.00449, abs_tol=0.005)

    assert report.large_cs.count >= 1
    assert report.large_cs.maximum > 2.0


def test_homoscedasticity_constant_residuals():
    result = homoscedasticity_test(np.full(8, 0.7), np.arange(8.0), ResidualKind.RQ)
    assert result.p_value == 1.0
    assert result.r_squared == 0.0


def test_tau_of_identical_ranks():
    x = np.array([0.3, 1.2, -0.4, 2.2, 0.9, 1.7])
    assert math.isclose(residual_predictor_tau(x, x).tau, 1.0, abs_tol=1e-12)


def test_large_cs_summary_lists_rows():
    result, data = unit_null_fit([0.05, 0.5, 0.97, 0.995, 0.3])
    summary = large_cs_summary(residuals(result, data), threshold=2.0)
    cs = residuals(result, data).cs
    assert summary.count == int(np.sum(cs > 2.0))
    assert set(summary.row_labels) == {f"r{i}" for i, value in enumerate(cs) if value > 2.0}


def test_small_samples_rejected():
    try:
        ks_test_normal([0.1, 0.2, 0.3])
    except DomainError:
        return
    raise AssertionError("fewer than five residuals should raise")


if __name__ == "__main__":
    tests = [(name, fn) for name, fn in sorted(globals().items()) if name.startswith("test_") and callable(fn)]
    failed = 0
    for name, fn in tests:
        try:
            fn()
            print(f"✅ {name}")
        except Exception as e:
            failed += 1
            print(f"❌ {name}: {e}")
    print(f"\n📊 {len(tests) - failed}/{len(tests)} passed")
    sys.exit(1 if failed else 0)
