#!/usr/bin/env python3
"""
Tests for the MBUR distribution: density, CDF, quantile, sampler and fit_alpha.
"""

import math
import sys
from pathlib import Path

import numpy as np
import scipy.integrate
import scipy.stats

# Add the current directory to the path so we can import our modules
sys.path.insert(0, str(Path(__file__).parent))

from mbur_qreg.errors import DomainError
from mbur_qreg.mbur import (
    MburParams,
    QuantileLevel,
    c_factor,
    cdf,
    fit_alpha,
    log_likelihood,
    log_pdf,
    pdf,
    quantile,
    sample,
)


def test_c_factor_known_levels():
    assert math.isclose(c_factor(0.5), 0.5, abs_tol=1e-12)
    assert math.isclose(c_factor(0.25), 0.326352, abs_tol=1e-6)
    assert math.isclose(c_factor(0.75), 0.673648, abs_tol=1e-6)
    for u in (0.05, 0.3, 0.9):
        c = c_factor(u)
        assert math.isclose(3 * c ** 2 - 2 * c ** 3, u, abs_tol=1e-12)


def test_quantile_level_precomputes_log():
    level = QuantileLevel.of(0.5)
    assert math.isclose(level.ln_c, math.log(0.5), abs_tol=1e-12)


def test_log_pdf_hand_value():
    # alpha^2 = 1, y = 0.5: ln 6 + ln 0.5 + ln 0.5
    assert math.isclose(log_pdf(0.5, 1.0), 0.405465, abs_tol=1e-6)


def test_density_normalizes():
    for alpha in (0.5, 0.8, 1.3):
        params = MburParams(alpha)
        total, _ = scipy.integrate.quad(lambda y: pdf(y, params), 0.0, 1.0, epsabs=1e-12, epsrel=1e-12)
        assert abs(total - 1.0) <= 1e-8, f"alpha={alpha}: integral {total}"


def test_quantile_inverts_cdf():
    params = MburParams(0.7)
    u = np.linspace(0.01, 0.99, 99)
    assert np.allclose(cdf(quantile(u, params), params), u, atol=1e-10)


def test_median_is_half_to_alpha_squared():
    params = MburParams(0.9)
    assert math.isclose(quantile(0.5, params), 0.5 ** 0.81, rel_tol=1e-12)


def test_cdf_boundaries():
    params = MburParams(1.1)
    assert cdf(0.0, params) == 0.0
    assert math.isclose(cdf(1.0, params), 1.0, abs_tol=1e-15)
    try:
        cdf(1.5, params)
    except DomainError:
        return
    raise AssertionError("cdf outside [0, 1] should raise")


def test_params_validation():
    for alpha in (0.0, -1.0, math.inf):
        try:
            MburParams(alpha)
        except DomainError:
            continue
        raise AssertionError(f"alpha={alpha} should be rejected")


def test_sampler_is_deterministic():
    params = MburParams(0.8)
    first = sample(500, params, seed=42)
    second = sample(500, params, seed=42)
    assert np.array_equal(first, second)
    assert not np.array_equal(first, sample(500, params, seed=43))
    assert np.all((first > 0) & (first < 1))


def test_sampler_matches_cdf():
    params = MburParams(0.8)
    draws = sample(100_000, params, seed=2024)
    result = scipy.stats.kstest(draws, lambda y: cdf(y, params))
    assert result.pvalue > 0.01, f"KS p-value {result.pvalue}"


def test_fit_alpha_matches_grid_oracle():
    ys = sample(200, MburParams(0.8), seed=3)
    fitted = fit_alpha(ys)
    assert fitted.converged

    grid = np.linspace(0.3, 2.0, 17001)
    best = max(log_likelihood(ys, MburParams(a)) for a in grid)
    # the optimizer must reach the grid optimum and the grid spacing bounds the gap
    assert fitted.log_likelihood >= best - 1e-6
    assert fitted.log_likelihood - best < 1e-3
    assert math.isclose(fitted.log_likelihood, log_likelihood(ys, fitted.params), abs_tol=1e-9)


def test_fit_alpha_rejects_boundary_values():
    try:
        fit_alpha([0.2, 0.5, 1.0, 0.3])
    except DomainError as e:
        assert "2" in str(e)
        return
    raise AssertionError("y = 1 should be rejected")


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
