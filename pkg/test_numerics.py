#!/usr/bin/env python3
"""
Tests for the special functions and dense linear algebra in mbur_qreg.numerics.
"""

import math
import sys
from pathlib import Path

import numpy as np

# Add the current directory to the path so we can import our modules
sys.path.insert(0, str(Path(__file__).parent))

from mbur_qreg.errors import DomainError, EvaluationError, SingularMatrixError
from mbur_qreg.numerics import (
    chi_squared_sf,
    hessian_central_diff,
    ks_p_value,
    ln_gamma,
    mat_inverse,
    ols_fit,
    std_normal_cdf,
    std_normal_quantile,
    sym_eigenvalues,
)


def test_normal_cdf_and_quantile():
    assert std_normal_cdf(0.0) == 0.5
    assert math.isclose(std_normal_cdf(1.959963984540054), 0.975, abs_tol=1e-12)
    assert math.isclose(std_normal_quantile(0.975), 1.959963984540054, abs_tol=1e-12)
    values = std_normal_cdf(np.array([-1.0, 0.0, 1.0]))
    assert values.shape == (3,)
    assert math.isclose(values[0] + values[2], 1.0, abs_tol=1e-15)


def test_normal_quantile_rejects_closed_endpoints():
    for p in (0.0, 1.0, -0.1):
        try:
            std_normal_quantile(p)
        except DomainError:
            continue
        raise AssertionError(f"std_normal_quantile({p}) should fail")


def test_ln_gamma():
    assert math.isclose(ln_gamma(5.0), math.log(24.0), rel_tol=1e-14)
    assert math.isclose(ln_gamma(0.5), 0.5 * math.log(math.pi), rel_tol=1e-14)


def test_chi_squared_sf():
    assert chi_squared_sf(0.0, 3) == 1.0
    assert math.isclose(chi_squared_sf(3.841458820694124, 1), 0.05, rel_tol=1e-9)
    # four degrees of freedom have the closed form e^{-x/2}(1 + x/2)
    x = 25.818
    assert math.isclose(chi_squared_sf(x, 4), math.exp(-x / 2) * (1 + x / 2), rel_tol=1e-10)
    assert math.isclose(chi_squared_sf(23.9192, 1), 1.0046e-6, rel_tol=0.01)


def test_ks_p_value_bounds():
    assert ks_p_value(0.0, 40) == 1.0
    previous = 1.0
    for d in (0.05, 0.1, 0.2, 0.4):
        p = ks_p_value(d, 40)
        assert 0.0 <= p <= previous, f"p must decrease with d, got {p} after {previous}"
        previous = p
    assert ks_p_value(1.0, 20) < 1e-6


def test_mat_inverse():
    inverse = mat_inverse([[4.0, 7.0], [2.0, 6.0]])
    assert np.allclose(inverse, [[0.6, -0.7], [-0.2, 0.4]], atol=1e-14)


def test_mat_inverse_singular_names_column():
    try:
        mat_inverse([[1.0, 2.0], [2.0, 4.0]])
    except SingularMatrixError as e:
        assert e.column == 1
        return
    raise AssertionError("singular matrix should raise")


def test_sym_eigenvalues_descending():
    values = sym_eigenvalues([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(values, [3.0, 1.0], atol=1e-12)
    try:
        sym_eigenvalues([[1.0, 2.0], [0.0, 1.0]])
    except DomainError:
        return
    raise AssertionError("asymmetric input should raise")


def test_ols_exact_line():
    x = np.arange(5.0)
    design = np.column_stack([np.ones(5), x])
    result = ols_fit(design, 1.0 + 2.0 * x)
    assert np.allclose(result.coefficients, [1.0, 2.0], atol=1e-10)
    assert math.isclose(result.r_squared, 1.0, abs_tol=1e-12)
    assert result.slope_p_values[0] < 1e-6


def test_ols_constant_response():
    x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    result = ols_fit(np.column_stack([np.ones(5), x]), np.full(5, 3.0))
    assert result.r_squared == 0.0
    assert result.slope_p_values[0] == 1.0
    assert math.isclose(result.coefficients[1], 0.0, abs_tol=1e-12)


def test_ols_rank_deficient():
    x = np.arange(6.0)
    design = np.column_stack([np.ones(6), x, 2 * x])
    try:
        ols_fit(design, x ** 2)
    except SingularMatrixError:
        return
    raise AssertionError("collinear design should raise")


def test_hessian_of_quadratic():
    def f(v):
        return v[0] ** 2 + 3 * v[0] * v[1] + 2 * v[1] ** 2

    at_origin = hessian_central_diff(lambda v: v[0] ** 2, [0.0])
    assert math.isclose(at_origin[0, 0], 2.0, abs_tol=1e-6)

    hessian = hessian_central_diff(f, [0.7, -1.3])
    assert np.allclose(hessian, [[2.0, 3.0], [3.0, 4.0]], atol=1e-4)
    assert np.array_equal(hessian, hessian.T)


def test_hessian_non_finite_evaluation():
    try:
        hessian_central_diff(lambda v: math.log(v[0]) if v[0] > 0 else math.inf, [0.0])
    except EvaluationError as e:
        assert len(e.point) == 1
        return
    raise AssertionError("non-finite evaluation should raise")


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
