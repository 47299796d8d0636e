#!/usr/bin/env python3
"""
Tests for the quantile links and the linear-predictor to alpha^2 map.
"""

import math
import sys
from pathlib import Path

import numpy as np

# Add the current directory to the path so we can import our modules
sys.path.insert(0, str(Path(__file__).parent))

from mbur_qreg.errors import DomainError, LinkOverflowError
from mbur_qreg.links import LinkKind, alpha_sq_from_phi, inv_link, link, log_quantile_from_phi
from mbur_qreg.mbur import QuantileLevel

MEDIAN = QuantileLevel.of(0.5)


def test_parse_link_tokens():
    assert LinkKind.parse("LOGIT") is LinkKind.LOGIT
    assert LinkKind.parse(" cloglog ") is LinkKind.CLOGLOG
    assert LinkKind.parse(LinkKind.LOGLOG) is LinkKind.LOGLOG
    try:
        LinkKind.parse("probit")
    except DomainError as e:
        assert "logit" in str(e)
        return
    raise AssertionError("unknown link should raise")


def test_known_values():
    assert inv_link(LinkKind.LOGIT, 0.0) == 0.5
    assert math.isclose(link(LinkKind.LOGIT, 0.8), math.log(4.0), abs_tol=1e-12)
    assert math.isclose(inv_link(LinkKind.CLOGLOG, 0.0), 1.0 - math.exp(-1.0), abs_tol=1e-15)
    assert math.isclose(inv_link(LinkKind.LOGLOG, 0.0), math.exp(-1.0), abs_tol=1e-15)


def test_round_trip_in_well_conditioned_ranges():
    ranges = {
        LinkKind.LOGIT: (-10.0, 10.0),
        LinkKind.CLOGLOG: (-10.0, 2.0),
        LinkKind.LOGLOG: (-8.0, 5.0),
    }
    for kind, (low, high) in ranges.items():
        phi = np.linspace(low, high, 101)
        back = link(kind, inv_link(kind, phi))
        assert np.allclose(back, phi, atol=1e-10, rtol=0), f"{kind.value} round trip"


def test_link_rejects_boundary():
    for kind in LinkKind:
        for m in (0.0, 1.0):
            try:
                link(kind, m)
            except DomainError:
                continue
            raise AssertionError(f"{kind.value} link({m}) should raise")


def test_alpha_sq_reparameterization():
    # fitted median 0.8 under the median level
    assert math.isclose(alpha_sq_from_phi(LinkKind.LOGIT, link(LinkKind.LOGIT, 0.8), MEDIAN),
                        math.log(0.8) / math.log(0.5), abs_tol=1e-12)
    assert math.isclose(alpha_sq_from_phi(LinkKind.LOGIT, 0.0, MEDIAN), 1.0, abs_tol=1e-15)


def test_loglog_closed_form():
    phi = np.array([-3.0, 0.0, 2.5])
    expected = -np.exp(phi) / MEDIAN.ln_c
    assert np.allclose(alpha_sq_from_phi(LinkKind.LOGLOG, phi, MEDIAN), expected, rtol=1e-14)


def test_alpha_sq_positive_over_wide_range():
    wide = np.linspace(-30.0, 30.0, 121)
    for kind, phi in ((LinkKind.LOGIT, wide), (LinkKind.LOGLOG, wide),
                      (LinkKind.CLOGLOG, np.linspace(-30.0, 3.0, 67))):
        values = alpha_sq_from_phi(kind, phi, MEDIAN)
        assert np.all(values > 0), f"{kind.value} produced non-positive alpha^2"
        assert np.all(np.isfinite(values))


def test_cloglog_alpha_sq_far_below_zero():
    values = alpha_sq_from_phi(LinkKind.CLOGLOG, np.array([-800.0, -745.5, -100.0]), MEDIAN)
    assert np.all(np.isfinite(values)) and np.all(values > 0)
    assert math.isclose(values[0], -800.0 / MEDIAN.ln_c, rel_tol=1e-12)
    assert math.isclose(values[0], 1154.16, abs_tol=0.01)
    assert math.isclose(alpha_sq_from_phi(LinkKind.CLOGLOG, -800.0, MEDIAN), values[0], rel_tol=1e-15)

    # both evaluation branches agree where they meet
    below = log_quantile_from_phi(LinkKind.CLOGLOG, np.array([-37.5, -37.0, -36.5]))
    assert np.allclose(below, [-37.5, -37.0, -36.5], rtol=1e-15, atol=0.0)


def test_log_quantile_matches_log_of_inverse_link():
    phi = np.linspace(-5.0, 2.0, 29)
    for kind in LinkKind:
        assert np.allclose(log_quantile_from_phi(kind, phi), np.log(inv_link(kind, phi)), rtol=1e-12, atol=1e-14)


def test_overflow_guard():
    try:
        alpha_sq_from_phi(LinkKind.CLOGLOG, 701.0, MEDIAN)
    except LinkOverflowError:
        return
    raise AssertionError("phi above 700 should raise LinkOverflowError")


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
