import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gammaln

from foxwright import (
    AccuracyWarning,
    ContourSpec,
    FoxWrightParams,
    HDensitySpec,
    HypothesisError,
    InputError,
    PoleError,
    h_density,
)
from foxwright.hfunction import (
    log_mellin,
    meijer_g_reduction_check,
    mellin_integrand,
    verify_lambda_transform,
    verify_laplace_rep,
    verify_moment,
    verify_reciprocal_laplace,
    verify_stieltjes_rep,
)

EXPM1 = FoxWrightParams([(1, 1)], [(2, 1)])
SQUARED = FoxWrightParams([(1, 1), (1, 1)], [(2, 1), (2, 1)])


def beta_density(a, b, t):
    """Density with Mellin transform Gamma(a + s) / Gamma(b + s)."""
    return math.exp(a * math.log(t) + (b - a - 1) * math.log1p(-t) - gammaln(b - a))


def test_mellin_integrand_examples():
    assert mellin_integrand(EXPM1, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert mellin_integrand(EXPM1, 1j) == pytest.approx(0.5 - 0.5j, rel=1e-14)
    assert mellin_integrand(FoxWrightParams([(1, 1)], [(1, 1)]), 2.5 + 3j) == pytest.approx(1.0)
    with pytest.raises(PoleError):
        mellin_integrand(EXPM1, -1.5)


def test_density_closed_forms():
    spec = HDensitySpec(EXPM1)
    assert h_density(spec, 0.5) == pytest.approx(0.5, rel=1e-12)
    assert h_density(spec, 2.0) == 0.0
    assert h_density(HDensitySpec(SQUARED), 0.5) == pytest.approx(-math.log(0.5) * 0.5, rel=1e-12)
    t = np.array([0.01, 0.3, 0.99])
    np.testing.assert_allclose(h_density(spec, t), t, rtol=1e-11)


def test_line_contour_agrees():
    # 1/(s+1)^2 decays fast enough for a truncated vertical line
    line = HDensitySpec(SQUARED, ContourSpec(kind="line", offset=0.5, half_length=400.0, step=0.02))
    assert h_density(line, 0.5, warn=False) == pytest.approx(0.5 * math.log(2), abs=1e-5)


def test_density_spec_validation():
    with pytest.raises(HypothesisError):
        HDensitySpec(FoxWrightParams([(1, 0.5)], [(1, 1)]))
    with pytest.raises(HypothesisError):
        HDensitySpec(FoxWrightParams([(1, 1)], [(1, 1)]))
    with pytest.raises(PoleError):
        HDensitySpec(EXPM1, ContourSpec(kind="line", offset=-2.0))
    with pytest.raises(InputError):
        h_density(HDensitySpec(EXPM1), -1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 4.0), st.floats(0.15, 4.0), st.floats(0.02, 0.97))
def test_density_matches_beta_form(a, gap, t):
    spec = HDensitySpec(FoxWrightParams([(a, 1)], [(a + gap, 1)]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        value = h_density(spec, t)
    expected = beta_density(a, a + gap, t)
    assert value == pytest.approx(expected, rel=1e-7, abs=1e-9 * max(1.0, expected))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_log_mellin_conjugation(a, x, y):
    p = FoxWrightParams([(a, 1.5), (1.0, 0.5)], [(a + 1.0, 1.0), (2.0, 1.0)])
    s = complex(abs(x) + 0.1, y)
    assert log_mellin(p, np.conj(s)) == pytest.approx(np.conj(log_mellin(p, s)), rel=1e-13, abs=1e-13)


def test_identities_on_closed_form_case():
    spec = HDensitySpec(EXPM1)
    for k in range(4):
        assert verify_moment(spec, k).rel_residual <= 1e-10
    r = verify_laplace_rep(spec, 1.0)
    assert r.series == pytest.approx(math.e - 1)
    assert r.rel_residual <= 1e-10
    assert verify_laplace_rep(spec, 0.0).integral == pytest.approx(1.0, rel=1e-10)
    assert verify_laplace_rep(spec, -3.0).integral == pytest.approx((1 - math.exp(-3)) / 3, rel=1e-10)
    r = verify_stieltjes_rep(spec, 1.0, 0.5)
    assert r.integral == pytest.approx(math.log(1.5) / 0.5, rel=1e-10)
    assert verify_stieltjes_rep(spec, 2.0, 0.25).rel_residual <= 1e-10
    assert verify_stieltjes_rep(spec, 3.0, 0.0).integral == pytest.approx(math.gamma(3.0), rel=1e-10)


def test_stieltjes_against_scipy_quadrature():
    # independent check of the integral side with the closed-form density t
    spec = HDensitySpec(EXPM1)
    sigma, z = 2.0, 0.25
    expected, _ = quad(lambda t: (1 + t * z) ** (-sigma), 0.0, 1.0, epsabs=0, epsrel=1e-13)
    assert verify_stieltjes_rep(spec, sigma, z).integral == pytest.approx(expected, rel=1e-10)


def test_reciprocal_and_lambda_examples():
    r = verify_reciprocal_laplace(FoxWrightParams([(1, 1)], [(1, 1)]), 2.0)
    assert r.series == pytest.approx(math.exp(0.5), rel=1e-14)
    assert r.rel_residual <= 1e-8
    assert verify_reciprocal_laplace(EXPM1, 4.0).rel_residual <= 1e-6
    big = verify_reciprocal_laplace(EXPM1, 1e6)
    assert big.integral == pytest.approx(1.0, rel=1e-5)
    assert verify_lambda_transform(EXPM1, 1.0, 1.0, 2.0).rel_residual <= 1e-6
    assert verify_lambda_transform(EXPM1, 2.0, 1.0, 3.0).rel_residual <= 1e-6


def test_meijer_reduction():
    assert meijer_g_reduction_check(EXPM1, 0.3).abs_residual <= 1e-12
    r = meijer_g_reduction_check(FoxWrightParams([(1, 2)], [(2, 2)]), 0.25)
    assert r.series == pytest.approx(0.25, rel=1e-10)
    assert r.abs_residual <= 1e-10
    r = meijer_g_reduction_check(FoxWrightParams([(1, 2)], [(2, 2)]), 1.5)
    assert r.series == 0.0 and r.integral == 0.0
