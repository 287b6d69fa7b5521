import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import airy, gamma

from fhsoftedge.errors import ValidationError
from fhsoftedge.painleve import (PainleveParams, a_coefficients, c_coefficients, exp_amplitude, first_integral,
                                 p34_from_sigma, pii_minus_series, sigma_minus_series, sigma_tail_minus,
                                 sigma_tail_plus, solve_pii_airy, solve_pii_alpha, solve_sigma, special_functions,
                                 u_from_pii, u_tail_minus)


@settings(max_examples=40)
@given(st.floats(-0.49, 3.0), st.floats(1e-6, 50.0), st.floats(-3.1, 3.1))
def test_beta_reproduces_omega(alpha, r, phi):
    omega = r * cmath.exp(1j * phi)
    b = PainleveParams(alpha, omega).beta
    assert abs(b.real) < 0.5
    assert abs(cmath.exp(-2j * math.pi * b) - omega) <= 1e-12 * abs(omega)


def test_beta_imaginary_for_positive_omega_and_validation():
    assert PainleveParams(0.2, 0.5).beta.real == 0
    assert PainleveParams(0.2, 0.0).beta is None
    with pytest.raises(ValidationError):
        PainleveParams(-0.5, 1.0)
    with pytest.raises(ValidationError):
        PainleveParams(0.2, -0.1)


def test_leading_tail_coefficients():
    for a in (0.3, 1.0, 2.5):
        ac = a_coefficients(a, 2)
        cc = c_coefficients(a, 2)
        assert ac[0] == pytest.approx(1) and ac[1] == pytest.approx(a / 2)
        assert cc[0] == pytest.approx(1) and cc[1] == pytest.approx(-a)


def test_sigma_tail_plus_examples():
    assert sigma_tail_plus(5.0, PainleveParams(0.0, 1.0)) == (0j, 0j)
    sig, _ = sigma_tail_plus(9.0, PainleveParams(0.0, 0.5))
    assert sig.real == pytest.approx(1 / (16 * math.pi) / 9 * math.exp(-36), rel=1e-13)
    sig, _ = sigma_tail_plus(100.0, PainleveParams(1.0, 1.0), order=1)
    assert sig.real == pytest.approx(-20 * (1 + 0.5e-3), rel=1e-13)


def test_sigma_tail_plus_derivative_is_consistent():
    p = PainleveParams(0.7, 0.3)
    h = 1e-4
    _, d = sigma_tail_plus(9.0, p)
    fd = (sigma_tail_plus(9.0 + h, p)[0] - sigma_tail_plus(9.0 - h, p)[0]) / (2 * h)
    assert abs(d - fd) < 1e-9


def test_sigma_tail_plus_signals_attachment_point():
    with pytest.raises(ValidationError) as exc:
        sigma_tail_plus(1.0, PainleveParams(1.0, 0.0), tol=1e-12)
    assert exc.value.diagnostics["suggested_s"] > 1.0


def test_sigma_tail_minus_examples():
    assert sigma_tail_minus(-10.0, PainleveParams(0.25, 0.0))[0].real == pytest.approx(25.0)
    assert sigma_tail_minus(-10.0, PainleveParams(0.0, 0.0))[0].real == pytest.approx(25.0125)
    p = PainleveParams(0.0, 0.5)
    sig = sigma_tail_minus(-20.0, p)[0]
    lead = 2j * p.beta * math.sqrt(20)
    assert abs(lead.imag) < 1e-15 and lead.real > 0
    assert abs(sig - lead) < 0.02
    assert abs(u_tail_minus(-10.0, PainleveParams(0.0, 0.0)) - (5 - 0.00125)) < 1e-12


def test_minus_series_leading_terms():
    S = sigma_minus_series(0.3)
    # sigma(-t) = t^2/4 + (16 a^2 - 1)/8 * (-1/t) + ...
    assert S.coef(4) == pytest.approx(0.25)
    assert S.coef(-2) == pytest.approx(-(16 * 0.09 - 1) / 8)


def test_pii_left_series_coefficients():
    for a in (0.0, 0.5, 1.3):
        nu = 2 * a + 0.5
        Q = pii_minus_series(nu)
        r = math.sqrt(0.5)
        assert Q.coef(1) == pytest.approx(r)
        assert Q.coef(-2) / r == pytest.approx(nu / math.sqrt(2))
        assert Q.coef(-5) / r == pytest.approx(-(1 + 6 * nu * nu) / 8)


def test_trivial_solution(sigma_cache):
    sol = sigma_cache(0.0, 1.0)
    assert np.all(sol.sigma == 0)
    assert np.all(p34_from_sigma(sol)["u"] == 0)


@pytest.mark.parametrize("alpha,omega", [(0.3, 0.0), (0.5, 0.5), (1.2, 0.0), (0.4, 0.8), (2.0, 0.3)])
def test_sigma_residuals(alpha, omega, sigma_cache):
    sol = sigma_cache(alpha, omega)
    res = first_integral(sol.grid, sol.sigma, sol.sigma1, sol.sigma2, alpha)
    assert np.max(np.abs(res)) <= sol.residual_bound * (1 + 1e-12)
    assert sol.diagnostics["relative_residual"] < 1e-9
    d = p34_from_sigma(sol)
    assert np.max(d["residual"]) < 1e-8 * max(1.0, np.max(np.abs(d["u"])) ** 3)


def test_sigma_minus_band_alpha_point_three(sigma_cache):
    p = PainleveParams(0.3, 0.0)
    sol = sigma_cache(0.3, 0.0, -15.0)
    e10 = abs(sol.evaluate(-10.0)[0] - sigma_tail_minus(-10.0, p)[0])
    e15 = abs(sol.evaluate(-15.0)[0] - sigma_tail_minus(-15.0, p)[0])
    assert e10 < 5e-3 and e15 < e10


def test_u_plus_tail(sigma_cache):
    sol = solve_sigma(PainleveParams(1.0, 1.0), -5.0, 100.0, n_grid=11)
    u = p34_from_sigma(sol)["u"][-1]
    assert u == pytest.approx(0.1 * (1 - 1e-3), rel=1e-5)


def test_sigma_derivative_is_minus_q_squared(sigma_cache):
    sol = sigma_cache(0.0, 0.5)
    q = solve_pii_airy(math.sqrt(0.5), (-6.0, 6.0))
    s = np.linspace(-6, 6, 61)
    assert np.max(np.abs(sol.evaluate(s)[1] + q.evaluate(s)[0] ** 2)) < 1e-6
    # and sigma itself is the integral of q^2
    assert np.max(np.abs(sol.evaluate(s)[0] - q.evaluate(s)[2])) < 1e-6


def test_hastings_mcleod_tails():
    q = solve_pii_airy(1.0, (-12.0, 8.0))
    x = np.array([-12.0, -10.0])
    assert np.allclose(q.evaluate(x)[0], np.sqrt(-x / 2), rtol=2e-3)
    assert q.evaluate(6.0)[0] == pytest.approx(airy(6.0)[0], rel=1e-6)
    assert np.all(solve_pii_airy(0.0).q == 0)


def test_pii_alpha_airy_case():
    sol = solve_pii_alpha(PainleveParams(0.0, 1.0), (-6.0, 2.0))
    x = np.linspace(-4, 2.5, 27)
    z = -2 ** (-1 / 3) * x
    ai, aip, _, _ = airy(z)
    assert np.max(np.abs(sol.evaluate(x)[0] - (-2 ** (-1 / 3) * aip / ai))) < 1e-7


@pytest.mark.parametrize("alpha,omega", [(0.5, 0.0), (0.3, 0.5), (1.0, 0.5)])
def test_route_equivalence(alpha, omega, sigma_cache):
    p = PainleveParams(alpha, omega)
    s = np.linspace(-6, 6, 49)
    u1 = -sigma_cache(alpha, omega).evaluate(s)[1]
    u2 = u_from_pii(solve_pii_alpha(p, (-6.0, 6.0)), s)
    assert np.max(np.abs(u1 - u2)) < 1e-6


def test_exp_amplitude():
    assert exp_amplitude(0.0) == pytest.approx(1 / (8 * math.pi))
    assert exp_amplitude(0.5) == pytest.approx(gamma(2) / (2 ** 6 * math.pi))


def test_special_functions():
    assert special_functions("gamma", 1.0) == pytest.approx(1.0, rel=1e-15)
    assert special_functions("gamma", 0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    assert special_functions("airy_ai", 0.0) == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-14)
    assert special_functions("airy_ai_prime", 0.0) == pytest.approx(-3 ** (-1 / 3) / math.gamma(1 / 3), rel=1e-14)
    with pytest.raises(ValidationError):
        special_functions("gamma", -2.0)
    with pytest.raises(ValidationError):
        special_functions("zeta", 1.0)


def test_invalid_ranges():
    with pytest.raises(ValidationError):
        solve_sigma(PainleveParams(0.3, 0.0), 2.0, 1.0)
    with pytest.raises(ValidationError):
        sigma_tail_plus(-1.0, PainleveParams(0.3, 0.0))
    with pytest.raises(ValidationError):
        sigma_tail_minus(1.0, PainleveParams(0.3, 0.0))
