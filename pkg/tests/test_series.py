import math

import numpy as np
import pytest

from fhsoftedge.series import Series, leading_exponent, optimal_sum, solve_coefficients


def test_monomial_arithmetic():
    t = Series.monomial(1.0, 0, 2)
    s = t * t + 3 * t
    assert s.coef(4) == 1 and s.coef(2) == 3
    d = s.deriv()
    assert d.coef(2) == 2 and d.coef(0) == 3


def test_integrate_extracts_log_term():
    f = Series.from_terms(0, 0, [2.0, 0.0, 5.0])  # 2 + 5/t
    F, log_coef = f.integrate()
    assert log_coef == 5.0
    assert F.coef(2) == 2.0


def test_solve_coefficients_reproduces_exponential_integral_series():
    # y' + y = 1/t has the asymptotic solution sum_k k! t^-(k+1)
    length = 60

    def res(y):
        return y.deriv() + y - Series.monomial(1.0, 0, -2)

    y0 = Series.monomial(1.0, 0, -2, length, exact=False)
    y = solve_coefficients(res, y0, range(-4, -2 - length // 2, -2))
    for k in range(8):
        assert y.coef(-2 * (k + 1)) == pytest.approx(math.factorial(k), rel=1e-12)


def test_optimal_sum_stops_at_smallest_term():
    length = 80
    c = np.zeros(length, dtype=complex)
    c[::2] = [(-1) ** k * math.factorial(k) for k in range(length // 2)]
    y = Series(0j, -2, c)
    t = 10.0
    val, omitted = optimal_sum(y, t)
    # the exponential-integral reference value e^t E1(t)
    from scipy.special import exp1

    ref = math.exp(t) * exp1(t)
    assert abs(val - ref) < 3 * omitted
    assert omitted < 1e-3


def test_leading_exponent_of_a_linear_equation():
    # t y' = rho y with y = t^rho exactly: residual first coefficient rho - 2
    def res_of_shift(r):
        y = Series.monomial(1.0, r, 0, 4, exact=False)
        return y.deriv().times_power(2) - 2.0 * y

    assert abs(leading_exponent(res_of_shift, 1.7) - 2.0) < 1e-8
