import math

import mpmath
import numpy as np
import pytest
from scipy.special import eval_hermite

from fhsoftedge.errors import ValidationError
from fhsoftedge.orthopoly import (double_scaling_mu, evaluate_orthonormal, gram_determinant_log, hankel_det_ratio,
                                  hankel_logderiv, hankel_scaling_report, recurrence_scaling_report,
                                  sigma_iv_residual, stieltjes_recurrence)
from fhsoftedge.weight_quad import WeightSpec


def test_hermite_for_shifted_mu():
    t = stieltjes_recurrence(WeightSpec(0.0, 1.7, 1.0), 30)
    assert np.max(np.abs(t.a)) < 1e-12
    assert np.max(np.abs(t.b2 - np.arange(30) / 2)) < 1e-12
    assert t.error_estimate < 1e-10


def test_generalized_hermite_pattern():
    t = stieltjes_recurrence(WeightSpec(0.7, 0.0, 1.0), 20)
    k = np.arange(20)
    ref = np.where(k % 2 == 0, k / 2, (k + 1.4) / 2)
    assert np.max(np.abs(t.b2[1:] - ref[1:])) < 1e-12
    assert np.max(np.abs(t.a)) < 1e-12


def _gram_oracle(mu, n, dps=40):
    """Half-line-truncated Gaussian moments from the incomplete Gamma function;
    b2 and h from Hankel determinants, a from the shifted determinants."""
    with mpmath.workdps(dps):
        mu = mpmath.mpf(mu)

        def m(k):
            # integral_-inf^mu x^k e^(-x^2) dx via the binomial expansion around 0
            return mpmath.quad(lambda x: x ** k * mpmath.exp(-x * x), [-mpmath.inf, mu])

        M = [m(k) for k in range(2 * n + 2)]

        def D(j):
            return mpmath.mpf(1) if j == 0 else mpmath.det(mpmath.matrix([[M[r + c] for c in range(j)]
                                                                          for r in range(j)]))

        def Dx(j):
            # determinant with the last column shifted by one (gives the subleading coefficient)
            if j == 0:
                return mpmath.mpf(0)
            rows = [[M[r + c] for c in range(j - 1)] + [M[r + j]] for r in range(j)]
            return mpmath.det(mpmath.matrix(rows))

        d = [D(j) for j in range(n + 1)]
        dx = [Dx(j) for j in range(n + 1)]
        h = [d[k + 1] / d[k] for k in range(n)]
        a = [dx[k + 1] / d[k + 1] - dx[k] / d[k] for k in range(n)]
        return np.array([float(v) for v in a]), np.array([float(v) for v in h])


def test_half_gaussian_against_gram_determinants():
    t = stieltjes_recurrence(WeightSpec(0.0, 1.0, 0.0), 6)
    a, h = _gram_oracle(1.0, 6)
    assert np.max(np.abs(t.a - a)) < 1e-10
    assert np.max(np.abs(t.h - h) / h) < 1e-10
    assert np.allclose(t.b2[1:], t.h[1:] / t.h[:-1], rtol=1e-12)


def test_evaluate_orthonormal_hermite():
    t = stieltjes_recurrence(WeightSpec(0.0, 0.0, 1.0), 6)
    vals, ls = evaluate_orthonormal(t, [0.0, 1.0], 3)
    p = vals * np.exp(ls)
    assert p[0, 0] == pytest.approx(math.pi ** -0.25, rel=1e-15)
    assert abs(p[1, 0]) < 1e-16
    for k in range(4):
        ref = eval_hermite(k, 1.0) * math.exp(0) / math.sqrt(2 ** k * math.factorial(k) * math.sqrt(math.pi))
        assert p[k, 1] == pytest.approx(ref, rel=1e-13)
    with pytest.raises(ValidationError):
        evaluate_orthonormal(t, [0.0], 8)


def test_sum_of_squares_increases_and_rescaling():
    t = stieltjes_recurrence(WeightSpec(0.3, 0.5, 0.4), 150)
    vals, ls = evaluate_orthonormal(t, [1e4, 0.2], 149)
    assert np.all(np.isfinite(vals)) and ls[0] > 0
    sq = np.cumsum(vals[:, 1] ** 2)
    assert np.all(np.diff(sq) >= 0)


def test_hankel_logderiv_against_gram_fd():
    spec = WeightSpec(0.5, 1.5, 0.0)
    t = stieltjes_recurrence(spec, 5)
    h = 1e-4
    fd = (gram_determinant_log(spec.with_mu(1.5 + h), 5) - gram_determinant_log(spec.with_mu(1.5 - h), 5)) / (2 * h)
    assert hankel_logderiv(t) == pytest.approx(float(fd), abs=1e-6)
    assert abs(hankel_logderiv(stieltjes_recurrence(WeightSpec(0.0, 0.8, 1.0), 12))) < 1e-12


def test_norm_product_matches_determinant():
    for n in (3, 7, 10):
        spec = WeightSpec(0.45, 0.3, 0.6)
        t = stieltjes_recurrence(spec, n)
        assert float(np.sum(t.log_h[:n])) == pytest.approx(float(gram_determinant_log(spec, n)), rel=1e-8)


def test_hankel_ratio_identities():
    spec = WeightSpec(0.3, 0.2, 0.5)
    assert hankel_det_ratio(spec, spec, 8) == pytest.approx(1.0, rel=1e-14)
    # jump left of all the mass rescales the weight globally
    w = 0.37
    r = hankel_det_ratio(WeightSpec(0.0, -8.0, w), WeightSpec(0.0, -8.0, 1.0), 6)
    assert r == pytest.approx(w ** 6, rel=1e-8)


def test_hankel_ratio_is_polynomial_in_omega():
    n = 3
    ws = np.linspace(0.1, 2.0, n + 2)
    vals = [hankel_det_ratio(WeightSpec(0.2, 0.4, w), WeightSpec(0.2, 0.4, 1.0), n) for w in ws]
    coef = np.polyfit(ws, vals, n + 1)
    assert abs(coef[0]) < 1e-9 * max(abs(c) for c in coef)


def test_complex_omega_table():
    t = stieltjes_recurrence(WeightSpec(0.3, 1.0, 0.5 + 0.4j), 20)
    assert np.iscomplexobj(t.a)
    assert np.isfinite(t.log_h).all()


def test_sigma_iv_trivial_case():
    assert sigma_iv_residual(WeightSpec(0.0, 0.5, 1.0), 6) < 1e-20


def test_translation_covariance_hermite():
    t0 = stieltjes_recurrence(WeightSpec(0.0, 0.0, 0.4), 10)
    t1 = stieltjes_recurrence(WeightSpec(0.0, 0.0, 0.4).with_mu(0.0), 10)
    assert np.allclose(t0.a, t1.a)


def test_soft_edge_point():
    assert double_scaling_mu(16, 0.0) == pytest.approx(math.sqrt(32))


def test_trivial_reports():
    ra, rb = recurrence_scaling_report(0.0, 1.0, 0.5, [8, 16])
    assert np.max(ra.errors) < 1e-12 and np.max(rb.errors) < 1e-12
    h = hankel_scaling_report(0.0, 1.0, 0.5, [8, 16])
    assert np.max(h.errors) < 1e-12


def test_recurrence_errors_improve():
    ra, rb = recurrence_scaling_report(0.0, 0.0, 0.0, [16, 64])
    assert ra.errors[1] < ra.errors[0] and rb.errors[1] < rb.errors[0]
    assert -0.8 < ra.fitted_rate < -0.2


def test_hankel_leading_correction_sign():
    from fhsoftedge.painleve import PainleveParams, solve_sigma

    sig = solve_sigma(PainleveParams(0.0, 0.5), -8.0, 8.0).evaluate(1.0)[0]
    rep = hankel_scaling_report(0.0, 0.5, 1.0, [32])
    assert np.sign(np.real(rep.finite_n_values[0])) == np.sign(sig)
