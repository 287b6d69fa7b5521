import math

import numpy as np
import pytest

from fhsoftedge.distributions import (ablowitz_segur_cdf, finite_n_cdf, thinned_conditioned_cdf,
                                      tracy_widom_cdf)
from fhsoftedge.errors import ValidationError



def fredholm_airy(s, m=80, length=16.0):
    """det(I - K_Airy) on L^2(s, inf) by Gauss-Legendre discretization."""
    from fhsoftedge.kernel import airy_kernel

    t, w = np.polynomial.legendre.leggauss(m)
    x = s + (t + 1) * length / 2
    w = w * length / 2
    X, Y = np.meshgrid(x, x, indexing="ij")
    r = np.sqrt(w)
    return float(np.linalg.det(np.eye(m) - r[:, None] * airy_kernel(X, Y) * r[None, :]))


def test_tracy_widom_extremes():
    assert tracy_widom_cdf(8.0) >= 1 - 1e-10
    assert tracy_widom_cdf(-8.0) <= 1e-4


@pytest.mark.parametrize("s", [-3.0, -2.0, -1.0, 0.0, 1.0])
def test_tracy_widom_two_routes_and_fredholm(s):
    a = tracy_widom_cdf(s, "pii")
    b = tracy_widom_cdf(s, "sigma")
    assert abs(a - b) < 1e-9
    assert a == pytest.approx(fredholm_airy(s), abs=1e-10)


def test_tracy_widom_monotone():
    s = np.linspace(-6, 4, 21)
    v = [tracy_widom_cdf(x) for x in s]
    assert np.all(np.diff(v) > 0) and 0 < v[0] and v[-1] < 1


def test_bad_route():
    with pytest.raises(ValidationError):
        tracy_widom_cdf(0.0, "fredholm")


@pytest.mark.parametrize("omega", [0.0, 0.36, 1.0])
def test_thinned_two_routes_alpha_zero(omega):
    k = math.sqrt(1 - omega)
    for s in (-2.5, 0.0, 1.5):
        assert abs(thinned_conditioned_cdf(s, 0.0, omega) - ablowitz_segur_cdf(s, k)) < 1e-6


def test_thinned_identity_and_range():
    assert thinned_conditioned_cdf(-3.0, 0.7, 1.0) == 1.0
    vals = [thinned_conditioned_cdf(s, 0.5, 0.4) for s in np.linspace(-4, 4, 9)]
    assert np.all(np.diff(vals) >= 0)
    assert all(0 < v <= 1 for v in vals)
    with pytest.raises(ValidationError):
        thinned_conditioned_cdf(0.0, 0.5, 1.5)


def test_finite_n_identities():
    assert finite_n_cdf(0.3, 16, 0.5, 1.0) == 1.0
    vals = [finite_n_cdf(s, 24, 0.4, 0.3) for s in np.linspace(-3, 3, 7)]
    assert np.all(np.diff(vals) >= 0) and all(0 <= v <= 1 for v in vals)
    _, label = finite_n_cdf(0.0, 8, 0.2, 0.5 + 0.2j, with_label=True)
    assert label == "non-probabilistic"
    _, label = finite_n_cdf(0.0, 8, 0.2, 0.5, with_label=True)
    assert label == "probability"


def test_finite_n_near_tracy_widom():
    assert abs(finite_n_cdf(0.0, 64, 0.0, 0.0) - tracy_widom_cdf(0.0)) < 0.05


@pytest.mark.parametrize("alpha,omega", [(0.0, 0.0), (0.5, 0.5)])
def test_finite_n_convergence_trend(alpha, omega):
    for s in (-2.0, 0.0, 2.0):
        lim = thinned_conditioned_cdf(s, alpha, omega)
        e = [abs(finite_n_cdf(s, n, alpha, omega) - lim) for n in (16, 32, 64)]
        assert e[2] < e[1] < e[0]
