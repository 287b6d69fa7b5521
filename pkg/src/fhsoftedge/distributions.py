"""Limit laws and their finite-n counterparts."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import SolverError, ValidationError
from .orthopoly import double_scaling_mu, hankel_det_ratio
from .painleve import RIGHT_END, PainleveParams, exp_amplitude, sigma_exp_mode, _eval_mode, solve_pii_airy, \
    solve_sigma
from .weight_quad import WeightSpec

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(24)


@lru_cache(maxsize=32)
def _sigma(alpha, omega, s_min):
    return solve_sigma(PainleveParams(alpha, omega), s_min=s_min, s_max=8.0)


@lru_cache(maxsize=8)
def _hastings_mcleod(x_lo):
    return solve_pii_airy(1.0, x_range=(x_lo, 8.0))


def _s_floor(s):
    # solutions are cached on a coarse set of left ends
    return float(min(-10.0, 5 * math.floor(s / 5.0) - 5))


def _panel_integral(f, a, b, width=0.5):
    """Gauss-Legendre on panels of the given width."""
    if b <= a:
        return 0.0
    m = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, m + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
    w = (half[:, None] * _WEIGHTS[None, :]).ravel()
    return complex(np.sum(w * f(x)))


def _log_tc(s, alpha, omega):
    """log of the thinned/conditioned law as (value, tail error bound)."""
    s_min = _s_floor(s)
    one = _sigma(alpha, 1.0, s_min)
    cut = RIGHT_END
    if omega == 1:
        return 0.0, 0.0
    other = _sigma(alpha, omega, s_min)

    def diff(t):
        return one.evaluate(t)[0] - other.evaluate(t)[0]

    val = _panel_integral(diff, s, cut) if s < cut else 0.0
    # beyond the cut the difference is -(1 - omega) C B(t) with B the
    # decaying mode; integrate its leading Laplace term
    b0 = _eval_mode(sigma_exp_mode(alpha), max(cut, s), 4.0 / 3.0)[0]
    tail = -(1 - omega) * exp_amplitude(alpha) * b0 / (2 * math.sqrt(max(cut, s)))
    val += tail
    if abs(val.imag) > 1e-8 * max(1.0, abs(val)):
        raise SolverError("thinned law integral has an imaginary part", value=val)
    return val.real, abs(tail)


def thinned_conditioned_cdf(s, alpha, omega):
    """exp(integral_s^inf sigma(t; alpha, 1) - sigma(t; alpha, omega) dt).

    Both solutions are built on the same omega = 0 backbone, so their
    common algebraic growth cancels exactly in the difference."""
    omega = complex(omega)
    if omega.imag != 0 or not 0 <= omega.real <= 1:
        raise ValidationError("omega must be real in [0, 1]")
    val, _ = _log_tc(float(s), float(alpha), omega.real)
    return float(math.exp(val))


def tracy_widom_cdf(s, route="pii"):
    """GUE Tracy-Widom distribution F_2(s).

    ``route="pii"``: exp(-integral (x - s) q^2) with Hastings-McLeod q;
    ``route="sigma"``: the thinned law at alpha = 0, omega = 0.
    """
    s = float(s)
    if route == "pii":
        sol = _hastings_mcleod(_s_floor(s))
        return float(math.exp(sol.log_cdf(s)))
    if route == "sigma":
        return thinned_conditioned_cdf(s, 0.0, 0.0)
    raise ValidationError("route must be 'pii' or 'sigma'")


def ablowitz_segur_cdf(s, k):
    """exp(-integral_s^inf (x - s) q(x)^2 dx) with q ~ k Ai at +inf."""
    sol = solve_pii_airy(k, x_range=(min(float(s), -8.0), 8.0))
    return float(math.exp(sol.log_cdf(float(s)).real))


def finite_n_cdf(s, n, alpha, omega, precision="double-double", with_label=False):
    """H_n(mu_n; alpha, omega) / H_n(mu_n; alpha, 1) at the soft-edge point.

    For omega outside [0, 1] the value is not a probability; with
    ``with_label`` a pair ``(value, label)`` is returned where label is
    ``"probability"`` or ``"non-probabilistic"``.
    """
    omega = complex(omega)
    mu = double_scaling_mu(int(n), float(s))
    if omega == 1:
        val = 1.0
    else:
        val = hankel_det_ratio(WeightSpec(alpha, mu, omega), WeightSpec(alpha, mu, 1.0), int(n), precision)
    prob = omega.imag == 0 and 0 <= omega.real <= 1
    if with_label:
        return val, ("probability" if prob else "non-probabilistic")
    return val
