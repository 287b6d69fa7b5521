"""Connection problems for the sigma-form of Painleve II, Painleve XXXIV and
Painleve II.

The sigma function solves

    (s'')^2 + 4 (s')^3 - 4 t (s')^2 + 4 s' s - (2 alpha)^2 = 0

with algebraic decay ``-2 alpha sqrt(t) (1 + alpha/2 t^(-3/2) + ...)`` at
``+inf``; the jump ``omega`` only shows up in an exponentially small term
there. Differentiating removes the square and gives the regular equation
``s''' = -6 s'^2 + 4 t s' - 2 s``, whose first integral is the left-hand
side above; all integrations use that third-order form and the first
integral becomes a residual check.

Strategy:

* ``omega = 0``: Chebyshev collocation + Newton between the two tails
  (the solution is a separatrix, any shooting from one end is unstable).
* ``omega != 0``: ``sigma = sigma_0 + delta`` where ``delta`` is started
  on the exponentially small mode ``-omega * C * B(t)`` at the right end
  and integrated backwards. Toward smaller ``t`` this mode dominates, so
  the integration is stable; once ``delta`` dominates the integration
  switches to the full equation. Integrating ``sigma`` itself from the
  tail cannot work, because the omega-dependence sits below the
  resolution of the asymptotic series there.

PII transcendents are handled the same way in ``solve_pii_alpha``; the
Airy-normalised family is in ``solve_pii_airy``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import airy, gamma as _gamma, loggamma

from .chebyshev import ConvergenceError, bary_eval, cheb_cumint_weights, cheb_diff, cheb_points, solve_collocation
from .errors import SolverError, ValidationError
from .series import Series, leading_exponent, optimal_sum, solve_coefficients

RIGHT_END = 10.0  # where the +inf tails are attached
LEFT_END = -12.0  # default left end for the omega = 0 collocation
JOIN = -2.0  # switch from the delta equation to the full one


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class PainleveParams:
    alpha: float
    omega: complex = 0.0

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a) or a <= -0.5:
            raise ValidationError("alpha must satisfy alpha > -1/2, got %r" % (self.alpha,))
        w = complex(self.omega)
        if w.imag == 0 and w.real < 0:
            raise ValidationError("omega must not lie on the negative real axis")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "omega", w)

    @property
    def beta(self):
        """``beta`` with ``omega = exp(-2 pi i beta)``, principal log; None at omega = 0."""
        if self.omega == 0:
            return None
        return 1j * cmath.log(self.omega) / (2 * math.pi)

    @property
    def is_real(self):
        return self.omega.imag == 0

    @property
    def trivial(self):
        return self.alpha == 0 and self.omega == 1


def exp_amplitude(alpha):
    """``Gamma(2a+1) / (2^(3+6a) pi)``, the scale of the exponentially small term."""
    return _gamma(2 * alpha + 1) / (2 ** (3 + 6 * alpha) * math.pi)


# ---------------------------------------------------------------------------
# formal tail series

_T = Series.monomial(1.0, 0, 2)  # t
_SQRT_T = Series.monomial(1.0, 0, 1)  # t^(1/2)


def _sigma_residual(alpha):
    def res(S):
        s1 = S.deriv()
        s2 = s1.deriv()
        return s2 * s2 + 4 * s1 * s1 * s1 - 4 * _T * s1 * s1 + 4 * s1 * S - 4 * alpha ** 2

    return res


@lru_cache(maxsize=64)
def sigma_plus_series(alpha, length=160):
    """Algebraic part of sigma at +inf as a :class:`Series` in t**(1/2)."""
    if alpha == 0:
        return Series.from_terms(0, 1, np.zeros(length))
    S0 = Series.monomial(-2 * alpha, 0, 1, length, exact=False)
    return solve_coefficients(_sigma_residual(alpha), S0, range(0, -(2 * length) // 5, -1))


@lru_cache(maxsize=64)
def sigma_minus_series(alpha, length=120):
    """sigma(-t) at t -> +inf for omega = 0, as a series in t**(1/2)."""
    def res(L):
        l1 = L.deriv()
        l2 = l1.deriv()
        return l2 * l2 - 4 * l1 * l1 * l1 + 4 * _T * l1 * l1 - 4 * l1 * L - 4 * alpha ** 2

    L0 = Series.monomial(0.25, 0, 4, length, exact=False)
    return solve_coefficients(res, L0, range(3, 3 - (2 * length) // 5, -1))


def a_coefficients(alpha, m):
    """a_0..a_m of ``sigma ~ -2 alpha sqrt(t) sum a_k t^(-3k/2)``."""
    if alpha == 0:
        raise ValidationError("the a_k normalisation divides by alpha")
    S = sigma_plus_series(alpha)
    return np.array([(S.coef(1 - 3 * k) / (-2 * alpha)).real for k in range(m + 1)])


def c_coefficients(alpha, m):
    """c_0..c_m of ``u ~ alpha t^(-1/2) sum c_k t^(-3k/2)`` (u = -sigma')."""
    if alpha == 0:
        raise ValidationError("the c_k normalisation divides by alpha")
    U = -sigma_plus_series(alpha).deriv()
    return np.array([(U.coef(-1 - 3 * k) / alpha).real for k in range(m + 1)])


def _d_exp(f: Series, rate: float) -> Series:
    """(E f)' / E for E = exp(-rate * t^(3/2)): f' - (3/2) rate t^(1/2) f."""
    return f.deriv() - (1.5 * rate) * (_SQRT_T * f)


@lru_cache(maxsize=64)
def sigma_exp_mode(alpha, length=240):
    """The decaying mode of the sigma equation linearised about its +inf tail.

    Returns ``(rho, f, f1, f2)``: the mode is ``B = t^rho exp(-4/3 t^1.5) f``
    with ``f = 1 + ...``; ``f1``, ``f2`` give ``B'`` and ``B''`` the same way.
    """
    S1 = sigma_plus_series(alpha).deriv()

    def residual(f):
        d1 = _d_exp(f, 4.0 / 3.0)
        d2 = _d_exp(d1, 4.0 / 3.0)
        d3 = _d_exp(d2, 4.0 / 3.0)
        return d3 + 12 * (S1 * d1) - 4 * d1.times_power(2) + 2 * f

    def of_shift(r):
        return residual(Series.monomial(1.0, r, 0, 8, exact=False))

    rho = leading_exponent(of_shift, -(3 * alpha + 1))
    rho = complex(round(rho.real, 12), 0.0) if abs(rho.imag) < 1e-10 else rho
    f = solve_coefficients(residual, Series.monomial(1.0, rho, 0, length, exact=False), range(-1, -(2 * length) // 5, -1))
    f1 = _d_exp(f, 4.0 / 3.0)
    f2 = _d_exp(f1, 4.0 / 3.0)
    return rho, f, f1, f2


def _eval_mode(mode, t, rate):
    """Values of the mode parts at t (the t**rho factor lives in the series)."""
    _, *parts = mode
    E = math.exp(-rate * t ** 1.5)
    vals = []
    for p in parts:
        v, _ = optimal_sum(p, t)
        vals.append(v * E)
    return vals


# ---------------------------------------------------------------------------
# tails


def sigma_tail_plus(s, params: PainleveParams, order=None, tol=None):
    """sigma and sigma' from the +inf expansion.

    ``order=m`` keeps a_0..a_m; ``None`` sums to the smallest term. The
    exponential part is the leading term with amplitude
    ``(exp(2 pi i alpha) - omega) Gamma(2a+1)/(2^(3+6a) pi)``. With ``tol``
    given, raises if the first omitted algebraic term exceeds it.
    """
    s = float(s)
    if s <= 0:
        raise ValidationError("the +inf tail needs s > 0")
    a = params.alpha
    S = sigma_plus_series(a)
    if order is None:
        sig, omitted = optimal_sum(S, s)
        dsig, _ = optimal_sum(S.deriv(), s)
    else:
        keep = Series(S.shift, S.kmax, np.where(np.arange(len(S.coeffs)) <= 3 * order, S.coeffs, 0))
        sig, dsig = keep(s)[0], keep.deriv()(s)[0]
        omitted = abs(S.coef(1 - 3 * (order + 1))) * s ** (0.5 - 1.5 * (order + 1))
    if tol is not None and omitted > tol:
        raise ValidationError("s = %g is too small for tolerance %g at this order" % (s, tol),
                              omitted=omitted, suggested_s=_attach_point(S, tol))
    amp = (cmath.exp(2j * math.pi * a) - params.omega) * exp_amplitude(a)
    E = s ** (-(3 * a + 1)) * math.exp(-4.0 / 3.0 * s ** 1.5)
    sig = sig + amp * E
    dsig = dsig + amp * E * (-2 * math.sqrt(s) - (3 * a + 1) / s)
    return complex(sig), complex(dsig)


def _attach_point(S, tol):
    for s in np.arange(1.0, 60.0, 0.5):
        if optimal_sum(S, s)[1] < tol:
            return float(s)
    return float("inf")


def _theta(s, alpha, beta):
    y = -s
    return 4.0 / 3.0 * y ** 1.5 - alpha * math.pi - 6j * beta * math.log(2) - 3j * beta * math.log(y)


def _rgamma_ratio(a, b):
    """Gamma(a)/Gamma(b) with 1/Gamma(b) = 0 at poles of Gamma(b)."""
    if _is_pole(b):
        return 0.0
    if _is_pole(a):
        raise ValidationError("Gamma pole in the oscillatory amplitude")
    return complex(np.exp(loggamma(complex(a)) - loggamma(complex(b))))


def _is_pole(z):
    z = complex(z)
    return abs(z.imag) < 1e-14 and z.real <= 0 and abs(z.real - round(z.real)) < 1e-14


def sigma_tail_minus(s, params: PainleveParams):
    """The displayed -inf behaviour of sigma and its derivative.

    omega = 0:  s^2/4 + (16 a^2 - 1)/(8 s);
    otherwise:  2 i beta sqrt(-s) + i/(4s) [2i(beta^2 - a^2)
                + G+ e^{i theta} - G- e^{-i theta}].
    """
    s = float(s)
    if s >= 0:
        raise ValidationError("the -inf tail needs s < 0")
    a = params.alpha
    if params.omega == 0:
        c = (16 * a * a - 1) / 8
        return complex(s * s / 4 + c / s), complex(s / 2 - c / (s * s))
    b = params.beta
    gp = _rgamma_ratio(1 + a - b, a + b)
    gm = _rgamma_ratio(1 + a + b, a - b)
    th = _theta(s, a, b)
    dth = -2 * math.sqrt(-s) - 3j * b / s  # d theta / ds
    br = 2j * (b * b - a * a) + gp * cmath.exp(1j * th) - gm * cmath.exp(-1j * th)
    dbr = 1j * dth * (gp * cmath.exp(1j * th) + gm * cmath.exp(-1j * th))
    sig = 2j * b * math.sqrt(-s) + 1j / (4 * s) * br
    dsig = -1j * b / math.sqrt(-s) - 1j / (4 * s * s) * br + 1j / (4 * s) * dbr
    return complex(sig), complex(dsig)


def u_tail_minus(s, params: PainleveParams):
    """The displayed -inf behaviour of u = -sigma'."""
    s = float(s)
    a = params.alpha
    if params.omega == 0:
        return complex(-s / 2 + (16 * a * a - 1) / 8 / (s * s))
    b = params.beta
    th = _theta(s, a, b)
    gp = _rgamma_ratio(1 + a - b, a + b)
    gm = _rgamma_ratio(1 + a + b, a - b)
    return complex((1j * b + 0.5 * gp * cmath.exp(1j * th) + 0.5 * gm * cmath.exp(-1j * th)) / math.sqrt(-s))


# ---------------------------------------------------------------------------
# solutions


@dataclass(frozen=True)
class SigmaSolution:
    params: PainleveParams
    grid: np.ndarray
    sigma: np.ndarray
    sigma1: np.ndarray
    sigma2: np.ndarray
    s_plus: float
    s_minus: float
    tail_orders: tuple
    residual_bound: float
    diagnostics: dict = field(default_factory=dict, repr=False)
    _evaluator: object = field(default=None, repr=False, compare=False)

    def evaluate(self, s):
        """(sigma, sigma', sigma'') at arbitrary s in range (scalars or arrays)."""
        scalar = np.ndim(s) == 0
        s = np.atleast_1d(np.asarray(s, dtype=float))
        y = self._evaluator(s)
        out = tuple(y[:, i] for i in range(3))
        if self.params.is_real:
            out = tuple(v.real for v in out)
        return tuple(v[0] for v in out) if scalar else out

    @property
    def u(self):
        return -self.sigma1


def first_integral(s, sig, s1, s2, alpha):
    """(s'')^2 + 4 s'^3 - 4 t s'^2 + 4 s' s - 4 alpha^2; zero on solutions."""
    return s2 * s2 + 4 * s1 ** 3 - 4 * s * s1 * s1 + 4 * s1 * sig - 4 * alpha * alpha


def _rhs3(s, y):
    return np.stack([y[:, 1], y[:, 2], -6 * y[:, 1] ** 2 + 4 * s * y[:, 1] - 2 * y[:, 0]], axis=1)


def _jac3(s, y):
    J = np.zeros((len(s), 3, 3))
    J[:, 0, 1] = 1
    J[:, 1, 2] = 1
    J[:, 2, 0] = -2
    J[:, 2, 1] = -12 * y[:, 1] + 4 * s
    return J


def _right_data(alpha, b):
    """(sigma, sigma', sigma'') of the omega = 0 solution at s = b."""
    S = sigma_plus_series(alpha)
    v = [optimal_sum(p, b)[0].real for p in (S, S.deriv(), S.deriv().deriv())]
    omitted = optimal_sum(S, b)[1]
    return v, omitted


def _sigma0_collocation(alpha, a, b, tol, guess=None):
    """omega = 0 solution on [a, b] as (nodes, values, info).

    Newton starts from a blend of the two tails; if that fails the
    solution is continued from smaller alpha.
    """
    try:
        return _sigma0_collocation_from(alpha, a, b, tol, guess)
    except ConvergenceError:
        if guess is not None or alpha <= 0.25:
            raise
    lower = max(alpha - 0.5, 0.0) if alpha > 0 else 0.0
    s0, y0, _ = _sigma0_collocation(lower, a, b, tol)
    s, y, info = _sigma0_collocation(alpha, a, b, tol, guess=(s0, y0))
    info["continued_from"] = lower
    return s, y, info


def _sigma0_collocation_from(alpha, a, b, tol, guess):
    (sr, dr, _), om_r = _right_data(alpha, b)
    L = sigma_minus_series(alpha)
    sl, om_l = optimal_sum(L, -a)
    sl = sl.real
    n = int(60 + 5 * (b - a))
    prev = None
    for attempt in range(6):
        s = cheb_points(n, a, b)
        if prev is None and guess is not None:
            y0 = bary_eval(guess[0], guess[1], s)
        elif prev is None:
            w = 1 / (1 + np.exp(-2 * s))
            g = np.where(s < 0, s * s / 4, 0.0) * (1 - w) - 2 * alpha * np.sqrt(np.abs(s)) * w
            D = cheb_diff(n, a, b)
            y0 = np.stack([g, D @ g, D @ D @ g], axis=1)
        else:
            y0 = bary_eval(prev[0], prev[1], s)
        bcs = [("right", 0, sr), ("right", 1, dr), ("left", 0, sl)]
        s, y, steps = solve_collocation(_rhs3, _jac3, bcs, a, b, y0, n, tol=1e-13)
        if prev is not None:
            check = np.linspace(a, b, 97)
            diff = np.abs(bary_eval(s, y, check) - bary_eval(prev[0], prev[1], check)).max()
            if diff < tol * 0.1:
                info = dict(n=n, newton=steps, refinement_change=diff, omitted_right=om_r, omitted_left=om_l)
                return s, y, info
        prev = (s, y)
        n = int(n * 1.4)
    raise ConvergenceError("collocation did not converge under refinement", n=n)


def _tail_eval(alpha, omega, mode):
    """(sigma, sigma', sigma'') from the +inf expansions, vectorised."""
    S = sigma_plus_series(alpha)
    parts = (S, S.deriv(), S.deriv().deriv())
    C = exp_amplitude(alpha)

    def ev(s):
        out = np.zeros((len(s), 3), dtype=complex)
        for i, t in enumerate(s):
            for j, p in enumerate(parts):
                out[i, j] = optimal_sum(p, t)[0]
            if omega != 0:
                B = _eval_mode(mode, t, 4.0 / 3.0)
                for j in range(3):
                    out[i, j] += -omega * C * B[j]
        return out

    return ev


def _delta_rhs(sig0):
    def f(s, y):
        _, d1, _ = sig0(s)
        return [y[1], y[2], -6 * (2 * d1 * y[1] + y[1] * y[1]) + 4 * s * y[1] - 2 * y[0]]

    return f


def _full_rhs(s, y):
    return [y[1], y[2], -6 * y[1] * y[1] + 4 * s * y[1] - 2 * y[0]]


def _ivp(fun, t0, t1, y0, rtol, atol):
    sol = solve_ivp(fun, (t0, t1), np.asarray(y0, dtype=complex), method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True)
    if sol.status != 0:
        raise SolverError("integration failed: %s" % sol.message, t_last=float(sol.t[-1]))
    return sol


def solve_sigma(params: PainleveParams, s_min=-10.0, s_max=8.0, tol=1e-9, n_grid=401) -> SigmaSolution:
    """Solve the sigma connection problem on [s_min, s_max].

    ``residual_bound`` is the largest first-integral residual on the output
    grid; a :class:`SolverError` is raised if it exceeds ``tol`` scaled by
    the size of the terms it is made of.
    """
    if not s_min < s_max:
        raise ValidationError("need s_min < s_max")
    a_par, om = params.alpha, params.omega
    grid = np.linspace(s_min, s_max, n_grid)
    if params.trivial:
        z = np.zeros(n_grid)

        def ev0(s):
            return np.zeros((len(s), 3), dtype=complex)

        return SigmaSolution(params, grid, z, z, z, s_max, s_min, (0, 0), 0.0, dict(route="trivial"), ev0)

    b = RIGHT_END
    a = min(s_min, LEFT_END)
    cs, cy, info = _sigma0_collocation(a_par, a, b, tol)
    tail = _tail_eval(a_par, om, sigma_exp_mode(a_par) if om != 0 else None)

    def sig0(s):
        return bary_eval(cs, cy, np.atleast_1d(s))[0]

    pieces = []  # (lo, hi, evaluator) covering the range
    if om == 0:
        def ev_bvp(s):
            return bary_eval(cs, cy, s).astype(complex)

        pieces.append((a, b, ev_bvp))
        info["route"] = "collocation"
    else:
        mode = sigma_exp_mode(a_par)
        rho = mode[0]
        C = exp_amplitude(a_par)
        B = _eval_mode(mode, b, 4.0 / 3.0)
        d0 = [-om * C * v for v in B]
        join = max(JOIN, s_min) if s_min < b else b
        scale = abs(d0[0])
        dsol = _ivp(_delta_rhs(sig0), b, join, d0, rtol=1e-13, atol=1e-30 * max(scale, 1e-300) + 1e-300)

        def ev_delta(s):
            d = dsol.sol(s).T
            return bary_eval(cs, cy, s) + d

        pieces.append((join, b, ev_delta))
        info.update(route="delta", join=join, mode_exponent=complex(rho))
        if s_min < join:
            y_join = ev_delta(np.array([join]))[0]
            fsol = _ivp(_full_rhs, join, s_min, y_join, rtol=1e-13, atol=1e-14)
            pieces.append((s_min, join, lambda s: fsol.sol(s).T))

    def evaluator(s):
        s = np.asarray(s, dtype=float)
        out = np.zeros((len(s), 3), dtype=complex)
        done = np.zeros(len(s), dtype=bool)
        right = s > b
        if right.any():
            out[right] = tail(s[right])
            done |= right
        for lo, hi, ev in pieces:
            m = (~done) & (s >= lo - 1e-12) & (s <= hi + 1e-12)
            if m.any():
                out[m] = ev(s[m])
                done |= m
        if not done.all():
            raise ValidationError("s outside the solved range")
        return out

    y = evaluator(grid)
    res = np.abs(first_integral(grid, y[:, 0], y[:, 1], y[:, 2], a_par))
    size = np.abs(y[:, 2]) ** 2 + 4 * np.abs(y[:, 1]) ** 3 + 4 * np.abs(grid * y[:, 1] ** 2) \
        + 4 * np.abs(y[:, 1] * y[:, 0]) + 4 * a_par ** 2
    rel = float(np.max(res / np.maximum(size, 1.0)))
    info["relative_residual"] = rel
    if rel > max(tol, 1e-12) * 10:
        raise SolverError("sigma solution fails the first-integral check", relative=rel)
    real = params.is_real
    sig, s1, s2 = (y[:, i].real if real else y[:, i] for i in range(3))
    res = np.abs(first_integral(grid, sig, s1, s2, a_par))
    return SigmaSolution(params, grid, sig, s1, s2, b, a, (int(info.get("n", 0)), len(sigma_minus_series(a_par).coeffs)),
                         float(res.max()), info, evaluator)


def p34_from_sigma(sol: SigmaSolution):
    """u = -sigma' with u' and u'' and the regular PXXXIV residual
    ``u u'' - u'^2/2 - 4u^3 - 2 s u^2 + 2 alpha^2``."""
    s = sol.grid
    u = -sol.sigma1
    u1 = -sol.sigma2
    u2 = 6 * u * u + 4 * s * u + 2 * sol.sigma  # -sigma''' from the ODE
    a = sol.params.alpha
    res = u * u2 - u1 * u1 / 2 - 4 * u ** 3 - 2 * s * u * u + 2 * a * a
    return dict(s=s, u=u, u1=u1, u2=u2, residual=np.abs(res))


# ---------------------------------------------------------------------------
# Painleve II with parameter nu = 2 alpha + 1/2


@lru_cache(maxsize=64)
def pii_minus_series(nu, length=120):
    """q(-y) as y -> +inf: sqrt(y/2) (1 + ...), for q'' = x q + 2 q^3 - nu."""
    def res(Q):
        return Q.deriv().deriv() + _T * Q - 2 * Q * Q * Q + nu

    Q0 = Series.monomial(1 / math.sqrt(2), 0, 1, length, exact=False)
    return solve_coefficients(res, Q0, range(0, -(2 * length) // 5, -1))


@lru_cache(maxsize=64)
def pii_plus_series(nu, length=120):
    """q(x) as x -> +inf on the algebraic branch nu/x + ..."""
    def res(q):
        return q.deriv().deriv() - _T * q - 2 * q * q * q + nu

    if nu == 0:
        return Series.from_terms(0, -2, np.zeros(length))
    q0 = Series.monomial(nu, 0, -2, length, exact=False)
    return solve_coefficients(res, q0, range(-3, -3 - (2 * length) // 5, -1))


@lru_cache(maxsize=64)
def pii_exp_mode(nu, length=240):
    """Decaying mode at x -> -inf of PII linearised about ``pii_minus_series``.

    In y = -x the mode is ``y^rho exp(-(2 sqrt 2/3) y^1.5) f``; returns
    ``(rho, f, f1)`` with ``f1`` giving the y-derivative.
    """
    Q = pii_minus_series(nu)
    Q2 = Q * Q
    rate = 2 * math.sqrt(2) / 3

    def residual(f):
        d1 = _d_exp(f, rate)
        d2 = _d_exp(d1, rate)
        return d2 + f.times_power(2) - 6 * (Q2 * f)

    def of_shift(r):
        return residual(Series.monomial(1.0, r, 0, 8, exact=False))

    rho = leading_exponent(of_shift, -(1.5 * nu + 0.25))
    rho = complex(round(rho.real, 12), 0.0) if abs(rho.imag) < 1e-10 else rho
    f = solve_coefficients(residual, Series.monomial(1.0, rho, 0, length, exact=False), range(-1, -(2 * length) // 5, -1))
    return rho, f, _d_exp(f, rate)


@dataclass(frozen=True)
class PIISolution:
    """q and q' on ``grid``; ``poles`` lists real-axis poles crossed."""

    grid: np.ndarray
    q: np.ndarray
    q1: np.ndarray
    last_good: float
    poles: tuple = ()
    diagnostics: dict = field(default_factory=dict, repr=False)
    _evaluator: object = field(default=None, repr=False, compare=False)
    _real: bool = field(default=True, repr=False, compare=False)

    def _eval(self, x):
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = self._evaluator(x)
        if self._real:
            y = y.real
        return (y[0] if scalar else y.T)

    def evaluate(self, x):
        """(q, q') at x; q is infinite at the entries of ``poles``."""
        y = self._eval(x)
        return y[0], y[1]

    def miura(self, x):
        """U = q' + q^2 + x/2, regular across residue +1 poles of q."""
        return self._eval(x)[2]


def _rhs2(nu):
    def f(x, y):
        return np.stack([y[:, 1], x * y[:, 0] + 2 * y[:, 0] ** 3 - nu], axis=1)

    def j(x, y):
        J = np.zeros((len(x), 2, 2))
        J[:, 0, 1] = 1
        J[:, 1, 0] = x + 6 * y[:, 0] ** 2
        return J

    return f, j


def _collocate_2(nu, xl, ql, xr, qr, guess, tol):
    f, j = _rhs2(nu)
    n = int(60 + 5 * (xr - xl))
    prev = None
    for _ in range(6):
        x = cheb_points(n, xl, xr)
        if prev is None:
            g = guess(x)
            y0 = np.stack([g, cheb_diff(n, xl, xr) @ g], axis=1)
        else:
            y0 = bary_eval(prev[0], prev[1], x)
        x, y, steps = solve_collocation(f, j, [("left", 0, ql), ("right", 0, qr)], xl, xr, y0, n, tol=1e-13)
        if prev is not None:
            check = np.linspace(xl, xr, 97)
            if np.abs(bary_eval(x, y, check) - bary_eval(prev[0], prev[1], check)).max() < tol * 0.1:
                return x, y, dict(n=n, newton=steps)
        prev = (x, y)
        n = int(n * 1.4)
    raise ConvergenceError("PII collocation did not converge under refinement", n=n)


def _blowup_event(limit):
    def ev(x, y):
        return limit - abs(y[0])

    ev.terminal = True
    return ev


S_SCALE = 2.0 ** (1.0 / 3.0)


def solve_pii_alpha(params: PainleveParams, s_range=(-6.0, 8.0), tol=1e-9, n_grid=401) -> PIISolution:
    """q(x) for q'' = x q + 2 q^3 - (2 alpha + 1/2) in the family tied to
    sigma(s; alpha, omega). ``s_range`` is in the sigma variable; the
    solution is returned on ``x = -2^(1/3) s`` together with ``u_from_q``.

    The omega = 0 member is found by collocation; for omega != 0 the
    exponentially small perturbation at x -> -inf is integrated forward.
    Poles of q stop the integration; ``last_good`` reports where.
    """
    a_par, om = params.alpha, params.omega
    nu = 2 * a_par + 0.5
    s_lo, s_hi = s_range
    xL = -S_SCALE * max(RIGHT_END, s_hi)
    xR = S_SCALE * max(-s_lo, -LEFT_END)
    Qm = pii_minus_series(nu)
    qL_vec = [optimal_sum(p, -xL)[0].real for p in (Qm, Qm.deriv())]
    qp = pii_plus_series(nu)
    qR = optimal_sum(qp, xR)[0].real

    def guess(x):
        w = 1 / (1 + np.exp(-2 * x))
        return np.sqrt(np.maximum(-x, 0) / 2 + 0.25) * (1 - w) + nu / np.sqrt(x * x + 1) * w

    xs, ys, info = _collocate_2(nu, xL, qL_vec[0], xR, qR, guess, tol)
    x_out_lo, x_out_hi = -S_SCALE * s_hi, -S_SCALE * s_lo
    last_good = x_out_hi
    pieces = []
    poles = []
    if om == 0:
        pieces.append((xL, xR, lambda x: bary_eval(xs, ys, x).astype(complex)))
    else:
        rho, f, f1 = pii_exp_mode(nu)
        amp = -om * 2.0 ** (-5 * a_par - 3) * _gamma(2 * a_par + 1) / math.pi
        y0 = -xL
        E = math.exp(-2 * math.sqrt(2) / 3 * y0 ** 1.5)
        dq = amp * optimal_sum(f, y0)[0] * E
        dq1 = -amp * optimal_sum(f1, y0)[0] * E  # d/dx = -d/dy

        def q0(x):
            return bary_eval(xs, ys, np.atleast_1d(x))[0]

        def drhs(x, y):
            qq, _ = q0(x)
            d = y[0]
            return [y[1], x * d + 2 * (3 * qq * qq * d + 3 * qq * d * d + d ** 3)]

        join = min(S_SCALE * (-JOIN), x_out_hi)
        dsol = solve_ivp(drhs, (xL, join), np.array([dq, dq1], dtype=complex), method="DOP853", rtol=1e-13,
                         atol=1e-30 * abs(dq) + 1e-300, dense_output=True)
        if dsol.status != 0:
            raise SolverError("PII perturbation integration failed", t_last=float(dsol.t[-1]))
        pieces.append((xL, join, lambda x: bary_eval(xs, ys, x) + dsol.sol(x).T))
        if x_out_hi > join:
            yj = pieces[-1][2](np.array([join]))[0]
            more, last_good, poles, stop = _pii_through_poles(nu, join, yj, x_out_hi)
            pieces.extend(more)
            if stop:
                info["blowup"] = stop

    pieces = [(lo, hi, _with_miura(ev)) if len(ev(np.array([lo]))[0]) == 2 else (lo, hi, ev) for lo, hi, ev in pieces]

    def evaluator(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros((len(x), 3), dtype=complex)
        done = np.zeros(len(x), dtype=bool)
        for lo, hi, ev in pieces:
            m = (~done) & (x >= lo - 1e-12) & (x <= hi + 1e-12)
            if m.any():
                out[m] = ev(x[m])
                done |= m
        if not done.all():
            raise ValidationError("x outside the solved range (last good point %g)" % last_good)
        return out

    hi = min(x_out_hi, last_good)
    grid = np.linspace(x_out_lo, hi, n_grid)
    y = evaluator(grid)
    if params.is_real:
        y = y.real
    info.update(nu=nu, x_range=(xL, xR))
    return PIISolution(grid, y[:, 0], y[:, 1], last_good, tuple(poles), info, evaluator, params.is_real)


def _with_miura(ev):
    def f(x):
        y = ev(x)
        return np.column_stack([y[:, 0], y[:, 1], y[:, 1] + y[:, 0] ** 2 + x / 2])

    return f


def _pii_through_poles(nu, x_start, y_start, x_end, limit=20.0, radius=0.3, n_circle=128):
    """Integrate PII forward along the real axis, going around poles.

    When |q| passes ``limit`` the integration detours on both half circles
    around the pole; the two passes must agree (nothing else inside). On
    the circle the residue and exact location of the pole follow from
    trapezoidal contour sums, and values inside the circle from Cauchy's
    formula. Residue -1 poles (where U itself is singular) end the
    integration.

    Returns ``(pieces, last_good, poles, stop)`` where each piece is
    ``(lo, hi, f)`` with ``f(x) -> (n, 3)`` columns q, q', U.
    """
    def f(x, y):
        return np.array([y[1], x * y[0] + 2 * y[0] ** 3 - nu])

    opts = dict(method="DOP853", rtol=1e-13, atol=1e-14, dense_output=True)
    pieces, poles = [], []
    x, y = x_start, np.asarray(y_start, dtype=complex)
    while True:
        sol = solve_ivp(f, (x, x_end), y, events=_blowup_event(limit), **opts)
        if sol.status == 0:
            pieces.append((x, x_end, _with_miura(lambda s, sol=sol: sol.sol(s).T)))
            return pieces, x_end, poles, None
        if sol.status < 0:
            return pieces, x, poles, x
        xe = float(sol.t[-1])
        qe = sol.y[0, -1]
        c = xe + 1.0 / abs(qe)
        r = min(radius, 0.9 * (c - x))
        a = c - r
        pieces.append((x, xe, _with_miura(lambda s, sol=sol: sol.sol(s).T)))
        ya = sol.sol(a)

        def along(th, yy):
            z = c + r * np.exp(1j * th)
            return f(z, yy) * (1j * r * np.exp(1j * th))

        upper = solve_ivp(along, (math.pi, 0.0), ya, **opts)
        lower = solve_ivp(along, (math.pi, 2 * math.pi), ya, **opts)
        if upper.status or lower.status:
            return pieces, xe, poles, xe
        yb = upper.y[:, -1]
        if np.abs(yb - lower.y[:, -1]).max() > 1e-8 * max(1.0, np.abs(yb).max()):
            # another singularity (or a branch point) inside the circle
            return pieces, xe, poles, xe
        th = 2 * math.pi * np.arange(n_circle) / n_circle
        zs = c + r * np.exp(1j * th)
        vals = np.where((th <= math.pi)[None, :], upper.sol(np.minimum(th, math.pi)), lower.sol(np.maximum(th, math.pi)))
        q, q1 = vals
        res = np.mean(q * (zs - c))
        if abs(res - 1) > 1e-6:
            return pieces, xe, poles, xe
        x0 = c + np.mean(q * (zs - c) ** 2) / res
        g = q - 1 / (zs - x0)
        g1 = q1 + 1 / (zs - x0) ** 2
        U = q1 + q * q + zs / 2
        poles.append(float(x0.real))
        pieces.append((c - r / 2, c + r / 2, _cauchy_piece(zs, c, x0, g, g1, U)))
        yb = np.asarray(yb)
        back = solve_ivp(f, (c + r, c + r / 2), yb, **opts)
        pieces.append((c + r / 2, c + r, _with_miura(lambda s, sol=back: sol.sol(s).T)))
        x, y = c + r, yb
        if x >= x_end:
            return pieces, x_end, poles, None


def _cauchy_piece(zs, c, x0, g, g1, U):
    w = zs - c

    def f(x):
        x = np.asarray(x, dtype=float)
        k = w[None, :] / (zs[None, :] - x[:, None])
        gi, g1i, Ui = (k @ v / len(zs) for v in (g, g1, U))
        e = x - x0
        with np.errstate(divide="ignore"):
            return np.column_stack([1 / e + gi, -1 / (e * e) + g1i, Ui])

    return f


def u_from_pii(sol: PIISolution, s):
    """u(s) = 2^(-1/3) U(-2^(1/3) s) with U = q' + q^2 + x/2."""
    s = np.asarray(s, dtype=float)
    x = -S_SCALE * s
    return sol.miura(x) / S_SCALE


# ---------------------------------------------------------------------------
# Painleve II with q ~ k Ai(x)


@dataclass(frozen=True)
class AiryPIISolution:
    k: complex
    grid: np.ndarray
    q: np.ndarray
    q1: np.ndarray
    int_q2: np.ndarray  # integral_x^inf q^2 (= sigma(x; 0, 1 - k^2))
    int_xq2: np.ndarray  # integral_x^inf y q(y)^2 dy
    last_good: float
    diagnostics: dict = field(default_factory=dict, repr=False)
    _evaluator: object = field(default=None, repr=False, compare=False)

    def evaluate(self, x):
        """(q, q', int q^2, int x q^2) at arbitrary x in range."""
        scalar = np.ndim(x) == 0
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = self._evaluator(x)
        if np.isrealobj(self.q):
            y = y.real
        return tuple(v[0] for v in y.T) if scalar else tuple(y.T)

    def log_cdf(self, s):
        """log of exp(-integral_s^inf (x - s) q^2 dx)."""
        _, _, j0, j1 = self.evaluate(s)
        return -(j1 - np.asarray(s) * j0)


def _airy_tails(x, k):
    ai, aip, _, _ = airy(x)
    k2 = k * k
    return (k * ai, k * aip, k2 * (aip * aip - x * ai * ai), -k2 * (x * x * ai * ai - x * aip * aip + ai * aip) / 3)


def solve_pii_airy(k, x_range=(-8.0, 8.0), tol=1e-10, n_grid=401, x_right=None) -> AiryPIISolution:
    """q'' = x q + 2 q^3 with q ~ k Ai(x) at +inf.

    k = 1 (Hastings-McLeod) by collocation against the sqrt(-x/2) tail;
    other k by backward integration from the Airy tail. The integrals of
    q^2 and x q^2 are carried along for the distribution functions.
    """
    k = complex(k)
    real = k.imag == 0
    x_lo, x_hi = map(float, x_range)
    xr = max(x_hi, 8.0) if x_right is None else x_right
    info = {}
    if k == 0:
        def ev(x):
            return np.zeros((len(x), 4), dtype=complex)
        last = x_lo
    elif k == 1:
        xl = min(x_lo, -12.0)
        Qm = pii_minus_series(0.0)
        ql = optimal_sum(Qm, -xl)[0].real
        qr = float(airy(xr)[0])

        def guess(x):
            w = 1 / (1 + np.exp(-2 * x))
            return np.sqrt(np.maximum(-x, 0) / 2 + 0.1) * (1 - w) + airy(x)[0] * w

        xs, ys, info = _collocate_2(0.0, xl, ql, xr, qr, guess, tol)
        n = len(xs) - 1
        Q = cheb_cumint_weights(n, xl, xr)
        _, _, t0, t1 = _airy_tails(xr, 1.0)
        j0 = Q @ (ys[:, 0] ** 2) + t0.real
        j1 = Q @ (xs * ys[:, 0] ** 2) + t1.real
        table = np.column_stack([ys, j0, j1])

        def ev(x):
            out = np.zeros((len(x), 4), dtype=complex)
            inside = x <= xr
            out[inside] = bary_eval(xs, table, x[inside])
            if (~inside).any():
                out[~inside] = np.column_stack(_airy_tails(x[~inside], 1.0))
            return out
        last = x_lo
    else:
        y0 = np.array(_airy_tails(xr, k), dtype=complex)

        def rhs(x, y):
            q2 = y[0] * y[0]
            return [y[1], x * y[0] + 2 * y[0] * q2, -q2, -x * q2]

        sol = solve_ivp(rhs, (xr, x_lo), y0, method="DOP853", rtol=1e-13, atol=1e-16, dense_output=True,
                        events=_blowup_event(1e4))
        last = float(sol.t[-1])
        if sol.status != 0:
            info["blowup"] = last

        def ev(x):
            out = np.zeros((len(x), 4), dtype=complex)
            inside = x <= xr
            out[inside] = sol.sol(x[inside]).T
            if (~inside).any():
                out[~inside] = np.column_stack(_airy_tails(x[~inside], k))
            return out

    def evaluator(x):
        x = np.asarray(x, dtype=float)
        if np.any(x < last - 1e-12):
            raise ValidationError("x below the last good point %g" % last)
        return ev(x)

    grid = np.linspace(max(x_lo, last), x_hi, n_grid)
    y = evaluator(grid)
    if real:
        y = y.real
    return AiryPIISolution(k, grid, y[:, 0], y[:, 1], y[:, 2], y[:, 3], last, info, evaluator)


# ---------------------------------------------------------------------------


def special_functions(kind: str, z):
    """airy_ai, airy_ai_prime or gamma at real z (scipy.special)."""
    z = np.asarray(z, dtype=float)
    if kind == "airy_ai":
        return airy(z)[0]
    if kind == "airy_ai_prime":
        return airy(z)[1]
    if kind == "gamma":
        if np.any((z <= 0) & (z == np.round(z))):
            raise ValidationError("Gamma has a pole at nonpositive integers")
        return _gamma(z)
    raise ValidationError("unknown special function %r" % (kind,))
