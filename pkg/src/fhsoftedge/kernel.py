"""The limiting Psi-kernel and the finite-n Christoffel-Darboux kernel.

The Lax system ``psi' = L(-c) A(x) L(c) psi`` with ``L(c) = [[1, 0], [i c, 1]]``
and ``c = sigma(s) - s^2/4`` is integrated as ``phi' = A phi``, ``psi =
L(-c) phi``: the shear only adds a multiple of psi_1 to psi_2, which drops
out of the kernel numerator.

Boundary data come from the Riccati equation for ``r = phi_2 / phi_1``,
solved as a formal series at each end; ``log phi_1`` then follows by
integrating ``A11 + A12 r``. The two half lines are separate problems: the
system has a singular point at ``x = 0`` and the kernel is built from a
different combination of the columns of the underlying RH solution on
each side. ``x > 0`` is anchored at ``+inf`` (decaying solution, amplitude
``sqrt(omega)/sqrt(2)``), ``x < 0`` at ``-inf`` (the cosine/sine pair).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .errors import PrecisionError, ValidationError
from .orthopoly import RecurrenceTable, ScalingReport, _fit_rate, double_scaling_mu, evaluate_orthonormal, stieltjes_recurrence
from .painleve import PainleveParams, SigmaSolution, solve_sigma
from .series import Series, optimal_sum, solve_coefficients
from .weight_quad import WeightSpec

ATTACH = 10.0
SERIES_LENGTH = 150


@dataclass(frozen=True)
class PsiSolution:
    s: float
    params: PainleveParams
    grid: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    normalization_route: str  # anchor of the half line carrying the omega dependence
    puncture: float
    lax_data: dict = field(repr=False, default_factory=dict)
    diagnostics: dict = field(repr=False, default_factory=dict)
    _branches: dict = field(repr=False, default_factory=dict, compare=False)

    def evaluate(self, x, derivative=False):
        """(psi1, psi2) at x (and their x-derivatives from the ODE)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(np.abs(x) < self.puncture):
            raise ValidationError("x inside the puncture |x| < %g around 0" % self.puncture)
        phi = np.zeros((2, len(x)), dtype=complex)
        for key, sel in (("positive", x > 0), ("negative", x < 0)):
            if not sel.any():
                continue
            br = self._branches.get(key)
            if br is None:
                raise ValidationError("x outside the solved range")
            lo, hi, sol = br
            xs = x[sel]
            if sol is None:
                continue  # identically zero half line
            if np.any(xs < lo - 1e-12) or np.any(xs > hi + 1e-12):
                raise ValidationError("x outside the solved range [%g, %g]" % (lo, hi))
            phi[:, sel] = sol.sol(xs)
        c = self.lax_data["c"]
        psi = np.array([phi[0], phi[1] - 1j * c * phi[0]])
        if not derivative:
            return psi[0], psi[1]
        A = _a_matrix(x, self.lax_data)
        dphi = np.einsum("ijn,jn->in", A, phi)
        dpsi = np.array([dphi[0], dphi[1] - 1j * c * dphi[0]])
        return psi[0], psi[1], dpsi[0], dpsi[1]

    def ode_residual(self, x, h=1e-5):
        """max |psi' - M psi| by central differences of the dense output."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        p1, p2, d1, d2 = self.evaluate(x, derivative=True)
        f1p, f2p = self.evaluate(x + h)
        f1m, f2m = self.evaluate(x - h)
        num = np.array([(f1p - f1m) / (2 * h), (f2p - f2m) / (2 * h)])
        scale = np.maximum(np.abs(np.array([d1, d2])), np.abs(np.array([p1, p2])))
        return float(np.max(np.abs(num - np.array([d1, d2])) / np.maximum(scale, 1e-300)))


def _lax_data(s, params, sigma_sol):
    sig, s1, s2 = sigma_sol.evaluate(float(s))
    u, u1 = -s1, -s2
    return dict(s=float(s), u=u, u1=u1, sigma=sig, K=u * u + s * u + sig, c=sig - s * s / 4, alpha=params.alpha)


def _a_matrix(x, d):
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    A = np.zeros((2, 2, n), dtype=complex)
    A[0, 0] = d["u1"] / (2 * x)
    A[0, 1] = 1j - 1j * d["u"] / x
    A[1, 0] = -1j * x - 1j * (d["u"] + d["s"]) - 1j * d["K"] / x
    A[1, 1] = -A[0, 0]
    return A


def _rhs(d):
    u1h, u, us, K = d["u1"] / 2, d["u"], d["u"] + d["s"], d["K"]

    def f(x, y):
        a11 = u1h / x
        return [a11 * y[0] + (1j - 1j * u / x) * y[1], (-1j * x - 1j * us - 1j * K / x) * y[0] - a11 * y[1]]

    return f


def _mono(c, k):
    return Series.monomial(c, 0, k)


def _branch_series(d, side, root_sign):
    """Riccati series for r and the integrated log phi_1 in the variable
    t = |x| on the given side; returns (r, G, log_coef)."""
    u1h, u, us, K = d["u1"] / 2, d["u"], d["u"] + d["s"], d["K"]
    if side > 0:
        a11 = _mono(u1h, -2)
        a12 = _mono(1j, 0) + _mono(-1j * u, -2)
        a21 = _mono(-1j, 2) + _mono(-1j * us, 0) + _mono(-1j * K, -2)
        r0 = Series.monomial(1j, 0, 1, SERIES_LENGTH, exact=False)
    else:
        # d/dy with y = -x: B = -A(-y)
        a11 = _mono(u1h, -2)
        a12 = _mono(-1j, 0) + _mono(-1j * u, -2)
        a21 = _mono(-1j, 2) + _mono(1j * us, 0) + _mono(-1j * K, -2)
        r0 = Series.monomial(root_sign * 1.0, 0, 1, SERIES_LENGTH, exact=False)

    def residual(r):
        return r.deriv() - a21 + 2 * (a11 * r) + a12 * (r * r)

    r = solve_coefficients(residual, r0, range(0, -(2 * SERIES_LENGTH) // 5, -1))
    G, log_coef = (a11 + a12 * r).integrate()
    return r, G, log_coef


def _growing_part(G):
    return {int(G.kmax - i): complex(c) for i, c in enumerate(G.coeffs) if G.kmax - i > 0 and abs(c) > 1e-14}


def _branch_value(r, G, log_coef, t):
    gval, g_om = optimal_sum(G, t)
    rval, r_om = optimal_sum(r, t)
    phi1 = cmath.exp(gval + log_coef * math.log(t))
    return phi1, rval * phi1, max(g_om, r_om / max(abs(rval), 1e-300))


def psi_solve(s, params: PainleveParams, sigma_sol: SigmaSolution = None, x_min=-6.0, x_max=6.0, tol=1e-10,
              puncture=1e-3, n_grid=241) -> PsiSolution:
    """Solve the Lax system at fixed s on [x_min, x_max] minus |x| < puncture."""
    if not x_min < x_max:
        raise ValidationError("need x_min < x_max")
    if puncture <= 0:
        raise ValidationError("puncture radius must be positive")
    if sigma_sol is None:
        sigma_sol = solve_sigma(params, min(-8.0, s - 1), max(8.0, s + 1))
    d = _lax_data(s, params, sigma_sol)
    f = _rhs(d)
    rtol = min(max(tol * 1e-2, 1e-13), 1e-8)
    branches, routes, diag = {}, [], {}
    if x_max > puncture:
        X = max(ATTACH, x_max)
        if params.omega == 0:
            branches["positive"] = (puncture, x_max, None)
        else:
            r, G, L = _branch_series(d, +1, None)
            diag["positive_exponent"] = (_growing_part(G), complex(L))
            p1, p2, err = _branch_value(r, G, L, X)
            amp = cmath.sqrt(params.omega) / math.sqrt(2)
            y0 = np.array([amp * p1, amp * p2])
            sol = solve_ivp(f, (X, puncture), y0, method="DOP853", rtol=rtol, atol=abs(y0).max() * 1e-16,
                            dense_output=True)
            if sol.status != 0:
                raise ValidationError("Lax integration on x > 0 failed: %s" % sol.message)
            branches["positive"] = (puncture, X, sol)
            diag["positive_attach_error"] = err
        routes.append("from_plus_infinity")
    if x_min < -puncture:
        Y = max(ATTACH, -x_min)
        phase = params.alpha * math.pi + math.pi / 4
        y0 = np.zeros(2, dtype=complex)
        errs = []
        for sign, const in ((-1, cmath.exp(-1j * phase)), (+1, cmath.exp(1j * phase))):
            r, G, L = _branch_series(d, -1, sign)
            diag["negative_exponent_%+d" % sign] = (_growing_part(G), complex(L))
            p1, p2, err = _branch_value(r, G, L, Y)
            # phi_2 in x: dphi/dx = -dphi/dy only changes derivatives, values agree
            y0 += const / math.sqrt(2) * np.array([p1, p2])
            errs.append(err)
        sol = solve_ivp(f, (-Y, -puncture), y0, method="DOP853", rtol=rtol, atol=1e-16, dense_output=True)
        if sol.status != 0:
            raise ValidationError("Lax integration on x < 0 failed: %s" % sol.message)
        branches["negative"] = (-Y, -puncture, sol)
        diag["negative_attach_error"] = max(errs)
        routes.append("from_minus_infinity")
    parts = []
    if x_min < -puncture:
        parts.append(np.linspace(x_min, -puncture, n_grid // 2))
    if x_max > puncture:
        parts.append(np.linspace(puncture, x_max, n_grid - n_grid // 2))
    grid = np.concatenate(parts)
    diag["routes"] = tuple(routes)
    route = "from_minus_infinity" if params.omega == 0 else "from_plus_infinity"
    out = PsiSolution(float(s), params, grid, np.zeros(0), np.zeros(0), route, puncture, d, diag, branches)
    p1, p2 = out.evaluate(grid)
    object.__setattr__(out, "psi1", p1)
    object.__setattr__(out, "psi2", p2)
    return out


def psi_kernel(psi: PsiSolution, x, y):
    """K(x, y) = (psi2(x) psi1(y) - psi1(x) psi2(y)) / (2 pi i (x - y)),
    with the derivative limit on the diagonal. Broadcasts over x, y."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    a1, a2, da1, da2 = psi.evaluate(x, derivative=True)
    b1, b2 = psi.evaluate(y)
    diag = x == y
    with np.errstate(invalid="ignore", divide="ignore"):
        off = (a2 * b1 - a1 * b2) / (2j * math.pi * (x - y))
    on = (da2 * a1 - da1 * a2) / (2j * math.pi)
    val = np.where(diag, on, off).reshape(shape)
    if psi.params.is_real and psi.params.omega.real >= 0:
        same_side = (np.sign(x) == np.sign(y)).reshape(shape)
        val = np.where(same_side, val.real, val)
    return val[()] if val.ndim == 0 else val


def airy_kernel(x, y):
    """Closed-form Airy kernel (Ai(x)Ai'(y) - Ai'(x)Ai(y))/(x - y)."""
    from scipy.special import airy

    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    ax, apx, _, _ = airy(x)
    ay, apy, _, _ = airy(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        off = (ax * apy - apx * ay) / (x - y)
    on = apx * apx - x * ax * ax
    return np.where(x == y, on, off)


@dataclass(frozen=True)
class KernelGrid:
    s: float
    points: np.ndarray
    values: np.ndarray
    source: str  # "psi_limit" or "finite_n(<n>)"

    def symmetry_defect(self):
        return float(np.abs(self.values - self.values.T).max())


def psi_kernel_grid(psi: PsiSolution, points) -> KernelGrid:
    p = np.asarray(points, dtype=float)
    X, Y = np.meshgrid(p, p, indexing="ij")
    return KernelGrid(psi.s, p, psi_kernel(psi, X, Y), "psi_limit")


def _log_weight(x, spec: WeightSpec):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        lw = -x * x + 2 * spec.alpha * np.log(np.abs(x - spec.mu)).astype(complex)
    right = x > spec.mu
    if np.any(right):
        if spec.omega == 0:
            lw = np.where(right, -np.inf, lw)
        else:
            lw = np.where(right, lw + cmath.log(spec.omega), lw)
    return lw


def finite_n_kernel(table: RecurrenceTable, spec: WeightSpec, x, y, n=None):
    """K_n(x, y) = sqrt(w(x) w(y)) sum_{k<n} p_k(x) p_k(y).

    Off the diagonal the Christoffel-Darboux form is used, with
    ``b_n p_n = (x - a_{n-1}) p_{n-1} - b_{n-1} p_{n-2}``; on it the sum.
    Polynomial scales and the weights are combined in log space. Raises
    :class:`PrecisionError` when the result's log-magnitude is below -700.
    """
    n = table.n_max if n is None else int(n)
    if n < 1 or n > table.n_max:
        raise ValidationError("need 1 <= n <= table.n_max")
    x, y = np.broadcast_arrays(np.atleast_1d(np.asarray(x, dtype=float)), np.atleast_1d(np.asarray(y, dtype=float)))
    shape = x.shape
    x, y = x.ravel(), y.ravel()
    if spec.alpha < 0 and (np.any(x == spec.mu) or np.any(y == spec.mu)):
        raise ValidationError("x = mu is a singular point of the weight for alpha < 0")
    pts = np.concatenate([x, y])
    vals, lsc = evaluate_orthonormal(table, pts, n - 1)
    b = table.b
    nxt = (pts - table.a[n - 1]) * vals[n - 1] - (b[n - 1] * vals[n - 2] if n > 1 else 0.0)
    m = len(x)
    px, py = vals[:, :m], vals[:, m:]
    rx, ry = nxt[:m], nxt[m:]
    diag = x == y
    with np.errstate(invalid="ignore", divide="ignore"):
        cd = (rx * py[n - 1] - px[n - 1] * ry) / (x - y)
    direct = np.sum(px * py, axis=0)
    core = np.where(diag, direct, cd)
    lw = 0.5 * (_log_weight(x, spec) + _log_weight(y, spec)) + lsc[:m] + lsc[m:]
    with np.errstate(divide="ignore"):
        logmag = lw.real + np.log(np.abs(core))
    finite = np.isfinite(lw.real)
    if np.any(finite & (core != 0) & (logmag < -700)):
        raise PrecisionError("kernel value underflows (log-magnitude %.1f)" % float(np.min(logmag[finite])),
                             log_magnitude=float(np.min(logmag[finite])))
    val = np.where(finite, core * np.exp(np.where(finite, lw, 0)), 0.0)
    if spec.is_real:
        val = val.real
    val = val.reshape(shape)
    return val[0] if val.size == 1 and shape == (1,) else val


def finite_n_kernel_grid(table, spec, points, n=None) -> KernelGrid:
    p = np.asarray(points, dtype=float)
    X, Y = np.meshgrid(p, p, indexing="ij")
    n = table.n_max if n is None else n
    return KernelGrid(float("nan"), p, finite_n_kernel(table, spec, X, Y, n), "finite_n(%d)" % n)


def scaled_finite_kernel(alpha, omega, s, n, v1, v2, precision="double-double", table=None):
    """(1/(sqrt 2 n^(1/6))) K_n(mu_n + v1/(sqrt 2 n^(1/6)), mu_n + v2/(...))."""
    mu = double_scaling_mu(n, s)
    spec = WeightSpec(alpha, mu, omega)
    if table is None:
        table = stieltjes_recurrence(spec, n, precision=precision, estimate_error=False)
    scale = math.sqrt(2) * n ** (1.0 / 6.0)
    v1, v2 = np.asarray(v1, dtype=float), np.asarray(v2, dtype=float)
    return finite_n_kernel(table, spec, mu + v1 / scale, mu + v2 / scale, n) / scale


def kernel_scaling_report(alpha, omega, s, v1, v2, n_values, sigma_sol=None, precision="double-double",
                          psi=None) -> ScalingReport:
    """Error of the scaled finite-n kernel against K_Psi(v1, v2) per n."""
    if v1 == 0 or v2 == 0:
        raise ValidationError("v1, v2 must be nonzero")
    params = PainleveParams(alpha, omega)
    if psi is None:
        lo, hi = min(v1, v2, -1.0) - 1, max(v1, v2, 1.0) + 1
        psi = psi_solve(s, params, sigma_sol, lo, hi)
    target = complex(psi_kernel(psi, v1, v2))
    vals, errs = [], []
    for n in n_values:
        k = complex(scaled_finite_kernel(alpha, omega, s, n, v1, v2, precision))
        vals.append(k)
        errs.append(abs(k - target))
    return ScalingReport("kernel", tuple(n_values), float(s), tuple(vals), target, tuple(errs),
                         _fit_rate(n_values, errs), dict(v=(v1, v2)))
