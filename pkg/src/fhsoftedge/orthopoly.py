"""Orthogonal polynomials for the perturbed Gaussian weight.

Recurrence coefficients come from the discretised Stieltjes procedure on a
:class:`~fhsoftedge.weight_quad.QuadratureScheme`, run in normalised form

    b_{k+1} p_{k+1}(x) = (x - a_k) p_k(x) - b_k p_{k-1}(x),

so nothing overflows. For non-real ``omega`` the "inner product" is the
bilinear form ``sum W f g`` (no conjugation), which is what the monic
polynomials of a complex weight are orthogonal under.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .ddarith import CDD, DD, cdd_sqrt, dd_sqrt, dd_sum, to_number
from .errors import BreakdownError, PrecisionError, ValidationError
from .weight_quad import WeightSpec, build_quadrature, evaluate_weight


@dataclass(frozen=True)
class RecurrenceTable:
    """``x pi_k = pi_{k+1} + a_k pi_k + b2_k pi_{k-1}`` for monic ``pi_k``.

    ``h_k`` is the squared norm of ``pi_k`` (``h_k = b2_k h_{k-1}``); it is
    also stored as ``log_h`` because ``h_k`` overflows near k = 170.
    ``a_lo`` holds the double-double tails of ``a`` (zeros in double).
    """

    spec: WeightSpec
    n_max: int
    a: np.ndarray
    b2: np.ndarray
    h: np.ndarray
    log_h: np.ndarray
    precision: str
    error_estimate: float
    a_lo: np.ndarray = field(repr=False, default=None)

    @property
    def b(self):
        """Off-diagonal Jacobi entries sqrt(b2), principal branch, b_0 = 0."""
        return np.sqrt(self.b2.astype(complex)) if np.iscomplexobj(self.b2) else np.sqrt(self.b2)

    def hankel_log(self, n=None):
        """log H_n = sum_{k<n} log h_k (principal branches, summed)."""
        n = self.n_max if n is None else n
        return complex(np.sum(self.log_h[:n])) if np.iscomplexobj(self.log_h) else float(np.sum(self.log_h[:n]))


def _stieltjes(spec, n_max, scheme, digits):
    dd = scheme.working_precision == "double-double"
    x = scheme.nodes()
    W = scheme.weights(spec.omega)
    cplx = not spec.is_real
    if dd:
        if cplx:
            ssum, sqrt = dd_sum, cdd_sqrt
            zero = CDD(DD(np.zeros(len(x))))
            absW = np.abs(W.to_complex())
        else:
            ssum, sqrt = dd_sum, dd_sqrt
            zero = DD(np.zeros(len(x)))
            absW = np.abs(W.to_float())
    else:
        ssum, sqrt = np.sum, (lambda v: np.sqrt(v + 0j) if cplx else np.sqrt(v))
        zero = np.zeros(len(x), dtype=complex if cplx else float)
        absW = np.abs(W)

    def mag(v):
        if isinstance(v, CDD):
            return np.abs(v.to_complex())
        if isinstance(v, DD):
            return np.abs(v.to_float())
        return np.abs(v)

    h0 = ssum(W)
    a = np.zeros(n_max, dtype=complex)
    a_lo = np.zeros(n_max, dtype=complex)
    b2 = np.zeros(n_max, dtype=complex)
    log_h = np.zeros(n_max, dtype=complex)
    log_h[0] = np.log(complex(to_number(h0)))
    p_prev = zero
    p = zero + 1.0 / sqrt(h0) if dd else zero + 1.0 / sqrt(h0)
    b_prev = 0.0
    thresh = 10.0 ** (-(digits - 8))
    for k in range(n_max):
        xp = p * x
        ak = ssum(W * xp * p)
        _store(a, a_lo, k, ak)
        if k + 1 == n_max:
            break
        r = xp - p * ak - p_prev * b_prev
        bk2 = ssum(W * r * r)
        scale = float(np.sum(absW * mag(r) ** 2))
        if abs(to_number(bk2)) < thresh * scale:
            raise BreakdownError("orthogonal polynomial of degree %d does not exist to working precision" % (k + 1),
                                 degree=k + 1, ratio=abs(to_number(bk2)) / scale)
        bk = sqrt(bk2)
        b2[k + 1] = to_number(bk2)
        log_h[k + 1] = log_h[k] + np.log(complex(b2[k + 1]))
        p_prev, p, b_prev = p, r / bk, bk
    return a, a_lo, b2, log_h


def _store(a, a_lo, k, value):
    if isinstance(value, CDD):
        a[k] = complex(value.re.hi) + 1j * float(value.im.hi)
        a_lo[k] = complex(value.re.lo) + 1j * float(value.im.lo)
    elif isinstance(value, DD):
        a[k] = float(value.hi)
        a_lo[k] = float(value.lo)
    else:
        a[k] = value


def stieltjes_recurrence(spec: WeightSpec, n_max: int, precision: str = "double-double",
                         scheme=None, estimate_error: bool = True) -> RecurrenceTable:
    """Recurrence coefficients ``a_k, b2_k`` and norms ``h_k`` for k < n_max.

    ``error_estimate`` is the largest change in ``a_k``/``b2_k`` (relative to
    ``1 + |value|``) when the computation is repeated on the refined rule.
    Raises :class:`BreakdownError` when a bilinear norm cancels to below
    working precision, which can happen for non-real ``omega``.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    if scheme is None:
        scheme = build_quadrature(spec, n_max + 1, precision)
    precision = scheme.working_precision
    digits = 31 if precision == "double-double" else 15
    a, a_lo, b2, log_h = _stieltjes(spec, n_max, scheme, digits)
    err = 0.0
    if estimate_error:
        a2, _, b22, _ = _stieltjes(spec, n_max, scheme.refined(), digits)
        err = float(max(np.max(np.abs(a2 - a) / (1 + np.abs(a))), np.max(np.abs(b22 - b2) / (1 + np.abs(b2)))))
    if spec.is_real:
        a, a_lo, b2, log_h = a.real, a_lo.real, b2.real, log_h.real
    with np.errstate(over="ignore"):
        h = np.exp(log_h)
    return RecurrenceTable(spec, n_max, a, b2, h, log_h, precision, err, a_lo)


def evaluate_orthonormal(table: RecurrenceTable, x, n: int):
    """Orthonormal ``p_0(x) .. p_n(x)`` with dynamic rescaling.

    Returns ``(values, log_scale)``: ``values`` has shape (n+1, len(x)) and
    the true values are ``values * exp(log_scale)`` (``log_scale`` per x).
    Needs ``n < table.n_max`` unless only the unnormalised next term is used.
    """
    if n >= table.n_max + 1 or n < 0:
        raise ValidationError("n must be below table.n_max")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    cplx = np.iscomplexobj(table.a) or np.iscomplexobj(table.b2)
    dtype = complex if cplx else float
    vals = np.zeros((n + 1, len(x)), dtype=dtype)
    log_scale = np.zeros(len(x))
    b = table.b
    vals[0] = np.exp(-0.5 * table.log_h[0])
    for k in range(n):
        if k + 1 >= table.n_max:
            raise ValidationError("table too short for degree %d" % (k + 1))
        nxt = (x - table.a[k]) * vals[k] - (b[k] * vals[k - 1] if k > 0 else 0.0)
        vals[k + 1] = nxt / b[k + 1]
        big = np.abs(vals[k + 1]) > 1e150
        if np.any(big):
            f = np.where(big, 1e-150, 1.0)
            vals[: k + 2] *= f
            log_scale -= np.log(f)
    return vals, log_scale


def hankel_logderiv(table: RecurrenceTable, n=None):
    """d/dmu log H_n = 2 p_n = -2 sum_{k<n} a_k."""
    n = table.n_max if n is None else n
    hi, lo = _logderiv_parts(table, n)
    return hi + lo


def _logderiv_parts(table, n):
    if n > table.n_max:
        raise ValidationError("table shorter than n")
    a = np.asarray(table.a[:n])
    lo = np.asarray(table.a_lo[:n]) if table.a_lo is not None else np.zeros_like(a)
    if np.iscomplexobj(a) or np.iscomplexobj(lo):
        re = dd_sum(DD(a.real, lo.real))
        im = dd_sum(DD(a.imag, lo.imag))
        return -2 * (float(re.hi) + 1j * float(im.hi)), -2 * (float(re.lo) + 1j * float(im.lo))
    s = dd_sum(DD(a.astype(float), lo.astype(float)))
    return -2 * float(s.hi), -2 * float(s.lo)


def hankel_det_ratio(spec_a: WeightSpec, spec_b: WeightSpec, n: int, precision="double-double", scheme=None):
    """``H_n(spec_a) / H_n(spec_b)`` as ``prod h_k(a) / h_k(b)`` (log-space)."""
    if (spec_a.alpha, spec_a.mu) != (spec_b.alpha, spec_b.mu):
        raise ValidationError("specs must differ only in omega")
    ta = stieltjes_recurrence(spec_a, n, precision, scheme=scheme, estimate_error=False)
    tb = stieltjes_recurrence(spec_b, n, precision, scheme=scheme, estimate_error=False)
    val = np.exp(np.sum(np.asarray(ta.log_h[:n], dtype=complex) - np.asarray(tb.log_h[:n], dtype=complex)))
    if spec_a.is_real and spec_b.is_real:
        return float(val.real)
    return complex(val)


def sigma_iv_residual(spec: WeightSpec, n: int, fd_step: float = 1e-3, precision="double-double",
                      return_parts=False):
    """Residual of the sigma-form of Painleve IV satisfied by
    ``sigma(mu) = d/dmu log H_n``:

        (s'')^2 = 4 (mu s' - s)^2 - 4 s' (s' - 4 alpha) (s' + 2n),

    with ``s'`` and ``s''`` from 5-point central differences of step
    ``fd_step``. Differences are formed in extended precision.
    """
    mus = [spec.mu + j * fd_step for j in (-2, -1, 0, 1, 2)]
    vals = []
    for m in mus:
        t = stieltjes_recurrence(spec.with_mu(m), n, precision, estimate_error=False)
        hi, lo = _logderiv_parts(t, n)
        vals.append(hi + lo if isinstance(hi, complex) else (hi, lo))
    with mpmath.workdps(40):
        if isinstance(vals[0], tuple):
            f = [mpmath.mpf(v[0]) + mpmath.mpf(v[1]) for v in vals]
        else:
            f = [mpmath.mpc(v) for v in vals]
        # the stencil points are doubles, so use their exact offsets
        # rather than assuming a uniform spacing
        w1, w2 = _fd_weights([mpmath.mpf(m) - mpmath.mpf(spec.mu) for m in mus])
        s = f[2]
        s1 = mpmath.fsum(w * v for w, v in zip(w1, f))
        s2 = mpmath.fsum(w * v for w, v in zip(w2, f))
        mu = mpmath.mpf(spec.mu)
        lhs = s2 ** 2
        rhs = 4 * (mu * s1 - s) ** 2 - 4 * s1 * (s1 - 4 * spec.alpha) * (s1 + 2 * n)
        res = abs(lhs - rhs)
    if return_parts:
        return float(res), dict(sigma=complex(s), sigma1=complex(s1), sigma2=complex(s2))
    return float(res)


def _fd_weights(offsets):
    """First- and second-derivative weights at 0 for the given stencil."""
    k = len(offsets)
    V = mpmath.matrix(k, k)
    for i in range(k):
        for j, d in enumerate(offsets):
            V[i, j] = d ** i
    e1 = mpmath.matrix(k, 1)
    e1[1] = 1
    e2 = mpmath.matrix(k, 1)
    e2[2] = 2
    return list(mpmath.lu_solve(V, e1)), list(mpmath.lu_solve(V, e2))


def double_scaling_mu(n, s):
    """Soft-edge point mu_n = sqrt(2n) + s / (sqrt(2) n^(1/6))."""
    return math.sqrt(2 * n) + s / (math.sqrt(2) * n ** (1.0 / 6.0))


@dataclass(frozen=True)
class ScalingReport:
    theorem_id: str
    n_values: np.ndarray
    s: float
    finite_n_values: np.ndarray
    prediction: np.ndarray
    errors: np.ndarray
    fitted_rate: float
    extra: dict = field(default_factory=dict)


def _fit_rate(n_values, errors):
    n = np.asarray(n_values, dtype=float)
    e = np.asarray(errors, dtype=float)
    ok = e > 0
    if ok.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(n[ok]), np.log(e[ok]), 1)[0])


def _painleve_values(alpha, omega, s, sigma_sol):
    if sigma_sol is None:
        from .painleve import PainleveParams, solve_sigma

        sigma_sol = solve_sigma(PainleveParams(alpha, omega), min(s, -1.0) - 1.0, max(s, 1.0) + 1.0)
    sig, s1, _ = sigma_sol.evaluate(s)
    return complex(sig), complex(-s1)


def recurrence_scaling_report(alpha, omega, s, n_values, sigma_sol=None, precision="double-double"):
    """Compare a_n and b_n at mu_n with their soft-edge predictions
    ``a_n ~ -u n^(-1/6)/sqrt 2`` and ``b_n ~ sqrt(n/2) - u n^(-1/6)/2^(3/2)``.

    Returns two reports (a_n first)."""
    _, u = _painleve_values(alpha, omega, s, sigma_sol)
    rows_a, rows_b, pa, pb = [], [], [], []
    for n in n_values:
        spec = WeightSpec(alpha, double_scaling_mu(n, s), omega)
        t = stieltjes_recurrence(spec, n + 1, precision, estimate_error=False)
        rows_a.append(t.a[n])
        rows_b.append(t.b[n])
        pa.append(-u / math.sqrt(2) * n ** (-1 / 6))
        pb.append(math.sqrt(n / 2) - u / 2 ** 1.5 * n ** (-1 / 6))
    out = []
    for tid, fin, pred in (("a_n", rows_a, pa), ("b_n", rows_b, pb)):
        fin, pred = np.asarray(fin), np.asarray(pred)
        err = np.abs(fin - pred)
        out.append(ScalingReport(tid, np.asarray(n_values), s, fin, pred, err, _fit_rate(n_values, err),
                                 dict(u=u)))
    return tuple(out)


def hankel_scaling_report(alpha, omega, s, n_values, sigma_sol=None, precision="double-double"):
    """Compare d/dmu log H_n at mu_n with
    ``sqrt(2n) (2 alpha + sigma n^(-1/3) + alpha (u + s) n^(-2/3))``."""
    sig, u = _painleve_values(alpha, omega, s, sigma_sol)
    fin, pred = [], []
    for n in n_values:
        spec = WeightSpec(alpha, double_scaling_mu(n, s), omega)
        t = stieltjes_recurrence(spec, n, precision, estimate_error=False)
        fin.append(hankel_logderiv(t))
        pred.append(math.sqrt(2 * n) * (2 * alpha + sig * n ** (-1 / 3) + alpha * (u + s) * n ** (-2 / 3)))
    fin, pred = np.asarray(fin), np.asarray(pred)
    err = np.abs(fin - pred)
    return ScalingReport("hankel_logderiv", np.asarray(n_values), s, fin, pred, err,
                         _fit_rate(n_values, err), dict(sigma=sig, u=u))


def gram_determinant_log(spec: WeightSpec, n: int, scheme=None):
    """log det of the n x n moment matrix, by mpmath on DD moments (oracle use)."""
    from .weight_quad import moment

    scheme = scheme or build_quadrature(spec, n + 1, "double-double")
    with mpmath.workdps(40):
        m = [mpmath.mpmathify(moment(k, spec, scheme)) for k in range(2 * n - 1)]
        M = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                M[i, j] = m[i + j]
        return mpmath.log(mpmath.det(M))


__all__ = [
    "RecurrenceTable", "ScalingReport", "stieltjes_recurrence", "evaluate_orthonormal", "hankel_logderiv",
    "hankel_det_ratio", "sigma_iv_residual", "recurrence_scaling_report", "hankel_scaling_report",
    "double_scaling_mu", "evaluate_weight", "gram_determinant_log",
]
