"""The perturbed Gaussian weight and a quadrature rule adapted to it.

The weight is ``exp(-x**2) * |x - mu|**(2*alpha)`` times 1 to the left of
``mu`` and ``omega`` to the right. Quadrature splits the line at ``mu``.
On each side the first panel is a Gauss-Jacobi rule in ``t = |x - mu|``
that absorbs ``t**(2*alpha)`` exactly; farther panels are Gauss-Legendre
with the algebraic factor folded into the weights. Everything beyond the
point where ``exp(-x**2)`` times the largest admissible polynomial is
negligible is dropped.

Nodes and weights are kept side by side, so any inner product is
``left_sum + omega * right_sum``; ``omega`` only enters at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .ddarith import CDD, DD, dd_exp, dd_log, dd_sum, to_number
from .errors import PrecisionError, ValidationError

PRECISIONS = ("double", "double-double")
_MP_DPS = 36


@dataclass(frozen=True)
class WeightSpec:
    alpha: float
    mu: float = 0.0
    omega: complex = 1.0

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a) or a <= -0.5:
            raise ValidationError("alpha must satisfy alpha > -1/2, got %r" % (self.alpha,))
        w = complex(self.omega)
        if not (np.isfinite(w.real) and np.isfinite(w.imag)):
            raise ValidationError("omega must be finite")
        if w.imag == 0 and w.real < 0:
            raise ValidationError("omega must not lie on the negative real axis, got %r" % (self.omega,))
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "omega", w)

    @property
    def is_real(self):
        """True when the weight is real and nonnegative (omega >= 0)."""
        return self.omega.imag == 0 and self.omega.real >= 0

    def with_omega(self, omega):
        return WeightSpec(self.alpha, self.mu, omega)

    def with_mu(self, mu):
        return WeightSpec(self.alpha, mu, self.omega)


def evaluate_weight(x, spec: WeightSpec):
    """Pointwise weight value(s). At ``x == mu`` with ``alpha < 0`` the
    result is ``inf`` (the weight has an integrable pole there)."""
    x = np.asarray(x, dtype=float)
    t = np.abs(x - spec.mu)
    with np.errstate(divide="ignore"):
        alg = np.where(t == 0, 0.0 if spec.alpha > 0 else (1.0 if spec.alpha == 0 else np.inf),
                       t ** (2 * spec.alpha))
    if spec.is_real:
        out = np.exp(-x * x) * alg * np.where(x > spec.mu, spec.omega.real, 1.0)
    else:
        out = np.exp(-x * x) * alg * np.where(x > spec.mu, spec.omega, 1.0)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class Panel:
    side: str  # "left" (x <= mu) or "right" (x > mu)
    interval: tuple
    kind: str  # "jacobi" or "legendre"
    nodes_hi: np.ndarray
    nodes_lo: np.ndarray
    weights_hi: np.ndarray  # quadrature weight times exp(-x^2)|x-mu|^(2 alpha)
    weights_lo: np.ndarray


@dataclass(frozen=True)
class QuadratureScheme:
    panels: tuple
    singularity_exponent: float
    working_precision: str
    mu: float
    target_degree: int
    points_per_panel: int
    cutoff: float
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def size(self):
        return sum(len(p.nodes_hi) for p in self.panels)

    def _side(self, side, what):
        parts = [getattr(p, what) for p in self.panels if p.side == side]
        return np.concatenate(parts) if parts else np.zeros(0)

    def nodes(self, side=None):
        """All nodes (or one side's) as DD in double-double, float otherwise."""
        sides = ("left", "right") if side is None else (side,)
        hi = np.concatenate([self._side(s, "nodes_hi") for s in sides])
        lo = np.concatenate([self._side(s, "nodes_lo") for s in sides])
        return DD(hi, lo) if self.working_precision == "double-double" else hi + lo

    def base_weights(self, side=None):
        sides = ("left", "right") if side is None else (side,)
        hi = np.concatenate([self._side(s, "weights_hi") for s in sides])
        lo = np.concatenate([self._side(s, "weights_lo") for s in sides])
        return DD(hi, lo) if self.working_precision == "double-double" else hi + lo

    def weights(self, omega):
        """Full quadrature weights for jump ``omega``; CDD/complex when
        ``omega`` is not real, DD/float otherwise."""
        omega = complex(omega)
        nl = len(self._side("left", "nodes_hi"))
        wl = self.base_weights("left")
        wr = self.base_weights("right")
        dd = self.working_precision == "double-double"
        if omega.imag == 0:
            if dd:
                return DD(np.concatenate([wl.hi, omega.real * wr.hi]), np.concatenate([wl.lo, omega.real * wr.lo])) \
                    if omega.real in (0.0, 1.0) else _dd_concat(wl, wr * omega.real)
            return np.concatenate([wl, omega.real * wr])
        if dd:
            right = CDD(wr) * omega
            left = CDD(wl)
            return CDD(_dd_concat(left.re, right.re), _dd_concat(left.im, right.im))
        return np.concatenate([wl.astype(complex), omega * wr])

    def refined(self):
        """A finer companion rule used for error estimates."""
        if "refined" not in self._cache:
            self._cache["refined"] = _build(self.singularity_exponent / 2, self.mu, self.target_degree,
                                            self.working_precision, refine=True)
        return self._cache["refined"]


def _dd_concat(a: DD, b: DD) -> DD:
    return DD(np.concatenate([a.hi, b.hi]), np.concatenate([a.lo, b.lo]))


@lru_cache(maxsize=256)
def _jacobi_coeffs(m, a, b, shift=0):
    """DD recurrence coefficients (A_k, B_k, C_k) for P^{(a+shift, b+shift)}
    with P_k = (A_k x + B_k) P_{k-1} - C_k P_{k-2}, P_1 = A_1 x + B_1.
    The shift is applied in mpmath so that b + 1 is not rounded."""
    with mpmath.workdps(_MP_DPS):
        a, b = mpmath.mpf(a) + shift, mpmath.mpf(b) + shift
        A, B, C = [mpmath.mpf(0)], [mpmath.mpf(1)], [mpmath.mpf(0)]
        if m >= 1:
            A.append((a + b + 2) / 2)
            B.append((a - b) / 2)
            C.append(mpmath.mpf(0))
        for k in range(2, m + 1):
            c = 2 * k + a + b
            D = 2 * k * (k + a + b) * (c - 2)
            A.append((c - 1) * c * (c - 2) / D)
            B.append((c - 1) * (a * a - b * b) / D)
            C.append(2 * (k + a - 1) * (k + b - 1) * c / D)
        return DD.from_mpf(A), DD.from_mpf(B), DD.from_mpf(C)


def _jacobi_dd(m, a, b, x: DD, shift=0) -> DD:
    A, B, C = _jacobi_coeffs(m, a, b, shift)
    p0 = DD(np.ones_like(x.hi))
    if m == 0:
        return p0
    p1 = x * A[1] + B[1]
    for k in range(2, m + 1):
        p0, p1 = p1, (x * A[k] + B[k]) * p1 - p0 * C[k]
    return p1


@lru_cache(maxsize=64)
def _gauss_jacobi_dd(m, b):
    """Gauss-Jacobi rule for weight (1+x)^b on [-1, 1] in double-double:
    float64 nodes polished by vectorised Newton steps."""
    x0, _ = _gauss_jacobi_float(m, b)
    x = DD(x0)
    with mpmath.workdps(_MP_DPS):
        bb = mpmath.mpf(b)
        fac = DD.from_mpf([(m + bb + 1) / 2])[0]
    for _ in range(3):
        p = _jacobi_dd(m, 0.0, b, x)
        dp = _jacobi_dd(m - 1, 0.0, b, x, 1) * fac
        x = x - p / dp
    dp = _jacobi_dd(m - 1, 0.0, b, x, 1) * fac
    with mpmath.workdps(_MP_DPS):
        const = (mpmath.gamma(m + 1) * mpmath.gamma(m + bb + 1)
                 / (mpmath.gamma(m + bb + 1) * mpmath.factorial(m)) * mpmath.mpf(2) ** (bb + 1))
    cst = DD.from_mpf([const])[0]
    w = cst / ((1.0 - x * x) * dp * dp)
    return x, w


def _gauss_jacobi_float(m, b):
    if b == 0:
        return roots_legendre(m)
    return roots_jacobi(m, 0.0, float(b))


def _tail_margin(n, precision):
    c = 12.0 if precision == "double-double" else 8.5
    return c * n ** (-1.0 / 6.0) + 1.0


def _points_per_panel(n, precision, refine):
    extra = 24 if precision == "double-double" else 12
    m = int(math.ceil(math.sqrt(2 * n + 1))) + extra
    return int(math.ceil(1.5 * m)) if refine else m


def _panel(side, t0, t1, mu, alpha, m, jacobi, precision):
    """Panel over t in [t0, t1] where x = mu -/+ t for left/right."""
    sgn = -1 if side == "left" else 1
    two_a = 2 * alpha
    if precision == "double-double":
        xi, wi = _gauss_jacobi_dd(m, two_a if jacobi else 0.0)
        half = DD(float(t1)) * 0.5 - DD(float(t0)) * 0.5
        t = (DD(float(t1)) * 0.5 + DD(float(t0)) * 0.5) + xi * half
        X = DD(float(mu)) + (t if sgn > 0 else -t)
        gauss = dd_exp(-(X * X))
        if jacobi:  # t0 == 0: t^(2a) = half^(2a) (1+x)^(2a)
            W = wi * gauss * dd_exp(dd_log(half) * (two_a + 1.0))
        elif two_a == 0:
            W = wi * half * gauss
        else:
            W = wi * half * gauss * dd_exp(dd_log(t) * two_a)
        nh, nl, wh, wl = X.hi, X.lo, W.hi, W.lo
    else:
        xi, wi = _gauss_jacobi_float(m, two_a if jacobi else 0.0)
        half = (t1 - t0) / 2
        t = (t1 + t0) / 2 + half * xi
        xx = mu + sgn * t
        if jacobi:
            ww = wi * half ** (two_a + 1) * np.exp(-xx * xx)
        else:
            ww = wi * half * t ** two_a * np.exp(-xx * xx)
        nh, nl, wh, wl = xx, np.zeros_like(xx), ww, np.zeros_like(ww)
    order = np.argsort(nh)
    lo_x, hi_x = sorted((mu + sgn * t0, mu + sgn * t1))
    return Panel(side, (lo_x, hi_x), "jacobi" if jacobi else "legendre",
                 nh[order], nl[order], wh[order], wl[order])


@lru_cache(maxsize=256)
def _build(alpha, mu, n, precision, refine=False):
    margin = _tail_margin(n, precision) + (2.0 if refine else 0.0)
    X = math.sqrt(2 * n + 1) + margin
    m = _points_per_panel(n, precision, refine)
    panels = []
    for side in ("left", "right"):
        T = max((mu + X) if side == "left" else (X - mu), 2.0)
        width = 1.0
        t0, first = 0.0, True
        while t0 < T - 1e-12:
            t1 = min(t0 + width, T)
            panels.append(_panel(side, t0, t1, mu, alpha, m, first, precision))
            t0, first = t1, False
    panels.sort(key=lambda p: p.interval[0])
    return QuadratureScheme(tuple(panels), 2 * alpha, precision, mu, n, m, X)


def build_quadrature(spec: WeightSpec, target_degree: int, precision: str = "double-double") -> QuadratureScheme:
    """Rule that integrates ``x**k * w(x)`` to working precision for
    ``k <= 2 * target_degree`` (and products of orthogonal polynomials of
    degree up to ``target_degree``)."""
    if int(target_degree) < 1:
        raise ValidationError("target_degree must be >= 1")
    if precision not in PRECISIONS:
        raise ValidationError("precision must be one of %s" % (PRECISIONS,))
    return _build(spec.alpha, spec.mu, int(target_degree), precision)


def _moment_raw(k, spec, scheme):
    x = scheme.nodes()
    W = scheme.weights(spec.omega)
    if scheme.working_precision == "double-double":
        p = DD(np.ones(len(x)))
        for _ in range(k):
            p = p * x
        val = to_number(dd_sum(W * p))
        scale = float(np.sum(np.abs(W.to_complex() if isinstance(W, CDD) else W.to_float())
                             * np.abs(p.to_float())))
    else:
        p = x ** k
        val = complex(np.sum(W * p)) if np.iscomplexobj(W) else float(np.sum(W * p))
        scale = float(np.sum(np.abs(W) * np.abs(p)))
    return val, scale


def moment(k: int, spec: WeightSpec, scheme: QuadratureScheme, rtol=None, with_error=False):
    """``integral x**k w(x) dx``. The error estimate is the change on the
    refined companion rule; above ``rtol`` (relative to the absolute
    integral) a :class:`PrecisionError` is raised."""
    if k < 0:
        raise ValidationError("moment order must be nonnegative")
    if abs(scheme.mu - spec.mu) > 0 or abs(scheme.singularity_exponent - 2 * spec.alpha) > 0:
        raise ValidationError("scheme was built for a different weight")
    val, scale = _moment_raw(k, spec, scheme)
    ref, _ = _moment_raw(k, spec, scheme.refined())
    err = abs(val - ref)
    if rtol is None:
        rtol = 1e-24 if scheme.working_precision == "double-double" else 1e-11
    if err > rtol * max(scale, np.finfo(float).tiny):
        raise PrecisionError("moment %d did not converge" % k, estimate=err, scale=scale)
    if spec.is_real and isinstance(val, complex):
        val = val.real
    return (val, err) if with_error else val
