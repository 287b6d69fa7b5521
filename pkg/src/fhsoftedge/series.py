"""Formal Puiseux series in half-integer steps.

A series here is ``sum_k c_k t**(shift + k/2)`` over a finite window of
integers ``kmin <= k <= kmax``. Terms below ``kmin`` are truncated.
:func:`solve_coefficients` generates the coefficients of an asymptotic
ansatz by substituting it into an ODE residual and solving order by order;
the tail expansions in :mod:`fhsoftedge.painleve` and :mod:`fhsoftedge.kernel`
are all produced this way.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Series:
    shift: complex
    kmax: int
    coeffs: np.ndarray  # coeffs[i] multiplies t**(shift + (kmax - i)/2)
    floor: int | None = None  # lowest k known exactly; None means kmin

    EXACT = -(10**9)

    @classmethod
    def monomial(cls, coef, shift, k, length=1, exact=True):
        """``coef * t**(shift + k/2)``; exact monomials never truncate products."""
        c = np.zeros(length, dtype=complex)
        c[0] = coef
        return cls(complex(shift), int(k), c, cls.EXACT if exact else None)

    @classmethod
    def from_terms(cls, shift, kmax, coeffs):
        return cls(complex(shift), int(kmax), np.asarray(coeffs, dtype=complex).copy())

    @property
    def kmin(self):
        if self.floor is not None:
            return self.floor
        return self.kmax - len(self.coeffs) + 1

    @property
    def klast(self):
        return self.kmax - len(self.coeffs) + 1

    def exponents(self):
        k = self.kmax - np.arange(len(self.coeffs))
        return self.shift + k / 2.0

    def _check(self, other):
        if abs(self.shift - other.shift) > 1e-12:
            raise ValueError("series shifts differ: %r vs %r" % (self.shift, other.shift))

    def __add__(self, other):
        if np.isscalar(other):
            k = -2 * self.shift
            if abs(k - round(k.real)) > 1e-12:
                raise ValueError("cannot add a constant to a series with fractional shift")
            other = Series.monomial(other, self.shift, int(round(k.real)), 1)
        self._check(other)
        kmax = max(self.kmax, other.kmax)
        kmin = max(self.kmin, other.kmin)
        exact = kmin == self.EXACT
        if exact:
            kmin = min(self.klast, other.klast)
        out = np.zeros(kmax - kmin + 1, dtype=complex)
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                k = s.kmax - i
                if k >= kmin:
                    out[kmax - k] += c
        return Series(self.shift, kmax, out, self.EXACT if exact else None)

    __radd__ = __add__

    def __neg__(self):
        return Series(self.shift, self.kmax, -self.coeffs, self.floor)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return Series(self.shift, self.kmax, self.coeffs * other, self.floor)
        kmax = self.kmax + other.kmax
        full = np.convolve(self.coeffs, other.coeffs)
        if self.kmin == self.EXACT and other.kmin == self.EXACT:
            return Series(self.shift + other.shift, kmax, full, self.EXACT)
        # valid down to the weaker of the two truncations
        kmin = max(self.kmax + other.kmin, other.kmax + self.kmin)
        n = kmax - kmin + 1
        if n > len(full):
            full = np.concatenate([full, np.zeros(n - len(full), dtype=complex)])
        return Series(self.shift + other.shift, kmax, full[:n])

    __rmul__ = __mul__

    def times_power(self, half_steps):
        """Multiply by ``t**(half_steps/2)``."""
        f = None if self.floor is None else self.floor + (0 if self.floor == self.EXACT else int(half_steps))
        return Series(self.shift, self.kmax + int(half_steps), self.coeffs.copy(), f)

    def rebase(self, shift):
        """Re-express with a new shift differing by a half-integer."""
        d = (self.shift - shift) * 2
        if abs(d - round(d.real)) > 1e-12:
            raise ValueError("shift change must be a half-integer")
        return Series(complex(shift), self.kmax + int(round(d.real)), self.coeffs.copy())

    def deriv(self):
        e = self.exponents()
        f = None if self.floor is None else (self.EXACT if self.floor == self.EXACT else self.floor - 2)
        return Series(self.shift, self.kmax - 2, self.coeffs * e, f)

    def integrate(self):
        """Termwise antiderivative; a ``t**-1`` term becomes ``log_coef``."""
        e = self.exponents() + 1.0
        c = self.coeffs.copy()
        log_coef = 0.0
        for i, ei in enumerate(e):
            if abs(ei) < 1e-12:
                log_coef = c[i]
                c[i] = 0.0
            else:
                c[i] = c[i] / ei
        return Series(self.shift, self.kmax + 2, c), log_coef

    def coef(self, k):
        i = self.kmax - k
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0.0

    def top_nonzero(self, rtol=1e-12):
        """Largest k with a coefficient that is not negligible."""
        scale = max(np.abs(self.coeffs).max(), 1.0)
        for i, c in enumerate(self.coeffs):
            if abs(c) > rtol * scale or (rtol == 0.0 and c != 0):
                return self.kmax - i
        return None

    def terms(self, t):
        t = np.asarray(t, dtype=float)
        e = self.exponents()
        return self.coeffs[:, None] * np.power(t[None, :].astype(complex), e[:, None])

    def __call__(self, t, nterms=None):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        c = self.coeffs if nterms is None else self.coeffs[:nterms]
        e = self.exponents()[: len(c)]
        return (c[:, None] * np.power(t[None, :].astype(complex), e[:, None])).sum(axis=0)


def optimal_sum(series, t, max_terms=None, window=6):
    """Sum an asymptotic series at ``t`` up to its smallest terms.

    Products and derivatives interleave subsequences with different decay,
    so the cut is placed at the minimum of the envelope
    ``max |term|`` over ``window`` consecutive orders rather than at the
    first uptick. Returns ``(value, envelope_at_cut)``; when the series
    ends before turning, the envelope of its last block is returned.
    """
    t = float(t)
    c = series.coeffs if max_terms is None else series.coeffs[:max_terms]
    e = series.exponents()[: len(c)]
    mags = np.abs(c) * t ** e.real
    if not np.any(mags):
        return 0.0 + 0.0j, 0.0
    nz = np.flatnonzero(mags)
    first, n = int(nz[0]), int(nz[-1]) + 1  # trailing zeros are unsolved orders
    env = np.array([mags[i:i + window].max() for i in range(n)])
    # only cut at block starts past the leading term
    cut = first + 1 + int(np.argmin(env[first + 1:])) if n > first + 1 else n
    if cut >= n - window + 1:
        cut = n
        omitted = float(env[max(n - window, 0)])
    else:
        omitted = float(env[cut])
    terms = c[:cut] * np.power(complex(t), e[:cut])
    return complex(terms.sum()), omitted


def _entry_order(r0, r1, d1):
    # the first order where the probe changes the residual by more than
    # rounding of what is already there
    for i, c in enumerate(d1.coeffs):
        k = d1.kmax - i
        if abs(c) > 1e-10 * max(1.0, abs(r0.coef(k)), abs(r1.coef(k))):
            return k
    return None


def solve_coefficients(residual, series, unknown):
    """Fill the coefficients listed in ``unknown`` (k values) in order.

    ``residual(series) -> Series`` must be polynomial in the coefficients.
    Each new coefficient is assumed to enter the residual affinely at the
    highest order it reaches, which holds for the triangular systems met
    here; this is checked by a third evaluation. The order at which a
    coefficient enters is fixed by the first one; size the input series at
    roughly 2.5 times the number of unknowns so the window reaches it.
    """
    coeffs = series.coeffs.copy()
    kmax = series.kmax
    offset = None
    for k in unknown:
        i = kmax - k
        coeffs[i] = 0.0
        r0 = residual(Series(series.shift, kmax, coeffs.copy()))
        if offset is None:
            probe = 1.0
        else:
            # probe at the size of the equation so rounding cannot hide it
            probe = max(1.0, abs(r0.coef(k + offset)))
        coeffs[i] = probe
        r1 = residual(Series(series.shift, kmax, coeffs.copy()))
        coeffs[i] = 2 * probe
        r2 = residual(Series(series.shift, kmax, coeffs.copy()))
        d1 = r1 - r0
        if offset is None:
            p = _entry_order(r0, r1, d1)
            if p is None:
                raise ArithmeticError("coefficient k=%d does not enter the residual" % k)
            offset = p - k
        p = k + offset
        if p < d1.klast:
            raise ArithmeticError("coefficient k=%d fell outside the valid window; lengthen the series" % k)
        a = d1.coef(p)
        if a == 0:
            raise ArithmeticError("coefficient k=%d does not enter where expected" % k)
        scale = max(abs(a), abs(r0.coef(p)), abs(r2.coef(p)))
        if abs((r2 - r0).coef(p) - 2 * a) > 1e-8 * scale:
            raise ArithmeticError("coefficient k=%d enters nonlinearly" % k)
        coeffs[i] = -probe * r0.coef(p) / a
    return Series(series.shift, kmax, coeffs)


def leading_exponent(residual_of_shift, guess, samples=(0.0, 1.0, 2.0, 3.0)):
    """Find the exponent ``rho`` of ``t**rho`` making the first
    rho-dependent residual coefficient vanish (indicial equation).

    Coefficients are compared at equal offsets ``k`` relative to each
    sample's own shift, so the residuals must share ``kmax``.
    """
    res = [residual_of_shift(r) for r in samples]
    kmax = res[0].kmax
    if any(r.kmax != kmax for r in res):
        raise ValueError("residual layout depends on the exponent")
    kmin = max(r.kmin for r in res)
    for k in range(kmax, kmin - 1, -1):
        vals = np.array([r.coef(k) for r in res])
        if np.abs(vals).max() > 1e-10:
            poly = np.polyfit(np.asarray(samples), vals, len(samples) - 1)
            poly = np.where(np.abs(poly) < 1e-9 * np.abs(poly).max(), 0, poly)
            roots = np.roots(np.trim_zeros(poly, "f"))
            if len(roots) == 0:
                raise ArithmeticError("indicial equation has no root")
            return complex(roots[np.argmin(np.abs(roots - guess))])
    raise ArithmeticError("residual does not depend on the exponent")
