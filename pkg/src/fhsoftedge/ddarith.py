"""Vectorised double-double arithmetic.

A :class:`DD` holds two float64 arrays ``hi`` and ``lo`` with ``|lo| <=
ulp(hi)/2``; the represented value is ``hi + lo`` (about 31 significant
digits). :class:`CDD` is the complex counterpart built from two DDs.
Both support ``+ - * /`` with each other and with plain floats/arrays, plus
:func:`dd_sum` (exact pairwise reduction) and :func:`dd_sqrt`.

Only what the quadrature and Stieltjes code need is implemented: square
root, exp and log (the last two for real DD only).
"""

from __future__ import annotations

import numpy as np

_SPLIT = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def split(a):
    t = _SPLIT * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


class DD:
    __slots__ = ("hi", "lo")
    __array_priority__ = 100

    def __init__(self, hi, lo=None):
        self.hi = np.asarray(hi, dtype=float)
        self.lo = np.zeros_like(self.hi) if lo is None else np.asarray(lo, dtype=float)

    @classmethod
    def from_mpf(cls, values):
        """Round a sequence of mpmath numbers to DD."""
        import mpmath

        hi = np.array([float(v) for v in values])
        lo = np.array([float(mpmath.mpf(v) - mpmath.mpf(h)) for v, h in zip(values, hi)])
        return cls(hi, lo)

    def __len__(self):
        return len(self.hi)

    def __getitem__(self, idx):
        return DD(self.hi[idx], self.lo[idx])

    @property
    def shape(self):
        return self.hi.shape

    def to_float(self):
        return self.hi + self.lo

    def _coerce(self, other):
        if isinstance(other, DD):
            return other
        return DD(other)

    def __add__(self, other):
        if isinstance(other, CDD):
            return other + self
        o = self._coerce(other)
        s, e = two_sum(self.hi, o.hi)
        t, f = two_sum(self.lo, o.lo)
        e = e + t
        s, e = quick_two_sum(s, e)
        e = e + f
        return DD(*quick_two_sum(s, e))

    __radd__ = __add__

    def __neg__(self):
        return DD(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, CDD):
            return other * self
        o = self._coerce(other)
        p, e = two_prod(self.hi, o.hi)
        e = e + (self.hi * o.lo + self.lo * o.hi)
        return DD(*quick_two_sum(p, e))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, CDD):
            return CDD(self) / other
        o = self._coerce(other)
        q1 = self.hi / o.hi
        r = self - o * q1
        q2 = r.hi / o.hi
        r = r - o * q2
        q3 = r.hi / o.hi
        q1, q2 = quick_two_sum(q1, q2)
        return DD(q1, q2) + q3

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __repr__(self):
        return "DD(%r)" % (self.to_float(),)


def dd_sqrt(x: DD) -> DD:
    """Square root by one Newton correction of the float64 estimate."""
    r = np.sqrt(x.hi)
    safe = np.where(r == 0, 1.0, r)
    p, e = two_prod(r, r)
    corr = ((x.hi - p) - e + x.lo) / (2 * safe)
    return DD(*quick_two_sum(r, np.where(r == 0, 0.0, corr)))


_LN2 = None


def _ln2():
    global _LN2
    if _LN2 is None:
        import mpmath

        with mpmath.workdps(40):
            _LN2 = DD.from_mpf([mpmath.log(2)])
    return _LN2


def dd_exp(x: DD) -> DD:
    """exp by reduction ``x = k ln2 + r`` and an expm1 Taylor series in
    ``r/1024``, squared back up as ``(1+a)^2 - 1 = a(2+a)``."""
    k = np.round(x.hi / np.log(2.0))
    ln2 = _ln2()
    r = x - DD(*two_prod(np.full_like(k, ln2.hi[0]), k)) - DD(ln2.lo[0] * k)
    r = r * (1.0 / 1024.0)
    term = r
    a = r
    for j in range(2, 12):
        term = term * r / float(j)
        a = a + term
    for _ in range(10):
        a = a * (a + 2.0)
    acc = a + 1.0
    scale = np.ldexp(1.0, k.astype(int))
    return DD(acc.hi * scale, acc.lo * scale)


def dd_log(x: DD) -> DD:
    """Natural log of positive DD by two Newton steps on exp."""
    y = DD(np.log(x.hi))
    for _ in range(2):
        y = y + x * dd_exp(-y) - 1.0
    return y


class CDD:
    """Complex double-double: ``re + i*im`` with DD parts."""

    __slots__ = ("re", "im")
    __array_priority__ = 101

    def __init__(self, re, im=None):
        self.re = re if isinstance(re, DD) else DD(np.real(re))
        if im is None:
            im = DD(np.zeros_like(self.re.hi)) if isinstance(re, DD) else DD(np.imag(re))
        self.im = im if isinstance(im, DD) else DD(im)

    def __getitem__(self, idx):
        return CDD(self.re[idx], self.im[idx])

    def __len__(self):
        return len(self.re)

    def to_complex(self):
        return self.re.to_float() + 1j * self.im.to_float()

    def _coerce(self, other):
        if isinstance(other, CDD):
            return other
        if isinstance(other, DD):
            return CDD(other)
        other = np.asarray(other)
        return CDD(DD(other.real), DD(other.imag if np.iscomplexobj(other) else np.zeros_like(other, dtype=float)))

    def __add__(self, other):
        o = self._coerce(other)
        return CDD(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CDD(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, DD) or (not isinstance(other, CDD) and not np.iscomplexobj(other)):
            o = other if isinstance(other, DD) else DD(other)
            return CDD(self.re * o, self.im * o)
        o = self._coerce(other)
        return CDD(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        den = o.re * o.re + o.im * o.im
        num = self * CDD(o.re, -o.im)
        return CDD(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __repr__(self):
        return "CDD(%r)" % (self.to_complex(),)


def dd_sum(x):
    """Sum all entries of a DD/CDD vector by a pairwise DD reduction."""
    if isinstance(x, CDD):
        return CDD(dd_sum(x.re), dd_sum(x.im))
    hi, lo = x.hi.ravel(), x.lo.ravel()
    if hi.size == 0:
        return DD(0.0)
    v = DD(hi, lo)
    while len(v) > 1:
        if len(v) % 2:
            v = DD(np.append(v.hi, 0.0), np.append(v.lo, 0.0))
        v = v[0::2] + v[1::2]
    return DD(v.hi[0], v.lo[0])


def cdd_sqrt(z: CDD) -> CDD:
    """Principal square root, refined by one Newton step in CDD."""
    r0 = np.sqrt(z.to_complex())
    r = CDD(DD(r0.real), DD(r0.imag))
    return (r + z / r) * 0.5


def to_number(x):
    """Collapse a scalar DD/CDD (or float) to a Python float/complex."""
    if isinstance(x, CDD):
        return complex(x.to_complex())
    if isinstance(x, DD):
        return float(x.to_float())
    return x
