import mpmath
import numpy as np
from hypothesis import given, settings, strategies as st

from fhsoftedge.ddarith import CDD, DD, dd_exp, dd_log, dd_sqrt, dd_sum, two_prod, two_sum

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(lambda v: abs(v) > 1e-6)


def _mp(x: DD):
    return [mpmath.mpf(float(h)) + mpmath.mpf(float(l)) for h, l in zip(np.ravel(x.hi), np.ravel(x.lo))]


@given(finite, finite)
def test_two_sum_is_exact(a, b):
    s, e = two_sum(np.float64(a), np.float64(b))
    with mpmath.workdps(60):
        assert mpmath.mpf(float(s)) + mpmath.mpf(float(e)) == mpmath.mpf(a) + mpmath.mpf(b)


@given(finite, finite)
def test_two_prod_is_exact(a, b):
    p, e = two_prod(np.float64(a), np.float64(b))
    with mpmath.workdps(60):
        assert mpmath.mpf(float(p)) + mpmath.mpf(float(e)) == mpmath.mpf(a) * mpmath.mpf(b)


@settings(max_examples=50)
@given(finite, finite)
def test_arithmetic_has_double_double_accuracy(a, b):
    x = DD(np.array([a]), np.array([a * 1e-17]))
    y = DD(np.array([b]), np.array([b * 3e-18]))
    with mpmath.workdps(60):
        mx, my = _mp(x)[0], _mp(y)[0]
        for got, ref in ((x + y, mx + my), (x * y, mx * my), (x / y, mx / my)):
            g = _mp(got)[0]
            assert abs(g - ref) <= 1e-30 * max(abs(ref), abs(mx) * abs(my), abs(mx) + abs(my))


def test_elementary_functions():
    with mpmath.workdps(50):
        x = DD(np.array([0.3, 2.0, 17.5]))
        ref_sqrt = [mpmath.sqrt(v) for v in _mp(x)]
        ref_exp = [mpmath.exp(v) for v in _mp(x)]
        ref_log = [mpmath.log(v) for v in _mp(x)]
        for got, ref in ((dd_sqrt(x), ref_sqrt), (dd_exp(x), ref_exp), (dd_log(x), ref_log)):
            for g, r in zip(_mp(got), ref):
                assert abs(g - r) <= 1e-30 * abs(r)


def test_compensated_sum_cancels():
    x = DD(np.array([1e16, 1.0, -1e16, 1e-16]))
    s = dd_sum(x)
    assert abs(float(s.hi) + float(s.lo) - (1.0 + 1e-16)) < 1e-31


def test_complex_double_double_product():
    z = CDD(DD(np.array([1.0])), DD(np.array([2.0])))
    w = z * z
    assert np.allclose(w.to_complex(), (1 + 2j) ** 2)
