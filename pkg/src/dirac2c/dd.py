"""Minimal double-double (pairwise float64) arithmetic for one cancellation corner.

The analytic bound-continuum matrix elements evaluate a terminating
hypergeometric sum whose terms can exceed the result by ~1e12 for
(large radial order) x (lowest momentum bin) x (negative energy branch).
There the float64 term chain loses up to ~1e-2 relative accuracy; this
module recomputes just those elements with ~31 significant digits using
error-free float64 transformations (Dekker/Knuth).  Scalars only; the
hot paths never enter here.

A DD real is a tuple (hi, lo) with hi + lo the represented value and
|lo| <= ulp(hi)/2.  A DD complex is a pair of DD reals.
"""

from __future__ import annotations

import math

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a: float, b: float):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def _split(a: float):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a: float, b: float):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    e += x[1] + y[1]
    hi, lo = two_sum(s, e)
    return hi, lo


def dd_neg(x):
    return -x[0], -x[1]


def dd_sub(x, y):
    return dd_add(x, dd_neg(y))


def dd_mul(x, y):
    p, e = two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    hi, lo = two_sum(p, e)
    return hi, lo


def dd_div(x, y):
    q1 = x[0] / y[0]
    r = dd_add(x, dd_neg(dd_mul((q1, 0.0), y)))
    q2 = r[0] / y[0]
    r = dd_add(r, dd_neg(dd_mul((q2, 0.0), y)))
    q3 = r[0] / y[0]
    hi, lo = two_sum(q1, q2)
    lo += q3
    return two_sum(hi, lo)


def dd_sqrt(x):
    if x[0] <= 0.0:
        raise ValueError("dd_sqrt needs a positive argument")
    s0 = math.sqrt(x[0])
    # one Newton step in DD: s = (s0 + x/s0)/2
    q = dd_div(x, (s0, 0.0))
    s, e = two_sum(s0, q[0])
    e += q[1]
    hi, lo = two_sum(0.5 * s, 0.5 * e)
    return hi, lo


def dd_from(a: float):
    return float(a), 0.0


def dd_to_float(x) -> float:
    return x[0] + x[1]


# ---- complex layer: ((re_hi, re_lo), (im_hi, im_lo)) ----

def cdd_from(z: complex):
    return dd_from(z.real), dd_from(z.imag)


def cdd_to_complex(z) -> complex:
    return complex(dd_to_float(z[0]), dd_to_float(z[1]))


def cdd_add(x, y):
    return dd_add(x[0], y[0]), dd_add(x[1], y[1])


def cdd_sub(x, y):
    return dd_sub(x[0], y[0]), dd_sub(x[1], y[1])


def cdd_mul(x, y):
    re = dd_sub(dd_mul(x[0], y[0]), dd_mul(x[1], y[1]))
    im = dd_add(dd_mul(x[0], y[1]), dd_mul(x[1], y[0]))
    return re, im


def cdd_mul_real(x, a):
    return dd_mul(x[0], a), dd_mul(x[1], a)


def cdd_div(x, y):
    den = dd_add(dd_mul(y[0], y[0]), dd_mul(y[1], y[1]))
    re = dd_div(dd_add(dd_mul(x[0], y[0]), dd_mul(x[1], y[1])), den)
    im = dd_div(dd_sub(dd_mul(x[1], y[0]), dd_mul(x[0], y[1])), den)
    return re, im


def cdd_abs2(x) -> float:
    return dd_to_float(dd_add(dd_mul(x[0], x[0]), dd_mul(x[1], x[1])))


CDD_ZERO = (dd_from(0.0), dd_from(0.0))
CDD_ONE = (dd_from(1.0), dd_from(0.0))
