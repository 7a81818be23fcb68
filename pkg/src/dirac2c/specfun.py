"""Special functions for Dirac-Coulomb wavefunctions and analytic matrix elements.

Provides the small set of evaluators everything else is built on:

* complex principal-branch log-gamma,
* the terminating Kummer function 1F1(-n, c, z) (coefficients, Horner
  evaluation, and a stable degree recurrence for whole tables),
* the confluent hypergeometric function 1F1(a, c, z) for complex
  parameters/arguments, accurate to ~1e-11 relative on the parameter
  domain generated by the continuum momentum grids,
* the Gauss hypergeometric 2F1 (general series plus a stable recurrence
  for the terminating 2F1(-j, b; c; x) family),
* spinor spherical harmonics.

All evaluators are pure and reentrant; no module state is mutated after
import.

Units/conventions: arguments are dimensionless.  Spherical harmonics use
the Condon-Shortley phase.  Complex powers and logs are principal-branch
throughout.

Regime switching for 1F1(a, c, z)
---------------------------------
Maclaurin summation loses roughly |e^z| * eps of relative accuracy for
oscillatory arguments, so it is only trusted for |z| <= _SERIES_RADIUS.
For large |z| the compound asymptotic expansion (both Stokes branches)
is used when its optimally-truncated error meets tolerance; the crossover
constant _ASYM_MIN_ABS_Z and the parameter-size criterion below were
calibrated against mpmath (see tests).  Between the two regimes the
function is analytically continued by re-expanding the defining ODE

    z w'' + (c - z) w' - a w = 0

in Taylor steps of _MARCH_STEP along the ray through z.  The ray march is
the fallback whenever the asymptotic error estimate fails tolerance.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.special import loggamma as _loggamma, sph_harm_y as _sph_harm_y

from .errors import InvalidParameter, InvalidQuantumNumbers, NonConvergence

try:
    from numba import njit as _njit

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba is a normal dependency
    _HAVE_NUMBA = False

    def _njit(*args, **kwargs):
        def deco(fn):
            return fn
        return deco

__all__ = [
    "ln_gamma",
    "kummer_coeffs",
    "kummer_poly",
    "kummer_poly_table",
    "kummer_complex",
    "gauss_2f1",
    "hyp2f1_negint_table",
    "spinor_harmonic",
]

# Maclaurin summation loses ~e^CANCEL * eps where CANCEL ~ max(|z|, 2 sqrt(|a z|));
# accept the series only below this exponent (e^11 * eps ~ 1.3e-11).
_TAYLOR_CANCEL_MAX = 11.0
# Never attempt the asymptotic expansion below this |z|; the fixed-order
# inverse-power form is tried above it, with a per-lane error estimate
# that routes failing lanes (large parameters at moderate |z|) to the
# ODE march, which is uniformly accurate but costlier.
_ASYM_MIN_ABS_Z = 55.0
# ODE re-expansion: phase budget per step (cancellation e^7 * eps ~ 2e-13/step).
_MARCH_PHASE_BUDGET = 7.0
_MARCH_STEP_MAX = 6.0
# local terms: budget^m / m! must fall below eps * e^budget (m ~ 44)
_MARCH_TERMS = 48
_MAX_SERIES_TERMS = 700


def _taylor_cancellation(a: complex, z_abs) -> np.ndarray:
    """Exponent of the worst-case relative cancellation of the Maclaurin sum."""
    return np.maximum(z_abs, 2.0 * np.sqrt(abs(a) * z_abs))


def _is_nonpositive_integer(x: complex, tol: float = 1e-12) -> bool:
    xr = complex(x)
    return abs(xr.imag) < tol and xr.real <= 0.5 and abs(xr.real - round(xr.real)) < tol


def ln_gamma(z):
    """Principal-branch log-gamma for complex argument.

    Raises InvalidParameter at the poles (nonpositive integers).
    """
    zarr = np.asarray(z, dtype=complex)
    if np.any([_is_nonpositive_integer(w) for w in np.atleast_1d(zarr).ravel()]):
        raise InvalidParameter("ln_gamma pole: argument is a nonpositive integer")
    out = _loggamma(zarr)
    if zarr.ndim == 0:
        return complex(out)
    return out


def kummer_coeffs(n: int, c: float) -> np.ndarray:
    """Coefficients t_j of the terminating series 1F1(-n, c, z) = sum_j t_j z^j.

    Uses the Pochhammer-ratio recurrence t_{j+1} = t_j * (-n + j) / ((c + j)(j + 1)),
    t_0 = 1.  (The printed recurrence of the source formulas divides by
    j(c + j - 1), which is singular at j = 0; this is the standard,
    equivalent form, cross-checked against direct Pochhammer summation.)
    """
    if n < 0:
        raise InvalidParameter("polynomial order must be nonnegative")
    if _is_nonpositive_integer(c):
        raise InvalidParameter("forbidden denominator parameter c")
    t = np.empty(n + 1)
    t[0] = 1.0
    for j in range(n):
        t[j + 1] = t[j] * (-n + j) / ((c + j) * (j + 1.0))
    return t


def kummer_poly(n: int, c: float, z) -> float | np.ndarray:
    """Terminating confluent hypergeometric 1F1(-n, c, z), Horner evaluation."""
    t = kummer_coeffs(n, c)
    zarr = np.asarray(z, dtype=float)
    acc = np.full_like(zarr, t[n], dtype=float)
    for j in range(n - 1, -1, -1):
        acc = acc * zarr + t[j]
    if zarr.ndim == 0:
        return float(acc)
    return acc


def kummer_poly_table(n_max: int, c: float, z: np.ndarray) -> np.ndarray:
    """Values y_k = 1F1(-k, c, z) for k = 0..n_max on an array z, shape (n_max+1, len(z)).

    Upward degree recurrence (Laguerre form), stable for the large orders
    where Horner on alternating coefficients loses precision:

        (c + k) y_{k+1} = (2k + c - z) y_k - k y_{k-1}
    """
    if _is_nonpositive_integer(c):
        raise InvalidParameter("forbidden denominator parameter c")
    z = np.asarray(z, dtype=float)
    out = np.empty((n_max + 1,) + z.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - z / c
    for k in range(1, n_max):
        out[k + 1] = ((2.0 * k + c - z) * out[k] - k * out[k - 1]) / (c + k)
    return out


def _kummer_series(a: complex, c: complex, z: np.ndarray, tol: float) -> np.ndarray:
    """Maclaurin summation of 1F1; caller restricts to |z| within the trusted radius."""
    term = np.ones_like(z, dtype=complex)
    acc = np.ones_like(z, dtype=complex)
    for s in range(_MAX_SERIES_TERMS):
        term = term * ((a + s) / ((c + s) * (s + 1.0))) * z
        acc += term
        if np.all(np.abs(term) <= tol * np.abs(acc)):
            break
    return acc


def _kummer_series_pair(a: complex, c: complex, z: complex, tol: float) -> tuple[complex, complex]:
    """(w, w') at a single point from the Maclaurin series; w' = (a/c) 1F1(a+1, c+1, z)."""
    zz = np.asarray([z], dtype=complex)
    w = _kummer_series(a, c, zz, tol)[0]
    dw = (a / c) * _kummer_series(a + 1.0, c + 1.0, zz, tol)[0]
    return complex(w), complex(dw)


def _kummer_asymptotic(a: complex, c: complex, z: np.ndarray, tol: float,
                       n_terms: int = 24) -> tuple[np.ndarray, np.ndarray]:
    """Compound large-|z| expansion; returns (values, relative error estimate).

    1F1(a,c,z) ~ Gamma(c) [ e^z z^{a-c}/Gamma(a) 2F0(c-a, 1-a; 1/z)
                            + (-z)^{-a}/Gamma(c-a) 2F0(a, a-c+1; -1/z) ]

    The inverse-power coefficients depend only on (a, c), so each 2F0 is a
    fixed-order Horner polynomial in 1/z; the last term bounds the error
    per lane (both Stokes branches kept: the production arguments sit on
    the imaginary axis where they are comparable).  The caller restricts
    to |z| >= _ASYM_MIN_ABS_Z and falls back to the ODE march on lanes
    whose error estimate misses tolerance.
    """
    vals = np.zeros_like(z, dtype=complex)
    errs = np.zeros(z.shape, dtype=float)

    lg_c = _loggamma(c)
    pref1 = np.exp(lg_c - _loggamma(a) + z + (a - c) * np.log(z)) if not _is_nonpositive_integer(a) else 0.0
    pref2 = (np.exp(lg_c - _loggamma(c - a) - a * np.log(-z))
             if not _is_nonpositive_integer(c - a) else 0.0)

    for pref, p1, p2, zz in (
        (pref1, c - a, 1.0 - a, z),
        (pref2, a, a - c + 1.0, -z),
    ):
        if isinstance(pref, float) and pref == 0.0:
            continue
        coef = np.empty(n_terms + 1, dtype=complex)
        coef[0] = 1.0
        for s in range(n_terms):
            coef[s + 1] = coef[s] * (p1 + s) * (p2 + s) / (s + 1.0)
        inv = 1.0 / zz
        acc = np.full_like(zz, coef[n_terms])
        for s in range(n_terms - 1, -1, -1):
            acc = acc * inv + coef[s]
        vals += pref * acc
        errs += np.abs(pref) * np.abs(coef[n_terms]) * np.abs(inv) ** n_terms

    scale = np.abs(vals)
    scale[scale == 0.0] = 1.0
    return vals, errs / scale


def _march_ray(a: complex, c: complex, unit: complex, radii: np.ndarray,
               tol: float) -> np.ndarray:
    """Continue 1F1 along the ray z = unit * x by stepwise ODE re-expansion.

    `radii` must be sorted ascending.  The start point and the step size
    keep the local phase change below _MARCH_PHASE_BUDGET (local frequency
    ~ 1 + sqrt(|a|/x)), so each re-expansion loses at most ~e^7 * eps.
    Stable on oscillatory rays because |e^z| does not grow along them; for
    rays with Re(unit) < 0 the caller applies the Kummer transformation
    first.
    """
    out = np.empty(radii.shape, dtype=complex)
    abs_a = max(abs(a), 1.0)
    # from-origin series start obeying the same cancellation budget
    x0 = min(_TAYLOR_CANCEL_MAX * 0.8, (_MARCH_PHASE_BUDGET / 2.0) ** 2 / abs_a,
             max(radii[0] - 0.5, 0.05))
    x0 = max(x0, 1e-3)
    w, dw = _kummer_series_pair(a, c, unit * x0, tol * 1e-2)

    idx = 0
    x_c = x0
    n_t = len(radii)
    while idx < n_t:
        # step limits: phase budget, and the local convergence radius set by
        # the regular-singular point at z = 0 (ratio (h/x_c)^m must decay)
        step = min(_MARCH_STEP_MAX,
                   _MARCH_PHASE_BUDGET / (1.0 + math.sqrt(abs_a / x_c)),
                   0.5 * x_c)
        x_next = min(x_c + step, radii[-1])
        # local Taylor coefficients at z_c for offset h along the ray
        z_c = unit * x_c
        d = np.empty(_MARCH_TERMS + 2, dtype=complex)
        d[0] = w
        d[1] = dw
        for m in range(_MARCH_TERMS):
            d[m + 2] = ((a + m) * d[m] - (m + 1.0) * (m + c - z_c) * d[m + 1]) / (
                z_c * (m + 2.0) * (m + 1.0))
        # evaluate every target inside this step
        hi = np.searchsorted(radii, x_next, side="right")
        if hi > idx:
            h = unit * (radii[idx:hi] - x_c)
            acc = np.full(h.shape, d[_MARCH_TERMS + 1], dtype=complex)
            for m in range(_MARCH_TERMS, -1, -1):
                acc = acc * h + d[m]
            out[idx:hi] = acc
            idx = hi
        # advance (w, w') to the next center
        h1 = unit * (x_next - x_c)
        acc = d[_MARCH_TERMS + 1]
        dacc = 0.0
        for m in range(_MARCH_TERMS, -1, -1):
            dacc = dacc * h1 + (m + 1) * d[m + 1]
            acc = acc * h1 + d[m]
        w, dw = acc, dacc
        x_c = x_next
    return out


def kummer_complex(a, c, z, tol: float = 1e-12):
    """Confluent hypergeometric 1F1(a, c, z) for complex a, c and complex z.

    `z` may be a scalar or array; `a`, `c` are scalars.  Raises
    NonConvergence if no regime reaches an internal error estimate
    compatible with `tol` (the practical accuracy on the production
    parameter domain is ~1e-11 relative, see tests).
    """
    a = complex(a)
    c = complex(c)
    if _is_nonpositive_integer(c):
        raise InvalidParameter("forbidden denominator parameter c in 1F1")
    z_in = np.asarray(z, dtype=complex)
    scalar = z_in.ndim == 0
    zf = np.atleast_1d(z_in).astype(complex).ravel()
    out = np.empty_like(zf)

    # terminating case: plain Horner-type summation, no regime logic needed
    if _is_nonpositive_integer(a):
        n = int(round(-a.real))
        term = np.ones_like(zf)
        acc = np.ones_like(zf)
        for s in range(n):
            term = term * ((a + s) / ((c + s) * (s + 1.0))) * zf
            acc += term
        return complex(acc[0]) if scalar else acc.reshape(z_in.shape)

    # Kummer transformation moves decaying-exponential arguments to growing ones
    neg = zf.real < 0.0
    if np.any(neg):
        out[neg] = np.exp(zf[neg]) * kummer_complex(c - a, c, -zf[neg], tol)

    pos = ~neg
    zp = zf[pos]
    res = np.empty_like(zp)
    absz = np.abs(zp)

    small = _taylor_cancellation(a, absz) <= _TAYLOR_CANCEL_MAX
    if np.any(small):
        res[small] = _kummer_series(a, c, zp[small], tol)

    big = ~small
    need_march = np.zeros(zp.shape, dtype=bool)
    if np.any(big):
        try_asym = big & (absz >= _ASYM_MIN_ABS_Z)
        if np.any(try_asym):
            vals, rel = _kummer_asymptotic(a, c, zp[try_asym], tol)
            ok = rel <= tol
            tgt = np.where(try_asym)[0]
            res[tgt[ok]] = vals[ok]
            need_march[tgt[~ok]] = True
        need_march |= big & (absz < _ASYM_MIN_ABS_Z)

    if np.any(need_march):
        # group marched points by ray direction
        zm = zp[need_march]
        units = zm / np.abs(zm)
        vals = np.empty_like(zm)
        done = np.zeros(zm.shape, dtype=bool)
        while not np.all(done):
            i0 = int(np.argmin(done))
            same = (~done) & (np.abs(units - units[i0]) < 1e-13)
            radii = np.abs(zm[same])
            if np.all(np.diff(radii) >= 0.0):
                vals[same] = _march_ray(a, c, units[i0], radii, tol)
            else:
                order = np.argsort(radii)
                got = _march_ray(a, c, units[i0], radii[order], tol)
                tmp = np.empty_like(got)
                tmp[order] = got
                vals[same] = tmp
            done |= same
        res[need_march] = vals

    out[pos] = res
    if not np.all(np.isfinite(out)):
        raise NonConvergence("1F1 evaluation produced non-finite values")
    return complex(out[0]) if scalar else out.reshape(z_in.shape)


def hyp2f1_negint_table(j_max: int, b: complex, c: complex, x: np.ndarray) -> np.ndarray:
    """Terminating h_j = 2F1(-j, b; c; x) for j = 0..j_max, shape (j_max+1, len(x)).

    Three-term contiguous recurrence in the negative-integer slot,

        (c + j) h_{j+1} = (2j + c - (b + j) x) h_j + j (x - 1) h_{j-1},

    stable on the production arguments (|x| <= 2 on the unit-circle family
    generated by bound-continuum integrals).
    """
    if _is_nonpositive_integer(c):
        raise InvalidParameter("forbidden denominator parameter c in 2F1")
    x = np.asarray(x, dtype=complex)
    out = np.empty((j_max + 1,) + x.shape, dtype=complex)
    out[0] = 1.0
    if j_max >= 1:
        out[1] = 1.0 - (b / c) * x
    for j in range(1, j_max):
        out[j + 1] = ((2.0 * j + c - (b + j) * x) * out[j] + j * (x - 1.0) * out[j - 1]) / (c + j)
    return out


def gauss_2f1(a, b, c, z, tol: float = 1e-12) -> complex:
    """Gauss hypergeometric 2F1(a, b; c; z) for complex parameters.

    Strategy: exploit a<->b symmetry, terminate when a or b is a
    nonpositive integer, otherwise sum the Maclaurin series, applying the
    Pfaff transformation

        2F1(a, b; c; z) = (1 - z)^(-a) 2F1(a, c - b; c; z / (z - 1))

    when it shrinks |z|.  Raises NonConvergence outside the transformable
    domain.
    """
    a = complex(a)
    b = complex(b)
    c = complex(c)
    z = complex(z)
    if _is_nonpositive_integer(c):
        raise InvalidParameter("forbidden denominator parameter c in 2F1")
    if z == 0:
        return 1.0 + 0.0j

    # a <-> b symmetry: put a terminating parameter first
    if _is_nonpositive_integer(b) and not _is_nonpositive_integer(a):
        a, b = b, a
    if _is_nonpositive_integer(a):
        n = int(round(-a.real))
        term = 1.0 + 0.0j
        acc = 1.0 + 0.0j
        for s in range(n):
            term *= (a + s) * (b + s) / ((c + s) * (s + 1.0)) * z
            acc += term
        return acc

    if abs(z) >= 1.0:
        zp = z / (z - 1.0)
        if abs(zp) < 1.0 - 1e-12:
            return (1.0 - z) ** (-a) * gauss_2f1(a, c - b, c, zp, tol)
        raise NonConvergence(f"2F1 argument |z|={abs(z):.3f} not reducible below 1")

    # Pfaff if it helps convergence
    zp = z / (z - 1.0)
    if abs(zp) < 0.9 * abs(z):
        return (1.0 - z) ** (-a) * gauss_2f1(a, c - b, c, zp, tol)

    term = 1.0 + 0.0j
    acc = 1.0 + 0.0j
    for s in range(_MAX_SERIES_TERMS * 4):
        term *= (a + s) * (b + s) / ((c + s) * (s + 1.0)) * z
        acc += term
        if abs(term) <= tol * abs(acc):
            return acc
    raise NonConvergence("2F1 series did not converge")


def _orbital_l(kappa: int) -> int:
    """Orbital angular momentum of the upper spinor component for a given kappa."""
    return kappa if kappa > 0 else -kappa - 1


def spinor_harmonic(kappa: int, m: float, theta, phi) -> np.ndarray:
    """Two-component spinor spherical harmonic Omega_{kappa,m}(theta, phi).

    Components:

        ( sqrt((kappa + 1/2 - m) / (2 kappa + 1)) Y_{l, m-1/2},
         -(kappa/|kappa|) sqrt((kappa + 1/2 + m) / (2 kappa + 1)) Y_{l, m+1/2} )

    with l = kappa for kappa > 0 and l = -kappa - 1 for kappa < 0, and
    Y_{l,m} the Condon-Shortley spherical harmonics (Y = 0 when |m| > l).
    Returns shape (2,) + broadcast(theta, phi).shape, complex.
    """
    if kappa == 0:
        raise InvalidQuantumNumbers("kappa must be nonzero")
    two_m = 2.0 * m
    if abs(two_m - round(two_m)) > 1e-9 or round(two_m) % 2 == 0:
        raise InvalidQuantumNumbers(f"m must be half-integral, got {m}")
    j = abs(kappa) - 0.5
    if abs(m) > j + 1e-9:
        raise InvalidQuantumNumbers(f"|m| = {abs(m)} exceeds j = {j}")

    l = _orbital_l(kappa)
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    shape = np.broadcast(theta, phi).shape

    def Y(mm: int) -> np.ndarray:
        if abs(mm) > l:
            return np.zeros(shape, dtype=complex)
        return np.asarray(_sph_harm_y(l, mm, theta, phi), dtype=complex)

    m_up = int(round(m - 0.5))
    m_dn = int(round(m + 0.5))
    c_up = (kappa + 0.5 - m) / (2.0 * kappa + 1.0)
    c_dn = (kappa + 0.5 + m) / (2.0 * kappa + 1.0)
    # the ratios are nonnegative for valid (kappa, m); clip roundoff
    c_up = math.sqrt(max(c_up, 0.0))
    c_dn = -np.sign(kappa) * math.sqrt(max(c_dn, 0.0))

    out = np.empty((2,) + shape, dtype=complex)
    out[0] = c_up * Y(m_up)
    out[1] = c_dn * Y(m_dn)
    return out
