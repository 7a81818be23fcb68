"""Radial integration utilities: oscillatory quadrature and exact endpoint identities.

Three tools used by the matrix-element oracle and the basis diagnostics:

* Filon-type segment integration of slow(x) * e^(i q x) on uniform
  segments (quadratic interpolation of the slow factor, exact moments),
* an exact finite-range inner-product identity for solutions of the same
  radial Dirac system at different energies,
* small grid helpers (bound-state support cutoffs, composite grids).

The endpoint identity follows from the radial equations: for two states
(G1, F1, W1) and (G2, F2, W2) with the same kappa and potential,

    d/drho (G1 F2 - G2 F1) = (W1 - W2) (G1 G2 + F1 F2) / (alpha Z)

so the plus-sign overlap integral over [0, R] equals

    alphaZ * [G1(R) F2(R) - G2(R) F1(R)] / (W1 - W2)

with no quadrature at all (regular solutions kill the lower boundary).
The constant and sign were verified numerically for bound-bound,
bound-continuum and continuum-continuum pairs.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "wronskian_overlap",
    "filon_moments",
    "filon_integrate",
    "bound_support_cutoff",
    "simpson_uniform",
]


def wronskian_overlap(g1, f1, w1, g2, f2, w2, alpha_z: float):
    """Exact integral of (G1 G2 + F1 F2) over [0, R] from endpoint values at R.

    Arguments are rg, rf values *at* R (scalars or arrays) and the two
    energies in m0 c^2.  Requires w1 != w2; the equal-energy limit is the
    caller's job (finite difference in the state parameter).
    """
    return alpha_z * (g1 * f2 - g2 * f1) / (w1 - w2)


def filon_moments(q: float, h: float):
    """Moments (m_minus, m_zero, m_plus) of the quadratic Lagrange basis
    against e^(i q t) on t in [-h, h].

    Returns the three endpoint weights such that

        integral p(t) e^(iqt) dt = w_m f(-h) + w_0 f(0) + w_p f(+h)

    for any quadratic p interpolating f at (-h, 0, +h).  Series branch for
    small q*h avoids the cancellation in the closed forms.
    """
    th = q * h
    if abs(th) < 0.08:
        # series in th: mc = 2h(1 - th^2/6 + th^4/120), etc.
        th2 = th * th
        mc = 2.0 * h * (1.0 - th2 / 6.0 + th2 * th2 / 120.0)
        mt = 2j * h * h * (th / 3.0 - th * th2 / 30.0 + th * th2 * th2 / 840.0)
        mt2 = 2.0 * h ** 3 * (1.0 / 3.0 - th2 / 10.0 + th2 * th2 / 168.0)
    else:
        s, c = math.sin(th), math.cos(th)
        mc = 2.0 * s / q
        mt = 2j * (s - th * c) / (q * q)
        mt2 = 2.0 * ((th * th - 2.0) * s + 2.0 * th * c) / (q ** 3)
    w_m = (mt2 - h * mt) / (2.0 * h * h)
    w_0 = mc - mt2 / (h * h)
    w_p = (mt2 + h * mt) / (2.0 * h * h)
    return w_m, w_0, w_p


def filon_integrate(slow: np.ndarray, x0: float, h: float, q: float) -> complex:
    """Integral of slow(x) e^(i q x) over [x0, x0 + (len(slow)-1) h].

    `slow` holds the slow factor on a uniform grid of odd length; each
    consecutive point triple forms one quadratic segment.
    """
    n = len(slow)
    if n < 3 or n % 2 == 0:
        raise ValueError("filon_integrate needs an odd number of points >= 3")
    w_m, w_0, w_p = filon_moments(q, h)
    mids = x0 + h * np.arange(1, n - 1, 2)
    phase = np.exp(1j * q * mids)
    f_m = slow[0:-2:2]
    f_0 = slow[1:-1:2]
    f_p = slow[2::2]
    return complex(np.sum(phase * (w_m * f_m + w_0 * f_0 + w_p * f_p)))


def bound_support_cutoff(n_r: int, gamma: float, big_n: float, drop: float = 42.0) -> float:
    """Radius beyond which a bound state's envelope has fallen `drop` e-folds.

    The envelope in z = 2 rho / N is e^(-z/2) z^(n_r + gamma); Newton-solve
    (z - z*)/2 - m ln(z/z*) = drop from the peak z* = 2 m, m = n_r + gamma.
    """
    m = n_r + gamma
    z_star = 2.0 * m
    z = z_star + 2.0 * drop + 2.0 * math.sqrt(drop * max(z_star, 1.0))
    for _ in range(40):
        val = 0.5 * (z - z_star) - m * math.log(z / z_star) - drop
        der = 0.5 - m / z
        if der <= 0:
            z *= 1.5
            continue
        z_new = z - val / der
        if z_new <= z_star:
            z_new = 0.5 * (z + z_star)
        if abs(z_new - z) < 1e-9 * z:
            z = z_new
            break
        z = z_new
    return 0.5 * big_n * z


def simpson_uniform(y: np.ndarray, h: float) -> float:
    """Composite Simpson rule on a uniform grid with an odd number of points."""
    n = len(y)
    if n % 2 == 0:
        raise ValueError("simpson_uniform needs an odd number of points")
    return float(h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-2:2])))
