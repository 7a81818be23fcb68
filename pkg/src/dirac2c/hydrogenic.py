"""Dirac-Coulomb eigenstates of a point-nucleus hydrogen-like atom.

Quantum-number bookkeeping, exact bound-state energies, and closed-form
radial functions g(r), f(r) for bound and continuum states, plus the
large-argument asymptotic forms used for validation.

Units
-----
Internal dimensionless units throughout:

* lengths   rho = r / (r_B / Z)
* momenta   q   = p / (hbar Z / r_B)          (wave number k equals q)
* energies  W   = E / (m0 c^2)

so the only physical parameter is the coupling alpha*Z.  In these units a
continuum state has W = eps * sqrt(1 + (alpha Z q)^2) and the Coulomb
phase parameter is y = W / q (signed with the energy branch).

Conventions
-----------
Radial spinor structure psi = (g(r) Omega_{kappa,m}, i f(r) Omega_{kappa',-m})
with all evaluators returning the finite combinations rg = rho*g and
rf = rho*f.  Bound states are unit-normalized, integral (rg^2 + rf^2) drho = 1;
continuum states are normalized to delta(q1 - q2) on the internal momentum
variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from scipy.special import gammaln

from .errors import InvalidParameter, InvalidQuantumNumbers
from .specfun import kummer_complex, kummer_poly_table, ln_gamma

__all__ = [
    "ALPHA_DEFAULT",
    "PhysicalContext",
    "QuantumNumbers",
    "RadialPair",
    "kappa_of",
    "gamma_kappa",
    "bound_energy",
    "continuum_energy",
    "bound_radial",
    "continuum_radial",
    "continuum_asymptotic",
    "continuum_phase_params",
    "make_radial_grid",
]

ALPHA_DEFAULT = 1.0 / 137.035999


@dataclass(frozen=True)
class PhysicalContext:
    """Physical parameters of the run; everything downstream is dimensionless.

    z_effective supports screened-charge runs (e.g. Z - 0.3); alpha is the
    fine-structure constant.  The internal unit system (r_B/Z lengths,
    hbar Z/r_B momenta, m0 c^2 energies) confines all conversions here.
    """

    z_effective: float
    alpha: float = ALPHA_DEFAULT

    def __post_init__(self):
        if not (0.0 < self.alpha_z < 1.0):
            raise InvalidParameter(
                f"alpha*Z = {self.alpha_z:.4f} outside (0, 1); no 1S bound state")

    @property
    def alpha_z(self) -> float:
        return self.alpha * self.z_effective


def kappa_of(j: float, l: int) -> int:
    """Relativistic angular quantum number from (j, l): -j-1/2 if j=l+1/2, +j+1/2 if j=l-1/2."""
    if l < 0 or j <= 0:
        raise InvalidQuantumNumbers(f"invalid (j, l) = ({j}, {l})")
    if abs(j - (l + 0.5)) < 1e-9:
        return -int(round(j + 0.5))
    if abs(j - (l - 0.5)) < 1e-9:
        return int(round(j + 0.5))
    raise InvalidQuantumNumbers(f"j = {j} is not l +/- 1/2 for l = {l}")


def gamma_kappa(kappa: int, ctx: PhysicalContext) -> float:
    """gamma = sqrt(kappa^2 - (alpha Z)^2); the leading small-r exponent."""
    if kappa == 0:
        raise InvalidQuantumNumbers("kappa must be nonzero")
    az = ctx.alpha_z
    if az >= abs(kappa):
        raise InvalidQuantumNumbers(f"alpha*Z = {az:.3f} >= |kappa| = {abs(kappa)}")
    return math.sqrt(kappa * kappa - az * az)


@dataclass(frozen=True)
class QuantumNumbers:
    """Label of one basis state: bound (kappa, m, n_r) or continuum (kappa, m, q, eps)."""

    kappa: int
    m: float
    kind: Literal["bound", "continuum"]
    n_r: Optional[int] = None
    q: Optional[float] = None
    eps: Optional[int] = None

    def __post_init__(self):
        if self.kappa == 0:
            raise InvalidQuantumNumbers("kappa must be nonzero")
        if abs(2 * self.m - round(2 * self.m)) > 1e-9 or round(2 * self.m) % 2 == 0:
            raise InvalidQuantumNumbers(f"m must be half-integral, got {self.m}")
        if abs(self.m) > abs(self.kappa) - 0.5 + 1e-9:
            raise InvalidQuantumNumbers(f"|m| exceeds j for kappa={self.kappa}")
        if self.kind == "bound":
            if self.n_r is None or self.n_r < 0:
                raise InvalidQuantumNumbers("bound state needs n_r >= 0")
            if self.kappa > 0 and self.n_r < 1:
                raise InvalidQuantumNumbers("kappa > 0 requires n_r >= 1")
        elif self.kind == "continuum":
            if self.q is None or self.q <= 0 or self.eps not in (1, -1):
                raise InvalidQuantumNumbers("continuum state needs q > 0 and eps = +/-1")
        else:
            raise InvalidQuantumNumbers(f"unknown kind {self.kind!r}")

    @classmethod
    def bound(cls, kappa: int, m: float, n_r: int) -> "QuantumNumbers":
        return cls(kappa=kappa, m=m, kind="bound", n_r=n_r)

    @classmethod
    def continuum(cls, kappa: int, m: float, q: float, eps: int) -> "QuantumNumbers":
        return cls(kappa=kappa, m=m, kind="continuum", q=q, eps=eps)

    @property
    def n(self) -> int:
        """Principal quantum number n = n_r + |kappa| (bound states only)."""
        if self.kind != "bound":
            raise InvalidQuantumNumbers("n defined for bound states only")
        return self.n_r + abs(self.kappa)


@dataclass(frozen=True)
class RadialPair:
    """Sampled radial functions of one state on a shared grid.

    rg and rf are rho*g(rho) and rho*f(rho) (finite at the origin for the
    integrable rho^(gamma-1) singularity); properties g and f divide the
    grid back out.  energy is W = E/(m0 c^2).
    """

    grid: np.ndarray
    rg: np.ndarray
    rf: np.ndarray
    energy: float
    label: QuantumNumbers

    def __post_init__(self):
        if not (np.all(np.diff(self.grid) > 0) and self.grid[0] > 0):
            raise InvalidParameter("radial grid must be strictly increasing and positive")
        if not (np.all(np.isfinite(self.rg)) and np.all(np.isfinite(self.rf))):
            raise InvalidParameter("non-finite radial samples")

    @property
    def g(self) -> np.ndarray:
        return self.rg / self.grid

    @property
    def f(self) -> np.ndarray:
        return self.rf / self.grid

    def norm(self) -> float:
        """Trapezoid integral of (rg^2 + rf^2) over the grid."""
        return float(np.trapezoid(self.rg ** 2 + self.rf ** 2, self.grid))


def bound_energy(qn: QuantumNumbers, ctx: PhysicalContext) -> float:
    """Exact discrete level W = [1 + (alpha Z / (n_r + gamma))^2]^(-1/2), in m0 c^2."""
    if qn.kind != "bound":
        raise InvalidQuantumNumbers("bound_energy requires a bound label")
    g = gamma_kappa(qn.kappa, ctx)
    x = ctx.alpha_z / (qn.n_r + g)
    return 1.0 / math.sqrt(1.0 + x * x)


def continuum_energy(q: float, eps: int, ctx: PhysicalContext) -> float:
    """Continuum W = eps * sqrt(1 + (alpha Z q)^2), |W| > 1."""
    if q <= 0 or eps not in (1, -1):
        raise InvalidQuantumNumbers("need q > 0 and eps = +/-1")
    return eps * math.sqrt(1.0 + (ctx.alpha_z * q) ** 2)


def _bound_params(qn: QuantumNumbers, ctx: PhysicalContext):
    """(gamma, N, W, ln A, sign A) for a bound state; A in log space for large n_r."""
    g = gamma_kappa(qn.kappa, ctx)
    n_r = qn.n_r
    n = qn.n
    N = math.sqrt(n * n - 2.0 * n_r * (abs(qn.kappa) - g))
    W = bound_energy(qn, ctx)
    ln_A = (0.5 * gammaln(2.0 * g + 1.0 + n_r) - gammaln(2.0 * g + 1.0)
            - 0.5 * (math.log(4.0 * N * (N - qn.kappa)) + gammaln(n_r + 1.0))
            + 0.5 * math.log(2.0 / N))
    return g, N, W, ln_A


def bound_radial(qn: QuantumNumbers, ctx: PhysicalContext, grid: np.ndarray) -> RadialPair:
    """Bound radial pair (rg, rf) on `grid`.

        rg = -A sqrt(1+W) e^(-rho/N) (2 rho/N)^gamma [n_r P1 - (N - kappa) P0]
        rf = -A sqrt(1-W) e^(-rho/N) (2 rho/N)^gamma [n_r P1 + (N - kappa) P0]

    with P_nu = 1F1(-n_r + nu, 2 gamma + 1, 2 rho/N) evaluated through the
    stable degree recurrence.  Unit-normalized by construction.
    """
    if qn.kind != "bound":
        raise InvalidQuantumNumbers("bound_radial requires a bound label")
    grid = np.asarray(grid, dtype=float)
    g, N, W, ln_A = _bound_params(qn, ctx)
    c = 2.0 * g + 1.0
    z = 2.0 * grid / N

    n_r = qn.n_r
    table = kummer_poly_table(max(n_r, 1), c, z)
    p0 = table[n_r]
    p1 = table[n_r - 1] if n_r >= 1 else np.zeros_like(z)

    # e^(-rho/N) (2rho/N)^gamma in log space; overflow-free for any n_r
    ln_env = -grid / N + g * np.log(z)
    envelope = np.exp(ln_A + ln_env)
    rg = -math.sqrt(1.0 + W) * envelope * (n_r * p1 - (N - qn.kappa) * p0)
    rf = -math.sqrt(1.0 - W) * envelope * (n_r * p1 + (N - qn.kappa) * p0)
    return RadialPair(grid=grid, rg=rg, rf=rf, energy=W, label=qn)


def continuum_phase_params(qn: QuantumNumbers, ctx: PhysicalContext):
    """(gamma, W, y, eta, D) shared by the exact and asymptotic continuum forms.

    y = W/q (signed), e^(i eta) = principal sqrt of -(kappa - i y/W)/(gamma + i y),
    and D is the complex prefactor

        D = e^(pi y/2) |Gamma(gamma + i y)| / (2 sqrt(pi |W|) Gamma(2 gamma + 1))
            * e^(i eta) (gamma + i y)

    assembled in log space so the e^(pi y / 2) factor cannot overflow.
    """
    if qn.kind != "continuum":
        raise InvalidQuantumNumbers("continuum label required")
    g = gamma_kappa(qn.kappa, ctx)
    q = qn.q
    W = continuum_energy(q, qn.eps, ctx)
    y = W / q
    lg = ln_gamma(complex(g, y))
    phase_eta = np.sqrt(-(qn.kappa - 1j * y / W) / (g + 1j * y))
    eta = math.atan2(phase_eta.imag, phase_eta.real)
    ln_mag = (math.pi * y / 2.0 + lg.real
              - 0.5 * math.log(math.pi * abs(W)) - math.log(2.0)
              - gammaln(2.0 * g + 1.0))
    D = math.exp(ln_mag) * phase_eta * complex(g, y)
    return g, W, y, eta, D


_FUSED_TERMS = 24


def _fused_branch_scalars(g: float, y: float, q: float):
    """Per-state scalars of the fused large-argument evaluation of D*F.

    From the compound expansion of 1F1, with z = 2 i q rho and
    u = e^(i (q rho + y ln(2 q rho))):

        F ~ C1 u P(x) + C2 conj(u) Q(x) / (2 q rho),   x = 1/(2 q rho)

    where P, Q are the inverse-power sums with the phases (+-i)^s folded
    into their (state-constant) coefficients.  Returns (C1, C2, cP, cQ,
    z_min): z_min is the smallest 2 q rho at which the last retained term
    is below ~1e-12, the fused-path validity bound for this state.
    """
    a = complex(g + 1.0, y)
    mu = 2.0 * g + 1.0
    lg_mu = float(gammaln(mu))
    c1 = np.exp(lg_mu - ln_gamma(a) - math.pi * y / 2.0 - 1j * math.pi * g / 2.0)
    c2 = np.exp(lg_mu - ln_gamma(complex(g, -y)) - math.pi * y / 2.0
                + 1j * math.pi * (g + 1.0) / 2.0)
    cP = np.empty(_FUSED_TERMS + 1, dtype=complex)
    cQ = np.empty(_FUSED_TERMS + 1, dtype=complex)
    cP[0] = cQ[0] = 1.0
    p1, p2 = mu - a, 1.0 - a
    q1, q2 = a, a - mu + 1.0
    for s in range(_FUSED_TERMS):
        cP[s + 1] = cP[s] * (p1 + s) * (p2 + s) / (s + 1.0) * (-1j)
        cQ[s + 1] = cQ[s] * (q1 + s) * (q2 + s) / (s + 1.0) * (+1j)
    worst = max(abs(cP[_FUSED_TERMS]), abs(cQ[_FUSED_TERMS]))
    z_min = max(55.0, (worst * 1e12) ** (1.0 / _FUSED_TERMS))
    return c1, c2, cP, cQ, z_min


def continuum_radial(qn: QuantumNumbers, ctx: PhysicalContext, grid: np.ndarray,
                     ln_grid: Optional[np.ndarray] = None) -> RadialPair:
    """Continuum radial pair (rg, rf) on `grid`, delta(q1-q2)-normalized.

        rg = 2 sqrt(|W| + eps) Re(D F),   rf = -2 eps sqrt(|W| - eps) Im(D F)
        F  = (2 q rho)^gamma e^(-i q rho) 1F1(gamma + 1 + i y, 2 gamma + 1, 2 i q rho)

    The conjugate-pair combination is real by construction.  Beyond the
    fused-path bound the two-branch expansion collapses all per-point
    transcendentals into one complex exponential, which carries
    the synthesis-scale workloads; `ln_grid` may pass a precomputed
    ln(grid) to share across states.
    """
    grid = np.asarray(grid, dtype=float)
    g, W, y, _eta, D = continuum_phase_params(qn, ctx)
    q = qn.q
    a = complex(g + 1.0, y)
    c = 2.0 * g + 1.0

    c1, c2, cP, cQ, z_min = _fused_branch_scalars(g, y, q)
    two_q_rho = 2.0 * q * grid
    fast = two_q_rho >= z_min
    DF = np.empty(len(grid), dtype=complex)

    if np.any(fast):
        if ln_grid is None:
            t = np.log(two_q_rho[fast])
        else:
            t = math.log(2.0 * q) + ln_grid[fast]
        zr = two_q_rho[fast]
        x = 1.0 / zr
        P = np.full_like(x, cP[_FUSED_TERMS], dtype=complex)
        Q = np.full_like(x, cQ[_FUSED_TERMS], dtype=complex)
        for s in range(_FUSED_TERMS - 1, -1, -1):
            P = P * x + cP[s]
            Q = Q * x + cQ[s]
        u = np.exp(1j * (q * grid[fast] + y * t))
        DF[fast] = D * (c1 * u * P + c2 * np.conj(u) * Q * x)

    slow = ~fast
    if np.any(slow):
        m = kummer_complex(a, c, 2j * q * grid[slow])
        F = two_q_rho[slow] ** g * np.exp(-1j * q * grid[slow]) * m
        DF[slow] = D * F

    rg = 2.0 * math.sqrt(abs(W) + qn.eps) * DF.real
    rf = -2.0 * qn.eps * math.sqrt(abs(W) - qn.eps) * DF.imag
    return RadialPair(grid=grid, rg=rg, rf=rf, energy=W, label=qn)


def continuum_asymptotic(qn: QuantumNumbers, ctx: PhysicalContext, grid: np.ndarray
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Leading large-argument trigonometric forms of (rg, rf).

        rg ~  sqrt((|W| + eps)/(pi |W|)) cos(q rho + delta)
        rf ~ -eps sqrt((|W| - eps)/(pi |W|)) sin(q rho + delta)
        delta = y ln(2 q rho) - arg Gamma(gamma + i y) - pi gamma / 2 + eta

    Validity is the caller's responsibility (documented q*rho >= 50 for the
    small-|y| regime; the error scales like (gamma^2 + y^2)/(q rho)).
    """
    grid = np.asarray(grid, dtype=float)
    g, W, y, eta, _D = continuum_phase_params(qn, ctx)
    q = qn.q
    arg_gamma = ln_gamma(complex(g, y)).imag
    delta = y * np.log(2.0 * q * grid) - arg_gamma - math.pi * g / 2.0 + eta
    amp_g = math.sqrt((abs(W) + qn.eps) / (math.pi * abs(W)))
    amp_f = math.sqrt((abs(W) - qn.eps) / (math.pi * abs(W)))
    rg = amp_g * np.cos(q * grid + delta)
    rf = -qn.eps * amp_f * np.sin(q * grid + delta)
    return rg, rf


def make_radial_grid(r_max: float = 200.0, k_max: float = 102.45,
                     r_min: float = 1e-6, r_switch: float = 1.0,
                     points_per_wavelength: int = 10,
                     log_points: int = 240) -> np.ndarray:
    """Composite radial grid: logarithmic on [r_min, r_switch], uniform beyond.

    The uniform step resolves the fastest oscillation present,
    h <= (2 pi / k_max) / points_per_wavelength.  r = 0 is excluded (the
    rho^(gamma-1) singularity is integrable; all integrals carry rho^2).
    """
    if not (0 < r_min < r_switch < r_max):
        raise InvalidParameter("need 0 < r_min < r_switch < r_max")
    log_part = np.geomspace(r_min, r_switch, log_points, endpoint=False)
    h = (2.0 * math.pi / k_max) / points_per_wavelength
    n_lin = int(math.ceil((r_max - r_switch) / h)) + 1
    lin_part = np.linspace(r_switch, r_max, n_lin)
    return np.concatenate([log_part, lin_part])
