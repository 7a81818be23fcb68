"""Finite working basis: bound states plus discretized continuum states.

The continuum is replaced by bin-averaged, Kronecker-normalized states

    Psi_{p_i}^eps(r) = (1 / sqrt(dp)) integral_{bin i} psi_p^eps(r) dp

evaluated with fixed-order Gauss-Legendre quadrature over each momentum
bin.  All states share the (kappa, m) of the seed state; the basis is
ordered bound block (increasing n_r), then positive-energy bins, then
negative-energy bins (increasing momentum within each block).

Grid conventions: bins are contiguous with uniform width dp; by default a
configured momentum limit is the *center* of the first/last bin (so the
default lower limit 0.1 makes the first bin cover [0.05, 0.15]); the
"edge" convention instead treats the limits as outer bin edges.

Diagnostics (Gram matrix, localization) evaluate radial inner products
with the exact endpoint identity of `radialint.wronskian_overlap`; see
`gram_matrix` for the window-averaged 1/R extrapolation protocol that
removes the slowly decaying truncation tail of the discretized states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterator, Literal, Optional

import numpy as np

from .errors import ConfigError, InvalidQuantumNumbers
from .hydrogenic import (PhysicalContext, QuantumNumbers, RadialPair, bound_energy,
                         bound_radial, continuum_energy, continuum_radial)
from .matelem import _legendre_rule
from .radialint import wronskian_overlap

__all__ = [
    "MomentumGrid",
    "BasisConfig",
    "BasisSet",
    "build_momentum_grids",
    "eigendifferential",
    "assemble_basis",
    "SEED_STATES",
]

# seed states: name -> (kappa, m, n_r of the seed, n_r of the first basis state)
SEED_STATES = {
    "1S1/2": (-1, 0.5, 0),
    "2P1/2": (1, 0.5, 1),
    "2P3/2": (-2, 1.5, 0),
}


@dataclass(frozen=True)
class MomentumGrid:
    """Uniform bin grid for one energy branch: centers p_i, width delta_p, sign eps."""

    delta_p: float
    centers: np.ndarray
    eps: int

    def __post_init__(self):
        d = np.diff(self.centers)
        if len(self.centers) and not np.allclose(d, self.delta_p, rtol=1e-9, atol=1e-12):
            raise ConfigError("bin centers must be uniformly spaced by delta_p")

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate([self.centers - 0.5 * self.delta_p,
                               [self.centers[-1] + 0.5 * self.delta_p]])


@dataclass(frozen=True)
class BasisConfig:
    """Sizes and conventions of the working basis (defaults: production scale)."""

    n_bound: int = 40
    delta_p: float = 0.1
    p_lower: float = 0.1
    p_upper_pos: float = 51.2
    p_upper_neg: float = 102.4
    grid_convention: Literal["center", "edge"] = "center"
    bin_nodes: int = 16

    def __post_init__(self):
        if self.n_bound < 1 or self.delta_p <= 0 or self.p_lower <= 0:
            raise ConfigError("basis sizes must be positive")
        if self.p_upper_pos < self.p_lower or self.p_upper_neg < self.p_lower:
            raise ConfigError("upper momentum limits below the lower limit")
        if self.bin_nodes < 2:
            raise ConfigError("bin quadrature needs at least 2 nodes")


def build_momentum_grids(config: BasisConfig) -> tuple[MomentumGrid, MomentumGrid]:
    """Positive- and negative-branch momentum grids for the configured limits.

    center convention: limits are the first/last bin centers; edge
    convention: limits are the outer edges (first center at lower + dp/2).
    """
    dp = config.delta_p

    def centers(upper: float) -> np.ndarray:
        if config.grid_convention == "center":
            n = int(round((upper - config.p_lower) / dp)) + 1
            return config.p_lower + dp * np.arange(n)
        n = int(round((upper - config.p_lower) / dp))
        return config.p_lower + dp * (0.5 + np.arange(n))

    return (MomentumGrid(dp, centers(config.p_upper_pos), 1),
            MomentumGrid(dp, centers(config.p_upper_neg), -1))


def eigendifferential(p_center: float, delta_p: float, eps: int,
                      kappa: int, m: float, ctx: PhysicalContext,
                      grid: np.ndarray, bin_nodes: int = 16,
                      ln_grid: Optional[np.ndarray] = None) -> RadialPair:
    """Discretized continuum state Psi_{p_i}^eps on a radial grid.

    Gauss-Legendre quadrature of (1/sqrt(dp)) integral psi_p dp over the
    bin; the node count bounds the usable radius (the in-bin oscillation
    e^(i p r) must stay resolved, delta_p * r / 2 << pi * nodes / 2).
    """
    x, w = _legendre_rule(bin_nodes)
    p_nodes = p_center + 0.5 * delta_p * x
    weights = 0.5 * delta_p * w / math.sqrt(delta_p)
    rg = np.zeros_like(grid)
    rf = np.zeros_like(grid)
    for p, wt in zip(p_nodes, weights):
        qn = QuantumNumbers.continuum(kappa, m, float(p), eps)
        rp = continuum_radial(qn, ctx, grid, ln_grid=ln_grid)
        rg += wt * rp.rg
        rf += wt * rp.rf
    label = QuantumNumbers.continuum(kappa, m, p_center, eps)
    return RadialPair(grid=grid, rg=rg, rf=rf,
                      energy=continuum_energy(p_center, eps, ctx), label=label)


@dataclass
class BasisSet:
    """Ordered basis: labels, energies, sign vector, and lazy radial evaluation."""

    seed_name: str
    seed_index: int
    ctx: PhysicalContext
    config: BasisConfig
    labels: list
    energies: np.ndarray
    signs: np.ndarray
    pos_grid: MomentumGrid
    neg_grid: MomentumGrid

    @property
    def n_bound(self) -> int:
        return self.config.n_bound

    @property
    def n_pos(self) -> int:
        return len(self.pos_grid.centers)

    @property
    def n_neg(self) -> int:
        return len(self.neg_grid.centers)

    @property
    def size(self) -> int:
        return self.n_bound + self.n_pos + self.n_neg

    @property
    def delta_p(self) -> float:
        return self.config.delta_p

    @property
    def pos_centers(self) -> np.ndarray:
        return self.pos_grid.centers

    @property
    def neg_centers(self) -> np.ndarray:
        return self.neg_grid.centers

    @property
    def kappa(self) -> int:
        return self.labels[0].kappa

    @property
    def m(self) -> float:
        return self.labels[0].m

    def radial_pair(self, index: int, grid: np.ndarray,
                    ln_grid: Optional[np.ndarray] = None) -> RadialPair:
        """Evaluate one basis state on a radial grid."""
        lab = self.labels[index]
        if lab.kind == "bound":
            return bound_radial(lab, self.ctx, grid)
        return eigendifferential(lab.q, self.delta_p, lab.eps, lab.kappa, lab.m,
                                 self.ctx, grid, self.config.bin_nodes,
                                 ln_grid=ln_grid)

    def iter_radial_chunks(self, grid: np.ndarray, chunk: int = 64
                           ) -> Iterator[tuple[int, np.ndarray, np.ndarray]]:
        """Yield (start_index, rg_stack, rf_stack) over the basis in fixed order.

        Streaming interface used by synthesis and diagnostics; stacks are
        (n_states_in_chunk, len(grid)) float64.
        """
        ln_grid = np.log(grid)
        for start in range(0, self.size, chunk):
            stop = min(start + chunk, self.size)
            rg = np.empty((stop - start, len(grid)))
            rf = np.empty((stop - start, len(grid)))
            for k, idx in enumerate(range(start, stop)):
                rp = self.radial_pair(idx, grid, ln_grid=ln_grid)
                rg[k] = rp.rg
                rf[k] = rp.rf
            yield start, rg, rf


def assemble_basis(seed_name: str, config: BasisConfig, ctx: PhysicalContext) -> BasisSet:
    """Build the working basis sharing the seed state's (kappa, m).

    Bound block: the n_bound lowest states of that kappa (n_r from 0, or
    from 1 for kappa > 0); the seed is one of them.  Continuum blocks per
    `build_momentum_grids`.  Deterministic ordering throughout.
    """
    if seed_name not in SEED_STATES:
        raise ConfigError(f"unknown seed state {seed_name!r}; choose from {sorted(SEED_STATES)}")
    kappa, m, seed_nr = SEED_STATES[seed_name]
    n_r0 = 1 if kappa > 0 else 0
    labels = [QuantumNumbers.bound(kappa, m, n_r0 + i) for i in range(config.n_bound)]
    seed_index = seed_nr - n_r0
    if not (0 <= seed_index < config.n_bound):
        raise ConfigError("bound block does not contain the seed state")

    pos_grid, neg_grid = build_momentum_grids(config)
    labels += [QuantumNumbers.continuum(kappa, m, float(p), 1) for p in pos_grid.centers]
    labels += [QuantumNumbers.continuum(kappa, m, float(p), -1) for p in neg_grid.centers]

    energies = np.empty(len(labels))
    signs = np.empty(len(labels))
    for i, lab in enumerate(labels):
        if lab.kind == "bound":
            energies[i] = bound_energy(lab, ctx)
            signs[i] = 1.0
        else:
            energies[i] = continuum_energy(lab.q, lab.eps, ctx)
            signs[i] = float(lab.eps)
    return BasisSet(seed_name=seed_name, seed_index=seed_index, ctx=ctx, config=config,
                    labels=labels, energies=energies, signs=signs,
                    pos_grid=pos_grid, neg_grid=neg_grid)


# ---------------------------------------------------------------------------
# diagnostics: endpoint-identity inner products of the true eigendifferentials
# ---------------------------------------------------------------------------

def _endpoint_values(basis: BasisSet, index: int, radii: np.ndarray, nodes: int):
    """(G, F, W) of one state at each radius; continuum states return the
    per-node values (nodes,) x radii for exact bin integration."""
    lab = basis.labels[index]
    if lab.kind == "bound":
        rp = bound_radial(lab, basis.ctx, radii)
        return rp.rg[None, :], rp.rf[None, :], np.array([rp.energy]), np.array([1.0])
    x, w = _legendre_rule(nodes)
    p_nodes = lab.q + 0.5 * basis.delta_p * x
    # (1/sqrt(dp)) integral dp, one factor per side of the inner product
    weights = 0.5 * basis.delta_p * w / math.sqrt(basis.delta_p)
    G = np.empty((nodes, len(radii)))
    F = np.empty((nodes, len(radii)))
    Wn = np.empty(nodes)
    for k, p in enumerate(p_nodes):
        qn = QuantumNumbers.continuum(lab.kappa, lab.m, float(p), lab.eps)
        rp = continuum_radial(qn, basis.ctx, radii)
        G[k], F[k], Wn[k] = rp.rg, rp.rf, rp.energy
    return G, F, Wn, weights


def overlap_window_fit(basis: BasisSet, i: int, j: int,
                       r_window: tuple[float, float] = (320.0, 480.0),
                       n_radii: int = 33, nodes: int = 48) -> float:
    """Inner product <i|j> over [0, infinity) via endpoint identity + 1/R fit.

    The exact identity gives the [0, R] integral from endpoint values; the
    truncation tail of discretized states decays like 1/R with an
    oscillating part, so the [0, R] values sampled across the window are
    least-squares fitted to a + b/R and the intercept `a` is returned.
    The equal-momentum-node kernel limit is handled by staggered node
    counts (i uses `nodes`, j uses `nodes + 1`), so the 1/(W1 - W2) pole
    is never hit.
    """
    radii = np.linspace(r_window[0], r_window[1], n_radii)
    az = basis.ctx.alpha_z
    G1, F1, W1, w1 = _endpoint_values(basis, i, radii, nodes)
    G2, F2, W2, w2 = _endpoint_values(basis, j, radii, nodes + 1)
    # kernel K[a,b,r] = alphaZ (G1 F2 - G2 F1)/(W1 - W2), bin-integrated
    dW = W1[:, None] - W2[None, :]
    vals = np.empty(n_radii)
    for r_i in range(n_radii):
        K = az * (np.outer(G1[:, r_i], F2[:, r_i]) - np.outer(G2[:, r_i], F1[:, r_i]).T) / dW
        vals[r_i] = w1 @ K @ w2
    M = np.vstack([np.ones(n_radii), 1.0 / radii]).T
    coef, *_ = np.linalg.lstsq(M, vals, rcond=None)
    return float(coef[0])


def locality_fraction(basis: BasisSet, index: int, r_split: float = 150.0,
                      r_window: tuple[float, float] = (320.0, 480.0)) -> float:
    """Fraction of a state's norm beyond r_split.

    The [0, r_split] integral is averaged over a small radius bracket to
    suppress its oscillatory part; the full norm comes from the window fit.
    """
    full = overlap_window_fit(basis, index, index, r_window=r_window)
    radii = np.linspace(r_split * 0.96, r_split * 1.04, 9)
    az = basis.ctx.alpha_z
    G1, F1, W1, w1 = _endpoint_values(basis, index, radii, 48)
    G2, F2, W2, w2 = _endpoint_values(basis, index, radii, 49)
    dW = W1[:, None] - W2[None, :]
    vals = np.empty(len(radii))
    for r_i in range(len(radii)):
        K = az * (np.outer(G1[:, r_i], F2[:, r_i]) - np.outer(G2[:, r_i], F1[:, r_i]).T) / dW
        vals[r_i] = w1 @ K @ w2
    upto = float(np.mean(vals))
    return (full - upto) / full
