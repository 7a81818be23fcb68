"""Single-step exact block-diagonalizing (Eriksen) transformation on the finite basis.

Pipeline: S = beta*lambda + lambda*beta assembled from the beta table and
the energy-sign vector; Z = (2 + S)^(-1/2) built spectrally (dense
symmetric eigendecomposition on the positive-sign block, closed-form
diagonal on the negative block); transformed-state amplitudes

    a_n = <n|Z|seed> + sum_k <n|Z|k> <k|beta|seed>     (positive block)
    A_i^- = z_i^- <Psi_i^-|beta|seed>                  (negative block)

follow from U = Z (1 + beta*lambda) acting on a positive-energy seed.
The linearized (second-order Foldy-Wouthuysen-like) amplitudes need no
eigendecomposition:

    same sign:      (3/4) delta + (1/4) eps_ket beta
    opposite sign:  (1/2) eps_ket beta

Synthesis sums amplitude-weighted radial pairs on a shared grid; norms
use squared-modulus radial integrals (the squared reading is forced by
the exact complementarity of the upper/lower weights of the seed state,
N_rg + N_rf = 1); the absolute-value variant is available behind a flag
for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
import scipy.linalg

from .basis import BasisSet
from .errors import InvariantBreach
from .hydrogenic import PhysicalContext
from .matelem import SymmetricMatrixTable, z_negative_diagonal

__all__ = [
    "SpectralOperator",
    "TransformResult",
    "build_S",
    "build_Z",
    "eriksen_amplitudes",
    "fw_amplitudes",
    "synthesize",
    "norms_and_aggregates",
    "nonrel_reference",
]


def build_S(basis: BasisSet, beta: SymmetricMatrixTable) -> SymmetricMatrixTable:
    """S_{ij} = (eps_i + eps_j) beta_{ij}; cross-sign blocks are exactly zero."""
    if beta.dimension != basis.size:
        raise InvariantBreach("beta table dimension does not match the basis")
    signs = basis.signs
    mat = (signs[:, None] + signs[None, :]) * beta.matrix
    return SymmetricMatrixTable(matrix=mat, n_bound=beta.n_bound,
                                n_pos=beta.n_pos, n_neg=beta.n_neg,
                                provenance={"derived_from": "beta", **beta.provenance})


@dataclass
class SpectralOperator:
    """Blockwise inverse square root of (2 + S).

    Positive-sign block (bound + positive continuum): dense symmetric
    eigendecomposition, Z+ = V diag((2 + xi)^(-1/2)) V^T.  Negative block:
    diagonal closed form.  Eigenvalues are checked against the square-root
    existence condition 2 + xi > 0.
    """

    eigenvalues: np.ndarray
    z_pos: np.ndarray
    z_neg_diag: np.ndarray
    n_bound: int
    n_pos: int
    n_neg: int

    @property
    def dimension(self) -> int:
        return self.n_bound + self.n_pos + self.n_neg

    def as_matrix(self) -> np.ndarray:
        out = np.zeros((self.dimension, self.dimension))
        npos = self.n_bound + self.n_pos
        out[:npos, :npos] = self.z_pos
        out[npos:, npos:] = np.diag(self.z_neg_diag)
        return out


def build_Z(S: SymmetricMatrixTable, basis: Optional[BasisSet] = None,
            negative_mode: Literal["spectral", "bin_average"] = "spectral"
            ) -> SpectralOperator:
    """Spectral inverse square root of (2 + S), blockwise.

    negative_mode "spectral" applies (2 + S_ii)^(-1/2) to the (diagonal)
    negative block, which equals the closed-form midpoint bin value; the
    "bin_average" variant averages the closed form across each bin
    (requires `basis`), an O(dp^2)-different convention exposed for
    convergence studies.
    """
    npos = S.n_bound + S.n_pos
    s_pos = S.matrix[:npos, :npos]
    if np.any(S.matrix[:npos, npos:] != 0.0):
        raise InvariantBreach("cross-sign block of S is not exactly zero")
    xi, vecs = scipy.linalg.eigh(s_pos)
    if np.any(2.0 + xi <= 0.0):
        bad = xi[2.0 + xi <= 0.0]
        raise InvariantBreach(f"square root does not exist: 2 + xi <= 0 for xi = {bad}")
    z_pos = (vecs * (1.0 / np.sqrt(2.0 + xi))) @ vecs.T

    s_neg_diag = np.diag(S.matrix[npos:, npos:]).copy()
    if np.any(2.0 + s_neg_diag <= 0.0):
        raise InvariantBreach("square root does not exist on the negative block")
    if negative_mode == "spectral":
        z_neg = 1.0 / np.sqrt(2.0 + s_neg_diag)
    else:
        if basis is None:
            raise InvariantBreach("bin_average mode needs the basis")
        z_neg = np.array([z_negative_diagonal(float(p), basis.delta_p, basis.ctx,
                                              mode="bin_average")
                          for p in basis.neg_centers])
    return SpectralOperator(eigenvalues=xi, z_pos=z_pos, z_neg_diag=z_neg,
                            n_bound=S.n_bound, n_pos=S.n_pos, n_neg=S.n_neg)


@dataclass
class TransformResult:
    """Amplitudes, synthesized radial functions, norms and aggregates of one transform."""

    method: Literal["eriksen", "fw"]
    seed_index: int
    amplitudes: np.ndarray
    sum_rule_residual: float
    # synthesized on `grid` (filled by synthesize)
    grid: Optional[np.ndarray] = None
    r_ug: Optional[np.ndarray] = None
    r_uf: Optional[np.ndarray] = None
    seed_rg: Optional[np.ndarray] = None
    seed_rf: Optional[np.ndarray] = None
    # norms and aggregates (filled by norms_and_aggregates)
    norms: dict = field(default_factory=dict)
    aggregates: dict = field(default_factory=dict)

    def block_amplitudes(self, basis: BasisSet) -> dict:
        nb, npos = basis.n_bound, basis.n_pos
        return {"bound": self.amplitudes[:nb],
                "pos": self.amplitudes[nb:nb + npos],
                "neg": self.amplitudes[nb + npos:]}


def eriksen_amplitudes(basis: BasisSet, beta: SymmetricMatrixTable,
                       zop: SpectralOperator) -> TransformResult:
    """Exact-transform amplitudes of the seed state over the basis."""
    seed = basis.seed_index
    npos = basis.n_bound + basis.n_pos
    b_col = beta.matrix[:, seed]
    v_pos = b_col[:npos].copy()
    v_pos[seed] += 1.0
    amps = np.empty(basis.size)
    amps[:npos] = zop.z_pos @ v_pos
    amps[npos:] = zop.z_neg_diag * b_col[npos:]
    total = float(np.dot(amps, amps))
    return TransformResult(method="eriksen", seed_index=seed, amplitudes=amps,
                           sum_rule_residual=abs(total - 1.0))


def fw_amplitudes(basis: BasisSet, beta: SymmetricMatrixTable) -> TransformResult:
    """Linearized (FW-like) amplitudes; a linear function of beta, no spectral step."""
    seed = basis.seed_index
    npos = basis.n_bound + basis.n_pos
    b_col = beta.matrix[:, seed]
    amps = np.empty(basis.size)
    # seed has positive energy sign (eps_ket = +1)
    amps[:npos] = 0.25 * b_col[:npos]
    amps[seed] += 0.75
    amps[npos:] = 0.5 * b_col[npos:]
    total = float(np.dot(amps, amps))
    return TransformResult(method="fw", seed_index=seed, amplitudes=amps,
                           sum_rule_residual=abs(total - 1.0))


def synthesize_many(results: Sequence[TransformResult], basis: BasisSet,
                    grid: np.ndarray, chunk: int = 64, workers: int = 1
                    ) -> Sequence[TransformResult]:
    """Assemble r*Ug and r*Uf for several amplitude sets in one basis pass.

    Basis states are evaluated in fixed-order chunks (optionally in a
    thread pool; partial sums are reduced in chunk order, so the result is
    bitwise independent of the worker count).  Every state participates
    regardless of amplitude (norm computations must not drop small
    contributions).
    """
    n_res = len(results)
    starts = list(range(0, basis.size, chunk))
    ln_grid = np.log(grid)

    def eval_chunk(start: int):
        stop = min(start + chunk, basis.size)
        ug = np.zeros((n_res, len(grid)))
        uf = np.zeros((n_res, len(grid)))
        for idx in range(start, stop):
            rp = basis.radial_pair(idx, grid, ln_grid=ln_grid)
            for k, res in enumerate(results):
                a = res.amplitudes[idx]
                ug[k] += a * rp.rg
                uf[k] += a * rp.rf
        return ug, uf

    r_ug = np.zeros((n_res, len(grid)))
    r_uf = np.zeros((n_res, len(grid)))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for ug, uf in pool.map(eval_chunk, starts):
                r_ug += ug
                r_uf += uf
    else:
        for start in starts:
            ug, uf = eval_chunk(start)
            r_ug += ug
            r_uf += uf

    seed_rp = basis.radial_pair(basis.seed_index, grid)
    for k, res in enumerate(results):
        res.grid = grid
        res.r_ug = r_ug[k]
        res.r_uf = r_uf[k]
        res.seed_rg = seed_rp.rg
        res.seed_rf = seed_rp.rf
    return results


def synthesize(result: TransformResult, basis: BasisSet, grid: np.ndarray,
               chunk: int = 64, workers: int = 1) -> TransformResult:
    """Single-amplitude-set convenience wrapper over synthesize_many."""
    synthesize_many([result], basis, grid, chunk=chunk, workers=workers)
    return result


def norms_and_aggregates(result: TransformResult, basis: BasisSet,
                         absolute_value_norms: bool = False) -> TransformResult:
    """Squared-modulus radial norms and probability aggregates.

    norms: N_rg, N_rf (seed state), N_rUg, N_rUf (transformed), plus
    r >= 0.01 variants of the lower-component residuals (the synthesis
    deviates near the origin).  absolute_value_norms adds integrals of
    |f| rho^2 (the literal unsquared reading) for comparison.
    """
    if result.grid is None:
        raise InvariantBreach("synthesize must run before norms_and_aggregates")
    g = result.grid

    def sq(y):
        return float(np.trapezoid(y * y, g))

    norms = {
        "N_rg": sq(result.seed_rg),
        "N_rf": sq(result.seed_rf),
        "N_rUg": sq(result.r_ug),
        "N_rUf": sq(result.r_uf),
    }
    mask = g >= 0.01
    norms["N_rUf_r>=0.01"] = float(np.trapezoid(result.r_uf[mask] ** 2, g[mask]))
    if absolute_value_norms:
        norms["N_rf_abs"] = float(np.trapezoid(np.abs(result.seed_rf) * g, g))
        norms["N_rUf_abs"] = float(np.trapezoid(np.abs(result.r_uf) * g, g))
    result.norms = norms

    blocks = result.block_amplitudes(basis)
    p_seed = float(blocks["bound"][basis.seed_index] ** 2)
    p_bound_rest = float(np.dot(blocks["bound"], blocks["bound"]) - p_seed)
    p_pos = float(np.dot(blocks["pos"], blocks["pos"]))
    p_neg = float(np.dot(blocks["neg"], blocks["neg"]))
    neg_sq = blocks["neg"] ** 2
    peak_energy = float(basis.energies[basis.n_bound + basis.n_pos + int(np.argmax(neg_sq))]) \
        if len(neg_sq) else math.nan
    result.aggregates = {
        "P_seed": p_seed,
        "P_bound_rest": p_bound_rest,
        "P_pos": p_pos,
        "P_neg": p_neg,
        "sum_rule_residual": result.sum_rule_residual,
        "neg_peak_energy": peak_energy,
    }
    return result


def nonrel_reference(state: Literal["1s", "2p"], ctx: PhysicalContext,
                     grid: np.ndarray) -> np.ndarray:
    """Unit-normalized nonrelativistic radial function r*g^NR on `grid`.

    1s: r g = 2 rho e^(-rho); 2p: r g = rho^2 e^(-rho/2) / sqrt(24)
    (internal units; the Schroedinger functions for comparison plots).
    """
    grid = np.asarray(grid, dtype=float)
    if state == "1s":
        return 2.0 * grid * np.exp(-grid)
    if state == "2p":
        return grid ** 2 * np.exp(-grid / 2.0) / math.sqrt(24.0)
    raise ValueError(f"unknown nonrelativistic reference {state!r}")
