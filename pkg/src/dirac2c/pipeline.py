"""Run configuration, orchestration, and deterministic emission of result files.

run_pipeline executes basis -> matrix elements -> transform for one
(Z, seed) and writes:

    beta_bound.csv      bound-block matrix elements (i, j, value)
    beta_continuum.csv  per-momentum bound-continuum densities vs K
    amplitudes.csv      per-state amplitudes and probabilities, per method
    aggregates.csv      probability aggregates, per method
    radial.csv          r, seed and transformed radial functions, references
    summary.json        norms, aggregates, residuals, config echo, timings

CSV floats use the shortest round-trip decimal representation (repr), so
identical configurations produce byte-identical files; all reductions are
fixed-order.  sweep() repeats the pipeline over a Z list and emits one
aggregate row per Z with a per-Z status column.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ._version import __version__
from .basis import SEED_STATES, BasisConfig, BasisSet, assemble_basis
from .errors import ConfigError, Dirac2cError, InvariantBreach
from .hydrogenic import PhysicalContext, make_radial_grid
from .matelem import (SymmetricMatrixTable, beta_bound_continuum_array,
                      build_beta_table, continuum_offdiagonal_probe)
from .transform import (TransformResult, build_S, build_Z, eriksen_amplitudes,
                        fw_amplitudes, nonrel_reference, norms_and_aggregates,
                        synthesize_many)

logger = logging.getLogger(__name__)

__all__ = ["RunConfig", "RunReport", "run_pipeline", "sweep", "PRESETS"]

PRESETS = {
    # full production scale (matrix 1576 x 1576)
    "paper": dict(n_bound=40, delta_p=0.1, p_lower=0.1, p_upper_pos=51.2,
                  p_upper_neg=102.4, r_max=200.0),
    # reduced scale for fast iteration / CI (< 60 s end to end)
    "desk": dict(n_bound=20, delta_p=0.1, p_lower=0.1, p_upper_pos=12.8,
                 p_upper_neg=25.6, r_max=120.0),
}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration of one pipeline run."""

    z: int = 92
    seed_state: str = "1S1/2"
    preset: str = "paper"
    z_effective: Optional[float] = None
    methods: str = "both"                  # eriksen | fw | both
    out_dir: str = "out"
    out_format: str = "csv"                # csv | json (summary.json always written)
    n_bound: Optional[int] = None
    delta_p: Optional[float] = None
    p_lower: Optional[float] = None
    p_upper_pos: Optional[float] = None
    p_upper_neg: Optional[float] = None
    grid_convention: str = "center"
    bin_nodes: int = 16
    discretization: str = "midpoint"       # midpoint | bin_quadrature
    diagonal_mode: str = "midpoint"        # midpoint | bin_average
    r_max: Optional[float] = None
    points_per_wavelength: int = 10
    workers: int = 1
    n_continuum_rows: int = 5              # bound states emitted in beta_continuum.csv
    absolute_value_norms: bool = False
    probe_cc_offdiagonal: int = 0          # >0: sample the omitted smooth couplings

    def __post_init__(self):
        if not (1 <= self.z <= 92):
            raise ConfigError(f"Z = {self.z} outside 1..92")
        if self.seed_state not in SEED_STATES:
            raise ConfigError(f"unknown seed state {self.seed_state!r}")
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}")
        if self.methods not in ("eriksen", "fw", "both"):
            raise ConfigError("methods must be eriksen, fw, or both")
        if self.out_format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.z_effective is not None and not (0.0 < self.z_effective < 137.0):
            raise ConfigError("z_effective outside (0, 137)")
        if self.discretization not in ("midpoint", "bin_quadrature"):
            raise ConfigError("bad discretization mode")
        if self.diagonal_mode not in ("midpoint", "bin_average"):
            raise ConfigError("bad diagonal mode")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def basis_config(self) -> BasisConfig:
        p = PRESETS[self.preset]
        return BasisConfig(
            n_bound=self.n_bound if self.n_bound is not None else p["n_bound"],
            delta_p=self.delta_p if self.delta_p is not None else p["delta_p"],
            p_lower=self.p_lower if self.p_lower is not None else p["p_lower"],
            p_upper_pos=(self.p_upper_pos if self.p_upper_pos is not None
                         else p["p_upper_pos"]),
            p_upper_neg=(self.p_upper_neg if self.p_upper_neg is not None
                         else p["p_upper_neg"]),
            grid_convention=self.grid_convention,
            bin_nodes=self.bin_nodes,
        )

    def physical_context(self) -> PhysicalContext:
        z_eff = self.z_effective if self.z_effective is not None else float(self.z)
        return PhysicalContext(z_effective=z_eff)

    def radial_grid(self) -> np.ndarray:
        p = PRESETS[self.preset]
        r_max = self.r_max if self.r_max is not None else p["r_max"]
        bc = self.basis_config()
        k_max = bc.p_upper_neg + 0.5 * bc.delta_p
        return make_radial_grid(r_max=r_max, k_max=k_max,
                                points_per_wavelength=self.points_per_wavelength)


@dataclass
class RunReport:
    config: RunConfig
    summary: dict
    files: list
    elapsed: float


def _fmt(x) -> str:
    """Shortest round-trip decimal for CSV cells."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) if not isinstance(v, str) else v
                              for v in row) + "\n")


def _emit_beta_bound(path: Path, basis: BasisSet, beta: SymmetricMatrixTable) -> None:
    rows = []
    for i in range(basis.n_bound):
        for j in range(i, basis.n_bound):
            rows.append((basis.labels[i].n, basis.labels[j].n, i, j,
                         beta.matrix[i, j]))
    _write_csv(path, ["n_row", "n_col", "i", "j", "beta"], rows)


def _emit_beta_continuum(path: Path, basis: BasisSet, ctx: PhysicalContext,
                         n_rows: int) -> None:
    az = ctx.alpha_z
    rows = []
    for i in range(min(n_rows, basis.n_bound)):
        qb = basis.labels[i]
        for eps, centers in ((1, basis.pos_centers), (-1, basis.neg_centers)):
            dens = beta_bound_continuum_array(qb, centers, eps, ctx)
            for p, v in zip(centers, dens):
                rows.append((qb.n, eps, p, az * p, v))
    _write_csv(path, ["n_bound", "eps", "p", "K", "beta_density"], rows)


def _emit_amplitudes(path: Path, basis: BasisSet, results: dict) -> None:
    rows = []
    for method, res in results.items():
        for idx in range(basis.size):
            lab = basis.labels[idx]
            block = ("bound" if idx < basis.n_bound
                     else "pos" if idx < basis.n_bound + basis.n_pos else "neg")
            tag = lab.n if lab.kind == "bound" else lab.q
            a = res.amplitudes[idx]
            rows.append((method, block, idx, tag, basis.energies[idx], a, a * a))
    _write_csv(path, ["method", "block", "index", "n_or_p", "energy_mc2",
                      "amplitude", "amplitude_sq"], rows)


def _emit_aggregates(path: Path, config: RunConfig, results: dict) -> None:
    rows = []
    for method, res in results.items():
        ag = res.aggregates
        rows.append((config.z,
                     config.z_effective if config.z_effective is not None else config.z,
                     config.seed_state, method, ag["P_seed"], ag["P_bound_rest"],
                     ag["P_pos"], ag["P_neg"], ag["sum_rule_residual"],
                     ag["neg_peak_energy"]))
    _write_csv(path, ["Z", "z_effective", "seed", "method", "P_seed", "P_bound_rest",
                      "P_pos", "P_neg", "sum_rule_residual", "neg_peak_energy"], rows)


def _emit_radial(path: Path, grid: np.ndarray, results: dict, ctx: PhysicalContext,
                 seed_state: str) -> None:
    any_res = next(iter(results.values()))
    nr_ref = nonrel_reference("1s" if seed_state.startswith("1S") else "2p", ctx, grid)
    er = results.get("eriksen")
    fw = results.get("fw")
    zero = np.zeros_like(grid)
    rows = zip(grid, any_res.seed_rg, any_res.seed_rf,
               er.r_ug if er else zero, er.r_uf if er else zero,
               fw.r_ug if fw else zero, fw.r_uf if fw else zero,
               nr_ref)
    _write_csv(path, ["r", "rg", "rf", "rUg", "rUf", "rUFWg", "rUFWf", "rg_nr"], rows)


def run_pipeline(config: RunConfig) -> RunReport:
    """Execute basis -> matrix elements -> transform and write all artifacts.

    Raises ConfigError for invalid configuration, InvariantBreach /
    Dirac2cError for structural or numerical failures; the CLI maps these
    to exit codes.
    """
    t_start = time.time()
    ctx = config.physical_context()
    bconf = config.basis_config()
    timings = {}

    t0 = time.time()
    basis = assemble_basis(config.seed_state, bconf, ctx)
    timings["assemble_basis"] = time.time() - t0

    t0 = time.time()
    beta = build_beta_table(basis, ctx, discretization=config.discretization,
                            diagonal_mode=config.diagonal_mode)
    timings["beta_table"] = time.time() - t0

    t0 = time.time()
    S = build_S(basis, beta)
    zop = build_Z(S)
    timings["spectral"] = time.time() - t0

    results: dict[str, TransformResult] = {}
    if config.methods in ("eriksen", "both"):
        results["eriksen"] = eriksen_amplitudes(basis, beta, zop)
    if config.methods in ("fw", "both"):
        results["fw"] = fw_amplitudes(basis, beta)

    grid = config.radial_grid()
    t0 = time.time()
    synthesize_many(list(results.values()), basis, grid, workers=config.workers)
    for res in results.values():
        norms_and_aggregates(res, basis,
                             absolute_value_norms=config.absolute_value_norms)
    timings["synthesis"] = time.time() - t0

    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = []

    t0 = time.time()
    for name, emit in (
        ("beta_bound.csv", lambda p: _emit_beta_bound(p, basis, beta)),
        ("beta_continuum.csv", lambda p: _emit_beta_continuum(
            p, basis, ctx, config.n_continuum_rows)),
        ("amplitudes.csv", lambda p: _emit_amplitudes(p, basis, results)),
        ("aggregates.csv", lambda p: _emit_aggregates(p, config, results)),
        ("radial.csv", lambda p: _emit_radial(p, grid, results, ctx,
                                              config.seed_state)),
    ):
        path = out / name
        emit(path)
        files.append(str(path))
    timings["emission"] = time.time() - t0

    cc_probe = None
    if config.probe_cc_offdiagonal > 0:
        cc_probe = []
        centers = basis.pos_centers
        n_s = min(config.probe_cc_offdiagonal, max(len(centers) - 1, 0))
        for k in range(n_s):
            qa = float(centers[min(4 + 3 * k, len(centers) - 2)])
            qb = qa + basis.delta_p * (1 + k % 3)
            for eps in (1, -1):
                val = continuum_offdiagonal_probe(qa, qb, eps, ctx,
                                                  kappa=basis.kappa, m=basis.m)
                cc_probe.append({"qa": qa, "qb": qb, "eps": eps,
                                 "smooth_density": val,
                                 "discretized_estimate": val * basis.delta_p})

    summary = {
        "version": __version__,
        "config": dataclasses.asdict(config),
        "alpha_z": ctx.alpha_z,
        "basis": {"n_bound": basis.n_bound, "n_pos": basis.n_pos,
                  "n_neg": basis.n_neg, "size": basis.size},
        "spectral": {"xi_min": float(zop.eigenvalues.min()),
                     "xi_max": float(zop.eigenvalues.max())},
        "methods": {},
        "timings_s": {k: round(v, 3) for k, v in timings.items()},
        "elapsed_s": round(time.time() - t_start, 3),
    }
    if cc_probe is not None:
        summary["cc_offdiagonal_probe"] = cc_probe
    for method, res in results.items():
        summary["methods"][method] = {
            "norms": res.norms,
            "aggregates": res.aggregates,
        }
    spath = out / "summary.json"
    with open(spath, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    files.append(str(spath))

    return RunReport(config=config, summary=summary, files=files,
                     elapsed=time.time() - t_start)


def sweep(z_values: Sequence[int], seed_state: str, base: RunConfig) -> dict:
    """Run the pipeline over a Z list; one aggregate row per Z, per-Z status.

    Partial failures do not abort the sweep; the report lists each Z with
    "ok" or the error message, and the merged aggregate table contains the
    successful rows (per method).
    """
    rows = []
    status = {}
    for z in z_values:
        cfg = dataclasses.replace(base, z=int(z), seed_state=seed_state,
                                  out_dir=str(Path(base.out_dir) / f"Z{int(z):03d}"))
        try:
            report = run_pipeline(cfg)
            status[int(z)] = "ok"
            for method, data in report.summary["methods"].items():
                ag = data["aggregates"]
                rows.append((int(z), cfg.z_effective if cfg.z_effective is not None
                             else int(z), seed_state, method,
                             ag["P_seed"], ag["P_bound_rest"], ag["P_pos"],
                             ag["P_neg"], ag["sum_rule_residual"],
                             ag["neg_peak_energy"]))
        except Dirac2cError as exc:
            status[int(z)] = f"failed: {exc}"
            logger.error("sweep Z=%s failed: %s", z, exc)
    out = Path(base.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "aggregates.csv",
               ["Z", "z_effective", "seed", "method", "P_seed", "P_bound_rest",
                "P_pos", "P_neg", "sum_rule_residual", "neg_peak_energy"], rows)
    return {"status": status, "rows": len(rows),
            "table": str(out / "aggregates.csv")}
