"""Command-line interface: `dirac2c run` and `dirac2c sweep`.

Exit codes: 0 success, 2 configuration error, 3 invariant breach,
4 numerical failure.
"""

from __future__ import annotations

import logging
import sys

import click

from .errors import ConfigError, Dirac2cError, InvariantBreach, NonConvergence
from .pipeline import PRESETS, RunConfig, run_pipeline, sweep as run_sweep

EXIT_CONFIG = 2
EXIT_INVARIANT = 3
EXIT_NUMERICAL = 4


def _shared_options(fn):
    opts = [
        click.option("--seed", "seed_state", default="1S1/2", show_default=True,
                     type=click.Choice(["1S1/2", "2P1/2", "2P3/2"]),
                     help="Seed bound state to transform."),
        click.option("--preset", default="paper", show_default=True,
                     type=click.Choice(sorted(PRESETS)),
                     help="Basis/grid scale preset."),
        click.option("--z-effective", type=float, default=None,
                     help="Screened effective charge (e.g. Z - 0.3)."),
        click.option("--methods", default="both", show_default=True,
                     type=click.Choice(["eriksen", "fw", "both"])),
        click.option("--outdir", "out_dir", default="out", show_default=True),
        click.option("--format", "out_format", default="csv", show_default=True,
                     type=click.Choice(["csv", "json"])),
        click.option("--n-bound", type=int, default=None,
                     help="Override the bound-block size."),
        click.option("--delta-p", type=float, default=None,
                     help="Override the momentum bin width."),
        click.option("--p-upper-pos", type=float, default=None),
        click.option("--p-upper-neg", type=float, default=None),
        click.option("--grid-convention", default="center", show_default=True,
                     type=click.Choice(["center", "edge"])),
        click.option("--discretization", default="midpoint", show_default=True,
                     type=click.Choice(["midpoint", "bin_quadrature"])),
        click.option("--r-max", type=float, default=None,
                     help="Override the radial grid extent."),
        click.option("--workers", type=int, default=1, show_default=True,
                     help="Worker threads (must not affect results)."),
        click.option("--verbose", is_flag=True, default=False),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _build_config(z: int, verbose: bool, **kwargs) -> RunConfig:
    if verbose:
        logging.basicConfig(level=logging.INFO,
                            format="%(asctime)s %(name)s %(message)s")
    return RunConfig(z=z, **kwargs)


@click.group()
def main():
    """Exact block-diagonalizing transformation of Dirac-Coulomb bound states."""


@main.command()
@click.option("--Z", "z", type=int, required=True, help="Nuclear charge 1..92.")
@_shared_options
def run(z, verbose, **kwargs):
    """Run the full pipeline for one (Z, seed) and write the result files."""
    try:
        config = _build_config(z, verbose, **kwargs)
        report = run_pipeline(config)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except InvariantBreach as exc:
        click.echo(f"invariant breach: {exc}", err=True)
        sys.exit(EXIT_INVARIANT)
    except (NonConvergence, Dirac2cError) as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    for f in report.files:
        click.echo(f"wrote {f}")
    for method, data in report.summary["methods"].items():
        ag = data["aggregates"]
        click.echo(f"{method}: P_seed={ag['P_seed']:.6f} P_neg={ag['P_neg']:.6f} "
                   f"sum_rule_residual={ag['sum_rule_residual']:.2e}")
    click.echo(f"done in {report.elapsed:.1f} s")


@main.command()
@click.option("--Z-list", "z_list", required=True,
              help="Comma-separated nuclear charges, e.g. 1,24,47,74,92.")
@_shared_options
def sweep(z_list, verbose, **kwargs):
    """Run the pipeline for several Z and write one aggregate row per Z."""
    try:
        z_values = [int(tok) for tok in z_list.split(",") if tok.strip()]
    except ValueError:
        click.echo(f"bad Z list: {z_list!r}", err=True)
        sys.exit(EXIT_CONFIG)
    if not z_values:
        click.echo("empty Z list; nothing to do")
        sys.exit(0)
    try:
        base = _build_config(z_values[0], verbose, **kwargs)
        report = run_sweep(z_values, base.seed_state, base)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    failed = False
    for z, status in report["status"].items():
        click.echo(f"Z={z}: {status}")
        failed |= status != "ok"
    click.echo(f"aggregate table: {report['table']}")
    if failed:
        sys.exit(EXIT_NUMERICAL)


if __name__ == "__main__":
    main()
