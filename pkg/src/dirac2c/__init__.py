"""dirac2c: exact single-step two-component reduction of Dirac-Coulomb bound states.

Expands the transformed state of a hydrogen-like atom in a finite basis
of bound states and discretized continuum states, evaluates all matrix
elements analytically, builds the spectral inverse square root that
defines the exact block-diagonalizing transformation, and reproduces the
associated tables and radial functions, alongside the linearized
(second-order Foldy-Wouthuysen-like) approximation.
"""

from ._version import __version__

from .basis import BasisConfig, BasisSet, assemble_basis, build_momentum_grids
from .errors import (ConfigError, Dirac2cError, InsufficientGrid, InvalidParameter,
                     InvalidQuantumNumbers, InvariantBreach, NonConvergence)
from .hydrogenic import (ALPHA_DEFAULT, PhysicalContext, QuantumNumbers, RadialPair,
                         bound_energy, bound_radial, continuum_asymptotic,
                         continuum_energy, continuum_radial, kappa_of,
                         make_radial_grid)
from .matelem import (SymmetricMatrixTable, beta_bound_bound, beta_bound_continuum,
                      beta_continuum_diagonal, beta_discretized, build_beta_table,
                      quadrature_oracle, z_negative_diagonal)
from .pipeline import PRESETS, RunConfig, run_pipeline, sweep
from .transform import (SpectralOperator, TransformResult, build_S, build_Z,
                        eriksen_amplitudes, fw_amplitudes, nonrel_reference,
                        norms_and_aggregates, synthesize)

__all__ = [
    "__version__",
    "ALPHA_DEFAULT", "PhysicalContext", "QuantumNumbers", "RadialPair",
    "kappa_of", "bound_energy", "continuum_energy", "bound_radial",
    "continuum_radial", "continuum_asymptotic", "make_radial_grid",
    "BasisConfig", "BasisSet", "assemble_basis", "build_momentum_grids",
    "SymmetricMatrixTable", "beta_bound_bound", "beta_bound_continuum",
    "beta_discretized", "beta_continuum_diagonal", "z_negative_diagonal",
    "quadrature_oracle", "build_beta_table",
    "SpectralOperator", "TransformResult", "build_S", "build_Z",
    "eriksen_amplitudes", "fw_amplitudes", "synthesize", "norms_and_aggregates",
    "nonrel_reference",
    "RunConfig", "run_pipeline", "sweep", "PRESETS",
    "Dirac2cError", "ConfigError", "InvariantBreach", "InvalidParameter",
    "InvalidQuantumNumbers", "NonConvergence", "InsufficientGrid",
]
