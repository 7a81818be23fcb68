"""Exception types shared across the package."""


class Dirac2cError(Exception):
    """Base class for all package-specific errors."""


class InvalidQuantumNumbers(Dirac2cError):
    """Quantum numbers violate a structural constraint (kappa = 0, bad (j,l) pair, ...)."""


class InvalidParameter(Dirac2cError):
    """A special-function parameter is outside its allowed domain (e.g. pole of Gamma)."""


class NonConvergence(Dirac2cError):
    """A series / expansion did not reach the requested tolerance in any regime."""


class ConfigError(Dirac2cError):
    """A run configuration failed validation."""


class InvariantBreach(Dirac2cError):
    """A structural invariant (square-root existence, block zeros, sum rule) was violated."""


class InsufficientGrid(Dirac2cError):
    """Estimated discretization error of a quadrature exceeds the requested tolerance."""
