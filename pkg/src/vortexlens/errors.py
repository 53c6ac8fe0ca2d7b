"""Exception types shared across the package."""


class VortexLensError(Exception):
    """Base class for all vortexlens errors."""


class DomainError(VortexLensError):
    """An argument is outside the mathematical domain of an operation."""


class OutOfDomainError(DomainError):
    """A z (or rho) value falls outside the region where a profile or
    solution is defined, e.g. extrapolation of a tabulated field."""


class SolverError(VortexLensError):
    """An ODE integrator or quadrature routine failed to meet tolerance."""


class BasisTooSmallError(VortexLensError):
    """Mode decomposition left more residual norm than allowed at the
    requested basis size; retry with larger n_max."""

    def __init__(self, message, residual=None, n_max=None):
        super().__init__(message)
        self.residual = residual
        self.n_max = n_max


class GridMismatchError(VortexLensError):
    """Two fields were combined on incompatible evaluation grids."""


class ScenarioError(VortexLensError):
    """A scenario file failed to parse or validate.  ``key`` names the
    offending entry (dotted path)."""

    def __init__(self, key, message):
        super().__init__(f"scenario key '{key}': {message}")
        self.key = key
