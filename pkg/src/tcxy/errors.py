"""Exception hierarchy shared across the package."""


class TcxyError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(TcxyError):
    """Invalid physical parameters, state amplitudes, or run configuration."""


class BranchSelectionError(TcxyError):
    """No cube-root pairing met the residual and physicality bounds."""


class DegenerateRootsError(TcxyError):
    """Root collision makes the mode-amplitude system near singular."""


class NumericalDegradationError(TcxyError):
    """A numerical invariant (hermiticity, positivity, realness) failed its bound."""


class OracleIntegrationError(TcxyError):
    """The reference ODE integrator failed to converge on a block."""


class ShapeMismatchError(TcxyError):
    """Two states cannot be compared because their layouts differ."""
