"""Exception types shared across the package."""


class Schro1dError(Exception):
    """Base class for all schro1d errors."""


class ConfigError(Schro1dError):
    """Raised for malformed suite/scenario configuration.

    Carries the field path (e.g. "scenarios[2].energy.re") so CLI users can
    locate the offending entry.
    """

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DegenerateConstants(Schro1dError):
    """C2 = 0: the estimate constants K and delta are unbounded."""


class OverflowAtX(Schro1dError):
    """Solution magnitude exceeded the overflow guard during propagation."""

    def __init__(self, x, magnitude):
        self.x = x
        self.magnitude = magnitude
        super().__init__(f"solution magnitude {magnitude:.3e} exceeded guard at x={x}")


class NotRealSolution(Schro1dError):
    """A real-valued trace was required but imaginary parts are non-negligible."""


class GridTooCoarse(Schro1dError):
    """Phase increments too large to unwrap reliably; refine the grid."""


class TraceTooShort(Schro1dError):
    """The trace does not cover the window required by a check."""


class NoEligiblePoints(Schro1dError):
    """No grid point satisfies the check's precondition."""


class InadmissibleWeight(Schro1dError):
    """The weight function fails the finite-ratio admissibility condition."""


class PreconditionFailed(Schro1dError):
    """The hypothesis of the inequality does not hold on the requested interval."""
