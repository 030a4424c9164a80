"""Exception types shared across the toolkit."""


class CvBatteryError(Exception):
    """Base class for all toolkit errors."""


class InvalidInputError(CvBatteryError):
    """Non-finite or otherwise malformed input values."""


class InconsistencyError(CvBatteryError):
    """A quantity that should be real (or conserved) picked up a residue
    beyond tolerance; indicates a numerical problem, not a user error."""


class UnphysicalStateError(CvBatteryError):
    """State violates a physical bound (covariance determinant below one,
    negative eigenvalues, ...) beyond the floating-point guard band."""


class UnsupportedRegimeError(CvBatteryError):
    """Parameters fall outside the regime where a closed-form route is
    defined (e.g. overdamped weak-driving formula)."""


class ConvergenceError(CvBatteryError):
    """An iterative procedure (root solve, integrator, cutoff doubling)
    failed to converge."""


class ConfigError(CvBatteryError):
    """Scenario-file parse or validation error."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
