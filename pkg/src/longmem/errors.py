"""Exception and warning types shared across the package."""


class ValidationError(ValueError):
    """An input violates a documented precondition.

    ``field`` names the offending argument (or CLI flag) when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class EstimationError(RuntimeError):
    """An estimator could not produce a trustworthy value."""


class LADConvergenceWarning(RuntimeWarning):
    """The L1 solver hit its iteration cap; the best iterate was returned."""
