class StructuralError(ValueError):
    """Malformed input: wrong shapes, bad indices, unparsable JSON."""


class ValidationError(ValueError):
    """A defining invariant of a structure fails.

    ``invariant`` names the violated condition and ``residual`` is its size.
    """

    def __init__(self, invariant: str, residual: float, message: str | None = None):
        self.invariant = invariant
        self.residual = float(residual)
        super().__init__(message or f"{invariant} violated (residual {self.residual:.3e})")


class ConventionError(RuntimeError):
    """A constructed object fails its own postconditions.

    Raised instead of silently returning data built with a wrong sign or slot
    convention.
    """

    def __init__(self, what: str, residuals: dict[str, float]):
        self.what = what
        self.residuals = dict(residuals)
        detail = ", ".join(f"{k}={v:.3e}" for k, v in self.residuals.items())
        super().__init__(f"{what}: postcondition failure ({detail})")
