"""Exception types shared across the package."""


class StretchLabError(Exception):
    """Base class for errors raised by stretchlab."""


class InvalidInputError(StretchLabError, ValueError):
    """An argument violates the documented precondition of an operation."""


class NoValidCError(InvalidInputError):
    """No constant c with cn even lies in the admissible window for this n."""

    def __init__(self, n, lo, hi):
        self.n = n
        self.interval = (lo, hi)
        super().__init__(
            f"no even integer k with {lo:.6f} < k < {hi:.6f} (n={n}); "
            "pass an explicit c override for exploratory runs"
        )


class ConfigError(StretchLabError):
    """An experiment configuration could not be parsed or validated."""
