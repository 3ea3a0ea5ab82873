"""Exception hierarchy.

Everything that signals a numerical failure (as opposed to a violated
inequality or bad input) derives from :class:`NumericalFailure`; the CLI maps
those to exit code 3.
"""


class NumericalFailure(RuntimeError):
    pass


class TruncationError(NumericalFailure):
    """Series did not reach the requested tail tolerance within ``max_terms``."""

    def __init__(self, message, partial_sum):
        super().__init__(message)
        self.partial_sum = partial_sum


class ZeroNotFoundError(NumericalFailure):
    pass


class ProximityError(ValueError):
    """Point lies too close to the curve where U is only C^1."""


class CoercivityError(NumericalFailure):
    pass


class ConvexityError(NumericalFailure):
    pass


class DimensionError(ValueError):
    pass
