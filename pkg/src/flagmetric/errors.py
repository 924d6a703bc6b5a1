"""Exception types shared across the package."""


class FlagMetricError(Exception):
    """Base class for all library-specific errors."""


class RankDeficient(FlagMetricError):
    """A matrix expected to have full column rank does not."""


class DimensionMismatch(FlagMetricError):
    """Operands live in incompatible spaces (ambient or plane dims)."""


class InvalidDimension(FlagMetricError):
    """A requested subspace dimension is not present in a flag."""


class DegeneratePairing(FlagMetricError):
    """A cross-ratio denominator pairing fell below the rank tolerance."""


class OutsideDomain(FlagMetricError):
    """A point that must lie in the open domain does not."""


class NotProper(FlagMetricError):
    """The domain could not be certified as bounded with an open dual."""


class NotConvex(FlagMetricError):
    """A chord left the domain where a convex domain was required."""


class NotDualConvexAt(FlagMetricError):
    """No supporting dual point exists at the given boundary point."""

    def __init__(self, point, message=None):
        self.point = point
        super().__init__(message or f"no supporting dual point through {point}")


class SpanningFailure(FlagMetricError):
    """The dual representation did not yield a spanning set of functionals."""


class NotAnAutomorphism(FlagMetricError):
    """A group element failed to map the domain onto itself."""

    def __init__(self, element, witness, message=None):
        self.element = element
        self.witness = witness
        super().__init__(message or "element does not preserve the domain")


class NotInDomain(FlagMetricError):
    """A matrix-ball coordinate exceeds the spectral-norm bound."""


class NotPD(FlagMetricError):
    """A matrix expected to be symmetric positive definite is not."""


class NoWitness(FlagMetricError):
    """No fiber-escape witness could be constructed (should not occur)."""


class FiberExitsImmediately(FlagMetricError):
    """The starting flag's fiber slice has empty interior."""


class ParseError(FlagMetricError):
    """A domain specification file could not be parsed."""


class ValidationError(FlagMetricError):
    """A domain specification parsed but failed validation."""
