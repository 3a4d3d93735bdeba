class MetaliftError(Exception):
    """Base class for every domain error raised by the metalift apps."""


class NonExactPair(MetaliftError):
    """An atom pair has no closed-form inner product; use the quadrature path."""


class MaxSubdivision(MetaliftError):
    """Adaptive quadrature ran out of its panel budget before reaching tolerance."""


class UnboundedSupport(MetaliftError):
    pass


class UnsupportedAction(MetaliftError):
    """The transformed function leaves the atom algebra; demote to a PointEvaluator."""
