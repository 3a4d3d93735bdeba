from functions.exceptions import MetaliftError


class DomainError(MetaliftError):
    """A point lies outside the domain of a chart (x1 <= 0, r <= 0 or outside the cone)."""
