from functions.exceptions import MetaliftError


class RangeError(MetaliftError):
    """A band index outside N = {1, 2, ...} or a key outside a bijection's table."""
