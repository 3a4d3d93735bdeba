from functions.exceptions import MetaliftError


class CaseMismatch(MetaliftError):
    """A group element or function was used with a case it does not belong to."""
