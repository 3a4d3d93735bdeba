from functions.exceptions import MetaliftError


class SupportViolation(MetaliftError):
    """A generator is non-zero beyond radius 1 on sampled points."""


class TruncationTooSmall(MetaliftError):
    """The function carries energy outside the lattice box being checked."""


class TailBoundExceedsTol(MetaliftError):
    """The reported bound on a truncated lattice sum is larger than the tolerance."""


class ConfigError(MetaliftError):
    pass
