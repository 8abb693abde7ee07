"""Exception hierarchy shared by all ssblab modules."""


class SSBLabError(Exception):
    """Base class for every error raised by the package."""


class ArgumentError(SSBLabError, ValueError):
    """Malformed or inconsistent arguments (dimensions, counts, regions)."""


class DomainError(SSBLabError, ValueError):
    """A physical quantity lies outside its allowed domain."""


class ShapeError(SSBLabError, ValueError):
    """The potential or spectrum does not have the required shape."""


class TruncationError(SSBLabError, RuntimeError):
    """A state is not representable in a truncated basis."""


class ValidityError(SSBLabError, ValueError):
    """An approximation is used outside its regime of validity."""


class ResolutionError(SSBLabError, ValueError):
    """A basis or grid is too coarse for the requested quantity."""


class IntegrationError(SSBLabError, RuntimeError):
    """A trajectory integrator violated its energy-conservation bound."""


class NumericError(SSBLabError, RuntimeError):
    """A numerical routine failed to converge or an internal cross-check failed."""


class ValidityWarning(UserWarning):
    """An approximation is near the edge of its regime of validity."""


class ConfigError(SSBLabError, ValueError):
    """An experiment configuration is malformed; ``path`` names the offending key."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
