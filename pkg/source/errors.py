"""
Exception hierarchy for opsis.
Each exception carries the CLI exit code it maps to.
"""
from typing import Optional


class OpsisError(Exception):
    """Base class for all errors raised by opsis."""
    exit_code: int = 1


class ConfigurationError(OpsisError):
    """Malformed input: bad config field, mismatched sizes or moduli."""
    exit_code = 3


class InvalidDescriptorError(ConfigurationError):
    """A lattice descriptor that does not describe a subgroup of Z_L x Z_L."""


class UnsupportedModulusError(ConfigurationError):
    """A Weyl-side operation requested for an even modulus."""


class SchemeError(ConfigurationError):
    """An operation called with the wrong kind of sampling scheme."""


class NotRieszError(OpsisError):
    """The translates of the generators are not a Riesz sequence."""
    exit_code = 2

    def __init__(self, message: str, lower: float = 0.0, upper: float = 0.0):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class NotAFrameError(OpsisError):
    """The transfer matrix does not satisfy the frame condition."""
    exit_code = 2

    def __init__(self, message: str, alpha_a: float = 0.0, beta_a: Optional[float] = None):
        super().__init__(message)
        self.alpha_a = alpha_a
        self.beta_a = beta_a


class NumericalError(OpsisError):
    """Non-finite values showed up in a computed result."""
    exit_code = 4
