"""Exception hierarchy and CLI exit-code mapping."""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class MacroBellError(Exception):
    """Base exception for all simulator errors."""


class ConfigError(MacroBellError):
    """Run configuration is invalid or inconsistent."""


class UnsupportedConfigurationError(ConfigError):
    """Requested combination of state, mode and noise is not modelled."""


class NumericalGuardError(MacroBellError):
    """A numerical precondition or guard failed."""


class DomainError(NumericalGuardError, ValueError):
    """Argument outside the supported domain of a numerical primitive."""


class WindowOverflowError(NumericalGuardError):
    """Photon-count window exceeds the precomputed table bounds."""


class MassDeficitError(NumericalGuardError):
    """Captured probability mass is below the required level."""


class DegenerateDenominatorError(NumericalGuardError):
    """CH ratio denominator vanishes."""


class MonotonicityError(NumericalGuardError):
    """S(sigma) increased along a noise scan."""


class CutoffMassError(NumericalGuardError):
    """Dense Fock tensor leaks probability beyond its cutoffs."""


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the documented CLI exit status."""
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, NumericalGuardError):
        return EXIT_NUMERICAL
    return 1
