from common.config_manager import SimulatorSettings, get_settings
from common.debug_log import configure_logging, trace_span
from common.errors import (
    ConfigError,
    MacroBellError,
    NumericalGuardError,
    exit_code_for,
)

__all__ = [
    "SimulatorSettings",
    "get_settings",
    "configure_logging",
    "trace_span",
    "ConfigError",
    "MacroBellError",
    "NumericalGuardError",
    "exit_code_for",
]
