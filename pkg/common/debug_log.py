"""
Logging setup shared by the library and the CLI.
"""
import contextlib
import logging
import sys
from typing import Any, ContextManager

import logfire

from common.config_manager import SimulatorSettings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

_logfire_enabled = False


def configure_logging(settings: SimulatorSettings) -> None:
    """Route records to stderr, and to logfire when it is switched on.

    CSV goes to stdout, so log output must never share that stream.
    """
    global _logfire_enabled

    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if settings.enable_logfire:
        logfire.configure(
            token=settings.logfire_token,
            service_name="macrobell",
            send_to_logfire="if-token-present",
            console=False,
        )
        handlers.append(logfire.LogfireLoggingHandler())
        _logfire_enabled = True

    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


def trace_span(name: str, **attributes: Any) -> ContextManager:
    """A logfire span when logfire is configured, otherwise a no-op context."""
    if _logfire_enabled:
        return logfire.span(name, **attributes)
    return contextlib.nullcontext()
