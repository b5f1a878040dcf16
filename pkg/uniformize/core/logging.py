import sys

import structlog

from uniformize.config import settings

_NAME_TO_LEVEL = {
    "debug": 10,
    "info": 20,
    "warning": 30,
    "warn": 30,
    "error": 40,
    "critical": 50,
}


def configure_logging(level: str | None = None) -> None:
    """Configure structlog once for the CLI process (stderr, JSON by default)."""
    name = (level or settings.uniformize_log_level).lower()
    renderer = (
        structlog.dev.ConsoleRenderer()
        if settings.uniformize_log_format == "console"
        else structlog.processors.JSONRenderer()
    )
    structlog.configure(
        processors=[
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(_NAME_TO_LEVEL.get(name, 20)),
        # stderr is looked up per logger so redirected streams are picked up
        logger_factory=lambda *args: structlog.PrintLogger(file=sys.stderr),
    )
