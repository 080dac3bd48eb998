# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

# Copyright 2020 Optuna, Hugging Face
# License: Apache-2.0

import functools
import logging
import sys
from enum import Enum

from rich.console import Console
from rich.logging import RichHandler


@functools.lru_cache(None)
def warning_once(self, *args, **kwargs):
    """
    This method is identical to `logger.warning()`, but will emit the warning with the same message only once

    Note: The cache is keyed on the function arguments, so warnings must carry the detail that makes them unique
    (e.g. the call-site location) in the message itself.
    """
    self.warning(*args, **kwargs)


logging.Logger.warning_once = warning_once


class StrEnum(str, Enum):
    """
    This is equivalent to Python's :class:`enum.StrEnum` since version 3.11.
    We include this here for compatibility with older version of Python.
    """

    def __str__(self) -> str:
        return self.value

    def __repr__(self) -> str:
        return f"'{str(self)}'"


def configure_logging(level: str | int = "WARNING") -> None:
    """Route the `src` loggers to stderr through rich, leaving stdout for program output."""
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError(f"Not sure how to configure logging with level={level}")
        level = resolved

    handler = RichHandler(console=Console(file=sys.stderr), show_path=False, show_time=False)
    root = logging.getLogger("src")
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False
