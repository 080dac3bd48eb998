# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import logging

from src.callbacks import Callback, DispatchEvent

__all__ = ["DispatchTrace"]

log = logging.getLogger(__name__)


class DispatchTrace(Callback):
    """Records every group dispatch of a run, in order."""

    def __init__(self, log_dispatches: bool = False):
        self.log_dispatches = log_dispatches
        self.events: list[DispatchEvent] = []

    def on_run_start(self, entry: str) -> None:
        self.events.clear()

    def on_group_dispatch(self, event: DispatchEvent) -> None:
        self.events.append(event)
        if self.log_dispatches:
            log.debug(f"{event.span}: {event.selector} from {event.start} -> {event.defining} ({event.policy})")

    def targets(self) -> list[tuple[str, str]]:
        """(selector, defining class) per dispatch, the part two lookup policies must agree on."""
        return [(e.selector, e.defining) for e in self.events]
