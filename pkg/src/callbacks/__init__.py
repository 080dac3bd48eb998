# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

from dataclasses import dataclass

from src.diagnostics import Span

__all__ = ["Callback", "DispatchEvent", "DispatchTrace"]


@dataclass(frozen=True)
class DispatchEvent:
    """One group dispatch: the lookup started at `start` and found the method in `defining`."""

    selector: str
    start: str
    defining: str
    policy: str
    span: Span


class Callback:
    """Hooks the interpreter calls while a program runs. Subclasses override what they need."""

    def on_run_start(self, entry: str) -> None:
        pass

    def on_group_dispatch(self, event: DispatchEvent) -> None:
        pass

    def on_print(self, line: str) -> None:
        pass

    def on_run_end(self, status: int) -> None:
        pass


from src.callbacks.dispatch_trace import DispatchTrace  # noqa: E402
