# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

from src.runtime.interpreter import DispatchTarget, Frame, Interpreter, RunConfig, RunResult, run, select_entry
from src.runtime.values import (
    NULL_V,
    BoolV,
    CollectionV,
    IntV,
    NullV,
    ObjectV,
    StrV,
    SwarmRuntimeError,
    Value,
    stringify,
    wrap_int,
)

__all__ = [
    "DispatchTarget",
    "Frame",
    "Interpreter",
    "RunConfig",
    "RunResult",
    "run",
    "select_entry",
    "NULL_V",
    "BoolV",
    "CollectionV",
    "IntV",
    "NullV",
    "ObjectV",
    "StrV",
    "SwarmRuntimeError",
    "Value",
    "stringify",
    "wrap_int",
]
