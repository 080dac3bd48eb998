# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import os
import sys

# Add src folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.realpath(__file__)))

from src.attribution import LookupPolicy, TypedAst, attribute, least_upper_bound, lookup_group, lookup_instance
from src.desugar import CoreProgram, desugar, plan_wrappers, synthesize_wrapper
from src.diagnostics import CompileError, Diagnostic, Span
from src.emitter import EmitConfig, emit
from src.frontend import SourceUnit, parse, tokenize
from src.pipeline import ExitCode, check, crosscheck, run_program
from src.runtime import Interpreter, RunConfig, RunResult, SwarmRuntimeError
from src.symbols import SymbolTable, enter, is_subtype, superclass_chain

__all__ = [
    "LookupPolicy",
    "TypedAst",
    "attribute",
    "least_upper_bound",
    "lookup_group",
    "lookup_instance",
    "CoreProgram",
    "desugar",
    "plan_wrappers",
    "synthesize_wrapper",
    "CompileError",
    "Diagnostic",
    "Span",
    "EmitConfig",
    "emit",
    "SourceUnit",
    "parse",
    "tokenize",
    "ExitCode",
    "check",
    "crosscheck",
    "run_program",
    "Interpreter",
    "RunConfig",
    "RunResult",
    "SwarmRuntimeError",
    "SymbolTable",
    "enter",
    "is_subtype",
    "superclass_chain",
]
