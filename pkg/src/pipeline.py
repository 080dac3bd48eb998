# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

"""The compiler phases wired together: load, check, desugar, run and crosscheck."""

import difflib
import logging
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path
from typing import Callable, Optional, Sequence, TextIO, Union

from src.attribution import LookupPolicy, TypedAst, attribute
from src.callbacks import Callback
from src.desugar import CoreProgram, desugar
from src.diagnostics import SYNTHETIC_SPAN, CompileError, Diagnostic
from src.emitter import EmitConfig, emit_files
from src.frontend import SourceUnit, parse, tokenize
from src.frontend.syntax import Program
from src.runtime.interpreter import RunConfig, RunResult, run
from src.symbols import enter

__all__ = [
    "ExitCode",
    "InputError",
    "OutputError",
    "CheckResult",
    "CrosscheckResult",
    "load_units",
    "frontend",
    "check",
    "desugar_program",
    "write_core",
    "run_program",
    "crosscheck",
]

log = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    COMPILE_ERROR = 1
    RUNTIME_ERROR = 2
    MISMATCH = 3
    USAGE = 64
    NO_INPUT = 66
    CANT_CREATE = 73


class InputError(Exception):
    """An input file could not be read."""


class OutputError(Exception):
    """A desugared file could not be written."""


@dataclass
class CheckResult:
    program: Program
    typed: Optional[TypedAst] = None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.typed is not None and not self.diagnostics


@dataclass
class CrosscheckResult:
    original: Optional[RunResult]
    desugared: Optional[RunResult] = None
    diagnostics: list[Diagnostic] = field(default_factory=list)
    diff: str = ""

    @property
    def status(self) -> ExitCode:
        if self.diagnostics:
            return ExitCode.COMPILE_ERROR
        if self.diff:
            return ExitCode.MISMATCH
        return ExitCode.OK


def load_units(paths: Sequence[str | Path]) -> list[SourceUnit]:
    units = []
    for path in paths:
        try:
            units.append(SourceUnit.from_file(path))
        except (OSError, UnicodeDecodeError) as e:
            raise InputError(f"cannot read {path}: {e}") from e
    return units


def frontend(units: Sequence[SourceUnit], group_features: bool = True) -> tuple[Program, list[Diagnostic]]:
    """Lex and parse every unit; the classes of all files form one program."""
    classes, diagnostics, spans = [], [], []
    for unit in units:
        lexed = tokenize(unit)
        diagnostics.extend(lexed.diagnostics)
        parsed = parse(lexed.tokens, group_features=group_features)
        diagnostics.extend(parsed.diagnostics)
        classes.extend(parsed.program.classes)
        spans.append(parsed.program.span)
    log.debug(f"Parsed {len(classes)} classes from {len(units)} files")
    # spans are per file; the merged program points at the first
    return Program(classes, span=spans[0] if spans else SYNTHETIC_SPAN), diagnostics


def check(
    units: Sequence[SourceUnit],
    group_features: bool = True,
    policy: LookupPolicy = LookupPolicy.STATIC,
    raise_on_error: bool = False,
) -> CheckResult:
    """Frontend, enter and attribute. Later phases only run if the earlier ones were clean."""
    program, diagnostics = frontend(units, group_features)
    result = CheckResult(program, diagnostics=diagnostics)
    if not diagnostics:
        entered = enter(program, core=not group_features)
        result.diagnostics = list(entered.diagnostics)
        if entered.ok:
            attributed = attribute(program, entered.table, policy)
            result.diagnostics = list(attributed.diagnostics)
            if attributed.ok:
                result.typed = attributed.typed
    if raise_on_error and not result.ok:
        raise CompileError(result.diagnostics)
    return result


def desugar_program(units: Sequence[SourceUnit]) -> tuple[Optional[CoreProgram], list[Diagnostic]]:
    checked = check(units)
    if not checked.ok:
        return None, checked.diagnostics
    result = desugar(checked.typed)
    return result.core, result.diagnostics


def core_file_name(source: str, suffix: str) -> str:
    return Path(source).name.removesuffix(".swarm") + suffix


def write_core(
    core: CoreProgram, out_dir: str | Path, cfg: EmitConfig = EmitConfig(), suffix: str = ".core.swarm"
) -> list[Path]:
    """Write one core file per source file of `core`, named after the source file."""
    out_dir = Path(out_dir)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for source, text in emit_files(core.program, cfg).items():
            target = out_dir / core_file_name(source, suffix)
            with open(target, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            written.append(target)
    except OSError as e:
        raise OutputError(f"cannot write to {out_dir}: {e}") from e
    log.info(f"Wrote {len(written)} files to {out_dir}")
    return written


def run_program(
    units: Sequence[SourceUnit],
    run_cfg: RunConfig = RunConfig(),
    callbacks: Sequence[Callback] = (),
    stream: Optional[TextIO] = None,
) -> tuple[Optional[RunResult], list[Diagnostic]]:
    """Check under the run's lookup policy, then interpret. An unusable entry is reported as a diagnostic."""
    checked = check(units, policy=run_cfg.policy)
    if not checked.ok:
        return None, checked.diagnostics
    result = run(checked.typed, run_cfg, callbacks, stream)
    if isinstance(result, Diagnostic):
        return None, [result]
    return result, []


def _transcript(result: Union[RunResult, Diagnostic]) -> list[str]:
    """Observable behaviour of one run, line by line: stdout, then the error if there was one."""
    if isinstance(result, Diagnostic):
        return [result.message + "\n"]
    lines = result.stdout.splitlines(keepends=True)
    if result.error is not None:
        lines.append(f"runtime error: {result.error}\n")
    return lines


def crosscheck(
    units: Sequence[SourceUnit],
    run_cfg: RunConfig = RunConfig(),
    emit_cfg: EmitConfig = EmitConfig(),
    suffix: str = ".core.swarm",
    mutate: Optional[Callable[[str], str]] = None,
) -> CrosscheckResult:
    """Run the program directly and through its desugared text; report a unified diff if they disagree.

    The desugared program goes through the emitter and back through the frontend with group features disabled.
    `mutate` rewrites the emitted text before it is parsed again.
    """
    if run_cfg.policy != LookupPolicy.STATIC:
        raise ValueError(f"Not sure how to crosscheck under policy={run_cfg.policy}, desugaring fixes static lookup")
    checked = check(units)
    if not checked.ok:
        return CrosscheckResult(None, diagnostics=checked.diagnostics)
    original = run(checked.typed, run_cfg)
    if isinstance(original, Diagnostic):
        return CrosscheckResult(None, diagnostics=[original])

    desugared = desugar(checked.typed)
    if not desugared.ok:
        return CrosscheckResult(original, diagnostics=desugared.diagnostics)
    core_units = []
    for source, text in emit_files(desugared.core.program, emit_cfg).items():
        core_units.append(SourceUnit(core_file_name(source, suffix), mutate(text) if mutate else text))
    core_checked = check(core_units, group_features=False)
    if not core_checked.ok:
        return CrosscheckResult(original, diagnostics=core_checked.diagnostics)
    core_result = run(core_checked.typed, run_cfg)

    expected, actual = _transcript(original), _transcript(core_result)
    diff = ""
    if expected != actual:
        diff = "".join(difflib.unified_diff(expected, actual, fromfile="direct", tofile="desugared"))
        log.debug(f"Crosscheck mismatch:\n{diff}")
    return CrosscheckResult(original, core_result, diff=diff)
