# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import logging
import os
import sys

# Add folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.realpath(__file__)))

from pathlib import Path
from typing import Annotated, List, Optional

import click
import typer
from omegaconf import DictConfig
from rich.console import Console
from rich.table import Table
from typer import Argument, Exit, Option
from typer.core import TyperGroup

from src.attribution import TypedAst
from src.callbacks import DispatchTrace
from src.config import emit_config, load_config, run_config
from src.diagnostics import Diagnostic, format_diagnostics
from src.pipeline import (
    ExitCode,
    InputError,
    OutputError,
    check,
    crosscheck,
    desugar_program,
    load_units,
    run_program,
    write_core,
)
from src.utils import configure_logging


class ExitCodeGroup(TyperGroup):
    """Maps click's own usage errors onto the usage exit code instead of click's default of 2."""

    def main(self, *args, standalone_mode: bool = True, **kwargs):
        try:
            rv = super().main(*args, standalone_mode=False, **kwargs)
        except click.UsageError as e:
            if not standalone_mode:
                raise
            e.show()
            sys.exit(ExitCode.USAGE)
        except click.ClickException as e:
            if not standalone_mode:
                raise
            e.show()
            sys.exit(ExitCode.USAGE)
        except click.Abort:
            if not standalone_mode:
                raise
            sys.exit(ExitCode.USAGE)
        if not standalone_mode:
            return rv
        sys.exit(rv if isinstance(rv, int) else ExitCode.OK)


app = typer.Typer(
    cls=ExitCodeGroup,
    context_settings={"help_option_names": ["-h", "--help"]},
    pretty_exceptions_show_locals=False,
    no_args_is_help=True,
    add_completion=False,
)

console = Console()


def fail(message: str, code: ExitCode) -> Exit:
    typer.echo(message, err=True)
    return Exit(code)


def settings(ctx: typer.Context) -> DictConfig:
    """The merged configuration for this invocation, loaded once."""
    if ctx.obj.get("cfg") is None:
        try:
            cfg = load_config(ctx.obj["config"], ctx.obj["overrides"])
        except OSError as e:
            raise fail(f"cannot read config: {e}", ExitCode.NO_INPUT)
        except ValueError as e:
            raise fail(str(e), ExitCode.USAGE)
        except Exception as e:
            # malformed YAML or dotlist
            raise fail(f"invalid config: {e}", ExitCode.USAGE)
        configure_logging("DEBUG" if ctx.obj["verbose"] else cfg.logging.level)
        ctx.obj["cfg"] = cfg
    return ctx.obj["cfg"]


def units_or_exit(inputs: Optional[List[Path]]):
    if not inputs:
        typer.echo(click.get_current_context().get_usage(), err=True)
        raise fail("error: no input files", ExitCode.USAGE)
    try:
        return load_units(inputs)
    except InputError as e:
        raise fail(f"error: {e}", ExitCode.NO_INPUT)


def report(diagnostics: list[Diagnostic]) -> None:
    if diagnostics:
        typer.echo(format_diagnostics(diagnostics), err=True)


def group_table(typed: TypedAst) -> Table:
    table = Table(title="Group call sites")
    table.add_column("Location", style="cyan")
    table.add_column("Call")
    table.add_column("Resolution", style="green")
    for call, res in typed.group_calls():
        table.add_row(str(call.span), f"{call.name}(...)", _describe_resolution(res))
    return table


def _describe_resolution(res) -> str:
    element = getattr(res, "element", None)
    target = getattr(res, "target", None)
    prefix = type(res).__name__
    if target is None:
        return f"{prefix} {element.name}.{res.selector}"
    if element is None:
        return f"{prefix} {target.qualified_name}"
    return f"{prefix} from {element.name} -> {target.qualified_name}"


@app.callback()
def main(
    ctx: typer.Context,
    config: Annotated[Optional[Path], Option("--config", help="YAML file merged over yamls/defaults.yaml", show_default=False)] = None,
    overrides: Annotated[Optional[List[str]], Option("--set", help="Dotlist override such as run.policy=dynamic; repeatable", show_default=False)] = None,
    verbose: Annotated[bool, Option("-v", "--verbose", help="Log every phase at DEBUG level to stderr")] = False,
):
    """Compile, desugar and run SwarmLang programs."""
    ctx.obj = {"config": config, "overrides": overrides or [], "verbose": verbose, "cfg": None}


@app.command("check")
def cmd_check(
    ctx: typer.Context,
    inputs: Annotated[Optional[List[Path]], Argument(help="SwarmLang source files, compiled as one program", show_default=False)] = None,
    emit_groups: Annotated[bool, Option("--emit-groups", help="Print every group call site and its resolution")] = False,
    core: Annotated[bool, Option("--core", help="Check with group features disabled, as for desugared output")] = False,
):
    """Lex, parse, enter and attribute; print every diagnostic."""
    settings(ctx)
    units = units_or_exit(inputs)
    result = check(units, group_features=not core)
    report(result.diagnostics)
    if not result.ok:
        raise Exit(ExitCode.COMPILE_ERROR)
    if emit_groups:
        console.print(group_table(result.typed))


@app.command("desugar")
def cmd_desugar(
    ctx: typer.Context,
    output_dir: Annotated[Path, Option("-o", "--output-dir", help="Directory for the desugared core files", show_default=False)],
    inputs: Annotated[Optional[List[Path]], Argument(help="SwarmLang source files, compiled as one program", show_default=False)] = None,
):
    """Lower group methods to wrapper classes and write one core file per input file."""
    cfg = settings(ctx)
    units = units_or_exit(inputs)
    core, diagnostics = desugar_program(units)
    report(diagnostics)
    if core is None or diagnostics:
        raise Exit(ExitCode.COMPILE_ERROR)
    try:
        write_core(core, output_dir, emit_config(cfg), str(cfg.desugar.suffix))
    except OutputError as e:
        raise fail(f"error: {e}", ExitCode.CANT_CREATE)


@app.command("run")
def cmd_run(
    ctx: typer.Context,
    inputs: Annotated[Optional[List[Path]], Argument(help="SwarmLang source files, compiled as one program", show_default=False)] = None,
    policy: Annotated[Optional[str], Option("--policy", help="Group lookup policy: static or dynamic", show_default=False)] = None,
    entry: Annotated[Optional[str], Option("--entry", help="Entry method as Class.method", show_default=False)] = None,
    trace: Annotated[bool, Option("--trace", help="Log every group dispatch at DEBUG level")] = False,
):
    """Interpret the program, streaming its output to stdout."""
    cfg = settings(ctx)
    try:
        run_cfg = run_config(cfg, policy, entry)
    except ValueError as e:
        raise fail(str(e), ExitCode.USAGE)
    units = units_or_exit(inputs)
    callbacks = []
    if trace:
        logging.getLogger("src.callbacks").setLevel(logging.DEBUG)
        callbacks.append(DispatchTrace(log_dispatches=True))
    result, diagnostics = run_program(units, run_cfg, callbacks, stream=sys.stdout)
    report(diagnostics)
    if result is None:
        raise Exit(ExitCode.COMPILE_ERROR)
    sys.stdout.flush()
    if not result.ok:
        raise fail(f"runtime error: {result.error}", ExitCode.RUNTIME_ERROR)


@app.command("crosscheck")
def cmd_crosscheck(
    ctx: typer.Context,
    inputs: Annotated[Optional[List[Path]], Argument(help="SwarmLang source files, compiled as one program", show_default=False)] = None,
    entry: Annotated[Optional[str], Option("--entry", help="Entry method as Class.method", show_default=False)] = None,
):
    """Run the program directly and after desugaring; fail with a diff if the outputs differ."""
    cfg = settings(ctx)
    try:
        run_cfg = run_config(cfg, "static", entry)
    except ValueError as e:
        raise fail(str(e), ExitCode.USAGE)
    units = units_or_exit(inputs)
    result = crosscheck(units, run_cfg, emit_config(cfg), str(cfg.desugar.suffix))
    report(result.diagnostics)
    if result.diff:
        typer.echo(result.diff, nl=False)
    raise Exit(result.status)


if __name__ == "__main__":
    app()
