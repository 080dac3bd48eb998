# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import os
import sys

import pytest

# Add tests folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.abspath(__file__)))
# Add folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.attribution import LookupPolicy
from src.emitter import EmitConfig
from src.pipeline import (
    ExitCode,
    InputError,
    OutputError,
    core_file_name,
    crosscheck,
    desugar_program,
    load_units,
    run_program,
    write_core,
)
from src.runtime import RunConfig
from test_utils import SourceDirectory, corpus_units, units, with_main


def test_load_units(tmp_path):
    with SourceDirectory({"a.swarm": "class A { }", "b.swarm": "class B { }"}) as dirname:
        loaded = load_units([os.path.join(dirname, "a.swarm"), os.path.join(dirname, "b.swarm")])
        assert [u.text for u in loaded] == ["class A { }", "class B { }"]

    with pytest.raises(InputError, match="cannot read"):
        load_units([tmp_path / "missing.swarm"])

    (tmp_path / "latin1.swarm").write_bytes(b"class \xe9 { }")
    with pytest.raises(InputError):
        load_units([tmp_path / "latin1.swarm"])


@pytest.mark.parametrize(
    "source,suffix,expected",
    [
        ("corpus/Fish.swarm", ".core.swarm", "Fish.core.swarm"),
        ("Fish", ".core.swarm", "Fish.core.swarm"),
        ("/tmp/x/Main.swarm", ".out", "Main.out"),
    ],
)
def test_core_file_name(source: str, suffix: str, expected: str):
    assert core_file_name(source, suffix) == expected


def test_write_core(tmp_path):
    core, diagnostics = desugar_program(corpus_units("example_fight"))
    assert not diagnostics
    written = write_core(core, tmp_path / "out", EmitConfig(indent_width=2), ".c.swarm")
    assert sorted(p.name for p in written) == [
        "Creature.c.swarm",
        "ExampleFight.c.swarm",
        "Fish.c.swarm",
        "Shark.c.swarm",
    ]
    fish = (tmp_path / "out" / "Fish.c.swarm").read_text()
    assert "class Fish$Group {\n  Collection<Fish> delegate;" in fish

    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    with pytest.raises(OutputError, match="cannot write"):
        write_core(core, blocker / "out")


def test_run_program_reports_compile_errors_and_entry_problems():
    result, diagnostics = run_program(units("class A { void m() { print(x); } }"))
    assert result is None and [d.code for d in diagnostics] == ["E031"]

    result, diagnostics = run_program(units("class A { }"))
    assert result is None and [d.code for d in diagnostics] == ["E018"]

    result, diagnostics = run_program(corpus_units("dynamic_only"), RunConfig(LookupPolicy.DYNAMIC))
    assert not diagnostics and result.ok


def test_crosscheck_agrees_on_herring():
    result = crosscheck(corpus_units("herring"))
    assert result.status == ExitCode.OK
    assert result.original.stdout == result.desugared.stdout
    assert result.diff == ""


def test_crosscheck_reports_a_diff_when_the_core_program_differs():
    def mutate(text: str) -> str:
        return text.replace("swarmSize * swarmSize", "swarmSize + swarmSize")

    result = crosscheck(corpus_units("example_fight"), mutate=mutate)
    assert result.status == ExitCode.MISMATCH
    assert result.diff.startswith("--- direct\n+++ desugared\n")
    assert "-Shark defeated with -9900 hitpoints." in result.diff
    assert "+Shark defeated with -100 hitpoints." in result.diff


def test_crosscheck_compares_runtime_errors_too():
    text = with_main('print("start");\nint z = 0;\nprint(1 / z);')
    result = crosscheck(units(text))
    assert result.status == ExitCode.OK
    assert result.original.error == result.desugared.error == "division by zero"


def test_crosscheck_statuses():
    assert crosscheck(units("class A { void m() { nope(); } }")).status == ExitCode.COMPILE_ERROR
    assert crosscheck(corpus_units("dynamic_only")).status == ExitCode.COMPILE_ERROR
    broken = crosscheck(corpus_units("herring"), mutate=lambda text: text.replace("delegate", "elsewhere", 1))
    assert broken.status == ExitCode.COMPILE_ERROR
    with pytest.raises(ValueError, match="policy=dynamic"):
        crosscheck(corpus_units("herring"), RunConfig(LookupPolicy.DYNAMIC))
