# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import os
import sys

import pytest
from typer.testing import CliRunner

# Add tests folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.abspath(__file__)))
# Add folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from swarmc import app
from test_utils import CORPUS_DIR, TESTS_DIR, SourceDirectory, with_main

runner = CliRunner(mix_stderr=False)


def sources(name: str) -> list[str]:
    return [str(p) for p in sorted((CORPUS_DIR / name).glob("*.swarm"))]


def expected(name: str, file: str = "expected.out") -> str:
    return (CORPUS_DIR / name / file).read_text(encoding="utf-8")


def invoke(*args: str):
    return runner.invoke(app, list(args))


def test_check_clean_program():
    result = invoke("check", *sources("herring"))
    assert result.exit_code == 0, result.stderr
    assert result.stderr == ""


def test_check_emit_groups():
    result = invoke("check", "--emit-groups", *sources("herring"))
    assert result.exit_code == 0
    assert "Group call sites" in result.stdout
    assert "GroupCall" in result.stdout


def test_check_reports_diagnostics():
    result = invoke("check", *sources("dynamic_only"))
    assert result.exit_code == 1
    assert "error[E021]: no group method 'tauntVictim' for element type 'Fish'" in result.stderr
    assert "note: declared on Herring" in result.stderr

    result = invoke("check", "--core", *sources("herring"))
    assert result.exit_code == 1
    assert "error[E004]" in result.stderr


def test_run_streams_program_output():
    result = invoke("run", *sources("herring"))
    assert result.exit_code == 0, result.stderr
    assert result.stdout == expected("herring")


@pytest.mark.parametrize(
    "global_options,run_options",
    [
        ([], ["--policy", "dynamic"]),
        (["--set", "run.policy=dynamic"], []),
        (["--config", str(TESTS_DIR / "smoketest_config_run.yaml")], []),
        (["--set", "run.policy=dynamic"], ["--policy", "static", "--policy", "dynamic"]),
    ],
)
def test_run_dynamic_policy(global_options: list[str], run_options: list[str]):
    result = invoke(*global_options, "run", *run_options, *sources("dynamic_only"))
    assert result.exit_code == 0, result.stderr
    assert result.stdout == expected("dynamic_only", "expected.dynamic.out")


def test_run_entry_option():
    text = with_main('print("main");', "class Other { static void go() { print(\"other\"); } }\n")
    with SourceDirectory({"entry.swarm": text}) as dirname:
        path = os.path.join(dirname, "entry.swarm")
        assert invoke("run", path).stdout == "main\n"
        assert invoke("run", "--entry", "Other.go", path).stdout == "other\n"
        result = invoke("run", "--entry", "Other.missing", path)
        assert result.exit_code == 1
        assert "error[E018]" in result.stderr


def test_run_runtime_error():
    with SourceDirectory({"boom.swarm": with_main('print("before");\nint z = 0;\nprint(1 / z);')}) as dirname:
        result = invoke("run", os.path.join(dirname, "boom.swarm"))
    assert result.exit_code == 2
    assert result.stdout == "before\n"
    assert "runtime error: division by zero" in result.stderr


def test_run_trace_logs_dispatches():
    result = invoke("run", "--trace", *sources("herring"))
    assert result.exit_code == 0
    assert result.stdout == expected("herring")
    assert "tauntVictim" in result.stderr


def test_desugar_writes_core_files(tmp_path):
    out = tmp_path / "core"
    result = invoke("desugar", "-o", str(out), *sources("example_fight"))
    assert result.exit_code == 0, result.stderr
    assert sorted(p.name for p in out.iterdir()) == [
        "Creature.core.swarm",
        "ExampleFight.core.swarm",
        "Fish.core.swarm",
        "Shark.core.swarm",
    ]
    golden = CORPUS_DIR / "example_fight" / "golden" / "Fish.core.swarm"
    assert (out / "Fish.core.swarm").read_text() == golden.read_text()

    emit_yaml = str(TESTS_DIR / "smoketest_config_emit.yaml")
    result = invoke("--config", emit_yaml, "desugar", "-o", str(out), *sources("herring"))
    assert result.exit_code == 0
    assert (out / "herring.out.swarm").read_text().startswith("class Creature {\n  int hitpoints;")


def test_crosscheck():
    result = invoke("crosscheck", *sources("herring"))
    assert result.exit_code == 0
    assert result.stdout == ""

    result = invoke("crosscheck", *sources("dynamic_only"))
    assert result.exit_code == 1


@pytest.mark.parametrize(
    "args,code",
    [
        (["run"], 64),
        (["check"], 64),
        (["run", "--policy", "sideways", "x.swarm"], 64),
        (["run", "--entry", "nodot", "x.swarm"], 64),
        (["run", "--bogus"], 64),
        (["transmogrify"], 64),
        (["desugar", "x.swarm"], 64),
        (["--set", "emit.indent_width=0", "check", "x.swarm"], 64),
        (["--config", "/nonexistent/swarm.yaml", "check", "x.swarm"], 66),
        (["run", "/nonexistent/x.swarm"], 66),
        (["check", "/nonexistent/x.swarm"], 66),
    ],
)
def test_exit_codes(args: list[str], code: int):
    assert invoke(*args).exit_code == code


def test_unwritable_output_directory(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    result = invoke("desugar", "-o", str(blocker / "out"), *sources("herring"))
    assert result.exit_code == 73
    assert "cannot write" in result.stderr
