# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import os
import sys

import pytest

# Add tests folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.abspath(__file__)))
# Add folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.emitter import EmitConfig, emit, emit_files
from src.frontend import SourceUnit
from src.pipeline import frontend
from test_utils import HERRING, corpus_programs, corpus_units, units


def program_of(text: str, path: str = "emit.swarm"):
    program, diagnostics = frontend(units(text, path))
    assert not diagnostics, diagnostics
    return program


def reemit(text: str, cfg: EmitConfig = EmitConfig()) -> str:
    return emit(program_of(text), cfg)


def test_canonical_layout():
    text = "class A extends B { int x; A() { super(); } void m() { if (x > 0) y(); else z(); } }"
    assert reemit(text) == (
        "class A extends B {\n"
        "    int x;\n"
        "\n"
        "    A() {\n"
        "        super();\n"
        "    }\n"
        "\n"
        "    void m() {\n"
        "        if (x > 0) {\n"
        "            y();\n"
        "        } else {\n"
        "            z();\n"
        "        }\n"
        "    }\n"
        "}\n"
    )


def test_emitting_is_a_fixed_point():
    once = reemit(HERRING)
    assert reemit(once) == once


@pytest.mark.parametrize(
    "expression,expected",
    [
        ("(1 + 2) * 3", "(1 + 2) * 3"),
        ("1 + (2 * 3)", "1 + 2 * 3"),
        ("1 - (2 - 3)", "1 - (2 - 3)"),
        ("(1 - 2) - 3", "1 - 2 - 3"),
        ("!(a && b)", "!(a && b)"),
        ("-(-x)", "-(-x)"),
        ("-(-5)", "-(-5)"),
        ("1 - -5", "1 - -5"),
        ("(a || b) && c", "(a || b) && c"),
        ('"say \\"hi\\"\\n"', '"say \\"hi\\"\\n"'),
        ("(a.b()).c", "a.b().c"),
    ],
)
def test_expressions_keep_their_meaning(expression: str, expected: str):
    text = reemit("class A { void m() { int v = " + expression + "; } }")
    assert f"int v = {expected};" in text


def test_statement_forms():
    text = reemit(
        "class A { void m() {\n"
        "for (int i = 0; i < 3; i++) print(i);\n"
        "for (;;) { return; }\n"
        "while (b) x--;\n"
        "if (a) { } else if (b) { } else { }\n"
        "{ int n; }\n"
        "} }"
    )
    assert "for (int i = 0; i < 3; i += 1) {" in text
    assert "for (;;) {" in text
    assert "x -= 1;" in text
    assert "} else if (b) {" in text
    assert "        {\n            int n;\n        }" in text


def test_config_changes_indent_and_annotations():
    cfg = EmitConfig(indent_width=2, include_group_annotations=False)
    text = reemit("class A { @group void m() { } }", cfg)
    assert text == "class A {\n  void m() {\n  }\n}\n"
    assert "@group void m()" in reemit("class A { @group void m() { } }")

    with pytest.raises(ValueError, match="indent_width=0"):
        EmitConfig(indent_width=0)


def test_emit_files_groups_classes_by_source():
    program, _ = frontend([SourceUnit("a.swarm", "class A { }\nclass C { }"), SourceUnit("b.swarm", "class B { }")])
    files = emit_files(program)
    assert list(files) == ["a.swarm", "b.swarm"]
    assert files["a.swarm"] == "class A {\n}\n\nclass C {\n}\n"
    assert files["b.swarm"] == "class B {\n}\n"


@pytest.mark.parametrize(
    "name", sorted(set(corpus_programs("expected.out")) | set(corpus_programs("expected.dynamic.out")))
)
def test_corpus_survives_emit_and_reparse(name: str):
    program, diagnostics = frontend(corpus_units(name))
    assert not diagnostics, diagnostics
    files = emit_files(program)
    reparsed, diagnostics = frontend([SourceUnit(path, text) for path, text in files.items()])
    assert not diagnostics, diagnostics
    assert reparsed == program
