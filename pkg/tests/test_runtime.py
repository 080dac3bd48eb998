# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import io
import os
import sys

import pytest

# Add tests folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.abspath(__file__)))
# Add folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.attribution import LookupPolicy
from src.callbacks import Callback, DispatchTrace
from src.diagnostics import Diagnostic
from src.pipeline import check
from src.runtime import (
    NULL_V,
    CollectionV,
    IntV,
    Interpreter,
    RunConfig,
    StrV,
    SwarmRuntimeError,
    run,
    select_entry,
    stringify,
    wrap_int,
)
from test_utils import HERRING, check_source, corpus_units, with_main


def typed_of(text: str, policy: LookupPolicy = LookupPolicy.STATIC):
    result = check_source(text, policy=policy)
    assert result.ok, result.diagnostics
    return result.typed


def run_main(body: str, classes: str = HERRING, policy: LookupPolicy = LookupPolicy.STATIC):
    typed = typed_of(with_main(body, classes), policy)
    return run(typed, RunConfig(policy))


def test_swarm_attack_damage_law():
    typed = check(corpus_units("example_fight")).typed
    table = typed.table
    interp = Interpreter(typed)
    fish_cls = table["Fish"]
    swarm_attack = fish_cls.group_methods["swarmAttack"]
    swarm = CollectionV(fish_cls)
    for n in range(1001):
        shark = interp.construct(table["Shark"], [])
        interp.invoke_group(swarm_attack, fish_cls, swarm, [shark])
        assert shark.fields["hitpoints"] == IntV(100 - n * n)
        swarm.elements.append(interp.construct(fish_cls, []))


def test_swarm_lookup_policies():
    typed = typed_of(HERRING)
    table = typed.table
    interp = Interpreter(typed)
    herrings = CollectionV(table["Fish"], [interp.construct(table["Herring"], []) for _ in range(2)])

    static = interp.swarm_lookup(herrings, "swarmAttack")
    assert (static.start.name, static.defining.name) == ("Fish", "Fish")
    assert static.is_group

    dynamic = interp.swarm_lookup(herrings, "swarmAttack", LookupPolicy.DYNAMIC)
    assert (dynamic.start.name, dynamic.defining.name) == ("Herring", "Herring")

    # a view with a narrower declared element starts lower
    narrowed = interp.swarm_lookup(herrings.view(table["Herring"]), "swarmAttack")
    assert narrowed.defining.name == "Herring"
    assert interp.swarm_lookup(herrings, "size").is_builtin

    mixed = CollectionV(table["Fish"], [interp.construct(table["Herring"], []), interp.construct(table["Fish"], [])])
    assert interp.swarm_lookup(mixed, "swarmAttack", LookupPolicy.DYNAMIC).defining.name == "Fish"

    shark = interp.construct(table["Shark"], [])
    target = interp.swarm_lookup(shark, "damage")
    assert target.method.qualified_name == "Creature.damage" and not target.is_group


@pytest.mark.parametrize(
    "receiver,selector,policy,message",
    [
        ("null", "swarmAttack", LookupPolicy.STATIC, "null receiver for 'swarmAttack'"),
        ("fish", "fly", LookupPolicy.STATIC, "message not understood: fly"),
        ("fish", "tauntVictim", LookupPolicy.STATIC, "message not understood: tauntVictim"),
        ("empty", "swarmAttack", LookupPolicy.DYNAMIC, "group lookup on empty collection"),
        ("holes", "swarmAttack", LookupPolicy.DYNAMIC, "null element in group receiver"),
        ("shark", "fly", LookupPolicy.STATIC, "message not understood: fly"),
    ],
)
def test_swarm_lookup_failures(receiver: str, selector: str, policy: LookupPolicy, message: str):
    typed = typed_of(HERRING)
    table = typed.table
    interp = Interpreter(typed)
    fish = table["Fish"]
    receivers = {
        "null": NULL_V,
        "fish": CollectionV(fish, [interp.construct(fish, [])]),
        "empty": CollectionV(fish),
        "holes": CollectionV(fish, [interp.construct(fish, []), NULL_V]),
        "shark": interp.construct(table["Shark"], []),
    }
    with pytest.raises(SwarmRuntimeError, match=message):
        interp.swarm_lookup(receivers[receiver], selector, policy)


def test_static_lookup_on_empty_collection_still_dispatches():
    result = run_main("Shark s = new Shark();\nCollection<Fish> none = new Collection<Fish>();\nnone.swarmAttack(s);")
    assert result.ok
    result = run_main(
        "Shark s = new Shark();\nCollection<Fish> none = new Collection<Fish>();\nnone.swarmAttack(s);",
        policy=LookupPolicy.DYNAMIC,
    )
    assert result.error == "group lookup on empty collection"


def test_invoke_group_rejects_other_methods():
    typed = typed_of(HERRING)
    interp = Interpreter(typed)
    damage = typed.table["Creature"].instance_methods["damage"]
    with pytest.raises(ValueError, match="as a group method"):
        interp.invoke_group(damage, typed.table["Creature"], CollectionV(typed.table["Fish"]), [IntV(1)])


def test_builtins():
    result = run_main(
        "Collection<Fish> c = new Collection<Fish>();\n"
        "print(\"\" + c.isEmpty() + \" \" + c.size());\n"
        "c.add(new Fish());\nc.add(null);\n"
        "print(\"\" + c.isEmpty() + \" \" + c.size() + \" \" + (c.get(1) == null));\n"
        "print(c.get(2).hitpoints);"
    )
    assert result.stdout == "true 0\nfalse 2 true\n"
    assert result.status == 2
    assert result.error == "index out of bounds: 2 of 2"


@pytest.mark.parametrize(
    "expression,printed",
    [
        ("7 / 2", "3"),
        ("-7 / 2", "-3"),
        ("7 / -2", "-3"),
        ("9223372036854775807 + 1", "-9223372036854775808"),
        ("-9223372036854775807 - 2", "9223372036854775807"),
        ("4611686018427387904 * 2", "-9223372036854775808"),
        ("1 + 2 * 3 - 4", "3"),
        ('"n=" + 1 + 2', "n=12"),
        ('1 + 2 + "=n"', "3=n"),
        ('"" + (1 < 2) + " " + !true', "true false"),
        ('"" + null', "null"),
    ],
)
def test_expression_semantics(expression: str, printed: str):
    result = run_main(f"print({expression});")
    assert result.ok, result.error
    assert result.stdout == printed + "\n"


@pytest.mark.parametrize(
    "body,error",
    [
        ("int z = 0;\nprint(1 / z);", "division by zero"),
        ("Shark s = null;\ns.damage(1);", "null receiver for 'damage'"),
        ("Shark s = null;\nprint(s.hitpoints);", "null dereference reading field 'hitpoints'"),
        ("Shark s = null;\ns.hitpoints = 1;", "null dereference writing field 'hitpoints'"),
        ("Collection<Fish> c = null;\nc.swarmAttack(new Shark());", "null receiver for 'swarmAttack'"),
        ("Collection<Fish> c = null;\nprint(c.size());", "null receiver for 'size'"),
        ("Collection<Fish> c = null;\nfor (Fish f : c) { }", "null collection in for-each"),
    ],
)
def test_runtime_errors(body: str, error: str):
    result = run_main('print("before");\n' + body + '\nprint("after");')
    assert result.status == 2
    assert result.error == error
    # output up to the failure is kept
    assert result.stdout == "before\n"


def test_short_circuit_skips_the_right_operand():
    result = run_main('Shark s = null;\nif (s != null && s.hitpoints > 0) { print("alive"); } else { print("none"); }')
    assert result.stdout == "none\n"


def test_deep_recursion_is_a_stack_overflow():
    classes = "class Loop { static int down(int n) { return down(n + 1); } }\n"
    result = run_main("print(Loop.down(0));", classes)
    assert result.status == 2
    assert result.error == "stack overflow"


def test_for_each_iterates_a_snapshot():
    result = run_main(
        "Collection<Fish> c = new Collection<Fish>();\nc.add(new Fish());\nc.add(new Fish());\n"
        "for (Fish f : c) { c.add(new Fish()); }\nprint(c.size());"
    )
    assert result.stdout == "4\n"


def test_defaults_and_equality():
    classes = "class Box { int n; boolean b; string s; Box other; Collection<Box> all; }\n"
    result = run_main(
        "Box x = new Box();\n"
        'print(x.n + " " + x.b + " [" + x.s + "] " + (x.other == null) + " " + (x.all == null));\n'
        "Box y = x;\n"
        'print("" + (x == y) + " " + (x == new Box()));\n'
        "Collection<Box> c = new Collection<Box>();\nCollection<Box> d = c;\n"
        'print("" + (c == d) + " " + (c == new Collection<Box>()));',
        classes,
    )
    assert result.stdout == "0 false [] true true\ntrue false\ntrue false\n"


def test_wrap_and_stringify():
    assert wrap_int(2**63) == -(2**63)
    assert wrap_int(-(2**63) - 1) == 2**63 - 1
    assert stringify(StrV("x")) == "x"
    assert stringify(NULL_V) == "null"


class Recorder(Callback):
    def __init__(self):
        self.calls = []

    def on_run_start(self, entry: str) -> None:
        self.calls.append(("start", entry))

    def on_print(self, line: str) -> None:
        self.calls.append(("print", line))

    def on_run_end(self, status: int) -> None:
        self.calls.append(("end", status))


def test_callbacks_and_stream():
    typed = check(corpus_units("herring")).typed
    recorder, trace, stream = Recorder(), DispatchTrace(), io.StringIO()
    result = run(typed, RunConfig(), [recorder, trace], stream)
    assert result.ok
    assert stream.getvalue() == result.stdout
    assert recorder.calls[0] == ("start", "Main.main")
    assert recorder.calls[-1] == ("end", 0)
    assert [line for kind, line in recorder.calls if kind == "print"] == result.stdout.splitlines()
    assert trace.targets() == [
        ("swarmAttack", "Herring"),
        ("swarmAttack", "Fish"),
        ("tauntVictim", "Herring"),
        ("swarmAttack", "Fish"),
    ]


@pytest.mark.parametrize("program", ["herring", "example_fight", "group_super_chain"])
def test_policies_agree_when_elements_match_declared_type(program: str):
    targets = {}
    for policy in LookupPolicy:
        result = check(corpus_units(program), policy=policy)
        assert result.ok, result.diagnostics
        trace = DispatchTrace()
        outcome = run(result.typed, RunConfig(policy), [trace])
        assert outcome.ok, outcome.error
        targets[policy] = trace.targets()
    assert targets[LookupPolicy.STATIC] == targets[LookupPolicy.DYNAMIC]
    assert targets[LookupPolicy.STATIC]


def test_policies_disagree_on_mixed_collections():
    targets = {}
    for policy in LookupPolicy:
        trace = DispatchTrace()
        run(check(corpus_units("policy_split"), policy=policy).typed, RunConfig(policy), [trace])
        targets[policy] = trace.targets()
    assert targets[LookupPolicy.STATIC] != targets[LookupPolicy.DYNAMIC]


@pytest.mark.parametrize(
    "classes,entry,fragment",
    [
        ("class A { }", None, "no class declares a static void main()"),
        (
            "class A { static void main() { } }\nclass B { static void main() { } }",
            None,
            "several classes declare a static void main(): A, B",
        ),
        ("class A { static void main() { } }", "A.start", "'A.start' is not a static, zero-parameter, void method"),
        ("class A { static int main() { return 0; } }", None, "no class declares"),
        ("class A { void main() { } }", None, "no class declares"),
    ],
)
def test_entry_selection_errors(classes: str, entry, fragment: str):
    typed = typed_of(classes)
    selected = select_entry(typed.table, RunConfig.from_entry(entry))
    assert isinstance(selected, Diagnostic)
    assert selected.code == "E018"
    assert fragment in selected.message


def test_entry_selection_prefers_main_class():
    typed = typed_of("class A { static void main() { print(1); } }\nclass Main { static void main() { print(2); } }")
    assert select_entry(typed.table, RunConfig()).qualified_name == "Main.main"
    assert run(typed, RunConfig.from_entry("A.main")).stdout == "1\n"


@pytest.mark.parametrize("entry", ["main", "A.", ".main", "A.b.c"])
def test_malformed_entry(entry: str):
    with pytest.raises(ValueError, match="expected the form Class.method"):
        RunConfig.from_entry(entry)
