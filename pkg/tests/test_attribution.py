# Copyright 2024 onwards SwarmLang contributors
# License: Apache-2.0

import os
import sys

import pytest

# Add tests folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.abspath(__file__)))
# Add folder root to path to allow us to use relative imports regardless of what directory the script is run from
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
from src.attribution import (
    BuiltinCollectionCall,
    DeferredGroupCall,
    GroupCall,
    GroupEscapeCall,
    LookupPolicy,
    SuperMethodCall,
    lookup_group,
    lookup_instance,
    resolve_call,
    resolve_group_escape,
)
from src.diagnostics import CompileError
from src.frontend.syntax import Call, This, walk
from src.pipeline import check
from src.symbols import INT, CollectionType
from test_utils import HERRING, check_source, codes, corpus_programs, corpus_units, with_main

SETUP = """\
        Shark shark = new Shark();
        Collection<Fish> fish = new Collection<Fish>();
        Collection<Herring> school = new Collection<Herring>();
"""


def resolutions_by_call(typed) -> dict[str, list]:
    found: dict[str, list] = {}
    for node in walk(typed.program):
        res = typed.resolution_of(node) if isinstance(node, Call) else None
        if res is not None:
            found.setdefault(node.name, []).append(res)
    return found


def test_group_calls_resolve_from_declared_element():
    result = check_source(with_main(SETUP + "school.swarmAttack(shark);\nfish.swarmAttack(shark);"))
    assert result.ok, result.diagnostics
    by_call = resolutions_by_call(result.typed)

    main_calls = [r for r in by_call["swarmAttack"] if isinstance(r, GroupCall)]
    assert [(r.element.name, r.defining.name) for r in main_calls] == [("Herring", "Herring"), ("Fish", "Fish")]
    assert all(isinstance(r, BuiltinCollectionCall) for r in by_call["size"])
    (taunt,) = by_call["tauntVictim"]
    assert isinstance(taunt, GroupCall) and taunt.element.name == "Herring"

    supers = [res for _, res in result.typed.group_calls() if isinstance(res, SuperMethodCall)]
    assert [s.target.qualified_name for s in supers] == ["Fish.swarmAttack"]


def test_this_in_group_method_is_the_collection():
    result = check_source(HERRING)
    assert result.ok
    this_types = {str(result.typed.type_of(n)) for n in walk(result.typed.program) if isinstance(n, This)}
    assert this_types == {"Collection<Fish>", "Collection<Herring>", "Creature"}


def test_group_method_below_declared_element_is_rejected_statically():
    text = with_main(SETUP + "fish.tauntVictim();")
    result = check_source(text)
    assert codes(result.diagnostics) == ["E021"]
    (diag,) = result.diagnostics
    assert "no group method 'tauntVictim' for element type 'Fish'" in diag.message
    assert diag.notes == ("declared on Herring, below the declared element type 'Fish'",)

    dynamic = check_source(text, policy=LookupPolicy.DYNAMIC)
    assert dynamic.ok, dynamic.diagnostics
    (deferred,) = resolutions_by_call(dynamic.typed)["tauntVictim"][-1:]
    assert isinstance(deferred, DeferredGroupCall)
    assert (deferred.element.name, deferred.signature.qualified_name) == ("Fish", "Herring.tauntVictim")


def test_builtins_shadow_group_methods_and_escape_reaches_them():
    text = """\
class Fish {
    @group int size() {
        return 42;
    }

    @group int both() {
        return this.size() + Fish.this.size();
    }
}

class Main {
    static void main() {
        Collection<Fish> fish = new Collection<Fish>();
        print(fish.size());
    }
}
"""
    result = check_source(text)
    assert result.ok, result.diagnostics
    by_call = resolutions_by_call(result.typed)
    kinds = [type(r) for r in by_call["size"]]
    assert kinds == [BuiltinCollectionCall, GroupEscapeCall, BuiltinCollectionCall]


def test_escape_falls_back_to_builtin_delegation():
    text = "class Fish { @group int count() { return Fish.this.size(); } }"
    result = check_source(text)
    assert result.ok
    (res,) = resolutions_by_call(result.typed)["size"]
    assert isinstance(res, BuiltinCollectionCall)


@pytest.mark.parametrize(
    "body,code",
    [
        ("new Fish().swarmAttack(shark);", "E020"),
        ("shark.fly();", "E020"),
        ("fish.swim();", "E021"),
        ("fish.swarmAttack(1);", "E022"),
        ("fish.swarmAttack();", "E023"),
        ("fish.add(shark);", "E022"),
        ("if (1) { }", "E028"),
        ("int x = true + 1;", "E029"),
        ("int x = -true;", "E029"),
        ('string s = "a"; s += shark;', "E029"),
        ("print(shark);", "E029"),
        ("for (Fish f : shark) { }", "E029"),
        ("int x = shark;", "E030"),
        ("Collection<Creature> cs = fish;", "E030"),
        ("for (Herring h : fish) { }", "E030"),
        ("print(missing);", "E031"),
        ("print(Shark);", "E031"),
        ("print(shark.fins);", "E027"),
        ("print(fish.hitpoints);", "E027"),
        ("this.toString();", "E033"),
        ("int x = 1; int x = 2;", "E013"),
        ("Collection<Fish> c = new Collection<Missing>();", "E016"),
        ("Shark s = new Shark(1);", "E023"),
    ],
)
def test_main_body_errors(body: str, code: str):
    result = check_source(with_main(SETUP + body))
    assert code in codes(result.diagnostics), result.diagnostics


@pytest.mark.parametrize(
    "subclass",
    [
        "class B extends A { B() { } }",
        "class B extends A { B() { print(1); super(2); } }",
        "class B extends A { }",
    ],
)
def test_implicit_super_must_match_parent_constructor(subclass: str):
    text = "class A { A(int x) { print(x); } }\n" + subclass + "\n"
    result = check_source(with_main("A a = new B();", text))
    arity = [d for d in result.diagnostics if d.code == "E023"]
    assert len(arity) == 1, result.diagnostics
    assert arity[0].message.startswith("'A constructor' expects 1 arguments, found 0")


def test_explicit_or_zero_arg_super_is_accepted():
    text = "class A { A(int x) { print(x); } }\nclass B extends A { B() { super(2); } }\n"
    assert check_source(with_main("A a = new B();", text)).ok
    text = "class A { A() { } }\nclass B extends A { }\nclass C extends B { C(int y) { print(y); } }\n"
    assert check_source(with_main("A a = new C(1);", text)).ok


@pytest.mark.parametrize(
    "member,code",
    [
        ("void m() { Fish.this.size(); }", "E024"),
        ("@group void m() { Shark.this.size(); }", "E025"),
        ("@group void m() { Collection<Fish> c = Fish.this; }", "E026"),
        ("@group void m() { print(hitpoints); }", "E031"),
        ("@group void m() { super.nothing(); }", "E032"),
        ("void m() { super.nothing(); }", "E032"),
        ("static void m() { super.damage(1); }", "E033"),
        ("int m() { return; }", "E030"),
        ("void m() { return 1; }", "E030"),
        ("@group void m() { swim(); }", "E020"),
        ("static void m() { damage(1); }", "E033"),
    ],
)
def test_member_errors(member: str, code: str):
    text = HERRING + "\nclass Sprat extends Fish {\n    " + member + "\n}\n"
    result = check_source(text)
    assert code in codes(result.diagnostics), result.diagnostics


def test_field_in_group_method_gets_a_note():
    text = "class Fish { int weight; @group int m() { return weight; } }"
    (diag,) = check_source(text).diagnostics
    assert diag.code == "E031"
    assert "element fields are not in scope" in diag.notes[0]


def test_unqualified_calls_in_group_methods_only_see_statics():
    text = "class Fish { static int helper() { return 1; } @group int m() { return helper(); } }"
    assert check_source(text).ok


def test_resolve_call_on_types():
    result = check_source(HERRING)
    table = result.typed.table
    fish = table["Fish"]
    res = resolve_call(CollectionType(fish.type), "swarmAttack", [table["Creature"].type], table=table)
    assert isinstance(res, GroupCall) and res.defining is fish
    res = resolve_call(INT, "swarmAttack", [])
    assert res.code == "E020"


def test_raise_on_error():
    with pytest.raises(CompileError):
        check_source("class A { void m() { print(nope); } }", raise_on_error=True)


def test_instance_and_group_lookup_walk_separate_tables():
    table = check_source(HERRING).typed.table
    herring, fish, creature = table["Herring"], table["Fish"], table["Creature"]

    assert lookup_instance(herring, "damage").owner is creature
    assert lookup_instance(herring, "swarmAttack") is None

    method, defining = lookup_group(herring, "swarmAttack")
    assert (method.qualified_name, defining) == ("Herring.swarmAttack", herring)
    _, defining = lookup_group(herring, "tauntVictim")
    assert defining is herring
    assert lookup_group(fish, "tauntVictim") is None
    assert lookup_group(creature, "swarmAttack") is None


def test_resolve_group_escape():
    table = check_source(HERRING).typed.table
    herring, fish, shark = table["Herring"], table["Fish"], table["Shark"]

    res = resolve_group_escape(herring, fish, "swarmAttack", [shark.type])
    assert isinstance(res, GroupEscapeCall)
    assert (res.element, res.defining, res.target.qualified_name) == (fish, fish, "Fish.swarmAttack")

    assert isinstance(resolve_group_escape(herring, herring, "size"), BuiltinCollectionCall)
    assert resolve_group_escape(fish, herring, "swarmAttack").code == "E025"
    assert resolve_group_escape(herring, None, "swarmAttack", qualifier_name="Nope").code == "E025"
    assert resolve_group_escape(herring, table["Creature"], "nope").code == "E021"
    assert resolve_group_escape(herring, fish, "swarmAttack", []).code == "E023"


@pytest.mark.parametrize(
    "name,policy",
    [(name, LookupPolicy.STATIC) for name in corpus_programs("expected.out")]
    + [(name, LookupPolicy.DYNAMIC) for name in corpus_programs("expected.dynamic.out")],
)
def test_attribution_is_deterministic(name: str, policy: LookupPolicy):
    first = check(corpus_units(name), policy=policy)
    second = check(corpus_units(name), policy=policy)
    assert first.ok, first.diagnostics
    assert first.typed.summary() == second.typed.summary()
    assert any(row[2] for row in first.typed.summary())
