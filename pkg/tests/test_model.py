import dataclasses
import json
import os
from fractions import Fraction
from typing import Callable, List

from tarepair.errors import ModelError
from tarepair.evaluation import MODELS_DIR
from tarepair.model import (
    Edge,
    LinearParamExpr,
    Pta,
    Ta,
    TimedWord,
    abstract_guards,
    apply_valuation,
    check,
    dump_model,
    format_valuation,
    guard,
    load_model,
    parse_abstraction,
    pta_from_json,
    pta_to_json,
    rescale_to_integers,
    validate,
    valuation_from_json,
    valuation_to_json,
)

TA_PATH = os.path.join(MODELS_DIR, "running_example.ta.json")
PTA_PATH = os.path.join(MODELS_DIR, "running_example.pta.json")
MAP_PATH = os.path.join(MODELS_DIR, "re.map.json")


def valuation(**values: object) -> dict:  # type: ignore
    return {name: Fraction(value) for name, value in values.items()}  # type: ignore


def runtest_error(function: Callable[[], object], error_name: str) -> None:
    try:
        function()
    except ModelError as err:
        assert err.name == error_name
        return
    assert False and "No error caught"


def small_pta() -> Pta:
    return Pta.build(
        alphabet=["a"],
        locations=["l1", "l2"],
        initial="l1",
        clocks=["x"],
        parameters=["p"],
        invariants={"l1": guard(("x", "<=", "p"))},
        edges=[Edge(1, "l1", "l2", "a", guard(("x", ">=", 1)), frozenset(["x"]))],
        accepting=["l2"],
    )


def violation_kinds(pta: Pta) -> List[str]:
    return [violation.split(":")[0] for violation in validate(pta)]


def test_linear_param_expr() -> None:
    test = [
        (LinearParamExpr.make({"p": 2, "q": -1}, 3), "2*p - q + 3"),
        (LinearParamExpr.make({"p": -1}), "-p"),
        (LinearParamExpr.make({}, -2), "-2"),
        (LinearParamExpr.make({"p": 1}, Fraction(-1, 2)), "p - 1/2"),
        (LinearParamExpr.make({"p": 0}, 1), "1"),
        (LinearParamExpr.param("p3"), "p3"),
    ]
    for expr, printed in test:
        assert str(expr) == printed
    expr = LinearParamExpr.make({"p": 2, "q": -1}, 3)
    assert expr.evaluate(valuation(p=1, q=4)) == 1
    assert expr.parameters == frozenset(["p", "q"])
    assert LinearParamExpr.make({"p": 0}, 1).is_constant
    assert str(expr.scale(Fraction(1, 2))) == "p - 1/2*q + 3/2"


def test_guards() -> None:
    grd = guard(("x", "<=", "p3"), ("y", ">=", 4), ("x", ">", "1/2"))
    assert str(grd) == "x <= p3 & y >= 4 & x > 1/2"
    assert grd.parameters == frozenset(["p3"])
    assert str(guard()) == "true"


def test_automaton_accessors() -> None:
    ta = load_model(TA_PATH)
    assert isinstance(ta, Ta)
    assert not ta.is_parametric
    assert [edge.id for edge in ta.outgoing("l1")] == [1, 3]
    assert str(ta.edge(3)) == "e3: l1 -[a, x > 2, {y} := 0]-> l4"
    assert str(ta.edge(1)) == "e1: l1 -[a, x <= 3]-> l2"
    assert str(ta.invariant("l4")) == "x <= 6"
    assert ta.accepting == frozenset(["l3", "l5"])
    runtest_error(lambda: ta.invariant("l9"), "unknown-location")
    runtest_error(lambda: ta.edge(9), "unknown-edge")
    runtest_error(
        lambda: Ta.build(["a"], ["l1"], "l1", ["x"], [], parameters=["p"]),
        "parametric-automaton",
    )
    pta = load_model(PTA_PATH)
    assert pta.is_parametric
    assert pta.parameters == ("p2", "p3", "p4")


def test_validate() -> None:
    base = small_pta()
    assert validate(base) == []
    assert check(base) is base
    assert validate(load_model(TA_PATH)) == []

    edge = base.edges[0]
    test = [
        (dataclasses.replace(base, initial="l9"), "missing-initial"),
        (dataclasses.replace(base, locations=(), invariants=()), "missing-initial"),
        (dataclasses.replace(base, locations=("l1", "l1")), "duplicate-name"),
        (dataclasses.replace(base, clocks=("x", "p")), "duplicate-name"),
        (dataclasses.replace(base, clocks=("x", "x_abs")), "reserved-clock"),
        (dataclasses.replace(base, accepting=frozenset(["l7"])), "unknown-location"),
        (dataclasses.replace(base, edges=(edge, edge)), "duplicate-edge-id"),
        (
            dataclasses.replace(base, edges=(dataclasses.replace(edge, target="l3"),)),
            "unknown-location",
        ),
        (
            dataclasses.replace(base, edges=(dataclasses.replace(edge, action=""),)),
            "epsilon-action",
        ),
        (
            dataclasses.replace(base, edges=(dataclasses.replace(edge, action="z"),)),
            "unknown-action",
        ),
        (
            dataclasses.replace(
                base, edges=(dataclasses.replace(edge, resets=frozenset(["x_abs"])),)
            ),
            "reset-absolute-clock",
        ),
        (
            dataclasses.replace(
                base, edges=(dataclasses.replace(edge, resets=frozenset(["y"])),)
            ),
            "unknown-clock",
        ),
        (
            dataclasses.replace(
                base, edges=(dataclasses.replace(edge, guard=guard(("z", "<=", 1))),)
            ),
            "unknown-clock",
        ),
        (
            dataclasses.replace(
                base, edges=(dataclasses.replace(edge, guard=guard(("x", "<=", "q"))),)
            ),
            "unknown-parameter",
        ),
        (
            dataclasses.replace(
                base,
                edges=(
                    dataclasses.replace(
                        edge, guard=guard(("x", "<=", LinearParamExpr.make({"p": "1/2"})))
                    ),
                ),
            ),
            "non-integer-coefficient",
        ),
        (
            dataclasses.replace(
                base, edges=(dataclasses.replace(edge, guard=guard(("x", "<", 0))),)
            ),
            "unsatisfiable-constraint",
        ),
        (
            dataclasses.replace(base, invariants=(guard(("x", ">=", 1)), guard())),
            "initial-invariant-excludes-zero",
        ),
    ]
    for pta, kind in test:
        assert kind in violation_kinds(pta)
        runtest_error(lambda: check(pta), "invalid-model")


def test_apply_valuation() -> None:
    pta = load_model(PTA_PATH)
    ta = load_model(TA_PATH)
    assert apply_valuation(pta, valuation(p2=2, p3=3, p4=4)) == ta
    oracle = load_model(os.path.join(MODELS_DIR, "re_oracle.ta.json"))
    assert apply_valuation(pta, valuation(p2=0, p3=3, p4=4)) == oracle

    halved = apply_valuation(pta, {"p2": Fraction(1, 2), "p3": Fraction(3), "p4": Fraction(4)})
    assert str(halved.edge(3).guard) == "x > 1/2"
    scaled, factor = rescale_to_integers(halved)
    assert factor == 2
    assert str(scaled.edge(3).guard) == "x > 1"
    assert str(scaled.invariant("l1")) == "x <= 8"
    assert apply_valuation(
        pta, {"p2": Fraction(1, 2), "p3": Fraction(3), "p4": Fraction(4)}, integral=True
    ) == scaled
    assert rescale_to_integers(ta) == (ta, 1)

    runtest_error(lambda: apply_valuation(pta, valuation(p2=2, p3=3)), "missing-parameter")
    runtest_error(
        lambda: apply_valuation(pta, valuation(p2=-1, p3=3, p4=4)), "negative-parameter"
    )


def test_abstraction() -> None:
    ta = load_model(TA_PATH)
    test = [
        ("shared-per-location", False, valuation(p1=3, p2=4, p3=2, p4=1, p5=4)),
        (
            "shared-per-location",
            True,
            valuation(p1=4, p2=3, p3=6, p4=4, p5=2, p6=1, p7=4),
        ),
        ("all", False, valuation(p1=4, p2=3, p3=6, p4=3, p5=3, p6=4, p7=2, p8=1, p9=4)),
    ]
    for strategy, invariant_only, v_init in test:
        pta, found = abstract_guards(ta, strategy, invariant_only=invariant_only)
        assert found == v_init
        assert list(pta.parameters) == sorted(v_init, key=lambda name: int(name[1:]))
        assert apply_valuation(pta, found) == ta

    pta, v_init = abstract_guards(ta, "shared-per-location")
    # the l2 invariant and both guards around l2 share a parameter
    assert str(pta.invariant("l2")) == "x <= p1"
    assert str(pta.edge(2).guard) == "x = p1 & y >= p2"
    assert str(pta.invariant("l1")) == "x <= 4"

    strategy, manual_map = parse_abstraction("manual:" + MAP_PATH)
    assert strategy == "manual"
    pta, v_init = abstract_guards(ta, strategy, manual_map)
    assert pta == load_model(PTA_PATH)
    assert v_init == valuation(p2=2, p3=3, p4=4)


def test_abstraction_errors() -> None:
    ta = load_model(TA_PATH)
    test = [
        (lambda: abstract_guards(ta, "bogus"), "unknown-strategy"),
        (lambda: abstract_guards(ta, "manual"), "missing-abstraction-map"),
        (lambda: abstract_guards(ta, "manual", {"edge:9:0": "p"}), "unknown-occurrence"),
        (
            lambda: abstract_guards(ta, "manual", {"inv:l1:0": "p", "inv:l2:0": "p"}),
            "inconsistent-parameter",
        ),
        (lambda: abstract_guards(ta, "manual", {"inv:l1:0": "x"}), "duplicate-name"),
        (lambda: abstract_guards(load_model(PTA_PATH)), "parametric-automaton"),  # type: ignore
    ]
    for function, name in test:
        runtest_error(function, name)


def test_parse_abstraction(tmp_path) -> None:  # type: ignore
    assert parse_abstraction("all") == ("all", None)
    assert parse_abstraction("shared-per-location") == ("shared-per-location", None)
    bad_map = tmp_path / "bad.json"
    bad_map.write_text(json.dumps(["p1"]))
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    test = [
        ("bogus", "unknown-strategy"),
        ("all:foo", "unknown-strategy"),
        ("manual", "missing-abstraction-map"),
        ("manual:" + str(tmp_path / "missing.json"), "unreadable-file"),
        ("manual:" + str(bad_map), "invalid-abstraction-map"),
        ("manual:" + str(broken), "invalid-json"),
    ]
    for spec, name in test:
        runtest_error(lambda: parse_abstraction(spec), name)


def test_timed_words() -> None:
    word = TimedWord.from_json([["a", "1/2"], ["c", 5]])
    assert str(word) == "(a, 1/2)(c, 5)"
    assert str(TimedWord()) == "ε"
    assert len(word) == 2
    assert word.actions == ("a", "c")
    assert word.timestamps == (Fraction(1, 2), Fraction(5))
    assert str(word.prefix(1)) == "(a, 1/2)"
    assert word.prefix(1).is_proper_prefix_of(word)
    assert not word.is_proper_prefix_of(word)
    assert word.prefix(1).extend("c", 5) == word
    assert word.to_json() == [["a", "1/2"], ["c", "5"]]
    assert TimedWord.from_json(word.to_json()) == word
    words = [word, TimedWord(), TimedWord.of([("b", 1)]), TimedWord.of([("a", 1)])]
    assert [str(w) for w in sorted(words, key=TimedWord.sort_key)] == [
        "ε",
        "(a, 1)",
        "(b, 1)",
        "(a, 1/2)(c, 5)",
    ]

    test = [
        (lambda: TimedWord.of([("a", 1), ("b", 0)]), "decreasing-timestamps"),
        (lambda: TimedWord.of([("a", -1)]), "negative-timestamp"),
        (lambda: TimedWord.from_json("x"), "invalid-word"),
        (lambda: TimedWord.from_json([["a", "soon"]]), "invalid-word"),
    ]
    for function, name in test:
        runtest_error(function, name)


def test_json(tmp_path) -> None:  # type: ignore
    pta = load_model(PTA_PATH)
    assert pta_from_json(pta_to_json(pta)) == pta
    path = str(tmp_path / "copy.json")
    dump_model(pta, path)
    assert load_model(path) == pta
    runtest_error(lambda: pta_from_json({}), "invalid-model")
    runtest_error(lambda: pta_from_json({"alphabet": ["a"], "locations": 3}), "invalid-model")
    data = pta_to_json(pta)
    data["edges"][0]["action"] = "z"
    runtest_error(lambda: pta_from_json(data), "invalid-model")


def test_valuations() -> None:
    v = {"p3": Fraction(3), "p2": Fraction(0), "p4": Fraction(1, 2)}
    assert format_valuation(v) == "(p2 = 0, p3 = 3, p4 = 1/2)"
    assert format_valuation(v, ["p4", "p2"]) == "(p4 = 1/2, p2 = 0)"
    assert valuation_to_json(v) == {"p2": 0, "p3": 3, "p4": "1/2"}
    assert list(valuation_to_json(v)) == ["p2", "p3", "p4"]
    assert valuation_from_json({"p2": 0, "p3": 3, "p4": "1/2"}) == v
    for bad in [{"p": "soon"}, ["p"]]:
        runtest_error(lambda: valuation_from_json(bad), "invalid-valuation")
