import os
import random
from fractions import Fraction
from typing import Callable, Sequence

from tarepair.constraints import parse_constraint
from tarepair.errors import SearchError
from tarepair.evaluation import MODELS_DIR
from tarepair.model import TimedWord, load_model
from tarepair.polyhedra import PolyUnion, param
from tarepair.repair import (
    RepairConfig,
    default_box,
    instantiate,
    l1_distance,
    nearest_on_strict_boundaries,
    repair,
)
from tarepair.synthesis import replay_tw

P = param("p")
Q = param("q")


def phi(text: str, names: Sequence[str] = ("p",)) -> PolyUnion:
    return parse_constraint(text, [param(name) for name in names])


def values(**kwargs: object) -> dict:  # type: ignore
    return {name: Fraction(value) for name, value in kwargs.items()}  # type: ignore


def runtest_error(function: Callable[[], object], error_name: str) -> None:
    try:
        function()
    except SearchError as err:
        assert err.name == error_name
        return
    assert False and "No error caught"


def test_instantiate() -> None:
    rational = RepairConfig(domain="rational", granularity=4)
    halves = RepairConfig(domain="rational", granularity=2)
    test = [
        ("p >= 5", values(p=3), RepairConfig(), values(p=5)),
        ("0 <= p < 1/2", values(p=2), RepairConfig(), values(p=0)),
        ("p <= 2", values(p=2), RepairConfig(), values(p=2)),
        ("p < 2", values(p=2), RepairConfig(), values(p=1)),
        ("p < 2", values(p=2), rational, values(p=Fraction(7, 4))),
        ("p > 3 | p < 1", values(p=2), RepairConfig(), values(p=0)),
        ("p = 5/2", values(p=2), halves, values(p=Fraction(5, 2))),
    ]
    for text, v_init, config, expected in test:
        assert instantiate(phi(text), v_init, ["p"], config) == expected


def test_tie_break() -> None:
    found = instantiate(phi("p + q >= 5", ["p", "q"]), values(p=2, q=2), ["p", "q"])
    # (2, 3) and (3, 2) are both at distance 1
    assert found == values(p=2, q=3)
    found = instantiate(phi("p + q >= 5", ["p", "q"]), values(p=2, q=2), ["q", "p"])
    assert found == values(p=3, q=2)


def test_search_box() -> None:
    assert default_box(values(p=3), ["p"]) == {"p": (Fraction(0), Fraction(16))}
    assert default_box(values(p=1, q=7), ["p", "q"])["p"] == (Fraction(0), Fraction(24))
    assert default_box({}, []) == {}
    assert l1_distance(values(p=1, q=3), values(p=2, q=1), ["p", "q"]) == 3

    config = RepairConfig(box={"p": (Fraction(0), Fraction(4))})
    assert nearest_on_strict_boundaries(phi("p >= 5"), values(p=3), ["p"], config) is None
    # the sweep takes over when the search runs out of iterations
    config = RepairConfig(max_iterations=1)
    assert nearest_on_strict_boundaries(phi("p >= 5"), values(p=3), ["p"], config) == values(p=5)
    config = RepairConfig(box={"p": (Fraction(1, 3), Fraction(2, 3))})
    assert nearest_on_strict_boundaries(phi("p >= 0"), values(p=3), ["p"], config) is None


def test_instantiate_errors() -> None:
    other_box = RepairConfig(box={"q": (Fraction(0), Fraction(1))})
    test = [
        (lambda: instantiate(PolyUnion.bottom([P]), values(p=1), ["p"]), "empty-constraint"),
        (lambda: instantiate(phi("p >= 20"), values(p=3), ["p"]), "no-solution-in-box"),
        (
            lambda: instantiate(phi("p + q >= 5", ["p", "q"]), values(p=2), ["p", "q"]),
            "missing-parameter",
        ),
        (
            lambda: instantiate(phi("p >= 5"), values(p=3), ["p"], other_box),
            "invalid-box",
        ),
        (lambda: RepairConfig(domain="real").step, "invalid-domain"),
        (lambda: RepairConfig(domain="rational", granularity=0).step, "invalid-domain"),
    ]
    for function, name in test:
        runtest_error(function, name)


def test_repair_running_example() -> None:
    pta = load_model(os.path.join(MODELS_DIR, "running_example.pta.json"))
    oracle = load_model(os.path.join(MODELS_DIR, "re_oracle.ta.json"))
    constraint = replay_tw(pta, TimedWord.of([("a", 1), ("c", 5)]))
    v_rep, ta_rep = repair(pta, constraint, values(p2=2, p3=3, p4=4))
    assert v_rep == values(p2=0, p3=3, p4=4)
    assert ta_rep == oracle


def test_instantiate_is_nearest() -> None:
    rng = random.Random(31)
    names = ["p", "q"]
    config = RepairConfig(box={name: (Fraction(0), Fraction(6)) for name in names})
    lattice = [values(p=p, q=q) for p in range(7) for q in range(7)]
    templates = [
        "p + q >= {c}",
        "p >= {a} & q <= {b}",
        "p < {a} | q > {b}",
        "2*p + q > {c} & q < {b}",
        "p + 2*q <= {c} & p >= {a}",
        "p = {a} | q = {b}",
    ]
    for _ in range(60):
        text = rng.choice(templates).format(
            a=rng.randint(0, 6), b=rng.randint(0, 6), c=rng.randint(0, 12)
        )
        constraint = phi(text, names)
        v_init = values(p=rng.randint(0, 6), q=rng.randint(0, 6))
        feasible = [
            v
            for v in lattice
            if constraint.contains_point({param(name): v[name] for name in names})
        ]
        if not feasible:
            try:
                instantiate(constraint, v_init, names, config)
            except SearchError as err:
                assert err.name in ("empty-constraint", "no-solution-in-box")
                continue
            assert False and "No error caught"
        best = min(l1_distance(v, v_init, names) for v in feasible)
        expected = min(
            (v for v in feasible if l1_distance(v, v_init, names) == best),
            key=lambda v: (v["p"], v["q"]),
        )
        assert instantiate(constraint, v_init, names, config) == expected
