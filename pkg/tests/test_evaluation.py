import os
import random
from fractions import Fraction
from typing import Callable

from tarepair.errors import EvaluationError, ModelError, PolyhedronError, RepairError
from tarepair.evaluation import (
    BENCHMARKS,
    MODELS_DIR,
    EvalReport,
    format_percentage,
    format_table,
    gen_sc_testdata,
    load_sc_words,
    oracle_valuation,
    run_experiment,
    run_pipeline,
    sc_words_to_jsonl,
    semantic_conformance,
    syntactic_distance,
)
from tarepair.model import Edge, Ta, TimedWord, load_model
from tarepair.oracle import TaBacked, failing_tests
from tarepair.polyhedra import ConvexPolyhedron
from tarepair.semantics import member
from tarepair.session import PipelineConfig
from tarepair.synthesis import replay_tw

PTA = load_model(os.path.join(MODELS_DIR, "running_example.pta.json"))
TA = load_model(os.path.join(MODELS_DIR, "running_example.ta.json"))
ORACLE = load_model(os.path.join(MODELS_DIR, "re_oracle.ta.json"))
ALT_ORACLE = load_model(os.path.join(MODELS_DIR, "alt_oracle.ta.json"))
SC_WORDS = os.path.join(MODELS_DIR, "re.sc_words.jsonl")


def word(*pairs: tuple) -> TimedWord:  # type: ignore
    return TimedWord.of(pairs)


def values(**kwargs: object) -> dict:  # type: ignore
    return {name: Fraction(value) for name, value in kwargs.items()}  # type: ignore


def small_config() -> PipelineConfig:
    cfg = PipelineConfig()
    cfg.sc_budget = 30
    cfg.sc_depth = 3
    return cfg


def runtest_error(function: Callable[[], object], error_name: str) -> None:
    try:
        function()
    except EvaluationError as err:
        assert err.name == error_name
        return
    assert False and "No error caught"


def test_syntactic_distance() -> None:
    assert syntactic_distance(values(p=1, q=3), values(p=2, q=1)) == 3
    assert syntactic_distance(values(p=Fraction(1, 2)), values(p=0)) == Fraction(1, 2)
    assert syntactic_distance({}, {}) == 0
    runtest_error(
        lambda: syntactic_distance(values(p=1), values(q=1)), "parameter-mismatch"
    )


def test_syntactic_distance_is_a_metric() -> None:
    rng = random.Random(4)

    def sample() -> dict:  # type: ignore
        return {name: Fraction(rng.randint(0, 40), rng.randint(1, 4)) for name in "pqr"}

    for _ in range(50):
        u, v, w = sample(), sample(), sample()
        assert syntactic_distance(u, u) == 0
        assert syntactic_distance(u, v) == syntactic_distance(v, u)
        assert syntactic_distance(u, w) <= syntactic_distance(u, v) + syntactic_distance(v, w)


def test_oracle_valuation() -> None:
    assert oracle_valuation(PTA, ORACLE) == values(p2=0, p3=3, p4=4)
    assert oracle_valuation(PTA, TA) == values(p2=2, p3=3, p4=4)
    # different alphabet and edges
    assert oracle_valuation(PTA, ALT_ORACLE) is None
    assert oracle_valuation(PTA, PTA) is None


def test_semantic_conformance() -> None:
    words = [word(("a", Fraction(1, 2)), ("c", 5)), word(("a", 3), ("c", 5))]
    assert semantic_conformance(TA, ORACLE, words) == 50
    assert semantic_conformance(TA, TA, words) == 100
    assert semantic_conformance(ORACLE, ORACLE, words, require_accepting=True) == 100

    accept_all = Ta.build(["a"], ["l"], "l", ["x"], [Edge(1, "l", "l", "a")])
    reject_all = Ta.build(["a"], ["l"], "l", ["x"], [])
    words = [word(("a", 1)), word(("a", 2), ("a", 3))]
    assert semantic_conformance(accept_all, reject_all, words) == 0
    runtest_error(lambda: semantic_conformance(TA, ORACLE, []), "empty-test-set")


def test_gen_sc_testdata() -> None:
    words = gen_sc_testdata(TA, ORACLE, seed=3, budget=25, depth=3)
    again = gen_sc_testdata(TA, ORACLE, seed=3, budget=25, depth=3)
    assert sc_words_to_jsonl(words) == sc_words_to_jsonl(again)
    assert 0 < len(words) <= 25
    assert len(set(words)) == len(words)
    for timed_word in words:
        assert list(timed_word.timestamps) == sorted(timed_word.timestamps)
    # every sampled word is a run of one automaton or one step past it
    for timed_word in words:
        prefix = TimedWord(timed_word.steps[:-1])
        assert any(member(ta, prefix) for ta in (TA, ORACLE))
    assert gen_sc_testdata(TA, ORACLE, budget=0) == []


def test_frozen_sc_words() -> None:
    words = load_sc_words(SC_WORDS)
    assert len(words) == 20
    with open(SC_WORDS, "r", encoding="utf-8") as file:
        assert sc_words_to_jsonl(words) == file.read()
    # four words tell the guards x > 2 and x > 0 of the a-edge to l4 apart
    disagree = [w for w in words if member(TA, w) != member(ORACLE, w)]
    assert [str(w) for w in disagree] == [
        "(a, 1)(c, 5)",
        "(a, 1/2)(c, 5)",
        "(a, 2)(c, 5)",
        "(a, 1)(c, 6)",
    ]
    assert semantic_conformance(TA, ORACLE, words) == 80
    assert semantic_conformance(ORACLE, ORACLE, words) == 100
    assert format_percentage(semantic_conformance(TA, ORACLE, words)) == "80.00"


def test_load_sc_words_errors(tmp_path) -> None:  # type: ignore
    empty = tmp_path / "empty.jsonl"
    empty.write_text("\n")
    test = [
        (str(tmp_path / "missing.jsonl"), ModelError, "unreadable-file"),
        (str(empty), EvaluationError, "empty-test-set"),
    ]
    for path, kind, name in test:
        try:
            load_sc_words(path)
        except kind as err:
            assert err.name == name
            continue
        assert False and "No error caught"


def test_format_percentage() -> None:
    test = [
        (Fraction(100), "100.00"),
        (Fraction(200, 3), "66.67"),
        (Fraction(1, 3), "0.33"),
        (Fraction(0), "0.00"),
        (None, "N/A"),
    ]
    for value, expected in test:
        assert format_percentage(value) == expected


def test_pipeline_correct_model() -> None:
    cfg = small_config()
    cfg.depth = 2
    result = run_pipeline(TA, TaBacked(TA), cfg)
    assert result.considered_correct
    assert result.stage == "label"
    assert result.failing == []
    assert result.v_rep == result.v_init
    assert result.ta_rep is TA
    assert result.phi is None
    assert set(result.timings) == {"abstract", "epzg", "gen-tests", "label"}
    assert ("considered-correct", "no failing test, the initial automaton is kept") in (
        result.warnings
    )


def test_pipeline_running_example() -> None:
    cfg = small_config()
    cfg.depth = 2
    cfg.strategy = "manual:" + os.path.join(MODELS_DIR, "re.map.json")
    result = run_pipeline(TA, TaBacked(ORACLE), cfg)
    assert not result.considered_correct
    assert result.stage == "repair"
    assert result.v_init == values(p2=2, p3=3, p4=4)
    assert result.v_rep == values(p2=0, p3=3, p4=4)
    assert result.ta_rep == ORACLE
    assert result.failing
    # the repaired automaton agrees with every verdict
    assert failing_tests(result.suite, result.ta_rep) == []  # type: ignore
    assert result.phi is not None and not result.phi.is_empty()
    assert "horizon-substituted" in [name for name, _ in result.warnings]


def test_benchmarks() -> None:
    assert sorted(BENCHMARKS) == ["RE", "RE_do"]
    assert BENCHMARKS["RE"].paths("models") == (
        os.path.join("models", "running_example.ta.json"),
        "manual:" + os.path.join("models", "re.map.json"),
        os.path.join("models", "re_oracle.ta.json"),
    )
    assert BENCHMARKS["RE"].sc_words_path("models") == os.path.join(
        "models", "re.sc_words.jsonl"
    )
    assert BENCHMARKS["RE_do"].sc_words_path() is None


def test_experiment_running_example() -> None:
    for policy in ["minmax1", "minmax2", "minmax4"]:
        report = run_experiment(BENCHMARKS["RE"], policy, 2, small_config())
        assert report.stage_failed is None
        assert report.exit_code == 0
        assert report.v_init == values(p2=2, p3=3, p4=4)
        assert report.v_rep == values(p2=0, p3=3, p4=4)
        assert report.sd_init == 2
        assert report.sd_rep == 0
        # measured on the frozen word set
        assert report.sc_init == 80
        assert report.sc_rep == 100
        assert 0 < report.failing <= report.tests
        data = report.to_json()
        assert data["policy"] == policy
        assert data["sc_init"] == "80.00"
        assert data["sc_rep"] == "100.00"
        assert data["v_rep"] == {"p2": 0, "p3": 3, "p4": 4}
        assert data["stage_failed"] is None
        assert report.cells()[-1] == "repaired"

    cfg = small_config()
    cfg.sc_frozen = False
    sampled = run_experiment(BENCHMARKS["RE"], "minmax1", 2, cfg)
    assert sampled.sc_rep == 100
    assert sampled.sc_init is not None and 0 <= sampled.sc_init <= 100


def test_atom_cap_is_scoped() -> None:
    cfg = small_config()
    cfg.depth = 2
    cfg.strategy = "manual:" + os.path.join(MODELS_DIR, "re.map.json")
    cfg.atom_cap = 3
    try:
        run_pipeline(TA, TaBacked(ORACLE), cfg)
    except PolyhedronError as err:
        assert err.name == "atom-cap"
    except RepairError:
        # a partial zone graph may leave some stage without a solution
        pass
    assert ConvexPolyhedron.atom_cap == PipelineConfig.atom_cap
    assert not replay_tw(PTA, word(("a", 1), ("c", 5))).is_empty()

    cfg.atom_cap = PipelineConfig.atom_cap
    result = run_pipeline(TA, TaBacked(ORACLE), cfg)
    assert result.v_rep == values(p2=0, p3=3, p4=4)
    assert ConvexPolyhedron.atom_cap == PipelineConfig.atom_cap


def test_experiment_insufficient_abstraction() -> None:
    strict = run_experiment(BENCHMARKS["RE_do"], "minmax1", 2, small_config())
    assert strict.stage_failed == "synth"
    assert strict.exit_code == 2
    assert strict.error is not None and strict.error.startswith("abstraction-insufficient")
    assert strict.sd_init is None and strict.sc_rep is None
    assert "synth" not in strict.timings
    assert strict.cells()[-1] == "failed at synth"

    cfg = small_config()
    cfg.mode = "greedy"
    greedy = run_experiment(BENCHMARKS["RE_do"], "minmax1", 2, cfg)
    assert greedy.stage_failed is None
    assert greedy.mode == "greedy"
    assert greedy.v_rep == values(p2=0, p3=5, p4=4)
    assert greedy.discarded == 4
    # the oracle has another structure, only SC is defined
    assert greedy.sd_init is None and greedy.sd_rep is None
    assert greedy.sc_rep is not None

    table = format_table([strict, greedy])
    lines = table.splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("bench")
    assert set(lines[1]) <= {"-", "+"}
    assert lines[2].split(" | ")[0].strip() == "RE_do"
    assert greedy.format_row() == format_table([greedy]).splitlines()[-1]


def test_missing_benchmark_files(tmp_path) -> None:  # type: ignore
    report = run_experiment(BENCHMARKS["RE"], "minmax1", 2, small_config(), str(tmp_path))
    assert report.stage_failed == "load"
    assert report.exit_code == 1
    assert report.error is not None and report.error.startswith("unreadable-file")
    assert EvalReport("x", "minmax1", 2, "strict").total_time == 0
