"""
Metrics and experiment harness

It contains:
- functions syntactic_distance and oracle_valuation
- functions gen_sc_testdata, semantic_conformance and format_percentage
- functions load_sc_words and sc_words_to_jsonl: frozen conformance word sets
- class PipelineResult and function run_pipeline: abstraction, zone graph,
  test generation, labeling, constraint synthesis and repair in a row
- class Benchmark and the BENCHMARKS registry (models/ directory)
- class EvalReport and function run_experiment
"""

import copy
import logging
import math
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (
    TYPE_CHECKING,
    Any,
    Callable,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
)

from .defs import format_fraction, json_number
from .errors import EXIT_SUCCESS, EvaluationError, ModelError, RepairError
from .model import (
    ParamValuation,
    Pta,
    Ta,
    TimedWord,
    abstract_guards,
    format_valuation,
    load_model,
    parse_abstraction,
    valuation_to_json,
)
from .oracle import OracleBackend, TaBacked, Test, TestSuite, failing_tests, label_tests
from .polyhedra import PolyUnion, RationalInterval, atom_cap_limit
from .repair import RepairConfig, repair
from .semantics import Epzg, build_epzg, member, path_witness
from .synthesis import gen_constraints, gen_constraints_greedy
from .testgen import Policy, TestData, generate_test_data

if TYPE_CHECKING:
    from .session import PipelineConfig

logger = logging.getLogger(__name__)

MODELS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "models")

STAGES = ("abstract", "epzg", "gen-tests", "label", "synth", "repair")

SAMPLE_GRANULARITY = 100
SAMPLE_HORIZON = Fraction(20)


# ===============================================
# Syntactic distance
# ===============================================


def syntactic_distance(v: Mapping[str, Fraction], v_o: Mapping[str, Fraction]) -> Fraction:
    """sum of |v(p) - v_o(p)| over the parameters"""
    if set(v) != set(v_o):
        raise EvaluationError(
            "parameter-mismatch",
            "valuations over different parameters: {} and {}".format(
                ", ".join(sorted(v)), ", ".join(sorted(v_o))
            ),
        )
    return sum((abs(v[name] - v_o[name]) for name in v), Fraction(0))


def oracle_valuation(pta: Pta, oracle: Pta) -> Optional[ParamValuation]:
    """the valuation v with pta[v] = oracle, None when the oracle
    does not share the structure of pta"""
    if (
        oracle.is_parametric
        or set(pta.locations) != set(oracle.locations)
        or pta.initial != oracle.initial
        or set(pta.alphabet) != set(oracle.alphabet)
        or set(pta.clocks) != set(oracle.clocks)
        or len(pta.edges) != len(oracle.edges)
    ):
        return None
    pairs = [(pta.invariant(loc).atoms, oracle.invariant(loc).atoms) for loc in pta.locations]
    for edge in pta.edges:
        other = next((e for e in oracle.edges if e.id == edge.id), None)
        if other is None or (edge.source, edge.target, edge.action, edge.resets) != (
            other.source,
            other.target,
            other.action,
            other.resets,
        ):
            return None
        pairs.append((edge.guard.atoms, other.guard.atoms))
    valuation: ParamValuation = {}
    for atoms, others in pairs:
        if len(atoms) != len(others):
            return None
        for atom, other in zip(atoms, others):
            if atom.clock != other.clock or atom.rel != other.rel:
                return None
            value = other.rhs.constant
            expr = atom.rhs
            if expr.is_constant:
                if expr.constant != value:
                    return None
                continue
            if len(expr.coeffs) != 1:
                return None
            ((name, coeff),) = expr.coeffs
            solved = (value - expr.constant) / coeff
            if solved < 0 or valuation.setdefault(name, solved) != solved:
                return None
    if set(valuation) != set(pta.parameters):
        return None
    return valuation


# ===============================================
# Semantic conformance
# ===============================================


def _random_choice(rng: random.Random) -> Callable[[RationalInterval], Fraction]:
    def choose(interval: RationalInterval) -> Fraction:
        low = interval.lower if interval.lower is not None else Fraction(0)
        high = interval.upper if interval.upper is not None else low + SAMPLE_HORIZON
        first = math.ceil(low * SAMPLE_GRANULARITY)
        last = math.floor(high * SAMPLE_GRANULARITY)
        if first <= last:
            value = Fraction(rng.randint(first, last), SAMPLE_GRANULARITY)
            if interval.contains(value):
                return value
        return interval.witness()

    return choose


def _random_walk(graph: Epzg, length: int, rng: random.Random) -> List[int]:
    node = graph.root
    edges: List[int] = []
    while len(edges) < length:
        children = graph.children(node)
        if not children:
            break
        edge, node = rng.choice(children)
        edges.append(edge)
    return edges


def _forbidden_extension(
    source: Ta, word: TimedWord, rng: random.Random, require_accepting: bool, attempts: int = 10
) -> Optional[TimedWord]:
    """word followed by one (action, time) that source rejects"""
    last = word.timestamps[-1] if word.steps else Fraction(0)
    actions = sorted(source.alphabet)
    for _ in range(attempts):
        steps = rng.randint(0, int(SAMPLE_HORIZON) * SAMPLE_GRANULARITY)
        delay = Fraction(steps, SAMPLE_GRANULARITY)
        extended = word.extend(rng.choice(actions), last + delay)
        if not member(source, extended, require_accepting):
            return extended
    return None


def gen_sc_testdata(
    ta: Ta,
    ta_o: Ta,
    seed: int = 0,
    budget: int = 200,
    depth: int = 4,
    require_accepting: bool = False,
) -> List[TimedWord]:
    """Words sampled by random walks over the zone graphs of ta and ta_o in turn,
    each followed by a negative word extending it with a transition
    its source automaton rejects. At most budget distinct words"""
    rng = random.Random(seed)
    sources = [(ta, build_epzg(ta, depth)), (ta_o, build_epzg(ta_o, depth))]
    words: List[TimedWord] = []
    seen: Set[TimedWord] = set()

    def add(word: Optional[TimedWord]) -> None:
        if word is not None and word not in seen and len(words) < budget:
            seen.add(word)
            words.append(word)

    attempts = 0
    while len(words) < budget and attempts < 20 * budget:
        source, graph = sources[attempts % 2]
        attempts += 1
        edges = _random_walk(graph, rng.randint(1, max(depth, 1)), rng)
        if not edges:
            continue
        positive = path_witness(source, [source.edge(e) for e in edges], choose=_random_choice(rng))
        if positive is None or not member(source, positive, require_accepting):
            continue
        add(positive)
        add(_forbidden_extension(source, positive, rng, require_accepting))
    logger.info("sampled {} conformance word(s) with seed {}".format(len(words), seed))
    return words


def semantic_conformance(
    ta: Ta, ta_o: Ta, td: Sequence[TimedWord], require_accepting: bool = False
) -> Fraction:
    """percentage of td on which ta and ta_o agree"""
    if not td:
        raise EvaluationError("empty-test-set", "conformance is undefined on an empty word set")
    agree = sum(
        1
        for word in td
        if member(ta, word, require_accepting) == member(ta_o, word, require_accepting)
    )
    return Fraction(100 * agree, len(td))


def format_percentage(value: Optional[Fraction]) -> str:
    """two decimals, N/A for None"""
    if value is None:
        return "N/A"
    hundredths = round(value * 100)
    return "{}.{:02d}".format(hundredths // 100, hundredths % 100)


def load_sc_words(path: str) -> List[TimedWord]:
    """a frozen conformance word set, one {"word": ...} object per line"""
    try:
        with open(path, "r", encoding="utf-8") as file:
            text = file.read()
    except OSError as err:
        raise ModelError("unreadable-file", "cannot read {}: {}".format(path, err.strerror))
    words = list(TestData.from_jsonl(text).words)
    if not words:
        raise EvaluationError("empty-test-set", "{} holds no conformance word".format(path))
    return words


def sc_words_to_jsonl(words: Sequence[TimedWord]) -> str:
    return TestData(tuple(words)).to_jsonl()


# ===============================================
# Pipeline
# ===============================================


@dataclass
class PipelineResult:
    """Everything a run produced. stage is the last stage started,
    the failing one when the run raised"""

    stage: str = ""
    pta: Optional[Pta] = None
    v_init: ParamValuation = field(default_factory=dict)
    epzg: Optional[Epzg] = None
    test_data: Optional[TestData] = None
    suite: Optional[TestSuite] = None
    failing: List[Test] = field(default_factory=list)
    phi: Optional[PolyUnion] = None
    discarded: List[TimedWord] = field(default_factory=list)
    v_rep: ParamValuation = field(default_factory=dict)
    ta_rep: Optional[Ta] = None
    considered_correct: bool = False
    timings: Dict[str, float] = field(default_factory=dict)
    warnings: List[Tuple[str, str]] = field(default_factory=list)

    def start(self: "PipelineResult", stage: str) -> float:
        self.stage = stage
        logger.info("stage {}".format(stage))
        return time.perf_counter()

    def stop(self: "PipelineResult", started: float) -> None:
        self.timings[self.stage] = time.perf_counter() - started


def repair_config(cfg: "PipelineConfig") -> RepairConfig:
    return RepairConfig(cfg.repair_domain, cfg.granularity, None, cfg.max_iterations)


def run_pipeline(
    ta_init: Ta,
    oracle: OracleBackend,
    cfg: "PipelineConfig",
    result: Optional[PipelineResult] = None,
) -> PipelineResult:
    """runs every stage on ta_init against oracle.
    Stops after labeling when ta_init fails no test (v_rep = v_init).
    Errors propagate, result.stage names the failing stage"""
    if result is None:
        result = PipelineResult()
    with atom_cap_limit(cfg.atom_cap):
        _run_stages(ta_init, oracle, cfg, result)
    return result


def _run_stages(
    ta_init: Ta, oracle: OracleBackend, cfg: "PipelineConfig", result: PipelineResult
) -> None:
    started = result.start("abstract")
    strategy, manual_map = parse_abstraction(cfg.strategy)
    pta, v_init = abstract_guards(
        ta_init, strategy, manual_map, cfg.abstract_invariant_only_constants
    )
    result.pta, result.v_init = pta, v_init
    result.stop(started)

    started = result.start("epzg")
    result.epzg = build_epzg(pta, cfg.depth, cfg.merge_states)
    if result.epzg.incomplete:
        result.warnings.append(
            ("partial-epzg", "zone graph is partial:\n" + "\n".join(result.epzg.diagnostics))
        )
    result.stop(started)

    started = result.start("gen-tests")
    policy = Policy.parse(cfg.policy, cfg.seed, cfg.samples_per_state)
    result.test_data = generate_test_data(
        result.epzg, policy, cfg.depth, cfg.path_cap, cfg.horizon, cfg.include_empty_word
    )
    if result.test_data.substituted:
        result.warnings.append(
            (
                "horizon-substituted",
                "horizon {} used for states entered at unbounded times: {}".format(
                    format_fraction(cfg.horizon),
                    ", ".join("s{}".format(node + 1) for node in result.test_data.substituted),
                ),
            )
        )
    result.stop(started)

    started = result.start("label")
    result.suite = label_tests(result.test_data, oracle)
    result.failing = failing_tests(result.suite, ta_init, cfg.require_accepting)
    result.stop(started)
    if not result.failing:
        result.considered_correct = True
        result.v_rep = dict(v_init)
        result.ta_rep = ta_init
        result.warnings.append(
            ("considered-correct", "no failing test, the initial automaton is kept")
        )
        return

    started = result.start("synth")
    if cfg.mode == "greedy":
        result.phi, result.discarded = gen_constraints_greedy(pta, result.suite)
        if result.discarded:
            result.warnings.append(
                (
                    "discarded-tests",
                    "{} test(s) discarded:\n{}".format(
                        len(result.discarded), "\n".join(str(w) for w in result.discarded)
                    ),
                )
            )
    else:
        result.phi = gen_constraints(pta, result.suite)
    result.stop(started)

    started = result.start("repair")
    result.v_rep, result.ta_rep = repair(pta, result.phi, v_init, repair_config(cfg))
    result.stop(started)
    logger.info(
        "repaired {} into {}".format(
            format_valuation(v_init, pta.parameters), format_valuation(result.v_rep, pta.parameters)
        )
    )


# ===============================================
# Benchmarks and reports
# ===============================================


@dataclass(frozen=True)
class Benchmark:
    """an initial automaton, its abstraction and an oracle automaton,
    file names relative to a models directory"""

    name: str
    model: str
    abstraction: str
    oracle: str
    description: str = ""
    sc_words: Optional[str] = None

    def paths(self: "Benchmark", models_dir: str = MODELS_DIR) -> Tuple[str, str, str]:
        """(model path, abstraction spec, oracle path)"""
        abstraction = self.abstraction
        if abstraction.startswith("manual:"):
            abstraction = "manual:" + os.path.join(models_dir, abstraction[len("manual:") :])
        return (
            os.path.join(models_dir, self.model),
            abstraction,
            os.path.join(models_dir, self.oracle),
        )

    def sc_words_path(self: "Benchmark", models_dir: str = MODELS_DIR) -> Optional[str]:
        """the frozen conformance word set, None when SC words are sampled"""
        if self.sc_words is None:
            return None
        return os.path.join(models_dir, self.sc_words)


BENCHMARKS: Dict[str, Benchmark] = {
    bench.name: bench
    for bench in (
        Benchmark(
            "RE",
            "running_example.ta.json",
            "manual:re.map.json",
            "re_oracle.ta.json",
            "running example against an oracle of the same structure",
            "re.sc_words.jsonl",
        ),
        Benchmark(
            "RE_do",
            "running_example.ta.json",
            "manual:re.map.json",
            "alt_oracle.ta.json",
            "running example against an oracle of a different structure",
        ),
    )
}


@dataclass
class EvalReport:
    """one experiment: timings in seconds per stage,
    SD and SC are None when not computable"""

    benchmark: str
    policy: str
    depth: int
    mode: str
    timings: Dict[str, float] = field(default_factory=dict)
    tests: int = 0
    failing: int = 0
    discarded: int = 0
    sd_init: Optional[Fraction] = None
    sd_rep: Optional[Fraction] = None
    sc_init: Optional[Fraction] = None
    sc_rep: Optional[Fraction] = None
    v_init: ParamValuation = field(default_factory=dict)
    v_rep: ParamValuation = field(default_factory=dict)
    considered_correct: bool = False
    stage_failed: Optional[str] = None
    error: Optional[str] = None
    exit_code: int = EXIT_SUCCESS

    @property
    def total_time(self: "EvalReport") -> float:
        return sum(self.timings.values())

    def to_json(self: "EvalReport") -> Dict[str, Any]:
        def number(value: Optional[Fraction]) -> Any:
            return None if value is None else json_number(value)

        return {
            "benchmark": self.benchmark,
            "policy": self.policy,
            "depth": self.depth,
            "mode": self.mode,
            "timings": {
                stage: round(self.timings[stage], 3) for stage in STAGES if stage in self.timings
            },
            "tests": self.tests,
            "failing": self.failing,
            "discarded": self.discarded,
            "sd_init": number(self.sd_init),
            "sd_rep": number(self.sd_rep),
            "sc_init": None if self.sc_init is None else format_percentage(self.sc_init),
            "sc_rep": None if self.sc_rep is None else format_percentage(self.sc_rep),
            "v_init": valuation_to_json(self.v_init),
            "v_rep": valuation_to_json(self.v_rep),
            "considered_correct": self.considered_correct,
            "stage_failed": self.stage_failed,
            "error": self.error,
            "exit_code": self.exit_code,
        }

    def cells(self: "EvalReport") -> List[str]:
        def seconds(*stages: str) -> str:
            if not any(stage in self.timings for stage in stages):
                return "-"
            return "{:.2f}".format(sum(self.timings.get(stage, 0.0) for stage in stages))

        def distance(value: Optional[Fraction]) -> str:
            return "N/A" if value is None else format_fraction(value)

        if self.stage_failed is not None:
            outcome = "failed at {}".format(self.stage_failed)
        elif self.considered_correct:
            outcome = "correct"
        else:
            outcome = "repaired"
        return [
            self.benchmark,
            self.policy,
            str(self.depth),
            self.mode,
            "{:.2f}".format(self.total_time),
            seconds("abstract", "epzg", "gen-tests"),
            seconds("label"),
            seconds("synth"),
            seconds("repair"),
            "{}/{}".format(self.failing, self.tests),
            distance(self.sd_init),
            distance(self.sd_rep),
            format_percentage(self.sc_init),
            format_percentage(self.sc_rep),
            str(self.discarded),
            outcome,
        ]

    def format_row(self: "EvalReport") -> str:
        return format_table([self]).splitlines()[-1]


REPORT_HEADER = [
    "bench",
    "policy",
    "K",
    "mode",
    "total (s)",
    "tests (s)",
    "oracle (s)",
    "synth (s)",
    "repair (s)",
    "failed/tests",
    "SD init",
    "SD rep",
    "SC init (%)",
    "SC rep (%)",
    "discarded",
    "outcome",
]


def format_table(reports: Sequence[EvalReport]) -> str:
    """aligned text table, one row per report"""
    rows = [REPORT_HEADER] + [report.cells() for report in reports]
    widths = [max(len(row[column]) for row in rows) for column in range(len(REPORT_HEADER))]
    lines = [
        " | ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in rows
    ]
    lines.insert(1, "-+-".join("-" * width for width in widths))
    return "\n".join(lines) + "\n"


def run_experiment(
    bench: Benchmark,
    policy: str,
    depth: int,
    cfg: "PipelineConfig",
    models_dir: str = MODELS_DIR,
) -> EvalReport:
    """runs the pipeline of bench with policy at depth and measures it.
    Errors are recorded in the report with the stage that raised them"""
    cfg = copy.copy(cfg)
    cfg.policy = policy
    cfg.depth = depth
    model_path, abstraction, oracle_path = bench.paths(models_dir)
    cfg.strategy = abstraction
    report = EvalReport(bench.name, policy, depth, cfg.mode)
    result = PipelineResult()
    try:
        result.stage = "load"
        ta_init = load_model(model_path)
        ta_o = load_model(oracle_path)
        if ta_init.is_parametric or ta_o.is_parametric:
            raise EvaluationError(
                "parametric-benchmark", "benchmark {} needs timed automata".format(bench.name)
            )
        assert isinstance(ta_init, Ta) and isinstance(ta_o, Ta)
        sc_path = bench.sc_words_path(models_dir)
        td = load_sc_words(sc_path) if sc_path is not None and cfg.sc_frozen else None
        with TaBacked(ta_o, cfg.require_accepting) as oracle:
            run_pipeline(ta_init, oracle, cfg, result)
        result.stage = "eval"
        fill_metrics(report, result, ta_init, ta_o, cfg, td)
    except RepairError as err:
        report.stage_failed = result.stage
        report.error = "{}: {}".format(err.name, err.message.splitlines()[0])
        report.exit_code = err.exit_code
        logger.warning("{} failed at {}: {}".format(bench.name, result.stage, err.message))
    finally:
        report.timings = dict(result.timings)
    return report


def fill_metrics(
    report: EvalReport,
    result: PipelineResult,
    ta_init: Ta,
    ta_o: Optional[Ta],
    cfg: "PipelineConfig",
    td: Optional[Sequence[TimedWord]] = None,
) -> None:
    """copies counts from result into report, with SD and SC when
    the oracle automaton ta_o is known. SC is measured on td,
    or on words sampled by gen_sc_testdata when td is None"""
    assert result.pta is not None and result.suite is not None and result.ta_rep is not None
    report.tests = len(result.suite)
    report.failing = len(result.failing)
    report.discarded = len(result.discarded)
    report.v_init = dict(result.v_init)
    report.v_rep = dict(result.v_rep)
    report.considered_correct = result.considered_correct
    if ta_o is None:
        return
    v_o = oracle_valuation(result.pta, ta_o)
    if v_o is not None:
        report.sd_init = syntactic_distance(result.v_init, v_o)
        report.sd_rep = syntactic_distance(result.v_rep, v_o)
    if td is None:
        td = gen_sc_testdata(
            ta_init, ta_o, cfg.seed, cfg.sc_budget, cfg.sc_depth, cfg.require_accepting
        )
    if td:
        report.sc_init = semantic_conformance(ta_init, ta_o, td, cfg.require_accepting)
        report.sc_rep = semantic_conformance(result.ta_rep, ta_o, td, cfg.require_accepting)
    else:
        result.warnings.append(("empty-sc-set", "no conformance word sampled, SC is N/A"))
