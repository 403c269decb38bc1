"""
Definitions of the default subcommands, one per pipeline step
and the composed pipeline and eval

Every step reads and writes the files of a pipeline output directory:
    01_pta.json 01_v_init.json  abstraction
    02_epzg.json                zone graph
    03_testdata.jsonl           test words
    04_testsuite.json           labeled tests
    05_phi.txt 05_phi.json      parameter constraint
    06_ta_rep.json 06_v_rep.json repaired automaton
    report.json report.txt      metrics
"""
import os
from typing import Callable, List, Optional, Sequence, TypeVar

from .constraints import union_from_json, union_to_json
from .defs import ArgumentParserNoExit, format_fraction
from .errors import EXIT_SUCCESS, ModelError, RepairError
from .evaluation import (
    BENCHMARKS,
    MODELS_DIR,
    EvalReport,
    PipelineResult,
    fill_metrics,
    format_table,
    gen_sc_testdata,
    load_sc_words,
    repair_config,
    run_experiment,
    run_pipeline,
    sc_words_to_jsonl,
)
from .model import (
    Pta,
    Ta,
    TimedWord,
    abstract_guards,
    dump_model,
    format_valuation,
    load_model,
    load_valuation,
    parse_abstraction,
    read_json,
    valuation_to_json,
    write_json,
)
from .oracle import TaBacked, TestSuite, failing_tests, label_tests, make_oracle
from .polyhedra import PolyUnion, atom_cap_limit
from .repair import l1_distance, repair
from .semantics import Epzg, build_epzg, parameter_variables
from .session import Command, Session
from .synthesis import gen_constraints, gen_constraints_greedy
from .testgen import Policy, TestData, generate_test_data

PTA_FILE = "01_pta.json"
V_INIT_FILE = "01_v_init.json"
EPZG_FILE = "02_epzg.json"
TESTDATA_FILE = "03_testdata.jsonl"
SUITE_FILE = "04_testsuite.json"
PHI_FILE = "05_phi"
TA_REP_FILE = "06_ta_rep.json"
V_REP_FILE = "06_v_rep.json"
REPORT_FILE = "report"

T = TypeVar("T")


# ============================================================
# file helpers
# ============================================================


def read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as file:
            return file.read()
    except OSError as err:
        raise ModelError("unreadable-file", "cannot read {}: {}".format(path, err.strerror))


def write_text(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as file:
            file.write(text)
    except OSError as err:
        raise ModelError("unwritable-file", "cannot write {}: {}".format(path, err.strerror))


def load_input(
    session: Session, description: str, path: str, reader: Callable[[str], T]
) -> T:
    """reads path with reader, errors are traced back to the file"""
    session.context.new(description, path)
    try:
        return reader(path)
    except RepairError as error:
        if not error.trace:
            error.trace = session.context.trace()
        raise
    finally:
        session.context.pop()


def load_ta(path: str) -> Ta:
    """loads a model that must have no parameters"""
    model = load_model(path)
    if not isinstance(model, Ta):
        raise ModelError(
            "parametric-automaton",
            "{} has parameters {}, a timed automaton is expected".format(
                path, ", ".join(model.parameters)
            ),
        )
    return model


def load_pta(path: str) -> Pta:
    return load_model(path)


def write_phi(prefix: str, phi: PolyUnion, discarded: Sequence[TimedWord] = ()) -> None:
    """writes prefix.txt (readable) and prefix.json"""
    write_text(prefix + ".txt", str(phi.simplify()) + "\n")
    data = union_to_json(phi)
    data["discarded"] = [word.to_json() for word in discarded]
    write_json(prefix + ".json", data)


def write_artifacts(directory: str, result: PipelineResult) -> None:
    """writes every artifact result holds into directory"""
    if result.pta is not None:
        dump_model(result.pta, os.path.join(directory, PTA_FILE))
        write_json(
            os.path.join(directory, V_INIT_FILE),
            valuation_to_json(result.v_init, result.pta.parameters),
        )
    if result.epzg is not None:
        write_json(os.path.join(directory, EPZG_FILE), result.epzg.to_json())
    if result.test_data is not None:
        write_text(os.path.join(directory, TESTDATA_FILE), result.test_data.to_jsonl())
    if result.suite is not None:
        write_json(os.path.join(directory, SUITE_FILE), result.suite.to_json())
    if result.phi is not None:
        write_phi(os.path.join(directory, PHI_FILE), result.phi, result.discarded)
    if result.ta_rep is not None and result.pta is not None:
        dump_model(result.ta_rep, os.path.join(directory, TA_REP_FILE))
        write_json(
            os.path.join(directory, V_REP_FILE),
            valuation_to_json(result.v_rep, result.pta.parameters),
        )


def write_reports(directory: str, reports: List[EvalReport]) -> None:
    write_json(
        os.path.join(directory, REPORT_FILE + ".json"),
        {"reports": [report.to_json() for report in reports]},
    )
    write_text(os.path.join(directory, REPORT_FILE + ".txt"), format_table(reports))


def check_resolvable(session: Session, ta_path: Optional[str], oracle: Optional[str]) -> None:
    """every input file of a pipeline must exist before it starts"""
    if ta_path is None or oracle is None:
        session.send_error("missing-argument", "both --ta and --oracle are required")
        return
    paths = [ta_path]
    kind, _, target = oracle.partition(":")
    if not target:
        paths.append(oracle)
    elif kind in ("ta", "recorded"):
        paths.append(target)
    strategy, _, map_path = session.config.strategy.partition(":")
    if strategy == "manual" and map_path:
        paths.append(map_path)
    missing = [path for path in paths if not os.path.isfile(path)]
    if missing:
        session.send_error("missing-file", "file(s) not found: {}".format(", ".join(missing)))


# ============================================================
# pipeline steps
# ============================================================


class Cmd_Abstract(Command):
    parser = ArgumentParserNoExit(prog="abstract", add_help=False)
    parser.add_argument("--ta", required=True)
    parser.add_argument("--abstraction")
    parser.add_argument("--invariant-only", action="store_true")
    parser.add_argument("--out", "-o", default=PTA_FILE)
    parser.add_argument("--v-init", default=V_INIT_FILE)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        ta = load_input(session, "reading automaton", arguments.ta, load_ta)
        strategy, manual_map = parse_abstraction(config.strategy)
        pta, v_init = abstract_guards(
            ta, strategy, manual_map, config.abstract_invariant_only_constants
        )
        dump_model(pta, arguments.out)
        write_json(arguments.v_init, valuation_to_json(v_init, pta.parameters))
        print("parameters: {}".format(", ".join(pta.parameters) or "none"))
        print("v_init: {}".format(format_valuation(v_init, pta.parameters)))
        return EXIT_SUCCESS

    doc = """
        Replaces clock constants of a timed automaton by parameters.

        Usage: abstract --ta <model.json> [--abstraction <strategy>] [--invariant-only]
                        [-o 01_pta.json] [--v-init 01_v_init.json]
        Strategies are "all" (one parameter per constant occurrence),
        "shared-per-location" (default) and "manual:<map.json>" where the map
        gives a parameter name to occurrences like "edge:3:0" or "inv:l2:0".
        """


class Cmd_Epzg(Command):
    parser = ArgumentParserNoExit(prog="epzg", add_help=False)
    parser.add_argument("--pta", default=PTA_FILE)
    parser.add_argument("--depth", "-k", type=int)
    parser.add_argument("--no-merge", action="store_true")
    parser.add_argument("--atom-cap", type=int)
    parser.add_argument("--table", action="store_true")
    parser.add_argument("--zones", action="store_true")
    parser.add_argument("--out", "-o", default=EPZG_FILE)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        pta = load_input(session, "reading automaton", arguments.pta, load_pta)
        with atom_cap_limit(config.atom_cap):
            graph = build_epzg(pta, config.depth, config.merge_states)
        write_json(arguments.out, graph.to_json())
        if graph.incomplete:
            session.send_warning(
                "partial-epzg", "zone graph is partial:\n" + "\n".join(graph.diagnostics)
            )
        if arguments.table or arguments.zones:
            print(graph.format_table(arguments.zones))
        return EXIT_SUCCESS

    doc = """
        Builds the parametric zone graph of an automaton up to a depth,
        each state with its parameter constraint and the absolute times
        at which it can be entered.

        Usage: epzg [--pta 01_pta.json] [--depth <K>] [--no-merge] [--atom-cap <n>]
                    [--table] [--zones] [-o 02_epzg.json]
        """


class Cmd_GenTests(Command):
    parser = ArgumentParserNoExit(prog="gen-tests", add_help=False)
    parser.add_argument("--pta", default=PTA_FILE)
    parser.add_argument("--epzg", default=EPZG_FILE)
    parser.add_argument("--policy", "-p")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--cap", type=int)
    parser.add_argument("--horizon")
    parser.add_argument("--depth", "-k", type=int)
    parser.add_argument("--include-empty", action="store_true")
    parser.add_argument("--out", "-o", default=TESTDATA_FILE)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        pta = load_input(session, "reading automaton", arguments.pta, load_pta)
        graph = load_input(
            session,
            "reading zone graph",
            arguments.epzg,
            lambda path: Epzg.from_json(read_json(path), pta),
        )
        data = generate_test_data(
            graph,
            Policy.parse(config.policy, config.seed, config.samples_per_state),
            arguments.depth,
            config.path_cap,
            config.horizon,
            config.include_empty_word,
        )
        write_text(arguments.out, data.to_jsonl())
        if data.substituted:
            session.send_warning(
                "horizon-substituted",
                "horizon {} used for states entered at unbounded times: {}".format(
                    format_fraction(config.horizon),
                    ", ".join("s{}".format(node + 1) for node in data.substituted),
                ),
            )
        print("{} test word(s)".format(len(data)))
        return EXIT_SUCCESS

    doc = """
        Generates timed words along the paths of a zone graph.

        Usage: gen-tests [--pta 01_pta.json] [--epzg 02_epzg.json] [--policy <policy>]
                         [--seed <n>] [--samples <n>] [--cap <n>] [--horizon <H>]
                         [--depth <K>] [--include-empty] [-o 03_testdata.jsonl]
        Policies: minmax1 (bounds of the entry interval plus and minus one),
        minmax2 (and the midpoint), minmax4 (and the quarter points),
        random (--samples uniform times per state).
        """


class Cmd_Label(Command):
    parser = ArgumentParserNoExit(prog="label", add_help=False)
    parser.add_argument("--testdata", default=TESTDATA_FILE)
    parser.add_argument("--oracle", required=True)
    parser.add_argument("--timeout", type=float)
    parser.add_argument("--require-accepting", action="store_true")
    parser.add_argument("--ta")
    parser.add_argument("--out", "-o", default=SUITE_FILE)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        data = load_input(
            session,
            "reading test data",
            arguments.testdata,
            lambda path: TestData.from_jsonl(read_text(path)),
        )
        assert config.oracle is not None
        with make_oracle(config.oracle, config.oracle_timeout, config.require_accepting) as oracle:
            suite = label_tests(data, oracle)
        write_json(arguments.out, suite.to_json())
        print("{} accepted, {} rejected".format(len(suite.mba), len(suite.mbr)))
        if arguments.ta is not None:
            failing = failing_tests(suite, load_ta(arguments.ta), config.require_accepting)
            print("{}/{} failing test(s)".format(len(failing), len(suite)))
            for test in failing:
                print("  {} expected {}".format(test.word, "accept" if test.verdict else "reject"))
            if not failing:
                session.send_warning(
                    "considered-correct", "no failing test, the automaton needs no repair"
                )
        return EXIT_SUCCESS

    doc = """
        Asks an oracle the verdict on every test word, then keeps accepted words
        that are not prefixes of other accepted ones and rejected words
        with no rejected prefix.

        Usage: label --oracle <oracle> [--testdata 03_testdata.jsonl] [--timeout <s>]
                     [--require-accepting] [--ta <model.json>] [-o 04_testsuite.json]
        With --ta, lists the tests that model fails.
        Oracles are ta:<path>, exec:<command> or recorded:<path>, see --help.
        """


class Cmd_Synth(Command):
    parser = ArgumentParserNoExit(prog="synth", add_help=False)
    parser.add_argument("--pta", default=PTA_FILE)
    parser.add_argument("--suite", default=SUITE_FILE)
    parser.add_argument("--greedy", action="store_true")
    parser.add_argument("--atom-cap", type=int)
    parser.add_argument("--out", "-o", default=PHI_FILE)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        pta = load_input(session, "reading automaton", arguments.pta, load_pta)
        suite = load_input(
            session,
            "reading test suite",
            arguments.suite,
            lambda path: TestSuite.from_json(read_json(path)),
        )
        with atom_cap_limit(config.atom_cap):
            if config.mode == "greedy":
                phi, discarded = gen_constraints_greedy(pta, suite)
            else:
                phi, discarded = gen_constraints(pta, suite), []
        write_phi(arguments.out, phi, discarded)
        print(phi.simplify())
        if discarded:
            session.send_warning(
                "discarded-tests",
                "{} test(s) discarded:\n{}".format(
                    len(discarded), "\n".join(str(word) for word in discarded)
                ),
            )
        return EXIT_SUCCESS

    doc = """
        Computes the parameter valuations under which the automaton accepts
        every accepted test and rejects every rejected one.

        Usage: synth [--pta 01_pta.json] [--suite 04_testsuite.json] [--greedy]
                     [--atom-cap <n>] [-o 05_phi]
        Writes <out>.txt and <out>.json. Without --greedy, an empty constraint
        stops with exit code 2; with --greedy, tests that would empty it are discarded.
        """


class Cmd_Repair(Command):
    parser = ArgumentParserNoExit(prog="repair", add_help=False)
    parser.add_argument("--pta", default=PTA_FILE)
    parser.add_argument("--phi", default=PHI_FILE + ".json")
    parser.add_argument("--v-init", default=V_INIT_FILE)
    parser.add_argument("--domain", choices=("integer", "rational"))
    parser.add_argument("--granularity", type=int)
    parser.add_argument("--max-iterations", type=int)
    parser.add_argument("--out", "-o", default=TA_REP_FILE)
    parser.add_argument("--v-rep", default=V_REP_FILE)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        pta = load_input(session, "reading automaton", arguments.pta, load_pta)
        phi = load_input(
            session,
            "reading constraint",
            arguments.phi,
            lambda path: union_from_json(read_json(path), parameter_variables(pta)),
        )
        v_init = load_input(session, "reading valuation", arguments.v_init, load_valuation)
        v_rep, ta_rep = repair(pta, phi, v_init, repair_config(config))
        dump_model(ta_rep, arguments.out)
        write_json(arguments.v_rep, valuation_to_json(v_rep, pta.parameters))
        print(
            "v_rep: {} at distance {}".format(
                format_valuation(v_rep, pta.parameters),
                format_fraction(l1_distance(v_rep, v_init, pta.parameters)),
            )
        )
        return EXIT_SUCCESS

    doc = """
        Picks the valuation of the constraint closest to the initial one
        and instantiates the automaton with it.

        Usage: repair [--pta 01_pta.json] [--phi 05_phi.json] [--v-init 01_v_init.json]
                      [--domain integer|rational] [--granularity <n>]
                      [--max-iterations <n>] [-o 06_ta_rep.json] [--v-rep 06_v_rep.json]
        """


# ============================================================
# composed commands
# ============================================================


def add_pipeline_arguments(parser: ArgumentParserNoExit) -> None:
    parser.add_argument("--seed", type=int)
    parser.add_argument("--greedy", action="store_true")
    parser.add_argument("--samples", type=int)
    parser.add_argument("--cap", type=int)
    parser.add_argument("--horizon")
    parser.add_argument("--timeout", type=float)
    parser.add_argument("--require-accepting", action="store_true")
    parser.add_argument("--invariant-only", action="store_true")
    parser.add_argument("--no-merge", action="store_true")
    parser.add_argument("--include-empty", action="store_true")
    parser.add_argument("--atom-cap", type=int)
    parser.add_argument("--domain", choices=("integer", "rational"))
    parser.add_argument("--granularity", type=int)
    parser.add_argument("--max-iterations", type=int)
    parser.add_argument("--sc-budget", type=int)
    parser.add_argument("--sc-depth", type=int)
    parser.add_argument("--sc-words")
    parser.add_argument("--resample-sc", action="store_true")
    parser.add_argument("--output", "-o")


class Cmd_Pipeline(Command):
    parser = ArgumentParserNoExit(prog="pipeline", add_help=False)
    parser.add_argument("--ta", required=True)
    parser.add_argument("--oracle", required=True)
    parser.add_argument("--abstraction")
    parser.add_argument("--policy", "-p")
    parser.add_argument("--depth", "-k", type=int)
    add_pipeline_arguments(parser)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        check_resolvable(session, config.ta_path, config.oracle)
        assert config.ta_path is not None and config.oracle is not None
        ta_init = load_ta(config.ta_path)
        td = None
        if config.sc_words is not None:
            td = load_input(session, "reading conformance words", config.sc_words, load_sc_words)
        os.makedirs(config.output_dir, exist_ok=True)
        report = EvalReport(
            os.path.basename(config.ta_path), config.policy, config.depth, config.mode
        )
        result = PipelineResult()
        try:
            with make_oracle(
                config.oracle, config.oracle_timeout, config.require_accepting
            ) as oracle:
                run_pipeline(ta_init, oracle, config, result)
            ta_o = oracle.ta if isinstance(oracle, TaBacked) else None
            assert ta_o is None or isinstance(ta_o, Ta)
            fill_metrics(report, result, ta_init, ta_o, config, td)
        except RepairError as error:
            report.stage_failed = result.stage
            report.error = "{}: {}".format(error.name, error.message.splitlines()[0])
            report.exit_code = error.exit_code
            if not error.trace:
                error.trace = session.context.trace() + "in stage {}\n".format(result.stage)
            raise
        finally:
            # written even when a stage fails
            report.timings = dict(result.timings)
            write_artifacts(config.output_dir, result)
            write_reports(config.output_dir, [report])
        print(format_table([report]), end="")
        session.send_warnings(result.warnings)
        return EXIT_SUCCESS

    doc = """
        Runs every step: abstraction, zone graph, test generation, labeling,
        constraint synthesis and repair, then writes all intermediate files
        and a report to the output directory.

        Usage: pipeline --ta <model.json> --oracle <oracle> [--abstraction <strategy>]
                        [--policy <policy>] [--depth <K>] [--greedy] [--seed <n>]
                        [-o <directory>] [other options of the steps]
        Stops after labeling when the model fails no test.
        SD and SC are reported when the oracle is a timed automaton, SC on the
        words of --sc-words (see sc-words) or on words sampled with --seed.
        """


class Cmd_Eval(Command):
    parser = ArgumentParserNoExit(prog="eval", add_help=False)
    parser.add_argument(
        "--bench", "-b", dest="benches", action="append", choices=sorted(BENCHMARKS)
    )
    parser.add_argument("--policy", "-p", dest="policies", action="append")
    parser.add_argument("--depth", "-k", dest="depths", action="append", type=int)
    parser.add_argument("--models", default=MODELS_DIR)
    add_pipeline_arguments(parser)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        benches = arguments.benches or sorted(BENCHMARKS)
        policies = arguments.policies or [config.policy]
        depths = arguments.depths or [config.depth]
        reports = []
        for name in benches:
            for policy in policies:
                for depth in depths:
                    session.context.new("in experiment {} {} K={}".format(name, policy, depth))
                    try:
                        report = run_experiment(
                            BENCHMARKS[name], policy, depth, config, arguments.models
                        )
                        reports.append(report)
                        if report.stage_failed is not None:
                            session.send_warning(
                                "experiment-failed",
                                "failed at {}: {}".format(report.stage_failed, report.error),
                            )
                    finally:
                        session.context.pop()
        os.makedirs(config.output_dir, exist_ok=True)
        write_reports(config.output_dir, reports)
        print(format_table(reports), end="")
        return EXIT_SUCCESS

    doc = """
        Runs benchmarks and prints a table of timings, failing tests,
        syntactic distance (SD) and semantic conformance (SC) to the oracle.

        Usage: eval [--bench <name>]... [--policy <policy>]... [--depth <K>]...
                    [--greedy] [--seed <n>] [--models <directory>] [-o <directory>]
        Benchmarks: RE (running example, oracle of the same structure),
        RE_do (running example, oracle of a different structure).
        Failed runs are reported in the table with the stage that failed.
        SC uses the frozen word set of a benchmark when it has one
        (models/re.sc_words.jsonl for RE), --resample-sc samples words instead.
        """


class Cmd_ScWords(Command):
    parser = ArgumentParserNoExit(prog="sc-words", add_help=False)
    parser.add_argument("--ta", required=True)
    parser.add_argument("--oracle-ta", required=True)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--sc-budget", type=int)
    parser.add_argument("--sc-depth", type=int)
    parser.add_argument("--require-accepting", action="store_true")
    parser.add_argument("--out", "-o", required=True)

    def __call__(self, session: Session, args: Sequence[str]) -> int:
        arguments = self.parse(session, args)
        config = session.config
        config.process_options(arguments)
        ta = load_input(session, "reading automaton", arguments.ta, load_ta)
        ta_o = load_input(session, "reading oracle automaton", arguments.oracle_ta, load_ta)
        words = gen_sc_testdata(
            ta, ta_o, config.seed, config.sc_budget, config.sc_depth, config.require_accepting
        )
        write_text(arguments.out, sc_words_to_jsonl(words))
        print("{} conformance word(s)".format(len(words)))
        return EXIT_SUCCESS

    doc = """
        Samples a conformance word set from two timed automata and writes it,
        one {"word": ...} per line, to be reused with pipeline --sc-words.

        Usage: sc-words --ta <model.json> --oracle-ta <oracle.json> -o <words.jsonl>
                        [--seed <n>] [--sc-budget <n>] [--sc-depth <K>] [--require-accepting]
        Words follow random runs of either automaton, each with a rejected extension.
        """
