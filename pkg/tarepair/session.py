"""
Definitions of the PipelineConfig and Session classes

It contains:
- class PipelineConfig: every knob of the pipeline as a class attribute
- class Command: base class of subcommands
- class Session: error and warning handling, subcommand dispatch and help
"""
import argparse
from fractions import Fraction
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .context import ContextStack
from .defs import TOOL_NAME, TOOL_VERSION, ArgumentParserNoExit, to_fraction, trim
from .errors import (
    EXIT_INTERNAL,
    EXIT_VALIDATION,
    ErrorMode,
    ModelError,
    RepairError,
    RepairWarning,
    TestDataError,
    WarningMode,
)
from .model import STRATEGIES
from .testgen import Policy

MODES = ("strict", "greedy")
DOMAINS = ("integer", "rational")


class PipelineConfig:
    """Configuration of a pipeline run.
    Attributes are read from the class unless set on the instance:
      - depth: int (default 6) - zone graph and test depth K
      - horizon: Fraction (default 100) - replaces infinite arrival bounds
      - path_cap: int (default 256) - test words per path of the zone graph
      - atom_cap: int (default 10000) - atoms per polyhedron
      - policy: str (default "minmax1") - minmax1, minmax2, minmax4 or random
      - samples_per_state: int (default 3) - random policy only
      - seed: int (default 0) - every random choice derives from it
      - mode: str (default "strict") - strict or greedy constraint generation
      - strategy: str (default "shared-per-location")
          all, shared-per-location or manual:<path>
      - oracle: str - ta:<path>, exec:<command> or recorded:<path>
      - repair_domain, granularity, max_iterations - lattice of the repair search
      - sc_budget, sc_depth - sampling of the conformance word set
      - sc_words: str - a frozen conformance word set, sampled when None
      - sc_frozen: bool (default True) - benchmarks use their frozen word set
    """

    ta_path: Optional[str] = None
    oracle: Optional[str] = None
    output_dir: str = "out"

    depth: int = 6
    horizon: Fraction = Fraction(100)
    path_cap: int = 256
    atom_cap: int = 10000
    policy: str = "minmax1"
    samples_per_state: int = 3
    seed: int = 0
    mode: str = "strict"
    strategy: str = "shared-per-location"
    abstract_invariant_only_constants: bool = False
    require_accepting: bool = False
    merge_states: bool = True
    include_empty_word: bool = False
    oracle_timeout: float = 10.0
    repair_domain: str = "integer"
    granularity: int = 1
    max_iterations: int = 100000
    sc_budget: int = 200
    sc_depth: int = 4
    sc_words: Optional[str] = None
    sc_frozen: bool = True

    # command line flag -> attribute
    options: Dict[str, str] = {
        "ta": "ta_path",
        "oracle": "oracle",
        "output": "output_dir",
        "depth": "depth",
        "horizon": "horizon",
        "cap": "path_cap",
        "atom_cap": "atom_cap",
        "policy": "policy",
        "samples": "samples_per_state",
        "seed": "seed",
        "abstraction": "strategy",
        "invariant_only": "abstract_invariant_only_constants",
        "require_accepting": "require_accepting",
        "no_merge": "merge_states",
        "include_empty": "include_empty_word",
        "timeout": "oracle_timeout",
        "domain": "repair_domain",
        "granularity": "granularity",
        "max_iterations": "max_iterations",
        "sc_budget": "sc_budget",
        "sc_depth": "sc_depth",
        "sc_words": "sc_words",
        "resample_sc": "sc_frozen",
    }

    def process_options(self: "PipelineConfig", arguments: argparse.Namespace) -> None:
        """copies the flags set in arguments, then checks the result"""
        values = vars(arguments)
        for flag, attribute in self.options.items():
            value = values.get(flag)
            if value is None or value is False:
                continue
            if flag in ("no_merge", "resample_sc"):
                value = False
            elif flag == "horizon":
                value = to_fraction(value)
            setattr(self, attribute, value)
        if values.get("greedy"):
            self.mode = "greedy"
        self.check()

    def check(self: "PipelineConfig") -> None:
        """raises ModelError("invalid-config") on inconsistent settings"""
        problems: List[str] = []
        if self.depth < 0:
            problems.append("depth must be nonnegative")
        if self.horizon <= 0:
            problems.append("horizon must be positive")
        if self.path_cap < 1 or self.atom_cap < 1:
            problems.append("caps must be positive")
        try:
            Policy.parse(self.policy, self.seed, self.samples_per_state)
        except TestDataError as err:
            problems.append(err.message)
        if self.mode not in MODES:
            problems.append("mode must be one of {}".format(", ".join(MODES)))
        if self.strategy.partition(":")[0] not in STRATEGIES:
            problems.append("unknown abstraction '{}'".format(self.strategy))
        if self.repair_domain not in DOMAINS or self.granularity < 1:
            problems.append("repair domain must be integer or rational with a positive granularity")
        if self.oracle_timeout <= 0:
            problems.append("oracle timeout must be positive")
        if self.sc_budget < 0 or self.sc_depth < 1:
            problems.append("conformance budget must be nonnegative and depth positive")
        if problems:
            raise ModelError("invalid-config", "invalid configuration:\n" + "\n".join(problems))


class Command:
    """A subcommand: parses its own arguments and
    returns an exit code"""

    doc: str
    parser: ArgumentParserNoExit

    def parse(self: "Command", session: "Session", args: Sequence[str]) -> argparse.Namespace:
        try:
            return self.parser.parse_args(list(args))
        except argparse.ArgumentError as err:
            session.send_error(
                "invalid-argument",
                "{}\nusage: {}".format(err, self.parser.format_usage().strip()[len("usage: ") :]),
            )
            raise  # unreachable, send_error raises or exits

    def __call__(self: "Command", session: "Session", args: Sequence[str]) -> int:
        raise ValueError("Overwrite __call__ in subclasses")


class Session:
    """This class runs subcommands:

      Useful attributes that can be configured:
      - config: PipelineConfig - settings shared by the subcommands
      - safe_calls: bool (default True)
          if True, unexpected exceptions of subcommands become internal-error
      - error_mode: ErrorMode (default RAISE)
          | PRINT_AND_EXIT -> print to stderr and exit
          | PRINT_AND_RAISE -> print to stderr and raise exception
          | RAISE -> raise exception
      - warning_mode: WarningMode (default RAISE)
          | HIDE -> do nothing
          | PRINT -> print to stderr
          | RAISE -> raise python warning
          | AS_ERROR -> passes to self.send_error()
      - use_color: bool (default False)
          if True, uses ansi color when printing diagnostics
    """

    safe_calls: bool = True
    use_color: bool = False

    error_mode: ErrorMode = ErrorMode.RAISE
    warning_mode: WarningMode = WarningMode.RAISE
    silent_warnings: List[str] = []

    commands: Dict[str, Command] = dict()

    config: PipelineConfig
    context: ContextStack

    def __init__(self: "Session", config: Optional[PipelineConfig] = None) -> None:
        self.commands = Session.commands.copy()
        self.silent_warnings = Session.silent_warnings.copy()
        self.config = config if config is not None else PipelineConfig()
        self.context = ContextStack()

    def raise_error(self: "Session", error: RepairError) -> None:
        """Reports error according to self.error_mode.
        The context trace is added when error has none"""
        if not error.trace:
            error.trace = self.context.trace()
        if self.error_mode == ErrorMode.PRINT_AND_EXIT:
            print(error.pretty_message(self.use_color), file=sys.stderr)
            exit(error.exit_code)
        if self.error_mode == ErrorMode.PRINT_AND_RAISE:
            print(error.pretty_message(self.use_color), file=sys.stderr)
        raise error

    def send_error(
        self: "Session", name: str, error_msg: str, exit_code: int = EXIT_VALIDATION
    ) -> None:
        """Handles errors
        Inputs:
          name - error name (lowercase-no-space: ex invalid-argument)
          error_msg - string : an error message
          exit_code - used when error_mode is PRINT_AND_EXIT
        """
        error = RepairError(name, error_msg, self.context.trace())
        error.exit_code = exit_code
        self.raise_error(error)

    def send_warning(self: "Session", name: str, warning_msg: str) -> None:
        """Handles warnings
        Depends on self.warning_mode:
          | HIDE -> do nothing
          | PRINT -> print to stderr
          | PRINT_AND_RAISE -> print to stderr and raise warning
          | RAISE -> raise python warning
          | AS_ERROR -> passes to self.send_error()
        """
        if name in self.silent_warnings or self.warning_mode == WarningMode.HIDE:
            return
        warning = RepairWarning(name, warning_msg, self.context.trace())
        if self.warning_mode in (WarningMode.PRINT, WarningMode.PRINT_AND_RAISE):
            print(warning.pretty_message(self.use_color), file=sys.stderr)
        if self.warning_mode in (WarningMode.RAISE, WarningMode.PRINT_AND_RAISE):
            raise warning
        if self.warning_mode == WarningMode.AS_ERROR:
            self.send_error("from-warning-" + name, warning_msg)

    def send_warnings(self: "Session", warnings: Sequence[Tuple[str, str]]) -> None:
        for name, message in warnings:
            self.send_warning(name, message)

    def safe_call(self: "Session", function: Callable[..., int], *args: Any, **kwargs: Any) -> int:
        """calls function (returning an exit code), reporting RepairErrors
        through raise_error and turning other exceptions into internal-error"""
        try:
            return function(*args, **kwargs)
        except RepairWarning:
            raise
        except RepairError as error:
            self.raise_error(error)
        except Exception as error:
            if not self.safe_calls:
                raise
            self.send_error(
                "internal-error",
                "unexpected error in subcommand.\n{}: {}".format(type(error).__name__, error),
                EXIT_INTERNAL,
            )
        return EXIT_INTERNAL

    def run(self: "Session", name: str, args: Sequence[str] = ()) -> int:
        """runs subcommand name with args, returns its exit code"""
        if name not in self.commands:
            self.send_error(
                "unknown-command",
                "unknown subcommand '{}'\navailable: {}".format(name, ", ".join(self.commands)),
            )
        self.context.new("{}: in subcommand {}".format(TOOL_NAME, name))
        try:
            return self.safe_call(self.commands[name], self, args)
        finally:
            self.context.pop()

    def get_help(self: "Session", help_msg: str) -> str:
        """used to get and display help on the command line
        help_msg is either:
                ""         -> display program help
                "commands" -> list all subcommands
                <cmd_name> -> display help relative to a subcommand
        returns the help string
        """
        if help_msg == "":
            return trim(
                """
                {name} version {version}
                Repairs the clock constants of a timed automaton from the verdicts of an oracle

                Usage: {name} [--flags] <subcommand> [subcommand arguments]
                    A list of subcommands can be obtained with "--help commands",
                    help on one of them with "--help <subcommand>"

                Options:
                    -V --verbose         more progress messages, repeat for debug output
                    -w --warnings <hide|error> choose whether to hide warnings
                                or have them raise an error. default is display.
                    -s --silent <warning_name> silence a specific warning (ex: considered-correct)
                    -c --color           colored diagnostics
                    -v --version         show version and exit
                    -h --help <topic>    show this help, or help on topic

                Oracles:
                    ta:<path>        membership in a timed automaton (JSON model)
                    exec:<command>   a process reading one JSON object per line on stdin
                                         {{"word": [["a", "5/2"], ["c", "9/2"]]}}
                                     and answering one line per query on stdout
                                         {{"accept": true}}
                    recorded:<path>  verdicts from a JSON lines file of
                                         {{"word": ..., "accept": ...}}

                Exit codes:
                    0 success, 1 invalid input, 2 abstraction insufficient
                    (rerun with --greedy), 3 oracle failure, 4 internal error
                """
            ).format(name=TOOL_NAME, version=TOOL_VERSION)
        if help_msg == "commands":
            lines = ["Subcommands:"]
            for name, command in self.commands.items():
                summary = trim(command.doc).splitlines()[0] if command.doc else ""
                lines.append("  {:<10} {}".format(name, summary))
            return "\n".join(lines)
        if help_msg in self.commands:
            command = self.commands[help_msg]
            return "{}\n\n{}".format(trim(command.doc), command.parser.format_usage().strip())
        return 'No help found for "{}". Use "--help commands" to list subcommands.'.format(
            help_msg
        )

