"""
File containing error classes and methods for error handling

It defines:
- enum WarningMode and ErrorMode used to configure the Session
- exit codes of the command line tool
- class RepairErrorWarningBase containing info about an Error/Warning
- class RepairError(Exception, RepairErrorWarningBase)
  used to raise errors, and its subclasses, one per stage of the pipeline:
  ModelError, PolyhedronError, SemanticsError, TestDataError, OracleError,
  SynthesisError (and AbstractionInsufficient), SearchError, EvaluationError
- class RepairWarning(Warning, RepairErrorWarningBase)
  used to raise warning
"""

import enum

ANSI_ERROR = "\033[31m"  # red
ANSI_WARNING = "\033[35m"  # purple
ANSI_RESET = "\033[39m"

EXIT_SUCCESS = 0
EXIT_VALIDATION = 1
EXIT_ABSTRACTION = 2
EXIT_ORACLE = 3
EXIT_INTERNAL = 4


@enum.unique
class WarningMode(enum.Enum):
    """Session warning modes:
    | HIDE -> do nothing
    | PRINT -> print to stderr
    | PRINT_AND_RAISE -> print to stderr and raise warning
    | RAISE -> raise python warning
    | AS_ERROR -> passes to send_error()"""

    HIDE = 1
    PRINT = 2
    PRINT_AND_RAISE = 3
    RAISE = 4
    AS_ERROR = 5


@enum.unique
class ErrorMode(enum.Enum):
    """Session error modes:
    | PRINT_AND_EXIT -> print to stderr and exit
    | PRINT_AND_RAISE -> print to stderr and raise exception
    | RAISE -> raise exception"""

    PRINT_AND_EXIT = 1
    PRINT_AND_RAISE = 2
    RAISE = 3


class RepairErrorWarningBase:
    """standard error/warning class
    RepairError and RepairWarning both inherit from this.
    Attributes:
    - name (ex : "abstraction-insufficient")
    - message (ex: "no valuation satisfies ...")
    - trace (ex: "in step synth\\n04_testsuite.json: reading suite\\n")
    - is_error
    """

    name: str
    message: str
    trace: str
    is_error: bool

    def __init__(
        self: "RepairErrorWarningBase",
        name: str,
        message: str,
        trace: str,
        is_error: bool,
    ) -> None:
        self.name = name
        self.message = message
        self.trace = trace
        self.is_error = is_error

    def format_name(self: "RepairErrorWarningBase") -> str:
        """formats name into -Wname or -Ename
        depending on self.is_error"""
        if self.is_error:
            return "-E" + self.name
        return "-W" + self.name

    def format_message(self: "RepairErrorWarningBase", ansi: bool = False) -> str:
        """formats the message into
        first line [-Wname/-Ename]
        following lines"""
        msg = self.message.split("\n")
        if ansi:
            color = ANSI_ERROR if self.is_error else ANSI_WARNING
            msg[0] += " [{}{}{}]".format(color, self.format_name(), ANSI_RESET)
        else:
            msg[0] += " [{}]".format(self.format_name())
        return "\n".join(msg)

    def __str__(self: "RepairErrorWarningBase") -> str:
        """transform self into string for error display
        ex: message [-Ename]"""
        return self.format_message()

    def pretty_message(self: "RepairErrorWarningBase", ansi: bool = False) -> str:
        """pretty prints self with trace, use ansi if specified"""
        if self.is_error:
            kind = "error:"
            if ansi:
                kind = ANSI_ERROR + kind + ANSI_RESET
        else:
            kind = "warning:"
            if ansi:
                kind = ANSI_WARNING + kind + ANSI_RESET
        return "{}{} {}".format(
            self.trace, kind, self.format_message(ansi).replace("\n", "\n  ")
        )


class RepairError(RepairErrorWarningBase, Exception):
    """The standard class for errors, carries the exit code of the cli"""

    exit_code: int = EXIT_INTERNAL

    def __init__(
        self: "RepairError", name: str, message: str, trace: str = ""
    ) -> None:
        """Initializes the object:
        Arguments:
        - name (ex : "unknown-clock")
        - message (ex: "edge 3 resets undeclared clock z")
        - trace: context trace, filled in by the Session if empty
        """
        RepairErrorWarningBase.__init__(self, name, message, trace, True)
        Exception.__init__(self, RepairErrorWarningBase.__str__(self))


class RepairWarning(RepairErrorWarningBase, Warning):
    """The standard class for warnings"""

    def __init__(
        self: "RepairWarning", name: str, message: str, trace: str = ""
    ) -> None:
        RepairErrorWarningBase.__init__(self, name, message, trace, False)
        Warning.__init__(self, RepairErrorWarningBase.__str__(self))


class ModelError(RepairError):
    """malformed automaton, valuation, timed word or input file"""

    exit_code = EXIT_VALIDATION


class PolyhedronError(RepairError):
    """operand mismatch, empty polyhedron where a point is needed
    or atom cap exceeded"""

    exit_code = EXIT_VALIDATION


class SemanticsError(RepairError):
    """invalid use of the symbolic semantics (parametric acceptance, unknown action...)"""

    exit_code = EXIT_VALIDATION


class TestDataError(RepairError):
    """invalid test generation input (empty interval, bad policy)"""

    __test__ = False  # not a pytest class
    exit_code = EXIT_VALIDATION


class OracleError(RepairError):
    """oracle crash, timeout, garbled reply or unknown recorded word"""

    exit_code = EXIT_ORACLE


class SynthesisError(RepairError):
    exit_code = EXIT_VALIDATION


class AbstractionInsufficient(SynthesisError):
    """strict constraint generation found no valuation consistent with the suite"""

    exit_code = EXIT_ABSTRACTION


class SearchError(RepairError):
    """no lattice point of the search box satisfies the constraint"""

    exit_code = EXIT_VALIDATION


class EvaluationError(RepairError):
    exit_code = EXIT_VALIDATION
