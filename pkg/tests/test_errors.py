from typing import Callable

from tarepair import Session
from tarepair.errors import (
    EXIT_ABSTRACTION,
    EXIT_INTERNAL,
    EXIT_ORACLE,
    EXIT_VALIDATION,
    AbstractionInsufficient,
    ErrorMode,
    ModelError,
    OracleError,
    RepairError,
    RepairWarning,
    SearchError,
    WarningMode,
)


def runtest_error(function: Callable[[], object], error_name: str, exit_code: int) -> None:
    try:
        function()
    except RepairError as err:
        assert err.name == error_name and err.exit_code == exit_code
        return
    assert False and "No error caught"


def runtest_warning(function: Callable[[], object], warning_name: str) -> None:
    try:
        function()
    except RepairWarning as err:
        assert err.name == warning_name
        return
    assert False and "No warning caught"


def test_formatting() -> None:
    error = ModelError(
        "unknown-clock", "edge 3 uses clock z\nknown clocks: x, y", "in step abstract\n"
    )
    assert error.format_name() == "-Eunknown-clock"
    assert str(error) == "edge 3 uses clock z [-Eunknown-clock]\nknown clocks: x, y"
    assert error.pretty_message() == (
        "in step abstract\nerror: edge 3 uses clock z [-Eunknown-clock]\n  known clocks: x, y"
    )
    assert "\033[31m" in error.pretty_message(ansi=True)
    warning = RepairWarning("partial-epzg", "zone graph is partial")
    assert warning.format_name() == "-Wpartial-epzg"
    assert warning.pretty_message() == "warning: zone graph is partial [-Wpartial-epzg]"


def test_exit_codes() -> None:
    test = [
        (ModelError("a", "b"), EXIT_VALIDATION),
        (OracleError("a", "b"), EXIT_ORACLE),
        (AbstractionInsufficient("a", "b"), EXIT_ABSTRACTION),
        (SearchError("a", "b"), EXIT_VALIDATION),
        (RepairError("a", "b"), EXIT_INTERNAL),
    ]
    for error, code in test:
        assert error.exit_code == code


def test_session_errors() -> None:
    session = Session()
    runtest_error(lambda: session.send_error("invalid-argument", "bad"), "invalid-argument", 1)
    runtest_error(lambda: session.run("no-such-command"), "unknown-command", 1)
    runtest_error(lambda: session.run("epzg", ["--depth", "two"]), "invalid-argument", 1)

    def crash() -> int:
        raise ValueError("boom")

    runtest_error(lambda: session.safe_call(crash), "internal-error", EXIT_INTERNAL)
    session.safe_calls = False
    try:
        session.safe_call(crash)
    except ValueError:
        pass
    else:
        assert False and "No error caught"

    def late() -> int:
        raise OracleError("oracle-timeout", "late")

    # stage errors keep their own exit code
    runtest_error(lambda: session.safe_call(late), "oracle-timeout", EXIT_ORACLE)


def test_session_exit(capsys) -> None:  # type: ignore
    session = Session()
    session.error_mode = ErrorMode.PRINT_AND_EXIT
    try:
        session.send_error("abstraction-insufficient", "no valuation", EXIT_ABSTRACTION)
    except SystemExit as exit_:
        assert exit_.code == EXIT_ABSTRACTION
    else:
        assert False and "No exit"
    assert "[-Eabstraction-insufficient]" in capsys.readouterr().err


def test_warning_modes(capsys) -> None:  # type: ignore
    session = Session()
    runtest_warning(lambda: session.send_warning("considered-correct", "ok"), "considered-correct")

    session.warning_mode = WarningMode.HIDE
    session.send_warning("considered-correct", "ok")

    session.warning_mode = WarningMode.PRINT
    session.send_warning("considered-correct", "ok")
    assert "warning: ok [-Wconsidered-correct]" in capsys.readouterr().err

    session.silent_warnings.append("considered-correct")
    session.send_warning("considered-correct", "ok")
    assert capsys.readouterr().err == ""
    # silencing is per session
    assert "considered-correct" not in Session().silent_warnings

    session.warning_mode = WarningMode.AS_ERROR
    runtest_error(
        lambda: session.send_warning("discarded-tests", "2 tests"),
        "from-warning-discarded-tests",
        EXIT_VALIDATION,
    )
