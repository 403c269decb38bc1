import json
import os
import shlex
import sys
from fractions import Fraction
from typing import Callable

from tarepair.errors import RepairError
from tarepair.evaluation import MODELS_DIR
from tarepair.model import TimedWord, load_model
from tarepair.oracle import (
    ExternalProcess,
    RecordedMap,
    TaBacked,
    Test,
    TestSuite,
    failing_tests,
    filter_tests,
    label_tests,
    make_oracle,
)
from tarepair.testgen import TestData

ORACLE_PATH = os.path.join(MODELS_DIR, "re_oracle.ta.json")
ORACLE = load_model(ORACLE_PATH)
TA = load_model(os.path.join(MODELS_DIR, "running_example.ta.json"))
PTA = load_model(os.path.join(MODELS_DIR, "running_example.pta.json"))


def word(*pairs: tuple) -> TimedWord:  # type: ignore
    return TimedWord.of(pairs)


def runtest_error(function: Callable[[], object], error_name: str) -> None:
    try:
        function()
    except RepairError as err:
        assert err.name == error_name
        return
    assert False and "No error caught"


def script_command(tmp_path, name: str, source: str) -> str:  # type: ignore
    script = tmp_path / name
    script.write_text(source)
    return "{} {}".format(shlex.quote(sys.executable), shlex.quote(str(script)))


def test_ta_backed() -> None:
    oracle = TaBacked(ORACLE)
    test = [
        (word(("a", Fraction(1, 2)), ("c", 5)), True),
        (word(("a", 1), ("c", 6)), True),
        (word(("a", 0), ("c", 5)), False),
        (word(("a", 5)), False),
        (word(), True),
    ]
    for timed_word, verdict in test:
        assert oracle.query(timed_word) == verdict
    assert oracle.queries == 4
    oracle.query(word(("a", 5)))
    assert oracle.queries == 4

    completed = TaBacked(ORACLE, require_accepting=True)
    assert not completed.query(word())
    assert not completed.query(word(("a", 3)))
    assert completed.query(word(("a", 3), ("c", 5)))
    runtest_error(lambda: TaBacked(PTA), "parametric-oracle")


def test_recorded_map(tmp_path) -> None:  # type: ignore
    lines = [
        {"word": [["a", "1/2"], ["c", 5]], "accept": True},
        {"word": [["a", 5]], "accept": False},
    ]
    recording = tmp_path / "verdicts.jsonl"
    recording.write_text("\n".join(json.dumps(line) for line in lines) + "\n\n")
    oracle = RecordedMap.load(str(recording))
    assert oracle.query(word(("a", Fraction(1, 2)), ("c", 5)))
    assert not oracle.query(word(("a", 5)))
    runtest_error(lambda: oracle.query(word(("a", 1))), "oracle-unknown-word")

    listing = tmp_path / "verdicts.json"
    listing.write_text(json.dumps(lines))
    assert not RecordedMap.load(str(listing)).query(word(("a", 5)))

    malformed = tmp_path / "malformed.jsonl"
    malformed.write_text('{"w": 1}\n')
    broken = tmp_path / "broken.jsonl"
    broken.write_text('{"word": []}\n{\n')
    test = [
        (str(malformed), "invalid-recording"),
        (str(broken), "invalid-json"),
        (str(tmp_path / "missing.jsonl"), "unreadable-file"),
    ]
    for path, name in test:
        runtest_error(lambda: RecordedMap.load(path), name)


def test_external_process(tmp_path) -> None:  # type: ignore
    command = script_command(
        tmp_path,
        "parity.py",
        "import json, sys\n"
        "for line in sys.stdin:\n"
        "    word = json.loads(line)['word']\n"
        "    print(json.dumps({'accept': len(word) % 2 == 0}), flush=True)\n",
    )
    with ExternalProcess(command) as oracle:
        assert not oracle.query(word(("a", 1)))
        assert oracle.query(word(("a", 1), ("c", Fraction(5, 2))))
        assert oracle.query(word())
        assert oracle.queries == 2


def test_external_process_failures(tmp_path) -> None:  # type: ignore
    sleepy = script_command(
        tmp_path, "sleepy.py", "import sys, time\nfor line in sys.stdin:\n    time.sleep(5)\n"
    )
    garbled = script_command(
        tmp_path, "garbled.py", "import sys\nfor line in sys.stdin:\n    print('yes', flush=True)\n"
    )
    not_bool = script_command(
        tmp_path,
        "not_bool.py",
        "import sys\nfor line in sys.stdin:\n    print('{\"accept\": \"yes\"}', flush=True)\n",
    )
    crash = script_command(tmp_path, "crash.py", "import sys\nsys.exit(3)\n")
    test = [
        (sleepy, 0.3, "oracle-timeout"),
        (garbled, 10.0, "oracle-garbled"),
        (not_bool, 10.0, "oracle-garbled"),
        (crash, 10.0, "oracle-crash"),
    ]
    for command, timeout, name in test:
        oracle = ExternalProcess(command, timeout)
        try:
            runtest_error(lambda: oracle.query(word(("a", 1))), name)
        finally:
            oracle.close()
    missing = str(tmp_path / "no-such-binary")
    runtest_error(lambda: ExternalProcess(missing), "oracle-crash")


def test_make_oracle(tmp_path) -> None:  # type: ignore
    assert isinstance(make_oracle("ta:" + ORACLE_PATH), TaBacked)
    assert isinstance(make_oracle(ORACLE_PATH), TaBacked)
    assert make_oracle(ORACLE_PATH, require_accepting=True).require_accepting  # type: ignore
    recording = tmp_path / "verdicts.jsonl"
    recording.write_text('{"word": [["a", 5]], "accept": false}\n')
    assert isinstance(make_oracle("recorded:" + str(recording)), RecordedMap)
    command = script_command(
        tmp_path,
        "yes.py",
        "import sys\nfor line in sys.stdin:\n    print('{\"accept\": true}', flush=True)\n",
    )
    with make_oracle("exec:" + command, timeout=5.0) as oracle:
        assert isinstance(oracle, ExternalProcess)
        assert oracle.query(word(("a", 1)))
    runtest_error(lambda: make_oracle("bogus:thing"), "unknown-oracle")


def test_filter_tests() -> None:
    tests = [
        Test(word(("a", 1)), True),
        Test(word(("a", 1), ("c", 6)), True),
        Test(word(("a", 0)), False),
        Test(word(("a", 0), ("c", 5)), False),
        Test(word(("a", 4)), True),
    ]
    suite = filter_tests(tests)
    assert suite.tests == (tests[1], tests[2], tests[4])
    assert suite.mba == [word(("a", 1), ("c", 6)), word(("a", 4))]
    assert suite.mbr == [word(("a", 0))]
    assert len(suite) == 3


def test_label_tests() -> None:
    data = TestData(
        (
            word(("a", 3)),
            word(("a", 3), ("c", 5)),
            word(("a", 0), ("c", 5)),
            word(("a", 5)),
        )
    )
    suite = label_tests(data, TaBacked(ORACLE))
    assert suite.tests == (
        Test(word(("a", 3), ("c", 5)), True),
        Test(word(("a", 0), ("c", 5)), False),
        Test(word(("a", 5)), False),
    )
    assert failing_tests(suite, TA) == []
    disagreeing = TestSuite(suite.tests + (Test(word(("a", 1), ("c", 6)), True),))
    assert failing_tests(disagreeing, TA) == [Test(word(("a", 1), ("c", 6)), True)]
    assert failing_tests(disagreeing, ORACLE) == []


def test_suite_json() -> None:
    suite = TestSuite((Test(word(("a", Fraction(1, 2))), True), Test(word(("a", 5)), False)))
    assert suite.to_json() == {
        "tests": [
            {"word": [["a", "1/2"]], "accept": True},
            {"word": [["a", "5"]], "accept": False},
        ]
    }
    assert TestSuite.from_json(suite.to_json()) == suite
    for bad in [{}, {"tests": [{"word": []}]}, {"tests": 3}]:
        runtest_error(lambda: TestSuite.from_json(bad), "invalid-suite")
