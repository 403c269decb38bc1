"""
Membership oracles and test labeling

It contains:
- class OracleBackend and its subclasses TaBacked, ExternalProcess
  and RecordedMap
- function make_oracle, building a backend from "ta:<path>",
  "exec:<command>" or "recorded:<path>"
- classes Test and TestSuite
- functions label_tests and failing_tests

External oracles read one JSON object per line on stdin
    {"word": [["a", "5/2"], ["c", "9/2"]]}
and answer one line on stdout
    {"accept": true}
"""

import json
import logging
import queue
import shlex
import subprocess
import threading
from dataclasses import dataclass
from typing import IO, Any, Dict, List, Optional, Tuple

from .errors import ModelError, OracleError
from .model import Pta, TimedWord, load_model, read_json
from .semantics import member
from .testgen import TestData

logger = logging.getLogger(__name__)


class OracleBackend:
    """Base class of oracles: answers membership queries, with a cache.
    The empty word is realizable by zero steps and is never sent"""

    description: str = "oracle"

    def __init__(self: "OracleBackend") -> None:
        self._cache: Dict[TimedWord, bool] = {}
        self.queries = 0

    def query(self: "OracleBackend", word: TimedWord) -> bool:
        if not word.steps:
            return True
        if word not in self._cache:
            self.queries += 1
            self._cache[word] = self._query(word)
        return self._cache[word]

    def _query(self: "OracleBackend", word: TimedWord) -> bool:
        raise NotImplementedError

    def close(self: "OracleBackend") -> None:
        """releases resources, the backend can't be queried afterwards"""

    def __enter__(self: "OracleBackend") -> "OracleBackend":
        return self

    def __exit__(self: "OracleBackend", *args: Any) -> None:
        self.close()


class TaBacked(OracleBackend):
    """membership in a known timed automaton"""

    def __init__(self: "TaBacked", ta: Pta, require_accepting: bool = False) -> None:
        super().__init__()
        if ta.is_parametric:
            raise OracleError(
                "parametric-oracle", "an oracle automaton cannot have parameters"
            )
        self.ta = ta
        self.require_accepting = require_accepting
        self.description = "timed automaton"

    def query(self: "TaBacked", word: TimedWord) -> bool:
        if not word.steps and self.require_accepting:
            return self.ta.initial in self.ta.accepting
        return super().query(word)

    def _query(self: "TaBacked", word: TimedWord) -> bool:
        return member(self.ta, word, self.require_accepting)


class ExternalProcess(OracleBackend):
    """a long running process speaking line-delimited JSON"""

    def __init__(self: "ExternalProcess", command: str, timeout: float = 10.0) -> None:
        super().__init__()
        self.command = command
        self.timeout = timeout
        self.description = "external process '{}'".format(command)
        self._lines: "queue.Queue[Optional[str]]" = queue.Queue()
        try:
            self._process = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                universal_newlines=True,
                bufsize=1,
            )
        except OSError as err:
            raise OracleError(
                "oracle-crash", "cannot start oracle '{}': {}".format(command, err)
            )
        self._reader = threading.Thread(
            target=self._read_lines, args=(self._process.stdout,), daemon=True
        )
        self._reader.start()

    def _read_lines(self: "ExternalProcess", stream: Optional[IO[str]]) -> None:
        if stream is None:
            return
        for line in stream:
            self._lines.put(line)
        self._lines.put(None)

    def _query(self: "ExternalProcess", word: TimedWord) -> bool:
        request = json.dumps({"word": word.to_json()})
        try:
            assert self._process.stdin is not None
            self._process.stdin.write(request + "\n")
            self._process.stdin.flush()
        except (OSError, ValueError):
            raise OracleError(
                "oracle-crash", "oracle exited before the query of {}".format(word)
            )
        try:
            line = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            raise OracleError(
                "oracle-timeout",
                "no answer within {}s for {}".format(self.timeout, word),
            )
        if line is None:
            raise OracleError(
                "oracle-crash",
                "oracle exited (code {}) while answering {}".format(
                    self._process.poll(), word
                ),
            )
        try:
            verdict = json.loads(line)["accept"]
        except (json.JSONDecodeError, KeyError, TypeError):
            verdict = None
        if not isinstance(verdict, bool):
            raise OracleError(
                "oracle-garbled",
                "unreadable answer {!r} for {}".format(line.strip(), word),
            )
        logger.debug("oracle: {} -> {}".format(word, verdict))
        return verdict

    def close(self: "ExternalProcess") -> None:
        if self._process.poll() is None:
            if self._process.stdin is not None:
                self._process.stdin.close()
            try:
                self._process.wait(timeout=self.timeout)
            except subprocess.TimeoutExpired:
                self._process.kill()


class RecordedMap(OracleBackend):
    """verdicts read from a file, one {"word": ..., "accept": ...} per line
    (or a JSON list of such objects)"""

    def __init__(self: "RecordedMap", verdicts: Dict[TimedWord, bool]) -> None:
        super().__init__()
        self.verdicts = verdicts
        self.description = "recorded verdicts"

    @classmethod
    def load(cls, path: str) -> "RecordedMap":
        try:
            with open(path, "r", encoding="utf-8") as file:
                text = file.read()
        except OSError as err:
            raise ModelError(
                "unreadable-file", "cannot read {}: {}".format(path, err.strerror)
            )
        entries: List[Any] = []
        if text.lstrip().startswith("["):
            entries = read_json(path)
        else:
            for number, line in enumerate(text.splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    entries.append(json.loads(line))
                except json.JSONDecodeError as err:
                    raise ModelError(
                        "invalid-json", "{}:{}:{}: {}".format(path, number, err.colno, err.msg)
                    )
        verdicts = {}
        for entry in entries:
            try:
                verdicts[TimedWord.from_json(entry["word"])] = bool(entry["accept"])
            except (KeyError, TypeError) as err:
                raise ModelError(
                    "invalid-recording", "{}: malformed entry {}: {}".format(path, entry, err)
                )
        return cls(verdicts)

    def _query(self: "RecordedMap", word: TimedWord) -> bool:
        if word not in self.verdicts:
            raise OracleError(
                "oracle-unknown-word", "no recorded verdict for {}".format(word)
            )
        return self.verdicts[word]


def make_oracle(
    spec: str, timeout: float = 10.0, require_accepting: bool = False
) -> OracleBackend:
    """builds a backend from "ta:<path>", "exec:<command>" or "recorded:<path>"
    a bare path is read as "ta:<path>" """
    kind, _, target = spec.partition(":")
    if not target:
        kind, target = "ta", spec
    if kind == "ta":
        return TaBacked(load_model(target), require_accepting)
    if kind == "exec":
        return ExternalProcess(target, timeout)
    if kind == "recorded":
        return RecordedMap.load(target)
    raise OracleError(
        "unknown-oracle",
        "unknown oracle kind '{}' (expected ta:, exec: or recorded:)".format(kind),
    )


# ===============================================
# Tests
# ===============================================


@dataclass(frozen=True)
class Test:
    """a timed word and the oracle verdict on it"""

    __test__ = False  # not a pytest class

    word: TimedWord
    verdict: bool


@dataclass(frozen=True)
class TestSuite:
    """labeled tests, accepted ones being maximal and rejected ones minimal
    with respect to prefixes"""

    __test__ = False  # not a pytest class

    tests: Tuple[Test, ...]

    @property
    def mba(self: "TestSuite") -> List[TimedWord]:
        """words that must be accepted"""
        return [test.word for test in self.tests if test.verdict]

    @property
    def mbr(self: "TestSuite") -> List[TimedWord]:
        """words that must be rejected"""
        return [test.word for test in self.tests if not test.verdict]

    def __len__(self: "TestSuite") -> int:
        return len(self.tests)

    def to_json(self: "TestSuite") -> Dict[str, Any]:
        return {
            "tests": [
                {"word": test.word.to_json(), "accept": test.verdict} for test in self.tests
            ]
        }

    @classmethod
    def from_json(cls, data: Any) -> "TestSuite":
        try:
            return cls(
                tuple(
                    Test(TimedWord.from_json(test["word"]), bool(test["accept"]))
                    for test in data["tests"]
                )
            )
        except (KeyError, TypeError) as err:
            raise ModelError("invalid-suite", "malformed test suite: {}".format(err))


def filter_tests(tests: List[Test]) -> TestSuite:
    """keeps accepted words that are not a proper prefix of another accepted word,
    and rejected words with no rejected proper prefix"""
    accepted = [test.word for test in tests if test.verdict]
    rejected = [test.word for test in tests if not test.verdict]
    kept = []
    for test in tests:
        if test.verdict:
            if any(test.word.is_proper_prefix_of(other) for other in accepted):
                continue
        elif any(other.is_proper_prefix_of(test.word) for other in rejected):
            continue
        kept.append(test)
    return TestSuite(tuple(kept))


def label_tests(data: TestData, oracle: OracleBackend) -> TestSuite:
    """queries every word then filters prefixes, query errors propagate"""
    tests = [Test(word, oracle.query(word)) for word in data.words]
    suite = filter_tests(tests)
    logger.info(
        "labeled {} word(s) with {}: kept {} accepted, {} rejected".format(
            len(tests), oracle.description, len(suite.mba), len(suite.mbr)
        )
    )
    return suite


def failing_tests(
    suite: TestSuite, ta_init: Pta, require_accepting: bool = False
) -> List[Test]:
    """tests on which ta_init disagrees with the oracle"""
    failing = []
    for test in suite.tests:
        if member(ta_init, test.word, require_accepting) != test.verdict:
            failing.append(test)
    return failing
