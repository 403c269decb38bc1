"""
Test data generation from the extended parametric zone graph

Every path of the graph gives an action sequence, every node of the path
a set of candidate timestamps around its arrival interval. The timed words
are the nondecreasing combinations of these candidates.

It contains:
- enum PolicyKind and class Policy
- function candidate_times
- classes Provenance and TestData
- function generate_test_data
"""

import enum
import itertools
import json
import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Set, Tuple

from .errors import ModelError, TestDataError
from .model import TimedWord
from .polyhedra import RationalInterval
from .semantics import Epzg

logger = logging.getLogger(__name__)

RANDOM_GRANULARITY = 100


@enum.unique
class PolicyKind(enum.Enum):
    """Timestamp selection policies:
    | MINMAX1 -> bounds of the interval, plus and minus one
    | MINMAX2 -> MINMAX1 and the midpoint
    | MINMAX4 -> MINMAX2 and the quarter points
    | RANDOM -> uniform samples inside the interval"""

    MINMAX1 = "minmax1"
    MINMAX2 = "minmax2"
    MINMAX4 = "minmax4"
    RANDOM = "random"


_ALIASES = {
    "minmaxpm1": PolicyKind.MINMAX1,
    "minmax±1": PolicyKind.MINMAX1,
    "pm1": PolicyKind.MINMAX1,
}


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind = PolicyKind.MINMAX1
    seed: int = 0
    samples_per_state: int = 3

    @staticmethod
    def parse(text: str, seed: int = 0, samples_per_state: int = 3) -> "Policy":
        """reads minmax1 (or MinMaxPm1), minmax2, minmax4 or random"""
        key = text.strip().lower()
        kind = _ALIASES.get(key)
        if kind is None:
            try:
                kind = PolicyKind(key)
            except ValueError:
                raise TestDataError(
                    "unknown-policy",
                    "unknown policy '{}' (expected one of {})".format(
                        text, ", ".join(member.value for member in PolicyKind)
                    ),
                )
        if samples_per_state < 1:
            raise TestDataError(
                "invalid-policy", "samples per state must be positive"
            )
        return Policy(kind, seed, samples_per_state)

    def __str__(self: "Policy") -> str:
        if self.kind is PolicyKind.RANDOM:
            return "random(seed={}, samples={})".format(self.seed, self.samples_per_state)
        return self.kind.value


def effective_bounds(
    interval: RationalInterval, horizon: Fraction
) -> Tuple[Fraction, Fraction]:
    """(m, M) with an infinite M replaced by min(horizon, m + horizon)"""
    low = interval.lower if interval.lower is not None else Fraction(0)
    if interval.upper is not None:
        return low, interval.upper
    return low, max(low, min(horizon, low + horizon))


def candidate_times(
    interval: RationalInterval,
    policy: Policy,
    horizon: Fraction = Fraction(100),
    rng: Optional[random.Random] = None,
) -> List[Fraction]:
    """candidate timestamps for a state entered during interval, ascending.
    They may lie outside the interval on purpose, negative ones are dropped"""
    if interval.is_empty():
        raise TestDataError("empty-interval", "no time in {}".format(interval))
    low, high = effective_bounds(interval, horizon)
    if policy.kind is PolicyKind.RANDOM:
        if rng is None:
            rng = random.Random(policy.seed)
        first = math.ceil(low * RANDOM_GRANULARITY)
        last = math.floor(high * RANDOM_GRANULARITY)
        if first > last:
            return [low]
        values = {
            Fraction(rng.randint(first, last), RANDOM_GRANULARITY)
            for _ in range(policy.samples_per_state)
        }
    else:
        values = {low - 1, low, low + 1, high - 1, high, high + 1}
        if policy.kind in (PolicyKind.MINMAX2, PolicyKind.MINMAX4):
            values.add((low + high) / 2)
        if policy.kind is PolicyKind.MINMAX4:
            values.add(low + (high - low) / 4)
            values.add(low + 3 * (high - low) / 4)
    return sorted(value for value in values if value >= 0)


@dataclass(frozen=True)
class Provenance:
    """where a word comes from: graph nodes, automaton edges
    and the index of the candidate chosen at each node"""

    nodes: Tuple[int, ...]
    edges: Tuple[int, ...]
    choices: Tuple[int, ...]


@dataclass(frozen=True)
class TestData:
    """deduplicated timed words, in generation order"""

    __test__ = False  # not a pytest class

    words: Tuple[TimedWord, ...]
    provenance: Tuple[Provenance, ...] = ()
    substituted: Tuple[int, ...] = ()

    def __len__(self: "TestData") -> int:
        return len(self.words)

    def to_jsonl(self: "TestData") -> str:
        lines = []
        for index, word in enumerate(self.words):
            entry: Dict[str, object] = {"word": word.to_json()}
            if index < len(self.provenance):
                prov = self.provenance[index]
                entry["path"] = list(prov.nodes)
                entry["edges"] = list(prov.edges)
                entry["choices"] = list(prov.choices)
            lines.append(json.dumps(entry))
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_jsonl(cls, text: str) -> "TestData":
        words = []
        provenance = []
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                words.append(TimedWord.from_json(entry["word"]))
                if "path" in entry:
                    provenance.append(
                        Provenance(
                            tuple(entry["path"]),
                            tuple(entry["edges"]),
                            tuple(entry["choices"]),
                        )
                    )
            except (json.JSONDecodeError, KeyError, TypeError) as err:
                raise ModelError(
                    "invalid-testdata", "line {}: malformed test word: {}".format(number, err)
                )
        if len(provenance) != len(words):
            provenance = []
        return cls(tuple(words), tuple(provenance))


def generate_test_data(
    epzg: Epzg,
    policy: Policy,
    depth: Optional[int] = None,
    cap: Optional[int] = 256,
    horizon: Fraction = Fraction(100),
    include_empty: bool = False,
) -> TestData:
    """timed words along every path of epzg with at most depth edges
    (the depth of the graph by default). Each path contributes at most cap
    words (None for no cap), taken in lexicographic order of candidate indices"""
    if depth is None:
        depth = epzg.depth
    if depth > epzg.depth:
        logger.warning(
            "test depth {} exceeds zone graph depth {}".format(depth, epzg.depth)
        )
    if cap is not None and cap < 1:
        raise TestDataError("invalid-cap", "the path cap must be positive")
    rng = random.Random(policy.seed)
    candidates: Dict[int, List[Fraction]] = {}
    unbounded = set(epzg.unbounded_nodes())
    substituted: Set[int] = set()

    def times_of(node_id: int) -> List[Fraction]:
        if node_id not in candidates:
            if node_id in unbounded:
                substituted.add(node_id)
            candidates[node_id] = candidate_times(
                epzg.nodes[node_id].arrival, policy, horizon, rng
            )
        return candidates[node_id]

    seen: Set[TimedWord] = set()
    words: List[TimedWord] = []
    provenance: List[Provenance] = []
    for nodes, edges in epzg.paths(depth, include_empty):
        actions = [epzg.pta.edge(edge).action for edge in edges]
        lists = [times_of(node) for node in nodes[1:]]
        emitted = 0
        for choice in itertools.product(*(range(len(times)) for times in lists)):
            stamps = [lists[index][pick] for index, pick in enumerate(choice)]
            if any(stamps[i] > stamps[i + 1] for i in range(len(stamps) - 1)):
                continue
            if cap is not None and emitted >= cap:
                break
            emitted += 1
            word = TimedWord(tuple(zip(actions, stamps)))
            if word in seen:
                continue
            seen.add(word)
            words.append(word)
            provenance.append(Provenance(nodes, edges, tuple(choice)))
    if substituted:
        logger.info(
            "horizon {} used for unbounded state(s) {}".format(
                horizon, ", ".join("s{}".format(node + 1) for node in sorted(substituted))
            )
        )
    logger.info("generated {} test word(s) with policy {}".format(len(words), policy))
    return TestData(tuple(words), tuple(provenance), tuple(sorted(substituted)))
