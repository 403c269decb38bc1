"""
Parameter constraint synthesis from labeled tests

It contains:
- function trans_word: the timed automaton accepting exactly one timed word
- class ProductPta and function sync_product
- class SynthesisResult and function ef_synth: parameter valuations
  reaching a set of locations
- function replay_tw: parameter valuations under which a pta accepts a word
- functions gen_constraints (strict) and gen_constraints_greedy

The word automaton of (a1, d1)...(an, dn) has locations w0..wn and the
edges wi -[a(i+1), x_abs = d(i+1)]-> w(i+1). Replaying a word is reaching
wn in its product with the pta, synchronized on every action.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .defs import ABS_CLOCK, Relation
from .errors import AbstractionInsufficient, SynthesisError
from .model import AtomicGuard, Edge, Guard, LinearParamExpr, Pta, Ta, TimedWord
from .oracle import TestSuite
from .polyhedra import (
    ConvexPolyhedron,
    PolyUnion,
    conjoin,
    negate_union,
    project_onto_params,
)
from .semantics import (
    SymbolicState,
    initial_state,
    parameter_variables,
    successor,
)

logger = logging.getLogger(__name__)


def trans_word(word: TimedWord, alphabet: Optional[Iterable[str]] = None) -> Ta:
    """the word automaton of word, over alphabet (the actions of word by default)"""
    if alphabet is None:
        alphabet = sorted(set(word.actions))
    locations = ["w{}".format(index) for index in range(len(word) + 1)]
    edges = [
        Edge(
            id=index + 1,
            source=locations[index],
            target=locations[index + 1],
            action=action,
            guard=Guard((AtomicGuard(ABS_CLOCK, Relation.EQ, LinearParamExpr.const(time)),)),
        )
        for index, (action, time) in enumerate(word)
    ]
    return Ta.build(
        alphabet=alphabet,
        locations=locations,
        initial=locations[0],
        clocks=(),
        edges=edges,
        accepting=[locations[-1]],
    )


def product_location(left: str, right: str) -> str:
    return "({}, {})".format(left, right)


@dataclass
class ProductPta:
    """synchronized product, with the component locations and edges
    behind every product location and edge (None for an idle component)"""

    pta: Pta
    components: Dict[str, Tuple[str, str]] = field(default_factory=dict)
    edge_components: Dict[int, Tuple[Optional[int], Optional[int]]] = field(
        default_factory=dict
    )

    def locations_with(
        self: "ProductPta", left: Optional[str] = None, right: Optional[str] = None
    ) -> Set[str]:
        """product locations whose components match the given ones"""
        return {
            name
            for name, (first, second) in self.components.items()
            if (left is None or first == left) and (right is None or second == right)
        }


def _conjoin_guards(first: Guard, second: Guard) -> Guard:
    return Guard(first.atoms + second.atoms)


def sync_product(left: Pta, right: Pta, sync: Iterable[str]) -> ProductPta:
    """product of left and right: actions of sync move every component
    having them in its alphabet, other actions interleave"""
    clash = set(left.clocks) & set(right.clocks)
    if clash:
        raise SynthesisError(
            "clock-clash",
            "both components declare clock(s) {}".format(", ".join(sorted(clash))),
        )
    sync = set(sync)
    alphabet = list(left.alphabet) + [a for a in right.alphabet if a not in left.alphabet]
    parameters = list(left.parameters) + [
        p for p in right.parameters if p not in left.parameters
    ]
    components: Dict[str, Tuple[str, str]] = {}
    invariants: Dict[str, Guard] = {}
    for first in left.locations:
        for second in right.locations:
            name = product_location(first, second)
            components[name] = (first, second)
            invariants[name] = _conjoin_guards(left.invariant(first), right.invariant(second))

    edges: List[Edge] = []
    edge_components: Dict[int, Tuple[Optional[int], Optional[int]]] = {}

    def add(
        source: Tuple[str, str],
        target: Tuple[str, str],
        action: str,
        grd: Guard,
        resets: Iterable[str],
        origin: Tuple[Optional[int], Optional[int]],
    ) -> None:
        edge_id = len(edges) + 1
        edges.append(
            Edge(
                edge_id,
                product_location(*source),
                product_location(*target),
                action,
                grd,
                frozenset(resets),
            )
        )
        edge_components[edge_id] = origin

    for action in alphabet:
        in_left = action in left.alphabet
        in_right = action in right.alphabet
        if action in sync and in_left and in_right:
            for first in left.edges:
                if first.action != action:
                    continue
                for second in right.edges:
                    if second.action != action:
                        continue
                    add(
                        (first.source, second.source),
                        (first.target, second.target),
                        action,
                        _conjoin_guards(first.guard, second.guard),
                        first.resets | second.resets,
                        (first.id, second.id),
                    )
            continue
        if in_left:
            for first in left.edges:
                if first.action == action:
                    for second_loc in right.locations:
                        add(
                            (first.source, second_loc),
                            (first.target, second_loc),
                            action,
                            first.guard,
                            first.resets,
                            (first.id, None),
                        )
        if in_right:
            for second in right.edges:
                if second.action == action:
                    for first_loc in left.locations:
                        add(
                            (first_loc, second.source),
                            (first_loc, second.target),
                            action,
                            second.guard,
                            second.resets,
                            (None, second.id),
                        )

    kind = Pta if parameters else Ta
    pta = kind.build(
        alphabet=alphabet,
        locations=list(components),
        initial=product_location(left.initial, right.initial),
        clocks=list(left.clocks) + list(right.clocks),
        edges=edges,
        parameters=parameters,
        invariants=invariants,
        accepting=[
            name
            for name, (first, second) in components.items()
            if first in left.accepting or second in right.accepting
        ],
    )
    return ProductPta(pta, components, edge_components)


@dataclass(frozen=True)
class SynthesisResult:
    """constraint over the parameters; incomplete when the depth bound
    was reached with states left to explore"""

    constraint: PolyUnion
    incomplete: bool = False
    explored_depth: int = 0


def ef_synth(pta: Pta, targets: Iterable[str], depth_bound: int) -> SynthesisResult:
    """valuations (with nonnegative parameters) for which some run of pta
    reaches a target location within depth_bound edges.
    Exploration is breadth first and stops at target states"""
    targets = set(targets)
    unknown = targets - set(pta.locations)
    if unknown:
        raise SynthesisError(
            "unknown-location",
            "target location(s) {} not in the automaton".format(", ".join(sorted(unknown))),
        )
    params = parameter_variables(pta)
    found: List[ConvexPolyhedron] = []
    frontier: Deque[Tuple[SymbolicState, int]] = deque([(initial_state(pta), 0)])
    incomplete = False
    explored = 0
    while frontier:
        state, depth = frontier.popleft()
        explored = max(explored, depth)
        if state.location in targets:
            found.append(project_onto_params(state.zone))
            continue
        following = [
            succ
            for succ in (successor(state, edge, pta) for edge in pta.outgoing(state.location))
            if succ is not None
        ]
        if depth >= depth_bound:
            if following:
                incomplete = True
            continue
        for succ in following:
            frontier.append((succ, depth + 1))
    if incomplete:
        logger.warning("parameter synthesis stopped at depth bound {}".format(depth_bound))
    return SynthesisResult(PolyUnion.of(params, found).prune(), incomplete, explored)


def replay_tw(pta: Pta, word: TimedWord) -> PolyUnion:
    """valuations v such that word is a run of pta[v]"""
    params = parameter_variables(pta)
    if any(action not in pta.alphabet for action in word.actions):
        return PolyUnion.bottom(params)
    word_ta = trans_word(word, pta.alphabet)
    product = sync_product(word_ta, pta, pta.alphabet)
    targets = product.locations_with(left="w{}".format(len(word)))
    result = ef_synth(product.pta, targets, len(word) + 1)
    if result.incomplete or result.explored_depth > len(word):
        raise SynthesisError(
            "replay-overflow", "replaying {} went past the word length".format(word)
        )
    return result.constraint


def parameter_domain(pta: Pta) -> PolyUnion:
    """every parameter nonnegative"""
    return PolyUnion.single(ConvexPolyhedron.nonnegative(parameter_variables(pta)))


def gen_constraints(pta: Pta, suite: TestSuite) -> PolyUnion:
    """valuations accepting every word of suite.mba and rejecting
    every word of suite.mbr. An empty result raises AbstractionInsufficient"""
    result = parameter_domain(pta)
    for word in suite.mba:
        result = conjoin(result, replay_tw(pta, word)).prune()
        if result.is_empty():
            raise _insufficient(word, True)
    for word in suite.mbr:
        result = conjoin(result, negate_union(replay_tw(pta, word))).prune()
        if result.is_empty():
            raise _insufficient(word, False)
    logger.info("constraint has {} disjunct(s)".format(len(result)))
    return result


def _insufficient(word: TimedWord, accepted: bool) -> AbstractionInsufficient:
    return AbstractionInsufficient(
        "abstraction-insufficient",
        "no valuation can {} {} together with the previous tests\n"
        "rerun with --greedy or widen the abstraction".format(
            "accept" if accepted else "reject", word
        ),
    )


def default_order(suite: TestSuite) -> List[Tuple[TimedWord, bool]]:
    """must-accept words first, then must-reject, each by length then lexicographically"""
    accepted = sorted(suite.mba, key=TimedWord.sort_key)
    rejected = sorted(suite.mbr, key=TimedWord.sort_key)
    return [(word, True) for word in accepted] + [(word, False) for word in rejected]


def gen_constraints_greedy(
    pta: Pta,
    suite: TestSuite,
    order: Optional[Sequence[Tuple[TimedWord, bool]]] = None,
) -> Tuple[PolyUnion, List[TimedWord]]:
    """adds tests one by one, discarding any that would make the constraint empty.
    Returns the constraint and the discarded words"""
    if order is None:
        order = default_order(suite)
    result = parameter_domain(pta)
    discarded: List[TimedWord] = []
    for word, accepted in order:
        constraint = replay_tw(pta, word)
        if not accepted:
            constraint = negate_union(constraint)
        candidate = conjoin(result, constraint).prune()
        if candidate.is_empty():
            logger.info("discarded {} test {}".format("accepted" if accepted else "rejected", word))
            discarded.append(word)
            continue
        result = candidate
    return result, discarded
