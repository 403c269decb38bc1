"""
Timed automata, parametric timed automata and timed words

It contains:
- class LinearParamExpr: sum(coeff * parameter) + constant
- class AtomicGuard and class Guard: conjunctive clock constraints
- class Edge, class Pta and its subclass Ta (a Pta without parameters)
- class TimedWord
- functions validate and check, apply_valuation, rescale_to_integers,
  abstract_guards
- JSON readers and writers for automata, valuations and timed words

Rational constants are written as JSON integers when integral,
"num/den" strings otherwise. Everything is immutable.
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (
    Any,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Set,
    Tuple,
    Type,
    TypeVar,
)

from .defs import (
    ABS_CLOCK,
    Number,
    Relation,
    format_fraction,
    json_number,
    lcm_of_denominators,
    to_fraction,
)
from .errors import ModelError

logger = logging.getLogger(__name__)

ParamValuation = Dict[str, Fraction]

STRATEGIES = ("all", "shared-per-location", "manual")


# ===============================================
# Guards
# ===============================================


@dataclass(frozen=True)
class LinearParamExpr:
    """sum(coeff * parameter) + constant, coefficients sorted by parameter"""

    coeffs: Tuple[Tuple[str, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    @staticmethod
    def make(coeffs: Mapping[str, Number], constant: Number = 0) -> "LinearParamExpr":
        items = sorted(
            (name, to_fraction(coeff))
            for name, coeff in coeffs.items()
            if to_fraction(coeff) != 0
        )
        return LinearParamExpr(tuple(items), to_fraction(constant))

    @staticmethod
    def const(value: Number) -> "LinearParamExpr":
        return LinearParamExpr((), to_fraction(value))

    @staticmethod
    def param(name: str) -> "LinearParamExpr":
        return LinearParamExpr(((name, Fraction(1)),), Fraction(0))

    @property
    def is_constant(self: "LinearParamExpr") -> bool:
        return not self.coeffs

    @property
    def parameters(self: "LinearParamExpr") -> FrozenSet[str]:
        return frozenset(name for name, _ in self.coeffs)

    def evaluate(self: "LinearParamExpr", valuation: Mapping[str, Fraction]) -> Fraction:
        total = self.constant
        for name, coeff in self.coeffs:
            total += coeff * valuation[name]
        return total

    def scale(self: "LinearParamExpr", factor: Fraction) -> "LinearParamExpr":
        return LinearParamExpr(
            tuple((name, coeff * factor) for name, coeff in self.coeffs),
            self.constant * factor,
        )

    def __str__(self: "LinearParamExpr") -> str:
        parts: List[str] = []
        for name, coeff in self.coeffs:
            magnitude = abs(coeff)
            text = name if magnitude == 1 else "{}*{}".format(format_fraction(magnitude), name)
            if not parts:
                parts.append(text if coeff > 0 else "-" + text)
            else:
                parts.append(("+ " if coeff > 0 else "- ") + text)
        if not parts:
            return format_fraction(self.constant)
        if self.constant > 0:
            parts.append("+ " + format_fraction(self.constant))
        elif self.constant < 0:
            parts.append("- " + format_fraction(-self.constant))
        return " ".join(parts)


@dataclass(frozen=True)
class AtomicGuard:
    """clock <rel> rhs"""

    clock: str
    rel: Relation
    rhs: LinearParamExpr

    def __str__(self: "AtomicGuard") -> str:
        return "{} {} {}".format(self.clock, self.rel.value, self.rhs)


@dataclass(frozen=True)
class Guard:
    """conjunction of atomic guards, the empty conjunction is true"""

    atoms: Tuple[AtomicGuard, ...] = ()

    @property
    def parameters(self: "Guard") -> FrozenSet[str]:
        return frozenset(name for atom in self.atoms for name in atom.rhs.parameters)

    def __str__(self: "Guard") -> str:
        if not self.atoms:
            return "true"
        return " & ".join(str(atom) for atom in self.atoms)


TRUE_GUARD = Guard()


def guard(*atoms: Tuple[str, str, Any]) -> Guard:
    """shorthand: guard(("x", "<=", "p3"), ("y", ">=", 4))
    the right hand side is a number, a parameter name or a LinearParamExpr"""
    result = []
    for clock, rel, rhs in atoms:
        if isinstance(rhs, LinearParamExpr):
            expr = rhs
        elif isinstance(rhs, str) and not rhs.lstrip("-").replace("/", "").isdigit():
            expr = LinearParamExpr.param(rhs)
        else:
            expr = LinearParamExpr.const(rhs)
        result.append(AtomicGuard(clock, Relation.from_symbol(rel), expr))
    return Guard(tuple(result))


# ===============================================
# Automata
# ===============================================


@dataclass(frozen=True)
class Edge:
    id: int
    source: str
    target: str
    action: str
    guard: Guard = TRUE_GUARD
    resets: FrozenSet[str] = frozenset()

    def __str__(self: "Edge") -> str:
        resets = ""
        if self.resets:
            resets = ", {{{}}} := 0".format(", ".join(sorted(self.resets)))
        return "e{}: {} -[{}, {}{}]-> {}".format(
            self.id, self.source, self.action, self.guard, resets, self.target
        )


PtaT = TypeVar("PtaT", bound="Pta")


@dataclass(frozen=True)
class Pta:
    """A parametric timed automaton.
    invariants is aligned with locations, use invariant(location)
    and Pta.build to construct from a mapping"""

    alphabet: Tuple[str, ...]
    locations: Tuple[str, ...]
    initial: str
    accepting: FrozenSet[str]
    clocks: Tuple[str, ...]
    parameters: Tuple[str, ...]
    invariants: Tuple[Guard, ...]
    edges: Tuple[Edge, ...]

    @classmethod
    def build(
        cls: Type[PtaT],
        alphabet: Iterable[str],
        locations: Iterable[str],
        initial: str,
        clocks: Iterable[str],
        edges: Iterable[Edge],
        parameters: Iterable[str] = (),
        invariants: Optional[Mapping[str, Guard]] = None,
        accepting: Iterable[str] = (),
    ) -> PtaT:
        locations = tuple(locations)
        invariants = invariants or {}
        return cls(
            alphabet=tuple(alphabet),
            locations=locations,
            initial=initial,
            accepting=frozenset(accepting),
            clocks=tuple(clocks),
            parameters=tuple(parameters),
            invariants=tuple(invariants.get(loc, TRUE_GUARD) for loc in locations),
            edges=tuple(edges),
        )

    def invariant(self: "Pta", location: str) -> Guard:
        try:
            return self.invariants[self.locations.index(location)]
        except ValueError:
            raise ModelError("unknown-location", "no location named '{}'".format(location))

    def outgoing(self: "Pta", location: str) -> List[Edge]:
        """edges leaving location, in declaration order"""
        return [edge for edge in self.edges if edge.source == location]

    def edge(self: "Pta", edge_id: int) -> Edge:
        for candidate in self.edges:
            if candidate.id == edge_id:
                return candidate
        raise ModelError("unknown-edge", "no edge with id {}".format(edge_id))

    @property
    def is_parametric(self: "Pta") -> bool:
        return bool(self.parameters)

    def constants(self: "Pta") -> List[Fraction]:
        """every constant and coefficient appearing in guards and invariants"""
        values: List[Fraction] = []
        for grd in list(self.invariants) + [edge.guard for edge in self.edges]:
            for atom in grd.atoms:
                values.append(atom.rhs.constant)
                values.extend(coeff for _, coeff in atom.rhs.coeffs)
        return values

    def map_guards(
        self: "Pta", transform: Any, parameters: Sequence[str], kind: "Type[PtaT]"
    ) -> PtaT:
        """rebuilds the automaton applying transform(atom) -> AtomicGuard
        to every atom of every guard and invariant"""

        def rewrite(grd: Guard) -> Guard:
            return Guard(tuple(transform(atom) for atom in grd.atoms))

        return kind(
            alphabet=self.alphabet,
            locations=self.locations,
            initial=self.initial,
            accepting=self.accepting,
            clocks=self.clocks,
            parameters=tuple(parameters),
            invariants=tuple(rewrite(grd) for grd in self.invariants),
            edges=tuple(
                Edge(e.id, e.source, e.target, e.action, rewrite(e.guard), e.resets)
                for e in self.edges
            ),
        )


@dataclass(frozen=True)
class Ta(Pta):
    """A timed automaton: a Pta whose parameter set is empty"""

    def __post_init__(self: "Ta") -> None:
        if self.parameters:
            raise ModelError(
                "parametric-automaton",
                "a timed automaton cannot have parameters ({})".format(
                    ", ".join(self.parameters)
                ),
            )


def _constant_atom_satisfiable(rel: Relation, value: Fraction) -> bool:
    """is clock <rel> value satisfiable by a nonnegative clock?"""
    if rel is Relation.LT:
        return value > 0
    if rel in (Relation.LE, Relation.EQ):
        return value >= 0
    return True


def validate(pta: Pta) -> List[str]:
    """lists every well-formedness violation, empty when the automaton is valid
    each entry reads "kind: details" """
    violations: List[str] = []
    if not pta.locations:
        violations.append("missing-initial: the automaton has no location")
    elif pta.initial not in pta.locations:
        violations.append(
            "missing-initial: initial location '{}' is not declared".format(pta.initial)
        )
    for kind, names in (
        ("location", pta.locations),
        ("clock", pta.clocks),
        ("parameter", pta.parameters),
        ("action", pta.alphabet),
    ):
        seen: Set[str] = set()
        for name in names:
            if name in seen:
                violations.append("duplicate-name: {} '{}' is declared twice".format(kind, name))
            seen.add(name)
    for name in set(pta.clocks) & set(pta.parameters):
        violations.append("duplicate-name: '{}' is both a clock and a parameter".format(name))
    if ABS_CLOCK in pta.clocks:
        violations.append(
            "reserved-clock: '{}' is implicit and cannot be declared".format(ABS_CLOCK)
        )
    for loc in sorted(pta.accepting - set(pta.locations)):
        violations.append("unknown-location: accepting location '{}' is not declared".format(loc))

    clocks = set(pta.clocks) | {ABS_CLOCK}
    params = set(pta.parameters)

    def check_guard(grd: Guard, where: str) -> None:
        for atom in grd.atoms:
            if atom.clock not in clocks:
                violations.append(
                    "unknown-clock: {} uses undeclared clock '{}'".format(where, atom.clock)
                )
            for name, coeff in atom.rhs.coeffs:
                if name not in params:
                    violations.append(
                        "unknown-parameter: {} uses undeclared parameter '{}'".format(where, name)
                    )
                if coeff.denominator != 1:
                    violations.append(
                        "non-integer-coefficient: {} has coefficient {} for '{}'".format(
                            where, format_fraction(coeff), name
                        )
                    )
            if atom.rhs.is_constant and not _constant_atom_satisfiable(
                atom.rel, atom.rhs.constant
            ):
                violations.append(
                    "unsatisfiable-constraint: {} requires {} on a nonnegative clock".format(
                        where, atom
                    )
                )

    for loc, inv in zip(pta.locations, pta.invariants):
        check_guard(inv, "invariant of {}".format(loc))
    if pta.initial in pta.locations:
        for atom in pta.invariant(pta.initial).atoms:
            if atom.rhs.is_constant and not atom.rel.holds(Fraction(0), atom.rhs.constant):
                violations.append(
                    "initial-invariant-excludes-zero: {} does not hold initially".format(atom)
                )

    ids: Set[int] = set()
    for edge in pta.edges:
        where = "edge {}".format(edge.id)
        if edge.id in ids:
            violations.append("duplicate-edge-id: {} is used twice".format(edge.id))
        ids.add(edge.id)
        for end in (edge.source, edge.target):
            if end not in pta.locations:
                violations.append(
                    "unknown-location: {} uses undeclared location '{}'".format(where, end)
                )
        if edge.action == "":
            violations.append("epsilon-action: {} has an empty action".format(where))
        elif edge.action not in pta.alphabet:
            violations.append(
                "unknown-action: {} uses action '{}' not in the alphabet".format(where, edge.action)
            )
        for name in sorted(edge.resets):
            if name == ABS_CLOCK:
                violations.append("reset-absolute-clock: {} resets '{}'".format(where, ABS_CLOCK))
            elif name not in pta.clocks:
                violations.append(
                    "unknown-clock: {} resets undeclared clock '{}'".format(where, name)
                )
        check_guard(edge.guard, where)
    return violations


def check(pta: PtaT) -> PtaT:
    """raises ModelError listing all violations, returns pta when valid"""
    violations = validate(pta)
    if violations:
        raise ModelError("invalid-model", "invalid automaton:\n" + "\n".join(violations))
    return pta


# ===============================================
# Valuations and abstraction
# ===============================================


def apply_valuation(pta: Pta, valuation: Mapping[str, Fraction], integral: bool = False) -> Ta:
    """pta[valuation]: substitutes every parameter.
    Constants are kept exact, integral=True rescales them to integers
    (see rescale_to_integers)"""
    missing = [name for name in pta.parameters if name not in valuation]
    if missing:
        raise ModelError(
            "missing-parameter", "no value for parameter(s) {}".format(", ".join(missing))
        )
    for name in pta.parameters:
        if valuation[name] < 0:
            raise ModelError(
                "negative-parameter",
                "parameter {} = {} is negative".format(name, format_fraction(valuation[name])),
            )

    def substitute(atom: AtomicGuard) -> AtomicGuard:
        value = atom.rhs.evaluate(valuation)
        return AtomicGuard(atom.clock, atom.rel, LinearParamExpr.const(value))

    ta = pta.map_guards(substitute, (), Ta)
    if integral:
        ta, _ = rescale_to_integers(ta)
    return ta


def rescale_to_integers(ta: Ta) -> Tuple[Ta, int]:
    """multiplies every constant by the lcm of their denominators.
    Returns the integer automaton and the factor, timed words have to be
    scaled by the same factor (TimedWord.scale)"""
    factor = lcm_of_denominators(ta.constants())
    if factor == 1:
        return ta, 1
    scaled = ta.map_guards(
        lambda atom: AtomicGuard(atom.clock, atom.rel, atom.rhs.scale(Fraction(factor))),
        (),
        Ta,
    )
    return scaled, factor


def constant_occurrences(ta: Pta) -> List[Tuple[str, Fraction]]:
    """(occurrence id, constant) of every parameter-free atom,
    invariants first (in location order), then edge guards.
    Ids read "inv:<location>:<index>" and "edge:<edge id>:<index>" """
    result = []
    for loc, inv in zip(ta.locations, ta.invariants):
        for index, atom in enumerate(inv.atoms):
            if atom.rhs.is_constant:
                result.append(("inv:{}:{}".format(loc, index), atom.rhs.constant))
    for edge in ta.edges:
        for index, atom in enumerate(edge.guard.atoms):
            if atom.rhs.is_constant:
                result.append(("edge:{}:{}".format(edge.id, index), atom.rhs.constant))
    return result


class _UnionFind:
    def __init__(self: "_UnionFind", items: Iterable[str]) -> None:
        self.parent = {item: item for item in items}

    def find(self: "_UnionFind", item: str) -> str:
        while self.parent[item] != item:
            self.parent[item] = self.parent[self.parent[item]]
            item = self.parent[item]
        return item

    def union(self: "_UnionFind", left: str, right: str) -> None:
        self.parent[self.find(right)] = self.find(left)


def _shared_per_location(
    ta: Ta, occurrences: Mapping[str, Fraction], invariant_only: bool
) -> Dict[str, str]:
    """groups occurrences of equal constants around each location
    (its invariant, entering and leaving edges). Returns occurrence -> class root"""
    groups = _UnionFind(occurrences)
    for loc in ta.locations:
        around = [occ for occ in occurrences if occ.startswith("inv:{}:".format(loc))]
        for edge in ta.edges:
            if loc in (edge.source, edge.target):
                prefix = "edge:{}:".format(edge.id)
                around.extend(occ for occ in occurrences if occ.startswith(prefix))
        by_value: Dict[Fraction, str] = {}
        for occ in around:
            value = occurrences[occ]
            if value in by_value:
                groups.union(by_value[value], occ)
            else:
                by_value[value] = occ
    classes = {occ: groups.find(occ) for occ in occurrences}
    if not invariant_only:
        with_edges = {root for occ, root in classes.items() if occ.startswith("edge:")}
        classes = {occ: root for occ, root in classes.items() if root in with_edges}
    return classes


def abstract_guards(
    ta: Ta,
    strategy: str = "shared-per-location",
    manual_map: Optional[Mapping[str, str]] = None,
    invariant_only: bool = False,
) -> Tuple[Pta, ParamValuation]:
    """replaces constants of ta by fresh parameters.
    Strategies:
    - "all": one parameter per occurrence
    - "shared-per-location": occurrences of the same constant on the invariant,
      entering and leaving edges of a location share a parameter.
      Constants found only in invariants are kept unless invariant_only is set
    - "manual": manual_map maps occurrence ids to parameter names,
      unmapped occurrences are kept
    Returns (pta, v_init) with pta[v_init] equal to ta"""
    if ta.is_parametric:
        raise ModelError("parametric-automaton", "abstraction expects a timed automaton")
    occurrences = dict(constant_occurrences(ta))
    order = [occ for occ, _ in constant_occurrences(ta)]
    assignment: Dict[str, str] = {}
    if strategy == "all":
        assignment = {occ: "p{}".format(i + 1) for i, occ in enumerate(order)}
    elif strategy == "shared-per-location":
        classes = _shared_per_location(ta, occurrences, invariant_only)
        names: Dict[str, str] = {}
        for occ in order:
            if occ not in classes:
                continue
            root = classes[occ]
            if root not in names:
                names[root] = "p{}".format(len(names) + 1)
            assignment[occ] = names[root]
    elif strategy == "manual":
        if manual_map is None:
            raise ModelError("missing-abstraction-map", "manual abstraction needs a map")
        for occ, name in manual_map.items():
            if occ not in occurrences:
                raise ModelError(
                    "unknown-occurrence",
                    "'{}' is not a constant occurrence (known: {})".format(occ, ", ".join(order)),
                )
            assignment[occ] = name
    else:
        raise ModelError(
            "unknown-strategy",
            "unknown abstraction strategy '{}' (expected one of {})".format(
                strategy, ", ".join(STRATEGIES)
            ),
        )

    v_init: ParamValuation = {}
    for occ, name in assignment.items():
        if name in ta.clocks or name == ABS_CLOCK:
            raise ModelError("duplicate-name", "parameter '{}' clashes with a clock".format(name))
        value = occurrences[occ]
        if name in v_init and v_init[name] != value:
            raise ModelError(
                "inconsistent-parameter",
                "parameter {} stands for both {} and {}".format(
                    name, format_fraction(v_init[name]), format_fraction(value)
                ),
            )
        v_init[name] = value
    if strategy == "manual":
        parameters = sorted(v_init)
    else:
        parameters = sorted(v_init, key=lambda name: int(name[1:]))

    def rewrite(prefix: str, atoms: Tuple[AtomicGuard, ...]) -> Guard:
        result = []
        for index, atom in enumerate(atoms):
            occ = "{}:{}".format(prefix, index)
            if occ in assignment:
                atom = AtomicGuard(atom.clock, atom.rel, LinearParamExpr.param(assignment[occ]))
            result.append(atom)
        return Guard(tuple(result))

    pta = Pta(
        alphabet=ta.alphabet,
        locations=ta.locations,
        initial=ta.initial,
        accepting=ta.accepting,
        clocks=ta.clocks,
        parameters=tuple(parameters),
        invariants=tuple(
            rewrite("inv:{}".format(loc), inv.atoms)
            for loc, inv in zip(ta.locations, ta.invariants)
        ),
        edges=tuple(
            Edge(
                e.id,
                e.source,
                e.target,
                e.action,
                rewrite("edge:{}".format(e.id), e.guard.atoms),
                e.resets,
            )
            for e in ta.edges
        ),
    )
    logger.info(
        "abstraction '{}' introduced {} parameter(s) for {} occurrence(s)".format(
            strategy, len(parameters), len(order)
        )
    )
    return pta, v_init


def parse_abstraction(spec: str) -> Tuple[str, Optional[Dict[str, str]]]:
    """reads "all", "shared-per-location" or "manual:<path>" into
    (strategy, manual map), the map file is a JSON object occurrence -> name"""
    strategy, _, path = spec.partition(":")
    if strategy != "manual":
        if path or strategy not in STRATEGIES:
            raise ModelError(
                "unknown-strategy",
                "unknown abstraction '{}'\n"
                "expected all, shared-per-location or manual:<path>".format(spec),
            )
        return strategy, None
    if not path:
        raise ModelError("missing-abstraction-map", "manual abstraction needs a map: manual:<path>")
    data = read_json(path)
    if not isinstance(data, dict) or not all(isinstance(v, str) for v in data.values()):
        raise ModelError(
            "invalid-abstraction-map",
            "{}: expected an object mapping occurrences to names".format(path),
        )
    return strategy, {str(key): value for key, value in data.items()}


# ===============================================
# Timed words
# ===============================================


@dataclass(frozen=True)
class TimedWord:
    """A finite sequence of (action, absolute timestamp),
    timestamps are nonnegative and nondecreasing"""

    steps: Tuple[Tuple[str, Fraction], ...] = field(default=())

    def __post_init__(self: "TimedWord") -> None:
        previous = Fraction(0)
        for action, time in self.steps:
            if time < 0:
                raise ModelError(
                    "negative-timestamp",
                    "timestamp {} of '{}' is negative".format(format_fraction(time), action),
                )
            if time < previous:
                raise ModelError(
                    "decreasing-timestamps",
                    "timestamp {} of '{}' is smaller than {}".format(
                        format_fraction(time), action, format_fraction(previous)
                    ),
                )
            previous = time

    @classmethod
    def of(cls, pairs: Iterable[Tuple[str, Number]]) -> "TimedWord":
        return cls(tuple((action, to_fraction(time)) for action, time in pairs))

    def __len__(self: "TimedWord") -> int:
        return len(self.steps)

    def __iter__(self: "TimedWord") -> Iterator[Tuple[str, Fraction]]:
        return iter(self.steps)

    @property
    def actions(self: "TimedWord") -> Tuple[str, ...]:
        return tuple(action for action, _ in self.steps)

    @property
    def timestamps(self: "TimedWord") -> Tuple[Fraction, ...]:
        return tuple(time for _, time in self.steps)

    def prefix(self: "TimedWord", length: int) -> "TimedWord":
        return TimedWord(self.steps[:length])

    def is_proper_prefix_of(self: "TimedWord", other: "TimedWord") -> bool:
        return len(self) < len(other) and other.steps[: len(self)] == self.steps

    def extend(self: "TimedWord", action: str, time: Number) -> "TimedWord":
        return TimedWord(self.steps + ((action, to_fraction(time)),))

    def sort_key(self: "TimedWord") -> Tuple[int, Tuple[Tuple[str, Fraction], ...]]:
        """length first, then lexicographic"""
        return (len(self.steps), self.steps)

    def to_json(self: "TimedWord") -> List[List[str]]:
        return [[action, format_fraction(time)] for action, time in self.steps]

    @classmethod
    def from_json(cls, data: Any) -> "TimedWord":
        try:
            return cls.of((str(action), time) for action, time in data)
        except (TypeError, ValueError) as err:
            raise ModelError("invalid-word", "malformed timed word {}: {}".format(data, err))

    def __str__(self: "TimedWord") -> str:
        if not self.steps:
            return "ε"
        return "".join(
            "({}, {})".format(action, format_fraction(time)) for action, time in self.steps
        )


# ===============================================
# JSON
# ===============================================


def guard_to_json(grd: Guard) -> List[Dict[str, Any]]:
    return [
        {
            "clock": atom.clock,
            "rel": atom.rel.value,
            "coeffs": {name: json_number(coeff) for name, coeff in atom.rhs.coeffs},
            "const": json_number(atom.rhs.constant),
        }
        for atom in grd.atoms
    ]


def guard_from_json(data: Any) -> Guard:
    return Guard(
        tuple(
            AtomicGuard(
                str(atom["clock"]),
                Relation.from_symbol(atom["rel"]),
                LinearParamExpr.make(atom.get("coeffs", {}), atom.get("const", 0)),
            )
            for atom in data
        )
    )


def pta_to_json(pta: Pta) -> Dict[str, Any]:
    return {
        "alphabet": list(pta.alphabet),
        "clocks": list(pta.clocks),
        "parameters": list(pta.parameters),
        "locations": [
            {
                "name": loc,
                "invariant": guard_to_json(inv),
                "accepting": loc in pta.accepting,
            }
            for loc, inv in zip(pta.locations, pta.invariants)
        ],
        "initial": pta.initial,
        "edges": [
            {
                "id": edge.id,
                "source": edge.source,
                "target": edge.target,
                "action": edge.action,
                "guard": guard_to_json(edge.guard),
                "resets": sorted(edge.resets),
            }
            for edge in pta.edges
        ],
    }


def pta_from_json(data: Any) -> Pta:
    """builds and checks an automaton, a Ta when there are no parameters"""
    try:
        locations = data["locations"]
        parameters = tuple(str(name) for name in data.get("parameters", []))
        kind: Type[Pta] = Pta if parameters else Ta
        pta = kind(
            alphabet=tuple(str(action) for action in data["alphabet"]),
            locations=tuple(str(loc["name"]) for loc in locations),
            initial=str(data["initial"]),
            accepting=frozenset(
                str(loc["name"]) for loc in locations if loc.get("accepting", False)
            ),
            clocks=tuple(str(name) for name in data.get("clocks", [])),
            parameters=parameters,
            invariants=tuple(guard_from_json(loc.get("invariant", [])) for loc in locations),
            edges=tuple(
                Edge(
                    id=int(edge["id"]) if "id" in edge else index + 1,
                    source=str(edge["source"]),
                    target=str(edge["target"]),
                    action=str(edge["action"]),
                    guard=guard_from_json(edge.get("guard", [])),
                    resets=frozenset(str(name) for name in edge.get("resets", [])),
                )
                for index, edge in enumerate(data["edges"])
            ),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as err:
        raise ModelError(
            "invalid-model", "malformed automaton: {} {}".format(type(err).__name__, err)
        )
    return check(pta)


def read_json(path: str) -> Any:
    """reads a JSON file, errors carry the file position"""
    try:
        with open(path, "r", encoding="utf-8") as file:
            return json.load(file)
    except json.JSONDecodeError as err:
        raise ModelError(
            "invalid-json", "{}:{}:{}: {}".format(path, err.lineno, err.colno, err.msg)
        )
    except OSError as err:
        raise ModelError("unreadable-file", "cannot read {}: {}".format(path, err.strerror))


def write_json(path: str, data: Any) -> None:
    try:
        with open(path, "w", encoding="utf-8") as file:
            file.write(json.dumps(data, indent=2, ensure_ascii=False) + "\n")
    except OSError as err:
        raise ModelError("unwritable-file", "cannot write {}: {}".format(path, err.strerror))


def load_model(path: str) -> Pta:
    return pta_from_json(read_json(path))


def model_to_text(pta: Pta) -> str:
    return json.dumps(pta_to_json(pta), indent=2, ensure_ascii=False) + "\n"


def dump_model(pta: Pta, path: str) -> None:
    write_json(path, pta_to_json(pta))


def valuation_to_json(
    valuation: Mapping[str, Fraction], order: Optional[Sequence[str]] = None
) -> Dict[str, Any]:
    names = list(order) if order is not None else sorted(valuation)
    return {name: json_number(valuation[name]) for name in names}


def valuation_from_json(data: Any) -> ParamValuation:
    try:
        return {str(name): to_fraction(value) for name, value in data.items()}
    except (AttributeError, ValueError) as err:
        raise ModelError("invalid-valuation", "malformed valuation {}: {}".format(data, err))


def load_valuation(path: str) -> ParamValuation:
    return valuation_from_json(read_json(path))


def format_valuation(
    valuation: Mapping[str, Fraction], order: Optional[Sequence[str]] = None
) -> str:
    """(p2 = 2, p3 = 3)"""
    names = list(order) if order is not None else sorted(valuation)
    return "({})".format(
        ", ".join("{} = {}".format(name, format_fraction(valuation[name])) for name in names)
    )
