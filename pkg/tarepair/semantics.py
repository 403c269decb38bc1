"""
Symbolic semantics of (parametric) timed automata

It contains:
- class SymbolicState: a location and a zone over the clocks,
  the absolute clock x_abs and the parameters
- functions zone_variables, guard_to_polyhedron, initial_state, successor
- classes EpzgNode and Epzg, and function build_epzg: the parametric zone
  graph unrolled to a depth, each node annotated with its parameter
  constraint and the interval of absolute times at which it is entered
- functions accepts and member: membership of a timed word in a timed automaton
- function path_witness: a concrete timed word following a path of edges

Successor of (l, C) by e = (l, g, a, R, l'):
    elapse((reset(C & g, R) & I(l'))) & I(l')
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import (
    Any,
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from .constraints import parse_constraint
from .defs import ABS_CLOCK, Relation, format_fraction, json_number, to_fraction
from .errors import ModelError, PolyhedronError, SemanticsError
from .model import Edge, Guard, Pta, TimedWord
from .polyhedra import (
    ABS_VAR,
    ConvexPolyhedron,
    LinearInequality,
    RationalInterval,
    Var,
    VarKind,
    clock,
    equivalent,
    intersect,
    param,
    project_onto_params,
    reset,
    sample_point,
    time_elapse,
    variable_bounds,
)

logger = logging.getLogger(__name__)


def zone_variables(pta: Pta) -> FrozenSet[Var]:
    """clocks, x_abs and parameters of pta"""
    return frozenset(
        [clock(name) for name in pta.clocks]
        + [ABS_VAR]
        + [param(name) for name in pta.parameters]
    )


def parameter_variables(pta: Pta) -> FrozenSet[Var]:
    return frozenset(param(name) for name in pta.parameters)


def guard_to_polyhedron(grd: Guard, variables: Iterable[Var]) -> ConvexPolyhedron:
    """clock <rel> sum(coeff * param) + constant, as atoms over variables"""
    atoms = []
    for atom in grd.atoms:
        coeffs: Dict[Var, Fraction] = {clock(atom.clock): Fraction(1)}
        for name, coeff in atom.rhs.coeffs:
            var = param(name)
            coeffs[var] = coeffs.get(var, Fraction(0)) - coeff
        atoms.append(LinearInequality.make(coeffs, -atom.rhs.constant, atom.rel))
    return ConvexPolyhedron.of(variables, atoms)


@dataclass(frozen=True)
class SymbolicState:
    location: str
    zone: ConvexPolyhedron


def _initial_entry(
    pta: Pta, variables: FrozenSet[Var], extra: Sequence[LinearInequality] = ()
) -> ConvexPolyhedron:
    """every clock (x_abs included) at zero, parameters nonnegative"""
    atoms = list(extra)
    for var in variables:
        if var.is_clock:
            atoms.append(LinearInequality.make({var: 1}, 0, Relation.EQ))
        elif var.kind is VarKind.PARAM:
            atoms.append(LinearInequality.make({var: -1}, 0, Relation.LE))
    zero = ConvexPolyhedron.of(variables, atoms)
    return intersect(zero, guard_to_polyhedron(pta.invariant(pta.initial), variables))


def _initial(
    pta: Pta, variables: FrozenSet[Var], extra: Sequence[LinearInequality] = ()
) -> Tuple[ConvexPolyhedron, SymbolicState]:
    entry = _initial_entry(pta, variables, extra)
    if entry.is_empty():
        raise SemanticsError(
            "empty-initial-zone",
            "the invariant of initial location {} excludes the zero valuation".format(
                pta.initial
            ),
        )
    inv = guard_to_polyhedron(pta.invariant(pta.initial), variables)
    return entry, SymbolicState(pta.initial, intersect(time_elapse(entry), inv))


def initial_state(pta: Pta) -> SymbolicState:
    """(l0, elapse(all clocks = 0 & params >= 0 & I(l0)) & I(l0))"""
    return _initial(pta, zone_variables(pta))[1]


def _fire(
    state: SymbolicState,
    edge: Edge,
    pta: Pta,
    extra: Sequence[LinearInequality] = (),
) -> Optional[Tuple[ConvexPolyhedron, SymbolicState]]:
    """returns (entry zone, successor), the entry zone being the
    successor zone before time elapses, None when edge cannot fire"""
    variables = state.zone.variables
    zone = intersect(state.zone, guard_to_polyhedron(edge.guard, variables))
    if extra:
        zone = zone.conjoin_atoms(extra)
    if zone.is_empty():
        return None
    zone = reset(zone, [clock(name) for name in edge.resets])
    inv = guard_to_polyhedron(pta.invariant(edge.target), variables)
    entry = intersect(zone, inv)
    if entry.is_empty():
        return None
    return entry, SymbolicState(edge.target, intersect(time_elapse(entry), inv))


def successor(state: SymbolicState, edge: Edge, pta: Pta) -> Optional[SymbolicState]:
    """symbolic successor of state through edge, None if unsatisfiable"""
    if edge.source != state.location:
        raise SemanticsError(
            "edge-mismatch",
            "edge {} leaves {}, not {}".format(edge.id, edge.source, state.location),
        )
    fired = _fire(state, edge, pta)
    if fired is None:
        return None
    return fired[1]


# ===============================================
# Extended parametric zone graph
# ===============================================


@dataclass(frozen=True)
class EpzgNode:
    id: int
    state: SymbolicState
    param_constraint: ConvexPolyhedron
    arrival: RationalInterval
    depth: int


@dataclass
class Epzg:
    """Parametric zone graph unrolled to depth.
    edges are (source node, automaton edge id, target node).
    Nodes are only merged within a layer, so the graph is a DAG"""

    pta: Pta
    depth: int
    nodes: List[EpzgNode] = field(default_factory=list)
    edges: List[Tuple[int, int, int]] = field(default_factory=list)
    incomplete: bool = False
    diagnostics: List[str] = field(default_factory=list)

    root: int = 0

    def children(self: "Epzg", node_id: int) -> List[Tuple[int, int]]:
        """(automaton edge id, target node) in construction order"""
        return [(edge, target) for source, edge, target in self.edges if source == node_id]

    def paths(
        self: "Epzg", max_length: int, include_empty: bool = False
    ) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """every path from the root with 1 to max_length edges
        (0 edges too if include_empty) as (node ids, edge ids), depth first"""
        if include_empty:
            yield (self.root,), ()
        yield from self._paths_from((self.root,), (), max_length)

    def _paths_from(
        self: "Epzg", nodes: Tuple[int, ...], edges: Tuple[int, ...], max_length: int
    ) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        if len(edges) >= max_length:
            return
        for edge, target in self.children(nodes[-1]):
            path = (nodes + (target,), edges + (edge,))
            yield path
            yield from self._paths_from(path[0], path[1], max_length)

    def unbounded_nodes(self: "Epzg") -> List[int]:
        """nodes entered at unbounded absolute times"""
        return [node.id for node in self.nodes if node.arrival.upper is None]

    def format_table(self: "Epzg", zones: bool = False) -> str:
        """one line per node: state, location, arrival times, parameter constraint"""
        header = ["state", "depth", "location", "entered at", "parameters"]
        if zones:
            header.append("zone")
        rows = [header]
        for node in self.nodes:
            row = [
                "s{}".format(node.id + 1),
                str(node.depth),
                node.state.location,
                format_arrival(node.arrival),
                str(node.param_constraint.simplify()),
            ]
            if zones:
                row.append(str(node.state.zone.simplify()))
            rows.append(row)
        widths = [max(len(row[col]) for row in rows) for col in range(len(header))]
        lines = [
            "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
            for row in rows
        ]
        for source, edge, target in self.edges:
            lines.append("s{} -e{}-> s{}".format(source + 1, edge, target + 1))
        if self.incomplete:
            lines.append("incomplete: " + "; ".join(self.diagnostics))
        return "\n".join(lines)

    def to_json(self: "Epzg") -> Dict[str, Any]:
        return {
            "depth": self.depth,
            "incomplete": self.incomplete,
            "diagnostics": list(self.diagnostics),
            "nodes": [
                {
                    "id": node.id,
                    "location": node.state.location,
                    "depth": node.depth,
                    "arrival": interval_to_json(node.arrival),
                    "zone": str(node.state.zone),
                    "param_constraint": str(node.param_constraint),
                }
                for node in self.nodes
            ],
            "edges": [
                {"source": source, "edge": edge, "target": target}
                for source, edge, target in self.edges
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any], pta: Pta) -> "Epzg":
        variables = zone_variables(pta)
        params = parameter_variables(pta)
        try:
            nodes = [
                EpzgNode(
                    id=int(node["id"]),
                    state=SymbolicState(
                        str(node["location"]), _read_convex(node["zone"], variables)
                    ),
                    param_constraint=_read_convex(node["param_constraint"], params),
                    arrival=interval_from_json(node["arrival"]),
                    depth=int(node["depth"]),
                )
                for node in data["nodes"]
            ]
            edges = [
                (int(edge["source"]), int(edge["edge"]), int(edge["target"]))
                for edge in data["edges"]
            ]
            return cls(
                pta=pta,
                depth=int(data["depth"]),
                nodes=nodes,
                edges=edges,
                incomplete=bool(data.get("incomplete", False)),
                diagnostics=[str(diag) for diag in data.get("diagnostics", [])],
            )
        except (KeyError, TypeError, ValueError) as err:
            raise ModelError("invalid-epzg", "malformed zone graph: {}".format(err))


def _read_convex(text: str, variables: FrozenSet[Var]) -> ConvexPolyhedron:
    union = parse_constraint(text, variables)
    if union.is_empty():
        return ConvexPolyhedron.bottom(variables)
    if len(union) != 1:
        raise ModelError("invalid-epzg", "zone '{}' is not convex".format(text))
    return union.disjuncts[0]


def format_arrival(interval: RationalInterval) -> str:
    if interval.is_point and interval.lower is not None:
        return "{} = {}".format(ABS_CLOCK, format_fraction(interval.lower))
    return "{} in {}".format(ABS_CLOCK, interval)


def interval_to_json(interval: RationalInterval) -> Dict[str, Any]:
    return {
        "lower": None if interval.lower is None else json_number(interval.lower),
        "lower_closed": interval.lower_closed,
        "upper": None if interval.upper is None else json_number(interval.upper),
        "upper_closed": interval.upper_closed,
    }


def interval_from_json(data: Mapping[str, Any]) -> RationalInterval:
    return RationalInterval(
        None if data["lower"] is None else to_fraction(data["lower"]),
        bool(data["lower_closed"]),
        None if data["upper"] is None else to_fraction(data["upper"]),
        bool(data["upper_closed"]),
    )


def build_epzg(pta: Pta, depth: int, merge: bool = True) -> Epzg:
    """unrolls the parametric zone graph breadth first up to depth edges.
    When merge is set, successors in the same layer with the same location,
    arrival interval and zone are merged.
    Exceeding the atom cap stops the offending branch and marks the graph
    incomplete instead of failing"""
    if depth < 0:
        raise SemanticsError("invalid-depth", "depth must be nonnegative, got {}".format(depth))
    variables = zone_variables(pta)
    entry, root = _initial(pta, variables)
    graph = Epzg(pta, depth)
    graph.nodes.append(
        EpzgNode(0, root, project_onto_params(root.zone), variable_bounds(entry, ABS_VAR), 0)
    )
    frontier = [0]
    for level in range(1, depth + 1):
        layer: List[int] = []
        for node_id in frontier:
            node = graph.nodes[node_id]
            for edge in pta.outgoing(node.state.location):
                try:
                    fired = _fire(node.state, edge, pta)
                except PolyhedronError as err:
                    if err.name != "atom-cap":
                        raise
                    graph.incomplete = True
                    graph.diagnostics.append(
                        "s{} -e{}->: {}".format(node_id + 1, edge.id, err.message)
                    )
                    logger.warning("zone graph branch dropped: {}".format(err.message))
                    continue
                if fired is None:
                    continue
                entry, state = fired
                arrival = variable_bounds(entry, ABS_VAR)
                target = None
                if merge:
                    target = next(
                        (
                            other
                            for other in layer
                            if graph.nodes[other].state.location == state.location
                            and graph.nodes[other].arrival == arrival
                            and equivalent(graph.nodes[other].state.zone, state.zone)
                        ),
                        None,
                    )
                if target is None:
                    target = len(graph.nodes)
                    graph.nodes.append(
                        EpzgNode(
                            target, state, project_onto_params(state.zone), arrival, level
                        )
                    )
                    layer.append(target)
                graph.edges.append((node_id, edge.id, target))
        logger.debug("zone graph layer {}: {} new node(s)".format(level, len(layer)))
        frontier = layer
    logger.info(
        "zone graph of depth {}: {} node(s), {} edge(s)".format(
            depth, len(graph.nodes), len(graph.edges)
        )
    )
    return graph


# ===============================================
# Concrete runs
# ===============================================


def _timestamp(time: Fraction) -> LinearInequality:
    return LinearInequality.make({ABS_VAR: 1}, -time, Relation.EQ)


def accepts(ta: Pta, word: TimedWord, require_accepting: bool = False) -> bool:
    """is word a run of ta? runs end anywhere unless require_accepting,
    the empty word is always realizable in that case"""
    if ta.is_parametric:
        raise SemanticsError(
            "parametric-automaton",
            "acceptance needs a timed automaton, instantiate parameters {} first".format(
                ", ".join(ta.parameters)
            ),
        )
    for action in word.actions:
        if action not in ta.alphabet:
            raise SemanticsError(
                "unknown-action", "action '{}' is not in the alphabet".format(action)
            )
    variables = zone_variables(ta)
    if _initial_entry(ta, variables).is_empty():
        return False
    states = [_initial(ta, variables)[1]]
    for action, time in word:
        stamp = _timestamp(time)
        following: List[SymbolicState] = []
        for state in states:
            for edge in ta.outgoing(state.location):
                if edge.action != action:
                    continue
                fired = _fire(state, edge, ta, [stamp])
                if fired is not None and fired[1] not in following:
                    following.append(fired[1])
        if not following:
            return False
        states = following
    return not require_accepting or any(state.location in ta.accepting for state in states)


def member(ta: Pta, word: TimedWord, require_accepting: bool = False) -> bool:
    """acceptance, a word with an action out of the alphabet is rejected"""
    if any(action not in ta.alphabet for action in word.actions):
        return False
    return accepts(ta, word, require_accepting)


def path_witness(
    pta: Pta,
    edges: Sequence[Edge],
    valuation: Optional[Mapping[str, Fraction]] = None,
    choose: Optional[Callable[[RationalInterval], Fraction]] = None,
) -> Optional[TimedWord]:
    """a timed word that follows edges in pta (under valuation, if given),
    None if the path is infeasible. Timestamps are picked one after the other
    by choose (see polyhedra.sample_point) within their exact feasible range"""
    snapshots = [Var(VarKind.AUX, "_t{}".format(index)) for index in range(len(edges))]
    variables = zone_variables(pta) | frozenset(snapshots)
    fixed = []
    if valuation is not None:
        fixed = [
            LinearInequality.make({param(name): 1}, -valuation[name], Relation.EQ)
            for name in pta.parameters
        ]
    if _initial_entry(pta, variables, fixed).is_empty():
        return None
    state = _initial(pta, variables, fixed)[1]
    for edge, snapshot in zip(edges, snapshots):
        if edge.source != state.location:
            raise SemanticsError(
                "edge-mismatch", "edge {} does not leave {}".format(edge.id, state.location)
            )
        stamp = LinearInequality.make({snapshot: 1, ABS_VAR: -1}, 0, Relation.EQ)
        fired = _fire(state, edge, pta, [stamp])
        if fired is None:
            return None
        state = fired[1]
    point = sample_point(state.zone, snapshots, choose)
    return TimedWord(tuple((edge.action, point[snap]) for edge, snap in zip(edges, snapshots)))
