"""
Exact convex polyhedra, and finite unions of them, over clocks and parameters

It contains:
- enum VarKind and class Var: clocks, the absolute clock, parameters
  and auxiliary variables used internally
- class LinearInequality: sum(coeff * var) + constant <rel> 0, rel in <, <=, =
- class ConvexPolyhedron: a normalized conjunction of LinearInequality
- class PolyUnion: a finite disjunction of ConvexPolyhedron
- class RationalInterval: bounds of a single variable
- function atom_cap_limit, a context manager bounding polyhedron sizes
- functions intersect, eliminate, time_elapse, reset, project_onto_params,
  variable_bounds, sample_point, negate, negate_union, conjoin,
  includes, union_includes, equivalent

All arithmetic is exact (fractions.Fraction). Variables are eliminated by
substitution when an equality mentions them, by Fourier-Motzkin otherwise.
A combination of two atoms is strict as soon as one of them is strict.
"""

import contextlib
import enum
import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import (
    Callable,
    ClassVar,
    Dict,
    FrozenSet,
    Iterable,
    Iterator,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

from .defs import ABS_CLOCK, Relation, format_fraction
from .errors import PolyhedronError

logger = logging.getLogger(__name__)


@enum.unique
class VarKind(enum.IntEnum):
    """Kind of a variable, also its printing order"""

    CLOCK = 0
    ABS = 1
    PARAM = 2
    AUX = 3


@dataclass(frozen=True, order=True)
class Var:
    kind: VarKind
    name: str

    def __str__(self: "Var") -> str:
        return self.name

    @property
    def is_clock(self: "Var") -> bool:
        """clocks and the absolute clock both progress with time"""
        return self.kind in (VarKind.CLOCK, VarKind.ABS)


def clock(name: str) -> Var:
    """clock variable, the reserved name maps to the absolute clock"""
    if name == ABS_CLOCK:
        return ABS_VAR
    return Var(VarKind.CLOCK, name)


def param(name: str) -> Var:
    return Var(VarKind.PARAM, name)


ABS_VAR = Var(VarKind.ABS, ABS_CLOCK)
_DELAY = Var(VarKind.AUX, "_delay")

Terms = Tuple[Tuple[Var, Fraction], ...]
Point = Mapping[Var, Fraction]

_SUPPORTED = (Relation.LT, Relation.LE, Relation.EQ)
_REL_ORDER = {Relation.EQ: 0, Relation.LE: 1, Relation.LT: 2}


# ===============================================
# Atoms
# ===============================================


@dataclass(frozen=True)
class LinearInequality:
    """sum(coeff * var) + constant <rel> 0 with rel in {<, <=, =}

    Always build with LinearInequality.make, which normalizes:
    terms are sorted, zero coefficients dropped, and everything is
    divided by the absolute value of the first coefficient
    (by the coefficient itself for equalities).
    A constant atom is either TRUE_ATOM or FALSE_ATOM."""

    terms: Terms
    constant: Fraction
    rel: Relation

    @staticmethod
    def make(
        coeffs: Mapping[Var, Union[int, Fraction]],
        constant: Union[int, Fraction],
        rel: Relation,
    ) -> "LinearInequality":
        """builds a normalized atom, > and >= are turned into < and <="""
        const = Fraction(constant)
        items = [(var, Fraction(coeff)) for var, coeff in coeffs.items() if coeff != 0]
        if rel not in _SUPPORTED:
            rel = rel.mirror()
            items = [(var, -coeff) for var, coeff in items]
            const = -const
        if not items:
            return TRUE_ATOM if rel.holds(const, Fraction(0)) else FALSE_ATOM
        items.sort()
        lead = items[0][1]
        scale = lead if rel is Relation.EQ else abs(lead)
        return LinearInequality(
            tuple((var, coeff / scale) for var, coeff in items), const / scale, rel
        )

    def coeff(self: "LinearInequality", var: Var) -> Fraction:
        for other, coeff in self.terms:
            if other == var:
                return coeff
        return Fraction(0)

    @property
    def variables(self: "LinearInequality") -> FrozenSet[Var]:
        return frozenset(var for var, _ in self.terms)

    @property
    def is_constant(self: "LinearInequality") -> bool:
        return not self.terms

    def evaluate(self: "LinearInequality", point: Point) -> bool:
        """does the point satisfy the atom? every variable must have a value"""
        total = self.constant
        for var, coeff in self.terms:
            if var not in point:
                raise PolyhedronError(
                    "missing-coordinate",
                    "no value given for variable {}".format(var.name),
                )
            total += coeff * point[var]
        return self.rel.holds(total, Fraction(0))

    def substitute(
        self: "LinearInequality",
        var: Var,
        expr: Mapping[Var, Fraction],
        const: Fraction,
    ) -> "LinearInequality":
        """replaces var by sum(expr) + const"""
        factor = self.coeff(var)
        if factor == 0:
            return self
        coeffs: Dict[Var, Fraction] = {v: c for v, c in self.terms if v != var}
        for other, coeff in expr.items():
            coeffs[other] = coeffs.get(other, Fraction(0)) + factor * coeff
        return LinearInequality.make(coeffs, self.constant + factor * const, self.rel)

    def complement(self: "LinearInequality") -> List["LinearInequality"]:
        """atoms whose disjunction is the negation of self"""
        coeffs = dict(self.terms)
        opposite = {var: -coeff for var, coeff in self.terms}
        if self.rel is Relation.LE:
            return [LinearInequality.make(opposite, -self.constant, Relation.LT)]
        if self.rel is Relation.LT:
            return [LinearInequality.make(opposite, -self.constant, Relation.LE)]
        return [
            LinearInequality.make(coeffs, self.constant, Relation.LT),
            LinearInequality.make(opposite, -self.constant, Relation.LT),
        ]

    def __str__(self: "LinearInequality") -> str:
        if self.is_constant:
            return "true" if self.rel.holds(self.constant, Fraction(0)) else "false"
        left = [(var, coeff) for var, coeff in self.terms if coeff > 0]
        right = [(var, -coeff) for var, coeff in self.terms if coeff < 0]
        if not right:
            return "{} {} {}".format(
                _format_side(left, Fraction(0)),
                self.rel.value,
                format_fraction(-self.constant),
            )
        if not left:
            return "{} {} {}".format(
                _format_side(right, Fraction(0)),
                self.rel.mirror().value,
                format_fraction(self.constant),
            )
        return "{} {} {}".format(
            _format_side(left, Fraction(0)),
            self.rel.value,
            _format_side(right, -self.constant),
        )


TRUE_ATOM = LinearInequality((), Fraction(0), Relation.LE)
FALSE_ATOM = LinearInequality((), Fraction(1), Relation.LE)


def _format_side(terms: Sequence[Tuple[Var, Fraction]], constant: Fraction) -> str:
    parts = []
    for var, coeff in terms:
        if coeff == 1:
            parts.append(var.name)
        else:
            parts.append("{}*{}".format(format_fraction(coeff), var.name))
    text = " + ".join(parts)
    if not parts:
        return format_fraction(constant)
    if constant > 0:
        text += " + " + format_fraction(constant)
    elif constant < 0:
        text += " - " + format_fraction(-constant)
    return text


def _negated_terms(terms: Terms) -> Terms:
    return tuple((var, -coeff) for var, coeff in terms)


def _tighter(atom: LinearInequality, other: LinearInequality) -> bool:
    """for two inequalities with the same terms, is atom the stronger one?"""
    if atom.constant != other.constant:
        return atom.constant > other.constant
    return atom.rel is Relation.LT and other.rel is not Relation.LT


def _atom_key(atom: LinearInequality) -> Tuple:
    return (
        _REL_ORDER[atom.rel],
        tuple((var.kind, var.name, coeff) for var, coeff in atom.terms),
        atom.constant,
    )


def _normalize(
    atoms: Iterable[LinearInequality], atom_cap: int
) -> Optional[Tuple[LinearInequality, ...]]:
    """removes duplicates and weaker atoms, detects contradictions
    between atoms sharing the same terms.
    returns None when the conjunction is trivially false"""
    upper: Dict[Terms, LinearInequality] = {}
    equalities: Dict[Terms, LinearInequality] = {}
    for atom in atoms:
        if atom.is_constant:
            if atom == FALSE_ATOM:
                return None
            continue
        if atom.rel is Relation.EQ:
            known = equalities.get(atom.terms)
            if known is not None and known.constant != atom.constant:
                return None
            equalities[atom.terms] = atom
        else:
            known = upper.get(atom.terms)
            if known is None or _tighter(atom, known):
                upper[atom.terms] = atom

    # inequalities parallel to an equality are either implied or contradictory
    for terms, equality in equalities.items():
        for key, sign in ((terms, 1), (_negated_terms(terms), -1)):
            ineq = upper.pop(key, None)
            if ineq is None:
                continue
            value = sign * (-equality.constant) + ineq.constant
            if not ineq.rel.holds(value, Fraction(0)):
                return None

    result = list(equalities.values())
    for terms in list(upper.keys()):
        if terms not in upper:
            continue
        atom = upper[terms]
        opposite = upper.get(_negated_terms(terms))
        if opposite is None:
            continue
        # atom: T <= -c1, opposite: T >= c2
        low, high = opposite.constant, -atom.constant
        if low > high:
            return None
        if low == high:
            if atom.rel is Relation.LT or opposite.rel is Relation.LT:
                return None
            del upper[terms]
            del upper[opposite.terms]
            positive = atom if atom.terms[0][1] > 0 else opposite
            result.append(
                LinearInequality(positive.terms, positive.constant, Relation.EQ)
            )
    result.extend(upper.values())
    if len(result) > atom_cap:
        raise PolyhedronError(
            "atom-cap",
            "polyhedron grew to {} atoms (cap is {})".format(len(result), atom_cap),
        )
    result.sort(key=_atom_key)
    return tuple(result)


# ===============================================
# Convex polyhedra
# ===============================================


@dataclass(frozen=True)
class ConvexPolyhedron:
    """A conjunction of atoms over a fixed variable set.
    Use ConvexPolyhedron.of to build a normalized polyhedron.
    A syntactically false polyhedron has the single atom FALSE_ATOM,
    other unsatisfiable polyhedra are detected by is_empty()"""

    variables: FrozenSet[Var]
    atoms: Tuple[LinearInequality, ...]

    atom_cap: ClassVar[int] = 10000

    @classmethod
    def of(
        cls, variables: Iterable[Var], atoms: Iterable[LinearInequality]
    ) -> "ConvexPolyhedron":
        declared = frozenset(variables)
        atoms = list(atoms)
        for atom in atoms:
            unknown = atom.variables - declared
            if unknown:
                raise PolyhedronError(
                    "unknown-variable",
                    "atom {} uses undeclared variable(s) {}".format(
                        atom, ", ".join(sorted(v.name for v in unknown))
                    ),
                )
        normalized = _normalize(atoms, cls.atom_cap)
        if normalized is None:
            return cls(declared, (FALSE_ATOM,))
        return cls(declared, normalized)

    @classmethod
    def universe(cls, variables: Iterable[Var]) -> "ConvexPolyhedron":
        return cls(frozenset(variables), ())

    @classmethod
    def bottom(cls, variables: Iterable[Var]) -> "ConvexPolyhedron":
        return cls(frozenset(variables), (FALSE_ATOM,))

    @classmethod
    def nonnegative(cls, variables: Iterable[Var]) -> "ConvexPolyhedron":
        """the box v >= 0 for every variable"""
        declared = frozenset(variables)
        return cls.of(
            declared,
            (LinearInequality.make({var: -1}, 0, Relation.LE) for var in declared),
        )

    @property
    def is_false(self: "ConvexPolyhedron") -> bool:
        """syntactically false (cheap), see is_empty for the exact test"""
        return self.atoms == (FALSE_ATOM,)

    def is_empty(self: "ConvexPolyhedron") -> bool:
        return not _satisfiable(self)

    def is_satisfiable(self: "ConvexPolyhedron") -> bool:
        return _satisfiable(self)

    def conjoin_atoms(
        self: "ConvexPolyhedron", atoms: Iterable[LinearInequality]
    ) -> "ConvexPolyhedron":
        return ConvexPolyhedron.of(self.variables, self.atoms + tuple(atoms))

    def with_variables(
        self: "ConvexPolyhedron", variables: Iterable[Var]
    ) -> "ConvexPolyhedron":
        """same constraints, embedded in a larger variable set"""
        return ConvexPolyhedron(self.variables | frozenset(variables), self.atoms)

    def contains_point(self: "ConvexPolyhedron", point: Point) -> bool:
        missing = self.variables - frozenset(point)
        if missing:
            raise PolyhedronError(
                "missing-coordinate",
                "no value given for {}".format(
                    ", ".join(sorted(v.name for v in missing))
                ),
            )
        return all(atom.evaluate(point) for atom in self.atoms)

    def simplify(self: "ConvexPolyhedron") -> "ConvexPolyhedron":
        """removes every atom implied by the others (exact, possibly slow)"""
        if self.is_empty():
            return ConvexPolyhedron.bottom(self.variables)
        kept = list(self.atoms)
        for atom in self.atoms:
            others = [other for other in kept if other is not atom]
            if includes(
                ConvexPolyhedron.of(self.variables, [atom]),
                ConvexPolyhedron.of(self.variables, others),
            ):
                kept = others
        return ConvexPolyhedron.of(self.variables, kept)

    def __str__(self: "ConvexPolyhedron") -> str:
        if self.is_false:
            return "false"
        if not self.atoms:
            return "true"
        return " & ".join(str(atom) for atom in self.atoms)


def _check_same_variables(
    left: Union[ConvexPolyhedron, "PolyUnion"],
    right: Union[ConvexPolyhedron, "PolyUnion"],
) -> None:
    if left.variables != right.variables:
        raise PolyhedronError(
            "variable-mismatch",
            "operands range over different variables: {{{}}} and {{{}}}".format(
                ", ".join(sorted(v.name for v in left.variables)),
                ", ".join(sorted(v.name for v in right.variables)),
            ),
        )


def intersect(left: ConvexPolyhedron, right: ConvexPolyhedron) -> ConvexPolyhedron:
    _check_same_variables(left, right)
    return ConvexPolyhedron.of(left.variables, left.atoms + right.atoms)


def _elimination_cost(atoms: Sequence[LinearInequality], var: Var) -> int:
    positive = negative = 0
    for atom in atoms:
        coeff = atom.coeff(var)
        if coeff == 0:
            continue
        if atom.rel is Relation.EQ:
            return -1
        if coeff > 0:
            positive += 1
        else:
            negative += 1
    return positive * negative - positive - negative


def _combine(
    pos: LinearInequality, neg: LinearInequality, var: Var
) -> LinearInequality:
    """positive combination of pos (coeff of var > 0) and neg (< 0)
    in which var cancels out"""
    pos_factor = -neg.coeff(var)
    neg_factor = pos.coeff(var)
    coeffs: Dict[Var, Fraction] = {}
    for other, coeff in pos.terms:
        coeffs[other] = coeffs.get(other, Fraction(0)) + pos_factor * coeff
    for other, coeff in neg.terms:
        coeffs[other] = coeffs.get(other, Fraction(0)) + neg_factor * coeff
    coeffs.pop(var, None)
    strict = pos.rel is Relation.LT or neg.rel is Relation.LT
    return LinearInequality.make(
        coeffs,
        pos_factor * pos.constant + neg_factor * neg.constant,
        Relation.LT if strict else Relation.LE,
    )


def _eliminate_atoms(
    atoms: Sequence[LinearInequality], var: Var
) -> List[LinearInequality]:
    for index, atom in enumerate(atoms):
        if atom.rel is Relation.EQ and atom.coeff(var) != 0:
            factor = atom.coeff(var)
            expr = {other: -coeff / factor for other, coeff in atom.terms if other != var}
            const = -atom.constant / factor
            return [
                other.substitute(var, expr, const)
                for i, other in enumerate(atoms)
                if i != index
            ]
    positive: List[LinearInequality] = []
    negative: List[LinearInequality] = []
    result: List[LinearInequality] = []
    for atom in atoms:
        coeff = atom.coeff(var)
        if coeff > 0:
            positive.append(atom)
        elif coeff < 0:
            negative.append(atom)
        else:
            result.append(atom)
    for pos in positive:
        for neg in negative:
            result.append(_combine(pos, neg, var))
    return result


def eliminate(poly: ConvexPolyhedron, variables: Iterable[Var]) -> ConvexPolyhedron:
    """existential projection: removes variables from poly
    variables that poly does not range over are ignored"""
    remaining = set(variables) & poly.variables
    kept = poly.variables - remaining
    if poly.is_false:
        return ConvexPolyhedron.bottom(kept)
    atoms: Sequence[LinearInequality] = poly.atoms
    while remaining:
        var = min(remaining, key=lambda v: (_elimination_cost(atoms, v), v))
        remaining.discard(var)
        normalized = _normalize(
            _eliminate_atoms(atoms, var), ConvexPolyhedron.atom_cap
        )
        if normalized is None:
            return ConvexPolyhedron.bottom(kept)
        atoms = normalized
    return ConvexPolyhedron(kept, tuple(atoms))


@contextlib.contextmanager
def atom_cap_limit(cap: int) -> Iterator[None]:
    """caps the atoms of every polyhedron built inside the block,
    the previous cap is restored on exit"""
    previous = ConvexPolyhedron.atom_cap
    ConvexPolyhedron.atom_cap = cap
    try:
        yield
    finally:
        ConvexPolyhedron.atom_cap = previous


@functools.lru_cache(maxsize=1 << 16)
def _satisfiable(poly: ConvexPolyhedron) -> bool:
    if poly.is_false:
        return False
    return not eliminate(poly, poly.variables).is_false


def time_elapse(poly: ConvexPolyhedron) -> ConvexPolyhedron:
    """{v + d | v in poly, d >= 0} where d is added to every clock
    (the absolute clock included), parameters are left unchanged"""
    atoms = [LinearInequality.make({_DELAY: -1}, 0, Relation.LE)]
    for atom in poly.atoms:
        shift = sum((coeff for var, coeff in atom.terms if var.is_clock), Fraction(0))
        if shift == 0:
            atoms.append(atom)
            continue
        coeffs = dict(atom.terms)
        coeffs[_DELAY] = -shift
        atoms.append(LinearInequality.make(coeffs, atom.constant, atom.rel))
    return eliminate(ConvexPolyhedron.of(poly.variables | {_DELAY}, atoms), [_DELAY])


def reset(poly: ConvexPolyhedron, clocks: Iterable[Var]) -> ConvexPolyhedron:
    """sets every clock of clocks to 0"""
    targets = sorted(set(clocks))
    for var in targets:
        if var.kind is VarKind.ABS:
            raise PolyhedronError(
                "reset-absolute-clock", "{} can never be reset".format(ABS_CLOCK)
            )
        if var not in poly.variables or not var.is_clock:
            raise PolyhedronError(
                "unknown-clock", "cannot reset unknown clock {}".format(var.name)
            )
    projected = eliminate(poly, targets)
    return ConvexPolyhedron.of(
        poly.variables,
        projected.atoms
        + tuple(LinearInequality.make({var: 1}, 0, Relation.EQ) for var in targets),
    )


def project_onto_params(poly: ConvexPolyhedron) -> ConvexPolyhedron:
    """eliminates every variable that is not a parameter"""
    return eliminate(
        poly, [var for var in poly.variables if var.kind is not VarKind.PARAM]
    )


# ===============================================
# Intervals and points
# ===============================================


@dataclass(frozen=True)
class RationalInterval:
    """an interval of rationals, None bounds are infinite"""

    lower: Optional[Fraction]
    lower_closed: bool
    upper: Optional[Fraction]
    upper_closed: bool

    @classmethod
    def closed(cls, lower: Fraction, upper: Fraction) -> "RationalInterval":
        return cls(Fraction(lower), True, Fraction(upper), True)

    @property
    def is_bounded(self: "RationalInterval") -> bool:
        return self.lower is not None and self.upper is not None

    @property
    def is_point(self: "RationalInterval") -> bool:
        return self.lower is not None and self.lower == self.upper

    def is_empty(self: "RationalInterval") -> bool:
        if self.lower is None or self.upper is None:
            return False
        if self.lower == self.upper:
            return not (self.lower_closed and self.upper_closed)
        return self.lower > self.upper

    def contains(self: "RationalInterval", value: Fraction) -> bool:
        if self.lower is not None:
            if value < self.lower or (value == self.lower and not self.lower_closed):
                return False
        if self.upper is not None:
            if value > self.upper or (value == self.upper and not self.upper_closed):
                return False
        return True

    def witness(self: "RationalInterval") -> Fraction:
        """a deterministic element: a closed lower bound, else the
        midpoint, else just above the lower bound"""
        if self.is_empty():
            raise PolyhedronError("empty-interval", "no element in {}".format(self))
        if self.lower is not None and self.lower_closed:
            return self.lower
        if self.lower is None:
            if self.upper is None:
                return Fraction(0)
            return self.upper if self.upper_closed else self.upper - 1
        if self.upper is None:
            return self.lower + 1
        return (self.lower + self.upper) / 2

    def __str__(self: "RationalInterval") -> str:
        left = "(-inf" if self.lower is None else (
            ("[" if self.lower_closed else "(") + format_fraction(self.lower)
        )
        right = "inf)" if self.upper is None else (
            format_fraction(self.upper) + ("]" if self.upper_closed else ")")
        )
        return "{}, {}".format(left, right)


def variable_bounds(poly: ConvexPolyhedron, var: Var) -> RationalInterval:
    """tightest interval containing every value of var in poly
    raises PolyhedronError on an empty polyhedron"""
    if var not in poly.variables:
        raise PolyhedronError(
            "unknown-variable", "{} is not a variable of the polyhedron".format(var.name)
        )
    projected = eliminate(poly, poly.variables - {var})
    if projected.is_false:
        raise PolyhedronError(
            "empty-polyhedron", "cannot bound {} on an empty polyhedron".format(var.name)
        )
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    lower_closed = upper_closed = False
    for atom in projected.atoms:
        coeff = atom.coeff(var)
        if atom.rel is Relation.EQ:
            value = -atom.constant / coeff
            return RationalInterval(value, True, value, True)
        if coeff > 0:
            upper, upper_closed = -atom.constant, atom.rel is Relation.LE
        else:
            lower, lower_closed = atom.constant, atom.rel is Relation.LE
    return RationalInterval(lower, lower_closed, upper, upper_closed)


def sample_point(
    poly: ConvexPolyhedron,
    order: Sequence[Var],
    choose: Optional[Callable[[RationalInterval], Fraction]] = None,
) -> Dict[Var, Fraction]:
    """fixes the variables of order one after the other, each to a value
    picked by choose in its current bounds (default RationalInterval.witness).
    choose must return an element of the interval it is given"""
    if choose is None:
        choose = RationalInterval.witness
    point: Dict[Var, Fraction] = {}
    current = poly
    for var in order:
        value = choose(variable_bounds(current, var))
        point[var] = value
        current = current.conjoin_atoms(
            [LinearInequality.make({var: 1}, -value, Relation.EQ)]
        )
    return point


# ===============================================
# Unions
# ===============================================


@dataclass(frozen=True)
class PolyUnion:
    """A finite disjunction of satisfiable polyhedra over the same variables,
    the empty union is false.
    Use PolyUnion.of to build one, it drops empty and repeated disjuncts"""

    variables: FrozenSet[Var]
    disjuncts: Tuple[ConvexPolyhedron, ...]

    @classmethod
    def of(
        cls, variables: Iterable[Var], disjuncts: Iterable[ConvexPolyhedron]
    ) -> "PolyUnion":
        declared = frozenset(variables)
        kept: List[ConvexPolyhedron] = []
        for poly in disjuncts:
            if poly.variables != declared:
                _check_same_variables(cls(declared, ()), poly)
            if poly.is_empty() or poly in kept:
                continue
            kept.append(poly)
        return cls(declared, tuple(kept))

    @classmethod
    def universe(cls, variables: Iterable[Var]) -> "PolyUnion":
        declared = frozenset(variables)
        return cls(declared, (ConvexPolyhedron.universe(declared),))

    @classmethod
    def bottom(cls, variables: Iterable[Var]) -> "PolyUnion":
        return cls(frozenset(variables), ())

    @classmethod
    def single(cls, poly: ConvexPolyhedron) -> "PolyUnion":
        return cls.of(poly.variables, [poly])

    def is_empty(self: "PolyUnion") -> bool:
        return not self.disjuncts

    def contains_point(self: "PolyUnion", point: Point) -> bool:
        return any(poly.contains_point(point) for poly in self.disjuncts)

    def prune(self: "PolyUnion") -> "PolyUnion":
        """drops disjuncts included in another one (keeps the first of equals)"""
        kept: List[ConvexPolyhedron] = []
        for index, poly in enumerate(self.disjuncts):
            covered = False
            for other_index, other in enumerate(self.disjuncts):
                if other_index == index or not includes(other, poly):
                    continue
                if other_index < index or not includes(poly, other):
                    covered = True
                    break
            if not covered:
                kept.append(poly)
        return PolyUnion(self.variables, tuple(kept))

    def simplify(self: "PolyUnion") -> "PolyUnion":
        """prune, then remove redundant atoms of every disjunct"""
        pruned = self.prune()
        return PolyUnion(
            self.variables, tuple(poly.simplify() for poly in pruned.disjuncts)
        )

    def __iter__(self: "PolyUnion") -> Iterator[ConvexPolyhedron]:
        return iter(self.disjuncts)

    def __len__(self: "PolyUnion") -> int:
        return len(self.disjuncts)

    def __str__(self: "PolyUnion") -> str:
        if not self.disjuncts:
            return "false"
        return " | ".join(str(poly) for poly in self.disjuncts)


def _as_union(value: Union[ConvexPolyhedron, PolyUnion]) -> PolyUnion:
    if isinstance(value, PolyUnion):
        return value
    return PolyUnion.single(value)


def negate(poly: ConvexPolyhedron) -> PolyUnion:
    """complement of a convex polyhedron, as a union of single atoms"""
    if poly.is_empty():
        return PolyUnion.universe(poly.variables)
    return PolyUnion.of(
        poly.variables,
        (
            ConvexPolyhedron.of(poly.variables, [negated])
            for atom in poly.atoms
            for negated in atom.complement()
        ),
    )


def conjoin(
    left: Union[ConvexPolyhedron, PolyUnion], right: Union[ConvexPolyhedron, PolyUnion]
) -> PolyUnion:
    """intersection of two unions, distributed over disjuncts"""
    left, right = _as_union(left), _as_union(right)
    _check_same_variables(left, right)
    return PolyUnion.of(
        left.variables,
        (intersect(a, b) for a in left.disjuncts for b in right.disjuncts),
    )


def negate_union(union: Union[ConvexPolyhedron, PolyUnion]) -> PolyUnion:
    """complement of a union: the conjunction of the complements of its disjuncts"""
    union = _as_union(union)
    result = PolyUnion.universe(union.variables)
    for poly in union.disjuncts:
        result = conjoin(result, negate(poly)).prune()
        if result.is_empty():
            break
    return result


def includes(outer: ConvexPolyhedron, inner: ConvexPolyhedron) -> bool:
    """is inner a subset of outer?"""
    _check_same_variables(outer, inner)
    if inner.is_empty():
        return True
    for atom in outer.atoms:
        for negated in atom.complement():
            if inner.conjoin_atoms([negated]).is_satisfiable():
                return False
    return True


def union_includes(
    outer: Union[ConvexPolyhedron, PolyUnion], inner: Union[ConvexPolyhedron, PolyUnion]
) -> bool:
    """is inner a subset of outer? exact, even when a disjunct of inner
    is only covered by several disjuncts of outer"""
    outer, inner = _as_union(outer), _as_union(inner)
    _check_same_variables(outer, inner)
    remaining = [
        poly
        for poly in inner.disjuncts
        if not any(includes(candidate, poly) for candidate in outer.disjuncts)
    ]
    if not remaining:
        return True
    complement = negate_union(outer)
    return conjoin(PolyUnion(inner.variables, tuple(remaining)), complement).is_empty()


def equivalent(
    left: Union[ConvexPolyhedron, PolyUnion], right: Union[ConvexPolyhedron, PolyUnion]
) -> bool:
    """semantic equality"""
    return union_includes(left, right) and union_includes(right, left)
