"""
Repair: picks the valuation of a constraint closest to the initial one

The search runs over a lattice (integers, or multiples of 1/granularity)
inside a box, by increasing L1 distance to v_init, ties broken by the
lexicographic order of the parameter vectors. A lattice point on an open
boundary of the constraint is not a solution.
"""

import heapq
import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Mapping, Optional, Sequence, Set, Tuple

from .defs import format_fraction
from .errors import SearchError
from .model import ParamValuation, Pta, Ta, apply_valuation, format_valuation
from .polyhedra import PolyUnion, Var, param

logger = logging.getLogger(__name__)

Box = Dict[str, Tuple[Fraction, Fraction]]


@dataclass
class RepairConfig:
    """domain is "integer" or "rational" (multiples of 1 / granularity).
    box maps parameters to inclusive bounds, default [0, 2 * max(v_init) + 10]"""

    domain: str = "integer"
    granularity: int = 1
    box: Optional[Box] = None
    max_iterations: int = 100000

    @property
    def step(self: "RepairConfig") -> Fraction:
        if self.domain == "integer":
            return Fraction(1)
        if self.domain != "rational" or self.granularity < 1:
            raise SearchError(
                "invalid-domain",
                "repair domain must be 'integer' or 'rational' with a positive granularity",
            )
        return Fraction(1, self.granularity)


def default_box(v_init: Mapping[str, Fraction], names: Sequence[str]) -> Box:
    top = 2 * max((v_init[name] for name in names), default=Fraction(0)) + 10
    return {name: (Fraction(0), top) for name in names}


def l1_distance(
    left: Mapping[str, Fraction], right: Mapping[str, Fraction], names: Sequence[str]
) -> Fraction:
    return sum((abs(left[name] - right[name]) for name in names), Fraction(0))


def _snap(value: Fraction, step: Fraction, low: Fraction, high: Fraction) -> Fraction:
    """nearest lattice point to value, clamped into [low, high]"""
    snapped = round(value / step) * step
    return min(max(snapped, low), high)


def _lattice_bounds(
    box: Box, name: str, step: Fraction
) -> Tuple[Fraction, Fraction]:
    low, high = box[name]
    first = -((-low) // step) * step
    last = (high // step) * step
    return Fraction(first), Fraction(last)


def nearest_on_strict_boundaries(
    phi: PolyUnion,
    v_init: Mapping[str, Fraction],
    names: Sequence[str],
    config: RepairConfig,
) -> Optional[ParamValuation]:
    """best first search of the lattice point of phi closest to v_init.
    Points are explored by increasing (distance, vector), which makes
    the first feasible point popped the answer. Falls back to a sweep of the
    whole box when max_iterations is exhausted. None when the box has no
    feasible point"""
    step = config.step
    box = config.box if config.box is not None else default_box(v_init, names)
    missing = [name for name in names if name not in box]
    if missing:
        raise SearchError("invalid-box", "no bounds for {}".format(", ".join(missing)))
    bounds = {name: _lattice_bounds(box, name, step) for name in names}
    if any(low > high for low, high in bounds.values()):
        return None
    variables = {name: param(name) for name in names}

    def feasible(vector: Tuple[Fraction, ...]) -> bool:
        point: Dict[Var, Fraction] = {
            variables[name]: value for name, value in zip(names, vector)
        }
        return phi.contains_point(point)

    def key(vector: Tuple[Fraction, ...]) -> Tuple[Fraction, Tuple[Fraction, ...]]:
        return (
            sum((abs(value - v_init[name]) for name, value in zip(names, vector)), Fraction(0)),
            vector,
        )

    start = tuple(_snap(v_init[name], step, *bounds[name]) for name in names)
    heap = [key(start)]
    seen: Set[Tuple[Fraction, ...]] = {start}
    iterations = 0
    while heap and iterations < config.max_iterations:
        iterations += 1
        _, vector = heapq.heappop(heap)
        if feasible(vector):
            logger.info("repair found after {} lattice point(s)".format(iterations))
            return dict(zip(names, vector))
        for index, name in enumerate(names):
            low, high = bounds[name]
            for delta in (-step, step):
                value = vector[index] + delta
                if value < low or value > high:
                    continue
                neighbour = vector[:index] + (value,) + vector[index + 1 :]
                if neighbour not in seen:
                    seen.add(neighbour)
                    heapq.heappush(heap, key(neighbour))
    if not heap:
        return None
    logger.warning(
        "repair search gave up after {} iteration(s), sweeping the box".format(iterations)
    )
    axes = []
    for name in names:
        low, high = bounds[name]
        count = int((high - low) / step) + 1
        axes.append([low + i * step for i in range(count)])
    best: Optional[Tuple[Fraction, Tuple[Fraction, ...]]] = None
    for vector in itertools.product(*axes):
        candidate = key(tuple(vector))
        if (best is None or candidate < best) and feasible(tuple(vector)):
            best = candidate
    if best is None:
        return None
    return dict(zip(names, best[1]))


def instantiate(
    phi: PolyUnion,
    v_init: Mapping[str, Fraction],
    names: Sequence[str],
    config: Optional[RepairConfig] = None,
) -> ParamValuation:
    """a valuation of phi at minimal L1 distance from v_init on the lattice.
    v_init itself is returned when it satisfies phi"""
    if config is None:
        config = RepairConfig()
    if phi.is_empty():
        raise SearchError("empty-constraint", "cannot instantiate an empty constraint")
    missing = [name for name in names if name not in v_init]
    if missing:
        raise SearchError(
            "missing-parameter", "v_init has no value for {}".format(", ".join(missing))
        )
    point = {param(name): v_init[name] for name in names}
    if phi.contains_point(point):
        return {name: v_init[name] for name in names}
    found = nearest_on_strict_boundaries(phi, v_init, names, config)
    if found is None:
        raise SearchError(
            "no-solution-in-box",
            "no lattice point of the search box satisfies {}\n"
            "widen the search box or refine the granularity".format(phi),
        )
    logger.info(
        "repaired valuation {} at distance {}".format(
            format_valuation(found, names),
            format_fraction(l1_distance(found, v_init, names)),
        )
    )
    return found


def repair(
    pta: Pta,
    phi: PolyUnion,
    v_init: Mapping[str, Fraction],
    config: Optional[RepairConfig] = None,
) -> Tuple[ParamValuation, Ta]:
    """(v_rep, pta[v_rep])"""
    names = list(pta.parameters)
    v_rep = instantiate(phi, v_init, names, config)
    return v_rep, apply_valuation(pta, v_rep)
