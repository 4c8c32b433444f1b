"""
Semantic checks of a linearization plan.

For every x satisfying the assignment rows, the compact equations of a
plan are solved over binary y, once by exhaustive backtracking and once
by propagation. A plan is consistent when every feasible x has exactly
one solution and it has y_ij = x_i * x_j on all of F. Plans built by the
original recipe (A_k within B_k, E covered) can fail this; the verifier
then returns a witness, or the feasible x the equations cut off.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from compact_linearizer import LinearizationPlan, check_conditions, plan_from_sets
from instance_model import BqpInstance, Pair, normalize_pair
from settings import DEFAULT_CAP_X, DEFAULT_CAP_Y

logger = logging.getLogger(__name__)

BOUNDS = ("y <= x_i", "y <= x_j", "y >= x_i + x_j - 1")

XVector = Tuple[int, ...]


@dataclass(frozen=True)
class Witness:
    x: XVector
    y: Dict[Pair, int]
    violated_pair: Pair
    violated_bound: str

    def to_dict(self) -> Dict:
        return {
            'x': list(self.x),
            'y': {f"{i},{j}": v for (i, j), v in sorted(self.y.items())},
            'pair': list(self.violated_pair),
            'bound': self.violated_bound,
        }


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    x_assignments_checked: int
    witness: Optional[Witness] = None
    exhaustive: bool = True
    note: str = ""
    propagation_agrees: Optional[bool] = None
    excluded_x: Optional[XVector] = None

    def to_dict(self) -> Dict:
        return {
            'consistent': self.consistent,
            'excluded_x': list(self.excluded_x) if self.excluded_x is not None else None,
            'checked': self.x_assignments_checked,
            'exhaustive': self.exhaustive,
            'note': self.note,
            'propagation_agrees': self.propagation_agrees,
            'witness': self.witness.to_dict() if self.witness else None,
        }


@dataclass(frozen=True)
class PropagationResult:
    values: Dict[Pair, int]
    conflict: Optional[str] = None
    unresolved: Tuple[Pair, ...] = ()

    @property
    def complete(self) -> bool:
        return self.conflict is None and not self.unresolved


@dataclass(frozen=True)
class _Equation:
    name: str
    pairs: Tuple[Pair, ...]
    rhs_index: int


def _compact_equations(inst: BqpInstance, plan: LinearizationPlan) -> List[_Equation]:
    f_members = set(plan.f_set)
    equations = []
    for k in inst.set_indices:
        for j in sorted(plan.b(k)):
            pairs = sorted({normalize_pair(a, j) for a in inst.assignment_sets[k]} & f_members)
            equations.append(_Equation(f"lin_{k}_{j}", tuple(pairs), j))
    return equations


def _satisfies_assignment(inst: BqpInstance, x: XVector) -> bool:
    return all(sum(x[i - 1] for i in members) == 1 for members in inst.assignment_sets.values())


def enumerate_feasible_x(inst: BqpInstance, cap: int = DEFAULT_CAP_X) -> Tuple[List[XVector], Dict]:
    """
    List binary x with exactly one 1 in every assignment set.

    Walks the product of per-set choices or the full cube {0,1}^n,
    whichever is smaller, and returns vectors in descending lexicographic
    order.

    Returns:
        vectors: at most cap feasible vectors
        stats: {success, complete, count, method}; complete is False when
            more than cap feasible vectors exist
    """
    choice_sets = [sorted(inst.assignment_sets[k]) for k in inst.set_indices]
    choices = math.prod(len(members) for members in choice_sets)
    method = 'choices' if choices <= 2 ** inst.n else 'cube'

    if method == 'choices':
        def candidates():
            for picked in itertools.product(*choice_sets):
                x = [0] * inst.n
                for i in picked:
                    x[i - 1] = 1
                yield tuple(x)
    else:
        def candidates():
            yield from itertools.product((1, 0), repeat=inst.n)

    found: List[XVector] = []
    seen = set()
    complete = True
    for x in candidates():
        if x in seen or not _satisfies_assignment(inst, x):
            continue
        if len(found) >= cap:
            complete = False
            break
        seen.add(x)
        found.append(x)

    found.sort(reverse=True)
    if not complete:
        logger.warning("X_CAP: more than %d feasible assignments, enumeration truncated", cap)
    return found, {'success': True, 'complete': complete, 'count': len(found), 'method': method}


def _classify(pair: Pair, value: int, x: XVector) -> Optional[int]:
    i, j = pair
    xi, xj = x[i - 1], x[j - 1]
    if value == xi * xj:
        return None
    if value > xi:
        return 0
    if value > xj:
        return 1
    return 2


class _BinarySolver:
    """Backtracking enumeration of binary y solving the compact equations for fixed x."""

    def __init__(self, equations: List[_Equation], f_pairs: Tuple[Pair, ...]) -> None:
        order: List[Pair] = []
        placed = set()
        for eq in equations:
            for pair in eq.pairs:
                if pair not in placed:
                    placed.add(pair)
                    order.append(pair)
        order += [pair for pair in sorted(f_pairs) if pair not in placed]
        self.order = order
        self.equations = equations
        self.touching: Dict[Pair, List[int]] = {pair: [] for pair in order}
        for e, eq in enumerate(equations):
            for pair in eq.pairs:
                self.touching[pair].append(e)

    def solutions(self, x: XVector, cap: int):
        """Yield (solution, nodes_so_far); stops silently once cap nodes are used."""
        rhs = [x[eq.rhs_index - 1] for eq in self.equations]
        sums = [0] * len(self.equations)
        remaining = [len(eq.pairs) for eq in self.equations]
        values: Dict[Pair, int] = {}
        self.nodes = 0
        self.truncated = False

        def assign(depth: int):
            if depth == len(self.order):
                yield dict(values)
                return
            pair = self.order[depth]
            for value in (0, 1):
                self.nodes += 1
                if self.nodes > cap:
                    self.truncated = True
                    return
                feasible = True
                for e in self.touching[pair]:
                    remaining[e] -= 1
                    sums[e] += value
                    if sums[e] > rhs[e] or sums[e] + remaining[e] < rhs[e]:
                        feasible = False
                values[pair] = value
                if feasible:
                    yield from assign(depth + 1)
                for e in self.touching[pair]:
                    remaining[e] += 1
                    sums[e] -= value
                del values[pair]
                if self.truncated:
                    return

        yield from assign(0)


def propagate_y(inst: BqpInstance, plan: LinearizationPlan, x: XVector) -> PropagationResult:
    """
    Force y values from the compact equations for a fixed x.

    Every y in an equation with right-hand side 0 is forced to 0; in an
    equation with right-hand side 1 whose terms are all forced to 0 but
    one, that one is forced to 1. Repeats until nothing changes.
    """
    equations = _compact_equations(inst, plan)
    forced: Dict[Pair, int] = {}
    conflict: Optional[str] = None

    def force(pair: Pair, value: int, source: str) -> bool:
        nonlocal conflict
        if pair in forced:
            if forced[pair] != value:
                conflict = f"y{pair[0]}_{pair[1]} forced to both 0 and 1 (at {source})"
            return False
        forced[pair] = value
        return True

    changed = True
    while changed and conflict is None:
        changed = False
        for eq in equations:
            if x[eq.rhs_index - 1] == 0:
                for pair in eq.pairs:
                    changed |= force(pair, 0, eq.name)
            else:
                open_pairs = [pair for pair in eq.pairs if forced.get(pair) != 0]
                if not open_pairs:
                    conflict = f"{eq.name} has right-hand side 1 but every term is forced to 0"
                elif len(open_pairs) == 1:
                    changed |= force(open_pairs[0], 1, eq.name)
            if conflict is not None:
                break

    unresolved = tuple(pair for pair in sorted(plan.f_set) if pair not in forced)
    return PropagationResult(values=forced, conflict=conflict, unresolved=unresolved)


def check_consistency(inst: BqpInstance, plan: LinearizationPlan,
                      cap_x: int = DEFAULT_CAP_X, cap_y: int = DEFAULT_CAP_Y) -> ConsistencyReport:
    """
    Decide by exhaustive search whether, for every feasible x, the compact
    equations have exactly one binary solution and it is y = x * x on F.
    A feasible x with no solution at all is reported as excluded_x.

    The reported witness is the violation with the smallest pair, then
    the first bound in BOUNDS order, then the first x and y found.
    """
    vectors, stats = enumerate_feasible_x(inst, cap_x)
    equations = _compact_equations(inst, plan)
    solver = _BinarySolver(equations, plan.f_set)
    conditions_ok = check_conditions(inst, plan).ok

    best_key = None
    witness: Optional[Witness] = None
    truncated_y = False
    excluded_x: Optional[XVector] = None
    propagation_agrees: Optional[bool] = True if conditions_ok else None

    for x_position, x in enumerate(vectors):
        solutions = []
        for y_position, y in enumerate(solver.solutions(x, cap_y)):
            solutions.append(y)
            for pair in sorted(y):
                rank = _classify(pair, y[pair], x)
                if rank is None:
                    continue
                key = (pair, rank, x_position, y_position)
                if best_key is None or key < best_key:
                    best_key = key
                    witness = Witness(x=x, y=dict(y), violated_pair=pair, violated_bound=BOUNDS[rank])
                break
        if solver.truncated:
            truncated_y = True
            logger.warning("Y_CAP: search for x=%s stopped after %d nodes", x, cap_y)
            continue

        if not solutions and excluded_x is None:
            excluded_x = x
            logger.info("x=%s satisfies the assignment rows but no y solves the compact equations", x)

        if conditions_ok:
            propagated = propagate_y(inst, plan, x)
            if len(solutions) != 1 or not propagated.complete or propagated.values != solutions[0]:
                propagation_agrees = False

    exhaustive = stats['complete'] and not truncated_y
    note = "" if exhaustive else "not exhaustively verified"
    return ConsistencyReport(
        consistent=witness is None and excluded_x is None,
        x_assignments_checked=len(vectors),
        witness=witness,
        exhaustive=exhaustive,
        note=note,
        propagation_agrees=propagation_agrees,
        excluded_x=excluded_x,
    )


def liberti_plan(inst: BqpInstance) -> LinearizationPlan:
    """
    Plan built by the original recipe: B_k starts as A_k, and every product
    not yet covered gets j added to the smallest B_k with i in A_k. F is
    the normalized image; induced pairs are not closed.
    """
    b_sets = {k: set(inst.assignment_sets[k]) for k in inst.set_indices}
    for i, j in inst.products:
        covered = any((i in inst.assignment_sets[k] and j in b_sets[k]) or
                      (j in inst.assignment_sets[k] and i in b_sets[k])
                      for k in inst.set_indices)
        if covered:
            continue
        k = min(k for k in inst.set_indices if i in inst.assignment_sets[k])
        b_sets[k].add(j)
    return plan_from_sets(inst, b_sets)
