"""
Size-minimizing choice of the sets B_k as a mixed-integer program.

Binary z_ik says i is in B_k; continuous f_ij (i <= j) says (i,j) is in F.

    fix    f_ij = 1                               (i,j) in E
    link_a f_ij - z_jk >= 0                       i in A_k, i <= j
    link_b f_ji - z_jk >= 0                       i in A_k, j < i
    cond1  sum_{k: i in A_k} z_jk - f_ij >= 0     i <= j
    cond2  sum_{k: j in A_k} z_ik - f_ij >= 0     i <= j

    minimize w_eqn * sum z + w_var * sum f

The model is solved here by a requirement-driven branch and bound over z
that is exact but only meant for small instances. With pairwise disjoint
A_k every row of the reduced constraint matrix has at most two nonzeros
of opposite sign, so the matrix is totally unimodular.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from compact_linearizer import (
    LinearizationPlan,
    construct_sets,
    heuristic_cost,
    plan_objective,
)
from instance_model import BqpInstance, Pair, membership_map, normalize_pair
from settings import DEFAULT_NODE_BUDGET, DEFAULT_SEED, DEFAULT_TU_MAX_ORDER, DEFAULT_TU_SAMPLES

logger = logging.getLogger(__name__)

ROW_ORIGINS = ('fix', 'link_a', 'link_b', 'cond1', 'cond2')


def z_name(i: int, k: int) -> str:
    return f"z{i}_{k}"


def f_name(i: int, j: int) -> str:
    return f"f{i}_{j}"


@dataclass(frozen=True)
class MilpRow:
    name: str
    origin: str
    terms: Tuple[Tuple[str, int], ...]
    sense: str
    rhs: int

    def satisfied_by(self, values: Dict[str, float], tolerance: float = 1e-9) -> bool:
        lhs = sum(coeff * values.get(var, 0.0) for var, coeff in self.terms)
        if self.sense == '=':
            return abs(lhs - self.rhs) <= tolerance
        if self.sense == '>=':
            return lhs >= self.rhs - tolerance
        return lhs <= self.rhs + tolerance


@dataclass(frozen=True)
class MilpModel:
    instance: BqpInstance
    z_vars: Tuple[Tuple[int, int], ...]
    f_vars: Tuple[Pair, ...]
    rows: Tuple[MilpRow, ...]
    w_eqn: float = 1.0
    w_var: float = 1.0

    def rows_by_origin(self, origin: str) -> List[MilpRow]:
        return [row for row in self.rows if row.origin == origin]

    def objective_terms(self) -> List[Tuple[str, float]]:
        terms = [(z_name(i, k), self.w_eqn) for i, k in self.z_vars]
        terms += [(f_name(i, j), self.w_var) for i, j in self.f_vars]
        return terms

    def evaluate(self, values: Dict[str, float]) -> List[MilpRow]:
        """Rows violated by the assignment (missing variables count as 0)."""
        return [row for row in self.rows if not row.satisfied_by(values)]


@dataclass(frozen=True)
class MilpSolution:
    plan: LinearizationPlan
    objective_value: float
    optimal: bool
    nodes_or_candidates_explored: int


@dataclass(frozen=True)
class TuReport:
    structural_ok: bool
    rows_checked: int
    sampled_determinants_ok: bool
    samples_checked: int = 0
    offending_row: Optional[str] = None
    counterexample: Optional[Dict] = None


def build_min_milp(inst: BqpInstance, w_eqn: float = 1.0, w_var: float = 1.0) -> MilpModel:
    """Build the size-minimization model for a validated instance."""
    if w_eqn < 0 or w_var < 0:
        raise ValueError("weights must be nonnegative")

    n = inst.n
    membership = membership_map(inst)
    z_vars = tuple((i, k) for k in inst.set_indices for i in range(1, n + 1))
    f_vars = tuple((i, j) for i in range(1, n + 1) for j in range(i, n + 1))

    rows: List[MilpRow] = []
    for i, j in inst.products:
        rows.append(MilpRow(f"fix_{i}_{j}", 'fix', ((f_name(i, j), 1),), '=', 1))

    for k in inst.set_indices:
        for i in sorted(inst.assignment_sets[k]):
            for j in range(1, n + 1):
                p, q = normalize_pair(i, j)
                origin = 'link_a' if i <= j else 'link_b'
                rows.append(MilpRow(f"link_{k}_{i}_{j}", origin,
                                    ((f_name(p, q), 1), (z_name(j, k), -1)), '>=', 0))

    for i, j in f_vars:
        terms = tuple((z_name(j, k), 1) for k in membership[i]) + ((f_name(i, j), -1),)
        rows.append(MilpRow(f"cond1_{i}_{j}", 'cond1', terms, '>=', 0))
    for i, j in f_vars:
        terms = tuple((z_name(i, k), 1) for k in membership[j]) + ((f_name(i, j), -1),)
        rows.append(MilpRow(f"cond2_{i}_{j}", 'cond2', terms, '>=', 0))

    return MilpModel(instance=inst, z_vars=z_vars, f_vars=f_vars, rows=tuple(rows),
                     w_eqn=float(w_eqn), w_var=float(w_var))


class _PlanView:
    """Read-only b_sets view so heuristic_cost can rank branches."""

    def __init__(self, b_sets: Dict[int, Set[int]]) -> None:
        self.b_sets = b_sets


class _Search:

    def __init__(self, model: MilpModel, budget: int) -> None:
        self.inst = model.instance
        self.w_eqn = model.w_eqn
        self.w_var = model.w_var
        self.budget = budget
        self.membership = membership_map(self.inst)
        self.nodes = 0
        self.exhausted = False
        self.best_value: Optional[float] = None
        self.best: Optional[Tuple[Dict[int, Set[int]], Set[Pair]]] = None

    def value(self, b_sets: Dict[int, Set[int]], f_set: Set[Pair]) -> float:
        return self.w_eqn * sum(len(v) for v in b_sets.values()) + self.w_var * len(f_set)

    def requirement(self, b_sets, f_set) -> Optional[Tuple[List[int], int]]:
        """First pair of F lacking Condition 1 or 2, as (candidate sets, index to add)."""
        for i, j in sorted(f_set):
            if not any(j in b_sets[k] for k in self.membership[i]):
                return self.membership[i], j
            if not any(i in b_sets[l] for l in self.membership[j]):
                return self.membership[j], i
        return None

    def run(self, b_sets: Dict[int, Set[int]], f_set: Set[Pair]) -> None:
        if self.exhausted:
            return
        self.nodes += 1
        if self.nodes > self.budget:
            self.exhausted = True
            logger.warning("SEARCH_BUDGET: node budget %d exhausted", self.budget)
            return

        current = self.value(b_sets, f_set)
        if self.best_value is not None and current >= self.best_value:
            return

        needed = self.requirement(b_sets, f_set)
        if needed is None:
            self.best_value = current
            self.best = ({k: set(v) for k, v in b_sets.items()}, set(f_set))
            return

        candidates, target = needed
        view = _PlanView(b_sets)
        ranked = sorted(candidates, key=lambda k: (heuristic_cost(self.inst, view, target, k), k))
        for k in ranked:
            child_b = {key: set(v) for key, v in b_sets.items()}
            child_b[k].add(target)
            child_f = set(f_set)
            for a in self.inst.assignment_sets[k]:
                child_f.add(normalize_pair(a, target))
            self.run(child_b, child_f)
            if self.exhausted:
                return


def solution_values(plan: LinearizationPlan) -> Dict[str, float]:
    """z/f assignment encoding a plan."""
    values: Dict[str, float] = {}
    for k, members in plan.b_sets.items():
        for i in members:
            values[z_name(i, k)] = 1.0
    for i, j in plan.f_set:
        values[f_name(i, j)] = 1.0
    return values


def solve_exact(model: MilpModel, limits: int = DEFAULT_NODE_BUDGET) -> MilpSolution:
    """
    Minimize the weighted size exactly by branch and bound over z.

    Each node picks the first pair of F that lacks Condition 1 (or 2) and
    branches over the sets that could supply it; f is never branched on,
    it is the normalized image of the chosen B_k together with E. Any
    feasible z contains a leaf of this tree, so the search is exact.
    A node is cut when its partial objective reaches the incumbent.

    Args:
        model: model from build_min_milp
        limits: maximum number of search nodes

    Returns:
        MilpSolution; optimal=False when the budget ran out first
    """
    inst = model.instance
    search = _Search(model, limits)
    b_sets: Dict[int, Set[int]] = {k: set() for k in inst.set_indices}
    search.run(b_sets, set(inst.products))

    if search.best is None:
        if not search.exhausted:
            raise ValueError("size-minimization model is infeasible; is every variable covered?")
        plan = construct_sets(inst)
        logger.warning("SEARCH_BUDGET: no incumbent found, returning the closure plan")
    else:
        best_b, best_f = search.best
        plan = LinearizationPlan(
            b_sets={k: frozenset(v) for k, v in sorted(best_b.items())},
            f_set=tuple(sorted(best_f)),
        )

    violated = model.evaluate(solution_values(plan))
    if violated:
        logger.error("decoded plan violates %d model rows, first %s", len(violated), violated[0].name)

    return MilpSolution(
        plan=plan,
        objective_value=plan_objective(plan, model.w_eqn, model.w_var),
        optimal=not search.exhausted,
        nodes_or_candidates_explored=search.nodes,
    )


def integer_determinant(matrix: np.ndarray) -> int:
    """Exact determinant of an integer square matrix (fraction-free Bareiss elimination)."""
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("integer_determinant expects a square matrix")
    n = a.shape[0]
    if n == 0:
        return 1
    a = [[int(v) for v in row] for row in a]
    sign = 1
    previous = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for r in range(k + 1, n):
            for c in range(k + 1, n):
                a[r][c] = (a[r][c] * pivot - a[r][k] * a[k][c]) // previous
            a[r][k] = 0
        previous = pivot
    return sign * a[n - 1][n - 1]


def tu_pattern_matrix(model: MilpModel) -> Tuple[np.ndarray, List[str], List[str]]:
    """
    Rows link/cond over the columns [F Z], with the f columns fixed by
    E removed.

    Returns:
        matrix, row names, column names
    """
    fixed = {f_name(i, j) for i, j in model.instance.products}
    columns = [f_name(i, j) for i, j in model.f_vars if f_name(i, j) not in fixed]
    columns += [z_name(i, k) for i, k in model.z_vars]
    position = {name: c for c, name in enumerate(columns)}

    body = [row for row in model.rows if row.origin != 'fix']
    matrix = np.zeros((len(body), len(columns)), dtype=np.int64)
    for r, row in enumerate(body):
        for var, coeff in row.terms:
            if var in position:
                matrix[r, position[var]] += coeff
    return matrix, [row.name for row in body], columns


def check_tu_structure(model: MilpModel,
                       samples: int = DEFAULT_TU_SAMPLES,
                       max_order: int = DEFAULT_TU_MAX_ORDER,
                       seed: int = DEFAULT_SEED) -> TuReport:
    """
    Check the two-nonzeros-of-opposite-sign row structure and sample
    square submatrices for determinants outside {-1, 0, 1}.
    """
    matrix, row_names, column_names = tu_pattern_matrix(model)

    structural_ok = True
    offending_row = None
    for r in range(matrix.shape[0]):
        nonzero = matrix[r][matrix[r] != 0]
        if len(nonzero) > 2 or (len(nonzero) == 2 and int(nonzero.sum()) != 0):
            structural_ok = False
            offending_row = row_names[r]
            break

    sampled_ok = True
    counterexample = None
    checked = 0
    rows, cols = matrix.shape
    largest = min(max_order, rows, cols)
    if largest >= 1:
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            order = int(rng.integers(1, largest + 1))
            picked_rows = sorted(int(v) for v in rng.choice(rows, order, replace=False))
            picked_cols = sorted(int(v) for v in rng.choice(cols, order, replace=False))
            det = integer_determinant(matrix[np.ix_(picked_rows, picked_cols)])
            checked += 1
            if abs(det) > 1:
                sampled_ok = False
                counterexample = {
                    'rows': [row_names[r] for r in picked_rows],
                    'columns': [column_names[c] for c in picked_cols],
                    'determinant': det,
                }
                break

    return TuReport(structural_ok=structural_ok, rows_checked=int(matrix.shape[0]),
                    sampled_determinants_ok=sampled_ok, samples_checked=checked,
                    offending_row=offending_row, counterexample=counterexample)
