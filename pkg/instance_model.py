"""
Binary quadratic programs subject to assignment constraints.

An instance has binary variables x_1..x_n, assignment sets A_k (exactly one
x_i with i in A_k equals 1), and an ordered set E of products y_ij = x_i x_j
with i <= j. Objective coefficients and further linear rows are carried
through untouched so they can be re-emitted after linearization.

All indices are 1-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

Pair = Tuple[int, int]

SENSES = ('<=', '>=', '=')


@dataclass(frozen=True)
class ExtraConstraint:
    """A pass-through row C x + D y (sense) rhs."""
    linear: Dict[int, float] = field(default_factory=dict)
    quadratic: Dict[Pair, float] = field(default_factory=dict)
    sense: str = '>='
    rhs: float = 0.0


@dataclass(frozen=True)
class BqpInstance:
    n: int
    assignment_sets: Dict[int, FrozenSet[int]]
    products: Tuple[Pair, ...] = ()
    linear_objective: Dict[int, float] = field(default_factory=dict)
    quadratic_objective: Dict[Pair, float] = field(default_factory=dict)
    extra_constraints: Tuple[ExtraConstraint, ...] = ()

    @property
    def set_indices(self) -> List[int]:
        return sorted(self.assignment_sets)

    @property
    def product_set(self) -> FrozenSet[Pair]:
        return frozenset(self.products)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: Tuple[Tuple[str, str], ...]
    is_disjoint: bool


@dataclass(frozen=True)
class Substitution:
    """y_ij replaced by x_i (diagonal) or by the constant 0."""
    pair: Pair
    replacement: Optional[int]

    def __str__(self) -> str:
        i, j = self.pair
        target = f"x_{self.replacement}" if self.replacement is not None else "0"
        return f"y_{i}_{j} := {target}"


def make_instance(n: int,
                  assignment_sets: Dict[int, object],
                  products=(),
                  linear_objective: Optional[Dict[int, float]] = None,
                  quadratic_objective: Optional[Dict[Pair, float]] = None,
                  extra_constraints=()) -> BqpInstance:
    """Build an instance from plain Python containers."""
    return BqpInstance(
        n=int(n),
        assignment_sets={int(k): frozenset(int(i) for i in members)
                         for k, members in sorted(assignment_sets.items())},
        products=tuple((int(i), int(j)) for i, j in products),
        linear_objective=dict(linear_objective or {}),
        quadratic_objective=dict(quadratic_objective or {}),
        extra_constraints=tuple(extra_constraints),
    )


def normalize_pair(i: int, j: int) -> Pair:
    """Order a pair so that the smaller index comes first."""
    return (i, j) if i <= j else (j, i)


def sets_containing(inst: BqpInstance, i: int) -> Set[int]:
    """
    Return the indices k with i in A_k.

    Raises:
        ValueError: if i is outside 1..n
    """
    if not 1 <= i <= inst.n:
        raise ValueError(f"variable index {i} out of range 1..{inst.n}")
    return {k for k, members in inst.assignment_sets.items() if i in members}


def membership_map(inst: BqpInstance) -> Dict[int, List[int]]:
    """Map every variable to the sorted list of sets containing it."""
    membership: Dict[int, List[int]] = {i: [] for i in range(1, inst.n + 1)}
    for k in inst.set_indices:
        for i in inst.assignment_sets[k]:
            if i in membership:
                membership[i].append(k)
    return membership


def _is_disjoint(inst: BqpInstance) -> bool:
    for k, l in itertools.combinations(inst.set_indices, 2):
        if inst.assignment_sets[k] & inst.assignment_sets[l]:
            return False
    return True


def validate(inst: BqpInstance) -> ValidationReport:
    """
    Check the covering and range assumptions of an instance.

    Problems are collected as (code, message) entries; nothing is raised.
    """
    violations: List[Tuple[str, str]] = []

    if inst.n < 1:
        violations.append(('n_not_positive', f"n must be positive, got {inst.n}"))

    covered: Set[int] = set()
    for k in inst.set_indices:
        members = inst.assignment_sets[k]
        if not members:
            violations.append(('empty_set', f"assignment set {k} is empty"))
        for i in sorted(members):
            if not 1 <= i <= inst.n:
                violations.append(('index_range',
                                   f"assignment set {k} contains index {i} outside 1..{inst.n}"))
        covered |= members

    for i in range(1, inst.n + 1):
        if i not in covered:
            violations.append(('uncovered', f"variable {i} uncovered"))

    seen: Set[Pair] = set()
    for i, j in inst.products:
        if not (1 <= i <= inst.n and 1 <= j <= inst.n):
            violations.append(('index_range', f"product ({i},{j}) outside 1..{inst.n}"))
        elif i > j:
            violations.append(('pair_not_normalized',
                               f"pair ({i},{j}) not normalized (i <= j required)"))
        if (i, j) in seen:
            violations.append(('duplicate_pair', f"duplicate pair ({i},{j}) in products"))
        seen.add((i, j))

    for pair in sorted(inst.quadratic_objective):
        if pair not in seen:
            violations.append(('unknown_product',
                               f"objective term ({pair[0]},{pair[1]}) is not a declared product"))
    for row_index, row in enumerate(inst.extra_constraints, start=1):
        if row.sense not in SENSES:
            violations.append(('bad_sense', f"constraint {row_index} has sense {row.sense!r}"))
        for pair in sorted(row.quadratic):
            if pair not in seen:
                violations.append(('unknown_product',
                                   f"constraint {row_index} term ({pair[0]},{pair[1]}) "
                                   f"is not a declared product"))

    return ValidationReport(ok=not violations,
                            violations=tuple(violations),
                            is_disjoint=_is_disjoint(inst))


def shares_assignment_set(inst: BqpInstance, i: int, j: int) -> bool:
    return any(i in members and j in members for members in inst.assignment_sets.values())


def preprocess_trivial(inst: BqpInstance) -> Tuple[BqpInstance, List[Substitution]]:
    """
    Resolve products that need no linearization.

    y_ii becomes x_i because x is binary; y_ij with i != j in a common
    assignment set becomes 0 because at most one of them can be 1. The
    coefficients of y_ii move onto x_i; those of zeroed products are dropped.
    """
    log: List[Substitution] = []
    kept: List[Pair] = []
    for i, j in inst.products:
        if i == j:
            log.append(Substitution((i, j), i))
        elif shares_assignment_set(inst, i, j):
            log.append(Substitution((i, j), None))
        else:
            kept.append((i, j))

    if not log:
        return inst, log

    replaced = {s.pair: s.replacement for s in log}

    def fold(linear: Dict[int, float], quadratic: Dict[Pair, float]):
        new_linear = dict(linear)
        new_quadratic: Dict[Pair, float] = {}
        for pair, coeff in quadratic.items():
            if pair not in replaced:
                new_quadratic[pair] = coeff
            elif replaced[pair] is not None:
                target = replaced[pair]
                new_linear[target] = new_linear.get(target, 0.0) + coeff
        return new_linear, new_quadratic

    linear_objective, quadratic_objective = fold(inst.linear_objective, inst.quadratic_objective)
    rows = []
    for row in inst.extra_constraints:
        linear, quadratic = fold(row.linear, row.quadratic)
        rows.append(ExtraConstraint(linear=linear, quadratic=quadratic, sense=row.sense, rhs=row.rhs))

    simplified = BqpInstance(
        n=inst.n,
        assignment_sets=dict(inst.assignment_sets),
        products=tuple(kept),
        linear_objective=linear_objective,
        quadratic_objective=quadratic_objective,
        extra_constraints=tuple(rows),
    )
    return simplified, log
