"""
Compact linearization sets.

Each assignment constraint k is multiplied by the variables in a set B_k;
every induced product x_a x_j (a in A_k, j in B_k) becomes a variable y in F.
The linearization is consistent iff for every (i,j) in F

    Condition 1: some k has i in A_k and j in B_k, and
    Condition 2: some l has j in A_l and i in B_l.

construct_sets computes B_k and F by closing E under these two conditions.
With pairwise disjoint A_k the closure is unique and minimal; with
overlapping A_k the set receiving an index is picked by a greedy cost.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np

from instance_model import BqpInstance, Pair, normalize_pair

logger = logging.getLogger(__name__)


class PlanFormatError(ValueError):
    """Raised when a plan document is malformed."""


@dataclass(frozen=True)
class Provenance:
    """The event that first put a pair into F."""
    source: Pair
    set_index: Optional[int]
    role: str  # 'product', 'k' (Condition 1 step) or 'l' (Condition 2 step)


@dataclass(frozen=True)
class LinearizationPlan:
    b_sets: Dict[int, FrozenSet[int]]
    f_set: Tuple[Pair, ...]
    provenance: Dict[Pair, Provenance] = field(default_factory=dict, compare=False)

    @property
    def total_b(self) -> int:
        return sum(len(members) for members in self.b_sets.values())

    def b(self, k: int) -> FrozenSet[int]:
        return self.b_sets.get(k, frozenset())

    def same_sets(self, other: "LinearizationPlan") -> bool:
        """Set-level equality of B_k (empty sets ignored) and F."""
        mine = {k: v for k, v in self.b_sets.items() if v}
        theirs = {k: v for k, v in other.b_sets.items() if v}
        return mine == theirs and set(self.f_set) == set(other.f_set)


@dataclass(frozen=True)
class ConditionReport:
    ok: bool
    violations: Tuple[Tuple[Pair, int], ...]
    missing_products: Tuple[Pair, ...] = ()
    extra_pairs: Tuple[Pair, ...] = ()
    unlisted_pairs: Tuple[Pair, ...] = ()


class PartialPlan:
    """Mutable B_k / F under construction; F keeps insertion order."""

    def __init__(self, inst: BqpInstance) -> None:
        self.b_sets: Dict[int, Set[int]] = {k: set() for k in inst.set_indices}
        self.f_order: List[Pair] = []
        self.f_members: Set[Pair] = set()
        self.provenance: Dict[Pair, Provenance] = {}

    def add_pair(self, pair: Pair, origin: Provenance) -> bool:
        if pair in self.f_members:
            return False
        self.f_members.add(pair)
        self.f_order.append(pair)
        self.provenance[pair] = origin
        return True

    def freeze(self) -> LinearizationPlan:
        return LinearizationPlan(
            b_sets={k: frozenset(v) for k, v in sorted(self.b_sets.items())},
            f_set=tuple(self.f_order),
            provenance=dict(self.provenance),
        )


def _b_members(plan, k: int) -> Iterable[int]:
    return plan.b_sets.get(k, ())


def phi_image(inst: BqpInstance, b_sets: Dict[int, Iterable[int]]) -> Set[Pair]:
    """All normalized pairs of the union of A_k x B_k."""
    image: Set[Pair] = set()
    for k, members in b_sets.items():
        for j in members:
            for a in inst.assignment_sets.get(k, ()):
                image.add(normalize_pair(a, j))
    return image


def heuristic_cost(inst: BqpInstance, plan, i: int, k: int) -> int:
    """
    Number of product variables that adding i to B_k would newly require.

    For each u in A_k the pair (u,i) is already implied when some l has
    u in A_l and i in B_l, or i in A_l and u in B_l.
    """
    cost = 0
    for u in inst.assignment_sets[k]:
        implied = False
        for l, members in inst.assignment_sets.items():
            b_l = _b_members(plan, l)
            if (u in members and i in b_l) or (i in members and u in b_l):
                implied = True
                break
        if not implied:
            cost += 1
    return cost


def select_k_star(inst: BqpInstance, plan, i: int, j: int) -> int:
    """
    Pick the set k with i in A_k whose B_k should receive j.

    A candidate already holding j wins outright; otherwise the cheapest
    candidate by heuristic_cost(j, k), ties to the smallest k.
    """
    candidates = sorted(k for k, members in inst.assignment_sets.items() if i in members)
    if not candidates:
        raise ValueError(f"variable {i} is not covered by any assignment set")
    for k in candidates:
        if j in _b_members(plan, k):
            return k
    if len(candidates) == 1:
        return candidates[0]
    return min(candidates, key=lambda k: (heuristic_cost(inst, plan, j, k), k))


def select_l_star(inst: BqpInstance, plan, i: int, j: int) -> int:
    """Pick the set l with j in A_l whose B_l should receive i."""
    return select_k_star(inst, plan, j, i)


def _extend(inst: BqpInstance, partial: PartialPlan, k: int, target: int,
            source: Pair, role: str, f_add: List[Pair]) -> None:
    if target in partial.b_sets[k]:
        return
    partial.b_sets[k].add(target)
    for a in sorted(inst.assignment_sets[k]):
        pair = normalize_pair(a, target)
        if partial.add_pair(pair, Provenance(source, k, role)):
            f_add.append(pair)


def _append(inst: BqpInstance, partial: PartialPlan, f_new: List[Pair]) -> List[Pair]:
    f_add: List[Pair] = []
    for i, j in f_new:
        k_star = select_k_star(inst, partial, i, j)
        _extend(inst, partial, k_star, j, (i, j), 'k', f_add)
        l_star = select_l_star(inst, partial, i, j)
        _extend(inst, partial, l_star, i, (i, j), 'l', f_add)
    return f_add


def construct_sets(inst: BqpInstance, shuffle_seed: Optional[int] = None) -> LinearizationPlan:
    """
    Close E under Conditions 1 and 2.

    Pairs are processed in rounds: the pairs created in one round are the
    work list of the next, until a round creates nothing. F only grows and
    is bounded by the n(n+1)/2 normalized pairs, so the loop terminates.

    Args:
        inst: validated instance
        shuffle_seed: if given, each round's work list is processed in a
            seeded random order instead of discovery order

    Returns:
        LinearizationPlan with E contained in F and both conditions holding
    """
    partial = PartialPlan(inst)
    f_new: List[Pair] = []
    for pair in inst.products:
        if partial.add_pair(pair, Provenance(pair, None, 'product')):
            f_new.append(pair)

    rng = np.random.default_rng(shuffle_seed) if shuffle_seed is not None else None
    rounds = 0
    while f_new:
        rounds += 1
        if rng is not None:
            f_new = [f_new[p] for p in rng.permutation(len(f_new))]
        f_new = _append(inst, partial, f_new)
        logger.debug("closure round %d added %d pairs", rounds, len(f_new))

    plan = partial.freeze()
    logger.debug("closure finished after %d rounds: sum|B_k|=%d |F|=%d",
                 rounds, plan.total_b, len(plan.f_set))
    return plan


def check_conditions(inst: BqpInstance, plan: LinearizationPlan) -> ConditionReport:
    """
    Check Conditions 1 and 2 for every pair of F, E within F, and that F is
    exactly the normalized image of the union of A_k x B_k.
    """
    violations: List[Tuple[Pair, int]] = []
    f_members = set(plan.f_set)
    for i, j in plan.f_set:
        condition_1 = any(i in inst.assignment_sets[k] and j in plan.b(k)
                          for k in inst.set_indices)
        condition_2 = any(j in inst.assignment_sets[l] and i in plan.b(l)
                          for l in inst.set_indices)
        if not condition_1:
            violations.append(((i, j), 1))
        if not condition_2:
            violations.append(((i, j), 2))

    missing = tuple(pair for pair in inst.products if pair not in f_members)
    image = phi_image(inst, plan.b_sets)
    extra = tuple(sorted(p for p in f_members if p not in image))
    unlisted = tuple(sorted(image - f_members))

    ok = not (violations or missing or extra or unlisted)
    return ConditionReport(ok=ok, violations=tuple(violations), missing_products=missing,
                           extra_pairs=extra, unlisted_pairs=unlisted)


def plan_objective(plan: LinearizationPlan, w_eqn: float = 1.0, w_var: float = 1.0) -> float:
    """Weighted size: w_eqn * sum |B_k| + w_var * |F|."""
    return w_eqn * plan.total_b + w_var * len(plan.f_set)


def plan_from_sets(inst: BqpInstance, b_sets: Dict[int, Iterable[int]],
                   extra_pairs: Iterable[Pair] = ()) -> LinearizationPlan:
    """Plan whose F is the normalized image of the given B_k (plus extra pairs)."""
    pairs = phi_image(inst, b_sets) | set(extra_pairs)
    frozen = {k: frozenset(b_sets.get(k, ())) for k in inst.set_indices}
    return LinearizationPlan(b_sets=frozen, f_set=tuple(sorted(pairs)))


def plan_to_document(plan: LinearizationPlan) -> Dict:
    return {
        'b_sets': {str(k): sorted(members) for k, members in sorted(plan.b_sets.items())},
        'f_set': [[i, j] for i, j in sorted(plan.f_set)],
    }


def serialize_plan(plan: LinearizationPlan) -> str:
    return json.dumps(plan_to_document(plan), indent=2) + "\n"


def parse_plan(text: str) -> LinearizationPlan:
    """Read a plan document; the F listed in the document is taken as is."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanFormatError(f"syntax error: {exc.msg} (line {exc.lineno}, column {exc.colno})")
    if not isinstance(doc, dict) or 'b_sets' not in doc or 'f_set' not in doc:
        raise PlanFormatError("plan must be an object with keys 'b_sets' and 'f_set'")
    try:
        b_sets = {int(k): frozenset(int(i) for i in members)
                  for k, members in doc['b_sets'].items()}
        f_set = []
        for entry in doc['f_set']:
            i, j = (int(v) for v in entry)
            if i > j:
                raise PlanFormatError(f"pair ({i},{j}) not normalized (i <= j required)")
            f_set.append((i, j))
    except (TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, PlanFormatError):
            raise
        raise PlanFormatError(f"malformed plan: {exc}")
    return LinearizationPlan(b_sets=dict(sorted(b_sets.items())), f_set=tuple(f_set))


def validate_plan(inst: BqpInstance, plan: LinearizationPlan) -> None:
    """
    Check that a plan refers only to the instance's sets and variables.

    Raises:
        PlanFormatError: for a B_k key outside K, or an index outside 1..n
            in some B_k or F pair
    """
    for k, members in plan.b_sets.items():
        if k not in inst.assignment_sets:
            raise PlanFormatError(f"B_{k} refers to an unknown assignment set")
        outside = sorted(i for i in members if not 1 <= i <= inst.n)
        if outside:
            raise PlanFormatError(f"B_{k} contains index {outside[0]} outside 1..{inst.n}")
    for i, j in plan.f_set:
        if not (1 <= i <= inst.n and 1 <= j <= inst.n):
            raise PlanFormatError(f"pair ({i},{j}) in F has an index outside 1..{inst.n}")
