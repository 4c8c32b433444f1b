"""
End-to-end checks over seeded batches of random instances.

The large batches are marked slow; run them with `pytest -m slow`.
"""

import logging
import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from compact_linearizer import check_conditions, construct_sets, plan_objective, serialize_plan
from emitter import emit_compact, emit_standard, size_report, write_lp
from generators import random_disjoint_instance, random_overlapping_instance
from instance_model import make_instance
from minimization_milp import build_min_milp, check_tu_structure, solve_exact
from verifier import check_consistency, liberti_plan

logger = logging.getLogger(__name__)

DISJOINT_SEEDS = range(200)
SMALL_Z_SEEDS = range(50)
OVERLAPPING_SEEDS = range(100)
OVERLAPPING_BUDGET = 20000


@pytest.mark.slow
@pytest.mark.integration
class TestDisjointClosure:
    """Closure plans on random disjoint instances."""

    def test_structural(self):
        for seed in DISJOINT_SEEDS:
            inst = random_disjoint_instance(seed)
            plan = construct_sets(inst)

            assert check_conditions(inst, plan).ok, f"seed {seed}"
            assert set(inst.products) <= set(plan.f_set), f"seed {seed}"

    def test_semantic(self):
        for seed in DISJOINT_SEEDS:
            inst = random_disjoint_instance(seed)
            report = check_consistency(inst, construct_sets(inst))

            assert report.consistent, f"seed {seed}: {report.witness}"
            assert report.exhaustive, f"seed {seed}"
            assert report.propagation_agrees is True, f"seed {seed}"

    def test_row_counts(self):
        for seed in DISJOINT_SEEDS:
            inst = random_disjoint_instance(seed)
            plan = construct_sets(inst)
            report = size_report(inst, plan)

            assert len(emit_compact(inst, plan).linearization_rows) == report.compact_rows == plan.total_b
            assert len(emit_standard(inst).linearization_rows) == report.standard_rows == 3 * len(inst.products)


@pytest.mark.slow
@pytest.mark.integration
class TestDisjointOptimality:

    @pytest.mark.parametrize("weights", [(1, 1), (1, 0), (0, 1)])
    def test_exact_matches_closure(self, weights):
        for seed in SMALL_Z_SEEDS:
            inst = random_disjoint_instance(seed, max_z=24)
            closure = construct_sets(inst)
            solution = solve_exact(build_min_milp(inst, *weights))

            assert solution.optimal, f"seed {seed}"
            assert solution.objective_value == plan_objective(closure, *weights), f"seed {seed}"
            assert solution.plan.same_sets(closure), f"seed {seed}"

    def test_total_unimodularity(self):
        for seed in SMALL_Z_SEEDS:
            report = check_tu_structure(build_min_milp(random_disjoint_instance(seed, max_z=24)), seed=0)

            assert report.structural_ok, f"seed {seed}: {report.offending_row}"
            assert report.sampled_determinants_ok, f"seed {seed}: {report.counterexample}"


@pytest.mark.slow
@pytest.mark.integration
def test_overlapping_heuristic():
    for seed in OVERLAPPING_SEEDS:
        inst = random_overlapping_instance(seed)
        plan = construct_sets(inst)

        assert check_conditions(inst, plan).ok, f"seed {seed}"
        assert check_consistency(inst, plan).consistent, f"seed {seed}"

        solution = solve_exact(build_min_milp(inst), OVERLAPPING_BUDGET)
        if solution.optimal:
            heuristic = plan_objective(plan)
            assert heuristic >= solution.objective_value, f"seed {seed}"
            logger.info("seed %d: heuristic %g, optimum %g", seed, heuristic, solution.objective_value)


@pytest.mark.integration
class TestOriginalRecipeFlaw:

    def test_ex1(self, ex1):
        plan = liberti_plan(ex1)

        assert plan.b_sets == {1: frozenset({1, 2, 3}), 2: frozenset({3, 4})}
        assert check_conditions(ex1, plan).violations[0] == ((1, 3), 2)
        witness = check_consistency(ex1, plan).witness
        assert witness.violated_pair == (1, 3)
        assert witness.violated_bound == "y <= x_i"

    def test_hand_traced_closure(self, ex1):
        plan = construct_sets(ex1)

        assert plan.b_sets == {1: frozenset({3, 4}), 2: frozenset({1, 2})}
        assert set(plan.f_set) == {(1, 3), (2, 3), (1, 4), (2, 4)}


@pytest.mark.integration
@pytest.mark.parametrize("q1, q2", [(1, 2), (2, 2), (2, 3), (3, 4), (4, 4)])
def test_compactness_for_complete_cross_products(q1, q2):
    a1 = list(range(1, q1 + 1))
    a2 = list(range(q1 + 1, q1 + q2 + 1))
    inst = make_instance(q1 + q2, {1: a1, 2: a2}, [(i, j) for i in a1 for j in a2])
    report = size_report(inst, construct_sets(inst))

    assert report.compact_rows == q1 + q2
    assert report.standard_rows == 3 * q1 * q2
    assert report.compact_rows < report.standard_rows


@pytest.mark.integration
@pytest.mark.parametrize("seed", range(5))
def test_repeated_runs_are_identical(seed):
    def artifacts():
        inst = random_overlapping_instance(seed)
        plan = construct_sets(inst)
        model = build_min_milp(inst)
        return (
            serialize_plan(plan),
            plan.f_set,
            write_lp(emit_compact(inst, plan)),
            write_lp(model),
            check_consistency(inst, plan).to_dict(),
            check_tu_structure(model, seed=0),
        )

    assert artifacts() == artifacts()
