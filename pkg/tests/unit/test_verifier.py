"""
Unit tests for the semantic consistency checks.
"""

import os
import sys
import unittest

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from compact_linearizer import LinearizationPlan, check_conditions, construct_sets
from instance_model import make_instance
from verifier import (
    BOUNDS,
    check_consistency,
    enumerate_feasible_x,
    liberti_plan,
    propagate_y,
)

EX1 = make_instance(4, {1: [1, 2], 2: [3, 4]}, [(1, 3)])
QAP2 = make_instance(4, {1: [1, 2], 2: [3, 4], 3: [1, 3], 4: [2, 4]}, [(1, 4)])


@pytest.mark.unit
class TestEnumerateFeasibleX(unittest.TestCase):

    def test_ex1(self):
        vectors, stats = enumerate_feasible_x(EX1)

        self.assertEqual(vectors, [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)])
        self.assertTrue(stats['success'])
        self.assertTrue(stats['complete'])
        self.assertEqual(stats['count'], 4)
        self.assertEqual(stats['method'], 'choices')

    def test_qap2_permutations(self):
        vectors, _ = enumerate_feasible_x(QAP2)
        self.assertEqual(vectors, [(1, 0, 0, 1), (0, 1, 1, 0)])

    def test_cap(self):
        vectors, stats = enumerate_feasible_x(EX1, cap=2)

        self.assertEqual(vectors, [(1, 0, 1, 0), (1, 0, 0, 1)])
        self.assertFalse(stats['complete'])

    def test_cube_is_used_for_many_overlapping_sets(self):
        inst = make_instance(3, {1: [1, 2, 3], 2: [1, 2, 3], 3: [1, 2, 3]})
        vectors, stats = enumerate_feasible_x(inst)

        self.assertEqual(stats['method'], 'cube')
        self.assertEqual(vectors, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])


@pytest.mark.unit
class TestPropagation(unittest.TestCase):

    def test_ex1_forces_products(self):
        result = propagate_y(EX1, construct_sets(EX1), (1, 0, 1, 0))

        self.assertTrue(result.complete)
        self.assertEqual(result.values, {(1, 3): 1, (2, 3): 0, (1, 4): 0, (2, 4): 0})

    def test_ex1_all_feasible_x(self):
        plan = construct_sets(EX1)
        vectors, _ = enumerate_feasible_x(EX1)
        for x in vectors:
            result = propagate_y(EX1, plan, x)
            expected = {(i, j): x[i - 1] * x[j - 1] for i, j in plan.f_set}
            self.assertEqual(result.values, expected)

    def test_original_recipe_leaves_pairs_open(self):
        result = propagate_y(EX1, liberti_plan(EX1), (0, 1, 1, 0))

        self.assertFalse(result.complete)
        self.assertIn((1, 3), result.unresolved)
        self.assertIsNone(result.conflict)

    def test_conflict_on_infeasible_x(self):
        result = propagate_y(EX1, construct_sets(EX1), (0, 0, 1, 0))

        self.assertIsNotNone(result.conflict)


@pytest.mark.unit
class TestCheckConsistency:
    """Test suite for the exhaustive oracle."""

    def test_closure_plan_is_consistent(self):
        report = check_consistency(EX1, construct_sets(EX1))

        assert report.consistent
        assert report.x_assignments_checked == 4
        assert report.exhaustive
        assert report.note == ""
        assert report.propagation_agrees is True
        assert report.witness is None

    def test_original_recipe_witness(self):
        report = check_consistency(EX1, liberti_plan(EX1))
        witness = report.witness

        assert not report.consistent
        assert witness.violated_pair == (1, 3)
        assert witness.violated_bound == "y <= x_i"
        assert witness.x == (0, 1, 1, 0)
        assert witness.y[(1, 3)] == 1
        assert witness.y[(2, 3)] == 0
        assert report.propagation_agrees is None

    def test_witness_document(self):
        document = check_consistency(EX1, liberti_plan(EX1)).to_dict()

        assert document['consistent'] is False
        assert document['witness']['pair'] == [1, 3]
        assert document['witness']['bound'] == BOUNDS[0]
        assert document['witness']['y']['1,3'] == 1

    def test_y_cap_marks_report_incomplete(self, caplog):
        with caplog.at_level('WARNING'):
            report = check_consistency(EX1, construct_sets(EX1), cap_y=1)

        assert not report.exhaustive
        assert report.note == "not exhaustively verified"
        assert "Y_CAP" in caplog.text

    def test_x_cap_marks_report_incomplete(self):
        report = check_consistency(EX1, construct_sets(EX1), cap_x=1)

        assert report.consistent
        assert report.x_assignments_checked == 1
        assert not report.exhaustive

    def test_qap2_closure(self):
        report = check_consistency(QAP2, construct_sets(QAP2))

        assert report.consistent
        assert report.x_assignments_checked == 2

    def test_no_products(self):
        inst = make_instance(4, {1: [1, 2], 2: [3, 4]})
        report = check_consistency(inst, construct_sets(inst))

        assert report.consistent
        assert report.x_assignments_checked == 4

    def test_plan_that_cuts_off_a_feasible_x(self):
        plan = LinearizationPlan(b_sets={1: frozenset({3, 4}), 2: frozenset({1, 2})},
                                 f_set=((1, 3), (1, 4), (2, 3)))
        report = check_consistency(EX1, plan)

        assert not report.consistent
        assert report.exhaustive
        assert report.witness is None
        assert report.excluded_x == (0, 1, 0, 1)
        assert report.to_dict()['excluded_x'] == [0, 1, 0, 1]

    def test_consistent_plan_excludes_nothing(self):
        report = check_consistency(QAP2, construct_sets(QAP2))

        assert report.excluded_x is None
        assert report.to_dict()['excluded_x'] is None


@pytest.mark.unit
class TestLibertiPlan:

    def test_ex1_sets(self):
        plan = liberti_plan(EX1)

        assert plan.b_sets == {1: frozenset({1, 2, 3}), 2: frozenset({3, 4})}
        assert {(1, 3), (2, 3), (1, 1), (1, 2), (3, 4)} <= set(plan.f_set)
        assert plan.total_b == 5

    def test_fails_condition_2_on_1_3(self):
        report = check_conditions(EX1, liberti_plan(EX1))
        assert report.violations[0] == ((1, 3), 2)

    def test_covered_products_add_nothing(self):
        inst = make_instance(4, {1: [1, 2], 2: [3, 4]}, [(1, 2)])
        plan = liberti_plan(inst)

        assert plan.b_sets == {1: frozenset({1, 2}), 2: frozenset({3, 4})}
