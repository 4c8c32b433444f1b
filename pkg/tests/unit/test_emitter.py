"""
Unit tests for model emission and LP rendering.
"""

import os
import sys

import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from compact_linearizer import construct_sets
from emitter import (
    InconsistentPlanError,
    compare_sizes,
    emit_compact,
    emit_standard,
    evaluate_rows,
    format_number,
    product_assignment,
    size_report,
    write_lp,
)
from instance_model import make_instance
from minimization_milp import build_min_milp
from verifier import liberti_plan


def equations(model):
    return {row.name: row.terms for row in model.linearization_rows}


@pytest.mark.unit
class TestEmitCompact:
    """Test suite for the compact equations."""

    def test_ex1_equations(self, ex1):
        model = emit_compact(ex1, construct_sets(ex1))

        assert equations(model) == {
            'lin_1_3': (('y1_3', 1.0), ('y2_3', 1.0), ('x3', -1.0)),
            'lin_1_4': (('y1_4', 1.0), ('y2_4', 1.0), ('x4', -1.0)),
            'lin_2_1': (('y1_3', 1.0), ('y1_4', 1.0), ('x1', -1.0)),
            'lin_2_2': (('y2_3', 1.0), ('y2_4', 1.0), ('x2', -1.0)),
        }
        assert all(row.sense == '=' and row.rhs == 0 for row in model.linearization_rows)
        assert [row.name for row in model.rows[:2]] == ['assign_1', 'assign_2']
        assert not model.unsafe

    def test_refuses_inconsistent_plan(self, ex1):
        with pytest.raises(InconsistentPlanError) as excinfo:
            emit_compact(ex1, liberti_plan(ex1))

        assert "pair (1,3) fails Condition 2" in str(excinfo.value)
        assert not excinfo.value.report.ok

    def test_unsafe_emission(self, ex1, caplog):
        with caplog.at_level('WARNING'):
            model = emit_compact(ex1, liberti_plan(ex1), unsafe=True)

        assert model.unsafe
        assert len(model.linearization_rows) == 5
        assert equations(model)['lin_1_3'] == (('y1_3', 1.0), ('y2_3', 1.0), ('x3', -1.0))
        assert "UNSAFE_EMIT" in caplog.text
        assert "UNSAFE" in write_lp(model)

    def test_no_products(self):
        inst = make_instance(4, {1: [1, 2], 2: [3, 4]})
        model = emit_compact(inst, construct_sets(inst))

        assert [row.origin for row in model.rows] == ['assignment', 'assignment']
        assert model.y_vars == []

    def test_passthrough_rows_and_objective(self, ex1_full):
        model = emit_compact(ex1_full, construct_sets(ex1_full))
        text = write_lp(model)

        assert " obj: 2 x1 - 1.5 x4 + 7 y1_2 + 4 y1_3 - y2_4 + 2 y3_3" in text
        assert " extra_1: x2 + y1_3 + y3_3 <= 1" in text
        assert set(ex1_full.products) <= set(model.y_pairs)

    def test_true_products_satisfy_every_row(self, ex1):
        model = emit_compact(ex1, construct_sets(ex1))

        for x in [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]:
            assert evaluate_rows(model, product_assignment(model, x)) == []

    def test_wrong_products_violate_a_row(self, ex1):
        model = emit_compact(ex1, construct_sets(ex1))
        y = {(1, 3): 0, (2, 3): 0, (1, 4): 0, (2, 4): 0}
        violated = evaluate_rows(model, product_assignment(model, (1, 0, 1, 0), y))

        assert [row.name for row in violated] == ['lin_1_3', 'lin_2_1']


@pytest.mark.unit
class TestEmitStandard:

    def test_three_rows_per_product(self, ex1):
        model = emit_standard(ex1)

        assert [row.name for row in model.linearization_rows] == ['std_1_3_a', 'std_1_3_b', 'std_1_3_c']
        assert model.y_vars == ['y1_3']

    def test_row_count(self):
        inst = make_instance(6, {1: [1, 2, 3], 2: [4, 5, 6]}, [(1, 4), (1, 5), (2, 6), (3, 4), (3, 6)])
        assert len(emit_standard(inst).linearization_rows) == 15

    def test_diagonal_rows(self):
        inst = make_instance(2, {1: [1, 2]}, [(2, 2)])
        text = write_lp(emit_standard(inst))

        assert " std_2_2_a: y2_2 - x2 <= 0" in text
        assert " std_2_2_b: y2_2 - x2 <= 0" in text
        assert " std_2_2_c: y2_2 - 2 x2 >= -1" in text


@pytest.mark.unit
class TestSizes:

    def test_ex1_report(self, ex1):
        report = size_report(ex1, construct_sets(ex1))

        assert report.to_dict() == {
            'n': 4, 'num_sets': 2, 'num_products': 1, 'num_f': 4, 'total_b': 4,
            'standard_rows': 3, 'compact_rows': 4, 'standard_vars': 1, 'compact_vars': 4,
        }
        frame = report.to_frame()
        assert frame.loc['linearization rows', 'compact'] == 4

    def test_dense_cross_products(self):
        q = 3
        a1, a2 = list(range(1, q + 1)), list(range(q + 1, 2 * q + 1))
        inst = make_instance(2 * q, {1: a1, 2: a2}, [(i, j) for i in a1 for j in a2])
        report = size_report(inst, construct_sets(inst))

        assert report.standard_rows == 27
        assert report.compact_rows == 6
        assert report.compact_rows < report.standard_rows

    def test_no_products(self):
        inst = make_instance(4, {1: [1, 2], 2: [3, 4]})
        report = size_report(inst, construct_sets(inst))

        assert report.to_dict() == {
            'n': 4, 'num_sets': 2, 'num_products': 0, 'num_f': 0, 'total_b': 0,
            'standard_rows': 0, 'compact_rows': 0, 'standard_vars': 0, 'compact_vars': 0,
        }

    def test_compare_sizes(self, ex1):
        table = compare_sizes(ex1, {'compact': construct_sets(ex1), 'original recipe': liberti_plan(ex1)})

        assert list(table.columns) == ['standard', 'compact', 'original recipe']
        assert table.loc['linearization rows', 'standard'] == 3
        assert table.loc['linearization rows', 'original recipe'] == 5
        assert table.loc['linearization variables', 'original recipe'] == 8
        assert bool(table.loc['consistent', 'compact']) is True
        assert bool(table.loc['consistent', 'original recipe']) is False


@pytest.mark.unit
class TestWriteLp:

    def test_compact_line(self, ex1):
        text = write_lp(emit_compact(ex1, construct_sets(ex1)))

        assert " lin_1_3: y1_3 + y2_3 - x3 = 0" in text.splitlines()
        assert " assign_1: x1 + x2 = 1" in text.splitlines()

    def test_standard_line(self, ex1):
        text = write_lp(emit_standard(ex1))

        assert " std_1_3_a: y1_3 - x1 <= 0" in text.splitlines()
        assert " std_1_3_c: y1_3 - x1 - x3 >= -1" in text.splitlines()

    def test_empty_objective_placeholder(self, ex1):
        assert "Minimize\n obj: 0 x1\n" in write_lp(emit_standard(ex1))

    def test_section_order(self, ex1):
        lines = write_lp(emit_compact(ex1, construct_sets(ex1))).splitlines()
        positions = [lines.index(s) for s in ("Minimize", "Subject To", "Bounds", "Binary", "End")]

        assert positions == sorted(positions)
        assert lines[-1] == "End"
        assert " 0 <= y1_3 <= 1" in lines
        assert " x4" in lines

    def test_byte_stable(self, ex1_full):
        first = write_lp(emit_compact(ex1_full, construct_sets(ex1_full)))
        second = write_lp(emit_compact(ex1_full, construct_sets(ex1_full)))

        assert first == second

    def test_milp_model(self, ex1):
        text = write_lp(build_min_milp(ex1))

        assert " fix_1_3: f1_3 = 1" in text
        assert " link_2_3_1: f1_3 - z1_2 >= 0" in text
        assert " 0 <= f1_1 <= 1" in text
        assert "Binary\n z1_1\n" in text

    def test_long_rows_wrap(self):
        n = 60
        inst = make_instance(n, {1: list(range(1, n + 1))})
        text = write_lp(emit_standard(inst))
        row_lines = [line for line in text.splitlines() if line.startswith(" assign_1") or line.startswith("   +")]

        assert len(row_lines) > 1
        assert all(len(line) <= 260 for line in row_lines)

    @pytest.mark.parametrize("value, expected", [(1.0, "1"), (0.0, "0"), (-1.5, "-1.5"), (2.25, "2.25")])
    def test_format_number(self, value, expected):
        assert format_number(value) == expected
