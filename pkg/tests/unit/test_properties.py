"""
Property tests over generated instances and matrices.
"""

import os
import sys

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given, settings

sys.path.append(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))))

from compact_linearizer import check_conditions, construct_sets, phi_image
from emitter import emit_compact, emit_standard
from generators import random_disjoint_instance, random_overlapping_instance
from instance_model import make_instance, normalize_pair
from minimization_milp import integer_determinant

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def small_integer_matrices():
    def build(order):
        entries = st.integers(min_value=-3, max_value=3)
        return st.lists(st.lists(entries, min_size=order, max_size=order),
                        min_size=order, max_size=order)
    return st.integers(min_value=1, max_value=5).flatmap(build)


@pytest.mark.unit
@given(st.integers(min_value=1, max_value=50), st.integers(min_value=1, max_value=50))
def test_normalize_pair_orders_and_is_symmetric(i, j):
    p, q = normalize_pair(i, j)

    assert p <= q
    assert {p, q} == {i, j}
    assert normalize_pair(j, i) == (p, q)


@pytest.mark.unit
@given(small_integer_matrices())
@settings(max_examples=100)
def test_integer_determinant_matches_floating_point(rows):
    matrix = np.array(rows, dtype=np.int64)
    assert integer_determinant(matrix) == int(round(np.linalg.det(matrix)))


@pytest.mark.unit
@given(seeds)
@settings(max_examples=40, deadline=None)
def test_disjoint_closure_is_order_free_and_valid(seed):
    inst = random_disjoint_instance(seed)
    plan = construct_sets(inst)

    assert check_conditions(inst, plan).ok
    assert set(inst.products) <= set(plan.f_set)
    assert set(plan.f_set) == phi_image(inst, plan.b_sets)
    assert construct_sets(inst, shuffle_seed=seed).same_sets(plan)


@pytest.mark.unit
@given(seeds)
@settings(max_examples=40, deadline=None)
def test_overlapping_closure_is_valid(seed):
    inst = random_overlapping_instance(seed)
    assert check_conditions(inst, construct_sets(inst)).ok


@pytest.mark.unit
@given(seeds)
@settings(max_examples=40, deadline=None)
def test_row_counts_follow_the_plan(seed):
    inst = random_disjoint_instance(seed)
    plan = construct_sets(inst)

    assert len(emit_compact(inst, plan).linearization_rows) == plan.total_b
    assert len(emit_standard(inst).linearization_rows) == 3 * len(inst.products)


@pytest.mark.unit
@given(seeds, st.data())
@settings(max_examples=40, deadline=None)
def test_disjoint_closure_is_monotone_in_products(seed, data):
    inst = random_disjoint_instance(seed)
    kept = data.draw(st.lists(st.sampled_from(inst.products), unique=True)) if inst.products else []
    smaller = make_instance(inst.n, inst.assignment_sets, [pair for pair in inst.products if pair in kept])

    plan = construct_sets(inst)
    reduced = construct_sets(smaller)

    assert set(reduced.f_set) <= set(plan.f_set)
    for k in inst.set_indices:
        assert reduced.b(k) <= plan.b(k)
