"""
Instance generators: seeded random instances with disjoint or overlapping
assignment sets, and quadratic assignment problems.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from instance_model import BqpInstance, Pair, make_instance, normalize_pair

Seed = Union[int, np.random.Generator, None]


def _rng(seed: Seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _partition(rng: np.random.Generator, n: int, num_sets: int, min_size: int) -> List[List[int]]:
    sizes = [min_size] * num_sets
    for _ in range(n - min_size * num_sets):
        sizes[int(rng.integers(num_sets))] += 1
    order = [int(v) + 1 for v in rng.permutation(n)]
    parts, start = [], 0
    for size in sizes:
        parts.append(sorted(order[start:start + size]))
        start += size
    return parts


def _random_products(rng: np.random.Generator, n: int, max_products: int) -> List[Pair]:
    universe = [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    count = int(rng.integers(0, min(max_products, len(universe)) + 1))
    picked = rng.choice(len(universe), size=count, replace=False) if count else []
    return [universe[int(p)] for p in picked]


def random_disjoint_instance(seed: Seed = None, max_n: int = 12, max_sets: int = 4,
                             min_set_size: int = 2, max_products: int = 10,
                             max_z: Optional[int] = None) -> BqpInstance:
    """
    Random instance whose assignment sets partition 1..n.

    Args:
        max_z: optional bound on n * |K| (the number of z variables of
            the size-minimization model)
    """
    rng = _rng(seed)
    feasible = []
    for num_sets in range(1, max_sets + 1):
        upper = max_n if max_z is None else min(max_n, max_z // num_sets)
        if num_sets * min_set_size <= upper:
            feasible.append((num_sets, upper))
    if not feasible:
        raise ValueError("no set count fits the requested bounds")
    num_sets, upper = feasible[int(rng.integers(len(feasible)))]
    n = int(rng.integers(num_sets * min_set_size, upper + 1))

    parts = _partition(rng, n, num_sets, min_set_size)
    sets = {k: members for k, members in enumerate(parts, start=1)}
    return make_instance(n, sets, _random_products(rng, n, max_products))


def random_overlapping_instance(seed: Seed = None, max_n: int = 10, max_base_sets: int = 3,
                                max_extra_sets: int = 2, max_products: int = 8) -> BqpInstance:
    """
    Random instance with overlapping assignment sets: a covering partition
    plus extra sets drawn across it.
    """
    rng = _rng(seed)
    num_sets = int(rng.integers(1, max_base_sets + 1))
    n = int(rng.integers(max(4, 2 * num_sets), max(max_n, 2 * num_sets) + 1))
    parts = _partition(rng, n, num_sets, 2)

    extra = int(rng.integers(1, max_extra_sets + 1))
    for _ in range(extra):
        size = int(rng.integers(2, min(4, n) + 1))
        parts.append(sorted(int(v) + 1 for v in rng.choice(n, size=size, replace=False)))

    sets = {k: members for k, members in enumerate(parts, start=1)}
    return make_instance(n, sets, _random_products(rng, n, max_products))


def qap_instance(flows: Sequence[Sequence[float]],
                 distances: Sequence[Sequence[float]]) -> BqpInstance:
    """
    Quadratic assignment problem as an assignment-constrained BQP.

    Variable (f, l), facility f at location l, has index f*m + l + 1.
    Sets 1..m are the facilities, sets m+1..2m the locations; products are
    the pairs with nonzero flow * distance cost.
    """
    flows = np.asarray(flows, dtype=float)
    distances = np.asarray(distances, dtype=float)
    if flows.shape != distances.shape or flows.ndim != 2 or flows.shape[0] != flows.shape[1]:
        raise ValueError("flows and distances must be square matrices of the same shape")
    m = flows.shape[0]

    def index(facility: int, location: int) -> int:
        return facility * m + location + 1

    sets: Dict[int, List[int]] = {}
    for f in range(m):
        sets[f + 1] = [index(f, l) for l in range(m)]
    for l in range(m):
        sets[m + l + 1] = [index(f, l) for f in range(m)]

    costs: Dict[Pair, float] = {}
    for f in range(m):
        for g in range(f + 1, m):
            for l in range(m):
                for h in range(m):
                    if l == h:
                        continue
                    cost = flows[f][g] * distances[l][h] + flows[g][f] * distances[h][l]
                    if cost:
                        pair = normalize_pair(index(f, l), index(g, h))
                        costs[pair] = costs.get(pair, 0.0) + float(cost)

    products = sorted(costs)
    return make_instance(m * m, sets, products, quadratic_objective=costs)


def random_qap_instance(m: int, seed: Seed = None, max_value: int = 9) -> BqpInstance:
    """QAP of order m with random integer flows and distances (zero diagonal)."""
    rng = _rng(seed)
    flows = rng.integers(0, max_value + 1, size=(m, m))
    distances = rng.integers(1, max_value + 1, size=(m, m))
    np.fill_diagonal(flows, 0)
    np.fill_diagonal(distances, 0)
    return qap_instance(flows, distances)
