from __future__ import annotations

import json
from typing import Dict, List, Tuple

from instance_model import SENSES, BqpInstance, ExtraConstraint, Pair


class InstanceFormatError(ValueError):
    """Raised when an instance document cannot be turned into a BqpInstance."""

    def __init__(self, message: str, code: str = 'schema', line: int = 0, column: int = 0) -> None:
        location = f" (line {line}, column {column})" if line else ""
        super().__init__(f"{message}{location}")
        self.code = code
        self.line = line
        self.column = column


def _clean_coefficient(value, where: str) -> float:
    if isinstance(value, bool):
        raise InstanceFormatError(f"{where}: boolean is not a coefficient")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value.strip())
        except ValueError:
            pass
    raise InstanceFormatError(f"{where}: coefficient {value!r} is not a number")


def _clean_index(value, n: int, where: str) -> int:
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, float) and not value.is_integer():
            raise ValueError
        index = int(str(value).strip()) if isinstance(value, str) else int(value)
    except (TypeError, ValueError):
        raise InstanceFormatError(f"{where}: {value!r} is not an integer index")
    if not 1 <= index <= n:
        raise InstanceFormatError(f"{where}: index {index} out of range 1..{n}", code='index_range')
    return index


def _parse_pair_key(key: str, n: int, where: str) -> Pair:
    parts = str(key).split(',')
    if len(parts) != 2:
        raise InstanceFormatError(f"{where}: key {key!r} must look like 'i,j'")
    i = _clean_index(parts[0], n, where)
    j = _clean_index(parts[1], n, where)
    if i > j:
        raise InstanceFormatError(f"{where}: pair ({i},{j}) not normalized (i <= j required)",
                                  code='pair_not_normalized')
    return i, j


def _parse_linear(block, n: int, where: str) -> Dict[int, float]:
    if not isinstance(block, dict):
        raise InstanceFormatError(f"{where}: expected an object of index -> coefficient")
    return {_clean_index(k, n, where): _clean_coefficient(v, where) for k, v in block.items()}


def _parse_quadratic(block, n: int, products: set, where: str) -> Dict[Pair, float]:
    if not isinstance(block, dict):
        raise InstanceFormatError(f"{where}: expected an object of 'i,j' -> coefficient")
    quadratic: Dict[Pair, float] = {}
    for key, value in block.items():
        pair = _parse_pair_key(key, n, where)
        if pair not in products:
            raise InstanceFormatError(f"{where}: term {pair} is not listed in products",
                                      code='unknown_product')
        quadratic[pair] = _clean_coefficient(value, where)
    return quadratic


def parse_instance(text: str) -> BqpInstance:
    """
    Parse an instance document (JSON) into a BqpInstance.

    Expected keys: n, assignment_sets, products; optional objective and
    constraints. Pairs must be normalized and unique.

    Raises:
        InstanceFormatError: on syntax errors, out-of-range indices,
            duplicate or non-normalized pairs and schema problems
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"syntax error: {exc.msg}", code='syntax',
                                  line=exc.lineno, column=exc.colno) from exc

    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    for key in ('n', 'assignment_sets'):
        if key not in doc:
            raise InstanceFormatError(f"missing required key {key!r}")

    n = doc['n']
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise InstanceFormatError(f"n must be a positive integer, got {n!r}")

    raw_sets = doc['assignment_sets']
    if not isinstance(raw_sets, dict) or not raw_sets:
        raise InstanceFormatError("assignment_sets must be a nonempty object")
    assignment_sets = {}
    for key, members in raw_sets.items():
        try:
            k = int(key)
        except (TypeError, ValueError):
            raise InstanceFormatError(f"assignment set key {key!r} is not an integer")
        if k in assignment_sets:
            raise InstanceFormatError(f"assignment set {k} given twice")
        if not isinstance(members, list):
            raise InstanceFormatError(f"assignment set {k} must be a list of indices")
        assignment_sets[k] = frozenset(_clean_index(i, n, f"assignment set {k}") for i in members)

    products: List[Pair] = []
    seen = set()
    raw_products = doc.get('products', [])
    if not isinstance(raw_products, list):
        raise InstanceFormatError("products must be a list of [i, j] pairs")
    for position, entry in enumerate(raw_products, start=1):
        where = f"products entry {position}"
        if not isinstance(entry, list) or len(entry) != 2:
            raise InstanceFormatError(f"{where}: expected [i, j]")
        i = _clean_index(entry[0], n, where)
        j = _clean_index(entry[1], n, where)
        if i > j:
            raise InstanceFormatError(f"{where}: pair ({i},{j}) not normalized (i <= j required)",
                                      code='pair_not_normalized')
        if (i, j) in seen:
            raise InstanceFormatError(f"{where}: duplicate pair ({i},{j})", code='duplicate_pair')
        seen.add((i, j))
        products.append((i, j))

    objective = doc.get('objective') or {}
    if not isinstance(objective, dict):
        raise InstanceFormatError("objective must be an object")
    linear_objective = _parse_linear(objective.get('linear', {}), n, "objective.linear")
    quadratic_objective = _parse_quadratic(objective.get('quadratic', {}), n, seen,
                                           "objective.quadratic")

    constraints: List[ExtraConstraint] = []
    raw_constraints = doc.get('constraints') or []
    if not isinstance(raw_constraints, list):
        raise InstanceFormatError("constraints must be a list")
    for position, row in enumerate(raw_constraints, start=1):
        where = f"constraint {position}"
        if not isinstance(row, dict):
            raise InstanceFormatError(f"{where}: expected an object")
        sense = row.get('sense', '>=')
        if sense not in SENSES:
            raise InstanceFormatError(f"{where}: sense must be one of {', '.join(SENSES)}")
        constraints.append(ExtraConstraint(
            linear=_parse_linear(row.get('linear', {}), n, f"{where}.linear"),
            quadratic=_parse_quadratic(row.get('quadratic', {}), n, seen, f"{where}.quadratic"),
            sense=sense,
            rhs=_clean_coefficient(row.get('rhs', 0), f"{where}.rhs"),
        ))

    return BqpInstance(
        n=n,
        assignment_sets=dict(sorted(assignment_sets.items())),
        products=tuple(products),
        linear_objective=linear_objective,
        quadratic_objective=quadratic_objective,
        extra_constraints=tuple(constraints),
    )


def _number(value: float):
    return int(value) if float(value).is_integer() else value


def instance_to_document(inst: BqpInstance) -> Dict:
    """Canonical JSON-ready form: sets and keys in ascending order."""
    def linear(block: Dict[int, float]) -> Dict[str, object]:
        return {str(i): _number(c) for i, c in sorted(block.items())}

    def quadratic(block: Dict[Pair, float]) -> Dict[str, object]:
        return {f"{i},{j}": _number(c) for (i, j), c in sorted(block.items())}

    doc: Dict = {
        'n': inst.n,
        'assignment_sets': {str(k): sorted(inst.assignment_sets[k]) for k in inst.set_indices},
        'products': [[i, j] for i, j in inst.products],
    }
    if inst.linear_objective or inst.quadratic_objective:
        doc['objective'] = {'linear': linear(inst.linear_objective),
                            'quadratic': quadratic(inst.quadratic_objective)}
    if inst.extra_constraints:
        doc['constraints'] = [
            {'linear': linear(row.linear), 'quadratic': quadratic(row.quadratic),
             'sense': row.sense, 'rhs': _number(row.rhs)}
            for row in inst.extra_constraints
        ]
    return doc


def serialize_instance(inst: BqpInstance) -> str:
    return json.dumps(instance_to_document(inst), indent=2) + "\n"


def load_instance(path: str) -> Tuple[BqpInstance, Dict]:
    """
    Read and parse an instance file.

    Returns:
        instance: the parsed BqpInstance
        stats: {success, path, variables, sets, products}
    """
    with open(path, 'r', encoding='utf-8') as handle:
        inst = parse_instance(handle.read())
    stats = {
        'success': True,
        'path': path,
        'variables': inst.n,
        'sets': len(inst.assignment_sets),
        'products': len(inst.products),
    }
    return inst, stats
