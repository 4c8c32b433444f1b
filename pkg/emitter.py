"""
Linearized model emission.

Two variants are produced from an instance:

- compact: one equation per (k, j in B_k), the assignment row of A_k
  multiplied by x_j with every product replaced by its y in F;
- standard: three inequalities per product (i,j) in E.

Both keep the assignment rows, the objective and the pass-through rows
(products replaced by y). write_lp renders either variant, or the
size-minimization MilpModel, in CPLEX LP format.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

import pandas as pd

from compact_linearizer import ConditionReport, LinearizationPlan, check_conditions
from instance_model import BqpInstance, Pair, normalize_pair
from minimization_milp import MilpModel

logger = logging.getLogger(__name__)

LP_LINE_LIMIT = 240


class InconsistentPlanError(ValueError):
    """Raised when asked to emit a plan that fails the linearization conditions."""

    def __init__(self, report: ConditionReport) -> None:
        if report.violations:
            (i, j), condition = report.violations[0]
            detail = f"pair ({i},{j}) fails Condition {condition}"
        elif report.missing_products:
            i, j = report.missing_products[0]
            detail = f"product ({i},{j}) is not in F"
        else:
            detail = "F is not the image of the sets A_k x B_k"
        super().__init__(f"plan is not a consistent linearization: {detail}")
        self.report = report


def x_name(i: int) -> str:
    return f"x{i}"


def y_name(i: int, j: int) -> str:
    return f"y{i}_{j}"


@dataclass(frozen=True)
class LinearRow:
    name: str
    origin: str  # 'assignment', 'compact', 'standard' or 'passthrough'
    terms: Tuple[Tuple[str, float], ...]
    sense: str
    rhs: float


@dataclass(frozen=True)
class LinearizedModel:
    variant: str
    n: int
    y_pairs: Tuple[Pair, ...]
    rows: Tuple[LinearRow, ...]
    objective: Tuple[Tuple[str, float], ...]
    unsafe: bool = False

    @property
    def x_vars(self) -> List[str]:
        return [x_name(i) for i in range(1, self.n + 1)]

    @property
    def y_vars(self) -> List[str]:
        return [y_name(i, j) for i, j in self.y_pairs]

    @property
    def linearization_rows(self) -> List[LinearRow]:
        return [row for row in self.rows if row.origin in ('compact', 'standard')]


@dataclass(frozen=True)
class SizeReport:
    n: int
    num_sets: int
    num_products: int
    num_f: int
    total_b: int
    standard_rows: int
    compact_rows: int
    standard_vars: int
    compact_vars: int

    def to_dict(self) -> Dict[str, int]:
        return asdict(self)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                'standard': [self.standard_vars, self.standard_rows, 'inequality'],
                'compact': [self.compact_vars, self.compact_rows, 'equation'],
            },
            index=['linearization variables', 'linearization rows', 'row type'],
        )


def _merge_terms(terms: Iterable[Tuple[str, float]]) -> Tuple[Tuple[str, float], ...]:
    merged: Dict[str, float] = {}
    for var, coeff in terms:
        merged[var] = merged.get(var, 0.0) + coeff
    return tuple((var, coeff) for var, coeff in merged.items() if coeff != 0)


def _assignment_rows(inst: BqpInstance) -> List[LinearRow]:
    return [
        LinearRow(f"assign_{k}", 'assignment',
                  tuple((x_name(i), 1.0) for i in sorted(inst.assignment_sets[k])), '=', 1.0)
        for k in inst.set_indices
    ]


def _passthrough(inst: BqpInstance) -> Tuple[List[LinearRow], Tuple[Tuple[str, float], ...]]:
    rows = []
    for position, row in enumerate(inst.extra_constraints, start=1):
        terms = [(x_name(i), c) for i, c in sorted(row.linear.items())]
        terms += [(y_name(i, j), c) for (i, j), c in sorted(row.quadratic.items())]
        rows.append(LinearRow(f"extra_{position}", 'passthrough', _merge_terms(terms),
                              row.sense, float(row.rhs)))
    objective = [(x_name(i), c) for i, c in sorted(inst.linear_objective.items())]
    objective += [(y_name(i, j), c) for (i, j), c in sorted(inst.quadratic_objective.items())]
    return rows, _merge_terms(objective)


def compact_equation(inst: BqpInstance, f_members, k: int, j: int) -> LinearRow:
    """The row of A_k multiplied by x_j, products taken from F."""
    pairs = sorted({normalize_pair(a, j) for a in inst.assignment_sets[k]} & f_members)
    terms = [(y_name(p, q), 1.0) for p, q in pairs] + [(x_name(j), -1.0)]
    return LinearRow(f"lin_{k}_{j}", 'compact', tuple(terms), '=', 0.0)


def emit_compact(inst: BqpInstance, plan: LinearizationPlan, unsafe: bool = False) -> LinearizedModel:
    """
    Emit the compact linearization of a plan.

    Raises:
        InconsistentPlanError: if the plan fails check_conditions and
            unsafe is not set
    """
    report = check_conditions(inst, plan)
    if not report.ok:
        if not unsafe:
            raise InconsistentPlanError(report)
        logger.warning("UNSAFE_EMIT: emitting a plan with %d condition violations",
                       len(report.violations))

    f_members = set(plan.f_set)
    rows = _assignment_rows(inst)
    for k in inst.set_indices:
        for j in sorted(plan.b(k)):
            rows.append(compact_equation(inst, f_members, k, j))
    extra_rows, objective = _passthrough(inst)
    rows += extra_rows

    y_pairs = sorted(f_members | set(inst.products))
    return LinearizedModel(variant='compact', n=inst.n, y_pairs=tuple(y_pairs),
                           rows=tuple(rows), objective=objective, unsafe=not report.ok)


def emit_standard(inst: BqpInstance) -> LinearizedModel:
    """Emit y <= x_i, y <= x_j, y >= x_i + x_j - 1 for every product."""
    rows = _assignment_rows(inst)
    for i, j in sorted(inst.products):
        y = y_name(i, j)
        rows.append(LinearRow(f"std_{i}_{j}_a", 'standard', ((y, 1.0), (x_name(i), -1.0)), '<=', 0.0))
        rows.append(LinearRow(f"std_{i}_{j}_b", 'standard', ((y, 1.0), (x_name(j), -1.0)), '<=', 0.0))
        rows.append(LinearRow(f"std_{i}_{j}_c", 'standard',
                              _merge_terms([(y, 1.0), (x_name(i), -1.0), (x_name(j), -1.0)]),
                              '>=', -1.0))
    extra_rows, objective = _passthrough(inst)
    rows += extra_rows
    return LinearizedModel(variant='standard', n=inst.n, y_pairs=tuple(sorted(inst.products)),
                           rows=tuple(rows), objective=objective)


def size_report(inst: BqpInstance, plan: LinearizationPlan) -> SizeReport:
    products = len(inst.products)
    return SizeReport(
        n=inst.n,
        num_sets=len(inst.assignment_sets),
        num_products=products,
        num_f=len(plan.f_set),
        total_b=plan.total_b,
        standard_rows=3 * products,
        compact_rows=plan.total_b,
        standard_vars=products,
        compact_vars=len(plan.f_set),
    )


def compare_sizes(inst: BqpInstance, plans: Dict[str, LinearizationPlan]) -> pd.DataFrame:
    """
    Side-by-side size table: the standard linearization first, then one
    column per compact plan, with a consistency flag.
    """
    columns = {
        'standard': {
            'linearization variables': len(inst.products),
            'linearization rows': 3 * len(inst.products),
            'consistent': True,
        }
    }
    for label, plan in plans.items():
        columns[label] = {
            'linearization variables': len(plan.f_set),
            'linearization rows': plan.total_b,
            'consistent': check_conditions(inst, plan).ok,
        }
    return pd.DataFrame(columns)


def format_number(value: float) -> str:
    """Shortest decimal form; integral values without a decimal point."""
    value = float(value)
    if value == 0:
        return "0"
    if value.is_integer():
        return str(int(value))
    return repr(value)


def _render_terms(terms: Iterable[Tuple[str, float]]) -> str:
    parts: List[str] = []
    for position, (var, coeff) in enumerate(terms):
        magnitude = abs(coeff)
        body = var if magnitude == 1 else f"{format_number(magnitude)} {var}"
        if position == 0:
            parts.append(f"-{body}" if coeff < 0 else body)
        else:
            parts.append(f"{'-' if coeff < 0 else '+'} {body}")

    lines: List[str] = []
    current = ""
    for part in parts:
        candidate = f"{current} {part}" if current else part
        if current and len(candidate) > LP_LINE_LIMIT:
            lines.append(current)
            current = part
        else:
            current = candidate
    lines.append(current)
    return "\n   ".join(lines)


def _lp_document(title: str, objective: Tuple[Tuple[str, float], ...], rows,
                 bounded: List[str], binary: List[str], placeholder: str,
                 comments: Iterable[str] = ()) -> str:
    out: List[str] = [f"\\ {title}"]
    out += [f"\\ {line}" for line in comments]
    out.append("Minimize")
    if objective:
        out.append(f" obj: {_render_terms(objective)}")
    else:
        out.append(f" obj: 0 {placeholder}")
    out.append("Subject To")
    for row in rows:
        out.append(f" {row.name}: {_render_terms(row.terms) if row.terms else '0 ' + placeholder}"
                   f" {row.sense} {format_number(row.rhs)}")
    out.append("Bounds")
    out += [f" 0 <= {var} <= 1" for var in bounded]
    if binary:
        out.append("Binary")
        out += [f" {var}" for var in binary]
    out.append("End")
    return "\n".join(out) + "\n"


def write_lp(model: Union[LinearizedModel, MilpModel]) -> str:
    """
    Render a model in CPLEX LP format.

    Output depends only on the model, so identical inputs give identical
    text.
    """
    if isinstance(model, MilpModel):
        objective = tuple((var, c) for var, c in model.objective_terms() if c != 0)
        z_vars = [f"z{i}_{k}" for i, k in model.z_vars]
        f_vars = [f"f{i}_{j}" for i, j in model.f_vars]
        placeholder = z_vars[0] if z_vars else "z1_1"
        return _lp_document("compactlin size-minimization model", objective, model.rows,
                            bounded=f_vars, binary=z_vars, placeholder=placeholder,
                            comments=[f"w_eqn = {format_number(model.w_eqn)}, "
                                      f"w_var = {format_number(model.w_var)}"])

    comments: List[str] = []
    if model.unsafe:
        comments.append("UNSAFE: the linearization plan violates Conditions 1-2; "
                        "y may take values inconsistent with x_i * x_j")
    return _lp_document(f"compactlin {model.variant} linearization", model.objective, model.rows,
                        bounded=model.y_vars, binary=model.x_vars,
                        placeholder=x_name(1), comments=comments)


def evaluate_rows(model: LinearizedModel, values: Dict[str, float],
                  tolerance: float = 1e-9) -> List[LinearRow]:
    """Rows of a linearized model violated by the given assignment."""
    violated = []
    for row in model.rows:
        lhs = sum(coeff * values.get(var, 0.0) for var, coeff in row.terms)
        if row.sense == '=':
            ok = abs(lhs - row.rhs) <= tolerance
        elif row.sense == '<=':
            ok = lhs <= row.rhs + tolerance
        else:
            ok = lhs >= row.rhs - tolerance
        if not ok:
            violated.append(row)
    return violated


def product_assignment(model: LinearizedModel, x: Tuple[int, ...],
                       y: Optional[Dict[Pair, int]] = None) -> Dict[str, float]:
    """Values for x and y; y defaults to the true products x_i * x_j."""
    values = {x_name(i): float(x[i - 1]) for i in range(1, model.n + 1)}
    for i, j in model.y_pairs:
        values[y_name(i, j)] = float(y[(i, j)] if y is not None else x[i - 1] * x[j - 1])
    return values
