"""
compactlin - compact linearization of binary quadratic programs with
assignment constraints.

Usage:
    python main.py linearize instance.json [-o outdir] [--json]
    python main.py minimize instance.json [--weights 1,1] [--budget N]
    python main.py verify instance.json [--liberti-mode] [--cap-x N] [--cap-y N]
    python main.py compare instance.json
    python main.py emit instance.json (--plan plan.json | --standard | --liberti-mode) [--unsafe-emit]
    python main.py generate (--qap M | --disjoint | --overlapping) [--seed S] [-o instance.json]

Exit codes: 0 success, 1 validation failure, 2 witness or excluded x found,
3 budget or cap exceeded, 4 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from compact_linearizer import (
    LinearizationPlan,
    PlanFormatError,
    check_conditions,
    construct_sets,
    parse_plan,
    plan_objective,
    plan_to_document,
    validate_plan,
)
from emitter import (
    InconsistentPlanError,
    compare_sizes,
    emit_compact,
    emit_standard,
    size_report,
    write_lp,
)
from file_guards import FileGuards
from generators import random_disjoint_instance, random_overlapping_instance, random_qap_instance
from ingestion.ingest_instance import InstanceFormatError, load_instance, serialize_instance
from instance_model import BqpInstance, preprocess_trivial, validate
from minimization_milp import build_min_milp, check_tu_structure, solve_exact
from settings import (
    DEFAULT_CAP_X,
    DEFAULT_CAP_Y,
    DEFAULT_LOG_LEVEL,
    DEFAULT_NODE_BUDGET,
    DEFAULT_SEED,
    DEFAULT_WEIGHTS,
)
from verifier import check_consistency, liberti_plan

logger = logging.getLogger('compactlin.cli')

COMMANDS = ('linearize', 'minimize', 'verify', 'compare', 'emit', 'generate')

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_WITNESS = 2
EXIT_BUDGET = 3
EXIT_IO = 4


@dataclass
class CliConfig:
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    w_eqn: float = DEFAULT_WEIGHTS[0]
    w_var: float = DEFAULT_WEIGHTS[1]
    simplify_trivial: bool = False
    unsafe_emit: bool = False
    liberti_mode: bool = False
    seed: int = DEFAULT_SEED
    cap_x: int = DEFAULT_CAP_X
    cap_y: int = DEFAULT_CAP_Y
    budget: int = DEFAULT_NODE_BUDGET
    json_output: bool = False
    plan_path: Optional[str] = None
    standard: bool = False
    qap: Optional[int] = None
    overlapping: bool = False
    log_level: str = DEFAULT_LOG_LEVEL


def parse_weights(text: str) -> Tuple[float, float]:
    try:
        parts = [float(p) for p in text.split(',')]
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must look like 'w_eqn,w_var', got {text!r}")
    if len(parts) != 2 or min(parts) < 0:
        raise argparse.ArgumentTypeError("weights must be two nonnegative numbers 'w_eqn,w_var'")
    return parts[0], parts[1]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="main.py",
                                     description="Compact linearization of assignment-constrained BQPs")
    parser.add_argument("command", choices=COMMANDS, help="Workflow to run")
    parser.add_argument("input", nargs="?", default=None, help="Instance file (JSON)")
    parser.add_argument("-o", "--output", default=None,
                        help="Output directory for artifacts (generate: instance file path)")
    parser.add_argument("--weights", type=parse_weights, default=DEFAULT_WEIGHTS,
                        help="Objective weights w_eqn,w_var (default 1,1)")
    parser.add_argument("--simplify-trivial", action="store_true",
                        help="Resolve diagonal and same-set products before linearizing")
    parser.add_argument("--unsafe-emit", action="store_true",
                        help="Allow emitting plans that violate the linearization conditions")
    parser.add_argument("--liberti-mode", action="store_true",
                        help="Use the original recipe (A_k within B_k) instead of the closure")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Random seed")
    parser.add_argument("--cap-x", type=int, default=DEFAULT_CAP_X,
                        help="Maximum number of feasible x checked by verify")
    parser.add_argument("--cap-y", type=int, default=DEFAULT_CAP_Y,
                        help="Maximum search nodes per x in verify")
    parser.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET,
                        help="Maximum search nodes for minimize")
    parser.add_argument("--json", action="store_true", help="Machine-readable output")
    parser.add_argument("--plan", default=None, help="Plan file for emit")
    parser.add_argument("--standard", action="store_true",
                        help="emit: write the standard linearization")
    kind = parser.add_mutually_exclusive_group()
    kind.add_argument("--qap", type=int, default=None, help="generate: QAP of this order")
    kind.add_argument("--disjoint", action="store_true",
                      help="generate: random disjoint instance (default)")
    kind.add_argument("--overlapping", action="store_true",
                      help="generate: random instance with overlapping sets")
    parser.add_argument("--log-level", default=DEFAULT_LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")
    return parser


def config_from_args(argv: Optional[Sequence[str]] = None) -> CliConfig:
    args = build_parser().parse_args(argv)
    return CliConfig(
        command=args.command,
        input_path=args.input,
        output_path=args.output,
        w_eqn=args.weights[0],
        w_var=args.weights[1],
        simplify_trivial=args.simplify_trivial,
        unsafe_emit=args.unsafe_emit,
        liberti_mode=args.liberti_mode,
        seed=args.seed,
        cap_x=args.cap_x,
        cap_y=args.cap_y,
        budget=args.budget,
        json_output=args.json,
        plan_path=args.plan,
        standard=args.standard,
        qap=args.qap,
        overlapping=args.overlapping,
        log_level=args.log_level,
    )


class _Output:
    """Collects artifacts and either writes them to a directory or prints them."""

    def __init__(self, config: CliConfig) -> None:
        self.config = config
        self.stem = FileGuards.sanitize_output_stem(config.input_path or "instance")
        self.document: Dict = {'command': config.command}
        self.lines: List[str] = []
        self.artifacts: Dict[str, str] = {}

    def text(self, line: str = "") -> None:
        self.lines.append(line)

    def artifact(self, suffix: str, content: str) -> None:
        self.artifacts[f"{self.stem}.{suffix}"] = content

    def flush(self) -> None:
        directory = self.config.output_path
        if directory:
            os.makedirs(directory, exist_ok=True)
            for name, content in sorted(self.artifacts.items()):
                with open(os.path.join(directory, name), 'w', encoding='utf-8') as handle:
                    handle.write(content)
            self.document['artifacts'] = sorted(self.artifacts)
            self.text(f"Wrote {len(self.artifacts)} artifact(s) to {directory}")
        if self.config.json_output:
            if not directory and self.artifacts:
                self.document['artifacts'] = dict(sorted(self.artifacts.items()))
            print(json.dumps(self.document, indent=2, sort_keys=True))
        else:
            print("\n".join(self.lines))
            if not directory:
                for name, content in sorted(self.artifacts.items()):
                    print(f"\n--- {name} ---")
                    print(content, end="")


def _read_instance(config: CliConfig) -> BqpInstance:
    ok, message = FileGuards.validate_input_path(config.input_path)
    if not ok:
        FileGuards.log_event('INPUT_REJECTED', message)
        raise OSError(message)
    inst, stats = load_instance(config.input_path)
    logger.info("loaded %s: n=%d, |K|=%d, |E|=%d", config.input_path,
                stats['variables'], stats['sets'], stats['products'])
    return inst


def _select_plan(config: CliConfig, inst: BqpInstance) -> Tuple[str, LinearizationPlan]:
    if config.plan_path:
        ok, message = FileGuards.validate_input_path(config.plan_path)
        if not ok:
            FileGuards.log_event('PLAN_REJECTED', message)
            raise OSError(message)
        with open(config.plan_path, 'r', encoding='utf-8') as handle:
            plan = parse_plan(handle.read())
        validate_plan(inst, plan)
        return 'provided', plan
    if config.liberti_mode:
        return 'original recipe', liberti_plan(inst)
    return 'closure', construct_sets(inst)


def _size_lines(out: _Output, inst: BqpInstance, plan: LinearizationPlan) -> Dict:
    report = size_report(inst, plan)
    out.text(f"n={report.n}  |K|={report.num_sets}  |E|={report.num_products}  "
             f"|F|={report.num_f}  sum|B_k|={report.total_b}")
    out.text(report.to_frame().to_string())
    return report.to_dict()


def _run_linearize(config: CliConfig, inst: BqpInstance, out: _Output) -> int:
    label, plan = _select_plan(config, inst)
    model = emit_compact(inst, plan, unsafe=config.unsafe_emit)
    out.text(f"Plan ({label}):")
    for k, members in sorted(plan.b_sets.items()):
        out.text(f"  B_{k} = {{{', '.join(str(i) for i in sorted(members))}}}")
    out.document['plan'] = plan_to_document(plan)
    out.document['size'] = _size_lines(out, inst, plan)
    out.document['objective'] = plan_objective(plan, config.w_eqn, config.w_var)
    out.artifact('plan.json', json.dumps(plan_to_document(plan), indent=2) + "\n")
    out.artifact('compact.lp', write_lp(model))
    out.artifact('size.json', json.dumps(out.document['size'], indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _run_minimize(config: CliConfig, inst: BqpInstance, out: _Output) -> int:
    model = build_min_milp(inst, config.w_eqn, config.w_var)
    out.artifact('milp.lp', write_lp(model))
    tu = check_tu_structure(model, seed=config.seed)
    solution = solve_exact(model, config.budget)

    out.text(f"MILP: {len(model.z_vars)} z, {len(model.f_vars)} f, {len(model.rows)} rows")
    out.text(f"TU structure: {'yes' if tu.structural_ok else 'no'} "
             f"(sampled determinants ok: {tu.sampled_determinants_ok}, {tu.samples_checked} samples)")
    status = "optimal" if solution.optimal else "budget exhausted, best found"
    out.text(f"Objective {solution.objective_value:g} ({status}, "
             f"{solution.nodes_or_candidates_explored} nodes)")
    for k, members in sorted(solution.plan.b_sets.items()):
        out.text(f"  B_{k} = {{{', '.join(str(i) for i in sorted(members))}}}")

    out.document['tu'] = {
        'structural_ok': tu.structural_ok,
        'rows_checked': tu.rows_checked,
        'sampled_determinants_ok': tu.sampled_determinants_ok,
        'samples_checked': tu.samples_checked,
        'offending_row': tu.offending_row,
        'counterexample': tu.counterexample,
    }
    out.document['solution'] = {
        'objective': solution.objective_value,
        'optimal': solution.optimal,
        'nodes': solution.nodes_or_candidates_explored,
        'plan': plan_to_document(solution.plan),
    }
    if solution.optimal:
        out.artifact('optimal_plan.json', json.dumps(plan_to_document(solution.plan), indent=2) + "\n")
        return EXIT_OK
    return EXIT_BUDGET


def _run_verify(config: CliConfig, inst: BqpInstance, out: _Output) -> int:
    label, plan = _select_plan(config, inst)
    conditions = check_conditions(inst, plan)
    report = check_consistency(inst, plan, config.cap_x, config.cap_y)

    out.text(f"Plan ({label}): conditions {'hold' if conditions.ok else 'violated'}")
    for (i, j), condition in conditions.violations:
        out.text(f"  pair ({i},{j}) fails Condition {condition}")
    out.text(f"Checked {report.x_assignments_checked} feasible x: "
             f"{'consistent' if report.consistent else 'INCONSISTENT'}"
             + (f" ({report.note})" if report.note else ""))
    if report.witness is not None:
        w = report.witness
        out.text(f"  witness x={list(w.x)} pair={w.violated_pair} bound '{w.violated_bound}'")
        out.text("  y: " + ", ".join(f"y{i}_{j}={v}" for (i, j), v in sorted(w.y.items())))
    if report.excluded_x is not None:
        out.text(f"  excluded x={list(report.excluded_x)}: no binary y solves the compact equations")

    out.document['conditions'] = {
        'ok': conditions.ok,
        'violations': [[list(pair), condition] for pair, condition in conditions.violations],
    }
    out.document['verification'] = report.to_dict()
    out.artifact('verify.json', json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")

    if report.witness is not None or report.excluded_x is not None:
        return EXIT_WITNESS
    if not report.exhaustive:
        return EXIT_BUDGET
    return EXIT_OK


def _run_compare(config: CliConfig, inst: BqpInstance, out: _Output) -> int:
    table = compare_sizes(inst, {'compact': construct_sets(inst),
                                 'original recipe': liberti_plan(inst)})
    out.text(table.to_string())
    out.document['comparison'] = json.loads(table.to_json())
    return EXIT_OK


def _run_emit(config: CliConfig, inst: BqpInstance, out: _Output) -> int:
    if config.standard:
        out.artifact('standard.lp', write_lp(emit_standard(inst)))
        out.text("Standard linearization emitted")
        return EXIT_OK
    if not config.plan_path and not config.liberti_mode:
        raise ValueError("emit needs --plan, --standard or --liberti-mode")
    label, plan = _select_plan(config, inst)
    model = emit_compact(inst, plan, unsafe=config.unsafe_emit)
    out.artifact('compact.lp', write_lp(model))
    out.text(f"Compact linearization emitted from the {label} plan"
             + (" (UNSAFE)" if model.unsafe else ""))
    return EXIT_OK


def _run_generate(config: CliConfig, out: _Output) -> int:
    if config.qap:
        inst = random_qap_instance(config.qap, config.seed)
    elif config.overlapping:
        inst = random_overlapping_instance(config.seed)
    else:
        inst = random_disjoint_instance(config.seed)
    content = serialize_instance(inst)
    if config.output_path:
        with open(config.output_path, 'w', encoding='utf-8') as handle:
            handle.write(content)
        print(f"Wrote instance with n={inst.n}, |K|={len(inst.assignment_sets)}, "
              f"|E|={len(inst.products)} to {config.output_path}")
    else:
        print(content, end="")
    return EXIT_OK


RUNNERS = {
    'linearize': _run_linearize,
    'minimize': _run_minimize,
    'verify': _run_verify,
    'compare': _run_compare,
    'emit': _run_emit,
}


def run(config: CliConfig) -> int:
    """Run one command and return its exit status."""
    if config.w_eqn < 0 or config.w_var < 0:
        print("Error: weights must be nonnegative", file=sys.stderr)
        return EXIT_INVALID

    if config.command == 'generate':
        try:
            return _run_generate(config, _Output(config))
        except OSError as exc:
            print(f"Error: {exc}", file=sys.stderr)
            return EXIT_IO

    out = _Output(config)
    try:
        inst = _read_instance(config)
    except (OSError, InstanceFormatError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_IO

    report = validate(inst)
    if not report.ok:
        for code, message in report.violations:
            print(f"Invalid instance [{code}]: {message}", file=sys.stderr)
        return EXIT_INVALID

    if config.simplify_trivial:
        inst, substitutions = preprocess_trivial(inst)
        out.document['substitutions'] = [str(s) for s in substitutions]
        for substitution in substitutions:
            out.text(f"Simplified {substitution}")

    try:
        status = RUNNERS[config.command](config, inst, out)
    except InconsistentPlanError as exc:
        print(f"Error: {exc} (use --unsafe-emit to write it anyway)", file=sys.stderr)
        return EXIT_INVALID
    except (OSError, PlanFormatError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    try:
        out.flush()
    except OSError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    config = config_from_args(argv)
    logging.basicConfig(level=getattr(logging, config.log_level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
