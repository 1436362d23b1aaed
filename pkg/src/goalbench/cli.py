"""Command-line interface; every report is emitted in canonical JSON.

Exit codes: 0 success, 1 validation ERRORs (the report is still printed),
2 usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Any, Mapping, Sequence

from . import layout as layout_mod
from . import reuse, uncertainty, valuation
from .model import (
    TASK_STATES,
    GoalbenchError,
    GoalGraph,
    canonical_json,
    canonical_serialize,
    load_model,
    validate,
)
from .propagation import (
    Scenario,
    benefit_delta,
    build_scenario,
    propagate,
    tolerance_slack,
    whatif_diff,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2


class _UsageError(Exception):
    pass


def _parse_assignment(raw: str) -> tuple[str, str | float]:
    if "=" not in raw:
        raise _UsageError(f"expected TASK=STATE or TASK=LEVEL, got {raw!r}")
    task_id, value = raw.split("=", 1)
    if not task_id:
        raise _UsageError(f"missing task id in {raw!r}")
    if value in TASK_STATES:
        return task_id, value
    try:
        return task_id, float(value)
    except ValueError:
        raise _UsageError(
            f"value {value!r} for '{task_id}' is neither a state ({'/'.join(TASK_STATES)}) "
            "nor a number"
        ) from None


def _assignments(pairs: Sequence[str] | None) -> dict[str, str | float]:
    out: dict[str, str | float] = {}
    for raw in pairs or []:
        task_id, value = _parse_assignment(raw)
        out[task_id] = value
    return out


def _weights(pairs: Sequence[str] | None) -> dict[str, float] | None:
    if not pairs:
        return None
    out: dict[str, float] = {}
    for raw in pairs:
        if "=" not in raw:
            raise _UsageError(f"expected GOAL=WEIGHT, got {raw!r}")
        goal_id, value = raw.split("=", 1)
        try:
            out[goal_id] = float(value)
        except ValueError:
            raise _UsageError(f"weight {value!r} for '{goal_id}' is not a number") from None
    return out


def _pick_profile(graph: GoalGraph, requested: str | None) -> str:
    if requested is not None:
        return requested
    profiles = graph.profile_ids()
    if len(profiles) == 1:
        return profiles[0]
    raise _UsageError(f"--profile required; model declares {list(profiles)}")


def _load(path: str) -> GoalGraph:
    try:
        return load_model(path)
    except OSError as exc:
        raise _UsageError(f"cannot read model '{path}': {exc.strerror or exc}") from None


def _write(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _require_valid(graph: GoalGraph, output: str | None) -> bool:
    report = validate(graph)
    if report.ok:
        return True
    _write(canonical_serialize(report), output)
    return False


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goalbench",
        description="Quantified goal-graph analysis: propagation, what-if, utility, "
        "uncertainty, duplicates and drawing.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, help_text: str, model_nargs: Any = None) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        if model_nargs is None:
            cmd.add_argument("model", help="model document (goalbench/1 JSON)")
        else:
            cmd.add_argument("model", nargs=model_nargs, help="model document(s)")
        cmd.add_argument("--output", "-o", help="write the report here instead of stdout")
        return cmd

    command("validate", "check every invariant and quality lint")

    cmd = command("propagate", "evaluate a scenario bottom-up")
    cmd.add_argument("--profile", help="usage profile id")
    cmd.add_argument("--set", dest="assignments", action="append", metavar="TASK=STATE|LEVEL")

    cmd = command("whatif", "diff two scenarios")
    cmd.add_argument("--profile", help="base profile id")
    cmd.add_argument("--set", dest="assignments", action="append", metavar="TASK=STATE|LEVEL")
    cmd.add_argument("--to-profile", help="changed profile id (defaults to the base profile)")
    cmd.add_argument(
        "--to-set", dest="to_assignments", action="append", metavar="TASK=STATE|LEVEL"
    )

    cmd = command("benefit", "As-Is versus To-Be ancestor deltas for one task")
    cmd.add_argument("--task", required=True)
    cmd.add_argument("--profile", help="usage profile id")

    cmd = command("tolerance", "slack of a task before downstream objectives fail")
    cmd.add_argument("--task", required=True)
    cmd.add_argument("--goal", required=True, help="objective-bearing goal id")
    cmd.add_argument("--profile", help="usage profile id")
    cmd.add_argument("--set", dest="assignments", action="append", metavar="TASK=STATE|LEVEL")

    cmd = command("utility", "stakeholder and crowd utility of a scenario")
    cmd.add_argument("--profile", help="usage profile id")
    cmd.add_argument("--set", dest="assignments", action="append", metavar="TASK=STATE|LEVEL")
    cmd.add_argument("--weight", dest="weights", action="append", metavar="GOAL=WEIGHT")

    cmd = command("montecarlo", "sampled propagation of estimate uncertainty")
    cmd.add_argument("--profile", help="usage profile id")
    cmd.add_argument("--set", dest="assignments", action="append", metavar="TASK=STATE|LEVEL")
    cmd.add_argument("--runs", type=int, default=1000)
    cmd.add_argument("--seed", type=int, default=0)

    cmd = command("dedupe", "similar/duplicate goals within and across models", model_nargs="+")
    cmd.add_argument("--threshold", type=float, default=reuse.DEFAULT_DUPLICATE_THRESHOLD)

    cmd = command("layout", "draw the goal graph")
    cmd.add_argument("--format", choices=("json", "dot", "svg"), default="json")
    cmd.add_argument("--node-gap", type=float, default=layout_mod.DEFAULT_NODE_GAP)
    cmd.add_argument("--layer-gap", type=float, default=layout_mod.DEFAULT_LAYER_GAP)

    cmd = command("serve", "run the HTTP analysis service")
    cmd.add_argument("--bind", help="HOST:PORT (default 127.0.0.1:8347; env GOALBENCH_BIND)")
    cmd.add_argument("--ui", help="directory of built what-if UI assets to serve at /")

    return parser


def _scenario_from_args(graph: GoalGraph, args: argparse.Namespace) -> Scenario:
    profile = _pick_profile(graph, args.profile)
    return build_scenario(graph, profile, _assignments(args.assignments))


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "dedupe":
        graphs = [_load(path) for path in args.model]
        scores = reuse.find_duplicates(graphs, args.threshold)
        report = {"threshold": args.threshold, "pairs": [s.to_dict() for s in scores]}
        _write(canonical_json(report), args.output)
        return EXIT_OK

    graph = _load(args.model)

    if args.command == "validate":
        report = validate(graph)
        _write(canonical_serialize(report), args.output)
        return EXIT_OK if report.ok else EXIT_VALIDATION

    if not _require_valid(graph, args.output):
        return EXIT_VALIDATION

    if args.command == "propagate":
        result = propagate(graph, _scenario_from_args(graph, args))
        _write(canonical_serialize(result), args.output)
    elif args.command == "whatif":
        base = _scenario_from_args(graph, args)
        changed_profile = args.to_profile or base.profile
        merged: dict[str, str | float] = {
            task_id: base.assignment_of(task_id)
            for task_id in list(base.task_states) + list(base.task_levels)
        }
        merged.update(_assignments(args.to_assignments))
        changed = build_scenario(graph, changed_profile, merged)
        _write(canonical_serialize(whatif_diff(graph, base, changed)), args.output)
    elif args.command == "benefit":
        profile = _pick_profile(graph, args.profile)
        _write(canonical_serialize(benefit_delta(graph, args.task, profile)), args.output)
    elif args.command == "tolerance":
        scenario = _scenario_from_args(graph, args)
        slack = tolerance_slack(graph, scenario, args.task, args.goal)
        _write(canonical_serialize(slack), args.output)
    elif args.command == "utility":
        scenario = _scenario_from_args(graph, args)
        result = valuation.scenario_utility(graph, scenario, _weights(args.weights))
        _write(canonical_serialize(result), args.output)
    elif args.command == "montecarlo":
        scenario = _scenario_from_args(graph, args)
        summary = uncertainty.monte_carlo(graph, scenario, args.runs, args.seed)
        _write(canonical_serialize(summary), args.output)
    elif args.command == "layout":
        if args.format == "dot":
            text = layout_mod.export_dot(graph)
        else:
            computed = layout_mod.layout_graph(graph, args.node_gap, args.layer_gap)
            text = (
                layout_mod.export_svg(computed)
                if args.format == "svg"
                else canonical_json(computed.to_dict())
            )
        _write(text, args.output)
    elif args.command == "serve":
        from .server import serve  # deferred: not needed for report commands

        serve(graph, bind=args.bind, ui_dir=args.ui, model_name=args.model)
    else:  # pragma: no cover - argparse restricts choices
        raise _UsageError(f"unknown command {args.command!r}")
    return EXIT_OK


def run_cli(argv: Sequence[str]) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return _dispatch(args)
    except _UsageError as exc:
        print(f"goalbench: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GoalbenchError as exc:
        print(f"goalbench: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None) -> int:
    return run_cli(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
