"""Command-line surface: plan, compare, sweep, and a local serve endpoint.

Exit codes are part of the contract: 0 success, 1 invariant failure in
`compare`/`sweep`, 2 invalid input or configuration, 3 infeasible gesture or
missing target, 4 unreachable goal. An unreachable goal under the task's
best-effort policy still writes the strain trajectory before exiting 4, so
the attempt is always recorded.

The `--chain` flag accepts a path to a chain config; bare names are also
resolved against the directory named by the LAMPBOT_CONFIG_DIR environment
variable. File and serve output share one payload builder, so a request
answered over HTTP is byte-identical to the same request written to disk.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from .errors import (
    Infeasible,
    InvalidConfig,
    InvalidInput,
    LampbotError,
    TargetMissing,
    UnknownScenario,
    Unreachable,
)
from .kinematics import ChainSpec, default_chain, load_chain
from .planner import PLAN_MODES, PlannerConfig
from .primitives import PrimitiveInstance, validate_params
from .scenarios import TaskSpec, build_pair, list_scenarios, load_scenario
from .serialize import (
    METRICS_FORMAT,
    digest_doc,
    dumps_canonical,
    save_json,
    trajectory_to_dict,
    version_stamp,
)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INVALID_INPUT = 2
EXIT_INFEASIBLE = 3
EXIT_UNREACHABLE = 4

VARIANTS = ("F", "E")
PAIR_MODES = ("scripted", "searched")


def resolve_chain(path: str | None) -> ChainSpec:
    """Load the chain config, consulting LAMPBOT_CONFIG_DIR for bare names."""
    if path is None:
        return default_chain()
    candidate = Path(path)
    if not candidate.exists():
        config_dir = os.environ.get("LAMPBOT_CONFIG_DIR")
        if config_dir:
            fallback = Path(config_dir) / path
            if fallback.exists():
                candidate = fallback
    if not candidate.exists():
        raise InvalidInput(f"chain config not found: {path}")
    return load_chain(candidate)


def apply_overrides(task: TaskSpec, overrides) -> TaskSpec:
    """Return a task whose scripted steps carry the requested parameter edits.

    `overrides` is a list of {index, params} entries indexing into the
    scenario's scripted plan. Values are validated against the primitive's
    schema before anything is planned.
    """
    if not overrides:
        return task
    plan = list(task.scripted_plan)
    for entry in overrides:
        try:
            index = int(entry["index"])
            edits = dict(entry.get("params", {}))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed override entry: {entry!r}") from exc
        if not 0 <= index < len(plan):
            raise InvalidInput(f"override index {index} outside scripted plan")
        step = plan[index]
        params = dict(step.params)
        params.update(edits)
        validate_params(step.kind, params)
        plan[index] = PrimitiveInstance(kind=step.kind, params=params, anchor=step.anchor)
    task.scripted_plan = tuple(plan)
    task.validate()
    return task


def report_to_dict(report) -> dict:
    return {
        "F": report.F,
        "E": report.E,
        "gamma": report.gamma,
        "total": report.total,
        "per_category": {k: float(v) for k, v in report.per_category.items()},
        "scores": {k: float(v) for k, v in report.scores.items()},
    }


def plan_payload(
    chain: ChainSpec,
    task: TaskSpec,
    variant: str = "E",
    gamma: float = 1.0,
    seed: int = 0,
    mode: str = "scripted",
    search: str = "beam",
    overrides=None,
) -> tuple[dict, dict]:
    """Build one variant and return (trajectory doc, metrics doc).

    This is the single code path behind both `plan --out` and the serve
    endpoint; everything emitted is derived from these two documents.
    """
    if variant not in VARIANTS:
        raise InvalidInput(f"variant must be one of {VARIANTS}")
    if search not in PLAN_MODES:
        raise InvalidInput(f"search must be one of {PLAN_MODES}")
    task = apply_overrides(task, overrides)
    config = PlannerConfig(mode=search, seed=int(seed))
    started = time.perf_counter()
    pair = build_pair(chain, task, gamma=gamma, mode=mode, config=config)
    timing_ms = (time.perf_counter() - started) * 1000.0

    if variant == "F":
        traj, report = pair.functional, pair.functional_report
        plan_steps = []
    else:
        traj, report = pair.expressive, pair.expressive_report
        plan_steps = [
            {"kind": p.kind, "params": dict(p.params), "anchor": p.anchor}
            for p in pair.plan
        ]

    meta = {
        "scenario": task.id,
        "variant": variant,
        "gamma": float(gamma),
        "seed": int(seed),
        "mode": mode,
        "search": search,
    }
    trajectory_doc = trajectory_to_dict(traj, chain_id=chain.id, meta=meta)
    metrics_doc = version_stamp(METRICS_FORMAT)
    metrics_doc.update(meta)
    metrics_doc.update(
        {
            "plan": plan_steps,
            "report": report_to_dict(report),
            "goal_reached": task.reachable_goal(),
            "trajectory_digest": digest_doc(trajectory_doc),
            "duration": traj.duration,
            "timing_ms": timing_ms,
        }
    )
    return trajectory_doc, metrics_doc


def _metrics_path(out: Path) -> Path:
    return out.with_name(out.stem + ".metrics.json")


def cmd_plan(args) -> int:
    chain = resolve_chain(args.chain)
    task = load_scenario(args.scenario, chain)
    trajectory_doc, metrics_doc = plan_payload(
        chain,
        task,
        variant=args.variant,
        gamma=args.gamma,
        seed=args.seed,
        mode=args.mode,
        search=args.search,
    )
    out = Path(args.out or f"{task.id}_{args.variant}.json")
    save_json(out, trajectory_doc)
    save_json(_metrics_path(out), metrics_doc)
    print(f"wrote {out} and {_metrics_path(out)}")
    print(f"digest {metrics_doc['trajectory_digest']}")
    if not metrics_doc["goal_reached"]:
        print(
            f"goal out of reach: best-effort trajectory recorded for {task.id}",
            file=sys.stderr,
        )
        return EXIT_UNREACHABLE
    return EXIT_OK


def cmd_compare(args) -> int:
    chain = resolve_chain(args.chain)
    task = load_scenario(args.scenario, chain)
    config = PlannerConfig(mode=args.search, seed=args.seed)
    pair = build_pair(chain, task, gamma=args.gamma, mode=args.mode, config=config)

    docs = {}
    for variant, traj, report in (
        ("F", pair.functional, pair.functional_report),
        ("E", pair.expressive, pair.expressive_report),
    ):
        doc = trajectory_to_dict(
            traj,
            chain_id=chain.id,
            meta={
                "scenario": task.id,
                "variant": variant,
                "gamma": float(args.gamma),
                "seed": int(args.seed),
                "mode": args.mode,
                "search": args.search,
            },
        )
        docs[variant] = doc
        print(
            f"{task.id} {variant}: F={report.F:.6g} E={report.E:.6g} "
            f"total={report.total:.6g} duration={traj.duration:.2f}s "
            f"digest={digest_doc(doc)}"
        )

    f_term = pair.functional.samples[-1]
    e_term = pair.expressive.samples[-1]
    failures = []
    if not (np.array_equal(f_term.q, e_term.q) and f_term.tool == e_term.tool):
        failures.append("terminal states differ")
    if pair.expressive_report.F != pair.functional_report.F:
        failures.append("task reward differs between variants")
    if pair.expressive_report.E < pair.functional_report.E:
        failures.append("expressive variant scores below the baseline")
    for failure in failures:
        print(f"invariant failed: {failure}", file=sys.stderr)
    return EXIT_INVARIANT if failures else EXIT_OK


def cmd_sweep(args) -> int:
    chain = resolve_chain(args.chain)
    task = load_scenario(args.scenario, chain)
    try:
        gammas = [float(g) for g in args.gammas.split(",") if g.strip() != ""]
    except ValueError as exc:
        raise InvalidInput(f"bad gamma list: {args.gammas!r}") from exc
    if not gammas:
        raise InvalidInput("gamma list must not be empty")

    config = PlannerConfig(mode=args.search, seed=args.seed)
    from .planner import sweep_gamma

    rows = sweep_gamma(chain, task, task.expression, gammas, config)
    print(f"{'gamma':>8} {'F':>10} {'E':>12} {'total':>12}  plan")
    for gamma, scored in rows:
        label = " + ".join(p.label() for p in scored.plan) or "(baseline)"
        print(
            f"{gamma:8.3f} {scored.F:10.4f} {scored.E:12.4f} "
            f"{scored.total(gamma):12.4f}  {label}"
        )
    if args.search == "exhaustive":
        es = [scored.E for _, scored in rows]
        ordered = sorted(range(len(gammas)), key=lambda i: gammas[i])
        if any(
            es[ordered[i + 1]] < es[ordered[i]] - 1e-12 for i in range(len(ordered) - 1)
        ):
            print("invariant failed: expressive reward decreased with gamma", file=sys.stderr)
            return EXIT_INVARIANT
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import run_server

    run_server(
        host=args.host,
        port=args.port,
        chain=resolve_chain(args.chain),
        static_dir=args.static,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lampbot",
        description="Plan functional robot-lamp trajectories and their expressive variants.",
        epilog=(
            "exit codes: 0 ok, 1 invariant failure, 2 invalid input, "
            "3 infeasible gesture, 4 unreachable goal"
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_variant=False):
        p.add_argument("--scenario", required=True, help="built-in id or path to a scenario JSON")
        p.add_argument("--gamma", type=float, default=1.0, help="expressive reward weight")
        p.add_argument("--seed", type=int, default=0, help="recorded in outputs for reproducibility")
        p.add_argument("--chain", default=None, help="chain config path (see LAMPBOT_CONFIG_DIR)")
        p.add_argument("--mode", choices=PAIR_MODES, default="scripted")
        if with_variant:
            p.add_argument("--variant", choices=VARIANTS, default="E")

    plan_p = sub.add_parser("plan", help="write one variant's trajectory and metrics files")
    common(plan_p, with_variant=True)
    plan_p.add_argument("--search", choices=PLAN_MODES, default="beam")
    plan_p.add_argument("--out", default=None, help="trajectory output path")
    plan_p.set_defaults(handler=cmd_plan)

    cmp_p = sub.add_parser("compare", help="build both variants and check their invariants")
    common(cmp_p)
    cmp_p.add_argument("--search", choices=PLAN_MODES, default="beam")
    cmp_p.set_defaults(handler=cmd_compare)

    sweep_p = sub.add_parser("sweep", help="table of planner results across gamma values")
    sweep_p.add_argument("--scenario", required=True)
    sweep_p.add_argument("--gammas", required=True, help="comma-separated gamma values")
    sweep_p.add_argument("--seed", type=int, default=0)
    sweep_p.add_argument("--chain", default=None)
    sweep_p.add_argument("--search", choices=PLAN_MODES, default="exhaustive")
    sweep_p.set_defaults(handler=cmd_sweep)

    serve_p = sub.add_parser("serve", help="local planning endpoint for the studio")
    serve_p.add_argument("--port", type=int, default=8765)
    serve_p.add_argument(
        "--host",
        default="127.0.0.1",
        help="loopback by default; pass 0.0.0.0 to open it up",
    )
    serve_p.add_argument("--chain", default=None)
    serve_p.add_argument("--static", default=None, help="directory of studio files to serve")
    serve_p.set_defaults(handler=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (InvalidInput, InvalidConfig, UnknownScenario) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (Infeasible, TargetMissing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except Unreachable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNREACHABLE
    except LampbotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
