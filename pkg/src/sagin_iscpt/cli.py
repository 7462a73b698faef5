"""Command-line driver: ``sagin-iscpt <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .baselines import NoSensingLink, greedy_user_selection, no_selection
from .evaluate import DimensionMismatch, evaluate_decision
from .milp import (DEFAULT_NODE_LIMIT, Status, export_mps, import_mps, solve_bnb)
from .optimizer import (IscptDecision, IscptInfeasible, IscptThresholds, MalformedGraph,
                        NodeLimitReached, build_p2, solve_iscpt)
from .scenario import (ConfigError, InvalidSpec, NetworkScenario, build_scenario,
                       load_config)
from .sweep import METHODS, SweepSpec, run_sweep
from .topology import TopologyGraph, build_topology

EXIT_OK = 0
EXIT_INFEASIBLE = 2
EXIT_NODE_LIMIT = 3


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _thresholds(args) -> IscptThresholds:
    return IscptThresholds(tau_hat_c=args.tau_c, tau_hat_p=args.tau_p, tau_hat_s=args.tau_s)


def _read_graph(path: str) -> TopologyGraph:
    return TopologyGraph.from_text(Path(path).read_text())


def cmd_gen_scenario(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.num_aps is not None:
        config = replace(config, num_aps=args.num_aps)
    _emit(build_scenario(config).dumps(), args.out)
    return EXIT_OK


def cmd_topo(args) -> int:
    scenario = NetworkScenario.loads(Path(args.scenario).read_text())
    _emit(build_topology(scenario, segment_check=args.segment_check).to_text(), args.out)
    return EXIT_OK


def cmd_solve(args) -> int:
    if args.input.endswith(".mps"):
        model = import_mps(Path(args.input).read_text())
        sol = solve_bnb(model, node_limit=args.node_limit)
        payload = {"status": sol.status.value, "objective": sol.objective_value,
                   "nodes": sol.nodes}
        if sol.values is not None:
            payload["values"] = {v.name: float(x) for v, x in zip(model.variables, sol.values)}
        _emit(json.dumps(payload, indent=1) + "\n", args.out)
        if sol.status is Status.INFEASIBLE:
            return EXIT_INFEASIBLE
        return EXIT_NODE_LIMIT if sol.status is Status.NODE_LIMIT else EXIT_OK
    graph = _read_graph(args.input)
    try:
        decision = solve_iscpt(graph, _thresholds(args), node_limit=args.node_limit)
    except IscptInfeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NodeLimitReached as exc:
        print(f"node limit: {exc}", file=sys.stderr)
        return EXIT_NODE_LIMIT
    _emit(decision.dumps(), args.out)
    return EXIT_NODE_LIMIT if decision.status == Status.NODE_LIMIT.value else EXIT_OK


def cmd_baseline(args) -> int:
    graph = _read_graph(args.graph)
    if args.method == "greedy":
        screen = None if args.no_sensing_screen else args.sensing_corr_threshold
        decision = greedy_user_selection(graph, args.corr_threshold, screen)
    else:
        decision = no_selection(graph)
    _emit(decision.dumps(), args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    scenario = NetworkScenario.loads(Path(args.scenario).read_text())
    decision = IscptDecision.loads(Path(args.decision).read_text())
    graph = build_topology(scenario)
    try:
        plan, report = evaluate_decision(scenario, decision, graph, args.mode, args.sqrt_rho)
    except DimensionMismatch as exc:
        print(f"DimensionMismatch: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    payload = {
        "sum_rate_bps_hz": report.sum_rate_bps_hz,
        "sum_rate_bps": report.sum_rate_bps,
        "per_user_sinr": report.per_user_sinr.tolist(),
        "sensing_sinr": report.sensing_sinr,
        "sensing_sinr_db": report.sensing_sinr_db,
        "harvested_power_w": report.harvested_power_w,
        "harvested_power_dbm": report.harvested_power_dbm,
        "active_users": report.active_users,
        "active_aps": report.active_aps,
        "precoder_norm_error": plan.norm_error(),
    }
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    seeds = args.seeds if args.seeds else list(range(args.seed or 0, (args.seed or 0) + args.num_seeds))
    spec = SweepSpec(ap_counts=args.ap_counts, seeds=seeds, methods=tuple(args.methods),
                     output_path=args.out, node_limit=args.node_limit,
                     power_mode=args.mode, thresholds=_thresholds(args),
                     record_timing=args.timing, jobs=args.jobs)
    text = run_sweep(spec, config)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_export_mps(args) -> int:
    graph = _read_graph(args.graph)
    _emit(export_mps(build_p2(graph, _thresholds(args))), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="scenario seed")
    common.add_argument("--config", default=None, help="scenario config (JSON)")
    common.add_argument("--out", default=None, help="output file (default: stdout)")

    tau = argparse.ArgumentParser(add_help=False)
    tau.add_argument("--tau-c", type=float, default=0.5)
    tau.add_argument("--tau-p", type=float, default=0.5)
    tau.add_argument("--tau-s", type=float, default=0.5)
    tau.add_argument("--node-limit", type=int, default=DEFAULT_NODE_LIMIT)

    p = argparse.ArgumentParser(prog="sagin-iscpt", parents=[common],
                                description="Topology-aware ISCPT selection toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-scenario", parents=[common], help="config -> scenario file")
    s.add_argument("--num-aps", type=int, default=None)
    s.set_defaults(func=cmd_gen_scenario)

    s = sub.add_parser("topo", parents=[common], help="scenario -> graph dump")
    s.add_argument("scenario")
    s.add_argument("--segment-check", action="store_true")
    s.set_defaults(func=cmd_topo)

    s = sub.add_parser("solve", parents=[common, tau], help="graph (or .mps) -> decision")
    s.add_argument("input")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("baseline", parents=[common], help="graph -> baseline decision")
    s.add_argument("graph")
    s.add_argument("--method", choices=("greedy", "none"), default="none")
    s.add_argument("--corr-threshold", type=float, default=0.5)
    s.add_argument("--sensing-corr-threshold", type=float, default=0.0,
                   help="greedy: max correlation of an admitted user with the sensing target")
    s.add_argument("--no-sensing-screen", action="store_true",
                   help="greedy: ignore the sensing target when admitting users")
    s.set_defaults(func=cmd_baseline)

    s = sub.add_parser("eval", parents=[common], help="scenario + decision -> report")
    s.add_argument("scenario")
    s.add_argument("decision")
    s.add_argument("--mode", choices=("average", "proportional"), default="average")
    s.add_argument("--sqrt-rho", action="store_true")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("sweep", parents=[common, tau], help="sweep -> CSV")
    s.add_argument("--ap-counts", type=int, nargs="+", default=[16, 32, 64])
    s.add_argument("--seeds", type=int, nargs="+", default=None)
    s.add_argument("--num-seeds", type=int, default=20,
                   help="consecutive seeds starting at --seed when --seeds is absent")
    s.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    s.add_argument("--mode", choices=("average", "proportional"), default="average")
    s.add_argument("--timing", action="store_true", help="record wall_ms (non-reproducible)")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("export-mps", parents=[common, tau], help="graph -> MPS model")
    s.add_argument("graph")
    s.set_defaults(func=cmd_export_mps)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidSpec, MalformedGraph, NoSensingLink, ValueError,
            FileNotFoundError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
