"""Sweeps over AP count, seed and selection method, written as CSV rows."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .baselines import NoSensingLink, greedy_user_selection, no_selection
from .evaluate import NORM_TOL, evaluate_decision
from .milp import DEFAULT_NODE_LIMIT
from .optimizer import (IscptInfeasible, IscptThresholds, NodeLimitReached,
                        solve_iscpt)
from .scenario import InvalidSpec, ScenarioConfig, build_scenario
from .topology import build_topology

CSV_COLUMNS = ("M", "seed", "method", "sum_rate_bps_hz", "sensing_sinr_db",
               "harvested_power_dbm", "active_users", "active_aps", "solve_status",
               "solve_nodes", "wall_ms")
METHODS = ("ta", "greedy", "none")


@dataclass
class SweepSpec:
    ap_counts: list
    seeds: list
    methods: tuple = METHODS
    output_path: Optional[str] = None
    node_limit: int = DEFAULT_NODE_LIMIT
    power_mode: str = "average"
    thresholds: IscptThresholds = field(default_factory=IscptThresholds)
    corr_threshold: float = 0.5
    sensing_corr_threshold: Optional[float] = 0.0
    # wall-clock time makes rows non-reproducible, so it is opt-in
    record_timing: bool = False
    jobs: int = 1

    def validate(self, config: ScenarioConfig) -> None:
        if not self.ap_counts:
            raise InvalidSpec("ap_counts must be non-empty")
        if not self.seeds:
            raise InvalidSpec("seeds must be non-empty")
        shell = config.ap_shell.total
        for m in self.ap_counts:
            if not 1 <= m <= shell:
                raise InvalidSpec(f"M={m} outside 1..{shell}")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise InvalidSpec(f"unknown methods {sorted(bad)}")


@dataclass
class CellResult:
    row: dict
    norm_error: float


def _decide(method: str, graph, spec: SweepSpec):
    if method == "ta":
        return solve_iscpt(graph, spec.thresholds, node_limit=spec.node_limit)
    if method == "greedy":
        return greedy_user_selection(graph, spec.corr_threshold,
                                     spec.sensing_corr_threshold)
    return no_selection(graph)


def run_cell(m: int, seed: int, method: str, spec: SweepSpec,
             config: ScenarioConfig) -> CellResult:
    """One (M, seed, method) row, independent of every other cell."""
    t0 = time.perf_counter()
    scenario = build_scenario(replace(config, seed=seed, num_aps=m))
    graph = build_topology(scenario)
    row = {"M": str(m), "seed": str(seed), "method": method}
    nan = {"sum_rate_bps_hz": "nan", "sensing_sinr_db": "nan",
           "harvested_power_dbm": "nan", "active_users": "0", "active_aps": "0"}
    err = 0.0
    try:
        decision = _decide(method, graph, spec)
    # an unreachable sensing target leaves every method without a sensing AP
    except (IscptInfeasible, NoSensingLink):
        row.update(nan, solve_status="Infeasible", solve_nodes="0")
    except NodeLimitReached:
        row.update(nan, solve_status="NodeLimit", solve_nodes=str(spec.node_limit))
    else:
        plan, report = evaluate_decision(scenario, decision, graph, spec.power_mode)
        err = plan.norm_error()
        row.update(report.csv_fields(), solve_status=decision.status,
                   solve_nodes=str(decision.nodes))
    wall = (time.perf_counter() - t0) * 1e3 if spec.record_timing else 0.0
    row["wall_ms"] = f"{wall:.0f}"
    return CellResult(row, err)


def _cells(spec: SweepSpec):
    return [(m, s, meth) for m in spec.ap_counts for s in spec.seeds for meth in spec.methods]


def run_sweep_rows(spec: SweepSpec, config: ScenarioConfig) -> list:
    """All cells in (M, seed, method) order."""
    spec.validate(config)
    cells = _cells(spec)
    if spec.jobs > 1:
        with ProcessPoolExecutor(spec.jobs) as pool:
            futs = [pool.submit(run_cell, m, s, meth, spec, config) for m, s, meth in cells]
            return [f.result() for f in futs]
    return [run_cell(m, s, meth, spec, config) for m, s, meth in cells]


def rows_to_csv(results: list) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(r.row)
    return buf.getvalue()


def run_sweep(spec: SweepSpec, config: ScenarioConfig) -> str:
    results = run_sweep_rows(spec, config)
    worst = max((r.norm_error for r in results), default=0.0)
    if worst > NORM_TOL:
        raise AssertionError(f"precoder normalization off by {worst:.3e}")
    text = rows_to_csv(results)
    if spec.output_path:
        with open(spec.output_path, "w") as fh:
            fh.write(text)
    return text


def read_csv(text: str) -> list:
    """Parse sweep CSV back into dicts with numeric fields converted."""
    out = []
    for r in csv.DictReader(io.StringIO(text)):
        for key in ("M", "seed", "active_users", "active_aps", "solve_nodes"):
            r[key] = int(r[key])
        for key in ("sum_rate_bps_hz", "sensing_sinr_db", "harvested_power_dbm", "wall_ms"):
            r[key] = float(r[key])
        out.append(r)
    return out


def batch_means(rows: list, metric: str) -> dict:
    """``{(M, method): mean}`` over seeds, ignoring NaN rows."""
    acc = {}
    for r in rows:
        acc.setdefault((r["M"], r["method"]), []).append(r[metric])
    return {key: float(np.nanmean(vals)) for key, vals in acc.items()}
