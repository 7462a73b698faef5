"""Acceptance criteria, one test each, with a PASS/FAIL line per criterion."""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from gen import random_graph, random_model, random_thresholds
from oracles import enumerate_p2, straight_line_metrics
from sagin_iscpt.channel import noise_power_linear
from sagin_iscpt.evaluate import evaluate_decision
from sagin_iscpt.geo import (GeodeticPosition, ecef_to_enu, elevation_angle,
                             lla_to_ecef)
from sagin_iscpt.matching import max_matching_size
from sagin_iscpt.milp import Status, export_mps, import_mps, solve_bnb
from sagin_iscpt.optimizer import (IscptDecision, IscptThresholds, build_p2,
                                   solve_iscpt)
from sagin_iscpt.scenario import NetworkScenario, ScenarioConfig
from sagin_iscpt.sweep import SweepSpec, batch_means, read_csv, rows_to_csv, run_sweep_rows
from sagin_iscpt.topology import build_topology

MICRO = sorted((Path(__file__).parent.parent / "data" / "micro").glob("*.json"))
SWEEP_M = (16, 32, 64)
SWEEP_SEEDS = tuple(range(20))


def _report(num, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_c1_geometry_identities():
    t0 = time.perf_counter()
    p = lla_to_ecef(GeodeticPosition(0, 0, 0))
    err_origin = math.dist((p.x_m, p.y_m, p.z_m), (6378137.0, 0.0, 0.0))
    user = GeodeticPosition(52.52, 13.4, 0)
    zen = elevation_angle(lla_to_ecef(GeodeticPosition(52.52, 13.4, 700e3)), user)
    err_zen = abs(zen - math.pi / 2)
    rng = np.random.default_rng(1)
    err_enu = 0.0
    for _ in range(200):
        q = GeodeticPosition(rng.uniform(-90, 90), rng.uniform(-180, 180), rng.uniform(-500, 2e6))
        e = ecef_to_enu(lla_to_ecef(q), q)
        err_enu = max(err_enu, math.hypot(e.east_m, e.north_m, e.up_m))
    dt = time.perf_counter() - t0
    ok = err_origin <= 1e-6 and err_zen <= 1e-9 and err_enu <= 1e-6 and dt < 1.0
    _report(1, ok, f"origin err {err_origin:.1e} m, zenith err {err_zen:.1e} rad, "
                   f"ENU round trip {err_enu:.1e} m, {dt:.3f} s")


def test_c2_milp_matches_brute_force():
    rng = np.random.default_rng(20240)
    t0 = time.perf_counter()
    hits, feasible = 0, 0
    for _ in range(200):
        g = random_graph(rng, max_m=6, max_kc=4, max_kp=2)
        th = random_thresholds(rng, g)
        expect = enumerate_p2(g, th)
        sol = solve_bnb(build_p2(g, th))
        if expect is None:
            hits += sol.status is Status.INFEASIBLE
        else:
            feasible += 1
            hits += sol.status is Status.OPTIMAL and abs(sol.objective_value - expect) <= 1e-6
    dt = time.perf_counter() - t0
    _report(2, hits == 200 and dt < 60.0,
            f"{hits}/200 match brute force ({feasible} feasible), {dt:.1f} s")


def test_c3_zero_thresholds_equal_hopcroft_karp():
    rng = np.random.default_rng(303)
    zero = IscptThresholds(0.0, 0.0, 0.0)
    t0 = time.perf_counter()
    hits = 0
    for _ in range(100):
        g = random_graph(rng, max_m=40, max_kc=20, max_kp=2,
                         density=float(rng.uniform(0.03, 0.3)))
        hits += solve_iscpt(g, zero).matching_value == \
            max_matching_size(g.adjacency[:, :g.num_comm])
    dt = time.perf_counter() - t0
    _report(3, hits == 100 and dt < 30.0, f"{hits}/100 equal Hopcroft-Karp, {dt:.1f} s")


@pytest.fixture(scope="module")
def sweep():
    spec = SweepSpec(list(SWEEP_M), list(SWEEP_SEEDS), node_limit=10**6)
    t0 = time.perf_counter()
    results = run_sweep_rows(spec, ScenarioConfig())
    return results, read_csv(rows_to_csv(results)), time.perf_counter() - t0


def _linear_means(rows, metric):
    """Batch means of a dB-valued column, averaged in linear scale."""
    lin = [dict(r, **{metric: 10 ** (r[metric] / 10)}) for r in rows]
    return {k: 10 * math.log10(v) if v > 0 else -math.inf
            for k, v in batch_means(lin, metric).items()}


def test_c4_sum_rate_trend(sweep):
    _, rows, dt = sweep
    rate = batch_means(rows, "sum_rate_bps_hz")
    good = [rate[m, "ta"] >= rate[m, "greedy"] and rate[m, "ta"] >= rate[m, "none"]
            for m in SWEEP_M]
    detail = ", ".join(f"M={m}: ta {rate[m, 'ta']:.2f} greedy {rate[m, 'greedy']:.2f} "
                       f"none {rate[m, 'none']:.2f}" for m in SWEEP_M)
    frac = sum(good) / len(good)
    _report(4, frac >= 0.8 and dt < 900.0,
            f"ordering holds in {sum(good)}/{len(good)} batches ({detail}), sweep {dt:.0f} s")


def test_c5_harvested_power_gap(sweep):
    _, rows, _ = sweep
    power = _linear_means(rows, "harvested_power_dbm")
    gaps = {m: power[m, "none"] - power[m, "ta"] for m in SWEEP_M}
    ok = all(abs(g) <= 10.0 for g in gaps.values())
    _report(5, ok, "none minus ta: " + ", ".join(f"M={m} {g:.2f} dB" for m, g in gaps.items()))


def test_c6_sensing_ordering(sweep):
    _, rows, _ = sweep
    sinr = _linear_means(rows, "sensing_sinr_db")
    good = [sinr[m, "greedy"] >= sinr[m, "ta"] >= sinr[m, "none"] for m in SWEEP_M]
    detail = ", ".join(f"M={m}: greedy {sinr[m, 'greedy']:.2f} ta {sinr[m, 'ta']:.2f} "
                       f"none {sinr[m, 'none']:.2f} dB" for m in SWEEP_M)
    _report(6, sum(good) / len(good) >= 0.8,
            f"greedy >= ta >= none in {sum(good)}/{len(good)} batches ({detail})")


def test_c7_precoder_normalization(sweep):
    results, rows, _ = sweep
    worst = max(r.norm_error for r in results)
    evaluated = sum(r["solve_status"] in ("Optimal", "Heuristic") for r in rows)
    _report(7, worst <= 1e-9, f"worst error {worst:.1e} over {evaluated} evaluations")


def test_c8_mps_round_trip():
    rng = np.random.default_rng(808)
    hits = 0
    for i in range(50):
        if i % 2:
            g = random_graph(rng, max_m=5, max_kc=4, max_kp=2)
            model = build_p2(g, random_thresholds(rng, g), strengthen=bool(rng.integers(2)))
        else:
            model = random_model(rng)
        a, b = solve_bnb(model), solve_bnb(import_mps(export_mps(model)))
        if a.objective_value is None:
            hits += b.status is a.status
        else:
            hits += b.status is a.status and abs(a.objective_value - b.objective_value) <= 1e-6
    _report(8, hits == 50, f"{hits}/50 objectives reproduced")


def test_c9_golden_micro_instances():
    worst, count = 0.0, 0
    for path in MICRO:
        d = json.loads(path.read_text())
        sc = NetworkScenario.from_dict(d["scenario"])
        dec = IscptDecision.from_dict(d["decision"])
        g = build_topology(sc)
        assert sc.num_aps <= 3 and len(sc.users) <= 3
        _, rep = evaluate_decision(sc, dec, g, d["mode"], d["sqrt_rho"])
        gamma, gamma_s, energy = straight_line_metrics(
            g.channels.tolist(), g.adjacency.tolist(), g.num_comm, g.sensing_col,
            list(g.charge_cols), dec.u.tolist(), dec.v.tolist(), dec.sensing_ap,
            sc.radio.max_power_w, noise_power_linear(sc.radio), d["mode"], d["sqrt_rho"])
        pairs = list(zip(rep.per_user_sinr, gamma)) + [(rep.harvested_power_w, energy)]
        pairs += list(zip(rep.per_user_sinr, d["expected"]["per_user_sinr"]))
        if gamma_s is not None:
            pairs += [(rep.sensing_sinr, gamma_s)]
        for got, want in pairs:
            rel = abs(got - want) / abs(want) if want else abs(got)
            worst = max(worst, rel)
        count += 1
    _report(9, count >= 3 and worst <= 1e-12,
            f"{count} instances, worst relative error {worst:.1e}")
