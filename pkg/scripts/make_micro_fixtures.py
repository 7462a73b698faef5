"""Regenerate the evaluation micro-instances under data/micro/.

Each fixture holds a scenario, a fixed decision and the metrics computed by
the scalar reference in tests/oracles.py (never by the package evaluator).
"""

import json
import math
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from oracles import straight_line_metrics  # noqa: E402
from sagin_iscpt.channel import noise_power_linear  # noqa: E402
from sagin_iscpt.geo import EcefPosition, GeodeticPosition, lla_to_ecef  # noqa: E402
from sagin_iscpt.optimizer import IscptDecision  # noqa: E402
from sagin_iscpt.scenario import NetworkScenario, NodeRole, UserNode  # noqa: E402
from sagin_iscpt.topology import build_topology  # noqa: E402

R_AP = 6371000.0 + 700e3


def ap(lon):
    return lla_to_ecef(GeodeticPosition(0.0, lon, 700e3))


def shell(lon_deg, r=R_AP):
    t = math.radians(lon_deg)
    return EcefPosition(r * math.cos(t), r * math.sin(t), 1000.0)


def ground(name, lon):
    return UserNode(name, NodeRole.COMM_TERRESTRIAL, GeodeticPosition(0.0, lon))


CASES = {
    "two_by_two": dict(
        aps=[ap(0.0), ap(2.0)],
        users=[ground("T-a", 0.5), ground("T-b", 1.5)],
        u=[1, 1], v=[1, 1], v_s=[0, 0], mode="average", sqrt_rho=False),
    "sensing_and_charge": dict(
        aps=[ap(0.0), ap(1.5), ap(3.0)],
        users=[ground("T-a", 1.0),
               UserNode("S-target", NodeRole.SENSING, shell(0.7)),
               UserNode("S-charge", NodeRole.CHARGE, shell(2.2))],
        u=[1], v=[1, 1, 1], v_s=[0, 1, 0], mode="average", sqrt_rho=False),
    "proportional_idle_ap": dict(
        aps=[ap(0.0), ap(1.2), ap(2.4)],
        users=[ground("T-a", 0.3), UserNode("S-b", NodeRole.COMM_SATELLITE, shell(1.0)),
               UserNode("S-charge", NodeRole.CHARGE, shell(1.7))],
        u=[1, 1], v=[1, 1, 0], v_s=[0, 0, 0], mode="proportional", sqrt_rho=True),
    "three_users_one_off": dict(
        aps=[ap(0.0), ap(1.0), ap(2.0)],
        users=[ground("T-a", 0.2), ground("T-b", 1.1), ground("T-c", 1.9)],
        u=[1, 0, 1], v=[1, 1, 1], v_s=[0, 0, 0], mode="proportional", sqrt_rho=False),
}


def main():
    for name, c in CASES.items():
        sc = NetworkScenario(tuple(c["aps"]), tuple(c["users"]), rng_seed=0)
        g = build_topology(sc)
        z = np.zeros((sc.num_aps, sc.num_comm))
        d = IscptDecision(c["u"], c["v"], c["v_s"], z, 0, "Heuristic", 0, "fixture")
        h = g.channels.tolist()
        gamma, gamma_s, energy = straight_line_metrics(
            h, g.adjacency.tolist(), g.num_comm, g.sensing_col, list(g.charge_cols),
            c["u"], c["v"], d.sensing_ap, sc.radio.max_power_w,
            noise_power_linear(sc.radio), c["mode"], c["sqrt_rho"])
        rate = sum(math.log2(1.0 + x) for x, on in zip(gamma, c["u"]) if on)
        out = {
            "scenario": sc.to_dict(),
            "decision": d.to_dict(),
            "mode": c["mode"],
            "sqrt_rho": c["sqrt_rho"],
            "adjacency": g.adjacency.tolist(),
            "expected": {"per_user_sinr": gamma, "sensing_sinr": gamma_s,
                         "harvested_power_w": energy, "sum_rate_bps_hz": rate},
        }
        path = ROOT / "data" / "micro" / f"{name}.json"
        path.write_text(json.dumps(out, indent=1) + "\n")
        print(path.name, g.adjacency.tolist(), gamma, gamma_s, energy)


if __name__ == "__main__":
    main()
