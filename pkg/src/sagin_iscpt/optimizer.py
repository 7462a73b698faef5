"""Topology-aware ISCPT selection as a MILP.

Binary controls: user activation ``u``, AP activation ``v`` and the sensing-AP
selector ``v_s``; ``z`` is the relaxed matching between APs and comm users.
The objective is the matching cardinality; SINR, sensing and charging
requirements enter as big-M linear constraints on the dominant weights.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .milp import BINARY, CONTINUOUS, DEFAULT_NODE_LIMIT, MilpModel, Status, solve_bnb
from .topology import TopologyGraph

BIGM_SAFETY = 1.05


class MalformedGraph(ValueError):
    pass


class IscptInfeasible(RuntimeError):
    pass


class NodeLimitReached(RuntimeError):
    pass


@dataclass(frozen=True)
class IscptThresholds:
    """Relative thresholds in [0, 1].

    ``tau_hat_c`` may be a scalar or one value per AP, ``tau_hat_s`` a scalar
    or one value per comm user. ``tau_c``, ``tau_s`` and ``tau_p`` are the
    absolute performance targets; they are carried for reporting only.
    """

    tau_hat_c: Union[float, tuple] = 0.5
    tau_hat_p: float = 0.5
    tau_hat_s: Union[float, tuple] = 0.5
    tau_c: Optional[float] = None
    tau_s: Optional[float] = None
    tau_p: Optional[float] = None

    def __post_init__(self):
        for name in ("tau_hat_c", "tau_hat_p", "tau_hat_s"):
            vals = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if ((vals < 0) | (vals > 1)).any():
                raise ValueError(f"{name} must lie in [0, 1]")

    def per_ap(self, m: int) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.tau_hat_c, dtype=float), (m,)).copy()

    def per_user(self, k: int) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.tau_hat_s, dtype=float), (k,)).copy()


@dataclass
class IscptDecision:
    u: np.ndarray
    v: np.ndarray
    v_s: np.ndarray
    z: np.ndarray
    matching_value: int
    status: str = Status.OPTIMAL.value
    nodes: int = 0
    method: str = "ta"

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=int)
        self.v = np.asarray(self.v, dtype=int)
        self.v_s = np.asarray(self.v_s, dtype=int)
        self.z = np.asarray(self.z, dtype=float).reshape(len(self.v), len(self.u))

    @property
    def num_comm(self) -> int:
        return len(self.u)

    @property
    def num_aps(self) -> int:
        return len(self.v)

    @property
    def sensing_ap(self) -> Optional[int]:
        on = np.flatnonzero(self.v_s)
        return int(on[0]) if len(on) else None

    def to_dict(self) -> dict:
        pairs = [[int(m), int(k), float(self.z[m, k])] for m, k in zip(*np.nonzero(self.z))]
        return {
            "method": self.method,
            "status": self.status,
            "nodes": int(self.nodes),
            "matching_value": int(self.matching_value),
            "u": self.u.tolist(),
            "v": self.v.tolist(),
            "v_s": self.v_s.tolist(),
            "z": pairs,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IscptDecision":
        z = np.zeros((len(d["v"]), len(d["u"])))
        for m, k, val in d.get("z", []):
            z[m, k] = val
        return cls(d["u"], d["v"], d["v_s"], z, d["matching_value"],
                   d.get("status", Status.OPTIMAL.value), d.get("nodes", 0),
                   d.get("method", "ta"))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def loads(cls, text: str) -> "IscptDecision":
        return cls.from_dict(json.loads(text))


def normalized_weights(graph: TopologyGraph) -> np.ndarray:
    """Dominant weights divided by their maximum entry."""
    w = graph.weights
    top = w.max(initial=0.0)
    return w / top if top > 0 else w.copy()


def compute_bigM(graph: TopologyGraph, thresholds: IscptThresholds,
                 weights: np.ndarray = None) -> tuple:
    """Instance-derived big-M constants ``(c1, c2, c4)``."""
    w = graph.weights if weights is None else weights
    kc = graph.num_comm
    wc = w[:, :kc]
    ws = w[:, graph.sensing_col] if graph.has_sensing else np.zeros(w.shape[0])
    tau_c = thresholds.per_ap(w.shape[0])
    # per (m, k): tau_c[m] * w_mk * (sum_k' w_mk' + w_ms)
    row_load = wc.sum(axis=1) + ws
    c12 = float((tau_c[:, None] * wc * row_load[:, None]).max(initial=0.0))
    if graph.has_sensing and kc:
        tau_s = thresholds.per_user(kc)
        per_k = tau_s * ((ws ** 2).sum() + wc.T @ ws)
        c4 = float(per_k.max(initial=0.0))
    else:
        c4 = 0.0
    return BIGM_SAFETY * c12, BIGM_SAFETY * c12, BIGM_SAFETY * c4


def _check_layout(graph: TopologyGraph) -> None:
    if graph.num_comm < 1:
        raise MalformedGraph("graph has no communication users")
    if graph.num_users != graph.num_comm + int(graph.has_sensing) + graph.num_charge:
        raise MalformedGraph("column count does not match the user layout")


def build_p2(graph: TopologyGraph, thresholds: IscptThresholds, *,
             exclude_self: bool = False, power_exponent: int = 1,
             normalize: bool = True, strengthen: bool = False) -> MilpModel:
    """Emit the MILP over ``u``, ``v``, ``v_s`` (binary) and ``z`` (continuous).

    Only edges carry a ``z`` variable (``z <= A`` is implicit); ``v_s`` is
    fixed to 0 on APs without a sensing link. Rows that are identically
    satisfied (no weight on either side) are skipped. ``strengthen`` appends
    conflict inequalities derived from the SINR rows; they leave the set of
    integer-feasible points unchanged.
    """
    _check_layout(graph)
    a = graph.adjacency.astype(int)
    w = normalized_weights(graph) if normalize else graph.weights
    m_count, kc = a.shape[0], graph.num_comm
    sc = graph.sensing_col
    tau_c = thresholds.per_ap(m_count)
    tau_s = thresholds.per_user(kc)
    c1, c2, c4 = compute_bigM(graph, thresholds, w)

    model = MilpModel(name="ISCPT")
    u = [model.add_variable(f"u{k}", BINARY) for k in range(kc)]
    v = [model.add_variable(f"v{m}", BINARY) for m in range(m_count)]
    vs = []
    if graph.has_sensing:
        vs = [model.add_variable(f"s{m}", BINARY, 0.0, float(a[m, sc]))
              for m in range(m_count)]
    z = {}
    for m in range(m_count):
        for k in range(kc):
            if a[m, k]:
                z[m, k] = model.add_variable(f"z{m}_{k}", CONTINUOUS, 0.0, 1.0)
    model.set_objective({j: 1.0 for j in z.values()}, "max")

    for k in range(kc):
        coeffs = {u[k]: 1.0}
        for m in np.flatnonzero(a[:, k]):
            coeffs[v[m]] = -1.0
        model.add_constraint(f"b{k}", coeffs, "<=", 0.0)

    for m in range(m_count):
        coeffs = {v[m]: 1.0}
        for k in np.flatnonzero(a[m, :kc]):
            coeffs[u[k]] = -1.0
        rhs = float(a[m, kc:].sum())  # sensing and charge columns are constants
        model.add_constraint(f"c{m}", coeffs, "<=", rhs)

    for m in range(m_count):
        ks = [k for k in range(kc) if (m, k) in z]
        if ks:
            coeffs = {z[m, k]: 1.0 for k in ks}
            coeffs[v[m]] = -1.0
            model.add_constraint(f"e{m}", coeffs, "<=", 0.0)
    for k in range(kc):
        ms = [m for m in range(m_count) if (m, k) in z]
        coeffs = {z[m, k]: 1.0 for m in ms}
        coeffs[u[k]] = -1.0
        model.add_constraint(f"f{k}", coeffs, "<=", 0.0)

    # communication SINR: tau * (sum_k' u_k' w_mk' w_mk + v_s w_ms w_mk)
    #   + c1 u_k + c2 v_m <= w_mk^2 + c1 + c2
    for m in range(m_count):
        for k in range(kc):
            wmk = w[m, k]
            if wmk <= 0:
                continue
            coeffs = {}
            for k2 in np.flatnonzero(w[m, :kc]):
                if exclude_self and k2 == k:
                    continue
                coeffs[u[k2]] = tau_c[m] * w[m, k2] * wmk
            if graph.has_sensing and w[m, sc] > 0:
                coeffs[vs[m]] = tau_c[m] * w[m, sc] * wmk
            coeffs[u[k]] = coeffs.get(u[k], 0.0) + c1
            coeffs[v[m]] = coeffs.get(v[m], 0.0) + c2
            model.add_constraint(f"g{m}_{k}", coeffs, "<=", wmk * wmk + c1 + c2)

    if graph.num_charge:
        wp = w[:, list(graph.charge_cols)] ** power_exponent
        per_ap = wp.sum(axis=1)
        coeffs = {v[m]: float(per_ap[m]) for m in range(m_count) if per_ap[m] > 0}
        model.add_constraint("h", coeffs, ">=", thresholds.tau_hat_p * float(per_ap.sum()))

    if graph.has_sensing:
        ws = w[:, sc]
        for k in range(kc):
            cross = w[:, k] * ws
            if not (cross > 0).any():
                continue
            # (1 - tau) sum v_s w_ms^2 - tau sum v_m w_mk w_ms - c4 u_k >= -c4
            coeffs = {vs[m]: (1.0 - tau_s[k]) * ws[m] ** 2 for m in range(m_count) if ws[m] > 0}
            for m in np.flatnonzero(cross):
                coeffs[v[m]] = coeffs.get(v[m], 0.0) - tau_s[k] * cross[m]
            coeffs[u[k]] = -c4
            model.add_constraint(f"i{k}", coeffs, ">=", -c4)
        for m in np.flatnonzero(a[:, sc]):
            model.add_constraint(f"j{m}", {vs[m]: 1.0, v[m]: -1.0}, "<=", 0.0)
        model.add_constraint("k", {vs[m]: float(a[m, sc]) for m in range(m_count)}, "=", 1.0)
    if strengthen:
        _add_conflict_cuts(model, graph, w, tau_c, exclude_self, u, v, vs, z)
    return model


def _row_fails(w_mk: float, others: float, tau: float, exclude_self: bool) -> bool:
    """Is the SINR row of a user with weight ``w_mk`` violated at an active AP
    whose remaining load (other users plus sensing) sums to ``others``?"""
    load = others + (0.0 if exclude_self else w_mk)
    return tau * w_mk * load > w_mk * w_mk * (1.0 + 1e-12)


def pair_conflicts(graph: TopologyGraph, w: np.ndarray, tau_c: np.ndarray,
                   exclude_self: bool = False) -> dict:
    """``{m: set of (k, k2)}`` user pairs that cannot both be active while AP
    ``m`` is active, whatever else is switched on."""
    kc = graph.num_comm
    out = {}
    for m in range(graph.num_aps):
        ks = np.flatnonzero(w[m, :kc])
        pairs = set()
        for i, k in enumerate(ks):
            for k2 in ks[i + 1:]:
                if (_row_fails(w[m, k], w[m, k2], tau_c[m], exclude_self)
                        or _row_fails(w[m, k2], w[m, k], tau_c[m], exclude_self)):
                    pairs.add((int(k), int(k2)))
        out[m] = pairs
    return out


def _add_conflict_cuts(model, graph, w, tau_c, exclude_self, u, v, vs, z) -> None:
    # Valid inequalities implied by the SINR rows; every integer-feasible
    # point of the base model satisfies them, they only tighten the relaxation.
    kc, sc = graph.num_comm, graph.sensing_col
    conf = pair_conflicts(graph, w, tau_c, exclude_self)
    partner = {m: {} for m in conf}
    n = 0
    for m, pairs in conf.items():
        for k, k2 in sorted(pairs):
            # both users on and AP m on is infeasible
            model.add_constraint(f"x{n}", {u[k]: 1.0, u[k2]: 1.0, v[m]: 1.0}, "<=", 2.0)
            n += 1
            partner[m].setdefault(k, []).append(k2)
            partner[m].setdefault(k2, []).append(k)
    for m in sorted(partner):
        # AP m cannot carry matching weight to any user clashing with an active k2
        for k2 in sorted(partner[m]):
            coeffs = {z[m, k]: 1.0 for k in partner[m][k2]}
            coeffs[u[k2]] = 1.0
            model.add_constraint(f"y{m}_{k2}", coeffs, "<=", 1.0)
        if graph.has_sensing and w[m, sc] > 0:
            # users that cannot coexist with the sensing stream at m
            clash = [k for k in np.flatnonzero(w[m, :kc])
                     if _row_fails(w[m, k], w[m, sc], tau_c[m], exclude_self)]
            if clash:
                coeffs = {z[m, k]: 1.0 for k in clash}
                coeffs[vs[m]] = 1.0
                model.add_constraint(f"q{m}", coeffs, "<=", 1.0)
    a = graph.adjacency
    n = 0
    for k in range(kc):
        for k2 in range(kc):
            if k == k2:
                continue
            blocked = [m for m in np.flatnonzero(a[:, k])
                       if (min(k, k2), max(k, k2)) in conf[m]]
            if not blocked:
                continue
            # with k and k2 both on, k needs an active AP where they do not clash
            coeffs = {u[k]: 1.0, u[k2]: 1.0}
            for m in np.flatnonzero(a[:, k]):
                if m not in blocked:
                    coeffs[v[m]] = -1.0
            model.add_constraint(f"p{n}", coeffs, "<=", 1.0)
            n += 1


def decode(graph: TopologyGraph, model: MilpModel, values: np.ndarray) -> tuple:
    m_count, kc = graph.num_aps, graph.num_comm
    x = np.round(values).astype(int)
    u = np.array([x[model.index(f"u{k}")] for k in range(kc)])
    v = np.array([x[model.index(f"v{m}")] for m in range(m_count)])
    if graph.has_sensing:
        v_s = np.array([x[model.index(f"s{m}")] for m in range(m_count)])
    else:
        v_s = np.zeros(m_count, dtype=int)
    z = np.zeros((m_count, kc))
    for m in range(m_count):
        for k in range(kc):
            if graph.adjacency[m, k]:
                z[m, k] = values[model.index(f"z{m}_{k}")]
    return u, v, v_s, np.clip(z, 0.0, 1.0)


def branching_priority(model: MilpModel, graph: TopologyGraph) -> list:
    """Sensing selector first, then user activation, then the rest."""
    groups = []
    if graph.has_sensing:
        groups.append([model.index(f"s{m}") for m in range(graph.num_aps)])
    groups.append([model.index(f"u{k}") for k in range(graph.num_comm)])
    return groups


def solve_iscpt(graph: TopologyGraph, thresholds: IscptThresholds = IscptThresholds(),
                node_limit: int = DEFAULT_NODE_LIMIT, *, strengthen: bool = True,
                prioritize: bool = True, **build_opts) -> IscptDecision:
    """Build, solve and decode.

    Raises ``IscptInfeasible`` when the model has no feasible point and
    ``NodeLimitReached`` when the node budget ran out before any incumbent;
    a node-limited solve with an incumbent returns it with status NodeLimit.
    """
    model = build_p2(graph, thresholds, strengthen=strengthen, **build_opts)
    priority = branching_priority(model, graph) if prioritize else ()
    # with the binaries fixed, the z-polytope is a bipartite matching polytope
    # (totally unimodular, integral bounds), so optimal objectives are integers
    sol = solve_bnb(model, node_limit=node_limit, objective_step=1.0, priority=priority)
    if sol.status is Status.INFEASIBLE:
        raise IscptInfeasible(f"ISCPT model infeasible after {sol.nodes} nodes")
    if sol.values is None:
        raise NodeLimitReached(f"no incumbent within {node_limit} nodes")
    u, v, v_s, z = decode(graph, model, sol.values)
    return IscptDecision(u, v, v_s, z, int(round(sol.objective_value)),
                         sol.status.value, sol.nodes, "ta")


def p2_violations(graph: TopologyGraph, thresholds: IscptThresholds,
                  decision: IscptDecision, *, exclude_self: bool = False,
                  power_exponent: int = 1, tol: float = 1e-9) -> list:
    """Re-evaluate every constraint in its logical (big-M free) form.

    Returns a list of human-readable violation strings; empty means feasible.
    """
    a = graph.adjacency.astype(int)
    w = normalized_weights(graph)
    kc, m_count = graph.num_comm, graph.num_aps
    u, v, vs, z = decision.u, decision.v, decision.v_s, decision.z
    tau_c = thresholds.per_ap(m_count)
    tau_s = thresholds.per_user(kc)
    sc = graph.sensing_col
    ws = w[:, sc] if graph.has_sensing else np.zeros(m_count)
    out = []
    for k in range(kc):
        if u[k] and not (a[:, k] * v).any():
            out.append(f"user {k} active without an active AP")
        if z[:, k].sum() > u[k] + tol:
            out.append(f"user {k} over-matched")
    for m in range(m_count):
        if v[m] > (a[m, :kc] * u).sum() + a[m, kc:].sum():
            out.append(f"AP {m} active with nothing to serve")
        if z[m].sum() > v[m] + tol:
            out.append(f"AP {m} over-matched")
        if ((z[m] > tol) & (a[m, :kc] == 0)).any():
            out.append(f"AP {m} matched on a non-edge")
    for m in range(m_count):
        for k in range(kc):
            if not (u[k] and v[m]) or w[m, k] <= 0:
                continue
            mask = np.ones(kc, bool)
            if exclude_self:
                mask[k] = False
            interf = (u * w[m, :kc] * mask).sum() * w[m, k] + vs[m] * ws[m] * w[m, k]
            if w[m, k] ** 2 < tau_c[m] * interf - tol:
                out.append(f"SINR row violated at AP {m}, user {k}")
    if graph.num_charge:
        wp = w[:, list(graph.charge_cols)] ** power_exponent
        if (v[:, None] * wp).sum() < thresholds.tau_hat_p * wp.sum() - tol:
            out.append("charging requirement violated")
    if graph.has_sensing:
        if (vs > v).any():
            out.append("sensing AP not active")
        if (a[:, sc] * vs).sum() != 1 or vs.sum() != 1:
            out.append("exactly one linked sensing AP required")
        own = (vs * ws ** 2).sum()
        for k in range(kc):
            if u[k] and own < tau_s[k] * (own + (v * w[:, k] * ws).sum()) - tol:
                out.append(f"sensing row violated for user {k}")
    return out
