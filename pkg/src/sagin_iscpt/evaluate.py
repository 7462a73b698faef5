"""Physical-layer evaluation of a selection decision under MRT precoding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import noise_power_linear
from .optimizer import IscptDecision
from .scenario import NetworkScenario
from .topology import TopologyGraph, build_topology

NORM_TOL = 1e-9
POWER_MODES = ("average", "proportional")


class DimensionMismatch(ValueError):
    pass


class NoSensingAp(ValueError):
    pass


@dataclass(frozen=True)
class PrecodingPlan:
    """Per-AP precoders and transmit powers.

    ``s[m, k]`` is the stream of comm user ``k`` at AP ``m``, ``s_sense[m]``
    the sensing stream (nonzero only at the sensing AP), ``power[m]`` the
    transmit power in watts. APs with no stream to carry are idle: all-zero
    precoder and zero power.
    """

    s: np.ndarray
    s_sense: np.ndarray
    power: np.ndarray
    sensing_ap: Optional[int] = None

    @property
    def transmitting(self) -> np.ndarray:
        return (np.abs(self.s) ** 2).sum(axis=1) + np.abs(self.s_sense) ** 2 > 0

    def norm_error(self) -> float:
        """Worst deviation from unit precoder norm over transmitting APs."""
        tot = (np.abs(self.s) ** 2).sum(axis=1) + np.abs(self.s_sense) ** 2
        on = self.transmitting
        return float(np.max(np.abs(tot[on] - 1.0), initial=0.0))


@dataclass(frozen=True)
class PerformanceReport:
    per_user_sinr: np.ndarray
    sum_rate_bps_hz: float
    sensing_sinr: float
    harvested_power_w: float
    active_users: int
    active_aps: int
    bandwidth_hz: float = 100e6

    @property
    def sum_rate_bps(self) -> float:
        return self.sum_rate_bps_hz * self.bandwidth_hz

    @property
    def sensing_sinr_db(self) -> float:
        return _db(self.sensing_sinr)

    @property
    def harvested_power_dbm(self) -> float:
        return _db(self.harvested_power_w) + 30.0

    def csv_fields(self) -> dict:
        return {
            "sum_rate_bps_hz": f"{self.sum_rate_bps_hz:.6f}",
            "sensing_sinr_db": f"{self.sensing_sinr_db:.6f}",
            "harvested_power_dbm": f"{self.harvested_power_dbm:.6f}",
            "active_users": str(self.active_users),
            "active_aps": str(self.active_aps),
        }


def _db(x: float) -> float:
    return 10.0 * np.log10(x) if x > 0 else float("-inf")


def _check_dims(scenario: NetworkScenario, decision: IscptDecision,
                topology: TopologyGraph) -> None:
    if decision.num_aps != topology.num_aps or scenario.num_aps != topology.num_aps:
        raise DimensionMismatch(
            f"AP count differs: decision {decision.num_aps}, graph {topology.num_aps}, "
            f"scenario {scenario.num_aps}")
    if decision.num_comm != topology.num_comm or scenario.num_comm != topology.num_comm:
        raise DimensionMismatch(
            f"comm user count differs: decision {decision.num_comm}, "
            f"graph {topology.num_comm}, scenario {scenario.num_comm}")
    if len(scenario.users) != topology.num_users:
        raise DimensionMismatch("scenario and graph disagree on the user roster")


def physical_channels(scenario: NetworkScenario, topology: TopologyGraph = None) -> np.ndarray:
    """Complex channels for every visible AP/user pair (zero when blocked)."""
    if topology is not None and topology.channels is not None:
        return topology.channels
    return build_topology(scenario).channels


def mrt_precoder(scenario: NetworkScenario, decision: IscptDecision,
                 topology: TopologyGraph, mode: str = "average") -> PrecodingPlan:
    """Conjugate-channel precoders on dominant links of active nodes."""
    if mode not in POWER_MODES:
        raise ValueError(f"unknown power mode {mode!r}")
    _check_dims(scenario, decision, topology)
    h = physical_channels(scenario, topology)
    a = topology.adjacency.astype(bool)
    m_count, kc = topology.num_aps, topology.num_comm
    on_ap = decision.v.astype(bool)
    links = a[:, :kc] & on_ap[:, None] & decision.u.astype(bool)[None, :]
    s = np.where(links, np.conj(h[:, :kc]), 0.0)
    s_sense = np.zeros(m_count, dtype=complex)
    ms = decision.sensing_ap if topology.has_sensing else None
    if ms is not None and on_ap[ms] and a[ms, topology.sensing_col]:
        s_sense[ms] = np.conj(h[ms, topology.sensing_col])
    norm = np.sqrt((np.abs(s) ** 2).sum(axis=1) + np.abs(s_sense) ** 2)
    live = norm > 0
    s[live] /= norm[live, None]
    s_sense[live] /= norm[live]
    load = links.sum(axis=1) + (s_sense != 0)
    rho_max = scenario.radio.max_power_w
    if mode == "average":
        power = np.where(live, rho_max, 0.0)
    else:
        top = load.max(initial=0)
        power = rho_max * load / top if top > 0 else np.zeros(m_count)
    return PrecodingPlan(s, s_sense, power.astype(float), ms)


def _effective(plan: PrecodingPlan, sqrt_rho: bool = True):
    scale = np.sqrt(plan.power) if sqrt_rho else plan.power
    return scale[:, None] * plan.s, scale * plan.s_sense


def comm_sinr(scenario: NetworkScenario, plan: PrecodingPlan, decision: IscptDecision,
              channels: np.ndarray = None) -> np.ndarray:
    """Per-user SINR; inactive users get 0."""
    h = physical_channels(scenario) if channels is None else channels
    kc = decision.num_comm
    hc = h[:, :kc]
    bs, bsen = _effective(plan)
    cross = hc.T @ bs  # cross[k, k'] = sum_m sqrt(rho_m) h_mk s_mk'
    signal = np.abs(np.diag(cross)) ** 2
    interf = (np.abs(cross) ** 2).sum(axis=1) - signal
    interf = interf + np.abs(hc.T @ bsen) ** 2
    gamma = signal / (interf + noise_power_linear(scenario.radio))
    return np.where(decision.u.astype(bool), gamma, 0.0)


def sensing_sinr(scenario: NetworkScenario, plan: PrecodingPlan, decision: IscptDecision,
                 channels: np.ndarray = None) -> float:
    ms = decision.sensing_ap
    if ms is None or plan.s_sense[ms] == 0:
        raise NoSensingAp("decision has no transmitting sensing AP")
    h = physical_channels(scenario) if channels is None else channels
    col = scenario.num_comm
    hs = h[:, col]
    desired = plan.power[ms] * abs(hs[ms] * plan.s_sense[ms]) ** 2
    bs, _ = _effective(plan)
    interf = (np.abs(hs @ bs) ** 2).sum()
    return float(desired / (interf + noise_power_linear(scenario.radio)))


def harvested_power(scenario: NetworkScenario, plan: PrecodingPlan, decision: IscptDecision,
                    channels: np.ndarray = None, sqrt_rho: bool = False) -> float:
    """Energy at the charge users.

    By default the transmit power multiplies the coherent sum directly rather
    than through its square root; ``sqrt_rho`` switches to the amplitude
    scaling used by the SINR expressions.
    """
    if scenario.num_charge == 0:
        return 0.0
    h = physical_channels(scenario) if channels is None else channels
    start = scenario.num_comm + int(scenario.has_sensing)
    hp = h[:, start:start + scenario.num_charge]
    bs, bsen = _effective(plan, sqrt_rho)
    comm = (np.abs(hp.T @ bs) ** 2).sum()
    sense = (np.abs(hp.T @ bsen) ** 2).sum()
    return float(comm + sense)


def sum_rate(gamma: np.ndarray, u: np.ndarray) -> float:
    return float(np.sum(np.log2(1.0 + gamma[np.asarray(u, dtype=bool)])))


def evaluate_decision(scenario: NetworkScenario, decision: IscptDecision,
                      topology: TopologyGraph, mode: str = "average",
                      sqrt_rho: bool = False) -> tuple:
    """Precode, then compute every metric. Returns ``(plan, report)``."""
    plan = mrt_precoder(scenario, decision, topology, mode)
    h = physical_channels(scenario, topology)
    gamma = comm_sinr(scenario, plan, decision, h)
    if topology.has_sensing and decision.sensing_ap is not None:
        gs = sensing_sinr(scenario, plan, decision, h)
    else:
        gs = 0.0
    ep = harvested_power(scenario, plan, decision, h, sqrt_rho)
    report = PerformanceReport(gamma, sum_rate(gamma, decision.u), gs, ep,
                               int(decision.u.sum()), int(decision.v.sum()),
                               scenario.radio.bandwidth_hz)
    return plan, report


def topology_metrics(graph: TopologyGraph, decision: IscptDecision, sigma2: float) -> tuple:
    """Weight-only sum rate, per-user SINR, sensing SINR and charge energy.

    Uses the raw dominant weights with the selection gates applied and no
    precoder normalization. Returns ``(rate, gamma_k, gamma_s, energy)``.
    """
    w = graph.weights
    kc = graph.num_comm
    u = decision.u.astype(float)
    v = decision.v.astype(float)
    vs = decision.v_s.astype(float)
    wc = w[:, :kc]
    ws = w[:, graph.sensing_col] if graph.has_sensing else np.zeros(graph.num_aps)
    num = (v[:, None] * wc ** 2).sum(axis=0)
    # sum_m v_m w_mk sum_{k' != k} u_k' w_mk'
    load = wc @ u
    interf = (v[:, None] * wc * (load[:, None] - u[None, :] * wc)).sum(axis=0)
    interf += (vs[:, None] * wc * ws[:, None]).sum(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma = np.where(num > 0, num / (interf + sigma2), 0.0)
    rate = float((u * np.log2(1.0 + gamma)).sum())
    if graph.has_sensing:
        gs_num = (vs * ws ** 2).sum()
        gs_den = (u * ((v * ws) @ wc)).sum() + sigma2
        gamma_s = float(gs_num / gs_den) if gs_num > 0 else 0.0
    else:
        gamma_s = 0.0
    energy = 0.0
    for kp in graph.charge_cols:
        wp = w[:, kp]
        energy += float((v * wp * (wc @ u)).sum() + (vs * wp * ws).sum())
    return rate, gamma, gamma_s, energy
