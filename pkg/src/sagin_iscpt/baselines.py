"""Reference selection strategies: keep everything, or greedy semi-orthogonal users."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .matching import hopcroft_karp
from .optimizer import IscptDecision
from .topology import TopologyGraph


class NoSensingLink(ValueError):
    pass


def strongest_sensing_ap(graph: TopologyGraph) -> np.ndarray:
    """One-hot selector of the AP with the largest sensing weight (lowest index on ties)."""
    v_s = np.zeros(graph.num_aps, dtype=int)
    if not graph.has_sensing:
        return v_s
    col = graph.weights[:, graph.sensing_col]
    if not (col > 0).any():
        raise NoSensingLink("sensing target has no dominant link")
    v_s[int(np.argmax(col))] = 1
    return v_s


def _decision(graph: TopologyGraph, u: np.ndarray, method: str) -> IscptDecision:
    v = np.ones(graph.num_aps, dtype=int)
    sub = graph.adjacency[:, :graph.num_comm] * u[None, :]
    z = np.zeros(sub.shape)
    pairs = hopcroft_karp(sub)
    for m, k in pairs:
        z[m, k] = 1.0
    return IscptDecision(u, v, strongest_sensing_ap(graph), z, len(pairs),
                         "Heuristic", 0, method)


def no_selection(graph: TopologyGraph) -> IscptDecision:
    return _decision(graph, np.ones(graph.num_comm, dtype=int), "none")


def greedy_user_selection(graph: TopologyGraph, corr_threshold: float = 0.5,
                          sensing_corr_threshold: Optional[float] = 0.0) -> IscptDecision:
    """Semi-orthogonal admission on the dominant-weight columns.

    Users are visited by decreasing column norm (lowest index on ties) and
    admitted when their normalized correlation with every admitted user is
    at most ``corr_threshold``. Users without any dominant link are skipped.
    When a sensing target exists its column also screens candidates: a user
    whose correlation with it exceeds ``sensing_corr_threshold`` is not
    admitted, which keeps communication streams off the target's APs
    (``None`` turns the screen off).
    """
    if not 0.0 <= corr_threshold <= 1.0:
        raise ValueError("corr_threshold must lie in [0, 1]")
    if sensing_corr_threshold is not None and not 0.0 <= sensing_corr_threshold <= 1.0:
        raise ValueError("sensing_corr_threshold must lie in [0, 1]")
    wc = graph.weights[:, :graph.num_comm]
    norms = np.linalg.norm(wc, axis=0)
    ws = graph.weights[:, graph.sensing_col] if graph.has_sensing else None
    screen = ws is not None and sensing_corr_threshold is not None and ws.any()
    order = sorted(range(graph.num_comm), key=lambda k: (-norms[k], k))
    admitted = []
    for k in order:
        if norms[k] == 0:
            break
        if screen and abs(wc[:, k] @ ws) / (norms[k] * np.linalg.norm(ws)) > sensing_corr_threshold:
            continue
        ok = all(abs(wc[:, k] @ wc[:, j]) / (norms[k] * norms[j]) <= corr_threshold
                 for j in admitted)
        if ok:
            admitted.append(k)
    u = np.zeros(graph.num_comm, dtype=int)
    u[admitted] = 1
    return _decision(graph, u, "greedy")
