from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import random_graph, random_thresholds
from oracles import enumerate_p2
from sagin_iscpt.matching import max_matching_size
from sagin_iscpt.milp import solve_bnb
from sagin_iscpt.optimizer import (IscptDecision, IscptInfeasible, IscptThresholds,
                                   MalformedGraph, NodeLimitReached, build_p2,
                                   compute_bigM, normalized_weights, p2_violations,
                                   solve_iscpt)
from sagin_iscpt.topology import TopologyGraph

DATA = Path(__file__).parent.parent / "data"
ZERO = IscptThresholds(0.0, 0.0, 0.0)


def _graph(a, w, kc, sensing=False, kp=0):
    return TopologyGraph.from_matrices(np.array(a), np.array(w, float), kc, sensing, kp)


def test_identity_graph_optimum_is_two():
    g = _graph(np.eye(2), np.eye(2) * 1e-9, 2)
    assert enumerate_p2(g, ZERO) == 2
    sol = solve_bnb(build_p2(g, ZERO))
    assert sol.objective_value == pytest.approx(2.0)
    assert solve_iscpt(g, ZERO).matching_value == 2


def test_tau_p_one_forces_charge_aps_on():
    # AP 2 only links the charger; APs 0 and 1 also serve users
    a = [[1, 1], [1, 0], [0, 1]]
    g = _graph(a, np.array(a) * 2e-9, 1, kp=1)
    d = solve_iscpt(g, IscptThresholds(0.5, 1.0, 0.5))
    assert d.v[0] == 1 and d.v[2] == 1
    d0 = solve_iscpt(g, IscptThresholds(0.5, 0.0, 0.5))
    assert d0.v[2] == 0


def test_tau_p_zero_is_vacuous():
    a = [[1, 1], [0, 1]]
    g = _graph(a, np.array(a) * 1e-9, 1, kp=1)
    model = build_p2(g, IscptThresholds(0.5, 0.0, 0.5))
    row = next(c for c in model.constraints if c.name == "h")
    assert row.rhs == 0.0 and all(v >= 0 for v in row.coeffs.values())


def test_single_sensing_link_forces_selector():
    a = [[1, 0], [1, 1]]
    g = _graph(a, np.array(a) * 1e-9, 1, sensing=True)
    d = solve_iscpt(g, ZERO)
    assert d.v_s.tolist() == [0, 1] and d.v[1] == 1 and d.sensing_ap == 1


def test_single_user_single_ap():
    g = _graph([[1]], [[3e-9]], 1)
    d = solve_iscpt(g, IscptThresholds(0.1, 0.1, 0.1))
    assert d.u.tolist() == [1] and d.v.tolist() == [1] and d.matching_value == 1


def test_toy_instance_golden():
    g = TopologyGraph.from_text((DATA / "toy.graph").read_text())
    th = IscptThresholds()
    d = solve_iscpt(g, th)
    golden = IscptDecision.loads((DATA / "toy.decision.json").read_text())
    assert d.matching_value == enumerate_p2(g, th) == golden.matching_value == 4
    assert d.dumps() == golden.dumps()
    assert p2_violations(g, th, d) == []
    # the over-connected user and two conflict-carrying APs are switched off
    assert d.u[3] == 0 and d.v[5] == 0 and d.v[10] == 0


def test_bigm_zero_and_scaling():
    a = np.ones((3, 4), int)
    g0 = _graph(a, np.zeros((3, 4)), 2, sensing=True, kp=1)
    assert compute_bigM(g0, IscptThresholds()) == (0.0, 0.0, 0.0)
    rng = np.random.default_rng(1)
    w = rng.uniform(1, 2, (3, 4))
    g = _graph(a, w, 2, sensing=True, kp=1)
    g3 = _graph(a, 3.0 * w, 2, sensing=True, kp=1)
    for x, y in zip(compute_bigM(g, IscptThresholds()), compute_bigM(g3, IscptThresholds())):
        assert y == pytest.approx(9.0 * x, rel=1e-12)


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_bigm_makes_rows_slack_when_user_off(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, max_m=6, max_kc=5, max_kp=2, sensing=True)
    th = random_thresholds(rng, g)
    w = normalized_weights(g)
    c1, _, c4 = compute_bigM(g, th, w)
    kc, sc = g.num_comm, g.sensing_col
    tau_c = th.per_ap(g.num_aps)
    for m in range(g.num_aps):
        for k in range(kc):
            # every other binary at its worst value
            worst = tau_c[m] * w[m, k] * (w[m, :kc].sum() + w[m, sc]) - w[m, k] ** 2
            assert c1 >= worst
    tau_s = th.per_user(kc)
    for k in range(kc):
        worst = tau_s[k] * ((w[:, sc] ** 2).sum() + w[:, k] @ w[:, sc])
        assert c4 >= worst


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_solver_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng)
    th = random_thresholds(rng, g)
    expect = enumerate_p2(g, th)
    for strengthen in (False, True):
        if expect is None:
            with pytest.raises(IscptInfeasible):
                solve_iscpt(g, th, strengthen=strengthen)
            continue
        d = solve_iscpt(g, th, strengthen=strengthen)
        assert d.matching_value == pytest.approx(expect, abs=1e-6)
        assert p2_violations(g, th, d) == []


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_exclude_self_variant_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, max_m=5, max_kc=4)
    th = random_thresholds(rng, g)
    expect = enumerate_p2(g, th, exclude_self=True)
    if expect is None:
        return
    d = solve_iscpt(g, th, exclude_self=True)
    assert d.matching_value == pytest.approx(expect, abs=1e-6)
    assert p2_violations(g, th, d, exclude_self=True) == []


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_zero_thresholds_give_maximum_matching(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, max_m=12, max_kc=8, density=0.3)
    assert solve_iscpt(g, ZERO).matching_value == \
        max_matching_size(g.adjacency[:, :g.num_comm])


@given(st.integers(0, 10**6))
@settings(max_examples=20, deadline=None)
def test_monotone_in_tau_c(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, max_m=6, max_kc=4, sensing=False, max_kp=0)
    prev = None
    for tau in (0.0, 0.3, 0.6, 0.9, 1.0):
        val = solve_iscpt(g, IscptThresholds(tau, 0.0, 0.0)).matching_value
        if prev is not None:
            assert val <= prev
        prev = val


@given(st.integers(0, 10**6), st.floats(1e-3, 1e3))
@settings(max_examples=20, deadline=None)
def test_weight_scaling_invariance(seed, alpha):
    rng = np.random.default_rng(seed)
    g = random_graph(rng)
    th = random_thresholds(rng, g)
    scaled = TopologyGraph.from_matrices(g.adjacency, g.weights * alpha, g.num_comm,
                                         g.has_sensing, g.num_charge)
    try:
        a = solve_iscpt(g, th).matching_value
    except IscptInfeasible:
        with pytest.raises(IscptInfeasible):
            solve_iscpt(scaled, th)
        return
    assert solve_iscpt(scaled, th).matching_value == a


def test_unnormalized_build_agrees():
    rng = np.random.default_rng(12)
    g = random_graph(rng, sensing=True)
    g = TopologyGraph.from_matrices(g.adjacency, g.weights * 1e9, g.num_comm,
                                    g.has_sensing, g.num_charge)
    th = IscptThresholds()
    a = solve_bnb(build_p2(g, th))
    b = solve_bnb(build_p2(g, th, normalize=False))
    assert a.status is b.status
    if a.objective_value is not None:
        assert a.objective_value == pytest.approx(b.objective_value)


def test_mps_names_fit_and_sensing_rows_absent_without_target():
    g = _graph([[1, 1], [1, 0]], [[1e-9, 2e-9], [1e-9, 0]], 2)
    model = build_p2(g, IscptThresholds(), strengthen=True)
    names = [v.name for v in model.variables] + [c.name for c in model.constraints]
    assert all(len(n) <= 8 for n in names)
    assert not any(n.startswith(("s", "i", "j", "k")) for n in names)


def test_errors():
    with pytest.raises(MalformedGraph):
        build_p2(_graph([[1]], [[1.0]], 0, kp=1), IscptThresholds())
    with pytest.raises(ValueError):
        IscptThresholds(tau_hat_c=1.5)
    # a sensing target with no dominant link cannot get its AP
    g = _graph([[1, 0], [0, 0]], [[1e-9, 0], [0, 0]], 1, sensing=True)
    with pytest.raises(IscptInfeasible):
        solve_iscpt(g, IscptThresholds())


def test_node_limit_without_incumbent(monkeypatch):
    import sagin_iscpt.optimizer as opt
    real = opt.solve_bnb
    monkeypatch.setattr(opt, "solve_bnb", lambda model, **kw: real(model, **kw, dive_every=0))
    g = TopologyGraph.from_text((DATA / "toy.graph").read_text())
    with pytest.raises(NodeLimitReached):
        solve_iscpt(g, node_limit=1)


def test_decision_round_trip():
    d = IscptDecision([1, 0], [1, 1, 0], [0, 1, 0], np.array([[0, 0], [1, 0], [0, 0]]), 1)
    back = IscptDecision.loads(d.dumps())
    assert back.dumps() == d.dumps() and back.sensing_ap == 1
