import dataclasses

import numpy as np
import pytest

from noma_lpwa import (MaxMinPowerAllocator, NetworkConfig, PowerProblem,
                       StructurallyInfeasibleError,
                       allocate_channels_roundrobin, allocate_time_unfair,
                       constraint_slacks, feasibility_solve,
                       generate_deployment, least_received_powers,
                       maximize_min_rate, tau_upper_bound)
from noma_lpwa.power import sinr_floor
from oracles import (grid_feasible, make_problem, safe_grid_margins,
                     sweep_least_received,
                     two_node_least_received)

NOISE = 1.9811164905763876e-12


def single_node_problem(gain, theta=None, enforce=True):
    theta = NOISE * 0.1 if theta is None else theta
    return PowerProblem(channel=0, members=np.array([0]),
                        gains=np.array([gain]), thresholds_mw=np.array([theta]),
                        times_s=np.array([0.01024]), weights=np.zeros((1, 1)),
                        noise_mw=NOISE, bandwidth_hz=125e3, p_min_mw=1.0,
                        p_max_mw=100.0, enforce_decode_order=enforce)


def test_tau_upper_bound_log2_point():
    prob = single_node_problem(NOISE / 100.0)  # p_max * g = noise
    assert tau_upper_bound(prob) == pytest.approx(125e3, rel=1e-12)


def test_tau_upper_bound_chained_values():
    prob = single_node_problem(3.1622776602e-11, theta=NOISE * 0.1)
    assert tau_upper_bound(prob) == pytest.approx(1.3301672700e6, rel=1e-6)


def test_tau_upper_bound_uses_best_gain():
    prob = make_problem(np.random.default_rng(0), 4)
    expected = 125e3 * np.log2(1 + 100.0 * prob.gains.max() / NOISE)
    assert tau_upper_bound(prob) == pytest.approx(expected, rel=1e-12)


def test_single_node_floor_at_zero_target():
    prob = single_node_problem(1e-9)
    p = feasibility_solve(prob, 0.0)
    assert p[0] == pytest.approx(1.0, rel=1e-12)  # p_min binds


def test_single_node_infeasible_target():
    prob = single_node_problem(1e-10)
    # closed form: infeasible once (2^(tau/B) - 1) noise / g > p_max
    tau_limit = 125e3 * np.log2(1 + 100.0 * 1e-10 / NOISE)
    assert feasibility_solve(prob, tau_limit * 1.01) is None
    assert feasibility_solve(prob, tau_limit * 0.99) is not None


def test_single_node_maximize_closed_form():
    prob = single_node_problem(2e-10)
    sol = maximize_min_rate(prob)
    closed = 125e3 * np.log2(1 + 100.0 * 2e-10 / NOISE)
    assert sol.tau_star_bps == pytest.approx(closed, abs=2 * prob.epsilon)
    assert sol.powers_mw[0] == pytest.approx(100.0, rel=1e-6)


def test_two_node_triangular_system_by_hand():
    # decode order: node 0 (stronger) interfered by node 1; chain off
    g = np.array([1e-8, 2e-9])
    prob = PowerProblem(channel=0, members=np.arange(2), gains=g,
                        thresholds_mw=np.full(2, NOISE * 0.1),
                        times_s=np.full(2, 0.01024),
                        weights=np.array([[0.0, 1.0], [1.0, 0.0]]),
                        noise_mw=NOISE, bandwidth_hz=125e3,
                        p_min_mw=1.0, p_max_mw=100.0,
                        enforce_decode_order=False)
    tau = 400e3  # high enough that the rate floor binds for node 0
    c = 2 ** (tau / 125e3) - 1
    q1 = max(1.0 * g[1], c * NOISE)
    q0 = max(1.0 * g[0], c * (q1 + NOISE))
    p = feasibility_solve(prob, tau)
    assert p[1] * g[1] == pytest.approx(q1, rel=1e-12)
    assert p[0] * g[0] == pytest.approx(q0, rel=1e-12)


def test_two_node_closed_form_sweep():
    rng = np.random.default_rng(77)
    for _ in range(300):
        prob = make_problem(rng, 2, enforce_decode_order=bool(rng.integers(2)))
        tau = rng.uniform(0.0, 1.1) * tau_upper_bound(prob)
        c = sinr_floor(prob, tau)
        mine = least_received_powers(prob, c)
        oracle = two_node_least_received(prob, c)
        assert (mine is None) == (oracle is None)
        if mine is not None:
            assert np.allclose(mine, oracle, rtol=1e-9)


def test_bracketing_contract_randomized():
    rng = np.random.default_rng(5)
    for _ in range(40):
        prob = make_problem(rng, int(rng.integers(1, 8)),
                            enforce_decode_order=bool(rng.integers(2)))
        sol = maximize_min_rate(prob)
        assert feasibility_solve(prob, sol.tau_star_bps) is not None
        assert feasibility_solve(prob, sol.tau_star_bps + 2 * prob.epsilon) is None


def test_feasibility_monotone_in_target():
    rng = np.random.default_rng(6)
    for _ in range(60):
        prob = make_problem(rng, int(rng.integers(2, 7)))
        tu = tau_upper_bound(prob)
        taus = np.sort(rng.uniform(0.0, 1.05 * tu, 2))
        low = feasibility_solve(prob, taus[0])
        high = feasibility_solve(prob, taus[1])
        if high is not None:
            assert low is not None
            # least-power solutions are monotone in the target too
            assert np.all(low <= high * (1 + 1e-9))


def test_least_power_dominates_rejection_samples():
    rng = np.random.default_rng(8)
    found = 0
    for _ in range(400):
        if found >= 25:
            break
        prob = make_problem(rng, int(rng.integers(1, 4)))
        tau = rng.uniform(0.2, 0.9) * tau_upper_bound(prob)
        p_star = feasibility_solve(prob, tau)
        if p_star is None:
            continue
        c = sinr_floor(prob, tau)
        w = np.triu(prob.weights)
        for _ in range(200):
            p = rng.uniform(prob.p_min_mw, prob.p_max_mw, prob.size)
            q = p * prob.gains
            ok = (np.all(q >= prob.thresholds_mw)
                  and np.all(q >= c * (w @ q + prob.noise_mw)))
            if prob.enforce_decode_order and prob.size > 1:
                ok = ok and np.all(np.diff(q) >= 0)
            if ok:
                assert np.all(p_star <= p * (1 + 1e-9))
                found += 1
                break
    assert found >= 10


def test_grid_oracle_decision_agreement():
    rng = np.random.default_rng(9)
    for _ in range(60):
        m = int(rng.integers(1, 5))
        prob = make_problem(rng, m, enforce_decode_order=bool(rng.integers(2)))
        sol = maximize_min_rate(prob)
        fracs, points = safe_grid_margins(m)
        for frac in fracs:
            tau = frac * sol.tau_star_bps
            if tau <= 0:
                continue
            mine = feasibility_solve(prob, tau) is not None
            oracle = grid_feasible(prob, sinr_floor(prob, tau), points)
            assert mine == (frac < 1.0)
            assert mine == oracle, f"solver={mine} grid={oracle} m={m} frac={frac}"


def test_monotone_sweep_agreement():
    rng = np.random.default_rng(10)
    for _ in range(120):
        prob = make_problem(rng, int(rng.integers(1, 7)),
                            enforce_decode_order=bool(rng.integers(2)))
        tau = rng.uniform(0.0, 1.05) * tau_upper_bound(prob)
        c = sinr_floor(prob, tau)
        ref, decided = sweep_least_received(prob, c, max_sweeps=4000)
        if not decided:
            continue
        mine = least_received_powers(prob, c)
        assert (mine is None) == (ref is None)
        if mine is not None:
            assert np.allclose(mine, ref, rtol=1e-8)


def test_structural_infeasibility_diagnostic():
    # sensitivity above the received-power cap
    prob = single_node_problem(1e-12, theta=1e-9)
    with pytest.raises(StructurallyInfeasibleError) as exc:
        maximize_min_rate(prob)
    assert exc.value.channel == 0
    assert 0 in exc.value.nodes


def test_decode_order_chain_structural_conflict():
    # spread above p_max/p_min: chain cannot climb, but each node alone fits
    g = np.array([1e-7, 1e-10])
    prob = PowerProblem(channel=3, members=np.arange(2), gains=g,
                        thresholds_mw=np.full(2, NOISE * 0.01),
                        times_s=np.full(2, 0.01024),
                        weights=np.array([[0.0, 1.0], [1.0, 0.0]]),
                        noise_mw=NOISE, bandwidth_hz=125e3, p_min_mw=1.0,
                        p_max_mw=100.0, enforce_decode_order=True)
    with pytest.raises(StructurallyInfeasibleError):
        maximize_min_rate(prob)
    relaxed = dataclasses.replace(prob, enforce_decode_order=False)
    assert maximize_min_rate(relaxed).tau_star_bps > 0


def test_received_power_scaling_invariance():
    rng = np.random.default_rng(11)
    prob = make_problem(rng, 4)
    p = rng.uniform(prob.p_min_mw, prob.p_max_mw, 4)
    scaled = dataclasses.replace(prob, gains=prob.gains * 2.0)
    a = constraint_slacks(prob, p, tau_bps=40e3)
    b = constraint_slacks(scaled, p / 2.0, tau_bps=40e3)
    for key in ("sensitivity", "decode_order", "rate"):
        assert np.allclose(a[key], b[key], rtol=1e-12)


def test_realized_rates_meet_target():
    rng = np.random.default_rng(12)
    for _ in range(40):
        prob = make_problem(rng, int(rng.integers(2, 7)))
        sol = maximize_min_rate(prob)
        q = sol.powers_mw * prob.gains
        interference = np.triu(prob.weights) @ q
        rates = 125e3 * np.log2(1.0 + q / (interference + NOISE))
        assert rates.min() >= sol.tau_star_bps - prob.epsilon


def test_allocator_estimator_on_network(profile):
    dep = generate_deployment(NetworkConfig(node_count=24, rng_seed=31), profile)
    alloc = allocate_time_unfair(allocate_channels_roundrobin(dep), profile)
    est = MaxMinPowerAllocator(profile=profile, on_infeasible="max_power")
    est.fit(dep, alloc)
    assert est.powers_.shape == (24,)
    assert np.all(est.powers_ >= profile.p_min_mw - 1e-12)
    assert np.all(est.powers_ <= profile.p_max_mw + 1e-12)
    # fallback channels pinned at p_max
    for k in est.infeasible_channels_:
        members = alloc.channel_order[k]
        assert np.all(est.powers_[members] == profile.p_max_mw)


def test_allocator_raise_mode(profile):
    dep = generate_deployment(NetworkConfig(node_count=200, rng_seed=1), profile)
    alloc = allocate_time_unfair(allocate_channels_roundrobin(dep), profile)
    est = MaxMinPowerAllocator(profile=profile, on_infeasible="raise")
    with pytest.raises(StructurallyInfeasibleError):
        est.fit(dep, alloc)


def test_probe_history_brackets(profile):
    prob = make_problem(np.random.default_rng(13), 3)
    sol = maximize_min_rate(prob)
    taus = [t for t, _ in sol.probes]
    assert taus[0] == 0.0
    assert sol.iterations == len(sol.probes) - 1
    feasible_taus = [t for t, ok in sol.probes if ok]
    infeasible_taus = [t for t, ok in sol.probes if not ok]
    assert max(feasible_taus) == sol.tau_star_bps
    if infeasible_taus:
        assert min(infeasible_taus) > sol.tau_star_bps
