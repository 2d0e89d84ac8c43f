"""Independent reference implementations used only to check the library.

Everything here recomputes results through a different route than the
production code: pairwise enumeration instead of matrix products, a monotone
sweep or an exhaustive power grid instead of the exact block solver, and the
hand-derived closed form for the two-node power problem.
"""

from __future__ import annotations

import numpy as np

from noma_lpwa.power import PowerProblem


def pairwise_sinr(deployment, allocation, powers_mw, profile, model):
    """Per-node SINR by looping over every ordered node pair."""
    n = deployment.num_nodes
    times = profile.times_s
    sinr = np.empty(n)
    gamma_rank = {}
    for k in range(allocation.num_channels):
        for pos, node in enumerate(allocation.channel_order[k]):
            gamma_rank[node] = pos
    for a in range(n):
        ka = allocation.channel_of[a]
        ta = times[allocation.time_of[a]]
        total = 0.0
        for b in range(n):
            if b == a or allocation.channel_of[b] != ka:
                continue
            if model == "noma_sic" and gamma_rank[b] <= gamma_rank[a]:
                continue
            tb = times[allocation.time_of[b]]
            col = 1.0 if allocation.time_of[b] == allocation.time_of[a] \
                else min(ta, tb) / ta
            total += col * powers_mw[b] * deployment.gains[ka, b]
        q = powers_mw[a] * deployment.gains[ka, a]
        sinr[a] = q / (total + deployment.noise_mw)
    return sinr


def sweep_least_received(problem: PowerProblem, sinr_floor: float,
                         max_sweeps: int = 10_000):
    """Monotone fixed-point sweep from the lower corner.

    Returns (q, converged_or_decided). Near box-limited optima the contraction
    stalls, so callers only trust it when the second element is True.
    """
    lower = np.maximum(problem.p_min_mw * problem.gains, problem.thresholds_mw)
    upper = problem.p_max_mw * problem.gains
    if np.any(lower > upper * (1 + 1e-12)):
        return None, True
    q = lower.copy()
    for _ in range(max_sweeps):
        changed = False
        for i in range(problem.size):
            req = max(lower[i], sinr_floor * (problem.weights[i, i + 1:] @ q[i + 1:]
                                              + problem.noise_mw))
            if problem.enforce_decode_order and i > 0:
                req = max(req, q[i - 1])
            if req > upper[i] * (1 + 1e-12):
                return None, True
            if req > q[i] * (1 + 1e-13):
                q[i] = req
                changed = True
        if not changed:
            return q, True
    return q, False


def _feasible_point(problem: PowerProblem, powers, sinr_floor: float) -> bool:
    p = np.asarray(powers, dtype=float)
    g = problem.gains
    q = p * g
    if np.any(p < problem.p_min_mw * (1 - 1e-12)):
        return False
    if np.any(p > problem.p_max_mw * (1 + 1e-12)):
        return False
    if np.any(q < problem.thresholds_mw * (1 - 1e-12)):
        return False
    if problem.enforce_decode_order and np.any(q[1:] < q[:-1] * (1 - 1e-12)):
        return False
    w = np.triu(problem.weights)
    return bool(np.all(q >= sinr_floor * (w @ q + problem.noise_mw) * (1 - 1e-12)))


def grid_feasible(problem: PowerProblem, sinr_floor: float,
                  points_per_node: int = 25) -> bool:
    """Exhaustive cartesian power grid; feasible iff some grid point passes.

    Each axis carries the box corners, the node's sensitivity corner and its
    interference-free rate-floor power, so corner-pinned solutions are
    reachable exactly; away from the feasibility boundary the geometric grid
    covers the interior. Only trustworthy at rate targets with some margin
    from the boundary (a grid cannot certify thin feasible slivers).
    """
    axes = []
    for i in range(problem.size):
        lo = max(problem.p_min_mw, problem.thresholds_mw[i] / problem.gains[i])
        if lo > problem.p_max_mw:
            return False
        solo = sinr_floor * problem.noise_mw / problem.gains[i]
        anchors = [lo, problem.p_max_mw, min(max(solo, lo), problem.p_max_mw)]
        axis = np.geomspace(lo, problem.p_max_mw, points_per_node)
        axes.append(np.unique(np.concatenate([axis, anchors])))
    grids = np.meshgrid(*axes, indexing="ij")
    p = np.stack([g.ravel() for g in grids], axis=1)
    q = p * problem.gains
    ok = np.ones(p.shape[0], dtype=bool)
    if problem.enforce_decode_order and problem.size > 1:
        ok &= np.all(q[:, 1:] >= q[:, :-1] * (1 - 1e-12), axis=1)
    w = np.triu(problem.weights)
    need = sinr_floor * (q @ w.T + problem.noise_mw)
    ok &= np.all(q >= need * (1 - 1e-12), axis=1)
    return bool(np.any(ok))


def safe_grid_margins(size: int) -> tuple[tuple[float, ...], int]:
    """(tau fractions of tau_star, grid points per node) tuned so the grid
    oracle is reliable: feasible-side margins widen with dimension."""
    if size >= 4:
        return (0.35, 0.55, 1.15, 2.0), 20
    return (0.4, 0.7, 1.15, 2.0), 30


def two_node_least_received(problem: PowerProblem, sinr_floor: float):
    """Closed-form least received powers for a two-member problem."""
    assert problem.size == 2
    c = sinr_floor
    w01 = problem.weights[0, 1]
    lower = np.maximum(problem.p_min_mw * problem.gains, problem.thresholds_mw)
    upper = problem.p_max_mw * problem.gains
    noise = problem.noise_mw
    q1 = max(lower[1], c * noise)
    q0 = max(lower[0], c * (w01 * q1 + noise))
    if problem.enforce_decode_order and q0 > q1:
        if c * w01 >= 1.0:
            return None
        z = max(lower[0], lower[1], c * noise / (1.0 - c * w01))
        q0 = q1 = z
    if q0 > upper[0] * (1 + 1e-12) or q1 > upper[1] * (1 + 1e-12):
        return None
    return np.array([q0, q1])


def make_problem(rng, size, enforce_decode_order=True, spread_db=18.0,
                 num_slots=3, bandwidth_hz=125e3):
    """Random structurally feasible per-channel instance."""
    from noma_lpwa import RadioProfile

    profile = RadioProfile()
    exponents = rng.uniform(0.0, spread_db / 10.0, size)
    gains = np.sort(10.0 ** (-(8.0 + exponents)))[::-1]
    slots = rng.integers(0, num_slots, size)
    times = profile.times_s[:num_slots][slots]
    w = np.minimum(times[:, None], times[None, :]) / times[:, None]
    w = np.where(slots[:, None] == slots[None, :], 1.0, w)
    np.fill_diagonal(w, 0.0)
    noise = profile.noise_mw
    thresholds = noise * 10.0 ** (rng.uniform(-20.0, -6.0, size) / 10.0)
    return PowerProblem(channel=0, members=np.arange(size), gains=gains,
                        thresholds_mw=thresholds, times_s=times, weights=w,
                        noise_mw=noise, bandwidth_hz=bandwidth_hz,
                        p_min_mw=profile.p_min_mw, p_max_mw=profile.p_max_mw,
                        enforce_decode_order=enforce_decode_order)
