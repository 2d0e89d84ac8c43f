"""Max-min rate power control per channel.

The outer loop bisects on the common rate target tau; the inner problem asks
for transmit powers meeting, for every member of the channel,

* the power box            p_min <= p <= p_max,
* the sensitivity floor    p g >= theta_f,
* the decode-order chain   p_n g_n >= p_{n-1} g_{n-1}  (optional),
* the rate floor           p g >= c (I_sic + sigma^2),  c = 2^(tau/B) - 1,

where I_sic sums the received powers of same-channel members decoded later,
cross-time terms discounted by the collision factor. Everything is expressed
in received powers q = p g, in which the system is monotone: the least
solution exists whenever any solution does, and bisection on tau against that
least solution realizes the max-min optimum.

The inner solve is exact and finite. Without the decode-order chain the rate
floors only reference later-decoded members, so one backward pass computes
the least solution outright. With the chain, q must additionally be
non-decreasing in decode order; the least such vector is found by a backward
scan that pools adjacent members into constant-value blocks whenever the
chain would otherwise be violated (the same pooling idea as isotonic
regression, with the block value solved in closed form). A block is
infeasible outright when c times its internal interference weight reaches 1,
because the chain forces every in-block interferer's power at least as high
as the victim's.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .allocation import Allocation
from .deployment import Deployment
from .exceptions import StructurallyInfeasibleError
from .interference import interference_weights
from .profile import RadioProfile
from .validation import check_allocation, check_deployment

_REL_TOL = 1e-12  # slack on received-power caps, absorbs roundoff only


@dataclass(frozen=True)
class PowerProblem:
    """One channel's power-control instance, members in decode order."""

    channel: int
    members: np.ndarray        # node ids, descending normalized gain
    gains: np.ndarray          # (m,) linear gain on this channel
    thresholds_mw: np.ndarray  # (m,) sensitivity floor per member's time slot
    times_s: np.ndarray        # (m,)
    weights: np.ndarray        # (m, m) collision-scaled interference weights
    noise_mw: float
    bandwidth_hz: float
    p_min_mw: float
    p_max_mw: float
    epsilon: float = 1e-6      # bisection tolerance, bits/second
    enforce_decode_order: bool = True

    def __post_init__(self):
        if self.size == 0:
            raise ValueError("a power problem needs at least one member")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")

    @property
    def size(self) -> int:
        return self.members.shape[0]

    @classmethod
    def from_network(cls, deployment: Deployment, allocation: Allocation,
                     profile: RadioProfile, channel: int, epsilon: float = 1e-6,
                     enforce_decode_order: bool = True) -> "PowerProblem":
        check_deployment(deployment)
        check_allocation(deployment, allocation, require_times=True)
        members = allocation.channel_order[channel]
        time_idx = allocation.time_of[members]
        return cls(channel=channel,
                   members=members,
                   gains=deployment.gains[channel, members],
                   thresholds_mw=profile.thresholds_mw[time_idx],
                   times_s=profile.times_s[time_idx],
                   weights=interference_weights(profile.times_s, time_idx),
                   noise_mw=deployment.noise_mw,
                   bandwidth_hz=profile.bandwidth_hz,
                   p_min_mw=profile.p_min_mw,
                   p_max_mw=profile.p_max_mw,
                   epsilon=epsilon,
                   enforce_decode_order=enforce_decode_order)


@dataclass(frozen=True)
class PowerSolution:
    """Outcome of the bisection: powers in member order plus probe history."""

    powers_mw: np.ndarray
    tau_star_bps: float
    iterations: int
    probes: tuple[tuple[float, bool], ...]


def received_lower_bounds(problem: PowerProblem) -> np.ndarray:
    """Rate-independent floors on received power: power box and sensitivity."""
    return np.maximum(problem.p_min_mw * problem.gains, problem.thresholds_mw)


def received_upper_bounds(problem: PowerProblem) -> np.ndarray:
    return problem.p_max_mw * problem.gains


def sinr_floor(problem: PowerProblem, tau_bps: float) -> float:
    """SINR every member must reach for a per-node rate of ``tau_bps``."""
    return float(np.exp2(np.float64(tau_bps) / problem.bandwidth_hz) - 1.0)


def _block_value(c: float, weights: np.ndarray, lower: np.ndarray,
                 lo: int, hi: int, noise_mw: float,
                 q_right: np.ndarray) -> float:
    """Least common received power for members lo..hi held equal.

    Each member a needs z >= c (w_in(a) z + K_a) with w_in its interference
    weight into the block's own tail and K_a the fixed contribution of
    finalized members beyond hi plus noise. Returns inf when some member's
    in-block weight makes the requirement unsatisfiable at any power.
    """
    z = 0.0
    for a in range(lo, hi + 1):
        w_in = weights[a, a + 1:hi + 1].sum()
        k_a = weights[a, hi + 1:] @ q_right[hi + 1:] + noise_mw
        denom = 1.0 - c * w_in
        if denom <= 0.0:
            return np.inf
        z = max(z, lower[a], c * k_a / denom)
    return z


def least_received_powers(problem: PowerProblem, c: float) -> np.ndarray | None:
    """Componentwise-minimal received powers at SINR floor ``c``,
    or None when the caps cannot be met."""
    m = problem.size
    lower = received_lower_bounds(problem)
    upper = received_upper_bounds(problem)
    if np.any(lower > upper * (1.0 + _REL_TOL)):
        return None
    w = problem.weights
    q = np.zeros(m)
    if not problem.enforce_decode_order:
        for i in range(m - 1, -1, -1):
            q[i] = max(lower[i], c * (w[i, i + 1:] @ q[i + 1:] + problem.noise_mw))
        return q if np.all(q <= upper * (1.0 + _REL_TOL)) else None

    # Backward scan with adjacent-block pooling; blocks[-1] is the leftmost
    # finalized block. Merging can only raise a block, so pooled violations
    # cascade rightward through the stack.
    blocks: list[list] = []  # [lo, hi, value]
    for i in range(m - 1, -1, -1):
        lo = hi = i
        z = _block_value(c, w, lower, lo, hi, problem.noise_mw, q)
        while blocks and z > blocks[-1][2]:
            _, hi, _ = blocks.pop()
            z = _block_value(c, w, lower, lo, hi, problem.noise_mw, q)
        if not np.isfinite(z):
            return None
        blocks.append([lo, hi, z])
        q[lo:hi + 1] = z
    return q if np.all(q <= upper * (1.0 + _REL_TOL)) else None


def feasibility_solve(problem: PowerProblem, tau_bps: float) -> np.ndarray | None:
    """Least-power transmit vector achieving rate ``tau_bps`` for every
    member, or None when ``tau_bps`` is out of reach."""
    if tau_bps < 0:
        raise ValueError("rate target must be non-negative")
    q = least_received_powers(problem, sinr_floor(problem, tau_bps))
    if q is None:
        return None
    return np.clip(q / problem.gains, problem.p_min_mw, problem.p_max_mw)


def tau_upper_bound(problem: PowerProblem) -> float:
    """Rate of the best member alone at full power; no member can beat it."""
    best = problem.p_max_mw * problem.gains.max()
    return problem.bandwidth_hz * float(np.log2(1.0 + best / problem.noise_mw))


def _structural_diagnosis(problem: PowerProblem) -> str:
    lower = received_lower_bounds(problem)
    upper = received_upper_bounds(problem)
    box = problem.members[lower > upper]
    parts = [f"channel {problem.channel}: no power vector satisfies the "
             f"constraints even at a zero rate target"]
    if len(box):
        parts.append(f"sensitivity exceeds the power box for nodes {box.tolist()}")
    if problem.enforce_decode_order:
        chain = problem.members[np.maximum.accumulate(lower) > upper]
        chain = np.setdiff1d(chain, box)
        if len(chain):
            parts.append("decode-order chain exceeds the received-power cap "
                         f"for nodes {chain.tolist()}")
    return "; ".join(parts)


def maximize_min_rate(problem: PowerProblem) -> PowerSolution:
    """Bisection on the common rate target against the least-power solve.

    Raises :class:`StructurallyInfeasibleError` when even tau = 0 cannot be
    met. Otherwise returns the last feasible powers and tau_star, with
    tau_upper - tau_star < epsilon at exit.
    """
    p0 = feasibility_solve(problem, 0.0)
    if p0 is None:
        raise StructurallyInfeasibleError(_structural_diagnosis(problem),
                                          channel=problem.channel,
                                          nodes=tuple(problem.members.tolist()))
    tau_l, tau_u = 0.0, tau_upper_bound(problem)
    best = p0
    probes: list[tuple[float, bool]] = [(0.0, True)]
    iterations = 0
    while tau_u - tau_l >= problem.epsilon and iterations < 200:
        iterations += 1
        tau = 0.5 * (tau_u + tau_l)
        p = feasibility_solve(problem, tau)
        probes.append((tau, p is not None))
        if p is not None:
            best, tau_l = p, tau
        else:
            tau_u = tau
    return PowerSolution(powers_mw=best, tau_star_bps=tau_l,
                         iterations=iterations, probes=tuple(probes))


def constraint_slacks(problem: PowerProblem, powers_mw: np.ndarray,
                      tau_bps: float = 0.0) -> dict[str, np.ndarray]:
    """Signed slacks of every constraint at the given powers (>= 0 means
    satisfied); handy for verification and scaling checks."""
    p = np.asarray(powers_mw, dtype=float)
    q = p * problem.gains
    c = sinr_floor(problem, tau_bps)
    upper_tri = np.triu(problem.weights)
    slacks = {
        "box_lower": p - problem.p_min_mw,
        "box_upper": problem.p_max_mw - p,
        "sensitivity": q - problem.thresholds_mw,
        "rate": q - c * (upper_tri @ q + problem.noise_mw),
    }
    if problem.size > 1:
        slacks["decode_order"] = q[1:] - q[:-1]
    else:
        slacks["decode_order"] = np.array([])
    return slacks


class MaxMinPowerAllocator(BaseEstimator):
    """Estimator running the per-channel max-min solve over a whole network.

    ``fit(deployment, allocation)`` fills ``powers_`` (mW per node). Channels
    whose constraints conflict at every rate target are handled per
    ``on_infeasible``: ``"raise"`` propagates the diagnostic, ``"max_power"``
    pins the channel's nodes at p_max and records it in
    ``infeasible_channels_``.
    """

    def __init__(self, profile: RadioProfile | None = None, epsilon: float = 1e-6,
                 enforce_decode_order: bool = True, on_infeasible: str = "raise"):
        self.profile = profile
        self.epsilon = epsilon
        self.enforce_decode_order = enforce_decode_order
        self.on_infeasible = on_infeasible

    def fit(self, deployment: Deployment, allocation: Allocation) -> "MaxMinPowerAllocator":
        if self.on_infeasible not in ("raise", "max_power"):
            raise ValueError(f"on_infeasible must be 'raise' or 'max_power', "
                             f"got {self.on_infeasible!r}")
        profile = self.profile if self.profile is not None else RadioProfile()
        check_deployment(deployment)
        check_allocation(deployment, allocation, require_times=True)
        powers = np.full(deployment.num_nodes, profile.p_max_mw)
        solutions: dict[int, PowerSolution] = {}
        infeasible: list[int] = []
        for k in range(allocation.num_channels):
            members = allocation.channel_order[k]
            if len(members) == 0:
                continue
            problem = PowerProblem.from_network(
                deployment, allocation, profile, k, epsilon=self.epsilon,
                enforce_decode_order=self.enforce_decode_order)
            try:
                solution = maximize_min_rate(problem)
            except StructurallyInfeasibleError:
                if self.on_infeasible == "raise":
                    raise
                infeasible.append(k)
                continue
            solutions[k] = solution
            powers[members] = solution.powers_mw
        self.powers_ = powers
        self.solutions_ = solutions
        self.infeasible_channels_ = tuple(infeasible)
        self.tau_star_ = {k: s.tau_star_bps for k, s in solutions.items()}
        return self
