"""SINR and rate evaluation under three receiver models.

``noma_sic``  - successive interference cancellation at the gateway: a node is
only interfered by same-channel nodes decoded after it (lower normalized
gain), cross-time interferers discounted by the collision factor.

``plain``     - no cancellation: every same-channel node interferes.

``oma``       - orthogonal baseline: each of the N nodes transmits alone in
its own slot, at 1/N of the bandwidth-time budget.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .allocation import Allocation
from .deployment import Deployment
from .profile import RadioProfile
from .validation import check_allocation, check_deployment, check_option, check_powers

RECEIVER_MODELS = ("noma_sic", "plain", "oma")


def collision_factor(t_desired_s: float, t_interferer_s: float) -> float:
    """Fraction of the desired node's airtime the interferer overlaps,
    min(T_f, T_i) / T_f, in (0, 1]."""
    if t_desired_s <= 0 or t_interferer_s <= 0:
        raise ValueError("transmission times must be positive")
    return min(t_desired_s, t_interferer_s) / t_desired_s


def interference_weights(times_s: np.ndarray, time_idx: np.ndarray) -> np.ndarray:
    """Pairwise weight matrix for one channel's members (victim row,
    interferer column): 1 inside a (channel, time) cluster, the collision
    factor across clusters, 0 on the diagonal."""
    t = np.asarray(times_s, dtype=float)[np.asarray(time_idx)]
    w = np.minimum(t[:, None], t[None, :]) / t[:, None]
    same = np.equal.outer(time_idx, time_idx)
    w = np.where(same, 1.0, w)
    np.fill_diagonal(w, 0.0)
    return w


def shannon_rate_bps(sinr, bandwidth_hz: float):
    """log2 capacity over the bandwidth; accepts scalars or arrays."""
    return bandwidth_hz * np.log2(1.0 + np.asarray(sinr, dtype=float))


@dataclass(frozen=True)
class RateReport:
    """Per-node SINR and rate under one receiver model."""

    model: str
    sinr: np.ndarray                 # (N,)
    rate_bps: np.ndarray             # (N,)
    min_rate_bps: float
    per_channel_min_bps: np.ndarray  # (K,) NaN for empty channels

    @property
    def mean_rate_bps(self) -> float:
        return float(self.rate_bps.mean())


def min_rate(report: RateReport) -> float:
    return report.min_rate_bps


def _sinr_one_channel(q: np.ndarray, weights: np.ndarray, noise_mw: float,
                      sic: bool) -> np.ndarray:
    """SINRs for one channel's members given received powers ``q`` in decode
    order. With SIC only later-decoded members (upper triangle) interfere."""
    w = np.triu(weights) if sic else weights
    return q / (w @ q + noise_mw)


def sinr_table(deployment: Deployment, allocation: Allocation, powers_mw,
               profile: RadioProfile, model: str) -> np.ndarray:
    """Per-node SINR vector for the ``noma_sic`` or ``plain`` model."""
    check_deployment(deployment)
    check_allocation(deployment, allocation, require_times=True)
    p = check_powers(deployment, powers_mw)
    check_option(model, "model", ("noma_sic", "plain"))
    sinr = np.empty(deployment.num_nodes)
    for k in range(allocation.num_channels):
        members = allocation.channel_order[k]
        if len(members) == 0:
            continue
        q = p[members] * deployment.gains[k, members]
        w = interference_weights(profile.times_s, allocation.time_of[members])
        sinr[members] = _sinr_one_channel(q, w, deployment.noise_mw,
                                          sic=(model == "noma_sic"))
    return sinr


def sinr_plain(node: int, powers_mw, allocation: Allocation,
               deployment: Deployment, profile: RadioProfile) -> float:
    return float(sinr_table(deployment, allocation, powers_mw, profile, "plain")[node])


def sinr_noma(node: int, powers_mw, allocation: Allocation,
              deployment: Deployment, profile: RadioProfile) -> float:
    return float(sinr_table(deployment, allocation, powers_mw, profile, "noma_sic")[node])


def _per_channel_min(rates: np.ndarray, allocation: Allocation) -> np.ndarray:
    out = np.full(allocation.num_channels, np.nan)
    for k in range(allocation.num_channels):
        members = allocation.channel_order[k]
        if len(members):
            out[k] = rates[members].min()
    return out


def rate_report(deployment: Deployment, allocation: Allocation, powers_mw,
                profile: RadioProfile, model: str = "noma_sic") -> RateReport:
    """Evaluate one receiver model over the whole network."""
    check_option(model, "model", RECEIVER_MODELS)
    if model == "oma":
        return oma_rate_report(deployment, profile, powers_mw, allocation)
    sinr = sinr_table(deployment, allocation, powers_mw, profile, model)
    rates = shannon_rate_bps(sinr, profile.bandwidth_hz)
    return RateReport(model=model, sinr=sinr, rate_bps=rates,
                      min_rate_bps=float(rates.min()),
                      per_channel_min_bps=_per_channel_min(rates, allocation))


def oma_rate_report(deployment: Deployment, profile: RadioProfile, powers_mw,
                    allocation: Allocation | None = None) -> RateReport:
    """Orthogonal baseline: interference-free, 1/N of the resource each.

    Uses each node's gain on its assigned channel when an allocation is
    given, channel 0 otherwise.
    """
    check_deployment(deployment)
    p = check_powers(deployment, powers_mw)
    n = deployment.num_nodes
    if allocation is not None:
        check_allocation(deployment, allocation)
        g = deployment.gains[allocation.channel_of, np.arange(n)]
    else:
        g = deployment.gains[0]
    sinr = p * g / deployment.noise_mw
    rates = shannon_rate_bps(sinr, profile.bandwidth_hz) / n
    if allocation is not None:
        per_channel = _per_channel_min(rates, allocation)
    else:
        per_channel = np.array([rates.min()])
    return RateReport(model="oma", sinr=sinr, rate_bps=rates,
                      min_rate_bps=float(rates.min()),
                      per_channel_min_bps=per_channel)
