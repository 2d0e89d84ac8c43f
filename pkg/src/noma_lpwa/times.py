"""Transmission-time (spreading-factor) assignment within each channel.

Four strategies over the decode order established by the channel stage:

* ``unfair``   - equal group sizes, longest time at the strong head.
* ``fair``     - group sizes proportional to 1/T_f so every time slot carries
  the same aggregate airtime, longest time still at the head.
* ``random``   - uniform independent choice per node.
* ``distance`` - annulus of the node's distance picks the slot.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .allocation import Allocation
from .deployment import Deployment
from .profile import RadioProfile
from .validation import (as_generator, check_allocation, check_deployment,
                         check_option)

TIME_STRATEGIES = ("unfair", "fair", "random", "distance")


def unfair_group_sizes(n_nodes: int, num_times: int) -> np.ndarray:
    """Balanced split of ``n_nodes`` over ``num_times`` groups, the remainder
    going one each to the lowest time indices."""
    base, extra = divmod(n_nodes, num_times)
    return base + (np.arange(num_times) < extra).astype(int)


def fair_targets(n_nodes: int, times_s: np.ndarray) -> np.ndarray:
    """Real-valued group sizes proportional to 1/T_f; the products
    target_f * T_f are equal across f by construction."""
    times_s = np.asarray(times_s, dtype=float)
    return (n_nodes / times_s) / np.sum(1.0 / times_s)


def fair_group_sizes(n_nodes: int, times_s: np.ndarray) -> tuple[np.ndarray, bool]:
    """Integer repair of :func:`fair_targets` so the sizes sum to ``n_nodes``.

    Half-up rounding first; a positive deficit is paid by incrementing the
    entries with the largest fractional parts, a negative one by decrementing
    entries whose fraction exceeds one half. Returns the sizes and a flag set
    when the literal repair could not settle the total and the greedy
    fallback (fractions nearest 0.5, decrementing first) ran.
    """
    x = fair_targets(n_nodes, times_s)
    sizes = np.floor(x + 0.5).astype(int)
    frac = x - np.floor(x)
    f_order = np.arange(len(x))
    deficit = n_nodes - int(sizes.sum())
    fallback = False
    if deficit > 0:
        take = np.lexsort((f_order, -frac))[:deficit]
        sizes[take] += 1
    elif deficit < 0:
        eligible = [f for f in np.lexsort((f_order, -frac)) if frac[f] > 0.5]
        take = eligible[:-deficit]
        sizes[np.asarray(take, dtype=int)] -= 1
        if len(take) < -deficit:
            fallback = True
            remaining = -deficit - len(take)
            by_half = np.lexsort((f_order, np.abs(frac - 0.5)))
            for f in by_half:
                if remaining == 0:
                    break
                while sizes[f] > 0 and remaining > 0:
                    sizes[f] -= 1
                    remaining -= 1
    return sizes, fallback


def _walk_assign(time_of: np.ndarray, order: np.ndarray, sizes: np.ndarray,
                 slots_head_first: range) -> None:
    """Write time indices over ``order`` head to tail, ``sizes[f]`` nodes per
    slot, visiting slots in ``slots_head_first`` order."""
    pos = 0
    for f in slots_head_first:
        time_of[order[pos:pos + sizes[f]]] = f
        pos += sizes[f]


def allocate_time_unfair(allocation: Allocation, profile: RadioProfile) -> Allocation:
    """Equal-size groups; the strongest nodes take the longest time on air, so
    every node's interferers collide for at most its own transmission time."""
    num_times = profile.num_times
    time_of = np.full(allocation.num_nodes, -1, dtype=int)
    for order in allocation.channel_order:
        sizes = unfair_group_sizes(len(order), num_times)
        _walk_assign(time_of, order, sizes, range(num_times - 1, -1, -1))
    return allocation.with_times(time_of, num_times)


def allocate_time_fair(allocation: Allocation, profile: RadioProfile) -> Allocation:
    """Airtime-balanced group sizes, walked like the unfair scheme."""
    num_times = profile.num_times
    time_of = np.full(allocation.num_nodes, -1, dtype=int)
    fallback = False
    for order in allocation.channel_order:
        if len(order) == 0:
            continue
        sizes, used_fallback = fair_group_sizes(len(order), profile.times_s)
        fallback = fallback or used_fallback
        _walk_assign(time_of, order, sizes, range(num_times - 1, -1, -1))
    return allocation.with_times(time_of, num_times, fair_rounding_fallback=fallback)


def allocate_time_random(allocation: Allocation, profile: RadioProfile,
                         rng=None) -> Allocation:
    rng = as_generator(rng)
    time_of = rng.integers(0, profile.num_times, size=allocation.num_nodes)
    return allocation.with_times(time_of, profile.num_times)


def allocate_time_distance(allocation: Allocation, deployment: Deployment,
                           profile: RadioProfile) -> Allocation:
    """Node at distance d gets the unique slot f with
    (f-1) r/F < d <= f r/F (1-based f)."""
    num_times = profile.num_times
    bounds = np.arange(1, num_times + 1) * (deployment.radius_m / num_times)
    bounds[-1] = deployment.radius_m
    if np.any(deployment.distances_m > deployment.radius_m):
        raise ValueError("node beyond the deployment radius cannot be assigned a slot")
    time_of = np.searchsorted(bounds, deployment.distances_m, side="left")
    return allocation.with_times(time_of.astype(int), num_times)


class TimeAllocator(BaseEstimator):
    """Estimator stage assigning a transmission-time slot to every node.

    ``fit(deployment, allocation)`` consumes the channel stage's output and
    exposes ``allocation_`` (times filled in) and ``labels_`` (slot per node).
    """

    def __init__(self, profile: RadioProfile | None = None, strategy: str = "unfair",
                 random_state=None):
        self.profile = profile
        self.strategy = strategy
        self.random_state = random_state

    def _profile(self) -> RadioProfile:
        return self.profile if self.profile is not None else RadioProfile()

    def fit(self, deployment: Deployment, allocation: Allocation) -> "TimeAllocator":
        check_deployment(deployment)
        check_allocation(deployment, allocation)
        check_option(self.strategy, "strategy", TIME_STRATEGIES)
        profile = self._profile()
        if self.strategy == "unfair":
            alloc = allocate_time_unfair(allocation, profile)
        elif self.strategy == "fair":
            alloc = allocate_time_fair(allocation, profile)
        elif self.strategy == "random":
            alloc = allocate_time_random(allocation, profile,
                                         as_generator(self.random_state))
        else:
            alloc = allocate_time_distance(allocation, deployment, profile)
        self.allocation_ = alloc
        self.labels_ = alloc.time_of
        return self

    def fit_predict(self, deployment: Deployment, allocation: Allocation) -> np.ndarray:
        return self.fit(deployment, allocation).labels_
