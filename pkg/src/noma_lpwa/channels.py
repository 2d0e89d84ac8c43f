"""Channel assignment: gain-sorted round robin and the random baseline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .allocation import Allocation, new_channel_allocation
from .deployment import Deployment
from .validation import as_generator, check_deployment, check_option

RANK_POLICIES = ("mean", "channel-0")
CHANNEL_STRATEGIES = ("roundrobin", "random")


def rank_statistic(deployment: Deployment, rank_by: str = "mean") -> np.ndarray:
    """Per-node scalar used to sort nodes before channels exist."""
    check_option(rank_by, "rank_by", RANK_POLICIES)
    if rank_by == "mean":
        return deployment.norm_gains.mean(axis=0)
    return deployment.norm_gains[0]


def _resolve_num_channels(deployment: Deployment, num_channels: int | None) -> int:
    k = deployment.num_channels if num_channels is None else num_channels
    if not 1 <= k <= deployment.num_channels:
        raise ValueError(
            f"num_channels must be in [1, {deployment.num_channels}], got {k}")
    return k


def allocate_channels_roundrobin(deployment: Deployment, num_channels: int | None = None,
                                 rank_by: str = "mean") -> Allocation:
    """Deal gain-sorted nodes over the channels.

    Nodes are sorted by descending rank statistic and the node of rank m goes
    to channel m mod K, so channel k collects ranks k, k+K, k+2K, ... and the
    per-channel gain spacing is maximal by construction. The first N mod K
    channels end up one node larger than the rest.
    """
    check_deployment(deployment)
    k = _resolve_num_channels(deployment, num_channels)
    stat = rank_statistic(deployment, rank_by)
    order = np.lexsort((np.arange(deployment.num_nodes), -stat))
    channel_of = np.empty(deployment.num_nodes, dtype=int)
    channel_of[order] = np.arange(deployment.num_nodes) % k
    return new_channel_allocation(deployment, channel_of, k)


def allocate_channels_random(deployment: Deployment, num_channels: int | None = None,
                             rng=None) -> Allocation:
    """Uniform random channel per node (baseline)."""
    check_deployment(deployment)
    k = _resolve_num_channels(deployment, num_channels)
    rng = as_generator(rng)
    channel_of = rng.integers(0, k, size=deployment.num_nodes)
    return new_channel_allocation(deployment, channel_of, k)


class ChannelAllocator(BaseEstimator):
    """Clusterer-style estimator assigning every node to a channel.

    After ``fit(deployment)`` the assignment is available as ``labels_`` (one
    channel index per node) and as the richer ``allocation_``.

    Parameters
    ----------
    strategy : {"roundrobin", "random"}
    rank_by : {"mean", "channel-0"}
        Sort statistic for the round-robin deal.
    num_channels : int or None
        Use the deployment's channel count when None.
    random_state : int, Generator or None
        Only consumed by the random strategy.
    """

    def __init__(self, strategy: str = "roundrobin", rank_by: str = "mean",
                 num_channels: int | None = None, random_state=None):
        self.strategy = strategy
        self.rank_by = rank_by
        self.num_channels = num_channels
        self.random_state = random_state

    def fit(self, deployment: Deployment, y=None) -> "ChannelAllocator":
        check_option(self.strategy, "strategy", CHANNEL_STRATEGIES)
        if self.strategy == "roundrobin":
            alloc = allocate_channels_roundrobin(deployment, self.num_channels,
                                                 self.rank_by)
        else:
            alloc = allocate_channels_random(deployment, self.num_channels,
                                             as_generator(self.random_state))
        self.allocation_ = alloc
        self.labels_ = alloc.channel_of
        return self

    def fit_predict(self, deployment: Deployment, y=None) -> np.ndarray:
        return self.fit(deployment).labels_

    def predict(self, deployment: Deployment) -> np.ndarray:
        if not hasattr(self, "labels_"):
            raise NotFittedError("ChannelAllocator is not fitted yet")
        return self.labels_
