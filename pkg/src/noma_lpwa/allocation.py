"""Resource-block assignment state shared by the allocation stages."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .deployment import Deployment

UNASSIGNED = -1


@dataclass(frozen=True)
class Allocation:
    """Node-to-channel and node-to-time assignment plus decode ordering.

    ``channel_order[k]`` lists channel k's members sorted by descending
    normalized gain on channel k (ties broken by ascending node id); this is
    the successive-decoding order used everywhere downstream. ``time_of`` is
    ``UNASSIGNED`` until a time-allocation stage has run.
    """

    channel_of: np.ndarray                 # (N,) int
    time_of: np.ndarray                    # (N,) int, UNASSIGNED where unset
    channel_order: tuple[np.ndarray, ...]  # per channel, node ids
    num_channels: int
    num_times: int
    fair_rounding_fallback: bool = False

    def __post_init__(self):
        self.channel_of.setflags(write=False)
        self.time_of.setflags(write=False)
        for order in self.channel_order:
            order.setflags(write=False)

    @property
    def num_nodes(self) -> int:
        return self.channel_of.shape[0]

    @property
    def has_times(self) -> bool:
        return bool(np.all(self.time_of != UNASSIGNED))

    @property
    def channel_counts(self) -> np.ndarray:
        """Nodes per channel, length ``num_channels``."""
        return np.bincount(self.channel_of, minlength=self.num_channels)

    @property
    def time_counts(self) -> np.ndarray:
        """Nodes per (channel, time) cluster, shape (K, F)."""
        if not self.has_times:
            raise ValueError("time indices are not assigned yet")
        flat = self.channel_of * self.num_times + self.time_of
        counts = np.bincount(flat, minlength=self.num_channels * self.num_times)
        return counts.reshape(self.num_channels, self.num_times)

    def members(self, channel: int) -> np.ndarray:
        return self.channel_order[channel]

    def cluster(self, channel: int, time_index: int) -> np.ndarray:
        """Members of one (channel, time) cluster, in decode order."""
        order = self.channel_order[channel]
        return order[self.time_of[order] == time_index]

    def with_times(self, time_of: np.ndarray, num_times: int,
                   fair_rounding_fallback: bool = False) -> "Allocation":
        return replace(self, time_of=time_of, num_times=num_times,
                       fair_rounding_fallback=fair_rounding_fallback)


def build_channel_order(deployment: Deployment, channel_of: np.ndarray,
                        num_channels: int) -> tuple[np.ndarray, ...]:
    """Per-channel member lists sorted by descending assigned-channel gain,
    node id breaking ties."""
    orders = []
    node_ids = np.arange(deployment.num_nodes)
    for k in range(num_channels):
        members = node_ids[channel_of == k]
        gamma = deployment.norm_gains[k, members]
        orders.append(members[np.lexsort((members, -gamma))])
    return tuple(orders)


def new_channel_allocation(deployment: Deployment, channel_of: np.ndarray,
                           num_channels: int) -> Allocation:
    time_of = np.full(deployment.num_nodes, UNASSIGNED, dtype=int)
    return Allocation(channel_of=channel_of.astype(int), time_of=time_of,
                      channel_order=build_channel_order(deployment, channel_of, num_channels),
                      num_channels=num_channels, num_times=0)
