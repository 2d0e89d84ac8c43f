"""Random LPWA deployments: node distances, fading and channel gains.

The generator plays the role sklearn's ``datasets`` helpers play: given a
:class:`NetworkConfig` and a :class:`RadioProfile` it produces an immutable
:class:`Deployment` that every downstream estimator consumes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .profile import RadioProfile

FADING_MODES = ("shared", "per_channel")


@dataclass(frozen=True)
class NetworkConfig:
    """Geometry and channel-model parameters of one random deployment.

    ``fading_mode="shared"`` draws one unit-mean exponential power gain per
    node, common to all channels, so a node's normalized gain ordering is the
    same on every channel. ``"per_channel"`` draws independently per
    (channel, node) pair.
    """

    node_count: int
    radius_m: float = 1000.0
    channel_count: int = 8
    time_slot_count: int = 6
    path_loss_exponent: float = 3.5
    path_loss_constant: float = 1.0
    rng_seed: int = 0
    fading_mode: str = "shared"
    min_distance_m: float = 1.0

    def __post_init__(self):
        if self.node_count < 1:
            raise ConfigurationError(f"node_count must be >= 1, got {self.node_count}")
        if self.channel_count < 1:
            raise ConfigurationError(f"channel_count must be >= 1, got {self.channel_count}")
        if self.time_slot_count < 1:
            raise ConfigurationError(f"time_slot_count must be >= 1, got {self.time_slot_count}")
        if self.radius_m <= 0:
            raise ConfigurationError(f"radius_m must be positive, got {self.radius_m}")
        if self.path_loss_constant <= 0:
            raise ConfigurationError("path_loss_constant must be positive")
        if not 0 < self.min_distance_m <= self.radius_m:
            raise ConfigurationError("min_distance_m must lie in (0, radius_m]")
        if self.fading_mode not in FADING_MODES:
            raise ConfigurationError(
                f"fading_mode must be one of {FADING_MODES}, got {self.fading_mode!r}")
        if not 3.0 <= self.path_loss_exponent <= 5.0:
            warnings.warn(
                f"path loss exponent {self.path_loss_exponent} outside the "
                "usual shadowed-urban range [3, 5]", UserWarning, stacklevel=2)


@dataclass(frozen=True)
class Deployment:
    """One realized network instance, immutable after creation.

    ``gains[k, n]`` is the linear power gain of node n on channel k;
    ``norm_gains`` is the same divided by the noise variance.
    """

    distances_m: np.ndarray     # (N,)
    fading: np.ndarray          # (K, N) unit-mean exponential draws
    gains: np.ndarray           # (K, N)
    norm_gains: np.ndarray      # (K, N), units 1/mW
    radius_m: float
    noise_mw: float

    def __post_init__(self):
        for arr in (self.distances_m, self.fading, self.gains, self.norm_gains):
            arr.setflags(write=False)

    @property
    def num_nodes(self) -> int:
        return self.distances_m.shape[0]

    @property
    def num_channels(self) -> int:
        return self.gains.shape[0]


def channel_gains(distances_m: np.ndarray, fading: np.ndarray,
                  path_loss_constant: float, path_loss_exponent: float) -> np.ndarray:
    """Linear power gains eta * h * d^-beta, broadcast over (K, N) fading."""
    d = np.asarray(distances_m, dtype=float)
    if np.any(d <= 0):
        raise ConfigurationError("distances must be positive")
    return path_loss_constant * np.asarray(fading, dtype=float) * d ** (-path_loss_exponent)


def generate_deployment(config: NetworkConfig, profile: RadioProfile) -> Deployment:
    """Draw a deployment: distances area-uniform on the disc, then fading.

    Pure function of (config, profile): the same seed reproduces the arrays
    bit for bit. The draw order (distances first, fading second) is part of
    that contract. Distances are clamped below at ``config.min_distance_m`` to
    keep the path-loss law finite at the origin.
    """
    rng = np.random.default_rng(np.random.SeedSequence(config.rng_seed))
    n, k = config.node_count, config.channel_count
    distances = config.radius_m * np.sqrt(rng.random(n))
    distances = np.clip(distances, config.min_distance_m, config.radius_m)
    if config.fading_mode == "shared":
        fading = np.broadcast_to(rng.exponential(1.0, size=n), (k, n)).copy()
    else:
        fading = rng.exponential(1.0, size=(k, n))
    gains = channel_gains(distances, fading,
                          config.path_loss_constant, config.path_loss_exponent)
    noise = profile.noise_mw
    if noise <= 0:
        raise ConfigurationError("profile noise variance must be positive")
    return Deployment(distances_m=distances, fading=fading, gains=gains,
                      norm_gains=gains / noise, radius_m=config.radius_m,
                      noise_mw=noise)


def normalized_gain(deployment: Deployment, channel: int, node: int) -> float:
    """Gain over noise for one (channel, node) pair."""
    if not 0 <= channel < deployment.num_channels:
        raise IndexError(f"channel {channel} out of range [0, {deployment.num_channels})")
    if not 0 <= node < deployment.num_nodes:
        raise IndexError(f"node {node} out of range [0, {deployment.num_nodes})")
    return float(deployment.norm_gains[channel, node])


def spawn_seed(base_seed: int, *key: int) -> int:
    """Derive a disjoint child seed for a trial, stable under parallelism."""
    ss = np.random.SeedSequence(base_seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, np.uint64)[0])
