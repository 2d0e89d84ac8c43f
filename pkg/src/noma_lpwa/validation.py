"""Input validation helpers shared by the estimators and the functional API."""

from __future__ import annotations

import numbers

import numpy as np

from .allocation import Allocation
from .deployment import Deployment


def as_generator(random_state=None) -> np.random.Generator:
    """Coerce None, an int seed or a Generator into a Generator."""
    if isinstance(random_state, np.random.Generator):
        return random_state
    if random_state is None or isinstance(random_state, numbers.Integral):
        return np.random.default_rng(random_state)
    raise TypeError(f"random_state must be None, an int or a numpy Generator, "
                    f"got {type(random_state).__name__}")


def check_option(value: str, name: str, options: tuple[str, ...]) -> str:
    if value not in options:
        raise ValueError(f"{name} must be one of {options}, got {value!r}")
    return value


def check_deployment(deployment) -> Deployment:
    if not isinstance(deployment, Deployment):
        raise TypeError(f"expected a Deployment, got {type(deployment).__name__}")
    return deployment


def check_allocation(deployment: Deployment, allocation,
                     require_times: bool = False) -> Allocation:
    """Verify the allocation partitions exactly the deployment's nodes."""
    if not isinstance(allocation, Allocation):
        raise TypeError(f"expected an Allocation, got {type(allocation).__name__}")
    if allocation.num_nodes != deployment.num_nodes:
        raise ValueError(f"allocation covers {allocation.num_nodes} nodes, "
                         f"deployment has {deployment.num_nodes}")
    if allocation.num_channels > deployment.num_channels:
        raise ValueError("allocation uses more channels than the deployment has")
    if np.any((allocation.channel_of < 0) |
              (allocation.channel_of >= allocation.num_channels)):
        raise ValueError("channel index out of range")
    ordered = np.concatenate(allocation.channel_order) if allocation.channel_order else np.array([])
    if len(ordered) != allocation.num_nodes or len(np.unique(ordered)) != allocation.num_nodes:
        raise ValueError("channel_order does not partition the nodes")
    if require_times:
        if not allocation.has_times:
            raise ValueError("allocation has no time indices yet")
        if np.any((allocation.time_of < 0) | (allocation.time_of >= allocation.num_times)):
            raise ValueError("time index out of range")
    return allocation


def check_powers(deployment: Deployment, powers_mw) -> np.ndarray:
    p = np.asarray(powers_mw, dtype=float)
    if p.shape != (deployment.num_nodes,):
        raise ValueError(f"powers must have shape ({deployment.num_nodes},), "
                         f"got {p.shape}")
    if np.any(p < 0):
        raise ValueError("powers must be non-negative")
    return p
