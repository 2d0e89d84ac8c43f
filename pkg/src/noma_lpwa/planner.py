"""End-to-end resource allocation: channels, then times, then powers."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .channels import ChannelAllocator
from .deployment import Deployment
from .interference import RateReport, rate_report
from .power import MaxMinPowerAllocator
from .profile import RadioProfile
from .times import TimeAllocator
from .validation import as_generator, check_option

POWER_STRATEGIES = ("max_power", "optimal")


class ResourceAllocator(BaseEstimator):
    """One strategy combination, fit on a deployment.

    Chains :class:`ChannelAllocator`, :class:`TimeAllocator` and, for the
    optimal power strategy, :class:`MaxMinPowerAllocator`. ``max_power`` pins
    every node at p_max. After ``fit``: ``allocation_``, ``powers_``,
    ``infeasible_channels_``, ``tau_star_``.
    """

    def __init__(self, profile: RadioProfile | None = None,
                 channel_strategy: str = "roundrobin",
                 time_strategy: str = "unfair",
                 power_strategy: str = "max_power",
                 rank_by: str = "mean", epsilon: float = 1e-6,
                 enforce_decode_order: bool = True,
                 on_infeasible: str = "max_power", random_state=None):
        self.profile = profile
        self.channel_strategy = channel_strategy
        self.time_strategy = time_strategy
        self.power_strategy = power_strategy
        self.rank_by = rank_by
        self.epsilon = epsilon
        self.enforce_decode_order = enforce_decode_order
        self.on_infeasible = on_infeasible
        self.random_state = random_state

    def fit(self, deployment: Deployment, y=None) -> "ResourceAllocator":
        check_option(self.power_strategy, "power_strategy", POWER_STRATEGIES)
        profile = self.profile if self.profile is not None else RadioProfile()
        rng = as_generator(self.random_state)
        channels = ChannelAllocator(strategy=self.channel_strategy,
                                    rank_by=self.rank_by, random_state=rng)
        times = TimeAllocator(profile=profile, strategy=self.time_strategy,
                              random_state=rng)
        times.fit(deployment, channels.fit(deployment).allocation_)
        alloc = times.allocation_
        if self.power_strategy == "optimal":
            power = MaxMinPowerAllocator(profile=profile, epsilon=self.epsilon,
                                         enforce_decode_order=self.enforce_decode_order,
                                         on_infeasible=self.on_infeasible)
            power.fit(deployment, alloc)
            powers = power.powers_
            infeasible = power.infeasible_channels_
            tau = power.tau_star_
        else:
            powers = np.full(deployment.num_nodes, profile.p_max_mw)
            infeasible = ()
            tau = {}
        self.profile_ = profile
        self.allocation_ = alloc
        self.powers_ = powers
        self.infeasible_channels_ = infeasible
        self.tau_star_ = tau
        return self

    def evaluate(self, deployment: Deployment, model: str = "noma_sic") -> RateReport:
        """Rate report for one receiver model at the fitted powers."""
        return rate_report(deployment, self.allocation_, self.powers_,
                           self.profile_, model)

    def score(self, deployment: Deployment, y=None) -> float:
        """Minimum rate under SIC; the quantity the pipeline maximizes."""
        return self.evaluate(deployment, "noma_sic").min_rate_bps
