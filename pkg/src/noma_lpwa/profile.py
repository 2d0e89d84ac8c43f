"""LoRa-style physical-layer constants.

A :class:`RadioProfile` bundles the bandwidth, spreading factors, payload
size, noise figure and power limits, and derives from them the quantities the
rest of the library consumes: noise variance, per-SF transmission times and
per-SF sensitivity thresholds. All power arithmetic is carried out in linear
milliwatts; dB only appears at I/O boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import ConfigurationError

THERMAL_NOISE_DBM_PER_HZ = -174.0

DEFAULT_SF_VALUES = (7, 8, 9, 10, 11, 12)

# Demodulation SNR floors of a typical SX1272/73-class receiver, per SF.
DEMOD_SNR_DB_BY_SF = {7: -7.5, 8: -10.0, 9: -12.5, 10: -15.0, 11: -17.5, 12: -20.0}

DEFAULT_DEMOD_SNR_DB = tuple(DEMOD_SNR_DB_BY_SF[sf] for sf in DEFAULT_SF_VALUES)


def dbm_to_mw(dbm):
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw):
    return 10.0 * np.log10(mw)


def noise_variance_mw(bandwidth_hz: float, noise_figure_db: float) -> float:
    """AWGN variance in mW: thermal floor over the bandwidth plus the noise figure.

    Computed as 10^((-174 + 10 log10 B + NF) / 10).
    """
    if bandwidth_hz <= 0:
        raise ConfigurationError(f"bandwidth must be positive, got {bandwidth_hz}")
    dbm = THERMAL_NOISE_DBM_PER_HZ + 10.0 * math.log10(bandwidth_hz) + noise_figure_db
    return dbm_to_mw(dbm)


def transmission_time_s(sf: int, payload_bits: float, bandwidth_hz: float) -> float:
    """Time on air of ``payload_bits`` at spreading factor ``sf``.

    Each symbol carries ``sf`` bits and lasts 2^sf / B seconds, so the total is
    (b / sf) * (2^sf / B). Fractional symbol counts are permitted.
    """
    if sf < 1:
        raise ConfigurationError(f"spreading factor must be >= 1, got {sf}")
    if payload_bits <= 0:
        raise ConfigurationError(f"payload must be positive, got {payload_bits}")
    if bandwidth_hz <= 0:
        raise ConfigurationError(f"bandwidth must be positive, got {bandwidth_hz}")
    return (payload_bits / sf) * (2.0 ** sf / bandwidth_hz)


def sensitivity_threshold_mw(noise_mw: float, demod_snr_db: float) -> float:
    """Minimum received power for demodulation: the noise floor shifted by the
    required SNR, evaluated in linear units."""
    if noise_mw <= 0:
        raise ConfigurationError(f"noise variance must be positive, got {noise_mw}")
    return noise_mw * 10.0 ** (demod_snr_db / 10.0)


@dataclass(frozen=True)
class RadioProfile:
    """Immutable physical-layer parameter set.

    ``sf_values`` and ``demod_snr_db`` are indexed by the transmission-time
    slot f = 0..F-1; with the defaults f maps to SF 7..12 so larger f means a
    longer time on air.
    """

    bandwidth_hz: float = 125e3
    sf_values: tuple[int, ...] = DEFAULT_SF_VALUES
    payload_bits: float = 70.0
    noise_figure_db: float = 6.0
    demod_snr_db: tuple[float, ...] = DEFAULT_DEMOD_SNR_DB
    p_min_mw: float = 1.0    # 0 dBm
    p_max_mw: float = 100.0  # 20 dBm

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ConfigurationError("bandwidth must be positive")
        if self.payload_bits <= 0:
            raise ConfigurationError("payload must be positive")
        if len(self.sf_values) == 0:
            raise ConfigurationError("at least one spreading factor is required")
        if len(self.sf_values) != len(self.demod_snr_db):
            raise ConfigurationError(
                f"{len(self.sf_values)} spreading factors but "
                f"{len(self.demod_snr_db)} demodulation SNR entries")
        if any(sf < 1 for sf in self.sf_values):
            raise ConfigurationError("spreading factors must be >= 1")
        if not 0 < self.p_min_mw <= self.p_max_mw:
            raise ConfigurationError(
                f"need 0 < p_min <= p_max, got {self.p_min_mw}, {self.p_max_mw}")

    @property
    def num_times(self) -> int:
        return len(self.sf_values)

    @cached_property
    def noise_mw(self) -> float:
        return noise_variance_mw(self.bandwidth_hz, self.noise_figure_db)

    @cached_property
    def times_s(self) -> np.ndarray:
        t = np.array([transmission_time_s(sf, self.payload_bits, self.bandwidth_hz)
                      for sf in self.sf_values])
        t.setflags(write=False)
        return t

    @cached_property
    def thresholds_mw(self) -> np.ndarray:
        th = np.array([sensitivity_threshold_mw(self.noise_mw, snr)
                       for snr in self.demod_snr_db])
        th.setflags(write=False)
        return th

    @classmethod
    def single_sf(cls, sf: int, **kwargs) -> "RadioProfile":
        """Profile with one spreading factor for everybody (single time slot)."""
        if sf not in DEMOD_SNR_DB_BY_SF:
            raise ConfigurationError(f"no default demodulation SNR for SF{sf}")
        return cls(sf_values=(sf,), demod_snr_db=(DEMOD_SNR_DB_BY_SF[sf],), **kwargs)
