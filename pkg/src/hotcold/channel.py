"""Log-distance path-loss channel with log-normal shadowing.

The receiver-side signal indicator is

    rssi = tx_power + tx_gain + rx_gain - PL(d)
    PL(d) = 10*n*log10(d) + 20*log10(f) + 20*log10(4*pi/c) + X

with the frequency term anchored at the 1 m Friis reference and X a zero-mean
Gaussian shadowing sample in dB. All logarithms are base 10.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Vec2, distance

SPEED_OF_LIGHT_M_S = 299_792_458.0

# The loss formula diverges as d -> 0; ranges below this are clamped. Far
# below the operating halt distance, so field behavior is unaffected.
MIN_DISTANCE_M = 0.1


@dataclass(frozen=True)
class ChannelParams:
    """Link parameters of the target transmitter / robot receiver pair."""

    tx_power_dbm: float = 0.0
    tx_gain_dbi: float = 0.0
    rx_gain_dbi: float = 2.0
    frequency_hz: float = 2.4e9
    path_loss_exponent: float = 2.8
    shadowing_sigma_db: float = 0.0
    rx_sensitivity_dbm: float = -94.0

    def __post_init__(self) -> None:
        if self.frequency_hz <= 0.0:
            raise ValueError(f"frequency must be positive, got {self.frequency_hz}")
        if self.path_loss_exponent <= 0.0:
            raise ValueError(f"path-loss exponent must be positive, got {self.path_loss_exponent}")
        if self.shadowing_sigma_db < 0.0:
            raise ValueError(f"shadowing sigma must be non-negative, got {self.shadowing_sigma_db}")
        if self.tx_power_dbm < self.rx_sensitivity_dbm:
            raise ValueError("transmit power below receiver sensitivity leaves no link budget")

    @property
    def link_budget_dbm(self) -> float:
        """Transmit power plus both antenna gains."""
        return self.tx_power_dbm + self.tx_gain_dbi + self.rx_gain_dbi


@dataclass(frozen=True)
class RssiReading:
    """One received-signal sample; out-of-range readings never reach a tracker."""

    value_dbm: float
    in_range: bool


def reference_loss_db(params: ChannelParams) -> float:
    """Frequency-dependent loss at the 1 m reference distance, in dB."""
    return 20.0 * math.log10(params.frequency_hz) + 20.0 * math.log10(
        4.0 * math.pi / SPEED_OF_LIGHT_M_S
    )


def path_loss(distance_m: float, params: ChannelParams, shadow_db: float = 0.0) -> float:
    """Path loss in dB at a given range, with an explicit shadowing sample."""
    if not math.isfinite(shadow_db):
        raise ValueError(f"non-finite shadowing sample {shadow_db}")
    if distance_m < MIN_DISTANCE_M:
        raise ValueError(f"range {distance_m} below the {MIN_DISTANCE_M} m formula floor")
    return (
        10.0 * params.path_loss_exponent * math.log10(distance_m)
        + reference_loss_db(params)
        + shadow_db
    )


def sample_shadowing(rng: np.random.Generator, sigma_db: float) -> float:
    """Draw one N(0, sigma^2) shadowing sample; exactly 0 when sigma is 0.

    The underlying standard-normal draw is consumed regardless of sigma, so
    runs that differ only in sigma share the same noise shape.
    """
    if sigma_db < 0.0:
        raise ValueError(f"negative shadowing sigma {sigma_db}")
    return sigma_db * float(rng.standard_normal())


def rssi(
    target_pos: Vec2,
    robot_pos: Vec2,
    params: ChannelParams,
    rng: np.random.Generator,
) -> RssiReading:
    """Sample the signal indicator for one broadcast from target to robot."""
    d = max(distance(target_pos, robot_pos), MIN_DISTANCE_M)
    shadow = sample_shadowing(rng, params.shadowing_sigma_db)
    value = params.link_budget_dbm - path_loss(d, params, shadow)
    return RssiReading(value, value >= params.rx_sensitivity_dbm)


def noiseless_rssi(distance_m: float, params: ChannelParams) -> float:
    """Signal indicator at a given range with the shadowing term held at zero."""
    d = max(distance_m, MIN_DISTANCE_M)
    return params.link_budget_dbm - path_loss(d, params)


def invert_rssi_to_distance(value_dbm: float, params: ChannelParams) -> float:
    """Range estimate from a signal value; exact inverse of the noiseless model."""
    exponent = (params.link_budget_dbm - value_dbm - reference_loss_db(params)) / (
        10.0 * params.path_loss_exponent
    )
    return 10.0**exponent


def max_range_m(params: ChannelParams) -> float:
    """Largest range still received at the sensitivity floor, without shadowing."""
    return invert_rssi_to_distance(params.rx_sensitivity_dbm, params)
