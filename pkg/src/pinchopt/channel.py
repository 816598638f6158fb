"""Geometry, free-space LoS rate model and unit conversions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact SI value

DEFAULT_NOISE_DBM = -94.0


def dbm_to_watts(p_dbm: float) -> float:
    """Convert dBm to watts."""
    if not math.isfinite(p_dbm):
        raise ValueError(f"power in dBm must be finite, got {p_dbm!r}")
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def eta(f: float) -> float:
    """Free-space path-gain constant c^2 / (16 pi^2 f^2), in m^2."""
    if not (math.isfinite(f) and f > 0.0):
        raise ValueError(f"carrier frequency must be > 0, got {f!r}")
    return SPEED_OF_LIGHT**2 / (16.0 * math.pi**2 * f**2)


def _interval(value, name):
    lo, hi = (float(v) for v in value)
    if not (math.isfinite(lo) and math.isfinite(hi) and hi > lo):
        raise ValueError(f"{name} must be a finite interval with hi > lo, got {value!r}")
    return (lo, hi)


@dataclass(frozen=True)
class ScenarioConfig:
    """Waveguide geometry, carrier and deployment region.

    The waveguide runs along the x-axis from the access point at the origin,
    at height ``waveguide_height``. ``bandwidth`` only matters when energy
    efficiency is reported in bit/J. ``noise_power`` (watts) is the default
    per-user noise.
    """

    waveguide_length: float = 50.0
    waveguide_height: float = 3.0
    carrier_freq: float = 28e9
    bandwidth: float = 100e6
    region_x: tuple[float, float] = (0.0, 120.0)
    region_y: tuple[float, float] = (-10.0, 10.0)
    noise_power: float = field(default_factory=lambda: dbm_to_watts(DEFAULT_NOISE_DBM))

    def __post_init__(self):
        for name in ("waveguide_length", "waveguide_height", "carrier_freq", "bandwidth", "noise_power"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a finite positive number, got {v!r}")
        object.__setattr__(self, "region_x", _interval(self.region_x, "region_x"))
        object.__setattr__(self, "region_y", _interval(self.region_y, "region_y"))

    @property
    def eta(self) -> float:
        return eta(self.carrier_freq)


@dataclass(frozen=True)
class UserSpec:
    """Estimated location and QoS requirements of one user.

    ``sigma2`` is the location-error variance per axis (m^2), ``target_rate``
    is in bit/s/Hz, ``noise_power`` in watts.
    """

    x_hat: float
    y_hat: float
    sigma2: float = 1.0
    target_rate: float = 3.0
    epsilon: float = 0.01
    noise_power: float = field(default_factory=lambda: dbm_to_watts(DEFAULT_NOISE_DBM))

    def __post_init__(self):
        if not (math.isfinite(self.x_hat) and math.isfinite(self.y_hat)):
            raise ValueError("user location must be finite")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2!r}")
        if not (math.isfinite(self.target_rate) and self.target_rate >= 0):
            raise ValueError(f"target_rate must be >= 0, got {self.target_rate!r}")
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not (math.isfinite(self.noise_power) and self.noise_power > 0):
            raise ValueError(f"noise_power must be > 0, got {self.noise_power!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class AntennaPosition:
    """Pinching-antenna position (x_pin, 0, d) along the waveguide."""

    x_pin: float

    def __post_init__(self):
        if not (math.isfinite(self.x_pin) and self.x_pin >= 0.0):
            raise ValueError(f"x_pin must be finite and >= 0, got {self.x_pin!r}")

    def check_within(self, cfg: ScenarioConfig) -> None:
        if self.x_pin > cfg.waveguide_length:
            raise ValueError(
                f"x_pin={self.x_pin} lies beyond the waveguide end L={cfg.waveguide_length}"
            )


def achievable_rate(user_pos, ant: AntennaPosition, d: float, power, noise: float, f: float):
    """Rate log2(1 + eta P / (dist^2 noise)) in bit/s/Hz.

    ``user_pos`` is an ``(x, y)`` pair of floats or of equal-shape arrays;
    ``dist^2 = (x - x_pin)^2 + y^2 + d^2``.
    """
    if not (noise > 0.0):
        raise ValueError(f"noise power must be > 0, got {noise!r}")
    if np.any(np.asarray(power) < 0.0):
        raise ValueError("transmit power must be >= 0")
    x, y = user_pos
    dx = np.subtract(x, ant.x_pin)
    dist2 = dx * dx + np.multiply(y, y) + d * d
    snr = eta(f) * np.asarray(power) / (dist2 * noise)
    rate = np.log2(1.0 + snr)
    return float(rate) if np.ndim(rate) == 0 else rate
