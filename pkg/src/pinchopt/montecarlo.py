"""Monte Carlo outage and coverage estimates under Gaussian location error.

Samples are drawn in fixed-size blocks. Each block has its own generator
seeded from ``SeedSequence(seed, spawn_key=(stream, block))``, so a given
``(seed, stream)`` always yields the same numbers whichever order, or
thread, the blocks are processed in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import AntennaPosition, ScenarioConfig, UserSpec, achievable_rate

BLOCK = 1 << 16
MIN_TRIALS = 10_000


@dataclass(frozen=True)
class OutageReport:
    trials: int
    outage_count: int
    empirical_outage: float
    standard_error: float
    target_epsilon: float
    pass_3se: bool

    @classmethod
    def from_counts(cls, trials: int, outage_count: int, target_epsilon: float) -> "OutageReport":
        p = outage_count / trials
        se = math.sqrt(p * (1.0 - p) / trials)
        return cls(
            trials=trials,
            outage_count=outage_count,
            empirical_outage=p,
            standard_error=se,
            target_epsilon=target_epsilon,
            pass_3se=abs(p - target_epsilon) <= 3.0 * se,
        )


def standard_error(p: float, trials: int) -> float:
    """Binomial standard error sqrt(p (1 - p) / n)."""
    return math.sqrt(p * (1.0 - p) / trials)


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, block)))


def sample_true_position(user: UserSpec, rng: np.random.Generator, size=None):
    """Draw true positions X ~ N(x_hat, sigma^2), Y ~ N(y_hat, sigma^2), independent."""
    s = user.sigma
    x = rng.normal(user.x_hat, s, size)
    y = rng.normal(user.y_hat, s, size)
    return x, y


def _check_trials(trials: int) -> None:
    if trials < MIN_TRIALS:
        raise ValueError(f"trials must be >= {MIN_TRIALS}, got {trials}")


def _blocks(trials: int):
    done, block = 0, 0
    while done < trials:
        n = min(BLOCK, trials - done)
        yield block, n
        done += n
        block += 1


def estimate_outage(
    user: UserSpec,
    ant: AntennaPosition,
    power: float,
    cfg: ScenarioConfig,
    trials: int = 1_000_000,
    seed: int = 0,
    stream: int = 0,
) -> OutageReport:
    """Fraction of sampled true positions whose rate falls below the user's target."""
    _check_trials(trials)
    count = 0
    for block, n in _blocks(trials):
        x, y = sample_true_position(user, block_rng(seed, stream, block), n)
        rate = achievable_rate((x, y), ant, cfg.waveguide_height, power, user.noise_power, cfg.carrier_freq)
        count += int(np.count_nonzero(rate < user.target_rate))
    return OutageReport.from_counts(trials, count, user.epsilon)


def estimate_coverage(l: float, sigma: float, r: float, trials: int = 1_000_000, seed: int = 0, stream: int = 0) -> float:
    """Fraction of samples from N((l, 0), sigma^2 I) inside the disc of radius r at the origin."""
    _check_trials(trials)
    if sigma <= 0 or l < 0 or r < 0:
        raise ValueError("need l >= 0, sigma > 0, r >= 0")
    inside = 0
    r2 = r * r
    for block, n in _blocks(trials):
        rng = block_rng(seed, stream, block)
        x = rng.normal(l, sigma, n)
        y = rng.normal(0.0, sigma, n)
        inside += int(np.count_nonzero(x * x + y * y <= r2))
    return inside / trials
