"""Minimum transmit power per user for a fixed antenna position.

For a given antenna position each user's outage constraint is met with
equality when the rate target is reached exactly on the circle of radius
``r_min``, giving

    p_min = (2**R - 1) * (r_min**2 + d**2) * noise / eta.

Users are served in orthogonal slots, so the total is a plain sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from .channel import AntennaPosition, ScenarioConfig, UserSpec
from .specfun import EPS_GUARD, ConvergenceError, _NEWTON, _solve_rho


class UndefinedEnergyEfficiency(ArithmeticError):
    """Energy efficiency requested for zero total power."""


@dataclass(frozen=True)
class UserAllocation:
    l: float
    r_min: float
    p_min: float


@dataclass(frozen=True)
class AllocationResult:
    """Power allocation at one antenna position.

    ``energy_efficiency`` is in (bit/s/Hz)/W. When every target rate is zero
    the total power is zero too; EE is then ``nan`` and ``ee_defined`` is
    False.
    """

    antenna: AntennaPosition
    per_user: tuple[UserAllocation, ...]
    total_power: float
    effective_sum_rate: float
    energy_efficiency: float
    ee_defined: bool = True


def distance_l(user: UserSpec, ant: AntennaPosition) -> float:
    """Horizontal distance between the antenna's ground projection and the estimated location."""
    dx = user.x_hat - ant.x_pin
    return math.sqrt(dx * dx + user.y_hat * user.y_hat)


def power_coefficient(user: UserSpec, cfg: ScenarioConfig) -> float:
    """(2**R - 1) * noise / eta, the factor multiplying r_min**2 + d**2."""
    return (2.0**user.target_rate - 1.0) * user.noise_power / cfg.eta


@njit(cache=True, nogil=True)
def _user_power(x_hat, y_hat, sigma, eps, coef, d2, x_pin):
    dx = x_hat - x_pin
    l = math.sqrt(dx * dx + y_hat * y_hat)
    rho, _, status = _solve_rho(l / sigma, eps, _NEWTON)
    r = sigma * rho
    return l, r, coef * (r * r + d2), status


@njit(cache=True, nogil=True)
def _total_power_grid(xs, x_hat, y_hat, sigma, eps, coef, d2, out):
    bad = 0
    for i in range(xs.size):
        tot = 0.0
        for n in range(x_hat.size):
            _, _, p, status = _user_power(x_hat[n], y_hat[n], sigma[n], eps[n], coef[n], d2, xs[i])
            bad += status
            tot += p
        out[i] = tot
    return bad


def _check_user_epsilon(user: UserSpec) -> None:
    if not (EPS_GUARD < user.epsilon < 1.0 - EPS_GUARD):
        raise ValueError(f"epsilon {user.epsilon!r} is too close to 0 or 1 to invert")


def min_power_user(user: UserSpec, ant: AntennaPosition, cfg: ScenarioConfig) -> UserAllocation:
    """Smallest power meeting the user's outage budget at antenna position ``ant``."""
    _check_user_epsilon(user)
    coef = power_coefficient(user, cfg)
    d = cfg.waveguide_height
    l, r, p, status = _user_power(
        user.x_hat, user.y_hat, user.sigma, user.epsilon, coef, d * d, ant.x_pin
    )
    if status:
        raise ConvergenceError(f"r_min solver did not converge for {user}")
    return UserAllocation(l=l, r_min=r, p_min=p)


def effective_sum_rate(users: Sequence[UserSpec]) -> float:
    return sum((1.0 - u.epsilon) * u.target_rate for u in users)


def energy_efficiency(sum_rate: float, total_power: float) -> float:
    """Effective sum rate divided by total power."""
    if not total_power > 0.0:
        raise UndefinedEnergyEfficiency(f"energy efficiency undefined for total power {total_power!r}")
    return sum_rate / total_power


def total_power(users: Sequence[UserSpec], ant: AntennaPosition, cfg: ScenarioConfig) -> AllocationResult:
    """Allocate each user independently at ``ant`` and aggregate."""
    if not users:
        raise ValueError("at least one user is required")
    ant.check_within(cfg)
    per_user = tuple(min_power_user(u, ant, cfg) for u in users)
    tot = 0.0
    for ua in per_user:
        tot += ua.p_min
    rate = effective_sum_rate(users)
    if tot > 0.0:
        ee, defined = energy_efficiency(rate, tot), True
    else:
        ee, defined = math.nan, False
    return AllocationResult(
        antenna=ant,
        per_user=per_user,
        total_power=tot,
        effective_sum_rate=rate,
        energy_efficiency=ee,
        ee_defined=defined,
    )


class PowerObjective:
    """Total minimum power as a function of antenna position, batched.

    Values are bit-identical to ``total_power(users, AntennaPosition(x), cfg).total_power``.
    """

    def __init__(self, users: Sequence[UserSpec], cfg: ScenarioConfig):
        if not users:
            raise ValueError("at least one user is required")
        for u in users:
            _check_user_epsilon(u)
        self.users = tuple(users)
        self.cfg = cfg
        self._x = np.array([u.x_hat for u in users], dtype=float)
        self._y = np.array([u.y_hat for u in users], dtype=float)
        self._sigma = np.array([u.sigma for u in users], dtype=float)
        self._eps = np.array([u.epsilon for u in users], dtype=float)
        self._coef = np.array([power_coefficient(u, cfg) for u in users], dtype=float)
        self._d2 = cfg.waveguide_height * cfg.waveguide_height
        self.evaluations = 0

    def __call__(self, xs) -> np.ndarray:
        xs = np.ascontiguousarray(xs, dtype=float).ravel()
        out = np.empty_like(xs)
        bad = _total_power_grid(xs, self._x, self._y, self._sigma, self._eps, self._coef, self._d2, out)
        if bad:
            raise ConvergenceError("r_min solver did not converge during objective evaluation")
        self.evaluations += xs.size
        return out
