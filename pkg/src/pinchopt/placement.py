"""Antenna placement along the waveguide.

The objective (total minimum power) has no closed form and is only piecewise
smooth through the radius solver, so placement is derivative-free: a
constriction-factor particle swarm, an exhaustive grid benchmark and the
fixed antenna at the access point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .allocation import AllocationResult, PowerObjective, total_power
from .channel import AntennaPosition, ScenarioConfig, UserSpec

METHODS = ("pso", "exhaustive", "fixed")


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters.

    Defaults are the standard constriction-factor setting (Clerc-Kennedy).
    The search stops early once the global best has improved by less than
    ``stall_tolerance`` watts for ``stall_iters`` consecutive iterations.
    With ``polish`` on, the swarm's best is refined by a bounded scalar
    minimization within ``polish_radius * L`` of it, the way MATLAB's
    ``particleswarm`` hands over to a ``HybridFcn``; the refined point is kept
    only if it is strictly better.
    """

    swarm_size: int = 30
    max_iters: int = 100
    inertia: float = 0.729
    cognitive_coeff: float = 1.49445
    social_coeff: float = 1.49445
    stall_tolerance: float = 1e-12
    stall_iters: int = 20
    velocity_clamp: float = 0.2  # fraction of L
    seed: int = 0
    polish: bool = True
    polish_radius: float = 0.02  # fraction of L
    polish_xtol: float = 1e-6  # meters

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.stall_iters < 1:
            raise ValueError("stall_iters must be >= 1")
        for name in ("inertia", "cognitive_coeff", "social_coeff", "velocity_clamp", "polish_radius", "polish_xtol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0")
        if self.stall_tolerance < 0:
            raise ValueError("stall_tolerance must be >= 0")


@dataclass(frozen=True)
class PlacementOutcome:
    method: str
    allocation: AllocationResult
    evaluations: int
    converged: bool

    @property
    def x_pin(self) -> float:
        return self.allocation.antenna.x_pin


def optimize_pso(users: Sequence[UserSpec], cfg: ScenarioConfig, pso: PsoConfig = PsoConfig()) -> PlacementOutcome:
    """Particle swarm search for the power-minimizing position on [0, L].

    Particles leaving the waveguide are put back on the nearest end and lose
    their velocity. Deterministic for a given ``pso.seed``.
    """
    L = cfg.waveguide_length
    objective = PowerObjective(users, cfg)
    rng = np.random.default_rng(pso.seed)
    vmax = pso.velocity_clamp * L

    x = rng.uniform(0.0, L, pso.swarm_size)
    v = rng.uniform(-0.5 * vmax, 0.5 * vmax, pso.swarm_size)
    f = objective(x)
    pbest_x, pbest_f = x.copy(), f.copy()
    g = int(np.argmin(pbest_f))
    gbest_x, gbest_f = pbest_x[g], pbest_f[g]

    stall = 0
    converged = False
    for _ in range(pso.max_iters):
        r1 = rng.random(pso.swarm_size)
        r2 = rng.random(pso.swarm_size)
        v = (
            pso.inertia * v
            + pso.cognitive_coeff * r1 * (pbest_x - x)
            + pso.social_coeff * r2 * (gbest_x - x)
        )
        np.clip(v, -vmax, vmax, out=v)
        x = x + v
        out = (x < 0.0) | (x > L)
        x[out] = np.clip(x[out], 0.0, L)
        v[out] = 0.0

        f = objective(x)
        better = f < pbest_f
        pbest_x[better] = x[better]
        pbest_f[better] = f[better]
        g = int(np.argmin(pbest_f))
        improvement = gbest_f - pbest_f[g]
        if pbest_f[g] < gbest_f:
            gbest_x, gbest_f = pbest_x[g], pbest_f[g]
        if improvement < pso.stall_tolerance:
            stall += 1
            if stall >= pso.stall_iters:
                converged = True
                break
        else:
            stall = 0

    if pso.polish:
        gbest_x, gbest_f = _polish(objective, float(gbest_x), float(gbest_f), pso.polish_radius * L, L, pso.polish_xtol)

    alloc = total_power(users, AntennaPosition(float(gbest_x)), cfg)
    return PlacementOutcome("pso", alloc, objective.evaluations, converged)


def _polish(objective, x0, f0, radius, L, xtol):
    # gbest PSO stagnates a few mm short of a flat optimum; finish locally
    lo, hi = max(0.0, x0 - radius), min(L, x0 + radius)
    res = minimize_scalar(
        lambda x: objective(np.array([x]))[0],
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": xtol},
    )
    if res.fun < f0:
        return float(res.x), float(res.fun)
    return x0, f0


def exhaustive_grid(L: float, grid_step: float) -> np.ndarray:
    """Grid {0, step, 2 step, ...} up to L, with L always included."""
    if not (math.isfinite(grid_step) and grid_step > 0):
        raise ValueError(f"grid_step must be > 0, got {grid_step!r}")
    if grid_step >= L:
        raise ValueError(f"grid_step {grid_step} must be smaller than the waveguide length {L}")
    n = int(math.floor(L / grid_step + 1e-9))
    xs = np.arange(n + 1) * grid_step
    xs = xs[xs <= L]
    if L - xs[-1] > 1e-9 * L:
        xs = np.append(xs, L)
    else:
        xs[-1] = L
    return xs


def optimize_exhaustive(users: Sequence[UserSpec], cfg: ScenarioConfig, grid_step: float = 0.01) -> PlacementOutcome:
    """Evaluate every grid position and keep the best; ties go to the smaller x."""
    xs = exhaustive_grid(cfg.waveguide_length, grid_step)
    objective = PowerObjective(users, cfg)
    powers = objective(xs)
    k = int(np.argmin(powers))
    alloc = total_power(users, AntennaPosition(float(xs[k])), cfg)
    return PlacementOutcome("exhaustive", alloc, objective.evaluations, True)


def fixed_baseline(users: Sequence[UserSpec], cfg: ScenarioConfig) -> PlacementOutcome:
    """Antenna fixed above the access point at (0, 0, d); power still optimized per user."""
    alloc = total_power(users, AntennaPosition(0.0), cfg)
    return PlacementOutcome("fixed", alloc, 1, True)


def place(method: str, users, cfg, *, pso: PsoConfig = PsoConfig(), grid_step: float = 0.01) -> PlacementOutcome:
    if method == "pso":
        return optimize_pso(users, cfg, pso)
    if method == "exhaustive":
        return optimize_exhaustive(users, cfg, grid_step)
    if method == "fixed":
        return fixed_baseline(users, cfg)
    raise ValueError(f"unknown placement method {method!r}; expected one of {METHODS}")
