"""Self-validation suite behind ``pinchopt validate``.

Each check compares the analytical model with an independent route:
adaptive quadrature of the integral definitions, or Monte Carlo sampling of
the location error. ``r_min_scale`` perturbs the radius used to size the
transmit power; any value other than 1 should make the calibration check
fail, which is how the suite's own sensitivity is tested.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from . import specfun
from .allocation import min_power_user, power_coefficient
from .channel import AntennaPosition, ScenarioConfig, UserSpec
from .montecarlo import estimate_coverage, estimate_outage, standard_error

LEVELS = {"quick": 100_000, "full": 1_000_000}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


@dataclass
class ValidationReport:
    level: str
    seed: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def quad_marcum_q1(a: float, b: float) -> float:
    """Q1 by adaptive quadrature of its defining integral (independent of specfun)."""
    f = lambda x: x * math.exp(-0.5 * (x - a) ** 2) * special.i0e(a * x)
    hi = max(a, b) + 40.0
    pts = [p for p in (a - 8.0, a, a + 8.0) if b < p < hi]
    val, _ = integrate.quad(f, b, hi, points=pts or None, epsabs=1e-14, epsrel=1e-13, limit=400)
    return val


def quad_bessel_i0(x: float) -> float:
    """I0(x) = (1/pi) int_0^pi exp(x cos t) dt, scaled by exp(-x) inside."""
    val, _ = integrate.quad(lambda t: math.exp(x * (math.cos(t) - 1.0)), 0.0, math.pi, epsabs=0, epsrel=1e-13)
    return val / math.pi * math.exp(x)


def _timed(fn):
    def wrapper(*args, **kw):
        t0 = time.perf_counter()
        res = fn(*args, **kw)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    return wrapper


@_timed
def check_bessel() -> CheckResult:
    xs = np.linspace(0.0, 60.0, 61)
    rel = max(abs(specfun.bessel_i0(x) / quad_bessel_i0(x) - 1.0) for x in xs)
    return CheckResult("bessel_i0 vs integral representation", rel <= 1e-12, f"max rel err {rel:.2e} (tol 1e-12)")


@_timed
def check_marcum_grid(n: int = 20, tol: float = 1e-9) -> CheckResult:
    grid = np.linspace(0.0, 10.0, n)
    worst = 0.0
    for a in grid:
        for b in grid:
            worst = max(worst, abs(specfun.marcum_q1(a, b) - quad_marcum_q1(a, b)))
    return CheckResult(f"marcum_q1 vs quadrature on {n}x{n} grid", worst <= tol, f"max abs err {worst:.2e} (tol {tol:g})")


@_timed
def check_chi2_identity() -> CheckResult:
    x, lam = np.meshgrid(np.linspace(0, 100, 41), np.linspace(0, 100, 41))
    dev = np.max(np.abs(specfun.noncentral_chi2_cdf_2dof(x, lam) + specfun.marcum_q1(np.sqrt(lam), np.sqrt(x)) - 1.0))
    return CheckResult("chi2 CDF + Q1 = 1", dev <= 1e-12, f"max dev {dev:.2e} (tol 1e-12)")


@_timed
def check_r_min(rng: np.random.Generator, count: int) -> CheckResult:
    worst = 0.0
    for _ in range(count):
        p = specfun.CoverageProblem(rng.uniform(0, 100), rng.uniform(0.1, 5), 10 ** rng.uniform(-4, -0.5))
        r = specfun.solve_r_min(p)
        worst = max(worst, abs(specfun.marcum_q1(p.l / p.sigma, r / p.sigma) - p.epsilon))
    closed = max(
        abs(specfun.solve_r_min(specfun.CoverageProblem(0.0, s, e)) / (s * math.sqrt(2 * math.log(1 / e))) - 1)
        for s in (0.5, 1.0, 3.0) for e in (0.001, 0.01, 0.1)
    )
    ok = worst <= 1e-10 and closed <= 1e-9
    return CheckResult(
        f"r_min inversion ({count} problems)", ok,
        f"max |Q1-eps| {worst:.2e} (tol 1e-10), closed-form rel err {closed:.2e} (tol 1e-9)",
    )


@_timed
def check_coverage(rng: np.random.Generator, trials: int, seed: int, count: int = 10) -> CheckResult:
    worst = 0.0
    fails = 0
    for k in range(count):
        sigma = rng.uniform(0.5, 3.0)
        a = rng.uniform(0.0, 10.0)
        b = rng.uniform(max(0.0, a - 2.0), a + 3.0)
        analytic = 1.0 - specfun.marcum_q1(a, b)
        emp = estimate_coverage(a * sigma, sigma, b * sigma, trials, seed=seed, stream=1000 + k)
        se = max(standard_error(analytic, trials), 1.0 / trials)
        z = abs(emp - analytic) / se
        worst = max(worst, z)
        fails += z > 3.0
    return CheckResult(
        f"Monte Carlo coverage vs 1-Q1 ({count} triples, {trials} samples)", fails == 0,
        f"max |dev|/SE {worst:.2f} (tol 3)",
    )


@_timed
def check_calibration(rng: np.random.Generator, trials: int, seed: int, count: int, r_min_scale: float = 1.0) -> CheckResult:
    cfg = ScenarioConfig()
    at_fail = 0
    above = 0
    worst = 0.0
    for k in range(count):
        user = UserSpec(rng.uniform(*cfg.region_x), rng.uniform(*cfg.region_y))
        ant = AntennaPosition(rng.uniform(0.0, cfg.waveguide_length))
        ua = min_power_user(user, ant, cfg)
        r = r_min_scale * ua.r_min
        p = power_coefficient(user, cfg) * (r * r + cfg.waveguide_height**2)
        rep = estimate_outage(user, ant, p, cfg, trials, seed=seed, stream=2000 + k)
        worst = max(worst, abs(rep.empirical_outage - rep.target_epsilon) / max(rep.standard_error, 1e-300))
        at_fail += not rep.pass_3se
        low = estimate_outage(user, ant, 0.99 * p, cfg, trials, seed=seed, stream=3000 + k)
        above += low.empirical_outage - low.target_epsilon > 3.0 * low.standard_error
    need = math.ceil(0.9 * count)
    ok = at_fail == 0 and above >= need
    return CheckResult(
        f"outage calibration at p_min ({count} users, {trials} samples)", ok,
        f"{count - at_fail}/{count} within 3 SE (max {worst:.2f} SE); 0.99*p_min above eps in {above}/{count} (need {need})",
    )


def run_validate(level: str = "quick", seed: int = 0, trials: int | None = None, r_min_scale: float = 1.0,
                 report=None) -> ValidationReport:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {tuple(LEVELS)}")
    n = trials or LEVELS[level]
    rng = np.random.default_rng(seed)
    rep = ValidationReport(level, seed)
    steps = [
        lambda: check_bessel(),
        lambda: check_marcum_grid(),
        lambda: check_chi2_identity(),
        lambda: check_r_min(rng, 200 if level == "quick" else 1000),
        lambda: check_coverage(rng, n, seed),
        lambda: check_calibration(rng, n, seed, 20, r_min_scale),
    ]
    for step in steps:
        res = step()
        rep.checks.append(res)
        if report is not None:
            report(res)
    return rep
