"""Parameter sweeps over target rate, outage budget and location spread.

Every sweep point reuses the same random user drops (trial ``t`` draws its
positions from ``SeedSequence(seed, spawn_key=(t, 0))``) and the same PSO
seed per trial, so curves for different values and methods are paired.
Trials are independent and may run on a thread pool; results are gathered
in trial order and averaged with ``math.fsum``, so the output does not
depend on the number of workers.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channel import ScenarioConfig
from .placement import METHODS, PsoConfig, place
from .scenario import DEFAULT_N_USERS, UserDefaults, random_positions, trial_pso_seed, trial_rng

SWEEP_VARIABLES = ("target_rate", "epsilon", "sigma")

DEFAULT_VALUES = {
    "target_rate": (2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0),
    "epsilon": (0.005, 0.01, 0.02, 0.05, 0.1),
    "sigma": (0.5, 1.0, 1.5, 2.0, 2.5, 3.0),
}

CSV_HEADER = ("variable", "value", "method", "mean_ee", "mean_total_power_w", "scenario_trials", "seed")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple[float, ...] = ()
    scenario_trials: int = 100
    seed: int = 0
    methods: tuple[str, ...] = METHODS

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        values = tuple(float(v) for v in (self.values or DEFAULT_VALUES[self.variable]))
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        object.__setattr__(self, "values", values)
        if self.scenario_trials < 1:
            raise ValueError("scenario_trials must be >= 1")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ValueError(f"methods must be a non-empty subset of {METHODS}")


@dataclass(frozen=True)
class SweepRow:
    variable: str
    value: float
    method: str
    mean_ee: float
    mean_total_power: float
    scenario_trials: int
    seed: int


def _defaults_for(variable: str, value: float, base: UserDefaults) -> UserDefaults:
    if variable == "sigma":
        return replace(base, sigma2=value * value)
    return replace(base, **{variable: value})


def run_trial(
    spec: SweepSpec,
    trial: int,
    cfg: ScenarioConfig,
    base: UserDefaults,
    n_users: int,
    pso: PsoConfig,
    grid_step: float,
) -> np.ndarray:
    """Total power and EE for one user drop: array of shape (values, methods, 2)."""
    pos = random_positions(cfg, n_users, trial_rng(spec.seed, trial))
    pso_t = replace(pso, seed=trial_pso_seed(spec.seed, trial))
    out = np.empty((len(spec.values), len(spec.methods), 2))
    for i, value in enumerate(spec.values):
        defaults = _defaults_for(spec.variable, value, base)
        users = [defaults.make(float(x), float(y)) for x, y in pos]
        for j, method in enumerate(spec.methods):
            alloc = place(method, users, cfg, pso=pso_t, grid_step=grid_step).allocation
            out[i, j] = alloc.total_power, alloc.energy_efficiency
    return out


def run_sweep(
    spec: SweepSpec,
    cfg: ScenarioConfig = ScenarioConfig(),
    base: UserDefaults = UserDefaults(),
    n_users: int = DEFAULT_N_USERS,
    pso: PsoConfig = PsoConfig(),
    grid_step: float = 0.01,
    workers: int = 1,
    progress=None,
) -> list[SweepRow]:
    """One row per (value, method), averaged over ``spec.scenario_trials`` paired drops."""
    def job(t):
        res = run_trial(spec, t, cfg, base, n_users, pso, grid_step)
        if progress is not None:
            progress(t)
        return res

    trials = range(spec.scenario_trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, trials))
    else:
        results = [job(t) for t in trials]
    stacked = np.stack(results)  # (trials, values, methods, 2)

    rows = []
    n = spec.scenario_trials
    for i, value in enumerate(spec.values):
        for j, method in enumerate(spec.methods):
            rows.append(SweepRow(
                variable=spec.variable,
                value=value,
                method=method,
                mean_ee=math.fsum(stacked[:, i, j, 1]) / n,
                mean_total_power=math.fsum(stacked[:, i, j, 0]) / n,
                scenario_trials=n,
                seed=spec.seed,
            ))
    return rows


def rows_to_csv(rows: Iterable[SweepRow], ee_scale: float = 1.0) -> str:
    """CSV text with the fixed header; floats use shortest round-trip repr."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([r.variable, repr(r.value), r.method, repr(r.mean_ee * ee_scale),
                    repr(r.mean_total_power), r.scenario_trials, r.seed])
    return buf.getvalue()


def rows_to_gnuplot(rows: Sequence[SweepRow], ee_scale: float = 1.0) -> str:
    """One indexable data block per method: value, mean EE, mean power."""
    blocks = []
    for method in dict.fromkeys(r.method for r in rows):
        lines = [f"# method={method}", "# value mean_ee mean_total_power_w"]
        lines += [f"{r.value!r} {r.mean_ee * ee_scale!r} {r.mean_total_power!r}" for r in rows if r.method == method]
        blocks.append("\n".join(lines))
    return "\n\n\n".join(blocks) + "\n"


def write_text(path, text: str) -> None:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None
