"""Scenario definitions: random user drops and INI configuration files.

A configuration file has up to five kinds of sections, all optional::

    [scenario]
    waveguide_length = 50
    waveguide_height = 3
    carrier_freq = 28e9
    bandwidth = 100e6
    region_x = 0, 120
    region_y = -10, 10
    noise_power_dbm = -94

    [users]            ; defaults for every user, and the random drop
    count = 5
    seed = 0
    sigma2 = 1
    target_rate = 3
    epsilon = 0.01

    [user.1]           ; explicit users replace the random drop
    x_hat = 25
    y_hat = 0

    [pso]
    swarm_size = 30
    seed = 0

    [run]
    methods = pso, exhaustive, fixed
    grid_step = 0.01

Missing keys take the defaults of the corresponding dataclasses.
"""
from __future__ import annotations

import configparser
import dataclasses
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .channel import DEFAULT_NOISE_DBM, ScenarioConfig, UserSpec, dbm_to_watts
from .placement import METHODS, PsoConfig

DEFAULT_N_USERS = 5


class ConfigError(Exception):
    """Malformed configuration: unknown field, bad syntax or unparsable value."""

    def __init__(self, message: str, path=None, line=None):
        self.path, self.line = path, line
        where = f"{path}:{line}: " if path is not None and line is not None else (f"{path}: " if path else "")
        super().__init__(where + message)


class InfeasibleParameterError(ValueError):
    """A well-formed value outside its admissible range."""


@dataclass(frozen=True)
class UserDefaults:
    sigma2: float = 1.0
    target_rate: float = 3.0
    epsilon: float = 0.01
    noise_power: float = field(default_factory=lambda: dbm_to_watts(DEFAULT_NOISE_DBM))

    def make(self, x_hat: float, y_hat: float, **overrides) -> UserSpec:
        params = dataclasses.asdict(self)
        params.update(overrides)
        return UserSpec(x_hat=x_hat, y_hat=y_hat, **params)


@dataclass(frozen=True)
class Scenario:
    cfg: ScenarioConfig
    users: tuple[UserSpec, ...]
    pso: PsoConfig = PsoConfig()
    methods: tuple[str, ...] = METHODS
    grid_step: float = 0.01


def random_positions(cfg: ScenarioConfig, n_users: int, rng: np.random.Generator) -> np.ndarray:
    """(n_users, 2) estimated positions, uniform over the deployment region."""
    xs = rng.uniform(cfg.region_x[0], cfg.region_x[1], n_users)
    ys = rng.uniform(cfg.region_y[0], cfg.region_y[1], n_users)
    return np.column_stack([xs, ys])


def trial_rng(seed: int, trial: int, purpose: int = 0) -> np.random.Generator:
    """Generator for scenario trial ``trial``; ``purpose`` separates user drops (0) from PSO seeds (1)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial, purpose)))


def trial_pso_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(trial, 1)).generate_state(1, np.uint64)[0])


def random_users(
    cfg: ScenarioConfig,
    n_users: int = DEFAULT_N_USERS,
    seed: int = 0,
    defaults: UserDefaults = UserDefaults(),
) -> tuple[UserSpec, ...]:
    pos = random_positions(cfg, n_users, trial_rng(seed, 0))
    return tuple(defaults.make(float(x), float(y)) for x, y in pos)


def default_scenario(seed: int = 0) -> Scenario:
    cfg = ScenarioConfig()
    return Scenario(cfg=cfg, users=random_users(cfg, DEFAULT_N_USERS, seed), pso=PsoConfig(seed=seed))


# ---------------------------------------------------------------------------
# config files
# ---------------------------------------------------------------------------

_SCENARIO_KEYS = {
    "waveguide_length", "waveguide_height", "carrier_freq", "bandwidth",
    "region_x", "region_y", "noise_power_dbm", "noise_power",
}
_USER_KEYS = {"sigma2", "target_rate", "epsilon", "noise_power_dbm", "noise_power"}
_USERS_KEYS = _USER_KEYS | {"count", "seed"}
_USER_ITEM_KEYS = _USER_KEYS | {"x_hat", "y_hat"}
_PSO_KEYS = {f.name for f in dataclasses.fields(PsoConfig)}
_RUN_KEYS = {"methods", "grid_step"}

_SECTION_RE = re.compile(r"^\s*\[([^\]]+)\]")
_KEY_RE = re.compile(r"^\s*([^=:;#\s][^=:]*?)\s*[=:]")


def _line_index(text: str) -> dict:
    index, section = {}, None
    for n, line in enumerate(text.splitlines(), start=1):
        m = _SECTION_RE.match(line)
        if m:
            section = m.group(1).strip()
            index[(section, None)] = n
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip().lower()), n)
    return index


class _Reader:
    def __init__(self, parser, path, lines):
        self.parser, self.path, self.lines = parser, path, lines

    def line(self, section, key=None):
        return self.lines.get((section, key), self.lines.get((section, None)))

    def error(self, section, key, message):
        return ConfigError(f"[{section}] {key}: {message}" if key else f"[{section}] {message}",
                           self.path, self.line(section, key))

    def check_keys(self, section, allowed):
        for key in self.parser[section]:
            if key not in allowed:
                raise self.error(section, key, f"unknown field (expected one of {', '.join(sorted(allowed))})")

    def number(self, section, key, kind=float):
        raw = self.parser[section][key]
        try:
            return kind(raw) if kind is not int else int(raw, 0)
        except ValueError:
            raise self.error(section, key, f"cannot parse {raw!r} as {kind.__name__}") from None

    def pair(self, section, key):
        raw = self.parser[section][key]
        parts = [p.strip() for p in raw.split(",")]
        try:
            lo, hi = (float(p) for p in parts)
        except ValueError:
            raise self.error(section, key, f"expected 'lo, hi', got {raw!r}") from None
        return (lo, hi)

    def boolean(self, section, key):
        try:
            return self.parser[section].getboolean(key)
        except ValueError:
            raise self.error(section, key, f"cannot parse {self.parser[section][key]!r} as a boolean") from None


def _user_params(r: _Reader, section: str) -> dict:
    params = {}
    sect = r.parser[section]
    for key in ("sigma2", "target_rate", "epsilon"):
        if key in sect:
            params[key] = r.number(section, key)
    if "noise_power_dbm" in sect and "noise_power" in sect:
        raise r.error(section, "noise_power", "give either noise_power or noise_power_dbm, not both")
    if "noise_power_dbm" in sect:
        params["noise_power"] = dbm_to_watts(r.number(section, "noise_power_dbm"))
    elif "noise_power" in sect:
        params["noise_power"] = r.number(section, "noise_power")
    return params


def _infeasible(r: _Reader, section: str, exc: Exception) -> InfeasibleParameterError:
    return InfeasibleParameterError(f"{r.path}:{r.line(section)}: [{section}] {exc}")


def parse_config(text: str, path: str = "<config>") -> Scenario:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(str(exc).splitlines()[0], path, line) from None
    r = _Reader(parser, path, _line_index(text))

    user_sections = []
    for section in parser.sections():
        if section in ("scenario", "users", "pso", "run"):
            continue
        if re.fullmatch(r"user\.\w+", section):
            user_sections.append(section)
        else:
            raise r.error(section, None, "unknown section")

    scen_kw = {}
    if parser.has_section("scenario"):
        r.check_keys("scenario", _SCENARIO_KEYS)
        s = parser["scenario"]
        for key in ("waveguide_length", "waveguide_height", "carrier_freq", "bandwidth", "noise_power"):
            if key in s:
                scen_kw[key] = r.number("scenario", key)
        if "noise_power_dbm" in s:
            if "noise_power" in s:
                raise r.error("scenario", "noise_power", "give either noise_power or noise_power_dbm, not both")
            scen_kw["noise_power"] = dbm_to_watts(r.number("scenario", "noise_power_dbm"))
        for key in ("region_x", "region_y"):
            if key in s:
                scen_kw[key] = r.pair("scenario", key)
    try:
        cfg = ScenarioConfig(**scen_kw)
    except ValueError as exc:
        raise _infeasible(r, "scenario", exc) from None

    count, user_seed, base = DEFAULT_N_USERS, 0, {"noise_power": cfg.noise_power}
    if parser.has_section("users"):
        r.check_keys("users", _USERS_KEYS)
        if "count" in parser["users"]:
            count = r.number("users", "count", int)
        if "seed" in parser["users"]:
            user_seed = r.number("users", "seed", int)
        base.update(_user_params(r, "users"))
    try:
        defaults = UserDefaults(**base)
    except ValueError as exc:
        raise _infeasible(r, "users", exc) from None

    if user_sections:
        users = []
        for section in user_sections:
            r.check_keys(section, _USER_ITEM_KEYS)
            for key in ("x_hat", "y_hat"):
                if key not in parser[section]:
                    raise r.error(section, key, "missing required field")
            try:
                users.append(defaults.make(
                    r.number(section, "x_hat"), r.number(section, "y_hat"), **_user_params(r, section)
                ))
            except ValueError as exc:
                raise _infeasible(r, section, exc) from None
        users = tuple(users)
    else:
        if count < 1:
            raise InfeasibleParameterError(f"{path}:{r.line('users', 'count')}: [users] count must be >= 1")
        try:
            users = random_users(cfg, count, user_seed, defaults)
        except ValueError as exc:
            raise _infeasible(r, "users", exc) from None

    pso_kw = {}
    if parser.has_section("pso"):
        r.check_keys("pso", _PSO_KEYS)
        types = {f.name: f.type for f in dataclasses.fields(PsoConfig)}
        for key in parser["pso"]:
            t = types[key]
            if t in ("int", int):
                pso_kw[key] = r.number("pso", key, int)
            elif t in ("bool", bool):
                pso_kw[key] = r.boolean("pso", key)
            else:
                pso_kw[key] = r.number("pso", key)
    try:
        pso = PsoConfig(**pso_kw)
    except ValueError as exc:
        raise _infeasible(r, "pso", exc) from None

    methods, grid_step = METHODS, 0.01
    if parser.has_section("run"):
        r.check_keys("run", _RUN_KEYS)
        if "methods" in parser["run"]:
            try:
                methods = parse_methods(parser["run"]["methods"])
            except ValueError as exc:
                raise r.error("run", "methods", str(exc)) from None
        if "grid_step" in parser["run"]:
            grid_step = r.number("run", "grid_step")
            if not (0 < grid_step < cfg.waveguide_length):
                raise _infeasible(r, "run", ValueError(f"grid_step must lie in (0, L), got {grid_step}"))

    return Scenario(cfg=cfg, users=users, pso=pso, methods=methods, grid_step=grid_step)


def load_config(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", path) from None
    return parse_config(text, str(path))


def parse_methods(raw: str | Sequence[str]) -> tuple[str, ...]:
    items = [m.strip() for m in raw.split(",")] if isinstance(raw, str) else list(raw)
    items = [m for m in items if m]
    if not items:
        raise ValueError("no methods given")
    for m in items:
        if m not in METHODS:
            raise ValueError(f"unknown method {m!r}; expected a subset of {', '.join(METHODS)}")
    return tuple(dict.fromkeys(items))
