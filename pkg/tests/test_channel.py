import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pinchopt.channel import (
    SPEED_OF_LIGHT,
    AntennaPosition,
    ScenarioConfig,
    UserSpec,
    achievable_rate,
    dbm_to_watts,
    eta,
)

from oracles import rate as rate_oracle

ETA_28GHZ = 7.259481705540116e-07
NOISE_M94 = 3.9810717055349697e-13
RATE_EXAMPLE = 1.2395122118855542  # (10, 5), x_pin 0, d 3, 1e-4 W, 3.98e-13 W, 28 GHz

coord = st.floats(-200, 200)
power = st.floats(1e-9, 10.0)


def test_eta_unity():
    assert eta(SPEED_OF_LIGHT / (4 * math.pi)) == pytest.approx(1.0, rel=1e-15)


def test_eta_28ghz():
    assert eta(28e9) == pytest.approx(ETA_28GHZ, rel=1e-15)


def test_eta_inverse_square():
    assert eta(56e9) == pytest.approx(eta(28e9) / 4, rel=1e-15)


@pytest.mark.parametrize("f", [0.0, -1.0, math.nan])
def test_eta_rejects(f):
    with pytest.raises(ValueError):
        eta(f)


def test_dbm():
    assert dbm_to_watts(0) == pytest.approx(1e-3, rel=1e-15)
    assert dbm_to_watts(30) == 1.0
    assert dbm_to_watts(-94) == pytest.approx(NOISE_M94, rel=1e-15)
    with pytest.raises(ValueError):
        dbm_to_watts(math.inf)


def test_rate_zero_power():
    assert achievable_rate((5.0, 2.0), AntennaPosition(0.0), 3.0, 0.0, 1e-13, 28e9) == 0.0


def test_rate_three_bits():
    noise = 1e-13
    p = 7 * 9 * noise / eta(28e9)
    assert achievable_rate((20.0, 0.0), AntennaPosition(20.0), 3.0, p, noise, 28e9) == pytest.approx(3.0, rel=1e-14)


def test_rate_hand_evaluation():
    r = achievable_rate((10.0, 5.0), AntennaPosition(0.0), 3.0, 1e-4, 3.98e-13, 28e9)
    assert r == pytest.approx(RATE_EXAMPLE, rel=1e-14)


def test_rate_arrays():
    x = np.array([0.0, 10.0, 20.0])
    r = achievable_rate((x, np.zeros(3)), AntennaPosition(10.0), 3.0, 1e-4, 1e-13, 28e9)
    assert r.shape == (3,) and r[1] > r[0] == pytest.approx(r[2])


def test_rate_rejects():
    with pytest.raises(ValueError):
        achievable_rate((0.0, 0.0), AntennaPosition(0.0), 3.0, 1.0, 0.0, 28e9)
    with pytest.raises(ValueError):
        achievable_rate((0.0, 0.0), AntennaPosition(0.0), 3.0, -1.0, 1e-13, 28e9)


@given(coord, coord, st.floats(0, 50), power)
def test_rate_reflection(x, y, xp, p):
    ant = AntennaPosition(xp)
    assert achievable_rate((x, y), ant, 3.0, p, 1e-13, 28e9) == achievable_rate((x, -y), ant, 3.0, p, 1e-13, 28e9)


@given(coord, coord, st.floats(0, 50), power)
def test_rate_matches_oracle(x, y, xp, p):
    r = achievable_rate((x, y), AntennaPosition(xp), 3.0, p, 1e-13, 28e9)
    assert r == pytest.approx(rate_oracle(x, y, xp, 3.0, p, 1e-13, 28e9), rel=1e-12)


@given(coord, coord, st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
def test_rate_increasing_concave_in_power(x, y, p1, p2):
    lo, hi = sorted((p1, p2))
    if hi - lo < 1e-9:
        return
    ant = AntennaPosition(0.0)
    f = lambda p: achievable_rate((x, y), ant, 3.0, p, 1e-13, 28e9)
    assert f(hi) > f(lo)
    assert f(0.5 * (lo + hi)) >= 0.5 * (f(lo) + f(hi)) - 1e-12


@given(coord, coord, st.floats(0, 50))
def test_rate_maximized_under_antenna(x, y, xp):
    ant = AntennaPosition(xp)
    best = achievable_rate((xp, 0.0), ant, 3.0, 1e-4, 1e-13, 28e9)
    assert achievable_rate((x, y), ant, 3.0, 1e-4, 1e-13, 28e9) <= best


def test_defaults():
    cfg = ScenarioConfig()
    assert (cfg.waveguide_length, cfg.waveguide_height, cfg.carrier_freq) == (50.0, 3.0, 28e9)
    assert cfg.region_x == (0.0, 120.0) and cfg.region_y == (-10.0, 10.0)
    assert cfg.noise_power == pytest.approx(NOISE_M94, rel=1e-15)
    u = UserSpec(1.0, 2.0)
    assert (u.sigma2, u.target_rate, u.epsilon) == (1.0, 3.0, 0.01)


@pytest.mark.parametrize("kw", [
    {"waveguide_length": 0.0}, {"waveguide_height": -1.0}, {"carrier_freq": math.inf},
    {"region_x": (5.0, 5.0)}, {"region_y": (1.0, -1.0)},
])
def test_config_invariants(kw):
    with pytest.raises(ValueError):
        ScenarioConfig(**kw)


@pytest.mark.parametrize("kw", [
    {"sigma2": 0.0}, {"epsilon": 0.0}, {"epsilon": 1.0}, {"target_rate": -1.0}, {"noise_power": 0.0},
])
def test_user_invariants(kw):
    with pytest.raises(ValueError):
        UserSpec(0.0, 0.0, **kw)


def test_antenna_bounds():
    with pytest.raises(ValueError):
        AntennaPosition(-0.1)
    with pytest.raises(ValueError):
        AntennaPosition(50.1).check_within(ScenarioConfig())
    AntennaPosition(50.0).check_within(ScenarioConfig())
