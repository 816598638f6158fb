import math

import numpy as np
import pytest

from pinchopt.allocation import min_power_user, power_coefficient
from pinchopt.channel import AntennaPosition, ScenarioConfig, UserSpec
from pinchopt.montecarlo import (
    OutageReport,
    block_rng,
    estimate_coverage,
    estimate_outage,
    sample_true_position,
)
from pinchopt.specfun import marcum_q1

CFG = ScenarioConfig()


def test_report_fields():
    rep = OutageReport.from_counts(10_000, 100, 0.01)
    assert rep.empirical_outage == 0.01
    assert rep.standard_error == pytest.approx(math.sqrt(0.01 * 0.99 / 10_000))
    assert rep.pass_3se
    assert not OutageReport.from_counts(10_000, 200, 0.01).pass_3se


def test_degenerate_sampler():
    u = UserSpec(4.0, -2.0, sigma2=1e-12)
    x, y = sample_true_position(u, np.random.default_rng(0), 1000)
    assert np.max(np.hypot(x - 4.0, y + 2.0)) < 1e-4


def test_sampler_moments():
    u = UserSpec(0.0, 0.0)
    x, y = sample_true_position(u, np.random.default_rng(1), 1_000_000)
    assert abs(x.var() - 1) < 0.01 and abs(y.var() - 1) < 0.01
    assert abs(np.corrcoef(x, y)[0, 1]) < 0.005


def test_zero_power_always_outage():
    rep = estimate_outage(UserSpec(5, 0), AntennaPosition(0), 0.0, CFG, 10_000)
    assert rep.empirical_outage == 1.0


def test_huge_power_never_outage():
    rep = estimate_outage(UserSpec(100, 9), AntennaPosition(0), 1e6, CFG, 100_000)
    assert rep.empirical_outage == 0.0


def test_calibrated_at_pmin():
    u = UserSpec(40.0, 6.0)
    ant = AntennaPosition(31.0)
    rep = estimate_outage(u, ant, min_power_user(u, ant, CFG).p_min, CFG, 1_000_000, seed=5)
    assert rep.pass_3se


def test_too_few_trials():
    with pytest.raises(ValueError):
        estimate_outage(UserSpec(5, 0), AntennaPosition(0), 1.0, CFG, 100)
    with pytest.raises(ValueError):
        estimate_coverage(1.0, 1.0, 1.0, 10)


def test_reproducible():
    u, ant = UserSpec(12.0, 1.0), AntennaPosition(5.0)
    a = estimate_outage(u, ant, 1e-4, CFG, 200_000, seed=3, stream=4)
    assert a == estimate_outage(u, ant, 1e-4, CFG, 200_000, seed=3, stream=4)
    assert a != estimate_outage(u, ant, 1e-4, CFG, 200_000, seed=4, stream=4)


def test_block_streams_independent_of_order():
    first = block_rng(1, 2, 3).random(5)
    block_rng(1, 2, 0).random(100)
    np.testing.assert_array_equal(first, block_rng(1, 2, 3).random(5))


def test_coverage_zero_radius():
    assert estimate_coverage(0.0, 1.0, 0.0, 10_000) == 0.0


@pytest.mark.parametrize("l,s,r", [(0.0, 1.0, math.sqrt(2 * math.log(100))), (5.0, 1.0, 6.0), (3.0, 2.0, 4.5)])
def test_coverage_matches_q1(l, s, r):
    n = 1_000_000
    exact = 1 - marcum_q1(l / s, r / s)
    assert abs(estimate_coverage(l, s, r, n, seed=2) - exact) <= 3 * math.sqrt(exact * (1 - exact) / n)


@pytest.mark.parametrize("power", [2e-5, 8e-5, 3e-4])
def test_outage_coverage_duality(power):
    u, ant = UserSpec(30.0, -3.0, sigma2=2.0), AntennaPosition(22.0)
    n = 500_000
    rep = estimate_outage(u, ant, power, CFG, n, seed=6)
    rad2 = power / power_coefficient(u, CFG) - CFG.waveguide_height**2
    if rad2 <= 0:
        expected = 1.0
    else:
        l = math.hypot(30.0 - 22.0, 3.0)
        expected = marcum_q1(l / u.sigma, math.sqrt(rad2) / u.sigma)
    band = 3 * math.sqrt(expected * (1 - expected) / n)
    assert abs(rep.empirical_outage - expected) <= max(band, 1.0 / n)
