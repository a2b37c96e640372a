import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from mmblock import BlockerPopulation, Scenario
from mmblock.point import (p_los_closed, p_los_point, p_los_series, prob_height_miss,
                           prob_radius_miss, strip_model)
from mmblock.shadow import normalization_constant


def test_radius_miss_default(population):
    # (2/d_max) int_0^0.4 (t - 0.1)/0.3 dt over [0.1, 0.4] = 0.375
    assert prob_radius_miss(population) == pytest.approx(0.375, abs=1e-10)


def test_radius_miss_narrow_diameters():
    pop = BlockerPopulation(diameter_min_m=0.7999, diameter_max_m=0.8)
    assert prob_radius_miss(pop) == pytest.approx(0.0, abs=1e-4)


@settings(max_examples=30)
@given(st.floats(0.05, 0.5), st.floats(0.01, 0.5))
def test_radius_miss_closed_form(dmin, width):
    # uniform R on [a, b]: (2/d_max) * (b - a)/2 = (b - a)/(2b)
    pop = BlockerPopulation(diameter_min_m=dmin, diameter_max_m=dmin + width)
    a, b = pop.radius_min, pop.radius_max
    assert prob_radius_miss(pop) == pytest.approx((b - a) / (2 * b), abs=1e-9)


def test_height_miss_is_one_minus_n_over_r(baseline):
    n = normalization_constant(baseline, rel_tol=1e-12)
    assert prob_height_miss(baseline) == pytest.approx(1.0 - n / 30.0, abs=1e-10)


def test_height_miss_flat_link():
    from mmblock.model import height_cdf
    sc = Scenario(tx_height_m=1.6, rx_height_m=1.6)
    assert prob_height_miss(sc) == pytest.approx(height_cdf(sc.population, 1.6), abs=1e-10)


def test_height_miss_high_link():
    assert prob_height_miss(Scenario(tx_height_m=50, rx_height_m=40)) == pytest.approx(1.0)


def test_frozen_value(baseline):
    # 1 - exp(-Lambda (1 - q)) with mpmath N, see test_shadow
    assert p_los_point(baseline).probability == pytest.approx(0.486583492383377, abs=1e-9)


@settings(max_examples=100)
@given(st.floats(0.0, 200.0), st.floats(0.0, 1.0))
def test_series_matches_closed(lam, q):
    assert p_los_series(lam, q) == pytest.approx(p_los_closed(lam, q), abs=1e-9)


def test_trivial_cases():
    assert p_los_series(0.0, 0.3) == 1.0
    assert p_los_series(50.0, 1.0) == pytest.approx(1.0, abs=1e-12)
    sc = replace(Scenario(), population=replace(Scenario().population, density_per_m2=0.0))
    est = p_los_point(sc)
    assert est.p_los == 1.0 and est.degenerate


def test_strip(baseline):
    s = strip_model(baseline)
    assert s.area_intensity == pytest.approx(0.3 * 30 * 0.8)
    assert 0 <= s.per_blocker_miss <= 1
    assert s.per_blocker_miss == pytest.approx(
        s.prob_radius_miss + (1 - s.prob_radius_miss) * s.prob_height_miss)


def _p(sc):
    return p_los_point(sc).p_los


def test_monotonicity(baseline):
    dens = [_p(replace(baseline, population=replace(baseline.population, density_per_m2=v)))
            for v in (0.1, 0.3, 0.5)]
    dist = [_p(replace(baseline, distance_m=v)) for v in (20, 30, 40)]
    tx = [_p(replace(baseline, tx_height_m=v)) for v in (3, 4, 6)]
    assert dens[0] >= dens[1] >= dens[2]
    assert dist[0] >= dist[1] >= dist[2]
    assert tx[0] <= tx[1] <= tx[2]
    assert p_los_point(baseline).numerical_error < 1e-9
