import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sint
from scipy.special import ndtr

from mmblock import BlockerPopulation, Scenario
from mmblock.errors import DegenerateScenario, NumericalError
from mmblock.model import exceed_along_path
from mmblock.shadow import (circumference_intensity, distance_pdf, normalization_constant,
                            shadow_tail_mass, shadow_width_distribution)

# Independent mpmath evaluation (30 digits) at the default scenario:
#   N    = int_0^r g,            mu = (lambda/r) int_0^r x g(x) dx,
#   E[W] = r E[D] (1/N) int_0^r g(x)/x dx   (W = rD/L, D independent of L).
N_ORACLE = 4.44445238362048
MU_ORACLE = 1.22839746255656
MEAN_W_ORACLE = 0.544355441706824


def _with(sc, **pop):
    return replace(sc, population=replace(sc.population, **pop))


def test_constants_match_oracle(baseline):
    assert normalization_constant(baseline) == pytest.approx(N_ORACLE, rel=1e-9)
    assert circumference_intensity(baseline) == pytest.approx(MU_ORACLE, rel=1e-9)


def test_shadow_mean_matches_oracle(baseline):
    w = shadow_width_distribution(baseline)
    assert w.mean == pytest.approx(MEAN_W_ORACLE, rel=1e-5)


def test_shadow_mean_sampling(baseline):
    rng = np.random.default_rng(7)
    n = 1_000_000
    r = baseline.distance_m
    # rejection from U(0, r); acceptance rate is N / r ~ 0.15
    x = rng.uniform(0, r, 8 * n)
    keep = rng.random(8 * n) < exceed_along_path(baseline, x)
    length = x[keep][:n]
    assert length.size == n
    d = rng.uniform(0.2, 0.8, n)
    sample = r * d / length
    se = sample.std() / math.sqrt(n)
    w = shadow_width_distribution(baseline)
    assert abs(sample.mean() - w.mean) < 3 * se
    # a few quantiles of the tabulated cdf
    for q in (0.25, 0.5, 0.9):
        t = np.quantile(sample, q)
        assert w.cdf(t) == pytest.approx(q, abs=3e-3)


def test_distance_pdf_normalised_and_shaped(baseline):
    f = distance_pdf(baseline)
    assert f.total_mass == pytest.approx(1.0, abs=1e-6)
    x = f.grid[[2800, 3400, 4000]]
    g = exceed_along_path(baseline, x)
    np.testing.assert_allclose(f.pdf(x[1:]) / f.pdf(x[0]), g[1:] / g[0], rtol=1e-9)


def test_shadow_pdf_normalised(baseline):
    w = shadow_width_distribution(baseline)
    assert w.info["raw_mass"] == pytest.approx(1.0, abs=1e-6)
    assert w.total_mass == pytest.approx(1.0, abs=1e-12)
    assert w.cdf(0.2 - 1e-9) == 0.0
    assert w.cdf(0.19) == 0.0


def test_tail_mass_matches_quad(baseline):
    # Pr{W > w} = Pr{L < r D / w}, by double quadrature over (x, D)
    n_const = normalization_constant(baseline)
    r, w = 30.0, 1.5
    g = lambda x: float(exceed_along_path(baseline, x))
    inner = lambda dd: sint.quad(g, 0, min(r, r * dd / w), limit=200)[0]
    ref = sint.quad(inner, 0.2, 0.8, limit=200)[0] / 0.6 / n_const
    assert shadow_tail_mass(baseline, w, n_const) == pytest.approx(ref, rel=1e-6)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.01, 2.0))
def test_mu_linear_in_density(lam):
    base = Scenario()
    ratio = circumference_intensity(_with(base, density_per_m2=lam)) / circumference_intensity(base)
    assert ratio == pytest.approx(lam / 0.3, rel=1e-10)


def test_taller_tx_fewer_blockers(baseline):
    assert circumference_intensity(replace(baseline, tx_height_m=6.0)) <= \
        circumference_intensity(baseline)


def test_mean_width_independent_of_distance():
    a = shadow_width_distribution(Scenario(distance_m=30.0)).mean
    b = shadow_width_distribution(Scenario(distance_m=90.0)).mean
    assert a == pytest.approx(b, rel=1e-5)


def test_zero_density_mu():
    assert circumference_intensity(_with(Scenario(), density_per_m2=0.0)) == 0.0


def test_unreachable_los_is_degenerate():
    # LoS at least 3 m above ground, people ~1 m tall
    sc = Scenario(tx_height_m=6.0, rx_height_m=3.0,
                  population=BlockerPopulation(height_mean_m=1.0, height_std_m=0.01))
    with pytest.raises(DegenerateScenario):
        shadow_width_distribution(sc)


def test_blockers_at_tx_unbounded_shadow():
    # Tx below typical body height: W = rD/L is unbounded near the Tx
    sc = Scenario(tx_height_m=1.5)
    with pytest.raises(NumericalError):
        shadow_width_distribution(sc, clip=False)
    w = shadow_width_distribution(sc)
    assert w.grid[-1] == pytest.approx(math.pi * 30.0)
    assert w.info["clipped_mass"] == pytest.approx(shadow_tail_mass(sc, math.pi * 30.0), rel=1e-9)
    assert w.total_mass == pytest.approx(1.0, abs=1e-12)
    assert w.info["raw_mass"] == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("h_t", [3.0, 8.0, 20.0])
def test_tall_and_short_tx_heights(h_t):
    w = shadow_width_distribution(Scenario(tx_height_m=h_t))
    assert w.info["raw_mass"] == pytest.approx(1.0, abs=1e-6)
