"""LoS probability of an infinitesimal receiver via the blocking strip.

Every blocker able to cut the Tx-Rx segment has its centre in an r x d_max
strip around it. The count there is Poisson(lambda_I r d_max); each one
misses either laterally (its radius is smaller than its offset) or
vertically (it is too short at its position), independently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammaln

from .model import BlockageEstimate, BlockerPopulation, Scenario, height_cdf, los_height
from .quadrature import integrate
from .shadow import _front_points

__all__ = [
    "StripModel", "prob_radius_miss", "prob_height_miss", "strip_model",
    "p_los_series", "p_los_closed", "p_los_point",
]


@dataclass(frozen=True)
class StripModel:
    strip_length_m: float
    strip_width_m: float
    area_intensity: float
    prob_radius_miss: float
    prob_height_miss: float

    @property
    def per_blocker_miss(self) -> float:
        b0 = self.prob_radius_miss
        return b0 + (1.0 - b0) * self.prob_height_miss


def prob_radius_miss(pop: BlockerPopulation, rel_tol=1e-10) -> float:
    """Pr{B0}: lateral offset ~ U(-d_max/2, d_max/2) exceeds the radius."""
    r_max = pop.radius_max
    density = 1.0 / (2.0 * r_max)
    # F_R(|y|) is even in y
    half = integrate(lambda y: density * pop.radius_cdf(y), 0.0, r_max,
                     rel_tol=rel_tol, points=[pop.radius_min])
    return 2.0 * half


def prob_height_miss(scenario: Scenario, rel_tol=1e-10) -> float:
    """Pr{C0}: a blocker uniform on (0, r) is lower than the LoS there."""
    r = scenario.distance_m
    pop = scenario.population
    val = integrate(lambda x: height_cdf(pop, los_height(scenario, x)) / r,
                    0.0, r, rel_tol=rel_tol, points=_front_points(scenario))
    return min(max(val, 0.0), 1.0)


def strip_model(scenario: Scenario, rel_tol=1e-10) -> StripModel:
    pop = scenario.population
    r = scenario.distance_m
    return StripModel(
        strip_length_m=r,
        strip_width_m=pop.diameter_max_m,
        area_intensity=pop.density_per_m2 * r * pop.diameter_max_m,
        prob_radius_miss=prob_radius_miss(pop, rel_tol),
        prob_height_miss=prob_height_miss(scenario, rel_tol),
    )


def p_los_series(area_intensity: float, miss: float, term_tol=1e-12) -> float:
    """sum_i p_i q^i with Poisson weights p_i, truncated once p_i < term_tol
    past the mode."""
    lam = float(area_intensity)
    if lam == 0:
        return 1.0
    terms = []
    i = 0
    log_lam = math.log(lam)
    while True:
        log_p = -lam + i * log_lam - gammaln(i + 1)
        p = math.exp(log_p)
        terms.append(p * miss ** i)
        if i > lam and p < term_tol:
            break
        i += 1
    return math.fsum(terms)


def p_los_closed(area_intensity: float, miss: float) -> float:
    return math.exp(-area_intensity * (1.0 - miss))


def p_los_point(scenario: Scenario, rel_tol=1e-10) -> BlockageEstimate:
    """Point-receiver estimate; ``.probability`` is blockage, ``.p_los`` LoS."""
    strip = strip_model(scenario, rel_tol)
    if strip.area_intensity == 0:
        return BlockageEstimate(0.0, "analytic-point", degenerate=True)
    p_los = p_los_closed(strip.area_intensity, strip.per_blocker_miss)
    series = p_los_series(strip.area_intensity, strip.per_blocker_miss)
    return BlockageEstimate(1.0 - p_los, "analytic-point",
                            numerical_error=abs(series - p_los))
