"""Scenario description, blocker population and LoS-height geometry."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import DomainError, ValidationError

__all__ = [
    "BlockerPopulation", "Scenario", "BlockageEstimate",
    "los_height", "height_exceed_prob", "height_cdf", "thinned_intensity",
]

METHODS = ("analytic-point", "analytic-interval", "monte-carlo")


@dataclass(frozen=True)
class BlockerPopulation:
    """Humans as cylinders: truncated-Normal height, Uniform diameter."""

    density_per_m2: float = 0.3
    height_mean_m: float = 1.7
    height_std_m: float = 0.1
    diameter_min_m: float = 0.2
    diameter_max_m: float = 0.8

    def __post_init__(self):
        if not self.density_per_m2 >= 0:
            raise ValidationError(f"density_per_m2 must be >= 0, got {self.density_per_m2}")
        if not self.height_std_m > 0:
            raise ValidationError(f"height_std_m must be > 0, got {self.height_std_m}")
        if not math.isfinite(self.height_mean_m):
            raise ValidationError("height_mean_m must be finite")
        if not 0 < self.diameter_min_m < self.diameter_max_m:
            raise ValidationError(
                "need 0 < diameter_min_m < diameter_max_m, got "
                f"{self.diameter_min_m}, {self.diameter_max_m}")

    @property
    def mean_diameter(self) -> float:
        return 0.5 * (self.diameter_min_m + self.diameter_max_m)

    @property
    def radius_min(self) -> float:
        return 0.5 * self.diameter_min_m

    @property
    def radius_max(self) -> float:
        return 0.5 * self.diameter_max_m

    @property
    def _kept_mass(self) -> float:
        # Pr{H > 0} of the untruncated Normal
        return float(ndtr(self.height_mean_m / self.height_std_m))

    def radius_cdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.clip((t - self.radius_min) / (self.radius_max - self.radius_min), 0.0, 1.0)


@dataclass(frozen=True)
class Scenario:
    """Tx/Rx geometry plus the blocker population.

    ``rx_length_m = 0`` is the infinitesimal receiver.
    """

    tx_height_m: float = 4.0
    rx_height_m: float = 1.3
    distance_m: float = 30.0
    rx_length_m: float = 0.1
    population: BlockerPopulation = field(default_factory=BlockerPopulation)

    def __post_init__(self):
        if not self.rx_height_m > 0:
            raise ValidationError(f"rx_height_m must be > 0, got {self.rx_height_m}")
        if not self.tx_height_m >= self.rx_height_m:
            raise ValidationError(
                f"tx_height_m ({self.tx_height_m}) must not be below rx_height_m "
                f"({self.rx_height_m})")
        if not math.isfinite(self.tx_height_m):
            raise ValidationError("tx_height_m must be finite")
        if not (self.distance_m > 0 and math.isfinite(self.distance_m)):
            raise ValidationError(f"distance_m must be > 0, got {self.distance_m}")
        if not self.rx_length_m >= 0:
            raise ValidationError(f"rx_length_m must be >= 0, got {self.rx_length_m}")
        if self.distance_m < 10 * self.population.diameter_max_m:
            warnings.warn(
                f"distance_m={self.distance_m} is below 10*diameter_max_m; the "
                "chord-for-arc shadow approximation is loose here", stacklevel=3)

    @property
    def slope(self) -> float:
        """Drop of the LoS height per metre of ground distance."""
        return (self.tx_height_m - self.rx_height_m) / self.distance_m

    @property
    def link_distance_3d(self) -> float:
        return math.hypot(self.distance_m, self.tx_height_m - self.rx_height_m)


@dataclass(frozen=True)
class BlockageEstimate:
    probability: float
    method: str
    half_width_95: float = 0.0
    trials: int = 0
    numerical_error: float = 0.0
    degenerate: bool = False

    @property
    def p_los(self) -> float:
        return 1.0 - self.probability

    @classmethod
    def from_counts(cls, hits: int, trials: int) -> "BlockageEstimate":
        p = hits / trials
        return cls(p, "monte-carlo", 1.96 * math.sqrt(p * (1 - p) / trials), trials)


def _check_x(scenario: Scenario, x):
    x = np.asarray(x, dtype=float)
    r = scenario.distance_m
    slack = 1e-12 * r
    if np.any(x < -slack) or np.any(x > r + slack) or np.any(np.isnan(x)):
        raise DomainError(f"x must lie in [0, {r}]")
    return np.clip(x, 0.0, r)


def los_height(scenario: Scenario, x):
    """Height of the Tx-Rx segment above ground ``x`` metres from the Tx base."""
    x = _check_x(scenario, x)
    h = scenario.tx_height_m - scenario.slope * x
    return float(h) if h.ndim == 0 else h


def height_exceed_prob(pop: BlockerPopulation, h):
    """Pr{H > h} for the zero-truncated Normal height."""
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise DomainError("height must be >= 0")
    z = (h - pop.height_mean_m) / pop.height_std_m
    g = ndtr(-z) / pop._kept_mass
    return float(g) if g.ndim == 0 else g


def height_cdf(pop: BlockerPopulation, h):
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise DomainError("height must be >= 0")
    z = (h - pop.height_mean_m) / pop.height_std_m
    lost = ndtr(-pop.height_mean_m / pop.height_std_m)
    c = (ndtr(z) - lost) / pop._kept_mass
    return float(c) if c.ndim == 0 else c


def exceed_along_path(scenario: Scenario, x):
    """g(x): probability a blocker at ground distance x reaches the LoS."""
    return height_exceed_prob(scenario.population, los_height(scenario, x))


def thinned_intensity(scenario: Scenario, x):
    return scenario.population.density_per_m2 * exceed_along_path(scenario, x)
