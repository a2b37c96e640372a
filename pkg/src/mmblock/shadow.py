"""Shadows cast by single blockers on the circle of radius r around the Tx.

A blocker of diameter D at ground distance L from the Tx occludes an arc
of length W = r*D/L (chord approximation). Blocker centres that can reach
the LoS project onto the circle as a homogeneous Poisson process whose
intensity is returned by :func:`circumference_intensity`.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import simpson, trapezoid

from .errors import DegenerateScenario, NumericalError, ValidationError
from .model import Scenario, exceed_along_path
from .quadrature import integrate, integrate_batch
from .tabulated import TabulatedDistribution

__all__ = [
    "normalization_constant", "circumference_intensity", "distance_pdf",
    "shadow_tail_mass", "shadow_width_distribution",
]

DEFAULT_GRID_POINTS = 4096
DEFAULT_TAIL_EPS = 1e-9
DEFAULT_REL_TOL = 1e-8
# N below this means no blocker can reach the LoS anywhere on the path
# integrals below ABS_FLOOR times their natural scale are treated as zero;
# underflowing Normal tails otherwise drive relative refinement forever
ABS_FLOOR = 1e-16
# N / r below this: no blocker reaches the LoS
DEGENERATE_N = 1e-14


def _front_points(scenario: Scenario):
    """Ground distances where the LoS height crosses mu_H + k*sigma_H.

    g(x) changes from ~0 to ~1 across these points; handing them to the
    quadrature as breakpoints keeps the first Simpson pass honest.
    """
    s = scenario.slope
    if s == 0:
        return []
    pop = scenario.population
    ks = np.arange(-8, 9)
    xs = (scenario.tx_height_m - pop.height_mean_m - ks * pop.height_std_m) / s
    return [float(x) for x in xs if 0 < x < scenario.distance_m]


def _g(scenario):
    return lambda x: exceed_along_path(scenario, x)


def normalization_constant(scenario: Scenario, rel_tol=DEFAULT_REL_TOL) -> float:
    """N = integral of g over (0, r)."""
    r = scenario.distance_m
    return integrate(_g(scenario), 0.0, r, rel_tol=rel_tol,
                     abs_tol=ABS_FLOOR * r, points=_front_points(scenario))


def circumference_intensity(scenario: Scenario, rel_tol=DEFAULT_REL_TOL) -> float:
    """Intensity mu (per metre of arc) of LoS-capable blocker projections."""
    lam = scenario.population.density_per_m2
    if lam == 0:
        return 0.0
    g = _g(scenario)
    r = scenario.distance_m
    moment = integrate(lambda x: x * g(x), 0.0, r, rel_tol=rel_tol,
                       abs_tol=ABS_FLOOR * r * r, points=_front_points(scenario))
    return lam * moment / r


def distance_pdf(scenario: Scenario, grid_points=DEFAULT_GRID_POINTS,
                 rel_tol=DEFAULT_REL_TOL) -> TabulatedDistribution:
    """Density of the distance L from the Tx to a LoS-capable blocker."""
    n_const = normalization_constant(scenario, rel_tol)
    if not n_const >= DEGENERATE_N * scenario.distance_m:
        raise DegenerateScenario("no blocker height can reach the LoS (N ~ 0)")
    grid = np.linspace(0.0, scenario.distance_m, int(grid_points))
    return TabulatedDistribution.from_pdf(grid, _g(scenario)(grid) / n_const,
                                          normalization=n_const)


def shadow_tail_mass(scenario: Scenario, w: float, n_const=None,
                     rel_tol=DEFAULT_REL_TOL) -> float:
    """Pr{W > w} = Pr{L < r*D/w}, for w >= d_max."""
    pop = scenario.population
    r = scenario.distance_m
    dmin, dmax = pop.diameter_min_m, pop.diameter_max_m
    if n_const is None:
        n_const = normalization_constant(scenario, rel_tol)
    g = _g(scenario)
    upper = min(r, r * dmax / w)

    def integrand(x):
        # Pr{D > w x / r}
        return g(x) * np.clip((dmax - w * x / r) / (dmax - dmin), 0.0, 1.0)

    pts = [p for p in _front_points(scenario) if p < upper] + [r * dmin / w]
    return integrate(integrand, 0.0, upper, rel_tol=rel_tol,
                     abs_tol=ABS_FLOOR * n_const, points=pts) / n_const


def _octave_grid(dmin, dmax, w_max, grid_points):
    """Nodes on [d_min, w_max]: half the budget on [d_min, d_max], then a
    quarter per doubling of the extent above d_min, so the step grows with
    w where the density is smooth and decays. d_max is always a node."""
    body = max(int(grid_points) // 2, 8)
    per = max(int(grid_points) // 4, 8)
    pieces = [np.linspace(dmin, dmax, body + 1)]
    lo, width = dmax, dmax - dmin
    while lo < w_max * (1 - 1e-12):
        hi = min(dmin + 2 * width, w_max)
        n = max(int(math.ceil(per * (hi - lo) / width)), 2)
        pieces.append(np.linspace(lo, hi, n + 1)[1:])
        lo, width = hi, 2 * width
    return np.concatenate(pieces)


def shadow_width_distribution(scenario: Scenario, grid_points=DEFAULT_GRID_POINTS,
                              tail_eps=DEFAULT_TAIL_EPS, rel_tol=DEFAULT_REL_TOL,
                              max_extent=None, clip=True) -> TabulatedDistribution:
    """Tabulate f_W on [d_min, w_max].

    The extent above d_min doubles until Pr{W > w_max} < ``tail_eps``.
    The tabulated density is rescaled to unit trapezoid mass. The Simpson
    mass of the unscaled density, a direct normalisation check, is kept in
    ``info["raw_mass"]``.

    A body cannot shadow more than half the circle, so W is capped at
    ``max_extent`` (default pi*r). If the tail is still heavier than
    ``tail_eps`` there, which happens when tall-enough blockers stand next
    to the Tx and W = r*D/L is unbounded, the remaining mass is placed at
    the cap as a narrow spike in the last grid cell and reported as
    ``info["clipped_mass"]``; with ``clip=False`` this raises instead.

    Raises
    ------
    DegenerateScenario
        If no blocker can reach the LoS.
    NumericalError
        If the tail needs clipping and ``clip`` is false.
    """
    pop = scenario.population
    r = scenario.distance_m
    dmin, dmax = pop.diameter_min_m, pop.diameter_max_m
    n_const = normalization_constant(scenario, rel_tol)
    if not n_const >= DEGENERATE_N * scenario.distance_m:
        raise DegenerateScenario("no blocker height can reach the LoS (N ~ 0)")
    cap = math.pi * r if max_extent is None else float(max_extent)
    if cap <= dmax:
        raise ValidationError("max_extent must exceed diameter_max_m")

    w_max = dmax
    tail = shadow_tail_mass(scenario, w_max, n_const, rel_tol)
    while tail >= tail_eps and w_max < cap:
        w_max = min(dmin + 2 * (w_max - dmin), cap)
        tail = shadow_tail_mass(scenario, w_max, n_const, rel_tol)
    clipped = tail if tail >= tail_eps else 0.0
    if clipped and not clip:
        raise NumericalError(
            f"shadow tail mass {tail:.3g} still above {tail_eps:g} at the "
            f"maximal extent {cap:.4g} m; blockers near the Tx reach the LoS",
            achieved_tolerance=tail)

    grid = _octave_grid(dmin, dmax, w_max, grid_points)
    lower = r * dmin / grid
    upper = np.minimum(r, r * dmax / grid)
    g = _g(scenario)
    moment, _ = integrate_batch(lambda x: x * g(x), lower, upper,
                                rel_tol=rel_tol,
                                abs_tol=ABS_FLOOR * r * (dmax - dmin) * n_const)
    pdf = moment / (r * (dmax - dmin) * n_const)
    pdf[0] = 0.0
    # Simpson mass measures the density itself; the trapezoid mass (biased
    # by O(step^2)) is what the tabulated cdf must be scaled by to reach 1
    raw_mass = float(simpson(pdf, x=grid))
    trap_mass = float(trapezoid(pdf, grid))
    pdf = pdf * ((1.0 - clipped) / trap_mass)
    if clipped:
        pdf[-1] += 2.0 * clipped / (grid[-1] - grid[-2])
    return TabulatedDistribution.from_pdf(grid, pdf, raw_mass=raw_mass + clipped,
                                          trapezoid_mass=trap_mass, tail_mass=tail,
                                          clipped_mass=clipped, normalization=n_const)
