"""Full blockage of a receiver of length l by the shadow coverage process.

Shadows on the circle form a Boolean model: left ends arrive as a Poisson
process of rate mu, lengths are i.i.d. with the tabulated f_W. Covered
(blocked) and vacant (unblocked) stretches alternate; ends of blocked
stretches are renewal epochs. With the renewal density f known in closed
form, the cycle density f_xi follows from the renewal equation

    f(x) = f_xi(x) + int_0^x f_xi(x - y) f(y) dy

and the blocked-length law from F_eta = F_xi + f_xi / mu.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import DegenerateScenario, NumericalError
from .model import BlockageEstimate, Scenario
from .shadow import circumference_intensity, shadow_width_distribution
from .tabulated import TabulatedDistribution

__all__ = [
    "RenewalSolution", "solve_renewal", "blockage_prob_interval",
    "special_case_blockage", "vacancy_blockage", "interval_blockage",
]

STEPS_PER_MEAN_SHADOW = 200
TAIL_EPS = 1e-9
MAX_POINTS = 250_000


@dataclass(frozen=True, eq=False)
class RenewalSolution:
    mu: float
    mean_shadow: float
    renewal_density: TabulatedDistribution
    cycle_density: TabulatedDistribution
    blocked_cdf: TabulatedDistribution
    mean_unblocked: float
    mean_blocked: float
    mean_cycle: float
    truncation_error: float = 0.0
    as_printed: bool = False

    @property
    def mean_cycle_closed(self) -> float:
        return math.exp(self.mu * self.mean_shadow) / self.mu

    @property
    def mean_blocked_closed(self) -> float:
        return math.expm1(self.mu * self.mean_shadow) / self.mu


def _survival_integral(shadow: TabulatedDistribution):
    """x -> int_0^x [1 - F_W(y)] dy, exact in the limit x -> inf.

    Anchored at the tabulated mean so the large-x value is E[W] itself;
    the renewal density then tends to mu*exp(-mu*E[W]) with no drift.
    """
    w = shadow.grid
    sf = 1.0 - shadow.cdf_values
    # int_x^{w_max} (1 - F_W) on the shadow grid
    upper_tail = trapezoid(sf, w) - cumulative_trapezoid(sf, w, initial=0.0)

    def s(x):
        x = np.asarray(x, dtype=float)
        inside = shadow.mean - np.interp(x, w, upper_tail)
        out = np.where(x < w[0], x, inside)
        return np.where(x > w[-1], shadow.mean + (x - w[-1]) * sf[-1], out)

    return s


def _volterra_forward(forcing, step, phi_done=None, kernel_len=None):
    """Solve f = phi + (phi * f) for phi on a uniform grid, trapezoid weights.

    Entries already in ``phi_done`` are kept, so a longer grid only costs
    the new rows. ``kernel_len`` caps the convolution at y <= kernel_len*step
    (fixed-limit reading only).
    """
    f = forcing
    n = f.size
    phi = np.zeros(n)
    m = 0 if phi_done is None else phi_done.size
    phi[:m] = phi_done if m else 0.0
    denom = 1.0 + 0.5 * step * f[0]
    if m == 0:
        phi[0] = f[0]
        m = 1
    for k in range(m, n):
        j = k - 1 if kernel_len is None else min(k - 1, kernel_len)
        acc = np.dot(phi[k - 1:k - 1 - j:-1], f[1:j + 1]) if j > 0 else 0.0
        phi[k] = (f[k] - step * (acc + 0.5 * phi[0] * f[k])) / denom
    return phi


def solve_renewal(scenario: Scenario, mu: float, shadow: TabulatedDistribution,
                  steps_per_mean=STEPS_PER_MEAN_SHADOW, tail_eps=TAIL_EPS,
                  max_points=MAX_POINTS, as_printed=False) -> RenewalSolution:
    """Tabulate f, f_xi and F_eta until 1 - F_xi < ``tail_eps``.

    With ``as_printed`` the exponent of the renewal density and the range
    of the renewal convolution stop at l instead of the running variable
    (the fixed-limit reading, kept for comparison). The grid extent is then taken from the
    regular solution so both are tabulated on the same abscissae.
    """
    if not mu > 0:
        raise DegenerateScenario("no blocker projections on the circle (mu = 0)")
    mean_w = shadow.mean
    step = mean_w / steps_per_mean
    surv = _survival_integral(shadow)

    if as_printed:
        regular = solve_renewal(scenario, mu, shadow, steps_per_mean, tail_eps,
                                max_points)
        n = regular.renewal_density.grid.size
        x = np.arange(n) * step
        l = scenario.rx_length_m
        forcing = mu * shadow.cdf(x) * math.exp(-mu * float(surv(l)))
        phi = _volterra_forward(forcing, step, kernel_len=int(math.floor(l / step + 1e-9)))
        return _assemble(mu, mean_w, x, forcing, phi, step, as_printed=True)

    # Grow the grid geometrically; forward substitution is restarted only
    # over the new part, so the total cost stays that of the final grid.
    # the cycle tail reaches 1e-9 only after many mean cycle lengths
    needed = 4 * math.exp(min(mu * mean_w, 50.0)) / mu / step
    if needed > max_points:
        raise NumericalError(
            f"mean cycle length {math.exp(min(mu * mean_w, 50.0)) / mu:.4g} m needs more "
            f"than {max_points} grid points at step {step:.3g} m; use a coarser step "
            f"(steps_per_mean) or a larger max_points", achieved_tolerance=1.0)
    n = max(1024, int(needed))
    phi = np.zeros(0)
    while True:
        x = np.arange(n) * step
        forcing = mu * shadow.cdf(x) * np.exp(-mu * surv(x))
        phi = _volterra_forward(forcing, step, phi_done=phi)
        cdf = cumulative_trapezoid(phi, x, initial=0.0)
        if 1.0 - cdf[-1] < tail_eps:
            break
        if n >= max_points:
            raise NumericalError(
                f"cycle tail 1-F_xi={1.0 - cdf[-1]:.3g} not below {tail_eps:g} within "
                f"{max_points} grid points; use a coarser step or tail tolerance",
                achieved_tolerance=1.0 - cdf[-1])
        n = min(2 * n, max_points)
    # trim to the first point past the tail tolerance
    cut = int(np.argmax(1.0 - cdf < tail_eps)) + 1
    cut = max(cut, 2)
    return _assemble(mu, mean_w, x[:cut], forcing[:cut], phi[:cut], step)


def _assemble(mu, mean_w, x, forcing, phi, step, as_printed=False):
    renewal = TabulatedDistribution.from_pdf(x, forcing)
    cycle = TabulatedDistribution.from_pdf(x, phi)
    raw = cycle.cdf_values + phi / mu
    f_eta = np.maximum.accumulate(np.clip(raw, 0.0, 1.0))
    clamp = float(np.max(np.abs(f_eta - raw)))
    # F_eta stored as a "cdf" with its density being the derivative
    blocked = TabulatedDistribution(x, np.gradient(f_eta, step), f_eta,
                                    float(trapezoid(1.0 - f_eta, x)),
                                    {"clamp": clamp})
    tail = 1.0 - cycle.total_mass
    # both means as survival integrals, the form E[eta] is defined by
    mean_cycle = float(trapezoid(1.0 - cycle.cdf_values, x))
    return RenewalSolution(
        mu=mu, mean_shadow=mean_w, renewal_density=renewal, cycle_density=cycle,
        blocked_cdf=blocked, mean_unblocked=1.0 / mu,
        mean_blocked=blocked.mean, mean_cycle=mean_cycle,
        truncation_error=abs(tail) * (x[-1] + cycle.mean), as_printed=as_printed)


def vacancy_blockage(mu: float, mean_shadow: float) -> float:
    """Blockage of a point: 1 - exp(-mu E[W])."""
    return -math.expm1(-mu * mean_shadow)


def special_case_blockage(mu, mean_shadow, length, as_printed=False) -> float:
    """Closed form valid when the receiver is shorter than d_min.

    The default is 1 - (1 + mu l) exp(-mu E[W]). ``as_printed`` returns the
    variant 1 - mu exp(-mu E[W]) (1 + mu l), kept for comparison; it is off
    by a factor mu in the exponential term and fails the l = 0 limit.
    """
    if as_printed:
        return 1.0 - mu * math.exp(-mu * mean_shadow) * (1.0 + mu * length)
    return 1.0 - (1.0 + mu * length) * math.exp(-mu * mean_shadow)


def interval_blockage(solution: RenewalSolution, length: float) -> float:
    """mu exp(-mu E[W]) * int_l^inf (1 - F_xi - f_xi/mu) dy by trapezoid."""
    eta = solution.blocked_cdf
    x = eta.grid
    sf = 1.0 - eta.cdf_values
    cum = cumulative_trapezoid(sf, x, initial=0.0)
    total = cum[-1]
    if length >= x[-1]:
        head = total + (length - x[-1]) * sf[-1]
    else:
        head = float(np.interp(length, x, cum))
    mu = solution.mu
    return mu * math.exp(-mu * solution.mean_shadow) * (total - head)


def blockage_prob_interval(scenario: Scenario, solution: RenewalSolution | None = None,
                           **kw) -> BlockageEstimate:
    """Full-blockage probability of the receiver segment, tagged analytic-interval.

    ``solution`` is computed when not given; keyword arguments are passed to
    :func:`shadow_width_distribution` / :func:`solve_renewal`. For l < d_min
    the closed special case is evaluated as well and stored in the returned
    estimate's ``numerical_error`` as the absolute disagreement bound.
    """
    length = scenario.rx_length_m
    if solution is None:
        try:
            solution = solve_for(scenario, **kw)
        except DegenerateScenario:
            return BlockageEstimate(0.0, "analytic-interval", degenerate=True)
    p = interval_blockage(solution, length)
    err = solution.mu * math.exp(-solution.mu * solution.mean_shadow) * solution.truncation_error
    if length < scenario.population.diameter_min_m:
        closed = special_case_blockage(solution.mu, solution.mean_shadow, length,
                                       as_printed=solution.as_printed)
        if not solution.as_printed:
            err = max(err, abs(closed - p))
    p = min(max(p, 0.0), 1.0)
    return BlockageEstimate(p, "analytic-interval", numerical_error=err)


def solve_for(scenario: Scenario, grid_points=4096, quad_rel_tol=1e-8,
              tail_eps=TAIL_EPS, steps_per_mean=STEPS_PER_MEAN_SHADOW,
              max_points=MAX_POINTS, as_printed=False) -> RenewalSolution:
    """Shadow law, mu and the renewal solution for one scenario."""
    mu = circumference_intensity(scenario, quad_rel_tol)
    if mu <= 0:
        raise DegenerateScenario("zero blocker density")
    shadow = shadow_width_distribution(scenario, grid_points, tail_eps, quad_rel_tol)
    return solve_renewal(scenario, mu, shadow, steps_per_mean, tail_eps, max_points,
                         as_printed=as_printed)
