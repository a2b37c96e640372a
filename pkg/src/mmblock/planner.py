"""Average path loss, parameter sweeps and optimal Tx height."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateScenario, ValidationError
from .model import METHODS, BlockageEstimate, Scenario
from .montecarlo import run_trials
from .point import p_los_point
from .renewal import blockage_prob_interval, solve_for

__all__ = [
    "PathLossModel", "PROFILES", "SweepResult", "estimate_blockage",
    "average_path_loss", "mixed_path_loss", "sweep_tx_height",
    "sweep_distance", "sweep_density", "grid_from_range",
]


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance LoS/NLoS laws, L(d) = intercept + 10 n log10(d), d in metres."""

    los_intercept_db: float
    los_exponent: float
    nlos_intercept_db: float
    nlos_exponent: float
    frequency_ghz: float = 28.0

    def __post_init__(self):
        if not (self.los_exponent > 0 and self.nlos_exponent > 0):
            raise ValidationError("path-loss exponents must be > 0")
        # both laws are affine in log10(d); NLoS >= LoS on d >= 1 iff it
        # holds at d = 1 and the slope does not close the gap
        if self.nlos_intercept_db < self.los_intercept_db or \
                self.nlos_exponent < self.los_exponent:
            raise ValidationError("NLoS path loss must not fall below LoS for d >= 1 m")

    def los(self, d):
        return self.los_intercept_db + 10.0 * self.los_exponent * np.log10(d)

    def nlos(self, d):
        return self.nlos_intercept_db + 10.0 * self.nlos_exponent * np.log10(d)


# 28 GHz, intercepts from free space at 1 m (LoS) and the NLoS fit of the
# 28 GHz urban measurement literature, NLoS intercept raised by 0.4 dB so the
# gap stays >= 20 dB from 10 m on. Configuration values, not fitted here.
PROFILES = {
    "mmwave28": PathLossModel(61.4, 2.0, 72.4, 2.92, 28.0),
}


@dataclass(frozen=True, eq=False)
class SweepResult:
    axis_name: str
    axis_values: np.ndarray
    blockage: list
    avg_path_loss_db: np.ndarray
    method: str
    optimum: tuple | None = None
    optimum_interior: bool | None = None
    monotonicity: dict = field(default_factory=dict)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([b.probability for b in self.blockage])


def grid_from_range(start, stop, step):
    if not step > 0:
        raise ValidationError("sweep step must be > 0")
    if stop < start:
        raise ValidationError("sweep range is empty")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


def estimate_blockage(scenario: Scenario, method: str = "analytic-point",
                      numerics: dict | None = None, mc: dict | None = None) -> BlockageEstimate:
    """Dispatch on ``method``: analytic-point, analytic-interval or monte-carlo."""
    numerics = numerics or {}
    if method == "analytic-point":
        return p_los_point(scenario)
    if method == "analytic-interval":
        try:
            sol = solve_for(scenario, **numerics)
        except DegenerateScenario:
            return BlockageEstimate(0.0, method, degenerate=True)
        return blockage_prob_interval(scenario, sol)
    if method == "monte-carlo":
        return run_trials(scenario, **(mc or {})).full
    raise ValidationError(f"method must be one of {METHODS}, got {method!r}")


def mixed_path_loss(p_los: float, plm: PathLossModel, d: float) -> float:
    return float(p_los * plm.los(d) + (1.0 - p_los) * plm.nlos(d))


def average_path_loss(scenario: Scenario, plm: PathLossModel, method="analytic-point",
                      estimate: BlockageEstimate | None = None, **kw) -> float:
    """L_e = P_LoS L_LoS(d) + (1 - P_LoS) L_NLoS(d) at the 3D Tx-Rx distance."""
    d = scenario.link_distance_3d
    if d < 1.0:
        raise ValidationError(f"3D Tx-Rx distance {d:.3g} m is below 1 m")
    if estimate is None:
        estimate = estimate_blockage(scenario, method, **kw)
    return mixed_path_loss(estimate.p_los, plm, d)


def _monotonicity(values):
    diff = np.diff(values)
    return {
        "nondecreasing": bool(np.all(diff >= -1e-12)),
        "nonincreasing": bool(np.all(diff <= 1e-12)),
    }


def _sweep(axis, values, make, plm, method, **kw):
    if len(values) == 0:
        raise ValidationError("empty sweep grid")
    est, loss = [], []
    for v in values:
        sc = make(float(v))
        e = estimate_blockage(sc, method, **kw)
        est.append(e)
        loss.append(average_path_loss(sc, plm, estimate=e))
    loss = np.array(loss)
    probs = np.array([e.probability for e in est])
    return SweepResult(axis, np.asarray(values, dtype=float), est, loss, method,
                       monotonicity=_monotonicity(probs))


def sweep_tx_height(scenario: Scenario, plm: PathLossModel, h_range, method="analytic-point",
                    **kw) -> SweepResult:
    """L_e over Tx heights; the optimum is the grid argmin of L_e."""
    values = grid_from_range(*h_range)
    if values.size and values[0] <= scenario.rx_height_m:
        raise ValidationError("Tx heights must exceed the Rx height")
    res = _sweep("tx_height", values, lambda h: replace(scenario, tx_height_m=h),
                 plm, method, **kw)
    k = int(np.argmin(res.avg_path_loss_db))
    return replace(res, optimum=(float(values[k]), float(res.avg_path_loss_db[k])),
                   optimum_interior=0 < k < values.size - 1)


def sweep_distance(scenario: Scenario, plm: PathLossModel, r_range, method="analytic-point",
                   **kw) -> SweepResult:
    values = grid_from_range(*r_range)
    if values.size and values[0] <= 0:
        raise ValidationError("distances must be > 0")
    return _sweep("distance", values, lambda r: replace(scenario, distance_m=r),
                  plm, method, **kw)


def sweep_density(scenario: Scenario, plm: PathLossModel, lam_range, method="analytic-point",
                  **kw) -> SweepResult:
    values = grid_from_range(*lam_range)
    if values.size and values[0] < 0:
        raise ValidationError("densities must be >= 0")
    return _sweep("density", values,
                  lambda lam: replace(scenario, population=replace(scenario.population,
                                                                   density_per_m2=lam)),
                  plm, method, **kw)
