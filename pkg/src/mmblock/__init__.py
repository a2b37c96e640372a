"""Human-body blockage of mmWave line-of-sight links."""

__version__ = "0.1.0"

from .errors import DegenerateScenario, DomainError, NumericalError, ValidationError
from .model import (BlockageEstimate, BlockerPopulation, Scenario, height_cdf,
                    height_exceed_prob, los_height, thinned_intensity)
from .shadow import circumference_intensity, distance_pdf, shadow_width_distribution
from .renewal import blockage_prob_interval, solve_for, solve_renewal
from .point import p_los_point, prob_height_miss, prob_radius_miss
from .montecarlo import los_blocked_at, run_trials, sample_field
from .planner import (PROFILES, PathLossModel, average_path_loss, estimate_blockage,
                      sweep_density, sweep_distance, sweep_tx_height)
