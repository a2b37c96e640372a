"""Stochastic-geometry simulator of human-body blockage.

Coordinates: Tx base at the origin, Rx centre at (r, 0), Rx segment along
the y axis. Blockers fill the square [-5r, 5r]^2. The square is split into
an inner box around the Tx-Rx corridor and four outer rectangles; each
region draws from its own counter-based stream keyed by (seed, trial,
region), so dropping the outer regions (the corridor pre-filter) leaves
every blocker that could touch the LoS bit-for-bit unchanged.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree
from scipy.special import ndtr, ndtri

from .errors import ValidationError
from .model import BlockageEstimate, BlockerPopulation, Scenario

__all__ = [
    "BlockerInstance", "BlockerField", "TrialOutcome", "TrialSummary",
    "sample_field", "los_blocked_at", "blocked_mask", "run_trials",
    "candidate_intensity",
]

MODES = ("ppp", "matern2")
# "body": hard-core distance is the sum of body radii; "marks": each point
# carries an independent hard-core radius U(0, d_max/2)
HARDCORE_RULES = ("body", "marks")
PREFILTER_THRESHOLD = 5000
CHUNK = 256


@dataclass(frozen=True)
class BlockerInstance:
    x_m: float
    y_m: float
    radius_m: float
    height_m: float


@dataclass(frozen=True, eq=False)
class BlockerField:
    x: np.ndarray
    y: np.ndarray
    radius: np.ndarray
    height: np.ndarray

    def __len__(self):
        return self.x.size

    def instances(self):
        return [BlockerInstance(*map(float, t))
                for t in zip(self.x, self.y, self.radius, self.height)]

    @classmethod
    def from_instances(cls, blockers):
        cols = np.array([[b.x_m, b.y_m, b.radius_m, b.height_m] for b in blockers],
                        dtype=float).reshape(-1, 4)
        return cls(*cols.T.copy())

    def select(self, mask):
        return BlockerField(self.x[mask], self.y[mask], self.radius[mask], self.height[mask])


@dataclass(frozen=True)
class TrialOutcome:
    fully_blocked: bool
    half_blocked: bool
    partly_blocked: bool


@dataclass(frozen=True)
class TrialSummary:
    full: BlockageEstimate
    half: BlockageEstimate
    partial: BlockageEstimate


def _stream(seed, trial, region):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial), int(region)))
    return np.random.Generator(np.random.Philox(ss))


def _truncnorm(rng, n, mean, std):
    lo = ndtr(-mean / std)
    u = lo + (1.0 - lo) * rng.random(n)
    return mean + std * ndtri(u)


def _hardcore_radius_law(pop: BlockerPopulation, rule: str):
    if rule == "body":
        return pop.radius_min, pop.radius_max
    return 0.0, pop.radius_max


@lru_cache(maxsize=64)
def candidate_intensity(pop: BlockerPopulation, rule: str = "body") -> float:
    """Poisson candidate intensity whose Matérn-II thinning keeps density_per_m2.

    A candidate with hard-core radius a survives with probability
    (1 - exp(-lc*A(a))) / (lc*A(a)), A(a) = pi E[(a + a')^2], so the
    retained intensity is E[(1 - exp(-lc*A)) / A] over a.
    """
    target = pop.density_per_m2
    if target == 0:
        return 0.0
    lo, hi = _hardcore_radius_law(pop, rule)
    nodes, weights = np.polynomial.legendre.leggauss(64)
    a = 0.5 * (hi - lo) * (nodes + 1.0) + lo
    w = 0.5 * weights
    m1 = 0.5 * (lo + hi)
    m2 = (hi ** 3 - lo ** 3) / (3.0 * (hi - lo))
    area = math.pi * (a * a + 2.0 * a * m1 + m2)

    def retained(lc):
        return float(np.sum(w * -np.expm1(-lc * area) / area)) - target

    ceiling = float(np.sum(w / area))
    if target >= 0.999 * ceiling:
        raise ValidationError(
            f"density {target} too high for Matérn-II hard-core packing "
            f"(ceiling {ceiling:.4g} per m^2)")
    upper = target
    while retained(upper) < 0:
        upper *= 2.0
    return brentq(retained, target, upper, xtol=1e-14, rtol=1e-13)


def _boxes(scenario: Scenario, margin: float):
    r = scenario.distance_m
    half = 5.0 * r
    d = scenario.population.diameter_max_m
    w = 0.5 * scenario.rx_length_m + 0.5 * d + margin
    inner = (-0.5 * d - margin, r + 0.5 * d + margin, -w, w)
    x0, x1, y0, y1 = inner
    if x0 <= -half or x1 >= half or y1 >= half:
        raise ValidationError("distance_m too small for the 10r simulation square")
    outer = [
        (-half, x0, -half, half),
        (x1, half, -half, half),
        (x0, x1, -half, y0),
        (x0, x1, y1, half),
    ]
    return inner, outer


def _draw_region(rng, box, intensity, pop, rule, matern):
    x0, x1, y0, y1 = box
    n = rng.poisson(intensity * (x1 - x0) * (y1 - y0))
    x = x0 + (x1 - x0) * rng.random(n)
    y = y0 + (y1 - y0) * rng.random(n)
    radius = rng.uniform(pop.radius_min, pop.radius_max, n)
    height = _truncnorm(rng, n, pop.height_mean_m, pop.height_std_m)
    if not matern:
        return x, y, radius, height, None, None
    mark = rng.random(n)
    if rule == "body":
        hc = radius
    else:
        hc = rng.uniform(0.0, pop.radius_max, n)
    return x, y, radius, height, mark, hc


def _matern_keep(x, y, mark, hc, reach):
    keep = np.ones(x.size, dtype=bool)
    if x.size < 2:
        return keep
    tree = cKDTree(np.column_stack([x, y]))
    pairs = tree.query_pairs(reach, output_type="ndarray")
    if pairs.size == 0:
        return keep
    i, j = pairs[:, 0], pairs[:, 1]
    dist = np.hypot(x[i] - x[j], y[i] - y[j])
    hit = dist < hc[i] + hc[j]
    i, j = i[hit], j[hit]
    loser = np.where(mark[i] > mark[j], i, j)
    keep[loser] = False
    return keep


def _use_prefilter(scenario: Scenario, prefilter):
    if prefilter is not None:
        return bool(prefilter)
    expected = scenario.population.density_per_m2 * (10.0 * scenario.distance_m) ** 2
    return expected > PREFILTER_THRESHOLD


def sample_field(scenario: Scenario, seed: int, trial: int, mode: str = "ppp",
                 prefilter=None, hardcore: str = "body") -> BlockerField:
    """One blocker realisation in the 10r x 10r square centred on the Tx.

    With the pre-filter on, only blockers in the corridor box (the only ones
    that can occlude) are generated and returned.
    """
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    if hardcore not in HARDCORE_RULES:
        raise ValidationError(f"hardcore must be one of {HARDCORE_RULES}, got {hardcore!r}")
    pop = scenario.population
    matern = mode == "matern2"
    # Matérn-II decisions for corridor points need candidates within 2*r_max
    margin = pop.diameter_max_m if matern else 0.0
    inner, outer = _boxes(scenario, margin)
    filtered = _use_prefilter(scenario, prefilter)
    intensity = candidate_intensity(pop, hardcore) if matern else pop.density_per_m2

    regions = [inner] if filtered else [inner, *outer]
    parts = [_draw_region(_stream(seed, trial, k), box, intensity, pop, hardcore, matern)
             for k, box in enumerate(regions)]
    x, y, radius, height = (np.concatenate([p[i] for p in parts]) for i in range(4))
    if matern:
        mark = np.concatenate([p[4] for p in parts])
        hc = np.concatenate([p[5] for p in parts])
        keep = _matern_keep(x, y, mark, hc, 2.0 * pop.radius_max)
        x, y, radius, height = x[keep], y[keep], radius[keep], height[keep]
    field = BlockerField(x, y, radius, height)
    if filtered and matern:
        corridor, _ = _boxes(scenario, 0.0)
        cx0, cx1, cy0, cy1 = corridor
        field = field.select((x >= cx0) & (x <= cx1) & (y >= cy0) & (y <= cy1))
    return field


def blocked_mask(scenario: Scenario, blockers: BlockerField, rx_points, rx_height=None):
    """Boolean array: is the LoS to each receiver point cut by some cylinder.

    The 2D Tx-Rx segment is intersected with every blocker disk; the LoS is
    lowest at the end of the chord nearest the receiver, so the blocker
    occludes iff it is at least that tall there.
    """
    rx = np.atleast_2d(np.asarray(rx_points, dtype=float))
    h_rx = scenario.rx_height_m if rx_height is None else float(rx_height)
    h_tx = scenario.tx_height_m
    if len(blockers) == 0:
        return np.zeros(rx.shape[0], dtype=bool)
    dx = rx[:, 0][:, None]
    dy = rx[:, 1][:, None]
    cx = blockers.x[None, :]
    cy = blockers.y[None, :]
    rad = blockers.radius[None, :]
    dd = dx * dx + dy * dy
    dc = dx * cx + dy * cy
    cc = cx * cx + cy * cy
    disc = dc * dc - dd * (cc - rad * rad)
    root = np.sqrt(np.maximum(disc, 0.0))
    t_lo = np.maximum((dc - root) / dd, 0.0)
    t_hi = np.minimum((dc + root) / dd, 1.0)
    crosses = (disc >= 0.0) & (t_lo <= t_hi)
    los_h = h_tx + t_hi * (h_rx - h_tx)
    occluded = crosses & (blockers.height[None, :] >= los_h)
    return occluded.any(axis=1)


def los_blocked_at(scenario: Scenario, blockers, rx_point, rx_height=None) -> bool:
    if not isinstance(blockers, BlockerField):
        blockers = BlockerField.from_instances(blockers)
    return bool(blocked_mask(scenario, blockers, [rx_point], rx_height)[0])


def rx_points(scenario: Scenario, subsegments: int):
    half = 0.5 * scenario.rx_length_m
    ys = np.linspace(-half, half, int(subsegments) + 1)
    return np.column_stack([np.full_like(ys, scenario.distance_m), ys])


def trial_outcome(scenario, seed, trial, subsegments=10, mode="ppp",
                  prefilter=None, hardcore="body") -> TrialOutcome:
    field = sample_field(scenario, seed, trial, mode, prefilter, hardcore)
    hits = int(blocked_mask(scenario, field, rx_points(scenario, subsegments)).sum())
    n = subsegments + 1
    return TrialOutcome(hits == n, hits >= math.ceil(n / 2), hits >= 1)


def _count_chunk(scenario, seed, start, stop, subsegments, mode, prefilter, hardcore):
    pts = rx_points(scenario, subsegments)
    n = subsegments + 1
    need_half = math.ceil(n / 2)
    full = half = part = 0
    for trial in range(start, stop):
        field = sample_field(scenario, seed, trial, mode, prefilter, hardcore)
        hits = int(blocked_mask(scenario, field, pts).sum())
        full += hits == n
        half += hits >= need_half
        part += hits >= 1
    return full, half, part


def run_trials(scenario: Scenario, trials: int = 10_000, subsegments: int = 10,
               seed: int = 1, mode: str = "ppp", threads: int = 1,
               prefilter=None, hardcore: str = "body") -> TrialSummary:
    """Full / at-least-half / partial blockage frequencies over ``trials`` fields.

    Trial ``k`` depends only on (seed, k), and the tally is an integer sum,
    so the result does not depend on ``threads`` or scheduling.
    """
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    if subsegments < 1:
        raise ValidationError("subsegments must be >= 1")
    if mode not in MODES:
        raise ValidationError(f"mode must be one of {MODES}, got {mode!r}")
    bounds = [(s, min(s + CHUNK, trials)) for s in range(0, trials, CHUNK)]
    args = (subsegments, mode, prefilter, hardcore)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(
                lambda b: _count_chunk(scenario, seed, b[0], b[1], *args), bounds))
    else:
        counts = [_count_chunk(scenario, seed, a, b, *args) for a, b in bounds]
    full, half, part = (sum(c[i] for c in counts) for i in range(3))
    return TrialSummary(BlockageEstimate.from_counts(full, trials),
                        BlockageEstimate.from_counts(half, trials),
                        BlockageEstimate.from_counts(part, trials))
