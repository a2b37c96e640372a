from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid


@dataclass(frozen=True, eq=False)
class TabulatedDistribution:
    """A density sampled on a grid with its trapezoid CDF and mean.

    Outside the grid the density is zero and the CDF is flat.
    """

    grid: np.ndarray
    pdf_values: np.ndarray
    cdf_values: np.ndarray
    mean: float
    info: dict = field(default_factory=dict)

    @classmethod
    def from_pdf(cls, grid, pdf_values, **info) -> "TabulatedDistribution":
        grid = np.asarray(grid, dtype=float)
        pdf = np.asarray(pdf_values, dtype=float)
        cdf = cumulative_trapezoid(pdf, grid, initial=0.0)
        mean = float(trapezoid(grid * pdf, grid))
        return cls(grid, pdf, cdf, mean, dict(info))

    @property
    def step(self) -> float:
        """First grid spacing (the spacing, on uniform grids)."""
        return float(self.grid[1] - self.grid[0])

    @property
    def total_mass(self) -> float:
        return float(self.cdf_values[-1])

    def pdf(self, x):
        return np.interp(x, self.grid, self.pdf_values, left=0.0, right=0.0)

    def cdf(self, x):
        return np.interp(x, self.grid, self.cdf_values, left=0.0,
                         right=self.cdf_values[-1])

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def __len__(self):
        return self.grid.size
