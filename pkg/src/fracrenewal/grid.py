"""Sampled functions on a time or space grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError

__all__ = ["GridFunction", "uniform_grid", "log_grid", "graded_grid"]


@dataclass(frozen=True)
class GridFunction:
    """Values of a real function on a strictly increasing grid.

    ``spacing_tag`` is ``"uniform"`` or ``"logarithmic"``; uniform grids are
    checked to have a constant step within 1e-12 relative.
    """

    grid: np.ndarray
    values: np.ndarray
    spacing_tag: str = "uniform"

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.size < 2:
            raise DomainError("a grid needs at least two points")
        if v.shape[0] != g.size:
            raise DomainError("grid and values differ in length")
        if np.any(np.diff(g) <= 0):
            raise DomainError("grid must be strictly increasing")
        if self.spacing_tag not in ("uniform", "logarithmic"):
            raise DomainError(f"unknown spacing tag {self.spacing_tag!r}")
        if self.spacing_tag == "uniform":
            d = np.diff(g)
            if np.max(np.abs(d - d[0])) > 1e-12 * max(abs(d[0]), np.max(np.abs(g))):
                raise DomainError("grid tagged uniform has a non-constant step")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    @property
    def step(self) -> float:
        if self.spacing_tag != "uniform":
            raise DomainError("step is defined for uniform grids only")
        return float(self.grid[1] - self.grid[0])

    def with_values(self, values):
        return GridFunction(self.grid, values, self.spacing_tag)

    def __len__(self):
        return self.grid.size


def uniform_grid(t_max, step, t_min=0.0):
    """Grid ``t_min, t_min + step, ...`` up to (and including, within rounding) ``t_max``."""
    n = int(round((t_max - t_min) / step))
    if n < 1:
        raise DomainError("grid needs t_max > t_min + step")
    return t_min + step * np.arange(n + 1)


def log_grid(t_min, t_max, points):
    if not 0 < t_min < t_max or points < 2:
        raise DomainError("log grid needs 0 < t_min < t_max and points >= 2")
    return np.geomspace(t_min, t_max, int(points))


def graded_grid(t_max, points, grading=4.0):
    """``t_k = t_max (k/K)^grading``, k = 0..K: clustered at 0 for integrands
    with an integrable singularity there."""
    if not t_max > 0 or points < 2 or grading < 1:
        raise DomainError("graded grid needs t_max > 0, points >= 2 and grading >= 1")
    k = np.arange(int(points)) / (int(points) - 1)
    return float(t_max) * k**grading
