"""Discretized functional data: grids, samples and quadrature primitives.

Curves are stored as rows of a 2-D float array; a single curve is a 1-D
array with one value per grid point. All integrals over [0, 1] are
weighted sums over grid points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InvalidArgumentError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered abscissae in [0, 1] with positive quadrature weights summing to one."""

    points: np.ndarray
    weights: np.ndarray

    def __init__(self, points, weights=None):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise InvalidArgumentError("a grid needs at least 2 points")
        if not np.all(np.isfinite(pts)) or pts[0] < 0.0 or pts[-1] > 1.0:
            raise InvalidArgumentError("grid points must lie in [0, 1]")
        if np.any(np.diff(pts) <= 0):
            raise InvalidArgumentError("grid points must be strictly increasing")
        if weights is None:
            w = np.full(pts.size, 1.0 / pts.size)
        else:
            w = np.asarray(weights, dtype=float)
            if w.shape != pts.shape:
                raise InvalidArgumentError("weights must match points in length")
            if np.any(w <= 0) or not np.isclose(w.sum(), 1.0, rtol=0, atol=1e-12):
                raise InvalidArgumentError("weights must be positive and sum to 1")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "weights", _frozen(w))

    def __len__(self) -> int:
        return self.points.size

    @property
    def m(self) -> int:
        return self.points.size

    @property
    def is_uniform_weight(self) -> bool:
        """True when every weight equals 1/m (depth numerators are then integers)."""
        return bool(np.all(self.weights == self.weights[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return np.array_equal(self.points, other.points) and np.array_equal(
            self.weights, other.weights
        )

    def __hash__(self) -> int:
        return hash((self.points.tobytes(), self.weights.tobytes()))


def uniform_grid(m: int) -> Grid:
    """Grid of ``m`` equispaced points ``k/(m-1)``, endpoints included, weights ``1/m``.

    >>> uniform_grid(2).points
    array([0., 1.])
    """
    if int(m) != m or m < 2:
        raise InvalidArgumentError(f"grid size must be an integer >= 2, got {m!r}")
    return Grid(np.linspace(0.0, 1.0, int(m)))


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """A time-ordered sample of curves sharing one grid.

    ``values[i]`` is the curve observed at time ``i + 1``.
    """

    grid: Grid
    values: np.ndarray

    def __init__(self, grid: Grid, values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim == 1:
            vals = vals[None, :]
        if vals.ndim != 2 or vals.shape[0] < 1:
            raise InvalidArgumentError("a sample needs at least one curve")
        if vals.shape[1] != grid.m:
            raise InvalidArgumentError(
                f"curves have {vals.shape[1]} values but the grid has {grid.m} points"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidArgumentError("curve values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", _frozen(vals))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def m(self) -> int:
        return self.values.shape[1]

    def __len__(self) -> int:
        return self.n

    def curve(self, i: int) -> np.ndarray:
        return self.values[i]

    def prefix(self, j: int) -> "FunctionalSample":
        """The first ``j`` curves."""
        if not 1 <= j <= self.n:
            raise InvalidArgumentError(f"prefix length {j} outside 1..{self.n}")
        return FunctionalSample(self.grid, self.values[:j])

    def map(self, scale: float, shift=0.0) -> "FunctionalSample":
        """Apply ``x -> scale * x + shift`` to every curve."""
        return FunctionalSample(self.grid, scale * self.values + np.asarray(shift, dtype=float))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FunctionalSample):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)


def constant_sample(constants, grid: Grid) -> FunctionalSample:
    """Embed real numbers as constant curves on ``grid``."""
    c = np.asarray(constants, dtype=float)
    return FunctionalSample(grid, np.repeat(c[:, None], grid.m, axis=1))


def _check_length(a: np.ndarray, grid: Grid, what: str) -> None:
    if a.ndim != 1 or a.size != grid.m:
        raise InvalidArgumentError(f"{what} has length {a.size}, grid has {grid.m} points")


def inner_product(a, b, grid: Grid) -> float:
    """Quadrature inner product ``sum_k w_k a_k b_k``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _check_length(a, grid, "first curve")
    _check_length(b, grid, "second curve")
    return float(np.dot(grid.weights, a * b))


def norm(a, grid: Grid) -> float:
    return inner_product(a, a, grid) ** 0.5


def time_fraction(mask, grid: Grid) -> float:
    """Measure of the set of grid points where ``mask`` is true."""
    mask = np.asarray(mask, dtype=bool)
    _check_length(mask, grid, "mask")
    if grid.is_uniform_weight:
        # exact complement: count / m
        return int(mask.sum()) / grid.m
    return float(grid.weights[mask].sum())
