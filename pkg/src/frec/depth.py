"""Functional depth: modified band depth (MBD) and extremal depth (ED).

Both depths are built from the same pointwise counts: for curve ``i`` at
grid point ``s``, ``below[i, s]`` is the number of curves strictly below
``x_i(s)`` and ``above[i, s]`` the number strictly above. With equal grid
weights every depth is a ratio of integers; the integer numerators are
kept in :attr:`DepthVector.scores` so that ties are decided exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.stats import rankdata

from .core import FunctionalSample, Grid, InvalidArgumentError, constant_sample

__all__ = [
    "DepthKind",
    "DepthVector",
    "DepthOrder",
    "PrefixDepth",
    "pointwise_counts",
    "mbd",
    "extremal_depth",
    "compute_depth",
    "depth_order",
    "deepest_index",
    "validate_assumption1",
]


class DepthKind(str, enum.Enum):
    MBD = "mbd"
    ED = "ed"


@dataclass(frozen=True, eq=False)
class DepthVector:
    """Depth of every curve of a sample.

    ``scores`` orders the curves exactly like ``values`` but is integer
    valued whenever the grid weights are equal, so equality means a true tie.
    """

    values: np.ndarray
    kind: DepthKind
    scores: np.ndarray

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class DepthOrder:
    """Center-outward ordering: ``permutation[0]`` is the deepest curve.

    Indices are 0-based positions in the sample.
    """

    permutation: tuple[int, ...]
    tie_groups: tuple[tuple[int, ...], ...]
    tiebreak_seed: int | None = None

    @property
    def deepest(self) -> int:
        return self.permutation[0]

    def two_most_extreme(self) -> tuple[int, int]:
        return self.permutation[-1], self.permutation[-2]


def _comb2(k: np.ndarray) -> np.ndarray:
    return k * (k - 1) // 2


def pointwise_counts(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-point counts of curves strictly below and strictly above each curve."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    if n <= 16:
        diff = values[:, None, :] - values[None, :, :]
        below = (diff > 0).sum(axis=1)
        above = (diff < 0).sum(axis=1)
        return below.astype(np.int64), above.astype(np.int64)
    rank_min = rankdata(values, method="min", axis=0).astype(np.int64)
    rank_max = rankdata(values, method="max", axis=0).astype(np.int64)
    return rank_min - 1, n - rank_max


def _mbd_from_counts(below, above, grid: Grid) -> DepthVector:
    n = below.shape[0]
    pairs = n * (n - 1) // 2
    inside = pairs - _comb2(below) - _comb2(above)
    if grid.is_uniform_weight:
        scores = inside.sum(axis=1)
        values = scores / (grid.m * pairs)
    else:
        values = inside @ grid.weights / pairs
        scores = values
    return DepthVector(values, DepthKind.MBD, scores)


def _ed_from_counts(below, above, grid: Grid) -> DepthVector:
    n = below.shape[0]
    # pointwise depth D = level / n with level = n - |below - above|
    level = n - np.abs(below - above)
    if grid.is_uniform_weight:
        mass = np.zeros((n, n + 1), dtype=np.int64)
        rows = np.repeat(np.arange(n), level.shape[1])
        np.add.at(mass, (rows, level.ravel()), 1)
    else:
        mass = np.zeros((n, n + 1))
        rows = np.repeat(np.arange(n), level.shape[1])
        np.add.at(mass, (rows, level.ravel()), np.tile(grid.weights, n))
    cdf = np.cumsum(mass, axis=1)
    # Rows sorted lexicographically ascending: a larger left-tail CDF at the
    # first differing level means more extreme, so it sorts later.
    _, inverse, counts = np.unique(cdf, axis=0, return_inverse=True, return_counts=True)
    starts = np.cumsum(counts) - counts
    n_less_extreme = starts[inverse.ravel()]
    scores = n - n_less_extreme
    return DepthVector(scores / n, DepthKind.ED, scores)


def _check_sample(sample: FunctionalSample) -> None:
    if sample.n < 2:
        raise InvalidArgumentError(f"depth needs at least 2 curves, got {sample.n}")


def mbd(sample: FunctionalSample) -> DepthVector:
    """Modified band depth with bands formed by pairs of curves.

    Bands include their boundary, so a curve lies in every band it bounds
    and each value is at least ``2/n``.
    """
    _check_sample(sample)
    below, above = pointwise_counts(sample.values)
    return _mbd_from_counts(below, above, sample.grid)


def extremal_depth(sample: FunctionalSample) -> DepthVector:
    """Extremal depth.

    Curves are compared by the distribution of their pointwise depths
    ``1 - |below - above| / n``: at the lowest level where the two
    cumulative distributions differ, the larger one belongs to the more
    extreme curve. The depth is one minus the fraction of the sample a
    curve is strictly more extreme than.
    """
    _check_sample(sample)
    below, above = pointwise_counts(sample.values)
    return _ed_from_counts(below, above, sample.grid)


def compute_depth(sample: FunctionalSample, kind: DepthKind | str) -> DepthVector:
    kind = DepthKind(kind)
    if kind is DepthKind.MBD:
        return mbd(sample)
    return extremal_depth(sample)


def depth_order(dv: DepthVector, tiebreak_seed: int | None = None) -> DepthOrder:
    """Sort curves by decreasing depth and record groups of exactly tied curves.

    Without a seed, ties keep the original index order. With a seed, i.i.d.
    uniforms are drawn once for this call and the larger draw is deeper.
    """
    scores = np.asarray(dv.scores)
    n = scores.size
    if n == 0:
        raise InvalidArgumentError("cannot order an empty depth vector")
    if tiebreak_seed is None:
        perm = np.lexsort((np.arange(n), -scores))
    else:
        w = np.random.default_rng(tiebreak_seed).uniform(size=n)
        perm = np.lexsort((-w, -scores))
    sorted_scores = scores[perm]
    cuts = [0, *(np.flatnonzero(sorted_scores[1:] != sorted_scores[:-1]) + 1).tolist(), n]
    perm = tuple(perm.tolist())
    groups = tuple(perm[a:b] for a, b in zip(cuts[:-1], cuts[1:]))
    return DepthOrder(perm, groups, tiebreak_seed)


def deepest_index(dv: DepthVector, tiebreak_seed: int | None = None) -> int:
    """Index of the deepest curve, i.e. ``depth_order(dv, tiebreak_seed).deepest``."""
    scores = np.asarray(dv.scores)
    if tiebreak_seed is None:
        return int(np.argmax(scores))
    w = np.random.default_rng(tiebreak_seed).uniform(size=scores.size)
    top = np.flatnonzero(scores == scores.max())
    return int(top[np.argmax(w[top])])


def validate_assumption1(kind: DepthKind | str, constants, grid: Grid) -> bool:
    """Check that on constant curves the two least deep are the min and the max.

    Ties for second-smallest depth are included in the least-deep set, so a
    depth that ties an interior constant with an extreme one fails.
    """
    c = np.asarray(constants, dtype=float)
    if c.ndim != 1 or c.size < 3:
        raise InvalidArgumentError("need at least 3 constants")
    if np.unique(c).size != c.size:
        raise InvalidArgumentError("constants must be distinct")
    dv = compute_depth(constant_sample(c, grid), kind)
    second = np.sort(dv.scores)[1]
    least_deep = set(np.flatnonzero(dv.scores <= second).tolist())
    return least_deep == {int(np.argmin(c)), int(np.argmax(c))}


@njit(cache=True)
def _add_curve(values, below, above, inside, j, x):
    # inside[i] holds sum_s [C(j,2) - C(below,2) - C(above,2)] for the first j curves
    m = x.shape[0]
    nb_new = 0
    na_new = 0
    total_new = 0
    for i in range(j):
        delta = 0
        for s in range(m):
            v = values[i, s]
            if x[s] > v:
                delta += j - above[i, s]
                above[i, s] += 1
            elif x[s] < v:
                delta += j - below[i, s]
                below[i, s] += 1
            else:
                delta += j
        inside[i] += delta
    for s in range(m):
        nb_new = 0
        na_new = 0
        for i in range(j):
            v = values[i, s]
            if v < x[s]:
                nb_new += 1
            elif v > x[s]:
                na_new += 1
        below[j, s] = nb_new
        above[j, s] = na_new
        values[j, s] = x[s]
        total_new += (j + 1) * j // 2 - nb_new * (nb_new - 1) // 2 - na_new * (na_new - 1) // 2
    inside[j] = total_new


@dataclass
class PrefixDepth:
    """Pointwise counts of a growing sample, updated in O(j * m) per curve.

    Used by record detection, which needs depths of every prefix
    ``x_1..x_j`` without re-ranking from scratch. MBD numerators are
    updated in place as curves arrive.
    """

    grid: Grid
    capacity: int
    _values: np.ndarray = field(init=False, repr=False)
    _below: np.ndarray = field(init=False, repr=False)
    _above: np.ndarray = field(init=False, repr=False)
    _inside: np.ndarray = field(init=False, repr=False)
    size: int = field(init=False, default=0)

    def __post_init__(self):
        shape = (self.capacity, self.grid.m)
        self._values = np.empty(shape)
        self._below = np.zeros(shape, dtype=np.int64)
        self._above = np.zeros(shape, dtype=np.int64)
        self._inside = np.zeros(self.capacity, dtype=np.int64)

    def add(self, curve: np.ndarray) -> None:
        if self.size == self.capacity:
            raise InvalidArgumentError("prefix capacity exceeded")
        curve = np.ascontiguousarray(curve, dtype=float)
        _add_curve(self._values, self._below, self._above, self._inside, self.size, curve)
        self.size += 1

    @property
    def values(self) -> np.ndarray:
        return self._values[: self.size]

    def depth(self, kind: DepthKind) -> DepthVector:
        j = self.size
        if j < 2:
            raise InvalidArgumentError("depth needs at least 2 curves")
        if kind is DepthKind.MBD and self.grid.is_uniform_weight:
            scores = self._inside[:j].copy()
            return DepthVector(scores / (self.grid.m * (j * (j - 1) // 2)), kind, scores)
        below = self._below[:j]
        above = self._above[:j]
        if kind is DepthKind.MBD:
            return _mbd_from_counts(below, above, self.grid)
        return _ed_from_counts(below, above, self.grid)
