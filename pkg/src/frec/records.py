"""Functional records: detection, upper/lower classification, counting processes.

A curve ``x_j`` is a record at time ``j`` when its depth within
``x_1..x_j`` is one of the two smallest depth values (ties included). The
first two curves are records by construction. A record is upper when it
lies on or above the deepest curve of the prefix for more than half of
the time, and lower when it lies there for less than half.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import FunctionalSample, Grid, InvalidArgumentError, inner_product, time_fraction
from .depth import (
    DepthKind,
    DepthOrder,
    PrefixDepth,
    _ed_from_counts,
    _mbd_from_counts,
    compute_depth,
    deepest_index,
    pointwise_counts,
)

__all__ = [
    "RecordKind",
    "RecordAlgorithm",
    "RecordEvent",
    "RecordTrajectory",
    "NotARecordError",
    "DegenerateSampleWarning",
    "detect_records",
    "classify",
    "counting_process",
]


class RecordKind(str, enum.Enum):
    UPPER = "upper"
    LOWER = "lower"

    def opposite(self) -> "RecordKind":
        return RecordKind.LOWER if self is RecordKind.UPPER else RecordKind.UPPER


class RecordAlgorithm(str, enum.Enum):
    EXACT = "exact"
    STREAMING = "streaming"


class NotARecordError(ValueError):
    """classify() was asked about a curve that is not a record."""


class DegenerateSampleWarning(UserWarning):
    """The sample contains bit-identical curves; depth ties are likely."""


@dataclass(frozen=True)
class RecordEvent:
    time: int
    kind: RecordKind
    depth_at_detection: float
    t_upper: float
    t_lower: float

    @property
    def definitional(self) -> bool:
        """True for the first two curves, which are records by construction."""
        return self.time <= 2


@dataclass(frozen=True, eq=False)
class RecordTrajectory:
    """Record events of one sample and the counting processes they induce.

    Arrays are indexed by ``j - 1``; ``L`` holds the record times in order.
    """

    events: tuple[RecordEvent, ...]
    n: int
    R: np.ndarray = field(init=False, repr=False)
    N: np.ndarray = field(init=False, repr=False)
    N_u: np.ndarray = field(init=False, repr=False)
    N_l: np.ndarray = field(init=False, repr=False)
    L: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        r_u = np.zeros(self.n, dtype=np.int64)
        r_l = np.zeros(self.n, dtype=np.int64)
        for ev in self.events:
            if not 1 <= ev.time <= self.n:
                raise InvalidArgumentError(f"event time {ev.time} outside 1..{self.n}")
            target = r_u if ev.kind is RecordKind.UPPER else r_l
            if r_u[ev.time - 1] or r_l[ev.time - 1]:
                raise InvalidArgumentError(f"two record events at time {ev.time}")
            target[ev.time - 1] = 1
        object.__setattr__(self, "R", r_u + r_l)
        object.__setattr__(self, "N", np.cumsum(r_u + r_l))
        object.__setattr__(self, "N_u", np.cumsum(r_u))
        object.__setattr__(self, "N_l", np.cumsum(r_l))
        object.__setattr__(self, "L", np.flatnonzero(r_u + r_l) + 1)

    @property
    def record_times(self) -> list[int]:
        return self.L.tolist()

    @property
    def n_records(self) -> int:
        return int(self.N[-1])

    @property
    def n_upper(self) -> int:
        return int(self.N_u[-1])

    @property
    def n_lower(self) -> int:
        return int(self.N_l[-1])

    def kinds(self) -> dict[int, RecordKind]:
        return {ev.time: ev.kind for ev in self.events}

    def __eq__(self, other) -> bool:
        if not isinstance(other, RecordTrajectory):
            return NotImplemented
        return self.n == other.n and self.events == other.events


def _side(x: np.ndarray, reference: np.ndarray, grid: Grid) -> tuple[RecordKind, float, float]:
    t_upper = time_fraction(x >= reference, grid)
    t_lower = time_fraction(x < reference, grid)
    if t_upper > t_lower:
        kind = RecordKind.UPPER
    elif t_upper < t_lower:
        kind = RecordKind.LOWER
    else:
        ones = np.ones(grid.m)
        above = inner_product(x, ones, grid) > inner_product(reference, ones, grid)
        kind = RecordKind.UPPER if above else RecordKind.LOWER
    return kind, t_upper, t_lower


def _is_extreme_in_order(i: int, order: DepthOrder) -> bool:
    last_two = set(order.permutation[-2:])
    for group in order.tie_groups:
        if last_two.intersection(group) and i in group:
            return True
    return False


def classify(
    j: int,
    prefix_sample: FunctionalSample,
    prefix_order: DepthOrder,
    depth_at_detection: float = float("nan"),
) -> RecordEvent:
    """Label the record ``x_j`` (1-based ``j``) as upper or lower.

    ``prefix_sample`` holds ``x_1..x_j`` and ``prefix_order`` its depth
    order. An exact split (half the time on each side) is decided by
    comparing the curve means.
    """
    if prefix_sample.n != j or len(prefix_order.permutation) != j:
        raise InvalidArgumentError("prefix sample and order must hold exactly j curves")
    if j >= 3 and not _is_extreme_in_order(j - 1, prefix_order):
        raise NotARecordError(f"curve {j} is not among the two most extreme of its prefix")
    grid = prefix_sample.grid
    x = prefix_sample.values[j - 1]
    deepest = prefix_sample.values[prefix_order.deepest]
    kind, t_up, t_lo = _side(x, deepest, grid)
    return RecordEvent(j, kind, float(depth_at_detection), t_up, t_lo)


def _initial_events(sample: FunctionalSample, kind: DepthKind) -> list[RecordEvent]:
    if sample.n == 1:
        return [RecordEvent(1, RecordKind.UPPER, 1.0, 1.0, 0.0)]
    first, second = sample.values[0], sample.values[1]
    side2, t_up, t_lo = _side(second, first, sample.grid)
    d = compute_depth(sample.prefix(2), kind).values
    return [
        RecordEvent(1, side2.opposite(), float(d[0]), t_lo, t_up),
        RecordEvent(2, side2, float(d[1]), t_up, t_lo),
    ]


@njit(cache=True)
def _mbd_numerators_of_three(y1, y2, x):
    # per point a curve strictly outside the other two lies in 2 of the 3 bands
    out = np.zeros(3, dtype=np.int64)
    for s in range(x.shape[0]):
        v0, v1, v2 = y1[s], y2[s], x[s]
        for k in range(3):
            v = v0 if k == 0 else (v1 if k == 1 else v2)
            below = (v0 < v) + (v1 < v) + (v2 < v)
            above = (v0 > v) + (v1 > v) + (v2 > v)
            out[k] += 3 - below * (below - 1) // 2 - above * (above - 1) // 2
    return out


def _three_scores(y1, y2, x, grid: Grid, kind: DepthKind) -> np.ndarray:
    if kind is DepthKind.MBD and grid.is_uniform_weight:
        return _mbd_numerators_of_three(y1, y2, x)
    below, above = pointwise_counts(np.vstack([y1, y2, x]))
    if kind is DepthKind.MBD:
        return _mbd_from_counts(below, above, grid).scores
    return _ed_from_counts(below, above, grid).scores


def detect_records(
    sample: FunctionalSample,
    kind: DepthKind | str = DepthKind.MBD,
    algo: RecordAlgorithm | str = RecordAlgorithm.EXACT,
    tiebreak_seed: int | None = None,
) -> RecordTrajectory:
    """Find the functional records of ``sample``.

    ``exact`` recomputes the depth of the whole prefix at every time. ``streaming``
    keeps only the two most extreme curves seen so far and decides each new
    curve by the depth among those three; the full prefix is ranked only at
    record times, to find the deepest curve used for upper/lower labels.
    ``tiebreak_seed`` breaks depth ties when picking that deepest curve.
    """
    kind = DepthKind(kind)
    algo = RecordAlgorithm(algo)
    n = sample.n
    if n < 2:
        raise InvalidArgumentError(f"record detection needs at least 2 curves, got {n}")
    if np.unique(sample.values, axis=0).shape[0] < n:
        warnings.warn(
            "sample contains identical curves; record ties may violate the usual assumptions",
            DegenerateSampleWarning,
            stacklevel=2,
        )
    grid = sample.grid
    values = sample.values
    events = _initial_events(sample, kind)
    prefix = PrefixDepth(grid, n)
    prefix.add(values[0])
    prefix.add(values[1])
    # streaming state: [index, side] of the two current extreme curves
    pair = [[ev.time - 1, ev.kind] for ev in events]

    for j in range(3, n + 1):
        i = j - 1
        prefix.add(values[i])
        if algo is RecordAlgorithm.EXACT:
            dv = prefix.depth(kind)
            second = np.partition(dv.scores, 1)[1]
            if dv.scores[i] > second:
                continue
        else:
            s = _three_scores(values[pair[0][0]], values[pair[1][0]], values[i], grid, kind)
            if s[2] > s[0] and s[2] > s[1]:
                continue
            dv = prefix.depth(kind)
        deepest = deepest_index(dv, tiebreak_seed)
        side, t_up, t_lo = _side(values[i], values[deepest], grid)
        events.append(RecordEvent(j, side, float(dv.values[i]), t_up, t_lo))
        if algo is RecordAlgorithm.STREAMING:
            if s[0] > s[1]:
                drop = 0
            elif s[1] > s[0]:
                drop = 1
            else:
                drop = 0 if pair[0][1] is side else 1
            pair[drop] = [i, side]
    return RecordTrajectory(tuple(events), n)


def counting_process(traj: RecordTrajectory) -> list[tuple[int, int, int, int]]:
    """Rows ``(j, N_j, N_j^u, N_j^l)`` for ``j = 1..n``."""
    return [
        (j + 1, int(traj.N[j]), int(traj.N_u[j]), int(traj.N_l[j])) for j in range(traj.n)
    ]
