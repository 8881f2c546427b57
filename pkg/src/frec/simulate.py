"""Functional white noises, kernel operators and the six simulation models.

Models 1 and 2 are I(1) (null hypothesis of the unit root test); models 3
and 4 are stationary; models 5 and 6 are stationary with a structural break
in the mean and in the autoregressive operator respectively.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Union

import numpy as np

from .core import FunctionalSample, Grid, InvalidArgumentError

__all__ = [
    "NoiseKind",
    "NoiseSpec",
    "ModelKind",
    "ModelSpec",
    "Seed",
    "BURN_IN",
    "gen_noise",
    "hs_norm",
    "apply_kernel_operator",
    "kernel_matrix",
    "far_kernel",
    "break_kernel",
    "calibrated_kernel",
    "model2_basis",
    "model2_coefficient",
    "gen_model",
]

BURN_IN = 100

Kernel = Union[Callable[[np.ndarray, np.ndarray], np.ndarray], np.ndarray]


class NoiseKind(str, enum.Enum):
    BM = "bm"
    BB = "bb"
    GP = "gp"


@dataclass(frozen=True)
class NoiseSpec:
    """Functional white noise: Brownian motion, Brownian bridge, or an
    exponential-covariance Gaussian process ``scale * exp(-range * |s - t|)``."""

    kind: NoiseKind = NoiseKind.BM
    gp_scale: float = 0.2
    gp_range: float = 0.3

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if self.gp_scale <= 0 or self.gp_range <= 0:
            raise InvalidArgumentError("Gaussian process scale and range must be positive")


class ModelKind(str, enum.Enum):
    M1 = "m1"  # random walk
    M2 = "m2"  # FAR(1) with one unit eigenvalue
    M3 = "m3"  # i.i.d.
    M4 = "m4"  # stationary FAR(1)
    M5 = "m5"  # FAR(1) plus a mean break
    M6 = "m6"  # FAR(1) with an operator break

    @property
    def is_null(self) -> bool:
        return self in (ModelKind.M1, ModelKind.M2)


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    n: int
    break_at: int | None = None
    psi1_norm: float = 0.5
    psi2_norm: float = 0.7

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.n < 1:
            raise InvalidArgumentError("sample size must be positive")
        if self.break_at is None:
            object.__setattr__(self, "break_at", max(1, self.n // 2))
        if not 1 <= self.break_at <= self.n:
            raise InvalidArgumentError(f"break_at must be in 1..{self.n}")
        if self.psi1_norm <= 0 or self.psi2_norm <= 0:
            raise InvalidArgumentError("operator norms must be positive")


@dataclass(frozen=True)
class Seed:
    """Root seed plus a stream index; each pair gives an independent generator."""

    value: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.value, spawn_key=(self.stream,))
        return np.random.default_rng(ss)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, Seed):
        return seed.generator()
    return np.random.default_rng(seed)


@lru_cache(maxsize=32)
def _gp_factor(grid: Grid, scale: float, range_: float) -> np.ndarray:
    s = grid.points
    cov = scale * np.exp(-range_ * np.abs(s[:, None] - s[None, :]))
    cov[np.diag_indices_from(cov)] += 1e-12
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - guarded by the jitter
        raise RuntimeError("Gaussian process covariance is not positive definite") from exc


def gen_noise(spec: NoiseSpec, grid: Grid, seed, size: int | None = None) -> np.ndarray:
    """Draw one noise curve, or ``size`` independent curves as rows.

    ``seed`` may be a :class:`Seed`, a ``numpy`` generator or anything
    ``numpy.random.default_rng`` accepts.
    """
    rng = _rng(seed)
    rows = 1 if size is None else size
    s = grid.points
    if spec.kind is NoiseKind.GP:
        z = rng.standard_normal((rows, grid.m))
        out = z @ _gp_factor(grid, spec.gp_scale, spec.gp_range).T
    else:
        # append s = 1 when absent so the bridge can pin W(1)
        times = s if s[-1] == 1.0 else np.append(s, 1.0)
        steps = np.diff(np.concatenate(([0.0], times)))
        w = np.cumsum(rng.standard_normal((rows, times.size)) * np.sqrt(steps), axis=1)
        if spec.kind is NoiseKind.BB:
            w = w - times * w[:, -1:]
            if s[0] == 0.0:
                w[:, 0] = 0.0
            if s[-1] == 1.0:
                w[:, -1] = 0.0
        out = w[:, : grid.m]
    return out[0] if size is None else out


def kernel_matrix(kernel: Kernel, grid: Grid) -> np.ndarray:
    """``K[j, k] = kernel(s_j, s_k)``."""
    if callable(kernel):
        u, s = np.meshgrid(grid.points, grid.points, indexing="ij")
        return np.asarray(kernel(u, s), dtype=float)
    k = np.asarray(kernel, dtype=float)
    if k.shape != (grid.m, grid.m):
        raise InvalidArgumentError("kernel matrix must be m x m")
    return k


def hs_norm(kernel: Kernel, grid: Grid) -> float:
    """Hilbert-Schmidt norm ``(int int k(u, s)^2 du ds)^(1/2)`` by grid quadrature."""
    k = kernel_matrix(kernel, grid)
    w = grid.weights
    return float(np.sqrt(w @ (k * k) @ w))


def apply_kernel_operator(kernel: Kernel, x: np.ndarray, grid: Grid) -> np.ndarray:
    """``y(s) = int k(u, s) x(u) du``; ``x`` may be one curve or rows of curves."""
    k = kernel_matrix(kernel, grid)
    return (np.asarray(x, dtype=float) * grid.weights) @ k


def far_kernel(u, s):
    return np.exp((u**2 + s**2) / 2)


def break_kernel(u, s):
    return np.exp(-(u**2 + s**2) / 2)


@lru_cache(maxsize=64)
def _calibrated(grid: Grid, which: str, target: float) -> np.ndarray:
    raw = kernel_matrix(far_kernel if which == "far" else break_kernel, grid)
    k = raw * (target / hs_norm(raw, grid))
    k.setflags(write=False)
    return k


def calibrated_kernel(grid: Grid, norm: float, which: str = "far") -> np.ndarray:
    """Kernel matrix of the model operator scaled to Hilbert-Schmidt norm ``norm``.

    ``which`` is ``"far"`` for ``exp((u^2 + s^2)/2)`` and ``"break"`` for
    ``exp(-(u^2 + s^2)/2)``.
    """
    if which not in ("far", "break"):
        raise InvalidArgumentError(f"unknown kernel {which!r}")
    return _calibrated(grid, which, float(norm))


def model2_coefficient() -> np.ndarray:
    """Coefficient matrix of the model-2 recursion on ``(<X, e1>, <X, e2>)``."""
    a = (np.sqrt(5.0) - 1.0) / 2.0
    return np.array([[a, a], [a, 0.0]])


@lru_cache(maxsize=32)
def model2_basis(grid: Grid) -> np.ndarray:
    """Rows ``e1 = 1`` and ``e2 = sqrt(2) cos(2 pi s)``, orthonormalized on ``grid``."""
    w = grid.weights
    e1 = np.ones(grid.m)
    e2 = np.sqrt(2.0) * np.cos(2 * np.pi * grid.points)
    e1 = e1 / np.sqrt(w @ (e1 * e1))
    e2 = e2 - (w @ (e2 * e1)) * e1
    e2 = e2 / np.sqrt(w @ (e2 * e2))
    basis = np.vstack([e1, e2])
    basis.setflags(write=False)
    return basis


def _far_path(k: np.ndarray, eps: np.ndarray, grid: Grid, x0=None) -> np.ndarray:
    kw = grid.weights[:, None] * k
    out = np.empty_like(eps)
    prev = np.zeros(grid.m) if x0 is None else x0
    for i in range(eps.shape[0]):
        prev = prev @ kw + eps[i]
        out[i] = prev
    return out


def gen_model(
    model: ModelSpec,
    noise: NoiseSpec,
    grid: Grid,
    seed,
    innovations: np.ndarray | None = None,
) -> FunctionalSample:
    """Simulate ``model.n`` curves of one model.

    Stationary recursions start from zero and discard ``BURN_IN`` steps.
    ``innovations`` replaces the random noise (rows ``BURN_IN + n`` for the
    autoregressive models, ``n`` otherwise); for model 2 it is the scalar
    innovation sequence. It exists for testing.
    """
    rng = _rng(seed)
    n = model.n
    kind = model.kind

    if kind is ModelKind.M2:
        if noise.kind is not NoiseKind.BM:
            raise InvalidArgumentError("model 2 uses its own scalar noise; pass Brownian motion")
        xi = rng.standard_normal(n) if innovations is None else np.asarray(innovations, float)
        coef = model2_coefficient()
        coords = np.empty((n, 2))
        state = np.zeros(2)
        for i in range(n):
            state = coef @ state + np.array([xi[i], 0.0])
            coords[i] = state
        return FunctionalSample(grid, coords @ model2_basis(grid))

    burn = BURN_IN if kind in (ModelKind.M4, ModelKind.M5, ModelKind.M6) else 0
    if innovations is None:
        eps = gen_noise(noise, grid, rng, size=burn + n)
    else:
        eps = np.asarray(innovations, dtype=float)
        if eps.shape != (burn + n, grid.m):
            raise InvalidArgumentError(f"innovations must have shape {(burn + n, grid.m)}")

    if kind is ModelKind.M1:
        values = np.cumsum(eps, axis=0)
    elif kind is ModelKind.M3:
        values = eps.copy()
    elif kind is ModelKind.M4:
        values = _far_path(calibrated_kernel(grid, model.psi1_norm), eps, grid)[burn:]
    elif kind is ModelKind.M5:
        eta = _far_path(calibrated_kernel(grid, model.psi1_norm), eps, grid)[burn:]
        mean = np.where(np.arange(1, n + 1) > model.break_at, 2.0, 0.0)
        values = eta + mean[:, None]
    else:
        k = model.break_at
        pre = _far_path(calibrated_kernel(grid, model.psi2_norm, "break"), eps[: burn + k], grid)
        post = _far_path(calibrated_kernel(grid, model.psi1_norm), eps[burn + k :], grid, pre[-1])
        values = np.vstack([pre, post])[burn:]
    return FunctionalSample(grid, values)
