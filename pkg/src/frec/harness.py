"""Monte Carlo experiments: empirical size/power, record-count laws, power sweeps.

Every replicate draws from its own stream ``Seed(base_seed, cell_id ^ r)``
where ``cell_id`` is a stable hash of the cell (model, noise, n, operator
norms). Results are keyed by replicate index, so they do not depend on
the number of worker processes or on which other cells are run.
"""

from __future__ import annotations

import hashlib
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import stats

from .asymptotics import LimitLaw, cdf, pdf
from .core import InvalidArgumentError, uniform_grid
from .depth import DepthKind
from .records import RecordAlgorithm, detect_records
from .simulate import ModelKind, ModelSpec, NoiseSpec, Seed, gen_model
from .urtest import test_from_trajectory

__all__ = [
    "McConfig",
    "CellResult",
    "McResult",
    "RecordLawResult",
    "ReplicateError",
    "cell_id",
    "run_size_power",
    "run_record_law",
    "run_power_sweep",
    "format_table",
    "replicates_csv",
    "default_workers",
]


class ReplicateError(RuntimeError):
    """A replicate failed; the message names the cell and replicate index."""


@dataclass(frozen=True)
class McConfig:
    model: ModelKind = ModelKind.M1
    noise: NoiseSpec = field(default_factory=NoiseSpec)
    n_values: tuple[int, ...] = (200,)
    replicates: int = 200
    alpha: float = 0.05
    depth: DepthKind = DepthKind.MBD
    algo: RecordAlgorithm = RecordAlgorithm.EXACT
    base_seed: int = 20240601
    sweep: tuple[float, ...] | None = None
    grid_points: int = 50
    psi1_norm: float = 0.5
    psi2_norm: float = 0.7
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "model", ModelKind(self.model))
        object.__setattr__(self, "depth", DepthKind(self.depth))
        object.__setattr__(self, "algo", RecordAlgorithm(self.algo))
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if self.sweep is not None:
            object.__setattr__(self, "sweep", tuple(float(v) for v in self.sweep))
            if not self.sweep or any(not 0.0 < v <= 1.0 for v in self.sweep):
                raise InvalidArgumentError("sweep values must lie in (0, 1]")
        if self.replicates < 1:
            raise InvalidArgumentError("replicates must be at least 1")
        if not self.n_values or min(self.n_values) < 3:
            raise InvalidArgumentError("n_values must be nonempty with every n >= 3")
        if not 0.0 < self.alpha < 1.0:
            raise InvalidArgumentError("alpha must be in (0, 1)")
        if self.grid_points < 2:
            raise InvalidArgumentError("grid_points must be at least 2")


@dataclass
class CellResult:
    model: ModelKind
    noise: NoiseSpec
    n: int
    psi1_norm: float
    rejection_rate: float
    mean_T: float
    T_samples: np.ndarray
    N_samples: np.ndarray
    N_upper: np.ndarray
    N_lower: np.ndarray
    rejects: np.ndarray
    wall_time: float


@dataclass
class McResult:
    config: McConfig
    cells: list[CellResult]

    def cell(self, n: int, psi1_norm: float | None = None) -> CellResult:
        for c in self.cells:
            if c.n == n and (psi1_norm is None or c.psi1_norm == psi1_norm):
                return c
        raise KeyError(n)


def default_workers() -> int:
    """Worker processes: ``FREC_THREADS`` if set, else 1."""
    env = os.environ.get("FREC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise InvalidArgumentError(f"FREC_THREADS must be an integer, got {env!r}") from exc
    return 1


def cell_id(model: ModelKind, noise: NoiseSpec, n: int, psi1_norm: float, psi2_norm: float) -> int:
    """Stable 63-bit identifier of an experiment cell."""
    key = f"{model.value}|{noise.kind.value}|{noise.gp_scale!r}|{noise.gp_range!r}|{n}|{psi1_norm!r}|{psi2_norm!r}"
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "big") >> 1


def _replicate(task):
    model_spec, noise, grid_points, seed, depth, algo, alpha = task
    grid = uniform_grid(grid_points)
    sample = gen_model(model_spec, noise, grid, seed)
    traj = detect_records(sample, depth, algo)
    res = test_from_trajectory(traj, alpha)
    return res.T_n, res.N_total, res.N_upper, res.N_lower, res.reject


def _run_tasks(tasks, workers: int, labels):
    if workers <= 1 or len(tasks) == 1:
        out = []
        for task, label in zip(tasks, labels):
            try:
                out.append(_replicate(task))
            except Exception as exc:
                raise ReplicateError(f"{label}: {exc}") from exc
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_replicate, t) for t in tasks]
        out = []
        for fut, label in zip(futures, labels):
            try:
                out.append(fut.result())
            except Exception as exc:
                raise ReplicateError(f"{label}: {exc}") from exc
        return out


def _run_cell(cfg: McConfig, n: int, psi1_norm: float, workers: int) -> CellResult:
    spec = ModelSpec(cfg.model, n, psi1_norm=psi1_norm, psi2_norm=cfg.psi2_norm)
    cid = cell_id(cfg.model, cfg.noise, n, psi1_norm, cfg.psi2_norm)
    tasks = [
        (spec, cfg.noise, cfg.grid_points, Seed(cfg.base_seed, cid ^ r), cfg.depth, cfg.algo, cfg.alpha)
        for r in range(cfg.replicates)
    ]
    labels = [f"model={cfg.model.value} n={n} replicate={r}" for r in range(cfg.replicates)]
    start = time.perf_counter()
    rows = _run_tasks(tasks, workers, labels)
    wall = time.perf_counter() - start
    t, nn, nu, nl, rej = (np.array(col) for col in zip(*rows))
    return CellResult(
        model=cfg.model,
        noise=cfg.noise,
        n=n,
        psi1_norm=psi1_norm,
        rejection_rate=int(rej.sum()) / cfg.replicates,
        mean_T=float(t.mean()),
        T_samples=t.astype(float),
        N_samples=nn.astype(np.int64),
        N_upper=nu.astype(np.int64),
        N_lower=nl.astype(np.int64),
        rejects=rej.astype(bool),
        wall_time=wall,
    )


def run_size_power(cfg: McConfig) -> McResult:
    """Rejection rate of the unit root test for every sample size in ``cfg``."""
    workers = cfg.workers or default_workers()
    cells = [_run_cell(cfg, n, cfg.psi1_norm, workers) for n in cfg.n_values]
    return McResult(cfg, cells)


def run_power_sweep(cfg: McConfig) -> list[tuple[float, float]]:
    """Rejection rate of model 4 at each operator norm in ``cfg.sweep``.

    Uses the first entry of ``cfg.n_values``.
    """
    if not cfg.sweep:
        raise InvalidArgumentError("power sweep needs a nonempty sweep")
    if cfg.model is not ModelKind.M4:
        raise InvalidArgumentError("power sweep is defined for model m4")
    workers = cfg.workers or default_workers()
    n = cfg.n_values[0]
    return [(norm, _run_cell(cfg, n, norm, workers).rejection_rate) for norm in cfg.sweep]


@dataclass
class RecordLawResult:
    """Output of :func:`run_record_law`.

    For model 1: ``samples`` holds ``N_n^u / sqrt(n)`` per replicate and
    ``x``/``density`` the limit density on a plotting grid. For model 3:
    ``trajectories`` holds ``N_j`` (rows are replicates) and ``reference``
    the curve ``log j``.
    """

    model: ModelKind
    n: int
    samples: np.ndarray | None = None
    x: np.ndarray | None = None
    density: np.ndarray | None = None
    ks_statistic: float | None = None
    trajectories: np.ndarray | None = None
    reference: np.ndarray | None = None

    def histogram(self, bins: int = 30) -> list[tuple[float, int]]:
        """Rows ``(bin_center, count)`` of ``samples``."""
        counts, edges = np.histogram(self.samples, bins=bins)
        centers = (edges[:-1] + edges[1:]) / 2
        return [(float(c), int(k)) for c, k in zip(centers, counts)]


def _trajectory(task):
    model_spec, noise, grid_points, seed, depth, algo = task
    sample = gen_model(model_spec, noise, uniform_grid(grid_points), seed)
    traj = detect_records(sample, depth, algo)
    return traj.N, traj.N_u


def run_record_law(cfg: McConfig, n: int | None = None) -> RecordLawResult:
    """Empirical law of record counts for model 1 or trajectories for model 3."""
    if cfg.model not in (ModelKind.M1, ModelKind.M3):
        raise InvalidArgumentError("record law experiments use model m1 or m3")
    n = cfg.n_values[0] if n is None else n
    spec = ModelSpec(cfg.model, n)
    cid = cell_id(cfg.model, cfg.noise, n, cfg.psi1_norm, cfg.psi2_norm)
    tasks = [
        (spec, cfg.noise, cfg.grid_points, Seed(cfg.base_seed, cid ^ r), cfg.depth, cfg.algo)
        for r in range(cfg.replicates)
    ]
    workers = cfg.workers or default_workers()
    if workers <= 1:
        rows = [_trajectory(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_trajectory, tasks))
    if cfg.model is ModelKind.M1:
        samples = np.array([nu[-1] for _, nu in rows]) / math.sqrt(n)
        x = np.linspace(0.0, max(6.0, float(samples.max()) * 1.1), 200)
        ks = stats.kstest(samples, lambda v: cdf(LimitLaw.G1, v)).statistic
        return RecordLawResult(cfg.model, n, samples=samples, x=x,
                               density=pdf(LimitLaw.G1, x), ks_statistic=float(ks))
    traj = np.vstack([nn for nn, _ in rows])
    return RecordLawResult(cfg.model, n, trajectories=traj,
                           reference=np.log(np.arange(1, n + 1)))


def format_table(result: McResult, title: str | None = None) -> str:
    """Aligned text table: one row per noise, one column per sample size.

    The second row of each block is the coefficient-norm column, which
    needs an external FAR(1) estimator and is reported as unavailable.
    """
    cfg = result.config
    ns = sorted({c.n for c in result.cells})
    width = 9
    lines = []
    if title:
        lines.append(title)
    lines.append(f"Model {cfg.model.value.upper()}  alpha={cfg.alpha}  replicates={cfg.replicates}")
    lines.append("n".ljust(8) + "".join(str(n).rjust(width) for n in ns))
    rates = {c.n: c.rejection_rate for c in result.cells}
    lines.append(cfg.noise.kind.value.capitalize().ljust(8) + "".join(f"{rates[n]:.3f}".rjust(width) for n in ns))
    lines.append("".ljust(8) + "".join("(n/a)".rjust(width) for _ in ns))
    return "\n".join(lines) + "\n"


def replicates_csv(result: McResult) -> str:
    """Raw per-replicate values as CSV text."""
    buf = io.StringIO()
    buf.write("model,noise,n,psi1_norm,replicate,T_n,N,N_upper,N_lower,reject\n")
    for c in result.cells:
        for r in range(c.T_samples.size):
            buf.write(
                f"{c.model.value},{c.noise.kind.value},{c.n},{c.psi1_norm!r},{r},"
                f"{c.T_samples[r]!r},{c.N_samples[r]},{c.N_upper[r]},{c.N_lower[r]},{int(c.rejects[r])}\n"
            )
    return buf.getvalue()


def with_workers(cfg: McConfig, workers: int) -> McConfig:
    return replace(cfg, workers=workers)
