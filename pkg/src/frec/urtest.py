"""Record-based unit root test for functional time series.

H0: the series is I(1). The statistic is ``T_n = N_n / sqrt(n)``, the total
number of records normalized by ``sqrt(n)``; under H0 it converges to the
``G2`` law and under stationarity it tends to zero, so H0 is rejected for
small values.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .asymptotics import LimitLaw, cdf, quantile
from .core import FunctionalSample, InvalidArgumentError
from .depth import DepthKind
from .records import RecordAlgorithm, RecordTrajectory, detect_records

__all__ = ["TestResult", "rb_unit_root_test", "test_from_trajectory"]


@dataclass(frozen=True)
class TestResult:
    __test__ = False  # keep pytest from collecting this class

    n: int
    N_total: int
    N_upper: int
    N_lower: int
    T_n: float
    alpha: float
    q_alpha: float
    p_value: float
    reject: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError(f"alpha must be in (0, 1), got {alpha!r}")


def test_from_trajectory(traj: RecordTrajectory, alpha: float = 0.05) -> TestResult:
    """Evaluate the test on an already computed record trajectory."""
    _check_alpha(alpha)
    n = traj.n
    if n < 3:
        raise InvalidArgumentError(f"the test needs at least 3 curves, got {n}")
    total = traj.n_records
    t_n = total / math.sqrt(n)
    q = quantile(LimitLaw.G2, alpha)
    return TestResult(
        n=n,
        N_total=total,
        N_upper=traj.n_upper,
        N_lower=traj.n_lower,
        T_n=t_n,
        alpha=alpha,
        q_alpha=q,
        p_value=cdf(LimitLaw.G2, t_n),
        reject=t_n < q,
    )


test_from_trajectory.__test__ = False


def rb_unit_root_test(
    sample: FunctionalSample,
    kind: DepthKind | str = DepthKind.MBD,
    algo: RecordAlgorithm | str = RecordAlgorithm.EXACT,
    alpha: float = 0.05,
    tiebreak_seed: int | None = None,
) -> TestResult:
    """Run the record-based unit root test on ``sample``.

    The p-value is the left-tail probability ``F2(T_n)``, so
    ``reject == (p_value < alpha)``.
    """
    _check_alpha(alpha)
    if sample.n < 3:
        raise InvalidArgumentError(f"the test needs at least 3 curves, got {sample.n}")
    traj = detect_records(sample, kind, algo, tiebreak_seed)
    return test_from_trajectory(traj, alpha)
