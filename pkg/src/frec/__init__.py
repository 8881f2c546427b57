"""Functional records via depth and the record-based functional unit root test."""

from .asymptotics import LimitLaw, cdf, pdf, quantile
from .core import FunctionalSample, Grid, InvalidArgumentError, constant_sample, uniform_grid
from .depth import DepthKind, DepthOrder, DepthVector, compute_depth, depth_order, extremal_depth, mbd
from .records import (
    NotARecordError,
    RecordAlgorithm,
    RecordEvent,
    RecordKind,
    RecordTrajectory,
    classify,
    counting_process,
    detect_records,
)
from .urtest import TestResult, rb_unit_root_test, test_from_trajectory

__version__ = "0.1.0"

__all__ = [
    "LimitLaw",
    "cdf",
    "pdf",
    "quantile",
    "FunctionalSample",
    "Grid",
    "InvalidArgumentError",
    "constant_sample",
    "uniform_grid",
    "DepthKind",
    "DepthOrder",
    "DepthVector",
    "compute_depth",
    "depth_order",
    "extremal_depth",
    "mbd",
    "NotARecordError",
    "RecordAlgorithm",
    "RecordEvent",
    "RecordKind",
    "RecordTrajectory",
    "classify",
    "counting_process",
    "detect_records",
    "TestResult",
    "rb_unit_root_test",
    "test_from_trajectory",
]
