"""File formats: sample CSV, record trajectories, result documents, run configs.

Sample CSV
    One curve per row. If the first row parses as strictly increasing reals
    in [0, 1] (and more rows follow) it is the grid; otherwise a uniform grid
    over the columns is assumed.

Result document (``schema_version`` 1)
    UTF-8 text, one ``key<TAB>value`` pair per line. Keys are dotted paths
    into a nested mapping (``flags.alpha``); values are JSON scalars or
    arrays. Lines starting with ``#`` are comments.

Run config
    Flat ``key = value`` lines using the CLI flag names without dashes
    (``grid-points = 50``); ``#`` starts a comment.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import FunctionalSample, Grid, InvalidArgumentError, uniform_grid
from .records import RecordTrajectory

__all__ = [
    "FormatError",
    "SCHEMA_VERSION",
    "ResultDocument",
    "parse_csv",
    "write_csv",
    "format_sample_csv",
    "trajectory_rows",
    "format_trajectory",
    "parse_trajectory",
    "parse_config",
]

SCHEMA_VERSION = "1"


class FormatError(ValueError):
    """Malformed input file."""


def _parse_float(cell: str, row: int, col: int) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise FormatError(f"non-numeric value {cell!r} at row {row}, column {col}") from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite value {cell!r} at row {row}, column {col}")
    return value


def _looks_like_grid(row: list[float]) -> bool:
    a = np.asarray(row)
    return a.size >= 2 and a[0] >= 0.0 and a[-1] <= 1.0 and bool(np.all(np.diff(a) > 0))


def parse_csv(path) -> FunctionalSample:
    """Read a sample from ``path``; row and column numbers in errors are 1-based."""
    with open(path, newline="") as fh:
        raw = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if any(c.strip() for c in r)]
    if not raw:
        raise FormatError(f"{path}: empty file")
    width = len(raw[0][1])
    rows = []
    for lineno, cells in raw:
        if len(cells) != width:
            raise FormatError(f"row {lineno} has {len(cells)} columns, expected {width}")
        rows.append([_parse_float(c.strip(), lineno, k + 1) for k, c in enumerate(cells)])
    if width < 2:
        raise FormatError("curves need at least 2 columns")
    if len(rows) > 1 and _looks_like_grid(rows[0]):
        grid = Grid(rows[0])
        rows = rows[1:]
    else:
        grid = uniform_grid(width)
    return FunctionalSample(grid, np.array(rows))


def format_sample_csv(sample: FunctionalSample, header: bool = True) -> str:
    """CSV text with 17 significant digits, which round-trips every double."""
    lines = []
    if header:
        lines.append(",".join(format(v, ".17g") for v in sample.grid.points))
    for row in sample.values:
        lines.append(",".join(format(v, ".17g") for v in row))
    return "\n".join(lines) + "\n"


def write_csv(sample: FunctionalSample, path, header: bool = True) -> None:
    Path(path).write_text(format_sample_csv(sample, header))


def trajectory_rows(traj: RecordTrajectory) -> list[tuple[int, int, str, int, int, int]]:
    """Rows ``(j, R_j, kind, N_j, N_j^u, N_j^l)``; kind is ``-`` when ``R_j = 0``."""
    kinds = traj.kinds()
    return [
        (
            j + 1,
            int(traj.R[j]),
            kinds[j + 1].value if (j + 1) in kinds else "-",
            int(traj.N[j]),
            int(traj.N_u[j]),
            int(traj.N_l[j]),
        )
        for j in range(traj.n)
    ]


def format_trajectory(traj: RecordTrajectory) -> str:
    out = ["j,R,kind,N,N_upper,N_lower"]
    out += [",".join(str(v) for v in row) for row in trajectory_rows(traj)]
    return "\n".join(out) + "\n"


def parse_trajectory(text: str) -> list[tuple[int, int, str, int, int, int]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].split(",")[0] != "j":
        raise FormatError("trajectory text must start with its header row")
    rows = []
    for k, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 6:
            raise FormatError(f"trajectory row {k} has {len(parts)} fields, expected 6")
        j, r, kind, n, nu, nl = parts
        rows.append((int(j), int(r), kind, int(n), int(nu), int(nl)))
    return rows


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return _plain(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value  # enums
    return value


def _flatten(prefix: str, value, out: list[tuple[str, object]]) -> None:
    if isinstance(value, dict) and value:
        for k, v in value.items():
            if "." in k or "\t" in k:
                raise InvalidArgumentError(f"document key {k!r} may not contain '.' or tabs")
            _flatten(f"{prefix}.{k}" if prefix else k, v, out)
    else:
        out.append((prefix, value))


@dataclass
class ResultDocument:
    """Structured output of one CLI command."""

    command: str
    flags: dict = field(default_factory=dict)
    payload: dict = field(default_factory=dict)
    seed: int | None = None
    schema_version: str = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return _plain(
            {
                "schema_version": self.schema_version,
                "command": self.command,
                "seed": self.seed,
                "flags": self.flags,
                "payload": self.payload,
            }
        )

    def dumps(self) -> str:
        pairs: list[tuple[str, object]] = []
        _flatten("", self.to_dict(), pairs)
        lines = [f"# frec result document, schema {self.schema_version}"]
        lines += [f"{k}\t{json.dumps(v, allow_nan=True)}" for k, v in pairs]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "ResultDocument":
        root: dict = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            key, sep, raw = line.partition("\t")
            if not sep:
                raise FormatError(f"line {lineno}: expected key<TAB>value")
            try:
                value = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: bad value: {exc}") from None
            node = root
            *parents, leaf = key.split(".")
            for p in parents:
                node = node.setdefault(p, {})
            node[leaf] = value
        try:
            return cls(
                command=root["command"],
                flags=root.get("flags", {}),
                payload=root.get("payload", {}),
                seed=root.get("seed"),
                schema_version=root["schema_version"],
            )
        except KeyError as exc:
            raise FormatError(f"missing field {exc.args[0]!r}") from None


def parse_config(text: str) -> dict[str, str]:
    """Parse a flat ``key = value`` config; keys are normalized to use dashes."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise FormatError(f"config line {lineno}: expected key = value")
        out[key.strip().replace("_", "-")] = value.strip()
    return out
