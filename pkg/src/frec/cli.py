"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 internal error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import LimitLaw, cdf, quantile
from .core import InvalidArgumentError, uniform_grid
from .depth import DepthKind, compute_depth, depth_order
from .harness import (
    McConfig,
    ReplicateError,
    format_table,
    replicates_csv,
    run_power_sweep,
    run_record_law,
    run_size_power,
)
from .io import FormatError, ResultDocument, format_sample_csv, format_trajectory, parse_config, parse_csv
from .records import RecordAlgorithm, detect_records
from .simulate import ModelSpec, NoiseSpec, Seed, gen_model
from .urtest import test_from_trajectory

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _alpha(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid alpha {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must be in (0, 1), got {value}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_depth_flags(p, with_algo=True):
    p.add_argument("--depth", choices=[k.value for k in DepthKind], default="mbd")
    if with_algo:
        p.add_argument("--algo", choices=[a.value for a in RecordAlgorithm], default="exact")
    p.add_argument("--seed", type=int, default=None, help="seed for depth tie-breaking")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frec", description="Functional records and the record-based unit root test")
    parser.add_argument("--version", action="version", version=f"frec {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("quantile", help="quantile of a limit law")
    p.add_argument("--law", choices=[law.value for law in LimitLaw], default="g2")
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--out")

    p = sub.add_parser("depth", help="depth of every curve in a CSV sample")
    p.add_argument("path")
    _add_depth_flags(p, with_algo=False)
    p.add_argument("--out")

    p = sub.add_parser("records", help="functional records of a CSV sample")
    p.add_argument("path")
    _add_depth_flags(p)
    p.add_argument("--out")
    p.add_argument("--trajectory-out", help="write the j,R,kind,N,N_upper,N_lower table here")

    p = sub.add_parser("test", help="record-based unit root test on a CSV sample")
    p.add_argument("path")
    _add_depth_flags(p)
    p.add_argument("--alpha", type=_alpha, default=0.05)
    p.add_argument("--out")

    p = sub.add_parser("simulate", help="simulate one model and write it as CSV")
    p.add_argument("--model", choices=[f"m{i}" for i in range(1, 7)], default="m1")
    p.add_argument("--noise", choices=["bm", "bb", "gp"], default="bm")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--grid-points", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--psi1-norm", type=float, default=0.5)
    p.add_argument("--psi2-norm", type=float, default=0.7)
    p.add_argument("--out")

    p = sub.add_parser("mc", help="Monte Carlo size/power, record-law or power-sweep experiment")
    p.add_argument("--config", help="flat key = value file; flags given here override it")
    p.add_argument("--experiment", choices=["size-power", "record-law", "sweep"])
    p.add_argument("--model", choices=[f"m{i}" for i in range(1, 7)])
    p.add_argument("--noise", choices=["bm", "bb", "gp"])
    p.add_argument("--n", type=_int_list)
    p.add_argument("--replicates", type=int)
    p.add_argument("--alpha", type=_alpha)
    p.add_argument("--depth", choices=[k.value for k in DepthKind])
    p.add_argument("--algo", choices=[a.value for a in RecordAlgorithm])
    p.add_argument("--seed", type=int)
    p.add_argument("--grid-points", type=int)
    p.add_argument("--sweep", type=_float_list)
    p.add_argument("--psi1-norm", type=float)
    p.add_argument("--psi2-norm", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output prefix; writes <out>.txt, <out>.csv and <out>.doc")
    return parser


_MC_DEFAULTS = {
    "experiment": "size-power",
    "model": "m1",
    "noise": "bm",
    "n": [200],
    "replicates": 200,
    "alpha": 0.05,
    "depth": "mbd",
    "algo": "exact",
    "seed": 20240601,
    "grid-points": 50,
    "sweep": None,
    "psi1-norm": 0.5,
    "psi2-norm": 0.7,
    "workers": None,
    "out": None,
}

_MC_TYPES = {
    "experiment": str, "model": str, "noise": str, "n": _int_list, "replicates": int,
    "alpha": _alpha, "depth": str, "algo": str, "seed": int, "grid-points": int,
    "sweep": _float_list, "psi1-norm": float, "psi2-norm": float, "workers": int, "out": str,
}


def _flags(args) -> dict:
    return {k.replace("_", "-"): v for k, v in vars(args).items() if k != "command"}


def _emit(doc: ResultDocument, out: str | None) -> None:
    text = doc.dumps()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_quantile(args) -> ResultDocument:
    q = quantile(args.law, args.alpha)
    return ResultDocument("quantile", _flags(args), {"law": args.law, "alpha": args.alpha, "quantile": q,
                                                     "cdf_at_quantile": cdf(args.law, q)})


def cmd_depth(args) -> ResultDocument:
    sample = parse_csv(args.path)
    dv = compute_depth(sample, args.depth)
    order = depth_order(dv, args.seed)
    payload = {
        "n": sample.n,
        "m": sample.m,
        "depth": dv.values,
        "order": [i + 1 for i in order.permutation],
        "tie_groups": [[i + 1 for i in g] for g in order.tie_groups if len(g) > 1],
    }
    return ResultDocument("depth", _flags(args), payload, seed=args.seed)


def cmd_records(args) -> ResultDocument:
    sample = parse_csv(args.path)
    traj = detect_records(sample, args.depth, args.algo, args.seed)
    if args.trajectory_out:
        Path(args.trajectory_out).write_text(format_trajectory(traj))
    events = [
        {
            "time": ev.time,
            "kind": ev.kind.value,
            "t_upper": ev.t_upper,
            "t_lower": ev.t_lower,
            "depth": ev.depth_at_detection,
            "definitional": ev.definitional,
        }
        for ev in traj.events
    ]
    payload = {
        "n": traj.n,
        "record_times": traj.record_times,
        "events": events,
        "N_total": traj.n_records,
        "N_upper": traj.n_upper,
        "N_lower": traj.n_lower,
        "T_n": traj.n_records / math.sqrt(traj.n),
        "trajectory": {"N": traj.N, "N_upper": traj.N_u, "N_lower": traj.N_l},
    }
    return ResultDocument("records", _flags(args), payload, seed=args.seed)


def cmd_test(args) -> ResultDocument:
    sample = parse_csv(args.path)
    if sample.n < 3:
        raise UsageError(f"the test needs at least 3 curves, got {sample.n}")
    traj = detect_records(sample, args.depth, args.algo, args.seed)
    res = test_from_trajectory(traj, args.alpha)
    return ResultDocument("test", _flags(args), res.to_dict(), seed=args.seed)


def cmd_simulate(args) -> str:
    spec = ModelSpec(args.model, args.n, psi1_norm=args.psi1_norm, psi2_norm=args.psi2_norm)
    sample = gen_model(spec, NoiseSpec(args.noise), uniform_grid(args.grid_points), Seed(args.seed))
    return format_sample_csv(sample)


def _mc_settings(args) -> dict:
    settings = dict(_MC_DEFAULTS)
    if args.config:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise FormatError(f"cannot read config: {exc}") from None
        for key, raw in parse_config(text).items():
            if key not in _MC_TYPES or key == "config":
                raise UsageError(f"unknown config key {key!r}")
            try:
                settings[key] = _MC_TYPES[key](raw)
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {key!r}: {exc}") from None
    for key, value in _flags(args).items():
        if key != "config" and value is not None:
            settings[key] = value
    return settings


def cmd_mc(args) -> tuple[ResultDocument, str, str | None]:
    s = _mc_settings(args)
    cfg = McConfig(
        model=s["model"],
        noise=NoiseSpec(s["noise"]),
        n_values=tuple(s["n"]),
        replicates=s["replicates"],
        alpha=s["alpha"],
        depth=s["depth"],
        algo=s["algo"],
        base_seed=s["seed"],
        sweep=tuple(s["sweep"]) if s["sweep"] else None,
        grid_points=s["grid-points"],
        psi1_norm=s["psi1-norm"],
        psi2_norm=s["psi2-norm"],
        workers=s["workers"],
    )
    exp = s["experiment"]
    flags = {k: v for k, v in s.items()}
    if exp == "sweep":
        rows = run_power_sweep(cfg)
        table = "norm      rate\n" + "".join(f"{a:<9.4g} {r:.3f}\n" for a, r in rows)
        doc = ResultDocument("mc", flags, {"experiment": exp, "norms": [a for a, _ in rows],
                                           "rejection_rate": [r for _, r in rows]}, seed=cfg.base_seed)
        return doc, table, None
    if exp == "record-law":
        res = run_record_law(cfg)
        if res.samples is not None:
            data = "x,count\n" + "".join(f"{x!r},{c}\n" for x, c in res.histogram())
            payload = {"experiment": exp, "n": res.n, "samples": res.samples, "ks_statistic": res.ks_statistic}
        else:
            med = np.median(res.trajectories, axis=0)
            data = "j,N_j,log_j\n" + "".join(
                f"{j + 1},{med[j]!r},{res.reference[j]!r}\n" for j in range(res.n)
            )
            payload = {"experiment": exp, "n": res.n, "final_N": res.trajectories[:, -1]}
        return ResultDocument("mc", flags, payload, seed=cfg.base_seed), data, None
    res = run_size_power(cfg)
    payload = {
        "experiment": exp,
        "cells": [
            {"n": c.n, "rejection_rate": c.rejection_rate, "mean_T": c.mean_T, "T": c.T_samples,
             "N": c.N_samples, "wall_time": c.wall_time}
            for c in res.cells
        ],
    }
    return ResultDocument("mc", flags, payload, seed=cfg.base_seed), format_table(res), replicates_csv(res)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            text = cmd_simulate(args)
            if args.out:
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.command == "mc":
            doc, table, raw = cmd_mc(args)
            out = doc.flags.get("out")
            if out:
                Path(f"{out}.txt").write_text(table)
                Path(f"{out}.doc").write_text(doc.dumps())
                if raw is not None:
                    Path(f"{out}.csv").write_text(raw)
            else:
                sys.stdout.write(table)
            return EXIT_OK
        handler = {"quantile": cmd_quantile, "depth": cmd_depth, "records": cmd_records, "test": cmd_test}
        doc = handler[args.command](args)
        _emit(doc, args.out)
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (FormatError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvalidArgumentError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ReplicateError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
