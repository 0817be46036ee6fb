"""Command-line front end.

    harmocont run --config paper_parabola.cfg [--case d] [--reps N] [--seed S] [--out DIR]
    harmocont measure --config paper_parabola.cfg [--case e] [--out DIR]
    harmocont diag --config paper_hyperbola.cfg
    harmocont emit-default-config [--curve parabola|hyperbola]

Bare preset names resolve to the configs bundled with the package.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, default_config, load
from .errors import ConfigurationError, HarmocontError
from .experiment import aggregate, get_truth, run_repetitions
from .geometry import analytic_radius, curve_boundary_distance, sample_arc
from .io import write_csv, write_json
from .measure import axis_rows, case_geometry, fit_lower_bound, solve_measure
from .potential import assemble
from .solver import condition_diagnostics

CASE_HEADER = (
    "name",
    "delta",
    "alpha",
    "n_controlled",
    "err_tau_l2",
    "err_T_l2",
    "err_tau_max",
    "err_T_max",
    "seed",
    "repetitions",
    "err_T_l2_std",
)
POINT_HEADER = ("delta", "index", "x", "y", "f", "u", "controlled_flag")
MEASURE_HEADER = ("x", "phi", "good_controlled")

EXIT_CONFIG = 2
EXIT_NUMERIC = 1


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _load(args) -> RunConfig:
    cfg = load(args.config)
    overrides = {}
    if getattr(args, "reps", None) is not None:
        if args.reps < 1:
            raise ConfigurationError("--reps must be >= 1")
        overrides["repetitions"] = args.reps
    if getattr(args, "seed", None) is not None:
        if not 0 <= args.seed < 2**63:
            raise ConfigurationError("--seed must lie in [0, 2**63)")
        overrides["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        overrides["output_dir"] = args.out
    return dataclasses.replace(cfg, **overrides) if overrides else cfg


def _manifest(cfg: RunConfig, command: str, files: list[Path], out: Path) -> Path:
    data = {
        "command": command,
        "config_hash": cfg.digest(),
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "files": sorted(p.name for p in files),
    }
    return write_json(out / "manifest.json", data)


def cmd_run(args) -> int:
    try:
        cfg = _load(args)
        cases = cfg.build_cases(args.case)
    except HarmocontError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    if not cases:
        return _fail("no cases selected", EXIT_CONFIG)
    truth = get_truth(cfg.truth)
    out = Path(cfg.output_dir)
    files: list[Path] = []
    failed = 0
    by_name: dict[str, list] = {}
    for case in cases:
        by_name.setdefault(case.name, []).append(case)
    for name, group in by_name.items():
        rows, points = [], []
        try:
            for case in group:
                results = run_repetitions(case, truth, cfg.repetitions)
                row = aggregate(results)
                rows.append([getattr(row, h) for h in CASE_HEADER])
                points.extend((case.delta, *p) for p in results[0].point_rows())
                print(
                    f"case {name} delta={case.delta:g} alpha={row.alpha:.3g} "
                    f"n_controlled={row.n_controlled} err_tau_l2={row.err_tau_l2:.6g} "
                    f"err_T_l2={row.err_T_l2:.6g} err_T_max={row.err_T_max:.6g}"
                )
        except HarmocontError as exc:
            failed += 1
            print(f"error: case {name}: {exc}", file=sys.stderr)
            continue
        files.append(write_csv(out / f"case_{name}.csv", CASE_HEADER, rows))
        files.append(write_csv(out / f"case_{name}_points.csv", POINT_HEADER, points))
    files.append(_manifest(cfg, "run", files, out))
    if failed:
        return _fail(f"{failed} case(s) failed", EXIT_NUMERIC)
    return 0


def cmd_measure(args) -> int:
    try:
        cfg = _load(args)
    except HarmocontError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    m = cfg.measure
    out = Path(cfg.output_dir)
    jobs = []
    if m.geometry is not None:
        jobs.append(("custom", m.geometry))
    else:
        sampling = sample_arc(cfg.curve, cfg.count, cfg.rule)
        for spec in cfg.cases:
            if args.case is not None and spec.name != args.case:
                continue
            try:
                geom = case_geometry(cfg.curve.x_lo, cfg.curve.x_hi, sampling.x, spec.ranges, m.h)
            except HarmocontError as exc:
                return _fail(f"case {spec.name}: {exc}", EXIT_CONFIG)
            jobs.append((spec.name, geom))
    if not jobs:
        return _fail("no cases selected", EXIT_CONFIG)
    files = []
    for name, geom in jobs:
        try:
            grid = solve_measure(geom, m.nx, m.ny)
        except HarmocontError as exc:
            return _fail(f"measure {name}: {exc}", EXIT_NUMERIC)
        try:
            c4 = f"{fit_lower_bound(grid).c4_hat:.6g}"
        except HarmocontError:
            c4 = "n/a"
        rows = axis_rows(grid, m.threshold)
        good = sum(r[2] for r in rows)
        print(
            f"measure {name}: {m.nx}x{m.ny} grid, residual={grid.solver_residual:.2e}, "
            f"c4_hat={c4}, good_controlled={good}/{len(rows)}"
        )
        files.append(write_csv(out / f"measure_{name}.csv", MEASURE_HEADER, rows))
    _manifest(cfg, "measure", files, out)
    return 0


def cmd_diag(args) -> int:
    if args.debug_identity:
        s_max, s_min, cond = condition_diagnostics(np.eye(args.debug_identity))
        print(f"identity[{args.debug_identity}]: sigma_max={s_max:.6g} sigma_min={s_min:.6g} cond={cond:.6g}")
        return 0
    try:
        cfg = _load(args)
        dist = curve_boundary_distance(cfg.curve, cfg.domain)
        diam = cfg.domain.diameter()
        eps = analytic_radius(cfg.curve, dist, diam)
        sampling = sample_arc(cfg.curve, cfg.count, cfg.rule)
        K = assemble(sampling, cfg.source)
    except HarmocontError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    eps1 = min(1.0, dist) if cfg.curve.kind == "hyperbola" else dist
    print(f"curve: {cfg.curve.kind} {cfg.curve.params} on [{cfg.curve.x_lo}, {cfg.curve.x_hi}]")
    print(f"omega: {cfg.domain.kind}, diam={diam:.6g}")
    print(f"dist(T, boundary)={dist:.6g} eps1={eps1:.6g} analytic radius eps={eps:.6g}")
    s_max, s_min, cond = condition_diagnostics(K)
    print(f"full matrix {K.shape[0]}x{K.shape[1]}: sigma_max={s_max:.6g} sigma_min={s_min:.6g} cond={cond:.6g}")
    for case in cfg.build_cases():
        if case.delta != cfg.noise_levels[0]:
            continue
        s_max, s_min, cond = condition_diagnostics(K.restrict(case.controlled_mask))
        print(
            f"case {case.name}: rows={case.n_controlled} sigma_max={s_max:.6g} "
            f"sigma_min={s_min:.6g} cond={cond:.6g}"
        )
    return 0


def cmd_emit(args) -> int:
    try:
        text = default_config(args.curve).dumps()
    except HarmocontError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="harmocont",
        description="Continue harmonic functions along quadratic curves from sub-arc data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run continuation cases and write CSV tables")
    p.add_argument("--config", required=True)
    p.add_argument("--case", default=None, help="only run the case with this name")
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("measure", help="harmonic measure along the flattened curve")
    p.add_argument("--config", required=True)
    p.add_argument("--case", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("diag", help="analytic radius, distances and condition numbers")
    p.add_argument("--config", default=None)
    p.add_argument("--debug-identity", type=int, default=0, metavar="N", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("emit-default-config", help="print the default config")
    p.add_argument("--curve", choices=["parabola", "hyperbola"], default="parabola")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_emit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "diag" and not args.debug_identity and not args.config:
        parser.error("diag requires --config")
    try:
        return args.func(args)
    except ConfigurationError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except HarmocontError as exc:
        return _fail(str(exc), EXIT_NUMERIC)


if __name__ == "__main__":
    sys.exit(main())
