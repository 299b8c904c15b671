"""Batch command-line front-end.

Subcommands:

* ``coverage``    analytic coverage sweep over the trajectory and threshold
                  grid; ``--validate`` adds Monte Carlo rows.
* ``validate``    alias for ``coverage --validate``.
* ``min-height``  altitude planner sweep across environments.
* ``trajectory``  emit the configured trajectory.
* ``los-table``   LoS probability grids over distance and elevation.

All commands write CSV into the output directory and, unless disabled, a
companion PNG. CSV output is byte-deterministic for a fixed config: floats
are written in shortest round-trip form, rows in a fixed sort order, lines
terminated with a bare newline.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 analytic/Monte-Carlo disagreement under --strict.
"""

import argparse
import dataclasses
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional

from . import figures
from .analysis import QuadratureError, coverage_report
from .config import ConfigError, RunConfig, load_config
from .channel import los_probability
from .montecarlo import estimate
from .planner import min_height
from .trajectory import write_trajectory_csv

__all__ = ["main"]


class ValidationFailure(RuntimeError):
    """Analytic and Monte Carlo estimates disagree beyond tolerance."""


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path: Path, header: List[str], rows: List[List]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _mc_disagrees(analytic, mc) -> bool:
    # 99.7% Wald band plus a fixed slack per probability.
    pairs = [
        (analytic.p1, mc.p1), (analytic.p2, mc.p2),
        (analytic.p3, mc.p3), (analytic.p4, mc.p4),
        (analytic.p_tot, mc.p_tot), (analytic.p_aue, mc.p_aue),
        (analytic.p_tue, mc.p_tue),
    ]
    for a, m in pairs:
        bound = 3.0 * math.sqrt(m * (1.0 - m) / mc.trials) + 1e-4
        if abs(a - m) > bound:
            return True
    return False


def cmd_coverage(cfg: RunConfig, validate: bool, strict: bool, threads: int) -> int:
    points = cfg.trajectory_points()
    los = cfg.los_for_environment(cfg.environment_names[0])

    tasks = []
    for point in points:
        for th, (ta_db, tt_db) in zip(cfg.thresholds, cfg.theta_labels):
            tasks.append((point, th, ta_db, tt_db))

    analytic = [coverage_report(cfg.system, los, point, th)
                for point, th, _, _ in tasks]

    mc_reports = [None] * len(tasks)
    if validate:
        def run(idx):
            point, th, _, _ = tasks[idx]
            mc = dataclasses.replace(cfg.mc, seed=cfg.mc.seed + idx)
            return estimate(cfg.system, los, point, th, mc)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                mc_reports = list(pool.map(run, range(len(tasks))))
        else:
            mc_reports = [run(i) for i in range(len(tasks))]

    header = ["n", "r_A_m", "h_m", "theta_A_dB", "theta_T_dB",
              "p1", "p2", "p3", "p4", "p_tot", "p_aue", "p_tue", "method"]
    if validate:
        header += ["ci_halfwidth", "trials"]

    rows = []
    disagreement = False
    for idx, (point, th, ta_db, tt_db) in enumerate(tasks):
        for report in (analytic[idx], mc_reports[idx]):
            if report is None:
                continue
            row = [point.n, float(point.r_a), float(point.h), ta_db, tt_db,
                   report.p1, report.p2, report.p3, report.p4,
                   report.p_tot, report.p_aue, report.p_tue, report.method]
            if validate:
                row += [report.ci_halfwidth, report.trials]
            rows.append(row)
        if validate and _mc_disagrees(analytic[idx], mc_reports[idx]):
            disagreement = True

    out = cfg.output_dir / "coverage.csv"
    _write_csv(out, header, rows)
    print(f"wrote {out} ({len(rows)} rows)")

    if cfg.figures:
        fig_rows = [
            {"n": r[0], "theta_a_db": r[3], "theta_t_db": r[4],
             "p_tot": r[9], "method": r[12]}
            for r in rows
        ]
        fig_path = cfg.output_dir / "coverage.png"
        figures.coverage_figure(fig_rows, fig_path)
        print(f"wrote {fig_path}")

    if strict and disagreement:
        raise ValidationFailure("Monte Carlo estimates fall outside the analytic band")
    return 0


def cmd_min_height(cfg: RunConfig) -> int:
    points = cfg.trajectory_points()
    header = ["n", "r_A_m", "theta_A_dB", "theta_T_dB", "env",
              "min_height_m", "best_height_m", "best_p_tot"]
    rows = []
    fig_rows = []
    for env in cfg.environment_names:
        los = cfg.los_for_environment(env)
        for point in points:
            for th, (ta_db, tt_db) in zip(cfg.thresholds, cfg.theta_labels):
                res = min_height(cfg.system, los, point, th, cfg.search)
                rows.append([point.n, float(point.r_a), ta_db, tt_db, env,
                             res.min_height, res.best_height, res.best_p_tot])
                fig_rows.append({"n": point.n, "env": env, "theta_a_db": ta_db,
                                 "theta_t_db": tt_db, "min_height_m": res.min_height,
                                 "best_height_m": res.best_height})
    out = cfg.output_dir / "min_height.csv"
    _write_csv(out, header, rows)
    print(f"wrote {out} ({len(rows)} rows)")
    if cfg.figures:
        fig_path = cfg.output_dir / "min_height.png"
        figures.min_height_figure(fig_rows, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_trajectory(cfg: RunConfig) -> int:
    points = cfg.trajectory_points()
    out = cfg.output_dir / "trajectory.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        write_trajectory_csv(points, fh)
    print(f"wrote {out} ({len(points)} points)")
    if cfg.figures:
        fig_path = cfg.output_dir / "trajectory.png"
        figures.trajectory_figure(points, cfg.system.cell_radius, fig_path)
        print(f"wrote {fig_path}")
    return 0


def cmd_los_table(cfg: RunConfig) -> int:
    radius = cfg.system.cell_radius
    h_b = cfg.system.bs_height
    distances = [radius * k / 100.0 for k in range(101)]
    header = ["env", "h_m", "r_a_m", "elevation_deg", "p_los"]
    rows = []
    for env in cfg.environment_names:
        los = cfg.los_for_environment(env)
        for h in cfg.table_heights:
            for r in distances:
                p = los_probability(los, r, h, h_b)
                elev = math.degrees(math.atan2(h - h_b, r))
                rows.append([env, float(h), float(r), elev, p])
    out = cfg.output_dir / "los_table.csv"
    _write_csv(out, header, rows)
    print(f"wrote {out} ({len(rows)} rows)")
    if cfg.figures:
        fig_rows = [{"env": r[0], "h_m": r[1], "r_a_m": r[2], "p_los": r[4]}
                    for r in rows]
        fig_path = cfg.output_dir / "los_table.png"
        figures.los_figure(fig_rows, fig_path)
        print(f"wrote {fig_path}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skynoma",
        description="Rate coverage analysis for aerial-terrestrial uplink NOMA.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("coverage", "coverage probabilities over the trajectory"),
        ("validate", "coverage with Monte Carlo validation rows"),
        ("min-height", "minimum/best height planner sweep"),
        ("trajectory", "emit the configured trajectory"),
        ("los-table", "LoS probability grids"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, default=None, help="INI config file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", help="override one config value")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--trials", type=int, default=None, help="Monte Carlo trials")
        p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for Monte Carlo tasks")
        p.add_argument("--no-figures", action="store_true",
                       help="skip PNG rendering")
        if name in ("coverage", "validate"):
            p.add_argument("--validate", action="store_true",
                           help="add Monte Carlo rows")
            p.add_argument("--strict", action="store_true",
                           help="exit 3 if Monte Carlo disagrees with analytic")
    return parser


def _apply_flag_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.out is not None:
        cfg.output_dir = Path(args.out)
    if args.trials is not None or args.seed is not None:
        cfg.mc = dataclasses.replace(
            cfg.mc,
            trials=args.trials if args.trials is not None else cfg.mc.trials,
            seed=args.seed if args.seed is not None else cfg.mc.seed,
        )
    if args.no_figures:
        cfg.figures = False
    return cfg


def run(argv: Optional[List[str]] = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep 2 reserved for numerics
        return 0 if exc.code == 0 else 1
    try:
        cfg = load_config(args.config, args.overrides)
        cfg = _apply_flag_overrides(cfg, args)
        if args.command in ("coverage", "validate"):
            validate = args.command == "validate" or args.validate
            return cmd_coverage(cfg, validate, args.strict, max(1, args.threads))
        if args.command == "min-height":
            return cmd_min_height(cfg)
        if args.command == "trajectory":
            return cmd_trajectory(cfg)
        if args.command == "los-table":
            return cmd_los_table(cfg)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except ValidationFailure as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
