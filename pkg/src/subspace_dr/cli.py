"""Command-line front end.

Subcommands::

    identities  residuals of the operator identities on seeded pairs
    rates       measured vs. exact norm decay as CSV
    iterate     one DR or MAP run, trace as CSV
    two-lines   curve and surface data for two lines in the plane
    ell2-demo   growth tables for the truncated block model
    bench       random-pair benchmark, records and per-angle medians

Exit status is 0 on success, 2 on a usage error and 1 on a runtime
error (with a one-line message on stderr).
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import ell2_demo, experiments, rates, svgplot, two_lines
from .iteration import DEFAULT_CAP, FixedCount, MaxDistance, TrueError, run_dr, run_map
from .operators import verify_identities
from .subspace_core import principal_angles

log = logging.getLogger("subspace_dr")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _shared(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--out", type=Path, default=Path("results"),
                   help="output directory, created if absent (default ./results)")
    p.add_argument("--format", choices=("csv", "svg"), default="csv",
                   help="svg also renders figures next to the data files")


def _angle_flags(p: argparse.ArgumentParser, default: tuple[int, int] | None = None) -> None:
    num, den = default if default else (None, None)
    p.add_argument("--theta-num", type=int, default=num,
                   help="use two lines at angle theta = num/den * pi")
    p.add_argument("--theta-den", type=int, default=den, help="angle denominator")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="subspace-dr", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("identities", help="operator identity residuals")
    _shared(p)
    _angle_flags(p)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--pairs", type=int, default=1)
    p.add_argument("--n-max", type=int, default=10)

    p = sub.add_parser("rates", help="norm decay of powers vs. Friedrichs-angle rates")
    _shared(p)
    _angle_flags(p)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--n-max", type=int, default=20)

    p = sub.add_parser("iterate", help="run DR or MAP and emit the trace")
    _shared(p)
    _angle_flags(p)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--method", choices=("dr", "map"), default="dr")
    p.add_argument("--criterion", choices=("true-error", "max-distance", "fixed"),
                   default="true-error")
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--n", type=int, default=100, help="step count for --criterion fixed")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--x0", type=str, default=None,
                   help="comma-separated start; default e0 for two lines, random otherwise")
    p.add_argument("--norm", type=float, default=10.0, help="norm of a random start")

    p = sub.add_parser("two-lines", help="closed-form curves and surfaces in the plane")
    _shared(p)
    _angle_flags(p, default=(1, 17))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--t-points", type=int, default=101,
                   help="grid size in t for the surfaces (0 disables them)")

    p = sub.add_parser("ell2-demo", help="growth tables for the truncated block model")
    _shared(p)
    p.add_argument("--m", type=int, default=2000, help="number of blocks")
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--n-max", type=int, default=5000)

    p = sub.add_parser("bench", help="DR vs. MAP on random subspace pairs")
    _shared(p)
    p.add_argument("--dim", type=int, default=50)
    p.add_argument("--pairs", type=int, default=100)
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--norm", type=float, default=10.0)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--bins", type=int, default=32)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _pair_from_args(args, index: int = 0):
    if args.theta_num is not None or args.theta_den is not None:
        if args.theta_num is None or args.theta_den is None:
            raise ValueError("--theta-num and --theta-den go together")
        cfg = two_lines.PlaneConfig.from_fraction(args.theta_num, args.theta_den)
        return cfg.subspaces()
    cfg = experiments.ExperimentConfig.scaled(args.dim, seed=args.seed)
    rng = experiments.make_rng(args.seed, index)
    return experiments.random_subspace_pair(cfg, rng)


def _write_csv(path: Path, header, rows) -> Path:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return path


def cmd_identities(args) -> int:
    rows = []
    worst = 0.0
    for i in range(args.pairs):
        U, V = _pair_from_args(args, i)
        rep = verify_identities(U, V, args.n_max)
        name, res = rep.worst()
        worst = max(worst, res)
        print(f"pair {i}: dim U={U.dim} dim V={V.dim} "
              f"c_F={principal_angles(U, V).friedrichs_cos:.6f} "
              f"identities={len(rep)} max residual={res:.3e} ({name})")
        rows += [(i, n, float(r)) for n, r in rep]
    path = _write_csv(args.out / "identities.csv", ["pair", "identity", "residual"], rows)
    print(f"max residual over all pairs: {worst:.3e}")
    log.info("wrote %s", path)
    return 0


def cmd_rates(args) -> int:
    U, V = _pair_from_args(args)
    rep = rates.rate_report(U, V, args.n_max)
    path = _write_csv(args.out / "rates.csv", ["n", "quantity", "measured", "predicted"],
                      [(r.n, r.quantity.value, float(r.measured), float(r.predicted)) for r in rep.rows])
    print(f"c_F = {rep.c_f!r}")
    print(f"max_relative_error = {rep.max_relative_error:.3e}")
    if args.format == "svg":
        series = []
        for q in rates.Quantity:
            n, m, _ = rep.series(q)
            series.append(svgplot.Series(q.value, n, m))
        svgplot.write_svg(args.out / "rates.svg", svgplot.line_plot(
            series, "measured operator-norm decay", "n", "norm", logy=True))
    log.info("wrote %s", path)
    return 0


def cmd_iterate(args) -> int:
    U, V = _pair_from_args(args)
    if args.x0:
        x0 = np.array([float(v) for v in args.x0.split(",")])
    elif args.theta_num is not None:
        x0 = np.array([1.0, 0.0])
    else:
        rng = experiments.make_rng(args.seed, 1_000_000)
        x0 = experiments.random_start(U.ambient_dim, args.norm, rng)
    rule = {"true-error": lambda: TrueError(args.eps),
            "max-distance": lambda: MaxDistance(args.eps),
            "fixed": lambda: FixedCount(args.n)}[args.criterion]()
    runner = run_dr if args.method == "dr" else run_map
    trace = runner(U, V, x0, rule, cap=args.cap)
    name = f"trace_{args.method}.csv"
    path = _write_csv(args.out / name,
                      ["n", "true_error", "dist_u", "dist_v", "iterate_norm"],
                      [(s.n, s.true_error, s.dist_u, s.dist_v, s.iterate_norm) for s in trace.steps])
    print(f"{trace.method.value}: {trace.iterations} iterations, terminated by "
          f"{trace.terminated_by.value}, final true error {trace.final_true_error:.3e}")
    if args.format == "svg":
        svgplot.write_svg(args.out / name.replace(".csv", ".svg"), svgplot.line_plot(
            [svgplot.Series("true error", trace.column("n"), trace.column("true_error"))],
            f"{trace.method.value} monitored error", "n", "error", logy=True))
    log.info("wrote %s", path)
    return 0


def cmd_two_lines(args) -> int:
    cfg = two_lines.PlaneConfig.from_fraction(args.theta_num, args.theta_den)
    curves = two_lines.curve_data(cfg, [1.0, 0.0], args.n)
    n = np.arange(1, args.n + 1)
    rows = [(q, cfg.theta, k, v) for q in two_lines.SURFACE_QUANTITIES
            for k, v in zip(n, curves[q])]
    two_lines.write_columns(args.out / "two_lines_curves.dat", rows)
    if args.format == "svg":
        labels = {"DR": "||T^n x||", "SHADOW": "||P_U T^n x||", "MAP": "||(P_V P_U)^n x||"}
        series = [svgplot.Series(labels[q], n, curves[q], c)
                  for q, c in zip(("DR", "SHADOW", "MAP"), ("#d62728", "#1f77b4", "#2ca02c"))]
        svgplot.write_svg(args.out / "two_lines_curves.svg", svgplot.line_plot(
            series, f"two lines, theta = {args.theta_num}pi/{args.theta_den}, x = e0",
            "n", "distance to solution"))
    if args.t_points > 0:
        t = np.linspace(0.0, 1.0, args.t_points)
        for q in two_lines.SURFACE_QUANTITIES:
            vals = two_lines.figure_surface(t, n, q)
            two_lines.write_columns(args.out / f"surface_{q.lower()}.dat",
                                    two_lines.surface_rows(q, t, n, vals))
            if args.format == "svg":
                svgplot.write_svg(args.out / f"surface_{q.lower()}.svg", svgplot.heatmap(
                    vals, n, t, f"{q}: theta = (pi/2) t^3, x = e0", "n", "t"))
    print(f"theta = {cfg.theta!r}; final norms DR={curves['DR'][-1]:.3e} "
          f"SHADOW={curves['SHADOW'][-1]:.3e} MAP={curves['MAP'][-1]:.3e}")
    return 0


def cmd_ell2(args) -> int:
    model = ell2_demo.canonical_model(args.m)
    x = ell2_demo.canonical_start(args.m)
    op = ell2_demo.sublinearity_certificate(model, x, args.gamma, args.n_max)
    sh = ell2_demo.shadow_sublinearity(model, args.gamma, args.n_max)
    ell2_demo.write_growth_table(args.out / "ell2_operator.dat", op)
    ell2_demo.write_growth_table(args.out / "ell2_shadow.dat", sh)
    print(f"operator: witness block {op.witness}, growth factor {op.delta:.6f}, "
          f"exceeds 1e3 at n = {op.first_exceeding(1e3)}")
    print(f"shadow:   first bound index {sh.witness}, delta {sh.delta:.6f}, "
          f"exceeds 1e3 at n = {sh.first_exceeding(1e3)}")
    if args.format == "svg":
        svgplot.write_svg(args.out / "ell2_growth.svg", svgplot.line_plot(
            [svgplot.Series("gamma^-n ||T^n x||", op.n, op.measured),
             svgplot.Series("operator bound", op.n, op.bound),
             svgplot.Series("gamma^-n ||P_U T^n x||", sh.n, sh.measured),
             svgplot.Series("shadow bound", sh.n, sh.bound)],
            f"scaled norms, gamma = {args.gamma}", "n", "value", logy=True))
    return 0


def cmd_bench(args) -> int:
    cfg = experiments.ExperimentConfig.scaled(
        args.dim, num_pairs=args.pairs, starts_per_pair=args.starts, start_norm=args.norm,
        epsilon=args.eps, seed=args.seed, cap=args.cap)
    records = experiments.run_benchmark(cfg, workers=args.workers)
    experiments.emit_csv(records, args.out / "bench.csv")
    capped = sum(r.capped for r in records)
    print(f"{len(records)} records, {capped} capped")
    if not records:
        return 0
    medians = experiments.aggregate_median(records, args.bins)
    experiments.emit_medians_csv(medians, args.out / "bench_medians.csv")
    for crit in experiments.CRITERIA:
        c = crit.value
        scatter, median = [], []
        for r in (r for r in records if r.criterion == c):
            scatter.append((f"{r.method}_{c}", r.friedrichs_angle,
                            r.pair_id * cfg.starts_per_pair + r.start_id, float(r.iterations)))
        for m in medians:
            if m.criterion == c:
                median.append((f"{m.method}_{c}", m.angle_mid, m.count, m.median_iterations))
        two_lines.write_columns(args.out / f"bench_{c}_all.dat", scatter)
        two_lines.write_columns(args.out / f"bench_{c}_median.dat", median)
        if args.format == "svg":
            all_series, med_series = [], []
            for method in ("DR", "MAP"):
                pts = [(a, v) for q, a, _, v in scatter if q.startswith(method + "_")]
                all_series.append(svgplot.Series(method, [p[0] for p in pts], [p[1] for p in pts]))
                mp = [(a, v) for q, a, _, v in median if q.startswith(method + "_")]
                med_series.append(svgplot.Series(method, [p[0] for p in mp], [p[1] for p in mp]))
            xlim = (0.0, math.pi / 2)
            svgplot.write_svg(args.out / f"bench_{c}_all.svg", svgplot.scatter_plot(
                all_series, f"{c} criterion", "Friedrichs angle (rad)", "iterations",
                logy=True, xlim=xlim))
            svgplot.write_svg(args.out / f"bench_{c}_median.svg", svgplot.line_plot(
                med_series, f"{c} criterion (median)", "Friedrichs angle (rad)",
                "iterations", logy=True))
    return 0


COMMANDS = {
    "identities": cmd_identities,
    "rates": cmd_rates,
    "iterate": cmd_iterate,
    "two-lines": cmd_two_lines,
    "ell2-demo": cmd_ell2,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args)
    except Exception as exc:  # one-line diagnostic, no traceback
        print(f"subspace-dr {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
