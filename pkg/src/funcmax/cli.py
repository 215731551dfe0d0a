"""Batch command-line front end.

Subcommands:
  test      run the paired mean test on two CSV panels
  simulate  generate a synthetic paired panel from a DGP config
  level     Monte Carlo empirical level over a spec's grid
  power     Monte Carlo empirical power over a spec's grid
  compare   level/power for all three methods on shared multiplier draws

Exit codes: 0 success, 2 grid mismatch without --async, 3 malformed CSV,
4 invalid experiment spec, 1 other errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bootstrap import MultiplierPlan, decide, run_bootstrap, run_bootstrap_async
from .errors import FuncmaxError, GridMismatch, IngestError, SpecError
from .experiments import (
    ExperimentSpec,
    default_threads,
    run_level,
    run_power,
    write_results,
)
from .sample import difference, export_csv, ingest_csv, PairedFunctionalSample, TimeGrid
from .simulate import DgpConfig, apply_alternative, generate_null
from .stats import (
    StatisticKind,
    async_stats,
    compute_stats,
    default_projection_basis,
)

EXIT_GRID_MISMATCH = 2
EXIT_BAD_CSV = 3
EXIT_BAD_SPEC = 4


def _statistic_kind(method: str, T: int, projection_R: int) -> StatisticKind:
    if method == "proposed":
        return StatisticKind.proposed()
    if method == "max":
        return StatisticKind.maximum()
    return StatisticKind.projection(default_projection_basis(T, projection_R))


def _add_common(p):
    p.add_argument("--gamma", type=float, default=0.05, help="test level")
    p.add_argument("--draws", type=int, default=300, metavar="N",
                   help="bootstrap multiplier draws")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: FUNCMAX_THREADS or 1)")
    p.add_argument("--out", default=None, metavar="PATH")


def cmd_test(args) -> int:
    try:
        sample = ingest_csv(args.x, args.y)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CSV

    plan = MultiplierPlan(n=sample.n, N=args.draws, seed=args.seed)
    T = len(sample.grid_y)
    kind = _statistic_kind(args.method, T, args.projection_R)

    if sample.grid_x == sample.grid_y:
        z = difference(sample)
        stat = compute_stats(z, kind)
        dist = run_bootstrap(z, kind, plan)
    elif not getattr(args, "use_async", False):
        print(
            "error: x and y grids differ; pass --async for the interpolated "
            "statistic",
            file=sys.stderr,
        )
        return EXIT_GRID_MISMATCH
    else:
        if args.method != "proposed":
            print("error: --async supports only --method proposed", file=sys.stderr)
            return EXIT_GRID_MISMATCH
        stat = async_stats(sample)
        dist = run_bootstrap_async(sample, plan)

    report = decide(stat, dist, args.gamma, kind=kind, seed=args.seed,
                    n=sample.n, T=T)
    verdict = "REJECT" if report.reject_global else "no rejection"
    print(
        f"method={args.method} n={sample.n} K={sample.K} T={T} N={args.draws} "
        f"gamma={args.gamma}"
    )
    print(
        f"global statistic {report.stat.global_stat:.6g}  "
        f"quantile {report.quantile:.6g}  p={report.p_global:.4g}  -> {verdict}"
    )
    rejected = [k + 1 for k, r in enumerate(report.reject_channel) if r]
    print(f"channels rejected ({len(rejected)}/{report.K}): {rejected}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json())
        print(f"report written to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    if args.config:
        with open(args.config) as fh:
            cfg = DgpConfig.from_json(fh.read())
    else:
        cfg = DgpConfig(
            n=args.n, K=args.K, T=args.T, rho=args.rho, noise=args.noise,
            s=args.s, delta=args.delta, seed=args.seed,
        )
    z = apply_alternative(generate_null(cfg, args.run_index), cfg)
    grid = TimeGrid.uniform(cfg.T)
    sample = PairedFunctionalSample(
        x=np.zeros_like(z.z), y=z.z, grid_x=grid, grid_y=grid
    )
    export_csv(sample, args.out_x, args.out_y)
    print(f"wrote {args.out_x} and {args.out_y} (n={cfg.n}, K={cfg.K}, T={cfg.T})")
    return 0


def _load_spec(args) -> ExperimentSpec:
    from dataclasses import replace

    with open(args.spec) as fh:
        raw = json.load(fh)
    spec = ExperimentSpec.from_json_dict(raw)
    if args.paper_scale:
        spec = spec.at_paper_scale()
    if args.gamma is not None:
        spec = replace(spec, gamma=args.gamma)
    if args.draws is not None:
        spec = replace(spec, N=args.draws)
    if args.seed is not None:
        spec = replace(spec, dgp=spec.dgp.with_cell(seed=args.seed))
    return spec


def _cmd_experiment(args, force_methods=None) -> int:
    try:
        spec = _load_spec(args)
        if force_methods is not None:
            from dataclasses import replace
            spec = replace(spec, methods=force_methods)
        runner = run_level if args.mode == "level" else run_power
        results = runner(spec, threads=args.threads)
    except (OSError, json.JSONDecodeError, SpecError) as exc:
        print(f"error: invalid spec: {exc}", file=sys.stderr)
        return EXIT_BAD_SPEC
    out = args.out or f"{args.mode}_results.csv"
    write_results(results, out)
    print(f"{len(results)} cells written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="funcmax",
        description="Paired two-sample tests for many functional means "
        "with multiplier-bootstrap calibration.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="test two CSV panels")
    p_test.add_argument("x", help="CSV panel of the first group")
    p_test.add_argument("y", help="CSV panel of the second group")
    p_test.add_argument("--method", choices=("proposed", "max", "projection"),
                        default="proposed")
    p_test.add_argument("--projection-R", type=int, default=10)
    p_test.add_argument("--async", dest="use_async", action="store_true",
                        help="interpolated statistic for mismatched grids")
    _add_common(p_test)
    p_test.set_defaults(func=cmd_test)

    p_sim = sub.add_parser("simulate", help="write a synthetic paired panel")
    p_sim.add_argument("--config", default=None, help="DGP config JSON")
    p_sim.add_argument("--n", type=int, default=20)
    p_sim.add_argument("--K", type=int, default=5)
    p_sim.add_argument("--T", type=int, default=50)
    p_sim.add_argument("--rho", type=float, default=0.0)
    p_sim.add_argument("--s", type=float, default=0.0)
    p_sim.add_argument("--delta", type=float, default=0.0)
    p_sim.add_argument("--noise", choices=("gaussian", "chisq1"), default="gaussian")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--run-index", type=int, default=0)
    p_sim.add_argument("--out-x", default="x.csv")
    p_sim.add_argument("--out-y", default="y.csv")
    p_sim.set_defaults(func=cmd_simulate)

    for name, mode, forced in (
        ("level", "level", None),
        ("power", "power", None),
        ("compare", "power", ("proposed", "max", "projection")),
    ):
        p = sub.add_parser(name, help=f"Monte Carlo {name} experiment")
        p.add_argument("spec", help="experiment spec JSON")
        p.add_argument("--paper-scale", action="store_true",
                       help="runs=5000, N=500")
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--draws", type=int, default=None, metavar="N")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--out", default=None)
        p.set_defaults(func=lambda a, forced=forced: _cmd_experiment(a, forced),
                       mode=mode)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FuncmaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
