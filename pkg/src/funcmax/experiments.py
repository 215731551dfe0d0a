"""Monte Carlo harness for level, power, and family-wise error experiments.

Cells that differ only in signal size delta share their generated null data
and bootstrap draws within each run: the alternative is a deterministic mean
shift, the centered residuals (and hence the multiplier draws) do not depend
on delta, and common random numbers sharpen power-curve comparisons.  Run r
of a cell group is seeded from (experiment seed, cell hash, r), so adding
cells never perturbs existing cells' randomness.
"""

from __future__ import annotations

import csv
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .bootstrap import MultiplierPlan, run_bootstrap_multi
from .errors import IoError, SpecError
from .simulate import DgpConfig, generate_null, mean_shift
from .stats import StatisticKind, default_projection_basis, stats_from_mean

DESK_RUNS, DESK_DRAWS = 2000, 300
PAPER_RUNS, PAPER_DRAWS = 5000, 500

# the delta grid used for the power figures
DEFAULT_DELTA_GRID = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4)

RESULT_COLUMNS = (
    "method", "noise", "n", "K", "T", "rho", "s", "delta",
    "gamma", "runs", "N", "rate", "mc_stderr", "seed",
)


@dataclass(frozen=True)
class Cell:
    rho: float
    s: float
    delta: float
    n: int


@dataclass(frozen=True)
class ExperimentSpec:
    """One simulation experiment: a DGP, a grid of cells, and sizes."""

    dgp: DgpConfig
    grid: tuple[Cell, ...]
    gamma: float = 0.05
    runs: int = DESK_RUNS
    N: int = DESK_DRAWS
    methods: tuple[str, ...] = ("proposed",)
    projection_R: int = 10

    def __post_init__(self):
        if self.runs < 1 or self.N < 1:
            raise SpecError("runs and N must be >= 1")
        if not 0.0 < self.gamma < 1.0:
            raise SpecError("gamma must lie in (0, 1)")
        if not self.grid:
            raise SpecError("grid must contain at least one cell")
        for m in self.methods:
            if m not in ("proposed", "max", "projection"):
                raise SpecError(f"unknown method {m!r}")

    def at_paper_scale(self) -> "ExperimentSpec":
        from dataclasses import replace
        return replace(self, runs=PAPER_RUNS, N=PAPER_DRAWS)

    def kinds(self) -> list[StatisticKind]:
        out = []
        for m in self.methods:
            if m == "proposed":
                out.append(StatisticKind.proposed())
            elif m == "max":
                out.append(StatisticKind.maximum())
            else:
                out.append(
                    StatisticKind.projection(
                        default_projection_basis(self.dgp.T, self.projection_R)
                    )
                )
        return out

    def to_json_dict(self) -> dict:
        import json
        return {
            "dgp": json.loads(self.dgp.to_json()),
            "grid": [
                {"rho": c.rho, "s": c.s, "delta": c.delta, "n": c.n}
                for c in self.grid
            ],
            "gamma": self.gamma,
            "runs": self.runs,
            "N": self.N,
            "methods": list(self.methods),
            "projection_R": self.projection_R,
        }

    @classmethod
    def from_json_dict(cls, raw: dict) -> "ExperimentSpec":
        import json
        try:
            dgp = DgpConfig.from_json(json.dumps(raw["dgp"]))
            grid = tuple(
                Cell(rho=float(c["rho"]), s=float(c["s"]),
                     delta=float(c["delta"]), n=int(c["n"]))
                for c in raw["grid"]
            )
            return cls(
                dgp=dgp,
                grid=grid,
                gamma=float(raw.get("gamma", 0.05)),
                runs=int(raw.get("runs", DESK_RUNS)),
                N=int(raw.get("N", DESK_DRAWS)),
                methods=tuple(raw.get("methods", ["proposed"])),
                projection_R=int(raw.get("projection_R", 10)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"invalid experiment spec: {exc}") from exc


@dataclass(frozen=True)
class CellResult:
    """Empirical rejection rate for one (cell, method) pair."""

    method: str
    noise: str
    n: int
    K: int
    T: int
    rho: float
    s: float
    delta: float
    gamma: float
    runs: int
    N: int
    rejections: int
    seed: int

    @property
    def rate(self) -> float:
        return self.rejections / self.runs

    @property
    def mc_stderr(self) -> float:
        r = self.rate
        return float(np.sqrt(r * (1.0 - r) / self.runs))


def _cell_hash(dgp: DgpConfig, n: int, rho: float, s: float) -> int:
    # delta deliberately excluded: all signal sizes of one (n, rho, s) setting
    # share null data as common random numbers
    key = f"noise={dgp.noise},n={n},K={dgp.K},T={dgp.T},rho={rho!r},s={s!r}"
    return zlib.crc32(key.encode())


def default_threads() -> int:
    env = os.environ.get("FUNCMAX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def _run_grid(spec: ExperimentSpec, metric: str, threads: int | None):
    """Shared Monte Carlo driver.

    metric "global": count global rejections per (cell, method).
    metric "fwer": count runs with >= 1 rejection among the true-null
    channels (channels above floor(K*s)), proposed-style per-channel rule.
    """
    threads = default_threads() if threads is None else max(1, threads)
    kinds = spec.kinds()
    dgp = spec.dgp

    groups: dict[tuple, list[Cell]] = {}
    for cell in spec.grid:
        groups.setdefault((cell.n, cell.rho, cell.s), []).append(cell)

    results: list[CellResult] = []
    for (n, rho, s), cells in groups.items():
        deltas = [c.delta for c in cells]
        cell_seed = rng.derive_seed(dgp.seed, rng.TAG_CELL, _cell_hash(dgp, n, rho, s))
        cfg = dgp.with_cell(n=n, rho=rho, s=s, seed=cell_seed)
        null_idx = np.arange(int(np.floor(cfg.K * s)), cfg.K)

        rej = np.zeros((len(deltas), len(kinds), spec.runs), dtype=bool)

        def one_run(r, cfg=cfg, deltas=deltas, rej=rej, null_idx=null_idx,
                    n=n, s=s):
            z0 = generate_null(cfg, r)
            plan = MultiplierPlan(
                n=n, N=spec.N,
                seed=rng.derive_seed(cfg.seed, rng.TAG_MULTIPLIERS, r),
            )
            dists = run_bootstrap_multi(z0, kinds, plan)
            sorted_draws = {
                tag: np.sort(d.draws_global) for tag, d in dists.items()
            }
            for di, delta in enumerate(deltas):
                mu = mean_shift(cfg.with_cell(delta=delta))
                mean_d = z0.mean + mu[:, None]
                for mi, kind in enumerate(kinds):
                    stat = stats_from_mean(mean_d, n, kind)
                    draws = sorted_draws[kind.tag]
                    if metric == "global":
                        exceed = spec.N - np.searchsorted(
                            draws, stat.global_stat, side="right"
                        )
                        rej[di, mi, r] = exceed / spec.N < spec.gamma
                    else:
                        pc = (
                            spec.N
                            - np.searchsorted(
                                draws, stat.per_channel[null_idx], side="right"
                            )
                        ) / spec.N
                        rej[di, mi, r] = bool(np.any(pc < spec.gamma))

        if threads == 1:
            for r in range(spec.runs):
                one_run(r)
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(one_run, range(spec.runs)))

        for di, delta in enumerate(deltas):
            for mi, kind in enumerate(kinds):
                results.append(
                    CellResult(
                        method=kind.tag, noise=dgp.noise, n=n, K=dgp.K, T=dgp.T,
                        rho=rho, s=s, delta=delta, gamma=spec.gamma,
                        runs=spec.runs, N=spec.N,
                        rejections=int(rej[di, mi].sum()), seed=dgp.seed,
                    )
                )
    return results


def run_level(spec: ExperimentSpec, threads: int | None = None) -> list[CellResult]:
    """Empirical Type I error: every cell must have delta = 0."""
    for cell in spec.grid:
        if cell.delta != 0.0:
            raise SpecError(f"level experiment requires delta = 0, got {cell.delta}")
    return _run_grid(spec, "global", threads)


def run_power(spec: ExperimentSpec, threads: int | None = None) -> list[CellResult]:
    """Empirical rejection rate of the global test over the (s, delta) grid."""
    return _run_grid(spec, "global", threads)


def run_channelwise_fwer(spec: ExperimentSpec, threads: int | None = None) -> list[CellResult]:
    """Fraction of runs with at least one false per-channel rejection.

    Channels floor(K*s)+1..K carry no signal; a run counts when any of them
    is rejected by the per-channel rule calibrated on the global draws.
    """
    for cell in spec.grid:
        if cell.delta <= 0.0:
            raise SpecError("channelwise FWER experiment requires delta > 0")
        if int(np.floor(spec.dgp.K * cell.s)) >= spec.dgp.K:
            raise SpecError("s leaves no true-null channels")
    return _run_grid(spec, "fwer", threads)


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_results(results, path) -> None:
    """Write cell results as CSV, sorted lexicographically by the first
    eight columns, floats at 17 significant digits."""
    rows = []
    for res in results:
        rows.append(
            {
                "method": res.method, "noise": res.noise,
                "n": _fmt(res.n), "K": _fmt(res.K), "T": _fmt(res.T),
                "rho": _fmt(res.rho), "s": _fmt(res.s), "delta": _fmt(res.delta),
                "gamma": _fmt(res.gamma), "runs": _fmt(res.runs),
                "N": _fmt(res.N), "rate": _fmt(res.rate),
                "mc_stderr": _fmt(res.mc_stderr), "seed": _fmt(res.seed),
            }
        )
    rows.sort(key=lambda r: tuple(r[c] for c in RESULT_COLUMNS[:8]))
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=RESULT_COLUMNS)
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_power_long(results, path) -> None:
    """Plot-ready long format: delta, rate, method (one block per rho, s)."""
    rows = sorted(
        results, key=lambda r: (_fmt(r.rho), _fmt(r.s), _fmt(r.delta), r.method)
    )
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rho", "s", "delta", "rate", "method"])
            for r in rows:
                writer.writerow([_fmt(r.rho), _fmt(r.s), _fmt(r.delta),
                                 _fmt(r.rate), r.method])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def read_results(path) -> list[CellResult]:
    """Read back a results CSV written by write_results."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            runs = int(row["runs"])
            out.append(
                CellResult(
                    method=row["method"], noise=row["noise"],
                    n=int(row["n"]), K=int(row["K"]), T=int(row["T"]),
                    rho=float(row["rho"]), s=float(row["s"]),
                    delta=float(row["delta"]), gamma=float(row["gamma"]),
                    runs=runs, N=int(row["N"]),
                    rejections=round(float(row["rate"]) * runs),
                    seed=int(row["seed"]),
                )
            )
    return out
