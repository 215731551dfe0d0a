import numpy as np
import pytest

from funcmax import (
    Cell,
    CellResult,
    DgpConfig,
    ExperimentSpec,
    MultiplierPlan,
    SpecError,
    decide,
    generate_null,
    run_bootstrap,
    run_channelwise_fwer,
    run_level,
    run_power,
    read_results,
    write_power_long,
    write_results,
)
from funcmax import rng
from funcmax.experiments import DESK_DRAWS, DESK_RUNS, _cell_hash
from funcmax.simulate import apply_alternative
from funcmax.stats import StatisticKind, compute_stats


def tiny_spec(**over):
    base = dict(
        dgp=DgpConfig(n=8, K=3, T=10, seed=314),
        grid=(Cell(rho=0.0, s=0.0, delta=0.0, n=8),),
        gamma=0.1,
        runs=12,
        N=40,
    )
    base.update(over)
    return ExperimentSpec(**base)


class TestSpec:
    def test_json_round_trip(self):
        spec = tiny_spec(methods=("proposed", "max"), projection_R=4)
        back = ExperimentSpec.from_json_dict(spec.to_json_dict())
        assert back == spec

    def test_invalid_method(self):
        with pytest.raises(SpecError):
            tiny_spec(methods=("tukey",))

    def test_invalid_gamma(self):
        with pytest.raises(SpecError):
            tiny_spec(gamma=1.0)

    def test_empty_grid(self):
        with pytest.raises(SpecError):
            tiny_spec(grid=())

    def test_malformed_dict(self):
        with pytest.raises(SpecError):
            ExperimentSpec.from_json_dict({"grid": []})

    def test_paper_scale(self):
        spec = tiny_spec().at_paper_scale()
        assert (spec.runs, spec.N) == (5000, 500)

    def test_desk_defaults(self):
        spec = ExperimentSpec(dgp=DgpConfig(), grid=(Cell(0.0, 0.0, 0.0, 100),))
        assert (spec.runs, spec.N) == (DESK_RUNS, DESK_DRAWS)


class TestCellResult:
    def test_rate(self):
        res = CellResult(method="proposed", noise="gaussian", n=5, K=2, T=3,
                         rho=0.0, s=0.0, delta=0.0, gamma=0.05, runs=40, N=10,
                         rejections=6, seed=0)
        assert res.rate == pytest.approx(0.15)

    def test_mc_stderr_binomial(self):
        res = CellResult(method="proposed", noise="gaussian", n=5, K=2, T=3,
                         rho=0.0, s=0.0, delta=0.0, gamma=0.05, runs=400, N=10,
                         rejections=100, seed=0)
        # brute-force binomial standard error at p = 0.25
        assert res.mc_stderr == pytest.approx(np.sqrt(0.25 * 0.75 / 400), rel=1e-12)


class TestRunLevel:
    def test_rejects_nonzero_delta(self):
        with pytest.raises(SpecError):
            run_level(tiny_spec(grid=(Cell(0.0, 0.0, 0.2, 8),)))

    def test_bookkeeping_single_run(self):
        res = run_level(tiny_spec(runs=1))
        assert len(res) == 1
        assert res[0].runs == 1 and res[0].rejections in (0, 1)
        assert res[0].method == "proposed" and res[0].n == 8

    def test_determinism(self):
        a = run_level(tiny_spec())
        b = run_level(tiny_spec())
        assert a == b

    def test_thread_count_invariance(self):
        spec = tiny_spec(runs=16, methods=("proposed", "max"))
        assert run_power(spec, threads=1) == run_power(spec, threads=4)

    def test_matches_manual_composition(self):
        # reproduce one cell by hand from the documented seeding scheme
        spec = tiny_spec(runs=6)
        dgp = spec.dgp
        cell = spec.grid[0]
        cell_seed = rng.derive_seed(
            dgp.seed, rng.TAG_CELL, _cell_hash(dgp, cell.n, cell.rho, cell.s)
        )
        cfg = dgp.with_cell(n=cell.n, rho=cell.rho, s=cell.s, seed=cell_seed)
        hits = 0
        for r in range(spec.runs):
            z = generate_null(cfg, r)
            plan = MultiplierPlan(
                n=cfg.n, N=spec.N,
                seed=rng.derive_seed(cfg.seed, rng.TAG_MULTIPLIERS, r),
            )
            dist = run_bootstrap(z, StatisticKind.proposed(), plan)
            rep = decide(compute_stats(z, StatisticKind.proposed()), dist, spec.gamma)
            hits += int(rep.reject_global)
        assert run_level(spec)[0].rejections == hits


class TestRunPower:
    def test_zero_delta_equals_level(self):
        spec = tiny_spec()
        assert run_power(spec)[0].rejections == run_level(spec)[0].rejections

    def test_shared_nulls_across_delta(self):
        # cells differing only in delta give a monotone-by-construction pair
        # on the same null draws; a huge shift must reject in every run
        spec = tiny_spec(
            grid=(Cell(0.0, 1.0, 0.0, 8), Cell(0.0, 1.0, 50.0, 8)),
            runs=8,
        )
        res = {r.delta: r for r in run_power(spec)}
        assert res[50.0].rejections == spec.runs
        assert res[0.0].rejections <= res[50.0].rejections

    def test_alternative_matches_direct_statistics(self):
        # the mean-shift shortcut agrees with statistics of the shifted data
        cfg = DgpConfig(n=6, K=4, T=9, s=0.5, delta=0.3, seed=99)
        z0 = generate_null(cfg, 0)
        za = apply_alternative(z0, cfg)
        from funcmax.simulate import mean_shift
        from funcmax.stats import stats_from_mean

        direct = compute_stats(za, StatisticKind.proposed())
        shortcut = stats_from_mean(
            z0.mean + mean_shift(cfg)[:, None], cfg.n, StatisticKind.proposed()
        )
        assert np.allclose(direct.per_channel, shortcut.per_channel)

    def test_all_methods_present(self):
        spec = tiny_spec(methods=("proposed", "max", "projection"),
                         projection_R=3, runs=4)
        methods = sorted(r.method for r in run_power(spec))
        assert methods == ["max", "projection", "proposed"]


class TestRunFwer:
    def test_requires_positive_delta(self):
        with pytest.raises(SpecError):
            run_channelwise_fwer(tiny_spec())

    def test_requires_null_channels(self):
        spec = tiny_spec(grid=(Cell(0.0, 1.0, 0.5, 8),))
        with pytest.raises(SpecError):
            run_channelwise_fwer(spec)

    def test_runs_and_bounds(self):
        spec = tiny_spec(grid=(Cell(0.0, 1 / 3, 0.5, 8),), runs=10)
        res = run_channelwise_fwer(spec)
        assert len(res) == 1
        assert 0 <= res[0].rejections <= 10


class TestResultsIo:
    def _some_results(self):
        return run_power(
            tiny_spec(
                grid=(Cell(0.0, 0.0, 0.0, 8), Cell(0.0, 1.0, 0.2, 8)),
                methods=("proposed", "max"),
                runs=5,
            )
        )

    def test_empty_results_header_only(self, tmp_path):
        path = tmp_path / "out.csv"
        write_results([], path)
        assert path.read_text().strip() == (
            "method,noise,n,K,T,rho,s,delta,gamma,runs,N,rate,mc_stderr,seed"
        )

    def test_round_trip_bit_exact(self, tmp_path):
        res = self._some_results()
        path = tmp_path / "out.csv"
        write_results(res, path)
        back = read_results(path)
        assert sorted(back, key=repr) == sorted(res, key=repr)

    def test_byte_identical_rewrites(self, tmp_path):
        res = self._some_results()
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_results(res, a)
        write_results(list(reversed(res)), b)  # input order must not matter
        assert a.read_bytes() == b.read_bytes()

    def test_power_long_format(self, tmp_path):
        res = self._some_results()
        path = tmp_path / "long.csv"
        write_power_long(res, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "rho,s,delta,rate,method"
        assert len(lines) == 1 + len(res)
