"""
Tests for run configuration loading and the (L, z0) sweep runner.
"""

import math
import threading

import pytest

from src.config import GOLDEN_THETA, RunConfig, load_run_config
from src.errors import ConfigError
from src.sweep_runner import SweepRunner, grid_pairs


class TestRunConfig:

    def test_defaults(self):
        config = load_run_config()
        assert config.theta == GOLDEN_THETA
        assert config.sigma == math.e
        assert config.Ls == [16, 32, 64]
        assert config.output_dir == "results"

    def test_file_values(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text(
            "# witness run\nsigma=3\nLs=8,16\nz0s=0,0.25\nlambda=1.5+0.5j\nconvergents=1/2, 2/3\nout=reports\n",
            encoding="utf-8",
        )
        config = load_run_config(str(path))
        assert config.sigma == 3.0
        assert config.Ls == [8, 16]
        assert config.z0s == [0.0, 0.25]
        assert config.lam == 1.5 + 0.5j
        assert config.convergents == ["1/2", "2/3"]
        assert config.output_dir == "reports"

    def test_overrides_win(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("N=40\nseed=9\n", encoding="utf-8")
        config = load_run_config(str(path), {"N": 12, "seed": None})
        assert config.N == 12
        assert config.seed == 9

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_run_config(str(tmp_path / "absent.env"))

    def test_bad_value(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("grid=many\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(str(path))

    @pytest.mark.parametrize("changes", [
        {"theta": 1.0},
        {"sigma": 0.9},
        {"grid": 4},
        {"tol": 0.0},
        {"epsilon": -1e-3},
        {"Ls": [32, 16]},
        {"Ls": []},
        {"z0s": []},
        {"workers": 0},
    ])
    def test_validation(self, changes):
        with pytest.raises(ConfigError):
            RunConfig(**changes).validate()

    def test_empty_list_in_file(self, tmp_path):
        path = tmp_path / "run.env"
        path.write_text("Ls=\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_run_config(str(path))

    def test_zero_epsilon_is_accepted(self):
        assert RunConfig(epsilon=0.0).validate().epsilon == 0.0


class TestSweepRunner:

    def test_sorted_and_deduplicated(self):
        pairs = [(32, 0.5), (16, 0.0), (32, 0.5), (16, 0.25)]
        results = SweepRunner(workers=3).run(lambda L, z0: L + z0, pairs)
        assert [pair for pair, _ in results] == [(16, 0.0), (16, 0.25), (32, 0.5)]
        assert [value for _, value in results] == [16.0, 16.25, 32.5]

    def test_serial_matches_parallel(self):
        pairs = grid_pairs([4, 8, 2], [0.3, 0.0])
        work = lambda L, z0: (L * 10 + z0) ** 2
        assert SweepRunner(workers=1).run(work, pairs) == SweepRunner(workers=4).run(work, pairs)

    def test_progress_callback(self):
        seen = []
        lock = threading.Lock()

        def progress(done, total, pair, seconds):
            with lock:
                seen.append((done, total, pair))

        SweepRunner(workers=2, progress=progress).run(lambda L, z0: None, grid_pairs([1, 2], [0.0]))
        assert sorted(d for d, _, _ in seen) == [1, 2]
        assert all(total == 2 for _, total, _ in seen)

    def test_errors_propagate(self):
        def fail(L, z0):
            if L == 8:
                raise ValueError("boom")
            return L

        with pytest.raises(ValueError):
            SweepRunner(workers=2).run(fail, grid_pairs([4, 8], [0.0]))
