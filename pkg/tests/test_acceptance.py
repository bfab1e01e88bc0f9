"""Full-size benchmark runs checked against reference result bands.

Every test here runs hundreds of replicates; select them with ``pytest -m slow``
and set PANDA_N_JOBS to spread replicates over worker processes.
"""
import pytest

from config import N_JOBS
from simulation import run_benchmark, table3, table4, table5

pytestmark = pytest.mark.slow


def _run(preset, with_inference=None):
    return run_benchmark(
        preset.design,
        preset.scheme,
        preset.config,
        comparator=preset.comparator,
        tune_grid=preset.tune_grid,
        with_inference=preset.with_inference if with_inference is None else with_inference,
        n_jobs=N_JOBS,
    )


def test_l0_noise_selects_the_true_zeros():
    report = _run(table3("gaussian", n=100, replicates=50), with_inference=False)
    ok = report.records[report.records["status"] == "ok"]
    assert len(ok) == 50
    n_zeros = ok["correct_zeros"] + ok["incorrect_zeros"]
    assert (n_zeros == 9).mean() >= 0.9
    assert ((ok["correct_zeros"] == 9) & (ok["incorrect_zeros"] == 0)).mean() >= 0.8


def test_gaussian_coverage_band():
    report = _run(table3("gaussian", n=100, replicates=200))
    assert report.n_failed == 0
    assert 96.0 <= report.coverage_zero <= 100.0
    assert 93.0 <= report.coverage_nonzero <= 100.0
    assert 0.05 <= report.width_zero <= 0.12


def test_poisson_coverage_band():
    report = _run(table3("poisson", n=100, replicates=200))
    assert 89.0 <= report.coverage_nonzero <= 98.0


def test_linear_scad_band():
    report = _run(table4("scad", n=60, sigma=1.0, replicates=100))
    assert 40.0 <= report.mrme <= 50.0
    assert report.correct_zeros >= 4.8


def test_linear_lasso_band():
    report = _run(table4("lasso", n=60, sigma=1.0, replicates=100))
    assert 60.0 <= report.mrme <= 74.0


def test_logistic_scad_band():
    report = _run(table5("scad", n=200, replicates=100))
    assert 28.0 <= report.mrme <= 42.0
    assert report.correct_zeros >= 4.7
