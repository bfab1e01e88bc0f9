import dataclasses

import numpy as np
import pandas as pd
import pytest

from families import BernoulliFamily, GaussianFamily
from schemes import get_scheme
from services import PandaConfig
from simulation import (
    AR1Normal,
    BernoulliHalfMixed,
    SimDesign,
    StdNormal,
    Uniform,
    classification_rates,
    generate,
    get_preset,
    model_error,
    run_benchmark,
    table3,
    table4,
    table5,
    zero_counts,
)
from simulation.bench import _run_replicate
from utils.errors import ConfigError, DimensionError

FAST = PandaConfig(n_e=5, m=5, r=5, max_iter=30)


def test_ar1_correlation(rng):
    X = AR1Normal(0.5).sample(10000, 4, rng)
    corr = np.corrcoef(X, rowvar=False)
    assert corr[0, 1] == pytest.approx(0.5, abs=0.03)
    assert corr[0, 2] == pytest.approx(0.25, abs=0.03)
    assert X.std(axis=0) == pytest.approx(np.ones(4), abs=0.03)


def test_uniform_and_mixed_laws(rng):
    X = Uniform(-0.3, 0.5).sample(2000, 3, rng)
    assert X.min() >= -0.3 and X.max() <= 0.5

    law = BernoulliHalfMixed(0.5, 2)
    X = law.sample(4000, 5, rng)
    assert set(np.unique(X[:, 3:])) == {0.0, 1.0}
    assert X[:, 3:].mean(axis=0) == pytest.approx([0.5, 0.5], abs=0.04)
    np.testing.assert_allclose(law.second_moment(5)[3:, 3:], [[0.5, 0.25], [0.25, 0.5]])
    with pytest.raises(DimensionError):
        law.sample(10, 2, rng)
    with pytest.raises(ConfigError):
        AR1Normal(1.0)
    with pytest.raises(ConfigError):
        Uniform(1.0, 1.0)


def test_gaussian_replicates_have_requested_noise():
    design = SimDesign(GaussianFamily(), n=5000, p=3, beta_true=[1.0, 0.0, -2.0], predictor_law=StdNormal(),
                       sigma=2.0, intercept=0.5, replicates=2, seed=9)
    data, beta = generate(design, 0)
    resid = data.y - (0.5 + data.X @ beta)
    assert resid.std() == pytest.approx(2.0, rel=0.03)


def test_generate_is_a_function_of_seed_and_index():
    design = SimDesign(BernoulliFamily(), n=50, p=2, beta_true=[1.0, -1.0], predictor_law=StdNormal(),
                       replicates=3, seed=4)
    a, _ = generate(design, 1)
    b, _ = generate(design, 1)
    c, _ = generate(design, 2)
    test, _ = generate(design, 1, test=True)
    np.testing.assert_array_equal(a.X, b.X)
    np.testing.assert_array_equal(a.y, b.y)
    assert not np.array_equal(a.X, c.X)
    assert not np.array_equal(a.X, test.X)
    assert set(np.unique(a.y)) <= {0.0, 1.0}


def test_design_validation():
    with pytest.raises(DimensionError):
        SimDesign(GaussianFamily(), n=10, p=3, beta_true=[1.0, 2.0], predictor_law=StdNormal())
    with pytest.raises(ConfigError):
        SimDesign(GaussianFamily(), n=10, p=1, beta_true=[1.0], predictor_law=StdNormal(), sigma=0.0)


def test_model_error_examples():
    beta = np.array([1.0, 2.0])
    assert model_error(beta, beta, StdNormal()) == 0.0
    assert model_error([2.0, 2.0], beta, StdNormal()) == pytest.approx(1.0)
    assert model_error([1.0, 1.0], [0.0, 0.0], AR1Normal(0.5)) == pytest.approx(3.0)
    # second moment includes the mean
    assert model_error([1.0], [0.0], Uniform(0.0, 2.0)) == pytest.approx(1.0 / 3.0 + 1.0)
    with pytest.raises(DimensionError):
        model_error([1.0, 1.0], [0.0, 0.0], np.eye(3))


def test_zero_counts_and_classification():
    assert zero_counts([True, True, False, True], [True, False, False, True]) == (2, 1)
    rates = classification_rates(np.array([1.0, 1.0, 0.0, 0.0]), np.array([0.9, 0.2, 0.4, 0.7]))
    assert rates == pytest.approx({"accuracy": 0.5, "sensitivity": 0.5, "specificity": 0.5})
    assert np.isnan(classification_rates(np.ones(3), np.full(3, 0.8))["specificity"])


def test_coverage_preset_layout():
    preset = table3("gaussian", n=100, replicates=3)
    beta = preset.design.beta_true
    assert preset.design.p == 30
    assert np.flatnonzero(beta == 0).tolist() == list(range(2, 27, 3))
    assert beta[beta != 0].min() == 0.5 and beta.max() == 1.0
    assert preset.scheme.is_l0 and preset.scheme.lam == pytest.approx(10.0)
    assert preset.config.n_e == 9

    logistic = table3("logistic", n=200)
    assert logistic.scheme.gamma == 1.0 and logistic.scheme.lam == pytest.approx(3.0 / 200)
    assert logistic.config.n_e == 200
    assert isinstance(logistic.design.predictor_law, Uniform)


def test_comparison_presets():
    l0 = table4("l0", n=60)
    assert l0.tune_grid.l0_mode
    assert list(l0.tune_grid.n_e_values) == list(range(1, 9))

    scad = table5("scad")
    assert scad.design.n == 200 and isinstance(scad.design.family, BernoulliFamily)
    assert scad.config.n_e == 200 and len(scad.tune_grid.lambda_ne_values) == 10

    en = get_preset("table4", scheme="elastic_net", sigma=3.0, n=None)
    assert en.design.n == 60 and en.design.sigma == 3.0
    assert en.tune_grid.sigma2_ratio == pytest.approx(5.0 / 190.0)

    with pytest.raises(ConfigError, match="Unknown preset"):
        get_preset("table9")
    with pytest.raises(ConfigError, match="Unknown comparison scheme"):
        table4("bridge")


@pytest.fixture
def small_design():
    return SimDesign(GaussianFamily(), n=100, p=3, beta_true=[1.0, -1.0, 0.5], predictor_law=StdNormal(),
                     replicates=3, seed=21)


def test_vanishing_noise_matches_comparator(small_design):
    report = run_benchmark(small_design, get_scheme("ridge", lam=1e-12), FAST, with_inference=False, n_jobs=1)
    assert report.n_ok == 3 and report.n_failed == 0
    assert report.mrme == pytest.approx(100.0, rel=1e-3)
    assert report.correct_zeros == 0.0 and report.incorrect_zeros == 0.0


def test_benchmark_records_coverage(small_design):
    report = run_benchmark(small_design, get_scheme("lasso", lam=0.01), FAST, n_jobs=1)
    records = report.records
    assert {"me_panda", "me_comparator", "rme", "dev_ratio", "covered_1", "width_3"} <= set(records.columns)
    assert records["width_1"].gt(0).all()
    assert 0.0 <= report.coverage_nonzero <= 100.0
    assert np.isnan(report.coverage_zero)
    summary = report.summary()
    assert summary["coverage_zero"] is None and summary["n_ok"] == 3


def test_bernoulli_benchmark_reports_classification():
    design = SimDesign(BernoulliFamily(), n=150, p=3, beta_true=[1.0, -1.0, 0.0], predictor_law=Uniform(-2.0, 2.0),
                       replicates=2, seed=3)
    report = run_benchmark(design, get_scheme("lasso", lam=0.01), FAST, with_inference=False, n_jobs=1)
    assert set(report.classification) == {"accuracy", "sensitivity", "specificity"}
    assert 0.5 < report.classification["accuracy"] <= 1.0


def test_unknown_comparator(small_design):
    with pytest.raises(ConfigError, match="Unknown comparator"):
        run_benchmark(small_design, get_scheme("lasso"), FAST, comparator="glmnet")


@pytest.mark.slow
def test_parallel_matches_serial(small_design):
    scheme = get_scheme("lasso", lam=0.01)
    serial = run_benchmark(small_design, scheme, FAST, with_inference=False, n_jobs=1)
    parallel = run_benchmark(small_design, scheme, FAST, with_inference=False, n_jobs=2)
    pd.testing.assert_frame_equal(serial.records, parallel.records)


def test_replicates_do_not_depend_on_order_or_count(small_design):
    scheme = get_scheme("lasso", lam=0.01)
    report = run_benchmark(small_design, scheme, FAST, with_inference=False, n_jobs=1)
    fixed = (small_design, scheme, FAST, "mle", None, False, FAST.alpha)
    backwards = [_run_replicate(i, *fixed) for i in reversed(range(small_design.replicates))]
    pd.testing.assert_frame_equal(pd.DataFrame(sorted(backwards, key=lambda r: r["replicate"])), report.records)

    fewer = run_benchmark(dataclasses.replace(small_design, replicates=2), scheme, FAST, with_inference=False, n_jobs=1)
    pd.testing.assert_frame_equal(fewer.records, report.records.iloc[:2])
