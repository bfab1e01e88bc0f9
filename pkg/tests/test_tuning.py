import numpy as np
import pandas as pd
import pytest

from families import GaussianFamily
from models import Dataset
from schemes import get_scheme
from services import PandaConfig, TuneGrid, cv_folds, tune
from services.tuning import information_criterion
from utils.errors import ConfigError, TuningError

FAST = PandaConfig(n_e=10, m=5, r=5, max_iter=40, seed=11)


def test_cv_folds_partition_and_determinism():
    folds = cv_folds(3, 23, 5)
    assert len(folds) == 5
    np.testing.assert_array_equal(np.sort(np.concatenate(folds)), np.arange(23))
    assert {len(f) for f in folds} <= {4, 5}
    for a, b in zip(folds, cv_folds(3, 23, 5)):
        np.testing.assert_array_equal(a, b)
    assert any(not np.array_equal(a, b) for a, b in zip(folds, cv_folds(4, 23, 5)))


@pytest.mark.parametrize("K, n", [(1, 10), (11, 10)])
def test_cv_folds_rejects_bad_k(K, n):
    with pytest.raises(ConfigError, match="2 <= K <= n"):
        cv_folds(0, n, K)


def test_information_criteria():
    assert information_criterion("aic", 10.0, 3, 100) == pytest.approx(26.0)
    assert information_criterion("bic", 10.0, 3, 100) == pytest.approx(20.0 + 3 * np.log(100))
    with pytest.raises(ConfigError):
        information_criterion("gcv", 10.0, 3, 100)


def test_grid_validation():
    lasso = get_scheme("lasso", lam=0.1)
    with pytest.raises(ConfigError, match="Unknown criterion"):
        TuneGrid(lasso, lambda_ne_values=(1.0,), criterion="loo")
    with pytest.raises(ConfigError, match="must not be empty"):
        TuneGrid(lasso)
    with pytest.raises(ConfigError, match="positive"):
        TuneGrid(lasso, lambda_ne_values=(1.0, -2.0))
    with pytest.raises(ConfigError, match="folds >= 2"):
        TuneGrid(lasso, lambda_ne_values=(1.0,), folds=1)
    with pytest.raises(ConfigError, match="has no 'a'"):
        TuneGrid(lasso, lambda_ne_values=(1.0,), a_values=(3.7,))
    with pytest.raises(ConfigError, match="n_e"):
        TuneGrid(get_scheme("l0", lam=5.0), lambda_ne_values=(1.0,))


def test_candidates_split_lambda_over_n_e():
    grid = TuneGrid(get_scheme("lasso", lam=0.1), lambda_ne_values=(1.0, 10.0), n_e_values=(5, 20))
    cands = grid.candidates(default_n_e=100)
    assert [(c.lambda_ne, c.n_e) for c in cands] == [(1.0, 5), (1.0, 20), (10.0, 5), (10.0, 20)]
    assert [c.scheme.lam for c in cands] == pytest.approx([0.2, 0.05, 2.0, 0.5])
    assert [c.index for c in cands] == [0, 1, 2, 3]

    single = TuneGrid(get_scheme("lasso"), lambda_ne_values=(4.0,)).candidates(default_n_e=8)
    assert single[0].n_e == 8 and single[0].scheme.lam == pytest.approx(0.5)


def test_l0_candidates_hold_lambda_fixed():
    grid = TuneGrid(get_scheme("l0", lam=20.0), n_e_values=range(1, 5))
    assert grid.l0_mode
    cands = grid.candidates(default_n_e=100)
    assert [c.n_e for c in cands] == [1, 2, 3, 4]
    assert all(c.scheme.lam == 20.0 for c in cands)
    assert [c.lambda_ne for c in cands] == [20.0, 40.0, 60.0, 80.0]


def test_elastic_net_ratio_and_extra_dimensions():
    grid = TuneGrid(get_scheme("elastic_net", lam=1.0, sigma2=1.0), lambda_ne_values=(19.0,),
                    n_e_values=(190,), sigma2_ratio=5.0 / 190.0)
    (cand,) = grid.candidates(default_n_e=1)
    assert cand.scheme.sigma2 == pytest.approx(5.0 / 190.0 * 0.1)

    grid = TuneGrid(get_scheme("scad", lam=1.0), lambda_ne_values=(1.0, 2.0), a_values=(3.0, 3.7))
    cands = grid.candidates(default_n_e=10)
    assert len(cands) == 4
    assert [c.scheme.a for c in cands] == [3.0, 3.7, 3.0, 3.7]
    with pytest.raises(ConfigError, match="not both"):
        TuneGrid(get_scheme("elastic_net"), lambda_ne_values=(1.0,), sigma2_values=(1.0,), sigma2_ratio=0.1)


def test_single_candidate_is_selected(gaussian_data):
    grid = TuneGrid(get_scheme("lasso"), lambda_ne_values=(0.5,), criterion="cv", folds=3)
    result = tune(GaussianFamily(), gaussian_data, grid, FAST)
    assert result.best_index == 0
    assert result.best_scheme.lam == pytest.approx(0.05)
    assert result.refit is not None and result.refit.config.n_e == 10
    assert len(result.scores) == 1 and result.scores.loc[0, "error"] == ""


def test_cv_prefers_weak_noise_on_strong_signal(gaussian_data):
    grid = TuneGrid(get_scheme("lasso"), lambda_ne_values=(0.01, 1e4), criterion="cv", folds=3)
    result = tune(GaussianFamily(), gaussian_data, grid, FAST, refit=False)
    assert result.refit is None
    assert result.scores.loc[0, "score"] < result.scores.loc[1, "score"]
    assert result.best_index == 0


def test_aic_scores_and_zero_counts(gaussian_data):
    grid = TuneGrid(get_scheme("lasso"), lambda_ne_values=(0.1, 10.0), criterion="aic")
    result = tune(GaussianFamily(), gaussian_data, grid, FAST)
    assert result.scores["score"].notna().all()
    assert set(result.scores["n_zero"]) <= set(range(5))
    best = result.scores.loc[result.best_index, "score"]
    assert best == result.scores["score"].min()
    assert result.to_dict()["best_scheme"]["scheme"] == "bridge"


def test_all_candidates_failing_raises(rng):
    tiny = Dataset(X=rng.standard_normal((5, 8)), y=rng.standard_normal(5))
    grid = TuneGrid(get_scheme("lasso"), lambda_ne_values=(0.1, 1.0), criterion="aic")
    with pytest.raises(TuningError, match="all 2") as info:
        tune(GaussianFamily(), tiny, grid, FAST.replace(n_e=1))
    scores = info.value.scores
    assert isinstance(scores, pd.DataFrame)
    assert scores["error"].str.startswith("UnderAugmentationError").all()


@pytest.mark.slow
def test_parallel_matches_serial(gaussian_data):
    grid = TuneGrid(get_scheme("ridge"), lambda_ne_values=(0.1, 1.0, 10.0), criterion="bic")
    serial = tune(GaussianFamily(), gaussian_data, grid, FAST, n_jobs=1, refit=False)
    parallel = tune(GaussianFamily(), gaussian_data, grid, FAST, n_jobs=2, refit=False)
    pd.testing.assert_frame_equal(serial.scores, parallel.scores)
    assert serial.best_index == parallel.best_index
