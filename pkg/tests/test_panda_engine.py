import numpy as np
import pytest
from scipy.stats import norm, skew

from families import GaussianFamily, PoissonFamily
from models import CoefVector, Dataset, design_matrix, fit_mle, neg_log_likelihood
from schemes import Bridge, augment, get_scheme, sample_batch
from services import PandaConfig, check_convergence, moving_average, run_panda
from services.panda_engine import ThetaContext, c1_statistic, initial_estimate
from utils.errors import ConfigError, UnderAugmentationError

SMALL = dict(m=5, r=5, max_iter=40)


def test_moving_average_examples():
    history = [CoefVector.from_array([1.0, 0.0]), CoefVector.from_array([3.0, 2.0])]
    np.testing.assert_allclose(moving_average(history, 2).as_array(), [2.0, 1.0])
    np.testing.assert_allclose(moving_average(history, 1).as_array(), [3.0, 2.0])
    np.testing.assert_allclose(moving_average(history, 5).as_array(), [2.0, 1.0])
    with pytest.raises(ValueError):
        moving_average([], 3)


def test_c1_statistic_example():
    theta = CoefVector(0.0, np.array([1.0, 1.0]))
    n_e = 100
    c1 = c1_statistic(GaussianFamily(), Bridge(lam=1.0 / n_e, gamma=1.0), theta, n_e)
    assert c1 == pytest.approx(0.5 * np.sqrt(32.0), rel=1e-10)
    assert c1 == pytest.approx(2.8284, abs=1e-4)


def test_zero_loss_difference_converges_under_ztest():
    theta = CoefVector(0.0, np.array([1.0, 1.0]))
    context = ThetaContext(GaussianFamily(), Bridge(lam=0.01), 100, theta, theta)
    config = PandaConfig(convergence="ztest", m=1, max_iter=10)
    decision = check_convergence([5.0, 5.0], context, config)
    assert decision.z == 0.0
    assert decision.converged
    assert decision.mode_used == "ztest"


@pytest.mark.parametrize("dispersion, expected_z", [(1.0, 0.5), (2.0, 1.0)])
def test_gaussian_z_uses_residual_sum_of_squares_scale(dispersion, expected_z):
    # C1 = (1/2) sqrt(32) at both iterates, so n_e^-1 (C1^2 + C1^2) = 0.16;
    # the loss step 0.1 becomes d = 2 sigma^2 * 0.1 on the squared-residual scale
    theta = CoefVector(0.0, np.array([1.0, 1.0]))
    context = ThetaContext(GaussianFamily(dispersion), Bridge(lam=0.01, gamma=1.0), 100, theta, theta)
    config = PandaConfig(convergence="ztest", ztest_regime="large_ne", m=1, max_iter=10)
    decision = check_convergence([10.0, 10.1], context, config)
    assert decision.c1_prev == pytest.approx(0.5 * np.sqrt(32.0))
    assert decision.c1_curr == pytest.approx(0.5 * np.sqrt(32.0))
    assert decision.z == pytest.approx(expected_z, rel=1e-9)
    assert decision.converged


def test_large_gaussian_loss_step_is_rejected():
    theta = CoefVector(0.0, np.array([1.0, 1.0]))
    context = ThetaContext(GaussianFamily(), Bridge(lam=0.01, gamma=1.0), 100, theta, theta)
    config = PandaConfig(convergence="ztest", m=1, max_iter=10)
    decision = check_convergence([10.0, 9.5], context, config)
    assert decision.z == pytest.approx(-2.5, rel=1e-9)
    assert not decision.converged


def test_relative_change_rule():
    config = PandaConfig(m=3, tau=1e-4)
    trace = [10.0, 10.0, 10.0, 10.0 * (1 + 1e-6)]
    decision = check_convergence(trace, None, config)
    assert decision.converged
    assert decision.rel_change == pytest.approx(1e-6)
    assert not check_convergence(trace[:3], None, config).converged
    assert not check_convergence([10.0, 10.0, 10.0, 11.0], None, config).converged


def test_both_requires_both_rules():
    theta = CoefVector(0.0, np.array([1.0]))
    context = ThetaContext(GaussianFamily(), Bridge(lam=0.01), 10, theta, theta)
    config = PandaConfig(convergence="both", m=3, tau=1e-4)
    assert not check_convergence([5.0, 5.0], context, config).converged
    assert check_convergence([5.0, 5.0, 5.0, 5.0], context, config).converged


@pytest.mark.parametrize("seed", range(50))
def test_augmented_ols_is_weighted_ridge(seed):
    rng = np.random.default_rng(seed)
    p = int(rng.integers(1, 9))
    n = int(rng.integers(p + 2, 41))
    X = rng.standard_normal((n, p))
    y = X @ rng.normal(0.0, 2.0, p) + rng.standard_normal(n)
    data = Dataset(X=X, y=y)
    theta = CoefVector(0.0, rng.normal(0.0, 1.5, p))
    scheme = get_scheme(str(rng.choice(["lasso", "ridge", "l0"])), lam=float(rng.uniform(0.01, 0.5)))
    batch = sample_batch(scheme, theta, int(rng.integers(1, 31)), GaussianFamily(), data.y, rng)
    fitted = fit_mle(GaussianFamily(), augment(data, batch), fit_intercept=False)
    E = batch.e_x
    closed_form = np.linalg.solve(X.T @ X + E.T @ E, X.T @ y + E.T @ batch.e_y)
    np.testing.assert_allclose(fitted.slopes, closed_form, rtol=1e-8, atol=1e-8)


def test_mean_of_fits_matches_fit_of_mean_loss(rng):
    n, p = 30, 4
    X = rng.standard_normal((n, p))
    y = X @ np.array([1.5, 0.0, -1.0, 0.5]) + rng.standard_normal(n)
    fit = run_panda(GaussianFamily(), Dataset(X=X, y=y), get_scheme("lasso", lam=0.005),
                    PandaConfig(n_e=200, m=30, r=30, max_iter=100, seed=9))
    gram, rhs = np.zeros((p + 1, p + 1)), np.zeros(p + 1)
    for batch in fit.batches:
        augmented = augment(fit.data, batch)
        Z = design_matrix(augmented.X)
        gram += Z.T @ Z
        rhs += Z.T @ augmented.y
    pooled = np.linalg.solve(gram, rhs)
    averaged = np.mean([c.as_array() for c in fit.theta_bank_raw], axis=0)
    assert np.max(np.abs(averaged - pooled)) <= 0.05


def test_augmented_loss_is_nearly_symmetric_for_large_n_e(gaussian_data, rng):
    theta = CoefVector(0.2, np.array([1.0, -0.5, 0.0, 0.3]))
    scheme = get_scheme("lasso", lam=1e-3)
    losses = np.array([
        neg_log_likelihood(GaussianFamily(), augment(gaussian_data, sample_batch(
            scheme, theta, 2000, GaussianFamily(), gaussian_data.y, rng)), theta)
        for _ in range(500)
    ])
    standardized = (losses - losses.mean()) / losses.std(ddof=1)
    assert abs(skew(standardized)) < 0.3


def test_ridge_noise_matches_ridge_estimator(rng):
    n, p, n_e, c = 50, 5, 5000, 5.0
    X = rng.standard_normal((n, p))
    y = X @ np.array([1.0, -0.5, 0.0, 2.0, 0.3]) + rng.standard_normal(n)
    fit = run_panda(GaussianFamily(), Dataset(X=X, y=y), get_scheme("ridge", lam=c / n_e),
                    PandaConfig(n_e=n_e, m=20, r=20, max_iter=100, seed=3))
    Xc, yc = X - X.mean(axis=0), y - y.mean()
    oracle = np.linalg.solve(Xc.T @ Xc + c * np.eye(p), Xc.T @ yc)
    assert np.max(np.abs(fit.raw_mean.slopes - oracle)) <= 0.02


def test_vanishing_noise_gives_the_mle(gaussian_data):
    fit = run_panda(GaussianFamily(), gaussian_data, get_scheme("lasso", lam=1e-12),
                    PandaConfig(n_e=10, seed=1, **SMALL))
    mle = fit_mle(GaussianFamily(), gaussian_data.center())
    np.testing.assert_allclose(fit.raw_mean.as_array(), mle.as_array(), atol=1e-3)


def test_same_seed_same_fit(poisson_data):
    scheme = get_scheme("lasso", lam=0.05)
    config = PandaConfig(n_e=30, seed=11, **SMALL)
    a = run_panda(PoissonFamily(), poisson_data, scheme, config)
    b = run_panda(PoissonFamily(), poisson_data, scheme, config)
    np.testing.assert_array_equal(a.theta_hat.as_array(), b.theta_hat.as_array())
    np.testing.assert_array_equal(a.loss_trace, b.loss_trace)
    c = run_panda(PoissonFamily(), poisson_data, scheme, config.replace(seed=12))
    assert not np.array_equal(a.raw_mean.as_array(), c.raw_mean.as_array())


def test_iteration_cap_still_banks(gaussian_data):
    config = PandaConfig(n_e=20, m=2, r=3, max_iter=5, tau=0.0, seed=2)
    fit = run_panda(GaussianFamily(), gaussian_data, get_scheme("lasso", lam=0.01), config)
    assert fit.converged_at is None
    assert fit.n_iterations == 5 + 2 + 3
    assert len(fit.banked) == len(fit.theta_bank_raw) == len(fit.batches) == 3
    assert any("no convergence" in w for w in fit.warnings)
    assert any("MAX ITERATIONS REACHED" in line for line in fit.logs)


def test_strong_l0_noise_zeros_null_slopes(rng):
    n = 100
    X = rng.standard_normal((n, 4))
    y = X @ np.array([2.0, 0.0, -1.5, 0.0]) + 0.5 * rng.standard_normal(n)
    fit = run_panda(GaussianFamily(), Dataset(X=X, y=y), get_scheme("l0", lam=10.0),
                    PandaConfig(n_e=2, m=30, r=30, max_iter=200, seed=5))
    np.testing.assert_array_equal(fit.zero_mask, [False, True, False, True])
    assert np.all(fit.theta_hat.slopes[fit.zero_mask] == 0.0)


def test_fit_outputs(gaussian_data):
    fit = run_panda(GaussianFamily(), gaussian_data, get_scheme("lasso", lam=0.01), PandaConfig(n_e=20, seed=4, **SMALL))
    coefs = fit.coefficient_frame()
    assert list(coefs["name"]) == ["(Intercept)", "x1", "x2", "x3", "x4"]
    assert list(coefs.columns) == ["name", "raw_estimate", "estimate", "is_zero"]
    trace = fit.trace_frame()
    assert len(trace) == fit.n_iterations
    assert {"t", "loss", "loss_bar", "z", "rel_change", "theta_bar[x1]"} <= set(trace.columns)
    X_new = gaussian_data.X[:3]
    np.testing.assert_allclose(fit.predict(X_new), fit.theta_hat.intercept + fit.data.apply_centering(X_new) @ fit.theta_hat.slopes)
    assert fit.summary()["iterations"] == fit.n_iterations


def test_no_intercept(gaussian_data):
    config = PandaConfig(n_e=20, seed=4, fit_intercept=False, **SMALL)
    fit = run_panda(GaussianFamily(), gaussian_data, get_scheme("ridge", lam=0.01), config)
    assert fit.theta_hat.intercept == 0.0


def test_initial_estimate_falls_back_to_ridge(rng):
    data = Dataset(X=rng.standard_normal((4, 6)), y=rng.standard_normal(4))
    coef = initial_estimate(GaussianFamily(), data.center(), PandaConfig())
    assert coef.p == 6 and np.all(np.isfinite(coef.slopes))


def test_config_and_input_errors(rng):
    with pytest.raises(ConfigError, match="r must be a positive integer"):
        PandaConfig(r=0)
    with pytest.raises(ConfigError, match="Unknown convergence mode"):
        PandaConfig(convergence="eventually")
    with pytest.raises(ConfigError, match="at least m"):
        PandaConfig(m=50, max_iter=10)
    with pytest.raises(ConfigError, match="Unknown PANDA settings"):
        PandaConfig.from_mapping({"n_e": 5, "lambda": 1.0})

    data = Dataset(X=rng.standard_normal((5, 8)), y=rng.standard_normal(5))
    with pytest.raises(UnderAugmentationError):
        run_panda(GaussianFamily(), data, get_scheme("lasso"), PandaConfig(n_e=1, seed=0, **SMALL))
    with pytest.raises(ConfigError, match="tau0"):
        run_panda(GaussianFamily(), data, get_scheme("lasso", eps_theta=0.1), PandaConfig(n_e=10, seed=0, **SMALL))


def test_z_rarely_rejects_after_convergence(gaussian_data):
    config = PandaConfig(n_e=20, m=100, r=100, max_iter=300, convergence="ztest", seed=13)
    fit = run_panda(GaussianFamily(), gaussian_data, get_scheme("lasso", lam=0.01), config)
    assert fit.converged_at is not None
    after = fit.z_trace[fit.converged_at:]
    after = after[np.isfinite(after)]
    assert after.size >= 190
    assert np.mean(np.abs(after) > norm.ppf(0.975)) <= 0.15
