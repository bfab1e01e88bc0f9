"""Negative log-likelihood and maximum-likelihood fitting by IRLS."""
import logging

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from config import IRLS_MAX_ITER, IRLS_MAX_HALVINGS, IRLS_TOL
from families import GaussianFamily, GlmFamily
from models.data import CoefVector, Dataset
from utils.errors import DimensionError, DomainError, FitError, SingularDesignError

logger = logging.getLogger(__name__)


def design_matrix(X: np.ndarray, fit_intercept: bool = True) -> np.ndarray:
    """Prepend a column of ones when an intercept is fitted."""
    X = np.asarray(X, dtype=float)
    if not fit_intercept:
        return X
    return np.column_stack((np.ones(X.shape[0]), X))


def _check_weights(weights: np.ndarray | None, n: int) -> np.ndarray:
    if weights is None:
        return np.ones(n)
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (n,):
        raise DimensionError(f"weights must have length {n}, got shape {weights.shape}")
    if np.any(weights < 0) or not np.all(np.isfinite(weights)):
        raise DomainError("weights must be finite and non-negative")
    return weights


def neg_log_likelihood(
    family: GlmFamily,
    data: Dataset,
    coef: CoefVector,
    weights: np.ndarray | None = None,
) -> float:
    """Return -sum_i [h(y_i) + eta_i y_i - B(eta_i)] with eta_i = theta0 + x_i theta.

    Base-measure constants are included, so for the Gaussian family with unit
    dispersion the value is 0.5 * SSE + 0.5 * n * log(2 pi).
    """
    if coef.p != data.p:
        raise DimensionError(f"dataset has {data.p} predictors, coefficients have {coef.p}")
    eta = coef.linear_predictor(data.X)
    if not np.all(np.isfinite(eta)):
        raise DomainError("non-finite linear predictor")
    terms = family.nll_terms(data.y, eta) * _check_weights(weights, data.n)
    total = float(np.sum(terms))
    if not np.isfinite(total):
        raise DomainError(f"{family.name}: negative log-likelihood is not finite")
    return total


def _to_coef(beta: np.ndarray, fit_intercept: bool) -> CoefVector:
    if fit_intercept:
        return CoefVector.from_array(beta)
    return CoefVector(intercept=0.0, slopes=beta)


def _penalty_mask(ncol: int, fit_intercept: bool) -> np.ndarray:
    mask = np.ones(ncol)
    if fit_intercept:
        mask[0] = 0.0
    return mask


def _check_rank(Z: np.ndarray, weights: np.ndarray) -> None:
    Zw = Z * np.sqrt(weights)[:, None]
    rank = np.linalg.matrix_rank(Zw)
    if rank < Z.shape[1]:
        raise SingularDesignError(
            f"design is rank deficient (rank {rank} < {Z.shape[1]} columns); "
            "remove collinear predictors or add augmentation rows"
        )


def _solve_pd(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        return cho_solve(cho_factor(A, check_finite=False), b, check_finite=False)
    except LinAlgError as e:
        raise SingularDesignError(f"normal equations are not positive definite: {e}") from e


def fit_mle(
    family: GlmFamily,
    data: Dataset,
    weights: np.ndarray | None = None,
    init: CoefVector | None = None,
    fit_intercept: bool = True,
    ridge: float = 0.0,
    max_iter: int = IRLS_MAX_ITER,
    tol: float = IRLS_TOL,
) -> CoefVector:
    """Maximum-likelihood fit of a GLM.

    Gaussian fits solve the normal equations once. Other families run Fisher
    scoring (IRLS) with step-halving whenever the loss would increase.

    Args:
        family: Response family
        data: Observed or augmented data
        weights: Optional non-negative observation weights
        init: Optional starting coefficients
        fit_intercept: Whether to fit an unpenalized intercept
        ridge: Optional ridge penalty 0.5 * ridge * ||theta||^2 on the slopes
        max_iter: Maximum Newton steps
        tol: Gradient tolerance, relative to 1 + |loss|

    Returns:
        Fitted CoefVector (intercept 0 when fit_intercept is False)

    Raises:
        SingularDesignError: If the design is rank deficient
        FitError: If IRLS does not converge or the likelihood is degenerate
    """
    w_obs = _check_weights(weights, data.n)
    family.validate_response(data.y)
    Z = design_matrix(data.X, fit_intercept)
    ncol = Z.shape[1]
    penalty = ridge * _penalty_mask(ncol, fit_intercept)
    if ridge <= 0:
        _check_rank(Z, w_obs)

    if isinstance(family, GaussianFamily):
        A = Z.T @ (w_obs[:, None] * Z) + np.diag(penalty)
        beta = _solve_pd(A, Z.T @ (w_obs * data.y))
        return _to_coef(beta, fit_intercept)

    y = data.y
    if init is not None:
        if init.p != data.p:
            raise DimensionError(f"init has {init.p} slopes, data has {data.p} predictors")
        beta = init.as_array() if fit_intercept else init.slopes.copy()
    else:
        beta = np.zeros(ncol)
        if fit_intercept:
            beta[0] = family.init_eta(y)

    def objective(b: np.ndarray) -> float:
        eta = Z @ b
        if not np.all(np.isfinite(eta)) or np.max(np.abs(eta)) > family.eta_limit:
            return np.inf
        with np.errstate(over="ignore", invalid="ignore"):
            value = float(np.sum(family.nll_terms(y, eta) * w_obs) + 0.5 * np.sum(penalty * b ** 2))
        return value if np.isfinite(value) else np.inf

    loss = objective(beta)
    if not np.isfinite(loss):
        beta = np.zeros(ncol)
        if fit_intercept:
            beta[0] = family.init_eta(y)
        loss = objective(beta)
        if not np.isfinite(loss):
            raise FitError(f"{family.name}: loss is not finite at the starting point")

    converged = False
    for iteration in range(max_iter):
        eta = Z @ beta
        score = family.score(y, eta) * w_obs
        grad = -(Z.T @ score) + penalty * beta
        if np.max(np.abs(grad)) <= tol * (1.0 + abs(loss)):
            converged = True
            break

        info = Z.T @ ((family.weight(eta) * w_obs)[:, None] * Z) + np.diag(penalty)
        step = _solve_pd(info, -grad)

        t = 1.0
        for _ in range(IRLS_MAX_HALVINGS):
            candidate = beta + t * step
            new_loss = objective(candidate)
            if new_loss <= loss + 1e-12 * (1.0 + abs(loss)):
                break
            t *= 0.5
        else:
            if np.max(np.abs(grad)) <= 1e-6 * (1.0 + abs(loss)):
                converged = True
                break
            raise FitError(
                f"{family.name}: step-halving failed at Newton step {iteration + 1}",
                last_iterate=_to_coef(beta, fit_intercept),
            )
        beta, loss = candidate, new_loss

    if not converged:
        raise FitError(
            f"{family.name}: IRLS did not converge after {max_iter} Newton steps",
            last_iterate=_to_coef(beta, fit_intercept),
        )

    message = family.check_degenerate(y, family.mean(Z @ beta))
    if message:
        raise FitError(f"{family.name}: {message}", last_iterate=_to_coef(beta, fit_intercept))

    return _to_coef(beta, fit_intercept)
