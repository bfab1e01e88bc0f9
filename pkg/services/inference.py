"""Confidence intervals for all coefficients of a PANDA fit.

The per-iteration covariance is a sandwich of the augmented-data information
(bread) and the observed-data information (meat). Averaging it over the banked
iterations and adding the between-iteration spread of the raw estimates gives
the total variance.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, inv
from scipy.stats import norm

from config import DEFAULT_ALPHA, NE_REGIME_FRACTION
from families import GaussianFamily, GlmFamily
from models import CoefVector, Dataset, design_matrix
from schemes import NoiseBatch, NoiseScheme, augment
from services.panda_engine import PandaFit
from utils.errors import DimensionError, InferenceError

logger = logging.getLogger(__name__)


def fisher_augmented(
    family: GlmFamily,
    augmented_data: Dataset,
    coef: CoefVector,
    fit_intercept: bool = True,
) -> np.ndarray:
    """Return sum_i w(eta_i) z_i z_i^T over the supplied rows, z_i = (1, x_i)."""
    if coef.p != augmented_data.p:
        raise DimensionError(f"data has {augmented_data.p} predictors, coefficients have {coef.p}")
    Z = design_matrix(augmented_data.X, fit_intercept)
    w = family.weight(coef.linear_predictor(augmented_data.X))
    return Z.T @ (w[:, None] * Z)


def _inverse(A: np.ndarray) -> np.ndarray:
    try:
        return inv(A, check_finite=False)
    except LinAlgError as e:
        raise InferenceError(f"augmented information is singular: {e}") from e


def per_iteration_sigma(
    family: GlmFamily,
    data: Dataset,
    batch: NoiseBatch,
    coef: CoefVector,
    fit_intercept: bool = True,
) -> np.ndarray:
    """Covariance of one iteration's estimate: A^-1 B A^-1.

    A is the information of the augmented data and B that of the observed
    data, both at coef. Output is on the raw coefficient scale.
    """
    bread = _inverse(fisher_augmented(family, augment(data, batch), coef, fit_intercept))
    meat = fisher_augmented(family, data, coef, fit_intercept)
    sigma = bread @ meat @ bread
    return 0.5 * (sigma + sigma.T)


def gaussian_sandwich(xtx: np.ndarray, penalty: np.ndarray, sigma2: float = 1.0) -> np.ndarray:
    """sigma2 * M^-1 X^T X M^-1 with M = X^T X + penalty (a matrix or its diagonal)."""
    xtx = np.atleast_2d(np.asarray(xtx, dtype=float))
    penalty = np.asarray(penalty, dtype=float)
    M = xtx + (np.diag(np.atleast_1d(penalty)) if penalty.ndim <= 1 else penalty)
    M_inv = _inverse(M)
    sigma = sigma2 * M_inv @ xtx @ M_inv
    return 0.5 * (sigma + sigma.T)


def gaussian_sigma2(
    data: Dataset,
    coef_t: CoefVector,
    M_t: np.ndarray,
    fit_intercept: bool = True,
) -> tuple[float, float]:
    """Residual variance SSE / (n - nu) with nu = trace(X M^-1 X^T).

    Raises:
        InferenceError: If n <= nu
    """
    Z = design_matrix(data.X, fit_intercept)
    M_t = np.atleast_2d(np.asarray(M_t, dtype=float))
    nu = float(np.trace(_inverse(M_t) @ (Z.T @ Z)))
    if data.n <= nu:
        raise InferenceError(
            f"effective degrees of freedom {nu:.3f} reach n = {data.n}; "
            "use more observations or a stronger penalty"
        )
    resid = data.y - coef_t.linear_predictor(data.X)
    return float(resid @ resid / (data.n - nu)), nu


@dataclass(frozen=True, eq=False)
class InferenceResult:
    """Point estimates, standard errors, Wald statistics and CIs.

    ``centers`` are the pre-threshold means the intervals are built around;
    ``estimates`` are the thresholded coefficients.
    """

    names: tuple[str, ...]
    estimates: CoefVector
    centers: np.ndarray
    std_errors: np.ndarray
    ci_lower: np.ndarray
    ci_upper: np.ndarray
    wald_z: np.ndarray
    alpha: float
    sigma_bar: np.ndarray
    lambda_between: np.ndarray
    total_covariance: np.ndarray
    sigma2_hat: float | None = None
    df_nu: float | None = None
    warnings: tuple[str, ...] = field(default=())

    @property
    def variance_decomposition(self) -> tuple[np.ndarray, np.ndarray]:
        return self.sigma_bar, self.lambda_between

    def to_frame(self) -> pd.DataFrame:
        estimates = self.estimates.as_array()
        if len(self.names) == self.estimates.p:
            estimates = estimates[1:]
        return pd.DataFrame({
            "coef": list(self.names),
            "estimate": estimates,
            "center": self.centers,
            "se": self.std_errors,
            "lower": self.ci_lower,
            "upper": self.ci_upper,
            "z": self.wald_z,
        })

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "coefficients": self.to_frame().to_dict(orient="records"),
            "sigma2_hat": self.sigma2_hat,
            "df_nu": self.df_nu,
            "sigma_bar": self.sigma_bar.tolist(),
            "lambda_between": self.lambda_between.tolist(),
            "warnings": list(self.warnings),
        }


def infer(
    fit: PandaFit,
    family: GlmFamily | None = None,
    data: Dataset | None = None,
    scheme: NoiseScheme | None = None,
    alpha: float = DEFAULT_ALPHA,
) -> InferenceResult:
    """Total variance Sigma-bar + (1 + 1/r) Lambda and level 1 - alpha intervals.

    Args:
        fit: PANDA result with at least two banked raw estimates
        family: Response family (default: the fit's)
        data: Observed data (default: the fit's centered data)
        scheme: Noise scheme the banked batches were drawn from (default: the fit's);
            a different scheme raises InferenceError
        alpha: Significance level

    Returns:
        InferenceResult covering the intercept (if fitted) and every slope
    """
    family = family or fit.family
    data = fit.data if data is None else data.center()
    r = len(fit.theta_bank_raw)
    if r < 2:
        raise InferenceError(f"between-iteration variance needs r >= 2 banked estimates, got {r}")
    if not 0 < alpha < 1:
        raise InferenceError(f"alpha must lie in (0, 1), got {alpha}")
    if scheme is not None and scheme.to_dict() != fit.scheme.to_dict():
        raise InferenceError(
            f"banked batches were drawn from {fit.scheme.to_dict()}, not {scheme.to_dict()}; refit with that scheme"
        )

    warnings: list[str] = []
    n_e = fit.config.n_e
    if n_e > NE_REGIME_FRACTION * data.n:
        message = (f"n_e = {n_e} exceeds n/5 = {data.n / 5:g}; intervals are reliable when n_e is "
                   "small relative to n and m is large")
        logger.warning(f"INFERENCE: {message}")
        warnings.append(message)

    fit_intercept = fit.config.fit_intercept
    start = 0 if fit_intercept else 1
    gaussian = isinstance(family, GaussianFamily)

    sigmas, sigma2s, nus = [], [], []
    Z = design_matrix(data.X, fit_intercept)
    xtx = Z.T @ Z
    for coef_t, batch in zip(fit.theta_bank_raw, fit.batches):
        if gaussian:
            Ze = design_matrix(batch.e_x, fit_intercept)
            penalty = Ze.T @ Ze
            s2, nu = gaussian_sigma2(data, coef_t, xtx + penalty, fit_intercept)
            sigma2s.append(s2)
            nus.append(nu)
            sigmas.append(gaussian_sandwich(xtx, penalty, s2))
        else:
            sigmas.append(per_iteration_sigma(family, data, batch, coef_t, fit_intercept))

    sigma_bar = np.mean(sigmas, axis=0)
    raw = np.array([c.as_array()[start:] for c in fit.theta_bank_raw])
    lambda_between = np.atleast_2d(np.cov(raw, rowvar=False, ddof=1))
    total = sigma_bar + (1.0 + 1.0 / r) * lambda_between
    total = 0.5 * (total + total.T)

    sigma2_hat = df_nu = None
    if gaussian:
        sigma2_hat, df_nu = float(np.mean(sigma2s)), float(np.mean(nus))
        if sigma2_hat == 0.0:
            message = "residual variance estimate is 0 (perfect fit); standard errors are degenerate"
            logger.warning(f"INFERENCE: {message}")
            warnings.append(message)

    se = np.sqrt(np.clip(np.diag(total), 0.0, None))
    centers = fit.raw_mean.as_array()[start:]
    z_crit = norm.ppf(1.0 - alpha / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        wald = np.where(se > 0, centers / se, np.nan)

    names = (("(Intercept)",) if fit_intercept else ()) + tuple(data.column_names)
    return InferenceResult(
        names=names,
        estimates=fit.theta_hat,
        centers=centers,
        std_errors=se,
        ci_lower=centers - z_crit * se,
        ci_upper=centers + z_crit * se,
        wald_z=wald,
        alpha=alpha,
        sigma_bar=sigma_bar,
        lambda_between=lambda_between,
        total_covariance=total,
        sigma2_hat=sigma2_hat,
        df_nu=df_nu,
        warnings=tuple(warnings),
    )
