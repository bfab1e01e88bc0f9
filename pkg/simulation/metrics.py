"""Estimation and prediction metrics for simulation replicates."""
import numpy as np

from families import GlmFamily
from utils.errors import DimensionError
from .designs import PredictorLaw


def model_error(
    beta_hat: np.ndarray,
    beta_true: np.ndarray,
    predictor_law: PredictorLaw | np.ndarray,
) -> float:
    """(beta_hat - beta)^T E[x x^T] (beta_hat - beta).

    Args:
        beta_hat: Estimated slopes
        beta_true: True slopes
        predictor_law: A law (its analytic second moment is used) or the moment matrix itself
    """
    diff = np.asarray(beta_hat, dtype=float) - np.asarray(beta_true, dtype=float)
    if diff.ndim != 1:
        raise DimensionError(f"expected slope vectors, got shape {diff.shape}")
    if isinstance(predictor_law, PredictorLaw):
        moment = predictor_law.second_moment(diff.shape[0])
    else:
        moment = np.atleast_2d(np.asarray(predictor_law, dtype=float))
    if moment.shape != (diff.shape[0], diff.shape[0]):
        raise DimensionError(f"moment matrix has shape {moment.shape} for {diff.shape[0]} slopes")
    return float(diff @ moment @ diff)


def zero_counts(estimated_zero: np.ndarray, true_zero: np.ndarray) -> tuple[int, int]:
    """Return (correctly identified zeros, incorrectly identified zeros)."""
    estimated_zero = np.asarray(estimated_zero, dtype=bool)
    true_zero = np.asarray(true_zero, dtype=bool)
    return int(np.sum(estimated_zero & true_zero)), int(np.sum(estimated_zero & ~true_zero))


def mean_deviance(family: GlmFamily, y: np.ndarray, eta: np.ndarray) -> float:
    """Mean negative log-likelihood of held-out responses."""
    return float(np.mean(family.nll_terms(np.asarray(y, dtype=float), np.asarray(eta, dtype=float))))


def classification_rates(y: np.ndarray, prob: np.ndarray, threshold: float = 0.5) -> dict:
    """Accuracy, sensitivity and specificity of thresholded probabilities.

    Rates with an empty denominator are NaN.
    """
    y = np.asarray(y) > 0.5
    pred = np.asarray(prob) >= threshold
    positives, negatives = int(y.sum()), int((~y).sum())
    return {
        "accuracy": float(np.mean(pred == y)),
        "sensitivity": float(np.sum(pred & y) / positives) if positives else float("nan"),
        "specificity": float(np.sum(~pred & ~y) / negatives) if negatives else float("nan"),
    }
