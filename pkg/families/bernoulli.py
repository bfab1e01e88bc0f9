"""Bernoulli family with logit link."""
import numpy as np
from scipy.special import expit, logit

from utils.errors import DataError
from .base import GlmFamily

# B' and B'' are evaluated on eta clipped to this range
ETA_CLIP = 30.0


class BernoulliFamily(GlmFamily):
    """Binary responses; B(eta) = log(1 + e^eta)."""

    @property
    def name(self) -> str:
        return "bernoulli"

    def _log_partition(self, theta: np.ndarray, order: int) -> np.ndarray:
        if order == 0:
            return np.logaddexp(0.0, theta)
        p = expit(np.clip(theta, -ETA_CLIP, ETA_CLIP))
        if order == 1:
            return p
        return p * (1.0 - p)

    def kappa(self, theta0: float) -> float:
        e2 = np.exp(2.0 * np.clip(theta0, -ETA_CLIP, ETA_CLIP))
        return float(2.0 * e2 / (1.0 + e2) ** 4)

    def log_base(self, y: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(y, dtype=float))

    @property
    def eta_limit(self) -> float:
        return ETA_CLIP

    def validate_response(self, y: np.ndarray) -> None:
        super().validate_response(y)
        if not np.all((y == 0) | (y == 1)):
            raise DataError("bernoulli: response must be coded 0/1")

    def check_degenerate(self, y: np.ndarray, mu: np.ndarray) -> str | None:
        if y.size and np.all(np.abs(y - mu) < 1e-6):
            return "complete separation: fitted probabilities reproduce the 0/1 response"
        return None

    def init_eta(self, y: np.ndarray) -> float:
        return float(logit(np.clip(np.mean(y), 0.01, 0.99)))

    def pseudo_response(self, y: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
        p_hat = float(np.mean(y))
        return rng.binomial(1, p_hat, size=size).astype(float)

    def sample(self, eta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return rng.binomial(1, expit(np.asarray(eta, dtype=float))).astype(float)
