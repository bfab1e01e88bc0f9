"""Poisson family with log link."""
import numpy as np
from scipy.special import gammaln

from utils.errors import DataError
from .base import GlmFamily


class PoissonFamily(GlmFamily):
    """Count responses; B(eta) = e^eta."""

    @property
    def name(self) -> str:
        return "poisson"

    def _log_partition(self, theta: np.ndarray, order: int) -> np.ndarray:
        return np.exp(theta)

    def log_base(self, y: np.ndarray) -> np.ndarray:
        # log Gamma(y + 1) accepts the non-integer pseudo-responses of augmentation rows
        return -gammaln(np.asarray(y, dtype=float) + 1.0)

    def validate_response(self, y: np.ndarray) -> None:
        super().validate_response(y)
        if np.any(y < 0):
            raise DataError("poisson: response must be non-negative")

    def init_eta(self, y: np.ndarray) -> float:
        return float(np.log(max(np.mean(y), 1e-8)))

    def sample(self, eta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return rng.poisson(np.exp(np.asarray(eta, dtype=float))).astype(float)
