"""Exponential family with log link on the rate."""
import numpy as np

from utils.errors import DataError
from .base import GlmFamily


class ExponentialFamily(GlmFamily):
    """Positive continuous responses with rate e^eta.

    The natural parameter is phi = -e^eta and B(phi) = -log(-phi), so the
    per-observation loss is y * e^eta - eta and every observation carries
    unit expected information.
    """

    @property
    def name(self) -> str:
        return "exponential"

    def _log_partition(self, theta: np.ndarray, order: int) -> np.ndarray:
        out = np.full(theta.shape, np.nan)
        ok = theta < 0
        t = theta[ok]
        if order == 0:
            out[ok] = -np.log(-t)
        elif order == 1:
            out[ok] = -1.0 / t
        else:
            out[ok] = 1.0 / t ** 2
        return out

    def natural(self, eta: np.ndarray, order: int = 0) -> np.ndarray:
        # phi, phi' and phi'' all equal -e^eta
        return -np.exp(np.asarray(eta, dtype=float))

    def mean(self, eta: np.ndarray) -> np.ndarray:
        return np.exp(-np.asarray(eta, dtype=float))

    def weight(self, eta: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(eta, dtype=float))

    def nll_terms(self, y: np.ndarray, eta: np.ndarray) -> np.ndarray:
        return y * np.exp(eta) - eta

    def log_base(self, y: np.ndarray) -> np.ndarray:
        return np.zeros_like(np.asarray(y, dtype=float))

    def validate_response(self, y: np.ndarray) -> None:
        super().validate_response(y)
        if np.any(y <= 0):
            raise DataError("exponential: response must be strictly positive")

    def init_eta(self, y: np.ndarray) -> float:
        return float(-np.log(np.mean(y)))

    def sample(self, eta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return rng.exponential(scale=np.exp(-np.asarray(eta, dtype=float)))
