"""Gaussian family with identity link."""
import numpy as np

from .base import GlmFamily

LOG_2PI = float(np.log(2.0 * np.pi))


class GaussianFamily(GlmFamily):
    """Normal responses; B(eta) = eta^2 / 2 with dispersion sigma^2."""

    @property
    def name(self) -> str:
        return "gaussian"

    def _log_partition(self, theta: np.ndarray, order: int) -> np.ndarray:
        if order == 0:
            return 0.5 * theta ** 2
        if order == 1:
            return theta.copy()
        return np.ones_like(theta)

    def log_base(self, y: np.ndarray) -> np.ndarray:
        return -0.5 * np.asarray(y, dtype=float) ** 2 - 0.5 * LOG_2PI

    def nll_terms(self, y: np.ndarray, eta: np.ndarray) -> np.ndarray:
        # Equals 0.5 * (y - eta)^2 + 0.5 * log(2 pi) when dispersion is 1
        s2 = self.dispersion
        return 0.5 * (y - eta) ** 2 / s2 + 0.5 * (LOG_2PI + np.log(s2))

    def kappa(self, theta0: float) -> float:
        # Stated on the residual sum-of-squares scale; see loss_scale
        return 8.0

    @property
    def loss_scale(self) -> float:
        return 2.0 * self.dispersion

    def init_eta(self, y: np.ndarray) -> float:
        return float(np.mean(y))

    def sample(self, eta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        return eta + np.sqrt(self.dispersion) * rng.standard_normal(eta.shape)

    def to_dict(self) -> dict:
        return {"family": self.name, "dispersion": self.dispersion}
