"""Negative binomial family with known number of failures r and log link on the mean."""
import numpy as np
from scipy.special import expit, gammaln

from utils.errors import ConfigError, DataError
from .base import GlmFamily


class NegativeBinomialFamily(GlmFamily):
    """Overdispersed counts with mean e^eta and fixed r.

    The natural parameter is phi = eta - log(r + e^eta) < 0 and
    B(phi) = -r log(1 - e^phi).
    """

    def __init__(self, nb_failures: int):
        super().__init__()
        if isinstance(nb_failures, bool) or int(nb_failures) != nb_failures or nb_failures < 1:
            raise ConfigError(f"nb_failures must be a positive integer, got {nb_failures}")
        self.r = int(nb_failures)

    @property
    def name(self) -> str:
        return "negative_binomial"

    def _log_partition(self, theta: np.ndarray, order: int) -> np.ndarray:
        out = np.full(theta.shape, np.nan)
        ok = theta < 0
        t = theta[ok]
        one_minus = -np.expm1(t)
        if order == 0:
            out[ok] = -self.r * np.log(one_minus)
        elif order == 1:
            out[ok] = self.r * np.exp(t) / one_minus
        else:
            out[ok] = self.r * np.exp(t) / one_minus ** 2
        return out

    def natural(self, eta: np.ndarray, order: int = 0) -> np.ndarray:
        eta = np.asarray(eta, dtype=float)
        log_r = np.log(self.r)
        if order == 0:
            return eta - np.logaddexp(log_r, eta)
        d1 = expit(log_r - eta)  # r / (r + e^eta)
        if order == 1:
            return d1
        return -d1 * (1.0 - d1)

    def mean(self, eta: np.ndarray) -> np.ndarray:
        return np.exp(np.asarray(eta, dtype=float))

    def weight(self, eta: np.ndarray) -> np.ndarray:
        mu = self.mean(eta)
        return self.r * mu / (self.r + mu)

    def log_base(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return gammaln(y + self.r) - gammaln(y + 1.0) - gammaln(self.r)

    def validate_response(self, y: np.ndarray) -> None:
        super().validate_response(y)
        if np.any(y < 0):
            raise DataError("negative_binomial: response must be non-negative")

    def init_eta(self, y: np.ndarray) -> float:
        return float(np.log(max(np.mean(y), 1e-8)))

    def sample(self, eta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        mu = self.mean(eta)
        return rng.negative_binomial(self.r, self.r / (self.r + mu)).astype(float)

    def to_dict(self) -> dict:
        return {"family": self.name, "nb_failures": self.r}
