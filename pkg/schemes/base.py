"""Abstract base class for noise generating distributions."""
from abc import ABC, abstractmethod
from dataclasses import asdict, replace
from typing import ClassVar

import numpy as np

from models.data import CoefVector
from utils.errors import ConfigError, DataError


def slopes_of(theta: CoefVector | np.ndarray) -> np.ndarray:
    """Return the slope vector of a CoefVector or a bare array of slopes."""
    if isinstance(theta, CoefVector):
        return theta.slopes
    return np.atleast_1d(np.asarray(theta, dtype=float))


class NoiseScheme(ABC):
    """Abstract base class for the mean-zero Gaussian laws of augmentation rows.

    Subclasses are frozen dataclasses carrying their tuning parameters. The
    (co)variance depends on the current slopes; the intercept is never
    penalized.
    """

    name: ClassVar[str] = ""
    diagonal: ClassVar[bool] = True

    lam: float
    eps_theta: float

    def _validate_common(self) -> None:
        if not np.isfinite(self.lam) or self.lam <= 0:
            raise ConfigError(f"{self.name}: lambda must be positive, got {self.lam}")
        if not np.isfinite(self.eps_theta) or self.eps_theta <= 0:
            raise ConfigError(f"{self.name}: eps_theta must be positive, got {self.eps_theta}")

    def _magnitude(self, slopes: np.ndarray) -> np.ndarray:
        """|theta| floored at eps_theta so that variances stay finite."""
        return np.maximum(np.abs(slopes), self.eps_theta)

    @abstractmethod
    def _spec(self, slopes: np.ndarray, n_e: int) -> np.ndarray:
        """Per-coordinate variances (diagonal schemes) or a p x p covariance."""
        pass

    def variance_spec(self, theta: CoefVector | np.ndarray, n_e: int) -> np.ndarray:
        """Return per-coordinate variances or the full covariance of the noise.

        Args:
            theta: Current coefficients (only the slopes are used)
            n_e: Number of augmentation rows

        Returns:
            Length-p vector for diagonal schemes, p x p matrix otherwise
        """
        slopes = slopes_of(theta)
        if not np.all(np.isfinite(slopes)):
            raise DataError(f"{self.name}: slopes must be finite")
        if int(n_e) != n_e or n_e < 1:
            raise ConfigError(f"n_e must be a positive integer, got {n_e}")
        return self._spec(slopes, int(n_e))

    def covariance(self, theta: CoefVector | np.ndarray, n_e: int) -> np.ndarray:
        spec = self.variance_spec(theta, n_e)
        return np.diag(spec) if spec.ndim == 1 else spec

    def noise_factor(self, theta: CoefVector | np.ndarray, n_e: int) -> np.ndarray:
        """Return L with covariance L L^T; a vector of standard deviations for diagonal schemes."""
        return np.sqrt(self.variance_spec(theta, n_e))

    def quadratic_form(self, theta: CoefVector | np.ndarray, n_e: int) -> float:
        """theta^T Sigma(theta) theta over the slopes."""
        slopes = slopes_of(theta)
        spec = self.variance_spec(slopes, n_e)
        if spec.ndim == 1:
            return float(np.sum(spec * slopes ** 2))
        return float(slopes @ spec @ slopes)

    def expected_penalty(self, theta: CoefVector | np.ndarray, n_e: int) -> float:
        """Expected sum over rows of (e_i . theta)^2, the penalty on the sum-of-squares scale."""
        return n_e * self.quadratic_form(theta, n_e)

    def with_params(self, **changes) -> "NoiseScheme":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {"scheme": self.name}
        for key, value in asdict(self).items():
            if isinstance(value, np.ndarray):
                value = value.tolist()
            elif isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            out[key] = value
        return out
