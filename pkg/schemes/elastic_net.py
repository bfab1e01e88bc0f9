"""Elastic-net and adaptive-lasso noise."""
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from config import DEFAULT_EPS_THETA
from utils.errors import ConfigError, DataError
from .base import NoiseScheme


@dataclass(frozen=True)
class ElasticNet(NoiseScheme):
    """Variance lam / |theta_j| + sigma2: a lasso term plus a ridge term."""

    name: ClassVar[str] = "elastic_net"

    lam: float
    sigma2: float = 0.0
    eps_theta: float = DEFAULT_EPS_THETA

    def __post_init__(self):
        self._validate_common()
        if not np.isfinite(self.sigma2) or self.sigma2 < 0:
            raise ConfigError(f"elastic_net: sigma2 must be >= 0, got {self.sigma2}")

    def _spec(self, slopes: np.ndarray, n_e: int) -> np.ndarray:
        return self.lam / self._magnitude(slopes) + self.sigma2


@dataclass(frozen=True, eq=False)
class AdaptiveLasso(NoiseScheme):
    """Variance lam / |theta_j| * |pilot_j|^(-gamma) with a pilot estimate frozen at construction."""

    name: ClassVar[str] = "adaptive_lasso"

    lam: float
    pilot: np.ndarray = field(default=None)
    gamma: float = 1.0
    eps_theta: float = DEFAULT_EPS_THETA

    def __post_init__(self):
        self._validate_common()
        if self.gamma < 0:
            raise ConfigError(f"adaptive_lasso: gamma must be >= 0, got {self.gamma}")
        if self.pilot is None:
            raise ConfigError("adaptive_lasso requires a pilot estimate")
        pilot = np.array(self.pilot, dtype=float, copy=True).ravel()
        if not np.all(np.isfinite(pilot)):
            raise DataError("adaptive_lasso: pilot entries must be finite")
        pilot.setflags(write=False)
        object.__setattr__(self, "pilot", pilot)

    def _spec(self, slopes: np.ndarray, n_e: int) -> np.ndarray:
        if slopes.shape != self.pilot.shape:
            raise DataError(
                f"adaptive_lasso: pilot has {self.pilot.size} entries, theta has {slopes.size}"
            )
        weights = self._magnitude(self.pilot) ** (-self.gamma)
        return self.lam / self._magnitude(slopes) * weights
