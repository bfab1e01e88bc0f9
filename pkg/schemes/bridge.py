"""Bridge noise: variance lam * |theta_j|^(-gamma)."""
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from config import DEFAULT_EPS_THETA
from utils.errors import ConfigError
from .base import NoiseScheme


@dataclass(frozen=True)
class Bridge(NoiseScheme):
    """Bridge penalty lam * n_e * sum |theta_j|^(2 - gamma).

    gamma = 2 gives the l0 scheme, gamma = 1 lasso and gamma = 0 ridge.
    """

    name: ClassVar[str] = "bridge"

    lam: float
    gamma: float = 1.0
    eps_theta: float = DEFAULT_EPS_THETA

    def __post_init__(self):
        self._validate_common()
        if not 0.0 <= self.gamma <= 2.0:
            raise ConfigError(f"bridge: gamma must lie in [0, 2], got {self.gamma}")

    @property
    def is_l0(self) -> bool:
        return self.gamma == 2.0

    def _spec(self, slopes: np.ndarray, n_e: int) -> np.ndarray:
        if self.gamma == 0.0:
            return np.full(slopes.shape, float(self.lam))
        return self.lam * self._magnitude(slopes) ** (-self.gamma)
