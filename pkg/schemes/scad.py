"""SCAD noise with breakpoints at n_e * lam and a * n_e * lam."""
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from config import DEFAULT_EPS_THETA, DEFAULT_SCAD_A
from utils.errors import ConfigError
from .base import NoiseScheme


@dataclass(frozen=True)
class Scad(NoiseScheme):
    """Piecewise variance that vanishes for |theta_j| > a * n_e * lam.

    Below n_e * lam the variance is lam / |theta| - (a + 1) / (2 a^2 n_e); the
    middle branch joins it continuously to zero at a * n_e * lam. Negative
    values are clamped to zero.
    """

    name: ClassVar[str] = "scad"

    lam: float
    a: float = DEFAULT_SCAD_A
    eps_theta: float = DEFAULT_EPS_THETA

    def __post_init__(self):
        self._validate_common()
        if not self.a > 2:
            raise ConfigError(f"scad: a must be greater than 2, got {self.a}")

    def _spec(self, slopes: np.ndarray, n_e: int) -> np.ndarray:
        lam, a = self.lam, self.a
        t = self._magnitude(slopes)
        inner = lam / t - (a + 1.0) / (2.0 * a ** 2 * n_e)
        middle = (a * lam / t - lam ** 2 * n_e / (2.0 * t ** 2) - (2.0 * a ** 2 - 1.0) / (2.0 * a ** 2 * n_e)) / (a - 1.0)
        v = np.where(t <= n_e * lam, inner, np.where(t <= a * n_e * lam, middle, 0.0))
        return np.maximum(v, 0.0)
