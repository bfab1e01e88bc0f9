"""Fused noise with full covariance lam * T T^T over a block of coefficients."""
from abc import abstractmethod
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from config import DEFAULT_EPS_THETA
from utils.errors import ConfigError
from .base import NoiseScheme, slopes_of


def cyclic_difference(q: int) -> np.ndarray:
    """T with T[k, k] = 1 and T[(k + 1) mod q, k] = -1."""
    T = np.eye(q)
    for k in range(q):
        T[(k + 1) % q, k] -= 1.0
    return T


@dataclass(frozen=True)
class _FusedBase(NoiseScheme):
    diagonal: ClassVar[bool] = False

    lam: float
    members: tuple[int, ...] | None = None
    eps_theta: float = DEFAULT_EPS_THETA

    def __post_init__(self):
        self._validate_common()
        if self.members is not None:
            members = tuple(int(j) for j in self.members)
            if len(members) < 2 or len(set(members)) != len(members) or min(members) < 0:
                raise ConfigError(f"{self.name}: members must be at least two distinct indices")
            object.__setattr__(self, "members", members)

    def _block(self, slopes: np.ndarray) -> list[int]:
        p = slopes.shape[0]
        idx = list(range(p)) if self.members is None else list(self.members)
        if max(idx) >= p:
            raise ConfigError(f"{self.name}: member index {max(idx)} out of range for p={p}")
        return idx

    @abstractmethod
    def _t_matrix(self, block: np.ndarray) -> np.ndarray:
        pass

    def _embedded_factor(self, slopes: np.ndarray) -> np.ndarray:
        idx = self._block(slopes)
        L = np.zeros((slopes.shape[0], len(idx)))
        L[idx, :] = np.sqrt(self.lam) * self._t_matrix(slopes[idx])
        return L

    def _spec(self, slopes: np.ndarray, n_e: int) -> np.ndarray:
        L = self._embedded_factor(slopes)
        return L @ L.T

    def noise_factor(self, theta, n_e: int) -> np.ndarray:
        self.variance_spec(theta, n_e)
        return self._embedded_factor(slopes_of(theta))


@dataclass(frozen=True)
class FusedRidge(_FusedBase):
    """Ridge on cyclic differences; the covariance does not depend on theta."""

    name: ClassVar[str] = "fused_ridge"

    def _t_matrix(self, block: np.ndarray) -> np.ndarray:
        return cyclic_difference(block.shape[0])


@dataclass(frozen=True)
class FusedLasso(_FusedBase):
    """Off-diagonal T entries lam / |theta_k - theta_k'|; the diagonal is zero."""

    name: ClassVar[str] = "fused_lasso"

    def _t_matrix(self, block: np.ndarray) -> np.ndarray:
        diff = np.maximum(np.abs(block[:, None] - block[None, :]), self.eps_theta)
        T = self.lam / diff
        np.fill_diagonal(T, 0.0)
        return T
