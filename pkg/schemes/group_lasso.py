"""Group-lasso noise: one shared variance per group."""
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from config import DEFAULT_EPS_THETA
from utils.errors import ConfigError
from .base import NoiseScheme


@dataclass(frozen=True)
class GroupLasso(NoiseScheme):
    """Variance lam * sqrt(q_l) / ||theta_(l)||_2 shared by the q_l members of group l.

    ``groups`` holds 0-based column indices and must partition 0..p-1.
    """

    name: ClassVar[str] = "group_lasso"

    lam: float
    groups: tuple[tuple[int, ...], ...] = ()
    eps_theta: float = DEFAULT_EPS_THETA

    def __post_init__(self):
        self._validate_common()
        groups = tuple(tuple(int(j) for j in g) for g in self.groups)
        if not groups or any(len(g) == 0 for g in groups):
            raise ConfigError("group_lasso: groups must be non-empty")
        members = [j for g in groups for j in g]
        if len(set(members)) != len(members):
            raise ConfigError("group_lasso: groups overlap")
        if sorted(members) != list(range(len(members))):
            raise ConfigError(f"group_lasso: groups must cover 0..{len(members) - 1} exactly")
        object.__setattr__(self, "groups", groups)

    def _spec(self, slopes: np.ndarray, n_e: int) -> np.ndarray:
        p = slopes.shape[0]
        if sum(len(g) for g in self.groups) != p:
            raise ConfigError(f"group_lasso: groups cover {sum(len(g) for g in self.groups)} columns, theta has {p}")
        v = np.empty(p)
        for group in self.groups:
            idx = list(group)
            norm = max(float(np.linalg.norm(slopes[idx])), self.eps_theta)
            v[idx] = self.lam * np.sqrt(len(idx)) / norm
        return v
