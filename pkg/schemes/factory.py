"""Factory for creating noise scheme instances."""
from typing import Sequence

import numpy as np

from .base import NoiseScheme
from .bridge import Bridge
from .elastic_net import AdaptiveLasso, ElasticNet
from .scad import Scad
from .group_lasso import GroupLasso
from .fused import FusedLasso, FusedRidge
from config import (
    DEFAULT_ADAPTIVE_GAMMA,
    DEFAULT_EN_SIGMA2,
    DEFAULT_EPS_THETA,
    DEFAULT_GAMMA,
    DEFAULT_LAMBDA,
    DEFAULT_SCAD_A,
    DEFAULT_SCHEME,
)
from utils.errors import ConfigError

# Bridge shortcuts with a fixed exponent
BRIDGE_PRESETS = {"l0": 2.0, "lasso": 1.0, "ridge": 0.0}

SCHEME_NAMES = [
    "bridge", "l0", "lasso", "ridge", "elastic_net", "adaptive_lasso",
    "scad", "group_lasso", "fused_ridge", "fused_lasso",
]


def get_scheme(
    name: str | None = None,
    lam: float | None = None,
    gamma: float | None = None,
    a: float | None = None,
    sigma2: float | None = None,
    pilot: Sequence[float] | np.ndarray | None = None,
    groups: Sequence[Sequence[int]] | None = None,
    members: Sequence[int] | None = None,
    eps_theta: float | None = None,
) -> NoiseScheme:
    """Factory to get a noise scheme instance.

    Args:
        name: Scheme name. If None, uses config.DEFAULT_SCHEME
        lam: Noise scale lambda (default config.DEFAULT_LAMBDA)
        gamma: Bridge / adaptive-lasso exponent
        a: SCAD shape parameter
        sigma2: Elastic-net ridge variance
        pilot: Adaptive-lasso pilot slopes
        groups: Group-lasso partition (0-based column indices)
        members: Fused-scheme block (0-based column indices; default all)
        eps_theta: |theta| floor inside variance formulas

    Returns:
        NoiseScheme instance

    Raises:
        ConfigError: If the name is unknown or required parameters are missing
    """
    key = (name or DEFAULT_SCHEME).strip().lower().replace("-", "_")
    lam = DEFAULT_LAMBDA if lam is None else float(lam)
    eps = DEFAULT_EPS_THETA if eps_theta is None else float(eps_theta)

    if key in BRIDGE_PRESETS:
        if gamma is not None and gamma != BRIDGE_PRESETS[key]:
            raise ConfigError(f"{key} fixes gamma={BRIDGE_PRESETS[key]}; use scheme 'bridge' for other values")
        return Bridge(lam=lam, gamma=BRIDGE_PRESETS[key], eps_theta=eps)

    builders = {
        "bridge": lambda: Bridge(lam=lam, gamma=DEFAULT_GAMMA if gamma is None else gamma, eps_theta=eps),
        "elastic_net": lambda: ElasticNet(lam=lam, sigma2=DEFAULT_EN_SIGMA2 if sigma2 is None else sigma2, eps_theta=eps),
        "adaptive_lasso": lambda: AdaptiveLasso(
            lam=lam, pilot=pilot, gamma=DEFAULT_ADAPTIVE_GAMMA if gamma is None else gamma, eps_theta=eps
        ),
        "scad": lambda: Scad(lam=lam, a=DEFAULT_SCAD_A if a is None else a, eps_theta=eps),
        "group_lasso": lambda: GroupLasso(lam=lam, groups=tuple(tuple(g) for g in (groups or ())), eps_theta=eps),
        "fused_ridge": lambda: FusedRidge(lam=lam, members=None if members is None else tuple(members), eps_theta=eps),
        "fused_lasso": lambda: FusedLasso(lam=lam, members=None if members is None else tuple(members), eps_theta=eps),
    }

    if key not in builders:
        raise ConfigError(f"Unknown scheme: {name}. Available: {SCHEME_NAMES}")

    return builders[key]()

