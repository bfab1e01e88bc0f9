"""Ready-made designs for the coverage study and the regularizer comparisons."""
from dataclasses import dataclass

import numpy as np

from config import DEFAULT_ADAPTIVE_GAMMA, DEFAULT_FOLDS, DEFAULT_NB_FAILURES, DEFAULT_SCAD_A
from families import canonical_name, get_family
from schemes import NoiseScheme, get_scheme
from services.panda_engine import PandaConfig
from services.tuning import TuneGrid
from utils.errors import ConfigError
from .designs import AR1Normal, BernoulliHalfMixed, PredictorLaw, SimDesign, StdNormal, Uniform

COVERAGE_P = 30
COVERAGE_ZERO_INDEX = tuple(range(2, 27, 3))

COMPARISON_BETA = (3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0)

COVERAGE_LAWS: dict[str, PredictorLaw] = {
    "gaussian": StdNormal(),
    "negative_binomial": StdNormal(),
    "bernoulli": Uniform(-3.0, 3.0),
    "exponential": Uniform(-1.0, 2.0),
    "poisson": Uniform(-0.3, 0.5),
}

# Algorithmic settings for the comparison designs
LARGE_NE = {"n_e": 200, "m": 50, "r": 50, "max_iter": 150, "tau0": 0.01}
L0_MODE = {"m": 600, "r": 600, "max_iter": 1200, "tau0": 0.01}
L0_LAMBDA = 20.0
EN_SIGMA2_RATIO = 5.0 / 190.0

COMPARISON_SCHEMES = ("ridge", "lasso", "adaptive_lasso", "elastic_net", "scad", "l0")

# lambda * n_e grids searched by cross-validation for each regularizer
LAMBDA_NE_GRIDS = {
    "ridge": tuple(np.logspace(-1, 2, 10)),
    "lasso": tuple(np.logspace(0, 2.5, 10)),
    "adaptive_lasso": tuple(np.logspace(-1, 2, 10)),
    "elastic_net": tuple(np.logspace(0, 2.5, 10)),
    "scad": tuple(np.logspace(-1, 1.5, 10)),
}


@dataclass(frozen=True, eq=False)
class Preset:
    """Everything run_benchmark needs for one table cell."""

    name: str
    design: SimDesign
    scheme: NoiseScheme
    config: PandaConfig
    tune_grid: TuneGrid | None = None
    comparator: str = "mle"
    with_inference: bool = True

    def to_dict(self) -> dict:
        return {
            "preset": self.name,
            "design": self.design.to_dict(),
            "scheme": self.scheme.to_dict(),
            "config": self.config.to_dict(),
            "tune_grid": None if self.tune_grid is None else self.tune_grid.to_dict(),
            "comparator": self.comparator,
        }


def coverage_beta() -> np.ndarray:
    """21 slopes evenly spread over [0.5, 1] with 9 zeros interleaved."""
    beta = np.zeros(COVERAGE_P)
    nonzero = [j for j in range(COVERAGE_P) if j not in COVERAGE_ZERO_INDEX]
    beta[nonzero] = np.linspace(0.5, 1.0, len(nonzero))
    return beta


def table3(family: str = "gaussian", n: int = 100, replicates: int = 200, seed: int = 0) -> Preset:
    """Coverage study: p = 30 with 9 true zeros.

    Bernoulli uses lasso-type noise with n_e = n and lambda * n_e = 3; every
    other family uses l0 noise with n_e = 9 and lambda = n / 10.
    """
    key = canonical_name(family)
    if key not in COVERAGE_LAWS:
        raise ConfigError(f"Unknown coverage family: {family}. Available: {list(COVERAGE_LAWS)}")
    fam = get_family(key, nb_failures=DEFAULT_NB_FAILURES if key == "negative_binomial" else None)
    design = SimDesign(
        family=fam, n=n, p=COVERAGE_P, beta_true=coverage_beta(),
        predictor_law=COVERAGE_LAWS[fam.name], sigma=1.0, replicates=replicates, seed=seed,
    )
    if fam.name == "bernoulli":
        scheme = get_scheme("lasso", lam=3.0 / n)
        config = PandaConfig(n_e=n, **L0_MODE)
    else:
        scheme = get_scheme("l0", lam=n / 10.0)
        config = PandaConfig(n_e=len(COVERAGE_ZERO_INDEX), **L0_MODE)
    return Preset(name=f"table3-{fam.name}-n{n}", design=design, scheme=scheme, config=config)


def _comparison_preset(
    name: str,
    design: SimDesign,
    scheme_name: str,
    folds: int,
) -> Preset:
    if scheme_name not in COMPARISON_SCHEMES:
        raise ConfigError(f"Unknown comparison scheme: {scheme_name}. Available: {list(COMPARISON_SCHEMES)}")

    if scheme_name == "l0":
        scheme = get_scheme("l0", lam=L0_LAMBDA)
        config = PandaConfig(n_e=design.p, **L0_MODE)
        grid = TuneGrid(scheme, n_e_values=tuple(range(1, design.p + 1)), folds=folds)
        return Preset(name=name, design=design, scheme=scheme, config=config, tune_grid=grid, with_inference=False)

    lambda_ne = LAMBDA_NE_GRIDS[scheme_name]
    lam = lambda_ne[0] / LARGE_NE["n_e"]
    extras = {}
    if scheme_name == "adaptive_lasso":
        # placeholder pilot; each replicate substitutes its own un-penalized fit
        template = get_scheme(scheme_name, lam=lam, gamma=DEFAULT_ADAPTIVE_GAMMA, pilot=np.ones(design.p))
    elif scheme_name == "elastic_net":
        template = get_scheme(scheme_name, lam=lam, sigma2=EN_SIGMA2_RATIO * lam)
        extras["sigma2_ratio"] = EN_SIGMA2_RATIO
    elif scheme_name == "scad":
        template = get_scheme(scheme_name, lam=lam, a=DEFAULT_SCAD_A)
    else:
        template = get_scheme(scheme_name, lam=lam)

    config = PandaConfig(**LARGE_NE)
    grid = TuneGrid(template, lambda_ne_values=lambda_ne, folds=folds, **extras)
    return Preset(name=name, design=design, scheme=template, config=config, tune_grid=grid, with_inference=False)


def table4(
    scheme: str = "scad",
    n: int = 60,
    sigma: float = 1.0,
    replicates: int = 100,
    seed: int = 0,
    folds: int = DEFAULT_FOLDS,
) -> Preset:
    """Linear regression, beta = (3, 1.5, 0, 0, 2, 0, 0, 0), AR(1) predictors with rho = 0.5."""
    design = SimDesign(
        family=get_family("gaussian", dispersion=sigma ** 2), n=n, p=len(COMPARISON_BETA),
        beta_true=COMPARISON_BETA, predictor_law=AR1Normal(0.5), sigma=sigma,
        replicates=replicates, seed=seed,
    )
    return _comparison_preset(f"table4-{scheme}-n{n}-sigma{sigma:g}", design, scheme, folds)


def table5(scheme: str = "scad", n: int = 200, replicates: int = 100, seed: int = 0, folds: int = DEFAULT_FOLDS) -> Preset:
    """Logistic regression with six AR(1) normal and two Bernoulli(0.5) predictors."""
    design = SimDesign(
        family=get_family("bernoulli"), n=n, p=len(COMPARISON_BETA),
        beta_true=COMPARISON_BETA, predictor_law=BernoulliHalfMixed(0.5, 2),
        replicates=replicates, seed=seed,
    )
    return _comparison_preset(f"table5-{scheme}-n{n}", design, scheme, folds)


PRESETS = {"table3": table3, "table4": table4, "table5": table5}


def get_preset(name: str, **kwargs) -> Preset:
    """Factory for presets; keyword arguments go to the preset builder."""
    key = name.strip().lower()
    if key not in PRESETS:
        raise ConfigError(f"Unknown preset: {name}. Available: {list(PRESETS)}")
    return PRESETS[key](**{k: v for k, v in kwargs.items() if v is not None})
