"""Predictor laws and simulation designs."""
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from config import DEFAULT_REPLICATES
from families import GaussianFamily, GlmFamily
from models import Dataset
from utils.errors import ConfigError, DimensionError
from utils.rng import derive_seed, make_rng


def ar1_correlation(p: int, rho: float) -> np.ndarray:
    """Correlation matrix with entries rho^|j - j'|."""
    idx = np.arange(p)
    return rho ** np.abs(idx[:, None] - idx[None, :])


class PredictorLaw(ABC):
    """Abstract base class for the distribution of one predictor row."""

    name: str = ""

    @abstractmethod
    def sample(self, n: int, p: int, rng: np.random.Generator) -> np.ndarray:
        """Draw an n x p predictor matrix."""
        pass

    @abstractmethod
    def mean(self, p: int) -> np.ndarray:
        pass

    @abstractmethod
    def covariance(self, p: int) -> np.ndarray:
        pass

    def second_moment(self, p: int) -> np.ndarray:
        """E[x x^T] = Cov(x) + E[x] E[x]^T."""
        mu = self.mean(p)
        return self.covariance(p) + np.outer(mu, mu)

    def to_dict(self) -> dict:
        return {"law": self.name}


class StdNormal(PredictorLaw):
    name = "std_normal"

    def sample(self, n: int, p: int, rng: np.random.Generator) -> np.ndarray:
        return rng.standard_normal((n, p))

    def mean(self, p: int) -> np.ndarray:
        return np.zeros(p)

    def covariance(self, p: int) -> np.ndarray:
        return np.eye(p)


class AR1Normal(PredictorLaw):
    """Standard normal predictors with corr(x_j, x_j') = rho^|j - j'|."""

    name = "ar1_normal"

    def __init__(self, rho: float = 0.5):
        if not -1.0 < rho < 1.0:
            raise ConfigError(f"AR(1) correlation must lie in (-1, 1), got {rho}")
        self.rho = float(rho)

    def sample(self, n: int, p: int, rng: np.random.Generator) -> np.ndarray:
        chol = np.linalg.cholesky(ar1_correlation(p, self.rho))
        return rng.standard_normal((n, p)) @ chol.T

    def mean(self, p: int) -> np.ndarray:
        return np.zeros(p)

    def covariance(self, p: int) -> np.ndarray:
        return ar1_correlation(p, self.rho)

    def to_dict(self) -> dict:
        return {"law": self.name, "rho": self.rho}


class Uniform(PredictorLaw):
    """Independent Unif(lo, hi) predictors."""

    name = "uniform"

    def __init__(self, lo: float, hi: float):
        if not lo < hi:
            raise ConfigError(f"uniform law needs lo < hi, got ({lo}, {hi})")
        self.lo, self.hi = float(lo), float(hi)

    def sample(self, n: int, p: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=(n, p))

    def mean(self, p: int) -> np.ndarray:
        return np.full(p, 0.5 * (self.lo + self.hi))

    def covariance(self, p: int) -> np.ndarray:
        return np.eye(p) * (self.hi - self.lo) ** 2 / 12.0

    def to_dict(self) -> dict:
        return {"law": self.name, "lo": self.lo, "hi": self.hi}


class BernoulliHalfMixed(PredictorLaw):
    """AR(1) normal columns followed by independent Bernoulli(0.5) columns."""

    name = "bernoulli_half_mixed"

    def __init__(self, rho: float = 0.5, n_binary: int = 2):
        if n_binary < 1:
            raise ConfigError(f"n_binary must be >= 1, got {n_binary}")
        self.normal = AR1Normal(rho)
        self.n_binary = int(n_binary)

    def _n_normal(self, p: int) -> int:
        if p <= self.n_binary:
            raise DimensionError(f"need p > {self.n_binary} columns for the mixed law, got {p}")
        return p - self.n_binary

    def sample(self, n: int, p: int, rng: np.random.Generator) -> np.ndarray:
        q = self._n_normal(p)
        normal = self.normal.sample(n, q, rng)
        binary = rng.binomial(1, 0.5, size=(n, self.n_binary)).astype(float)
        return np.hstack((normal, binary))

    def mean(self, p: int) -> np.ndarray:
        q = self._n_normal(p)
        return np.concatenate((np.zeros(q), np.full(self.n_binary, 0.5)))

    def covariance(self, p: int) -> np.ndarray:
        q = self._n_normal(p)
        cov = np.zeros((p, p))
        cov[:q, :q] = self.normal.covariance(q)
        cov[q:, q:] = 0.25 * np.eye(self.n_binary)
        return cov

    def to_dict(self) -> dict:
        return {"law": self.name, "rho": self.normal.rho, "n_binary": self.n_binary}


@dataclass(frozen=True, eq=False)
class SimDesign:
    """Data-generating design for simulation replicates.

    Args:
        family: Response family
        n: Training sample size
        p: Number of predictors
        beta_true: True slopes, length p
        predictor_law: Distribution of the predictor rows
        sigma: Noise standard deviation (Gaussian only)
        intercept: True intercept
        replicates: Number of replicates
        seed: Master seed; replicate i uses a stream derived from (seed, i)
        n_test: Size of the independent test set (default n)
    """

    family: GlmFamily
    n: int
    p: int
    beta_true: np.ndarray
    predictor_law: PredictorLaw
    sigma: float = 1.0
    intercept: float = 0.0
    replicates: int = DEFAULT_REPLICATES
    seed: int = 0
    n_test: int | None = None

    def __post_init__(self):
        beta = np.array(self.beta_true, dtype=float, copy=True)
        beta.setflags(write=False)
        object.__setattr__(self, "beta_true", beta)
        self.validate()

    def validate(self) -> None:
        if self.beta_true.shape != (self.p,):
            raise DimensionError(f"beta_true has shape {self.beta_true.shape}, expected ({self.p},)")
        if self.n < 1 or self.p < 1 or self.replicates < 1:
            raise ConfigError(f"n, p and replicates must be positive, got {self.n}, {self.p}, {self.replicates}")
        if not self.sigma > 0:
            raise ConfigError(f"sigma must be positive, got {self.sigma}")
        if self.n_test is not None and self.n_test < 1:
            raise ConfigError(f"n_test must be positive, got {self.n_test}")

    @property
    def test_size(self) -> int:
        return self.n if self.n_test is None else self.n_test

    @property
    def true_zero_mask(self) -> np.ndarray:
        return self.beta_true == 0.0

    def to_dict(self) -> dict:
        return {
            "family": self.family.to_dict(),
            "n": self.n,
            "p": self.p,
            "beta_true": self.beta_true.tolist(),
            "predictor_law": self.predictor_law.to_dict(),
            "sigma": self.sigma,
            "intercept": self.intercept,
            "replicates": self.replicates,
            "seed": self.seed,
            "n_test": self.test_size,
        }


def generate(design: SimDesign, replicate_index: int, test: bool = False) -> tuple[Dataset, np.ndarray]:
    """Draw one replicate (or its independent test set).

    The draw depends only on (design.seed, replicate_index, test).
    """
    rng = make_rng(derive_seed(design.seed, replicate_index, int(test)))
    n = design.test_size if test else design.n
    X = design.predictor_law.sample(n, design.p, rng)
    eta = design.intercept + X @ design.beta_true
    if isinstance(design.family, GaussianFamily):
        y = eta + design.sigma * rng.standard_normal(n)
    else:
        y = design.family.sample(eta, rng)
    return Dataset(X=X, y=y), design.beta_true.copy()
