"""Abstract base class for exponential-family response distributions."""
from abc import ABC, abstractmethod

import numpy as np

from utils.errors import ConfigError, DataError, DomainError


class GlmFamily(ABC):
    """Abstract base class for GLM response families.

    A family carries the log-partition function B of its natural parameter,
    the base measure h(y) and the map from the linear predictor eta to the
    natural parameter. For canonical families that map is the identity.

    Implement this class to add support for a new response distribution.
    """

    def __init__(self, dispersion: float = 1.0):
        """Initialize the family.

        Args:
            dispersion: Scale parameter. Only the Gaussian family uses a
                        value other than 1.
        """
        if not np.isfinite(dispersion) or dispersion <= 0:
            raise ConfigError(f"dispersion must be a positive real, got {dispersion}")
        self.dispersion = float(dispersion)

    @property
    @abstractmethod
    def name(self) -> str:
        """Return the family identifier."""
        pass

    @abstractmethod
    def _log_partition(self, theta: np.ndarray, order: int) -> np.ndarray:
        """Evaluate B or one of its first two derivatives at natural parameter theta."""
        pass

    @abstractmethod
    def log_base(self, y: np.ndarray) -> np.ndarray:
        """Return the base-measure term h(y) for each response."""
        pass

    def log_partition(self, eta, order: int = 0):
        """Evaluate B(eta), B'(eta) or B''(eta) on the natural-parameter scale.

        Args:
            eta: Natural parameter value(s)
            order: 0, 1 or 2

        Returns:
            Array of the same shape as eta (a float for scalar input)

        Raises:
            DomainError: If eta or the result is not finite
        """
        if order not in (0, 1, 2):
            raise ConfigError(f"order must be 0, 1 or 2, got {order}")
        theta = np.asarray(eta, dtype=float)
        if not np.all(np.isfinite(theta)):
            raise DomainError(f"{self.name}: non-finite natural parameter")
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            value = self._log_partition(theta, order)
        if not np.all(np.isfinite(value)):
            raise DomainError(
                f"{self.name}: log-partition of order {order} is not finite on the given input"
            )
        return float(value) if value.ndim == 0 else value

    def natural(self, eta: np.ndarray, order: int = 0) -> np.ndarray:
        """Map the linear predictor to the natural parameter (or its derivatives)."""
        eta = np.asarray(eta, dtype=float)
        if order == 0:
            return eta
        if order == 1:
            return np.ones_like(eta)
        return np.zeros_like(eta)

    def mean(self, eta: np.ndarray) -> np.ndarray:
        """Return E[y] at linear predictor eta."""
        return np.asarray(self.log_partition(self.natural(eta), 1), dtype=float)

    def weight(self, eta: np.ndarray) -> np.ndarray:
        """Return the expected information weight B''(phi) * phi'(eta)^2 / dispersion."""
        phi = self.natural(eta)
        curvature = np.asarray(self.log_partition(phi, 2), dtype=float)
        return curvature * self.natural(eta, 1) ** 2 / self.dispersion

    def score(self, y: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """Return d/d(eta) of the log-likelihood for each observation."""
        return (y - self.mean(eta)) * self.natural(eta, 1) / self.dispersion

    def nll_terms(self, y: np.ndarray, eta: np.ndarray) -> np.ndarray:
        """Return -[h(y) + phi*y - B(phi)] for each observation."""
        phi = self.natural(eta)
        return -(self.log_base(y) + phi * y - np.asarray(self.log_partition(phi, 0), dtype=float))

    def kappa(self, theta0: float) -> float:
        """Return the curvature constant used by the convergence z-test."""
        w = float(self.weight(np.asarray(theta0)) * self.dispersion)
        return 2.0 * w ** 2

    @property
    def loss_scale(self) -> float:
        """Factor that puts negative log-likelihood differences on the kappa scale."""
        return 1.0

    @property
    def eta_limit(self) -> float:
        """Largest |eta| an IRLS iterate may reach before it counts as diverged."""
        return 700.0

    def validate_response(self, y: np.ndarray) -> None:
        """Raise DataError if y is outside the family's support."""
        if not np.all(np.isfinite(y)):
            raise DataError(f"{self.name}: response contains non-finite values")

    def check_degenerate(self, y: np.ndarray, mu: np.ndarray) -> str | None:
        """Return a message if the fitted means signal a degenerate likelihood."""
        return None

    @abstractmethod
    def init_eta(self, y: np.ndarray) -> float:
        """Return a starting value for the intercept from the response mean."""
        pass

    def pseudo_response(self, y: np.ndarray, size: int, rng: np.random.Generator) -> np.ndarray:
        """Responses attached to augmentation rows: the observed mean repeated."""
        return np.full(size, float(np.mean(y)))

    @abstractmethod
    def sample(self, eta: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw responses at linear predictor eta."""
        pass

    def to_dict(self) -> dict:
        return {"family": self.name}

    def __repr__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.to_dict().items() if k != "family")
        return f"{type(self).__name__}({params})"
