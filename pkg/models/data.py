"""Datasets and coefficient vectors."""
from dataclasses import dataclass, field

import numpy as np

from utils.errors import DataError, DimensionError

CENTER_TOL = 1e-10


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CoefVector:
    """Intercept theta0 and slopes theta of a linear predictor."""

    intercept: float
    slopes: np.ndarray

    def __post_init__(self):
        slopes = _frozen(np.atleast_1d(self.slopes))
        if slopes.ndim != 1:
            raise DimensionError(f"slopes must be one-dimensional, got shape {slopes.shape}")
        if not np.isfinite(self.intercept) or not np.all(np.isfinite(slopes)):
            raise DataError("coefficients must be finite")
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "slopes", slopes)

    @property
    def p(self) -> int:
        return self.slopes.shape[0]

    def as_array(self) -> np.ndarray:
        """Return (theta0, theta_1, ..., theta_p)."""
        return np.concatenate(([self.intercept], self.slopes))

    @classmethod
    def from_array(cls, values: np.ndarray) -> "CoefVector":
        values = np.asarray(values, dtype=float)
        return cls(intercept=values[0], slopes=values[1:])

    @classmethod
    def zeros(cls, p: int) -> "CoefVector":
        return cls(intercept=0.0, slopes=np.zeros(p))

    def linear_predictor(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.p:
            raise DimensionError(f"design has {X.shape[1]} columns, coefficients have {self.p}")
        return self.intercept + X @ self.slopes

    def to_dict(self) -> dict:
        return {"intercept": self.intercept, "slopes": self.slopes.tolist()}


@dataclass(frozen=True, eq=False)
class Dataset:
    """Predictor matrix X (n x p), response y and column labels.

    ``x_means`` holds the column means removed by ``center()``; it is all
    zeros for data that were never centered.
    """

    X: np.ndarray
    y: np.ndarray
    column_names: tuple[str, ...] = ()
    centered: bool = False
    x_means: np.ndarray = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or y.ndim != 1:
            raise DimensionError(f"expected 2-D X and 1-D y, got {X.shape} and {y.shape}")
        n, p = X.shape
        if n < 1 or p < 1:
            raise DataError(f"dataset needs n >= 1 and p >= 1, got n={n}, p={p}")
        if y.shape[0] != n:
            raise DimensionError(f"X has {n} rows but y has {y.shape[0]} entries")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(y)):
            raise DataError("dataset contains non-finite values")

        names = tuple(self.column_names) or tuple(f"x{j + 1}" for j in range(p))
        if len(names) != p:
            raise DimensionError(f"{len(names)} column names for {p} columns")

        means = np.zeros(p) if self.x_means is None else np.asarray(self.x_means, dtype=float)
        if self.centered and np.any(np.abs(X.mean(axis=0)) > CENTER_TOL * max(1.0, np.abs(X).max())):
            raise DataError("dataset flagged as centered but column means are not zero")

        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y))
        object.__setattr__(self, "column_names", names)
        object.__setattr__(self, "x_means", _frozen(means))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def center(self) -> "Dataset":
        """Return a copy with column-centered X; already-centered data is returned as is."""
        if self.centered:
            return self
        means = self.X.mean(axis=0)
        return Dataset(
            X=self.X - means,
            y=self.y,
            column_names=self.column_names,
            centered=True,
            x_means=self.x_means + means,
        )

    def apply_centering(self, X: np.ndarray) -> np.ndarray:
        """Shift raw predictors by the column means removed from this dataset."""
        return np.asarray(X, dtype=float) - self.x_means

    def subset(self, rows: np.ndarray) -> "Dataset":
        """Return the given rows of the raw (uncentered) data."""
        X_raw = self.X + self.x_means
        return Dataset(X=X_raw[rows], y=self.y[rows], column_names=self.column_names)

    def permuted(self, order: np.ndarray) -> "Dataset":
        return Dataset(
            X=self.X[order],
            y=self.y[order],
            column_names=self.column_names,
            centered=self.centered,
            x_means=self.x_means,
        )
