"""Sampling augmentation rows and building augmented datasets."""
from dataclasses import dataclass

import numpy as np

from families import GlmFamily
from models.data import CoefVector, Dataset
from utils.errors import DimensionError, UnderAugmentationError
from .base import NoiseScheme


@dataclass(frozen=True, eq=False)
class NoiseBatch:
    """One draw of n_e augmentation rows and the state it was drawn at."""

    e_x: np.ndarray
    e_y: np.ndarray
    scheme_snapshot: NoiseScheme
    theta_snapshot: CoefVector

    def __post_init__(self):
        for attr in ("e_x", "e_y"):
            a = np.array(getattr(self, attr), dtype=float, copy=True)
            a.setflags(write=False)
            object.__setattr__(self, attr, a)

    @property
    def n_e(self) -> int:
        return self.e_x.shape[0]

    def gram(self) -> np.ndarray:
        """e_x^T e_x, the realized penalty matrix of this batch."""
        return self.e_x.T @ self.e_x


def sample_batch(
    scheme: NoiseScheme,
    theta: CoefVector,
    n_e: int,
    family: GlmFamily,
    y: np.ndarray,
    rng: np.random.Generator,
) -> NoiseBatch:
    """Draw n_e noise rows from the scheme's Gaussian law at theta.

    Args:
        scheme: Noise generating distribution
        theta: Current (moving-average) coefficients
        n_e: Number of rows
        family: Response family; decides the pseudo-responses
        y: Observed responses
        rng: Caller-provided generator

    Returns:
        NoiseBatch with e_x of shape (n_e, p)
    """
    factor = scheme.noise_factor(theta, n_e)
    p = theta.p
    if factor.ndim == 1:
        e_x = rng.standard_normal((n_e, p)) * factor
    else:
        e_x = rng.standard_normal((n_e, factor.shape[1])) @ factor.T
    e_y = family.pseudo_response(np.asarray(y, dtype=float), n_e, rng)
    return NoiseBatch(e_x=e_x, e_y=e_y, scheme_snapshot=scheme, theta_snapshot=theta)


def augment(data: Dataset, batch: NoiseBatch) -> Dataset:
    """Stack observed rows on top of the noise rows."""
    if batch.e_x.shape[1] != data.p:
        raise DimensionError(f"noise has {batch.e_x.shape[1]} columns, data has {data.p}")
    if data.n + batch.n_e <= data.p:
        raise UnderAugmentationError(
            f"augmented data has {data.n + batch.n_e} rows for {data.p} predictors; "
            "increase n_e so that n + n_e > p"
        )
    return Dataset(
        X=np.vstack((data.X, batch.e_x)),
        y=np.concatenate((data.y, batch.e_y)),
        column_names=data.column_names,
    )
