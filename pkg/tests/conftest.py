import numpy as np
import pandas as pd
import pytest

from models import Dataset


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def gaussian_data(rng):
    n, p = 60, 4
    X = rng.standard_normal((n, p))
    beta = np.array([1.5, 0.0, -1.0, 0.0])
    y = 0.5 + X @ beta + 0.5 * rng.standard_normal(n)
    return Dataset(X=X, y=y)


@pytest.fixture
def poisson_data(rng):
    n, p = 120, 3
    X = rng.uniform(-1.0, 1.0, size=(n, p))
    eta = 0.3 + X @ np.array([0.8, 0.0, -0.5])
    y = rng.poisson(np.exp(eta)).astype(float)
    return Dataset(X=X, y=y)


@pytest.fixture
def write_csv(tmp_path):
    """Write a DataFrame (or dict of columns) to a CSV under tmp_path."""

    def _write(name, columns):
        frame = columns if isinstance(columns, pd.DataFrame) else pd.DataFrame(columns)
        path = tmp_path / name
        frame.to_csv(path, index=False)
        return path

    return _write
