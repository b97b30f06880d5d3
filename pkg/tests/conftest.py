import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def synthetic_split():
    """Scaled 640/160 train/test arrays from the size-800 synthetic subset."""
    from qnnbench.data import (
        feature_matrix,
        gen_synthetic,
        minmax_apply,
        minmax_fit,
        subset_and_split,
        target_vector,
    )

    rows = gen_synthetic(1000, seed=11)
    split = subset_and_split(rows, 800, seed=11)
    X, y = feature_matrix(rows), target_vector(rows)
    scaler = minmax_fit(X[split.train_idx], y[split.train_idx])
    Xtr, ytr = minmax_apply(scaler, X[split.train_idx], y[split.train_idx])
    Xte, yte = minmax_apply(scaler, X[split.test_idx], y[split.test_idx])
    return scaler, Xtr, ytr, Xte, yte
