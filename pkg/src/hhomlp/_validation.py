"""Input checks shared by the estimators and the functional API."""

from __future__ import annotations

import numpy as np


def check_feature_range(feature_range) -> tuple[float, float]:
    na, nb = (float(v) for v in feature_range)
    if not na < nb:
        raise ValueError(f"feature_range must satisfy Na < Nb, got ({na}, {nb})")
    return na, nb


def check_binary_labels(y) -> np.ndarray:
    y = np.asarray(y).ravel()
    values = set(np.unique(y).tolist())
    if not values <= {0, 1}:
        raise ValueError(f"labels must be 0/1, got values {sorted(values)[:5]}")
    return y.astype(int)


def check_mask(mask, n_features: int) -> np.ndarray:
    mask = np.asarray(mask)
    if mask.shape != (n_features,):
        raise ValueError(f"mask has shape {mask.shape}, expected ({n_features},)")
    if not np.all((mask == 0) | (mask == 1)):
        raise ValueError("mask entries must be 0 or 1")
    mask = mask.astype(bool)
    if not mask.any():
        raise ValueError("mask selects no features")
    return mask


def check_normalized(X, feature_range=(0.0, 1.0), atol: float = 1e-9) -> None:
    na, nb = check_feature_range(feature_range)
    X = np.asarray(X, dtype=float)
    if X.size and (X.min() < na - atol or X.max() > nb + atol):
        raise ValueError(
            f"inputs must be normalized to [{na}, {nb}]; found range "
            f"[{X.min():.6g}, {X.max():.6g}]"
        )
