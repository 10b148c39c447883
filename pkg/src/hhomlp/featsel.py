"""Wrapper feature selection driven by the Harris Hawks Optimizer.

Hawks search the unit cube ``[0, 1]^D``.  A position becomes a feature
mask by thresholding at 0.5; its cost is

    alpha * error + beta_fs * (selected / D)

where ``error`` is the validation error of a classifier trained on the
selected columns only.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted, check_X_y

from ._validation import check_binary_labels
from .data import DataError, Dataset, SplitSpec, split_indices
from .hho import Bounds, SwarmConfig, optimize
from .mlp import MlpTopology, forward
from .train import MseObjective

__all__ = [
    "CostWeights",
    "MlpErrorEstimator",
    "SelectionResult",
    "binarize_position",
    "cost_ids",
    "select_features",
    "save_mask",
    "load_mask",
    "HHOFeatureSelector",
]

InnerEval = Callable[[np.ndarray, np.ndarray, np.ndarray, np.ndarray], float]


@dataclass(frozen=True)
class CostWeights:
    alpha: float = 0.99
    beta_fs: float = 0.01

    def __post_init__(self):
        if not (0 <= self.alpha <= 1 and 0 <= self.beta_fs <= 1):
            raise ValueError("alpha and beta_fs must lie in [0, 1]")
        if abs(self.alpha + self.beta_fs - 1.0) > 1e-12:
            raise ValueError(f"alpha + beta_fs must equal 1, got {self.alpha + self.beta_fs}")

    @classmethod
    def from_beta(cls, beta_fs: float) -> "CostWeights":
        return cls(1.0 - beta_fs, beta_fs)


def binarize_position(position, threshold: float = 0.5) -> np.ndarray:
    """Bits set where ``position >= threshold``; never returns an empty mask.

    An all-zero result is repaired by switching on the coordinate with the
    largest value (the first one on ties).
    """
    position = np.asarray(position, dtype=float)
    mask = position >= threshold
    if not mask.any():
        mask[int(np.argmax(position))] = True
    return mask


def cost_ids(error_rate: float, mask, weights: CostWeights = CostWeights()) -> float:
    mask = np.asarray(mask, dtype=bool)
    if not 0 <= error_rate <= 1:
        raise ValueError(f"error_rate must lie in [0, 1], got {error_rate}")
    return weights.alpha * error_rate + weights.beta_fs * (mask.sum() / mask.size)


class MlpErrorEstimator:
    """Default inner classifier: a small HHO-trained MLP.

    Called as ``est(X_fit, y_fit, X_val, y_val)`` and returns the
    misclassification rate on the validation rows.  The inner optimizer
    always starts from ``seed``, so a given mask always scores the same.
    """

    def __init__(self, hidden_layers=(5, 5), population_size=5, max_iterations=10,
                 weight_bounds=(-10.0, 10.0), seed=0, threshold=0.5):
        self.hidden_layers = tuple(hidden_layers)
        self.population_size = population_size
        self.max_iterations = max_iterations
        self.weight_bounds = weight_bounds
        self.seed = seed
        self.threshold = threshold

    def __call__(self, X_fit, y_fit, X_val, y_val) -> float:
        topology = MlpTopology(X_fit.shape[1], self.hidden_layers, 1)
        objective = MseObjective(topology, X_fit, y_fit)
        lo, hi = self.weight_bounds
        result = optimize(objective, SwarmConfig(self.population_size, self.max_iterations, self.seed),
                          Bounds.uniform(lo, hi, objective.dim))
        pred = forward(topology, result.best_position, X_val)[:, 0] >= self.threshold
        return float(np.mean(pred.astype(int) != np.asarray(y_val).astype(int)))


class SelectionResult(NamedTuple):
    mask: np.ndarray
    cost: float
    history: list[float]
    error: float


def select_features(dataset: Dataset, swarm: SwarmConfig = SwarmConfig(),
                    weights: CostWeights = CostWeights(), inner_eval: InnerEval | None = None,
                    validation_fraction: float = 0.3) -> SelectionResult:
    """Run HHO over feature masks of ``dataset``.

    ``dataset`` (normally the training partition) is split again, stratified
    and seeded by ``swarm.seed``, into fitting and validation rows for the
    inner classifier.  Costs are cached per mask, so repeated masks cost
    nothing.
    """
    if dataset.n_features < 1:
        raise DataError("dataset has no features")
    if inner_eval is None:
        inner_eval = MlpErrorEstimator(seed=swarm.seed)
    fit_idx, val_idx = split_indices(dataset.y, SplitSpec(1.0 - validation_fraction, True, swarm.seed))
    X_fit, y_fit = dataset.X[fit_idx], dataset.y[fit_idx]
    X_val, y_val = dataset.X[val_idx], dataset.y[val_idx]

    cache: dict[bytes, tuple[float, float]] = {}

    def evaluate_mask(mask):
        key = np.packbits(mask).tobytes()
        if key not in cache:
            err = float(inner_eval(X_fit[:, mask], y_fit, X_val[:, mask], y_val))
            cache[key] = (cost_ids(err, mask, weights), err)
        return cache[key]

    def objective(position):
        return evaluate_mask(binarize_position(position))[0]

    objective.dim = dataset.n_features
    result = optimize(objective, swarm, Bounds.uniform(0.0, 1.0, dataset.n_features))
    mask = binarize_position(result.best_position)
    cost, err = evaluate_mask(mask)
    return SelectionResult(mask, cost, result.history, err)


def save_mask(mask, feature_names, path) -> None:
    """Write ``feature,selected`` rows, one per feature, in column order."""
    mask = np.asarray(mask, dtype=bool)
    if mask.size != len(feature_names):
        raise ValueError(f"{mask.size} bits for {len(feature_names)} feature names")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["feature", "selected"])
    writer.writerows((name, int(bit)) for name, bit in zip(feature_names, mask))
    Path(path).write_text(buf.getvalue())


def load_mask(path, feature_names=None) -> np.ndarray:
    """Read a mask file; with ``feature_names`` the names must match in order."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"mask file not found: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["feature", "selected"]:
        raise DataError(f"{path}: missing 'feature,selected' header")
    names, bits = [], []
    for lineno, row in enumerate(rows[1:], 2):
        if len(row) != 2 or row[1] not in ("0", "1"):
            raise DataError(f"{path}:{lineno}: expected 'name,0|1', got {row}")
        names.append(row[0])
        bits.append(row[1] == "1")
    if feature_names is not None and list(feature_names) != names:
        raise DataError(f"{path}: feature names do not match the dataset")
    mask = np.array(bits, dtype=bool)
    if not mask.any():
        raise DataError(f"{path}: mask selects no features")
    return mask


class HHOFeatureSelector(SelectorMixin, BaseEstimator):
    """Select features with HHO wrapped around an inner classifier.

    Parameters
    ----------
    population_size, max_iterations : int
        Outer swarm budget.
    beta_fs : float, default=0.01
        Weight of the selected-feature ratio in the cost; ``alpha = 1 - beta_fs``.
    validation_fraction : float, default=0.3
    inner_eval : callable, optional
        ``(X_fit, y_fit, X_val, y_val) -> error``; defaults to
        :class:`MlpErrorEstimator`.
    random_state : int, default=0
    """

    def __init__(self, population_size=10, max_iterations=30, beta_fs=0.01,
                 validation_fraction=0.3, inner_eval=None, random_state=0):
        self.population_size = population_size
        self.max_iterations = max_iterations
        self.beta_fs = beta_fs
        self.validation_fraction = validation_fraction
        self.inner_eval = inner_eval
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        y = check_binary_labels(y)
        if self.beta_fs == 0:
            warnings.warn("beta_fs=0: the number of selected features is unconstrained", stacklevel=2)
        self.n_features_in_ = X.shape[1]
        names = [f"x{j}" for j in range(X.shape[1])]
        result = select_features(
            Dataset(X, y, names),
            SwarmConfig(self.population_size, self.max_iterations, self.random_state),
            CostWeights.from_beta(self.beta_fs),
            self.inner_eval,
            self.validation_fraction,
        )
        self.support_ = result.mask
        self.cost_ = result.cost
        self.error_ = result.error
        self.history_ = result.history
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "support_")
        return self.support_
