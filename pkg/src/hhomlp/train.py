"""Training an MLP by letting the Harris Hawks Optimizer pick its weights.

Each hawk is a flat weight+bias vector (layout in :mod:`hhomlp.mlp`); its
fitness is the mean squared error of the decoded network on the training
rows.  There is no gradient step anywhere.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._validation import check_binary_labels, check_mask, check_normalized
from .data import DataError, Dataset, NormStats
from .hho import Bounds, SwarmConfig, optimize
from .metrics import MetricsReport, evaluate_outputs
from .mlp import MlpTopology, decode_params, forward, parameter_count, sigmoid

__all__ = [
    "MseObjective",
    "TrainConfig",
    "TrainedModel",
    "train",
    "evaluate",
    "save_model",
    "load_model",
    "HHOMLPClassifier",
]

MODEL_FORMAT = "hhomlp-model/1"


class MseObjective:
    """Training-set MSE of the network encoded by a flat parameter vector."""

    def __init__(self, topology: MlpTopology, X, y):
        self.topology = topology
        self.X = np.ascontiguousarray(X, dtype=float)
        self.y = np.asarray(y, dtype=float).reshape(len(self.X), -1)
        if len(self.X) == 0:
            raise ValueError("empty training set")
        if self.X.shape[1] != topology.input_size:
            raise ValueError(
                f"topology expects {topology.input_size} inputs, data has {self.X.shape[1]} columns"
            )
        self.dim = parameter_count(topology)

    def __call__(self, flat) -> float:
        a = self.X
        for W, b in decode_params(self.topology, flat):
            a = sigmoid(a @ W.T + b)
        return float(np.mean((a - self.y) ** 2))


@dataclass(frozen=True)
class TrainConfig:
    """``topology=None`` builds ``hidden_layers`` on top of the data width."""

    topology: MlpTopology | None = None
    swarm: SwarmConfig = field(default_factory=SwarmConfig)
    weight_bounds: tuple[float, float] = (-10.0, 10.0)
    feature_mask: np.ndarray | None = None
    hidden_layers: tuple[int, ...] = (5, 5)

    def resolve_topology(self, n_inputs: int) -> MlpTopology:
        if self.topology is None:
            return MlpTopology(n_inputs, tuple(self.hidden_layers), 1)
        if self.topology.input_size != n_inputs:
            raise ValueError(
                f"topology has {self.topology.input_size} inputs but the (masked) data has {n_inputs} features"
            )
        return self.topology


@dataclass(frozen=True)
class TrainedModel:
    topology: MlpTopology
    params: np.ndarray
    feature_names: tuple[str, ...]
    feature_mask: np.ndarray | None
    norm_stats: NormStats | None
    history: tuple[float, ...] = ()
    threshold: float = 0.5

    def _masked(self, dataset: Dataset) -> Dataset:
        if self.feature_mask is None:
            if dataset.n_features != self.topology.input_size:
                raise DataError(
                    f"model expects {self.topology.input_size} features, dataset has {dataset.n_features}"
                )
            return dataset
        if dataset.n_features != self.feature_mask.size:
            raise DataError(
                f"feature mask has {self.feature_mask.size} bits, dataset has {dataset.n_features} features"
            )
        return dataset.select_features(self.feature_mask)

    def predict_proba(self, dataset: Dataset) -> np.ndarray:
        return forward(self.topology, self.params, self._masked(dataset).X)[:, 0]

    def predict(self, dataset: Dataset) -> np.ndarray:
        return (self.predict_proba(dataset) >= self.threshold).astype(int)

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "topology": self.topology.to_dict(),
            "params": self.params.tolist(),
            "feature_names": list(self.feature_names),
            "feature_mask": None if self.feature_mask is None else self.feature_mask.astype(int).tolist(),
            "norm_stats": None if self.norm_stats is None else self.norm_stats.to_dict(),
            "norm_digest": None if self.norm_stats is None else self.norm_stats.digest(),
            "history": list(self.history),
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedModel":
        if d.get("format") != MODEL_FORMAT:
            raise DataError(f"unsupported model format {d.get('format')!r}")
        stats = NormStats.from_dict(d["norm_stats"]) if d.get("norm_stats") else None
        if stats is not None and d.get("norm_digest") not in (None, stats.digest()):
            raise DataError("model file is corrupt: normalization digest mismatch")
        mask = d.get("feature_mask")
        return cls(
            topology=MlpTopology.from_dict(d["topology"]),
            params=np.array(d["params"], dtype=float),
            feature_names=tuple(d["feature_names"]),
            feature_mask=None if mask is None else np.array(mask, dtype=bool),
            norm_stats=stats,
            history=tuple(d.get("history", ())),
            threshold=float(d.get("threshold", 0.5)),
        )


def train(dataset: Dataset, config: TrainConfig = TrainConfig()) -> TrainedModel:
    """Fit MLP weights with HHO on a normalized dataset.

    The optional ``config.feature_mask`` is applied before training and
    stored in the model so evaluation applies the same columns.
    """
    if dataset.norm_stats is None:
        raise DataError("dataset is not normalized; run it through data.normalize first")
    try:
        check_normalized(dataset.X, dataset.norm_stats.feature_range)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    mask = None
    data = dataset
    if config.feature_mask is not None:
        try:
            mask = check_mask(config.feature_mask, dataset.n_features)
        except ValueError as exc:
            raise DataError(str(exc)) from None
        data = dataset.select_features(mask)
    topology = config.resolve_topology(data.n_features)
    lo, hi = config.weight_bounds
    objective = MseObjective(topology, data.X, data.y)
    result = optimize(objective, config.swarm, Bounds.uniform(lo, hi, objective.dim))
    return TrainedModel(
        topology=topology,
        params=result.best_position,
        feature_names=dataset.feature_names,
        feature_mask=mask,
        norm_stats=dataset.norm_stats,
        history=tuple(result.history),
    )


def evaluate(model: TrainedModel, dataset: Dataset) -> MetricsReport:
    """Metrics of ``model`` on ``dataset``.

    The dataset must carry the same normalization statistics the model was
    trained with and the full (unmasked) feature set.
    """
    if model.norm_stats is not None:
        if dataset.norm_stats is None or dataset.norm_stats.digest() != model.norm_stats.digest():
            raise DataError("dataset normalization statistics do not match the model's")
    if tuple(dataset.feature_names) != tuple(model.feature_names):
        raise DataError("dataset feature names do not match the model's")
    outputs = model.predict_proba(dataset)
    return evaluate_outputs(outputs, dataset.y, model.threshold)


def save_model(model: TrainedModel, path) -> str:
    """Write the model as JSON; returns the SHA-256 of the bytes written."""
    data = (json.dumps(model.to_dict(), sort_keys=True, indent=1) + "\n").encode()
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def load_model(path) -> TrainedModel:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"model file not found: {path}")
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a model file ({exc})") from None
    return TrainedModel.from_dict(d)


class HHOMLPClassifier(ClassifierMixin, BaseEstimator):
    """Binary MLP classifier whose weights are found by Harris Hawks Optimization.

    Parameters
    ----------
    hidden_layers : tuple of int, default=(5, 5)
        Neurons per hidden layer.
    population_size : int, default=10
        Number of hawks.
    max_iterations : int, default=30
        HHO iterations.
    weight_bound : float, default=10.0
        Every weight and bias is searched in ``[-weight_bound, weight_bound]``.
    threshold : float, default=0.5
        Output at or above this value is class 1.
    random_state : int or None, default=None
        Seed of the optimizer. ``None`` draws a fresh seed at fit time.

    Attributes
    ----------
    topology_ : MlpTopology
    coef_ : ndarray
        Flat weight+bias vector of the best hawk.
    history_ : list of float
        Best training MSE after each iteration.
    """

    def __init__(self, hidden_layers=(5, 5), population_size=10, max_iterations=30,
                 weight_bound=10.0, threshold=0.5, random_state=None):
        self.hidden_layers = hidden_layers
        self.population_size = population_size
        self.max_iterations = max_iterations
        self.weight_bound = weight_bound
        self.threshold = threshold
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        y = check_binary_labels(y)
        seed = self.random_state
        if seed is None:
            seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
        self.classes_ = np.array([0, 1])
        self.n_features_in_ = X.shape[1]
        self.topology_ = MlpTopology(X.shape[1], tuple(self.hidden_layers), 1)
        objective = MseObjective(self.topology_, X, y)
        bound = float(self.weight_bound)
        result = optimize(
            objective,
            SwarmConfig(self.population_size, self.max_iterations, int(seed)),
            Bounds.uniform(-bound, bound, objective.dim),
        )
        self.coef_ = result.best_position
        self.history_ = list(result.history)
        self.seed_ = int(seed)
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        p = forward(self.topology_, self.coef_, X)[:, 0]
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return (self.predict_proba(X)[:, 1] >= self.threshold).astype(int)
