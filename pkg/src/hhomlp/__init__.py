"""Intrusion detection with an MLP whose weights, and the input features it
uses, are chosen by the Harris Hawks Optimizer."""

__version__ = "0.1.0"

from .data import DataError, Dataset, SplitSpec, load_csv, normalize, prepare, split  # noqa: E402
from .featsel import CostWeights, HHOFeatureSelector, select_features  # noqa: E402
from .hho import Bounds, SwarmConfig, optimize  # noqa: E402
from .metrics import ConfusionCounts, MetricsReport  # noqa: E402
from .mlp import MlpTopology  # noqa: E402
from .train import HHOMLPClassifier, TrainConfig, TrainedModel, evaluate, train  # noqa: E402

__all__ = [
    "__version__",
    "Bounds",
    "ConfusionCounts",
    "CostWeights",
    "DataError",
    "Dataset",
    "HHOFeatureSelector",
    "HHOMLPClassifier",
    "MetricsReport",
    "MlpTopology",
    "SplitSpec",
    "SwarmConfig",
    "TrainConfig",
    "TrainedModel",
    "evaluate",
    "load_csv",
    "normalize",
    "optimize",
    "prepare",
    "select_features",
    "split",
    "train",
]
