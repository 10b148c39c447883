"""Detection metrics over a binary confusion matrix.

Rates with an empty denominator (no positive rows for sensitivity, no
negative rows for specificity) are reported as ``None`` and written as
``NA``; they are never silently turned into 0.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

__all__ = [
    "NA",
    "ConfusionCounts",
    "MetricsReport",
    "accuracy",
    "sensitivity",
    "specificity",
    "mse",
    "rmse",
    "evaluate_outputs",
]

NA = "NA"

METRIC_COLUMNS = ("accuracy", "sensitivity", "specificity", "mse", "rmse")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_labels(cls, y_true, y_pred) -> "ConfusionCounts":
        y_true = np.asarray(y_true).astype(int).ravel()
        y_pred = np.asarray(y_pred).astype(int).ravel()
        if y_true.shape != y_pred.shape:
            raise ValueError(f"length mismatch: {y_true.size} labels vs {y_pred.size} predictions")
        return cls(
            tp=int(np.sum((y_true == 1) & (y_pred == 1))),
            tn=int(np.sum((y_true == 0) & (y_pred == 0))),
            fp=int(np.sum((y_true == 0) & (y_pred == 1))),
            fn=int(np.sum((y_true == 1) & (y_pred == 0))),
        )


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise ValueError("accuracy of an empty confusion matrix is undefined")
    return (c.tp + c.tn) / c.total


def sensitivity(c: ConfusionCounts) -> float | None:
    """True-positive rate among intrusions, ``None`` without positive rows."""
    if c.tp + c.fn == 0:
        return None
    return c.tp / (c.tp + c.fn)


def specificity(c: ConfusionCounts) -> float | None:
    """True-negative rate among normal rows, ``None`` without negative rows."""
    if c.tn + c.fp == 0:
        return None
    return c.tn / (c.tn + c.fp)


def _residuals(predictions, labels) -> np.ndarray:
    p = np.asarray(predictions, dtype=float).ravel()
    y = np.asarray(labels, dtype=float).ravel()
    if p.size == 0:
        raise ValueError("mse of an empty vector is undefined")
    if p.shape != y.shape:
        raise ValueError(f"length mismatch: {p.size} predictions vs {y.size} labels")
    return p - y


def mse(predictions, labels) -> float:
    r = _residuals(predictions, labels)
    return float(np.mean(r * r))


def rmse(predictions, labels) -> float:
    return math.sqrt(mse(predictions, labels))


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    sensitivity: float | None
    specificity: float | None
    mse: float
    rmse: float
    counts: ConfusionCounts

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in METRIC_COLUMNS}
        d["counts"] = asdict(self.counts)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(**{k: d[k] for k in METRIC_COLUMNS}, counts=ConfusionCounts(**d["counts"]))

    def csv_row(self, run_id: str | None = None) -> list[str]:
        values = [NA if v is None else repr(float(v)) for v in (getattr(self, k) for k in METRIC_COLUMNS)]
        return ([run_id] if run_id is not None else []) + values

    def to_csv(self, run_id: str = "run", header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(["run", *METRIC_COLUMNS])
        writer.writerow(self.csv_row(run_id))
        return buf.getvalue()

    def summary(self) -> str:
        def fmt(v):
            return NA if v is None else f"{v:.6f}"
        return "  ".join(f"{k}={fmt(getattr(self, k))}" for k in METRIC_COLUMNS)


def evaluate_outputs(outputs, labels, threshold: float = 0.5) -> MetricsReport:
    """Build a report from raw network outputs in (0, 1) and 0/1 labels."""
    outputs = np.asarray(outputs, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    predicted = (outputs >= threshold).astype(int)
    counts = ConfusionCounts.from_labels(labels, predicted)
    m = mse(outputs, labels)
    return MetricsReport(
        accuracy=accuracy(counts),
        sensitivity=sensitivity(counts),
        specificity=specificity(counts),
        mse=m,
        rmse=math.sqrt(m),
        counts=counts,
    )
