"""Loading and preprocessing of KDD-style connection records.

Pipeline: read rows against a column schema, collapse labels to
normal (0) / intrusion (1), split into train and test, then fit the
categorical coding and the min-max statistics on the train rows only and
apply them to both partitions.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_feature_range

__all__ = [
    "DataError",
    "ColumnSpec",
    "Schema",
    "RawRecord",
    "NormStats",
    "Dataset",
    "SplitSpec",
    "ATTACK_FAMILIES",
    "load_schema",
    "builtin_schema",
    "load_csv",
    "binarize_labels",
    "CategoricalEncoder",
    "MinMaxNormalizer",
    "encode_categoricals",
    "fit_norm_stats",
    "normalize",
    "denormalize",
    "split_indices",
    "split",
    "prepare",
    "save_dataset",
    "load_dataset",
]

KINDS = ("numeric", "categorical", "label", "ignore")
_KIND_ALIASES = {"continuous": "numeric", "symbolic": "categorical"}

CACHE_FORMAT = "hhomlp-dataset/1"


class DataError(ValueError):
    """Malformed input data or inconsistent preprocessing state."""


ATTACK_FAMILIES: dict[str, str] = {
    # KDD Cup 99 and the NSL-KDD test additions
    **dict.fromkeys(
        ["back", "land", "neptune", "pod", "smurf", "teardrop", "apache2",
         "udpstorm", "processtable", "mailbomb"], "dos"),
    **dict.fromkeys(["satan", "ipsweep", "nmap", "portsweep", "mscan", "saint"], "probe"),
    **dict.fromkeys(
        ["guess_passwd", "ftp_write", "imap", "phf", "multihop", "warezmaster",
         "warezclient", "spy", "xlock", "xsnoop", "snmpguess", "snmpgetattack",
         "httptunnel", "sendmail", "named", "worm"], "r2l"),
    **dict.fromkeys(
        ["buffer_overflow", "loadmodule", "rootkit", "perl", "sqlattack", "xterm", "ps"], "u2r"),
    # UNSW-NB15 attack categories
    **dict.fromkeys(
        ["generic", "exploits", "fuzzers", "dos", "reconnaissance", "analysis",
         "backdoor", "backdoors", "shellcode", "worms"], "unsw"),
}

NORMAL_LABELS = frozenset({"normal", "0"})


@dataclass(frozen=True)
class ColumnSpec:
    name: str
    kind: str


@dataclass(frozen=True)
class Schema:
    columns: tuple[ColumnSpec, ...]

    def __post_init__(self):
        labels = [c for c in self.columns if c.kind == "label"]
        if len(labels) != 1:
            raise DataError(f"schema needs exactly one label column, found {len(labels)}")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("schema column names must be unique")

    @property
    def arity(self) -> int:
        return len(self.columns)

    @property
    def features(self) -> list[ColumnSpec]:
        return [c for c in self.columns if c.kind in ("numeric", "categorical")]

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.features]

    @property
    def categorical_names(self) -> list[str]:
        return [c.name for c in self.features if c.kind == "categorical"]

    @property
    def label_index(self) -> int:
        return next(i for i, c in enumerate(self.columns) if c.kind == "label")

    def to_text(self) -> str:
        return "".join(f"{c.name}: {c.kind}\n" for c in self.columns)


def _parse_schema(text: str, source: str) -> Schema:
    columns = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise DataError(f"{source}:{lineno}: expected 'name: kind', got {raw!r}")
        name, kind = (part.strip() for part in line.split(":", 1))
        kind = kind.rstrip(".").strip().lower()
        kind = _KIND_ALIASES.get(kind, kind)
        if kind not in KINDS:
            raise DataError(f"{source}:{lineno}: unknown column kind {kind!r}")
        columns.append(ColumnSpec(name, kind))
    return Schema(tuple(columns))


def load_schema(path) -> Schema:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"schema file not found: {path}")
    return _parse_schema(path.read_text(), str(path))


def builtin_schema(name: str = "kdd") -> Schema:
    """Bundled schema: ``kdd`` (41 features + label) or ``nsl_kdd``."""
    text = resources.files("hhomlp").joinpath(f"schemas/{name}.schema").read_text()
    return _parse_schema(text, name)


@dataclass(frozen=True)
class RawRecord:
    features: tuple
    label: str
    line: int = 0


def _clean_label(label: str) -> str:
    return label.strip().rstrip(".").lower()


def load_csv(path, schema: Schema, header: bool = False) -> list[RawRecord]:
    """Parse a comma-separated file into records.

    Numeric cells become floats, categorical cells stay strings and the
    label is lower-cased with KDD's trailing dot removed.  Blank lines are
    skipped; every other malformed row raises :class:`DataError` naming
    its line.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"data file not found: {path}")
    records = []
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if header and lineno == 1:
                continue
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != schema.arity:
                raise DataError(
                    f"{path}:{lineno}: expected {schema.arity} columns, got {len(row)}"
                )
            features = []
            label = None
            for spec, cell in zip(schema.columns, row):
                cell = cell.strip()
                if spec.kind == "numeric":
                    try:
                        features.append(float(cell))
                    except ValueError:
                        raise DataError(
                            f"{path}:{lineno}: column {spec.name!r} is not numeric: {cell!r}"
                        ) from None
                elif spec.kind == "categorical":
                    features.append(cell)
                elif spec.kind == "label":
                    label = _clean_label(cell)
            records.append(RawRecord(tuple(features), label, lineno))
    return records


def binarize_labels(labels, extra_attacks: Sequence[str] = ()) -> np.ndarray:
    """``normal`` -> 0, every known attack name -> 1.

    ``labels`` may be label strings or :class:`RawRecord` objects.  Labels
    that are neither normal nor a known attack raise :class:`DataError`.
    """
    names = [_clean_label(r.label if isinstance(r, RawRecord) else str(r)) for r in labels]
    attacks = set(ATTACK_FAMILIES) | {"1"} | {_clean_label(a) for a in extra_attacks}
    unknown = sorted({n for n in names if n not in NORMAL_LABELS and n not in attacks})
    if unknown:
        raise DataError(f"unknown label(s): {', '.join(unknown)}")
    return np.array([0 if n in NORMAL_LABELS else 1 for n in names], dtype=int)


class CategoricalEncoder(TransformerMixin, BaseEstimator):
    """Turn the categorical columns of a mixed object matrix into numbers.

    ``policy="ordinal"`` codes categories 0, 1, 2, ... in order of first
    appearance in the fitting rows; a category never seen during ``fit``
    is coded 0.  ``policy="onehot"`` expands each categorical column into
    one indicator per seen category (an unseen category gives all zeros).
    Numeric columns pass through unchanged.

    Parameters
    ----------
    categorical : sequence of int
        Indices of the categorical columns.
    feature_names : sequence of str, optional
        Input column names, used to build ``feature_names_out_``.
    policy : {"ordinal", "onehot"}
    """

    def __init__(self, categorical=(), feature_names=None, policy="ordinal"):
        self.categorical = categorical
        self.feature_names = feature_names
        self.policy = policy

    def fit(self, X, y=None):
        if self.policy not in ("ordinal", "onehot"):
            raise ValueError(f"unknown policy {self.policy!r}")
        X = np.asarray(X, dtype=object)
        if X.ndim != 2:
            raise ValueError("expected a 2-d array of rows")
        self.n_features_in_ = X.shape[1]
        self.categories_ = {}
        for j in self.categorical:
            seen = dict.fromkeys(str(v) for v in X[:, j])
            self.categories_[int(j)] = list(seen)
        names = list(self.feature_names) if self.feature_names is not None else [
            f"x{j}" for j in range(self.n_features_in_)]
        out = []
        for j, name in enumerate(names):
            if j in self.categories_ and self.policy == "onehot":
                out.extend(f"{name}={c}" for c in self.categories_[j])
            else:
                out.append(name)
        self.feature_names_out_ = out
        return self

    def transform(self, X):
        check_is_fitted(self, "categories_")
        X = np.asarray(X, dtype=object)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns")
        columns = []
        for j in range(self.n_features_in_):
            if j not in self.categories_:
                columns.append(X[:, j].astype(float)[:, None])
                continue
            lookup = {c: k for k, c in enumerate(self.categories_[j])}
            codes = np.array([lookup.get(str(v), -1) for v in X[:, j]])
            if self.policy == "ordinal":
                columns.append(np.where(codes < 0, 0, codes).astype(float)[:, None])
            else:
                onehot = np.zeros((len(X), len(lookup)))
                hit = codes >= 0
                onehot[np.flatnonzero(hit), codes[hit]] = 1.0
                columns.append(onehot)
        if not columns:
            return np.empty((len(X), 0))
        return np.hstack(columns)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "feature_names_out_")
        return np.asarray(self.feature_names_out_, dtype=object)


def encode_categoricals(records: Sequence[RawRecord], schema: Schema, policy: str = "ordinal",
                        encoder: CategoricalEncoder | None = None):
    """Numeric matrix, feature names and the (possibly newly fitted) encoder."""
    X = np.array([r.features for r in records], dtype=object).reshape(len(records), -1)
    if encoder is None:
        cat_idx = [i for i, c in enumerate(schema.features) if c.kind == "categorical"]
        encoder = CategoricalEncoder(cat_idx, schema.feature_names, policy).fit(X)
    return encoder.transform(X), list(encoder.feature_names_out_), encoder


@dataclass(frozen=True)
class NormStats:
    """Per-feature minimum and maximum seen in the fitting rows."""

    mins: np.ndarray
    maxs: np.ndarray
    feature_range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "mins", np.asarray(self.mins, dtype=float))
        object.__setattr__(self, "maxs", np.asarray(self.maxs, dtype=float))
        object.__setattr__(self, "feature_range", check_feature_range(self.feature_range))
        if self.mins.shape != self.maxs.shape:
            raise ValueError("mins and maxs differ in shape")

    @property
    def constant(self) -> np.ndarray:
        return self.maxs <= self.mins

    def to_dict(self) -> dict:
        return {
            "mins": self.mins.tolist(),
            "maxs": self.maxs.tolist(),
            "feature_range": list(self.feature_range),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        return cls(np.array(d["mins"], dtype=float), np.array(d["maxs"], dtype=float),
                   tuple(d["feature_range"]))

    def digest(self) -> str:
        return _digest(self.to_dict())

    def select(self, mask) -> "NormStats":
        mask = np.asarray(mask, dtype=bool)
        return NormStats(self.mins[mask], self.maxs[mask], self.feature_range)


class MinMaxNormalizer(TransformerMixin, BaseEstimator):
    """Linear rescaling of each feature from ``[min, max]`` onto ``feature_range``.

    Constant features (``min == max``) map to the lower end of the range,
    and values outside the fitted ``[min, max]`` are clipped when
    ``clip=True``.
    """

    def __init__(self, feature_range=(0.0, 1.0), clip=True):
        self.feature_range = feature_range
        self.clip = clip

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or len(X) == 0:
            raise ValueError("expected a non-empty 2-d array")
        self.stats_ = NormStats(X.min(axis=0), X.max(axis=0), tuple(self.feature_range))
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "stats_")
        return _apply_stats(np.asarray(X, dtype=float), self.stats_, self.clip)

    def inverse_transform(self, X):
        check_is_fitted(self, "stats_")
        return _invert_stats(np.asarray(X, dtype=float), self.stats_)


def _apply_stats(X: np.ndarray, stats: NormStats, clip: bool = True) -> np.ndarray:
    if X.ndim != 2 or X.shape[1] != stats.mins.size:
        raise DataError(f"expected {stats.mins.size} columns, got shape {X.shape}")
    na, nb = stats.feature_range
    span = np.where(stats.constant, 1.0, stats.maxs - stats.mins)
    out = (X - stats.mins) / span * (nb - na) + na
    out[:, stats.constant] = na
    if clip:
        out = np.clip(out, na, nb)
    return out


def _invert_stats(X: np.ndarray, stats: NormStats) -> np.ndarray:
    na, nb = stats.feature_range
    out = (X - na) / (nb - na) * (stats.maxs - stats.mins) + stats.mins
    out[:, stats.constant] = stats.mins[stats.constant]
    return out


@dataclass(frozen=True)
class Dataset:
    """Numeric feature rows with 0/1 labels.

    ``norm_stats`` is set once the rows are normalized; ``fitted_on`` names
    the partition the statistics and category coding were fitted on.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    norm_stats: NormStats | None = None
    encoding: dict | None = None
    fitted_on: str | None = None
    partition: str = "all"

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, len(self.feature_names))
        y = np.asarray(self.y).astype(int).ravel()
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        if len(X) != len(y):
            raise DataError(f"{len(X)} rows but {len(y)} labels")
        if X.shape[1] != len(self.feature_names):
            raise DataError(f"{X.shape[1]} columns but {len(self.feature_names)} feature names")
        if not np.all((y == 0) | (y == 1)):
            raise DataError("labels must be 0 or 1")

    @property
    def n_rows(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def is_normalized(self) -> bool:
        return self.norm_stats is not None

    def subset(self, idx, partition: str | None = None) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        return replace(self, X=self.X[idx], y=self.y[idx],
                       partition=partition if partition is not None else self.partition)

    def select_features(self, mask) -> "Dataset":
        """Keep only the columns whose mask bit is set."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.n_features,):
            raise DataError(f"mask has {mask.size} bits but dataset has {self.n_features} features")
        if not mask.any():
            raise DataError("mask selects no features")
        names = tuple(n for n, keep in zip(self.feature_names, mask) if keep)
        stats = self.norm_stats.select(mask) if self.norm_stats is not None else None
        return replace(self, X=self.X[:, mask], feature_names=names, norm_stats=stats)

    def digest(self) -> str:
        return _digest(dataset_to_dict(self))


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    stratified: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")


def fit_norm_stats(dataset: Dataset, feature_range=(0.0, 1.0)) -> NormStats:
    if dataset.n_rows == 0:
        raise DataError("cannot fit normalization statistics on zero rows")
    return MinMaxNormalizer(feature_range).fit(dataset.X).stats_


def normalize(dataset: Dataset, stats: NormStats | None = None, na: float = 0.0,
              nb: float = 1.0) -> Dataset:
    """Min-max normalize ``dataset``.

    ``stats`` should come from the training partition; when omitted they
    are fitted on ``dataset`` itself and ``fitted_on`` records that.
    """
    fitted_on = dataset.fitted_on
    if stats is None:
        stats = fit_norm_stats(dataset, (na, nb))
        fitted_on = dataset.partition
    X = _apply_stats(dataset.X, stats)
    return replace(dataset, X=X, norm_stats=stats, fitted_on=fitted_on)


def denormalize(dataset: Dataset) -> Dataset:
    if dataset.norm_stats is None:
        raise DataError("dataset is not normalized")
    X = _invert_stats(dataset.X, dataset.norm_stats)
    return replace(dataset, X=X, norm_stats=None)


def split_indices(labels, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Seeded train/test row indices, stratified by label if requested."""
    labels = np.asarray(labels).ravel()
    n = len(labels)
    if n < 2:
        raise DataError(f"need at least 2 rows to split, got {n}")
    rng = np.random.default_rng(spec.seed)
    if spec.stratified:
        groups = [np.flatnonzero(labels == c) for c in np.unique(labels)]
    else:
        groups = [np.arange(n)]
    n_train_total = int(round(spec.train_fraction * n))
    n_train_total = min(max(n_train_total, 1), n - 1)
    train, test = [], []
    # largest-remainder allocation keeps the overall train size exact
    quotas = [spec.train_fraction * len(g) for g in groups]
    alloc = [int(np.floor(q)) for q in quotas]
    order = np.argsort([-(q - a) for q, a in zip(quotas, alloc)], kind="stable")
    for k in order[: n_train_total - sum(alloc)]:
        alloc[k] += 1
    for g, k in zip(groups, alloc):
        perm = rng.permutation(g)
        train.append(perm[:k])
        test.append(perm[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Partition ``dataset``; an unnormalized input gets train-fitted stats on both sides."""
    tr, te = split_indices(dataset.y, spec)
    train = dataset.subset(tr, "train")
    test = dataset.subset(te, "test")
    if dataset.norm_stats is None:
        train = normalize(train)
        test = replace(normalize(test, train.norm_stats), fitted_on=train.fitted_on)
    return train, test


def prepare(records: Sequence[RawRecord], schema: Schema, spec: SplitSpec,
            policy: str = "ordinal", feature_range=(0.0, 1.0),
            extra_attacks: Sequence[str] = ()) -> tuple[Dataset, Dataset]:
    """Records to normalized train/test datasets with no test-set leakage.

    The split is drawn first; category coding and min-max statistics are
    then fitted on the train records only.
    """
    if not records:
        raise DataError("no records to prepare")
    labels = binarize_labels(records, extra_attacks)
    tr, te = split_indices(labels, spec)
    train_recs = [records[i] for i in tr]
    test_recs = [records[i] for i in te]
    X_tr, names, encoder = encode_categoricals(train_recs, schema, policy)
    X_te, _, _ = encode_categoricals(test_recs, schema, encoder=encoder)
    encoding = {
        "policy": policy,
        "categories": {schema.feature_names[j]: cats for j, cats in encoder.categories_.items()},
    }
    train = Dataset(X_tr, labels[tr], names, encoding=encoding, fitted_on="train", partition="train")
    stats = fit_norm_stats(train, feature_range)
    train = normalize(train, stats)
    test = normalize(Dataset(X_te, labels[te], names, encoding=encoding, fitted_on="train",
                             partition="test"), stats)
    return train, test


def _digest(obj) -> str:
    payload = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(payload).hexdigest()


def dataset_to_dict(dataset: Dataset) -> dict:
    return {
        "format": CACHE_FORMAT,
        "partition": dataset.partition,
        "fitted_on": dataset.fitted_on,
        "feature_names": list(dataset.feature_names),
        "columns": [dataset.X[:, j].tolist() for j in range(dataset.n_features)],
        "labels": dataset.y.tolist(),
        "norm_stats": dataset.norm_stats.to_dict() if dataset.norm_stats is not None else None,
        "encoding": dataset.encoding,
    }


def save_dataset(dataset: Dataset, path) -> str:
    """Write the columnar JSON cache; returns the SHA-256 of the file bytes."""
    text = json.dumps(dataset_to_dict(dataset), sort_keys=True, indent=1) + "\n"
    data = text.encode()
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def load_dataset(path) -> Dataset:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset cache not found: {path}")
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a dataset cache ({exc})") from None
    if d.get("format") != CACHE_FORMAT:
        raise DataError(f"{path}: unsupported cache format {d.get('format')!r}")
    names = d["feature_names"]
    n = len(d["labels"])
    X = np.array(d["columns"], dtype=float).T.reshape(n, len(names)) if names else np.empty((n, 0))
    stats = NormStats.from_dict(d["norm_stats"]) if d.get("norm_stats") else None
    return Dataset(X, d["labels"], names, norm_stats=stats, encoding=d.get("encoding"),
                   fitted_on=d.get("fitted_on"), partition=d.get("partition", "all"))
