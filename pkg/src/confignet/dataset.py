"""Dataset loading, normalization, splitting and the two synthetic generators."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

REGRESSION = "regression"
CLASSIFICATION = "classification"


class LoadError(ValueError):
    """Raised when a CSV file cannot be turned into a Dataset."""


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    T: np.ndarray
    task: str = REGRESSION
    class_labels: tuple | None = None
    norm_meta: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        X = _frozen(self.X)
        T = _frozen(self.T)
        if X.ndim == 1:
            X = _frozen(X.reshape(-1, 1))
        if T.ndim == 1:
            T = _frozen(T.reshape(-1, 1))
        if X.shape[0] != T.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but T has {T.shape[0]}")
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise ValueError(f"unknown task {self.task!r}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "T", T)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]

    @property
    def m(self):
        return self.T.shape[1]

    def take(self, rows):
        return replace(self, X=self.X[rows], T=self.T[rows])


@dataclass(frozen=True)
class SplitSpec:
    train_count: int
    test_count: int
    shuffle_seed: int = 0


def _is_float(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_csv(path, target_cols=1, has_header=False, task=None):
    """Read a comma-separated file whose trailing ``target_cols`` columns are targets.

    A classification dataset results when ``task == "classification"`` or when
    any target cell is non-numeric; its single label column is one-hot encoded.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"dataset file not found: {path}")
    with path.open(newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if has_header and rows:
        rows = rows[1:]
    if not rows:
        raise LoadError(f"{path}: no data rows")
    width = len(rows[0])
    if not 1 <= target_cols < width:
        raise LoadError(f"{path}: target_cols={target_cols} but rows have {width} columns")
    first = 2 if has_header else 1
    for i, r in enumerate(rows):
        if len(r) != width:
            raise LoadError(f"{path}: row {i + first} has {len(r)} columns, expected {width}")
    n_feat = width - target_cols
    X = np.empty((len(rows), n_feat))
    for i, r in enumerate(rows):
        for j in range(n_feat):
            try:
                X[i, j] = float(r[j])
            except ValueError:
                raise LoadError(
                    f"{path}: row {i + first}, column {j + 1}: non-numeric value {r[j]!r}"
                ) from None
    targets = [[c.strip() for c in r[n_feat:]] for r in rows]
    numeric = all(_is_float(c) for t in targets for c in t)
    if task is None:
        task = REGRESSION if numeric else CLASSIFICATION
    if task == CLASSIFICATION:
        if target_cols != 1:
            raise LoadError(f"{path}: classification expects one label column")
        labels = [t[0] for t in targets]
        return Dataset(X, one_hot_encode(labels), CLASSIFICATION, tuple(sorted(set(labels))))
    if not numeric:
        raise LoadError(f"{path}: non-numeric target in a regression dataset")
    T = np.array([[float(c) for c in t] for t in targets])
    return Dataset(X, T, REGRESSION)


def one_hot_encode(labels):
    """N x m indicator matrix over the sorted distinct labels."""
    labels = [str(x) for x in labels]
    classes = sorted(set(labels))
    if not classes:
        raise ValueError("need at least one label")
    index = {c: k for k, c in enumerate(classes)}
    out = np.zeros((len(labels), len(classes)))
    out[np.arange(len(labels)), [index[x] for x in labels]] = 1.0
    return out


def _col_minmax(A):
    return A.min(axis=0), A.max(axis=0)


def _scale(A, lo, hi):
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    out = (A - lo) / safe
    out[:, span <= 0] = 0.0
    return out


def fit_minmax(ds):
    """Per-column min/max of features (and regression targets)."""
    if ds.n < 2:
        raise ValueError("normalization needs at least two rows")
    x_lo, x_hi = _col_minmax(ds.X)
    meta = {"x_min": x_lo, "x_max": x_hi}
    if ds.task == REGRESSION:
        meta["t_min"], meta["t_max"] = _col_minmax(ds.T)
    return meta


def minmax_normalize(ds, meta=None):
    """Map features and regression targets to [0, 1] column-wise.

    With ``meta`` given (typically fitted on a training split) those statistics
    are applied instead, so values may fall outside [0, 1]. Constant columns
    map to 0.
    """
    if meta is None:
        meta = fit_minmax(ds)
    X = _scale(ds.X, meta["x_min"], meta["x_max"])
    T = ds.T
    if ds.task == REGRESSION:
        T = _scale(ds.T, meta["t_min"], meta["t_max"])
    return replace(ds, X=X, T=T, norm_meta=meta)


def normalize_inputs(X, meta):
    return _scale(np.asarray(X, dtype=np.float64), meta["x_min"], meta["x_max"])


def denormalize_targets(T, meta):
    T = np.asarray(T, dtype=np.float64)
    if "t_min" not in meta:
        return T
    return meta["t_min"] + T * (meta["t_max"] - meta["t_min"])


def denormalize(ds):
    """Inverse of :func:`minmax_normalize` (constant columns come back as their value)."""
    meta = ds.norm_meta
    if meta is None:
        return ds
    X = meta["x_min"] + ds.X * (meta["x_max"] - meta["x_min"])
    return replace(ds, X=X, T=denormalize_targets(ds.T, meta), norm_meta=None)


def split(ds, spec):
    """Seeded shuffle, then the first ``train_count`` rows train and the next ``test_count`` test."""
    if spec.train_count < 0 or spec.test_count < 0:
        raise ValueError("split counts must be non-negative")
    if spec.train_count + spec.test_count > ds.n:
        raise ValueError(
            f"split {spec.train_count}+{spec.test_count} exceeds {ds.n} rows"
        )
    order = np.random.default_rng(spec.shuffle_seed).permutation(ds.n)
    tr = order[: spec.train_count]
    te = order[spec.train_count: spec.train_count + spec.test_count]
    return ds.take(tr), ds.take(te)


def scalar_function(x):
    """The three-bump test function on [0, 1]."""
    x = np.asarray(x, dtype=np.float64)
    return (
        0.2 * np.exp(-((10 * x - 4) ** 2))
        + 0.5 * np.exp(-((80 * x - 40) ** 2))
        + 0.3 * np.exp(-((80 * x - 20) ** 2))
    )


def multi_output_function(x1, x2):
    """Two coupled outputs of two inputs; returns (y1, y2)."""
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    x3 = x1 + x2
    x4 = x1 - x2
    y1 = np.exp(2 * x1 * np.sin(np.pi * x4) + np.sin(x2 * x3))
    y2 = np.exp(2 * x2 * np.cos(np.pi * x3) + np.cos(x1 * x4))
    return y1, y2


MULTI_OUTPUT_MEAN = -0.5
MULTI_OUTPUT_VAR = 0.2


def gen_scalar_function(n, seed):
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.random.default_rng(seed).uniform(0.0, 1.0, size=(n, 1))
    return Dataset(x, scalar_function(x), REGRESSION)


def gen_multi_output(n, seed):
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    X = rng.normal(MULTI_OUTPUT_MEAN, np.sqrt(MULTI_OUTPUT_VAR), size=(n, 2))
    y1, y2 = multi_output_function(X[:, 0], X[:, 1])
    return Dataset(X, np.column_stack([y1, y2]), REGRESSION)


GENERATORS = {"eq26": gen_scalar_function, "eq27": gen_multi_output}


def save_csv(ds, path, header=True):
    """Write features then targets (class label for classification) as CSV."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        if header:
            w.writerow([f"x{j + 1}" for j in range(ds.d)]
                       + ([f"y{q + 1}" for q in range(ds.m)] if ds.task == REGRESSION else ["label"]))
        for i in range(ds.n):
            row = [repr(float(v)) for v in ds.X[i]]
            if ds.task == CLASSIFICATION:
                row.append(ds.class_labels[int(np.argmax(ds.T[i]))])
            else:
                row += [repr(float(v)) for v in ds.T[i]]
            w.writerow(row)
