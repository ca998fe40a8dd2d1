"""Dataset ingestion, stratified splitting, and training-vector estimation.

Input files are comma-separated: feature columns followed by an integer
class column in {0, 1}.  A first line containing any non-numeric token is a
header; blank lines and lines starting with ``#`` are skipped.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .encoding import FeatureVector
from .errors import DegenerateSplitError, ParseError, PreconditionError, SchemaError

log = logging.getLogger(__name__)

BANKNOTE_FEATURES = ("variance", "skewness", "kurtosis", "entropy")

# (class tallies of the full set, n_test) -> per-class test counts
KNOWN_TEST_TALLIES = {((762, 610), 28): (17, 11)}

KMEANS_INITS = ("class-means", "kmeans++")


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: tuple[str, ...]
    row_ids: np.ndarray = field(default=None)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise SchemaError(f"feature matrix {X.shape} does not match {y.shape[0]} labels")
        if not np.isin(y, (0, 1)).all():
            raise SchemaError("labels must be 0 or 1")
        ids = np.arange(len(y)) if self.row_ids is None else np.asarray(self.row_ids, dtype=np.int64)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "row_ids", ids)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self) -> int:
        return self.y.shape[0]

    @property
    def rows(self) -> list[FeatureVector]:
        return [FeatureVector(x, int(c)) for x, c in zip(self.X, self.y)]

    def class_counts(self) -> tuple[int, int]:
        return int(np.sum(self.y == 0)), int(np.sum(self.y == 1))

    def subset(self, mask_or_index) -> "Dataset":
        return Dataset(self.X[mask_or_index], self.y[mask_or_index],
                       self.feature_names, self.row_ids[mask_or_index])


@dataclass(frozen=True)
class SplitResult:
    train: Dataset
    test: Dataset
    seed: int


@dataclass(frozen=True)
class KMeansResult:
    centers: np.ndarray
    assignments: np.ndarray
    sse: float
    iterations: int
    converged: bool
    label_map: dict[int, int]
    sse_history: tuple[float, ...]

    def center_for_class(self, label: int) -> np.ndarray:
        """Center of the cluster mapped to ``label``.

        When majority voting maps both clusters to the same class, the
        cluster holding the larger share of ``label``'s rows is used.
        """
        owners = [c for c, lab in self.label_map.items() if lab == label]
        if len(owners) == 1:
            return self.centers[owners[0]]
        other = 1 - label
        partner = [c for c, lab in self.label_map.items() if lab == other]
        if len(partner) == 1:
            return self.centers[1 - partner[0]]
        raise DegenerateSplitError(f"no cluster can represent class {label}")


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def load_dataset(path, n_features: int = 4, feature_names: Sequence[str] | None = None) -> Dataset:
    """Read ``n_features`` real columns plus a 0/1 class column."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    rows, labels = [], []
    names = None
    seen_data = False
    for lineno, rec in enumerate(csv.reader(text.splitlines()), start=1):
        if not rec or not "".join(rec).strip() or rec[0].lstrip().startswith("#"):
            continue
        toks = [t.strip() for t in rec]
        if not seen_data and names is None and not all(_is_number(t) for t in toks):
            if len(toks) != n_features + 1:
                raise SchemaError(
                    f"{path}: header has {len(toks)} columns, expected {n_features + 1}")
            names = tuple(toks[:-1])
            continue
        seen_data = True
        if len(toks) != n_features + 1:
            raise SchemaError(
                f"{path}: line {lineno}: {len(toks)} columns, expected {n_features + 1}")
        try:
            vals = [float(t) for t in toks[:-1]]
            lab = float(toks[-1])
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}", lineno) from None
        if not np.all(np.isfinite(vals)):
            raise ParseError(f"{path}: non-finite feature", lineno)
        if lab not in (0.0, 1.0):
            raise SchemaError(f"{path}: line {lineno}: class {toks[-1]!r} is not 0 or 1")
        rows.append(vals)
        labels.append(int(lab))
    if not rows:
        raise ParseError(f"{path}: no data rows")
    if feature_names is None:
        if names is not None:
            feature_names = names
        elif n_features == len(BANKNOTE_FEATURES):
            feature_names = BANKNOTE_FEATURES
        else:
            feature_names = tuple(f"x{i}" for i in range(n_features))
    data = Dataset(np.array(rows), np.array(labels), tuple(feature_names))
    c0, c1 = data.class_counts()
    log.info("loaded %s: %d rows (class 0: %d, class 1: %d)", path, len(data), c0, c1)
    return data


def _proportional_counts(counts: tuple[int, int], n_test: int) -> tuple[int, int]:
    total = sum(counts)
    quotas = [n_test * c / total for c in counts]
    base = [int(q) for q in quotas]
    rest = n_test - sum(base)
    order = sorted(range(2), key=lambda i: (-(quotas[i] - base[i]), i))
    for i in order[:rest]:
        base[i] += 1
    return base[0], base[1]


def split(data: Dataset, n_test: int, seed: int,
          test_counts: tuple[int, int] | None = None) -> SplitResult:
    """Seeded stratified train/test partition.

    Per-class test counts come from ``test_counts`` if given, else from
    :data:`KNOWN_TEST_TALLIES` (the 1372-row banknote set with 28 test rows
    gives 17/11), else from largest-remainder proportional allocation.
    """
    if not 0 < n_test < len(data):
        raise PreconditionError(f"n_test must be in (0, {len(data)}), got {n_test}")
    counts = data.class_counts()
    if test_counts is None:
        test_counts = KNOWN_TEST_TALLIES.get((counts, n_test)) or _proportional_counts(counts, n_test)
    if sum(test_counts) != n_test:
        raise PreconditionError(f"test counts {test_counts} do not sum to {n_test}")
    rng = np.random.default_rng(seed)
    test_mask = np.zeros(len(data), dtype=bool)
    for cls, k in enumerate(test_counts):
        members = np.flatnonzero(data.y == cls)
        if k > len(members):
            raise PreconditionError(f"class {cls} has {len(members)} rows, {k} requested for test")
        test_mask[rng.choice(members, size=k, replace=False)] = True
    return SplitResult(data.subset(~test_mask), data.subset(test_mask), seed)


def class_averages(train: Dataset) -> tuple[FeatureVector, FeatureVector]:
    """Per-class feature means (not normalised)."""
    centers = []
    for cls in (0, 1):
        sel = train.y == cls
        if not sel.any():
            raise DegenerateSplitError(f"class {cls} absent from training data")
        centers.append(FeatureVector(train.X[sel].mean(axis=0), cls))
    return centers[0], centers[1]


def _init_centers(train: Dataset, k: int, init: str, rng) -> np.ndarray:
    X = train.X
    if init == "class-means":
        if k != 2:
            raise PreconditionError("class-means initialisation needs k = 2")
        c0, c1 = class_averages(train)
        return np.vstack([c0.features, c1.features])
    if init == "kmeans++":
        centers = [X[rng.integers(len(X))]]
        for _ in range(1, k):
            d2 = np.min(((X[:, None, :] - np.array(centers)[None]) ** 2).sum(-1), axis=1)
            total = d2.sum()
            idx = rng.integers(len(X)) if total == 0 else rng.choice(len(X), p=d2 / total)
            centers.append(X[idx])
        return np.array(centers, dtype=np.float64)
    raise PreconditionError(f"unknown k-means init {init!r}")


def kmeans(train: Dataset, k: int = 2, init: str = "class-means", seed: int = 0,
           max_iter: int = 300, tol: float = 1e-8) -> KMeansResult:
    """Lloyd's algorithm on the raw features.

    Stops once no center moves more than ``tol`` (Euclidean) or after
    ``max_iter`` updates.  An emptied cluster is re-seeded at the row farthest
    from its previous center.  ``sse_history[t]`` is the within-cluster SSE
    after the t-th assignment step and never increases.
    """
    if len(train) < k:
        raise PreconditionError(f"need at least {k} rows, got {len(train)}")
    X = train.X
    rng = np.random.default_rng(seed)
    centers = _init_centers(train, k, init, rng)
    labels, sse = _kernels.assign_nearest(X, centers)
    history = [sse]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        new = np.empty_like(centers)
        for c in range(k):
            members = labels == c
            if members.any():
                new[c] = X[members].mean(axis=0)
            else:
                far = int(np.argmax(((X - centers[c]) ** 2).sum(axis=1)))
                log.debug("cluster %d emptied; re-seeding at row %d", c, far)
                new[c] = X[far]
        shift = float(np.max(np.linalg.norm(new - centers, axis=1)))
        centers = new
        labels, sse = _kernels.assign_nearest(X, centers)
        history.append(sse)
        if shift < tol:
            converged = True
            break
    label_map = {}
    for c in range(k):
        members = train.y[labels == c]
        label_map[c] = int(np.bincount(members, minlength=2).argmax()) if members.size else c
    return KMeansResult(centers, labels, float(sse), it, converged, label_map, tuple(history))


def fixed_center_sse(X: np.ndarray, centers: np.ndarray) -> float:
    """SSE of assigning every row to its nearest fixed center."""
    return _kernels.assign_nearest(X, np.asarray(centers, dtype=np.float64))[1]


_STATS = ("count", "mean", "std", "min", "25%", "50%", "75%", "max")


def summarize(data: Dataset) -> dict:
    """Count, mean, sample std (ddof 1), min, quartiles (linear interpolation), max.

    Returns ``{"features": {name: {stat: value}}, "class_counts": {0: n0, 1: n1}}``.
    """
    if len(data) == 0:
        raise PreconditionError("cannot summarise an empty dataset")
    out = {}
    for j, name in enumerate(data.feature_names):
        col = data.X[:, j]
        q25, q50, q75 = np.percentile(col, [25, 50, 75], method="linear")
        out[name] = {
            "count": int(col.size),
            "mean": float(col.mean()),
            "std": float(col.std(ddof=1)) if col.size > 1 else float("nan"),
            "min": float(col.min()),
            "25%": float(q25),
            "50%": float(q50),
            "75%": float(q75),
            "max": float(col.max()),
        }
    c0, c1 = data.class_counts()
    return {"features": out, "class_counts": {0: c0, 1: c1}}


def format_summary(summary: dict) -> str:
    names = list(summary["features"])
    width = max(12, *(len(n) + 2 for n in names))
    lines = ["".join([f"{'':<7}"] + [f"{n:>{width}}" for n in names])]
    for stat in _STATS:
        vals = [summary["features"][n][stat] for n in names]
        lines.append("".join([f"{stat:<7}"] + [f"{v:>{width}.6g}" for v in vals]))
    cc = summary["class_counts"]
    lines.append(f"class counts: 0 -> {cc[0]}, 1 -> {cc[1]}")
    return "\n".join(lines)
