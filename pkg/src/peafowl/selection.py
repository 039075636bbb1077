"""Wrapper feature selection: binary positions score via a built-in KNN.

The optimizer searches bit masks over the feature columns; a mask's fitness
is the holdout accuracy of a k-nearest-neighbor classifier restricted to the
masked columns.  KNN is deterministic: distance ties prefer the lower
training-row index and even-vote ties predict the attack class.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .data import Dataset, FoldPlan
from .errors import DataError
from .metrics import ConfusionCounts, MetricsReport, compute_metrics
from .optimizer import Binary, PfmParams, Problem, RunTrace, optimize

__all__ = [
    "FeatureSubset",
    "WrapperFitnessSpec",
    "knn_classify",
    "subset_fitness",
    "select_features",
    "top_subsets",
    "evaluate_subset",
    "cross_validate",
]


@dataclass(frozen=True)
class FeatureSubset:
    """A nonempty set of feature columns, stored as a 0/1 mask."""

    mask: np.ndarray

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=float)
        if mask.ndim != 1 or not np.all(np.isin(mask, (0.0, 1.0))):
            raise ValueError("mask must be a flat vector of 0s and 1s")
        if mask.sum() < 1:
            raise ValueError("feature subset must select at least one feature")
        object.__setattr__(self, "mask", mask)

    @property
    def columns(self) -> np.ndarray:
        """0-based column indices for slicing."""
        return np.flatnonzero(self.mask)

    @property
    def indices(self) -> list[int]:
        """1-based feature indices, the reporting convention."""
        return [int(c) + 1 for c in self.columns]

    @property
    def cardinality(self) -> int:
        return int(self.mask.sum())

    @classmethod
    def all_features(cls, n_features: int) -> "FeatureSubset":
        return cls(np.ones(n_features))

    @classmethod
    def from_indices(cls, indices_1based, n_features: int) -> "FeatureSubset":
        mask = np.zeros(n_features)
        for i in indices_1based:
            if not 1 <= i <= n_features:
                raise ValueError(f"feature index {i} outside 1..{n_features}")
            mask[i - 1] = 1.0
        return cls(mask)


@dataclass(frozen=True)
class WrapperFitnessSpec:
    """How a candidate mask is scored: KNN accuracy on a seeded holdout.

    The holdout is stratified by label.  ``split_seed`` defaults to the
    optimizer seed inside :func:`select_features`, or 0 for direct calls.
    """

    k_neighbors: int = 5
    holdout_fraction: float = 0.2
    split_seed: Optional[int] = None

    def validate(self):
        if self.k_neighbors < 1:
            raise ValueError("k_neighbors must be >= 1")
        if not 0.0 < self.holdout_fraction <= 0.5:
            raise ValueError("holdout_fraction must lie in (0, 0.5]")
        return self


def _knn_predict(train_x: np.ndarray, train_y: np.ndarray, query_x: np.ndarray, k: int) -> np.ndarray:
    if k < 1:
        raise ValueError("k must be >= 1")
    n_train = train_x.shape[0]
    if k > n_train:
        raise ValueError(f"k={k} exceeds the {n_train} training rows")
    preds = np.empty(query_x.shape[0], dtype=int)
    # Bound the broadcast distance block to a few million elements.
    block = max(1, int(4_000_000 // max(1, n_train * max(1, train_x.shape[1]))))
    for start in range(0, query_x.shape[0], block):
        q = query_x[start : start + block]
        d2 = ((q[:, None, :] - train_x[None, :, :]) ** 2).sum(axis=2)
        kth = np.partition(d2, k - 1, axis=1)[:, k - 1]
        for j in range(q.shape[0]):
            row = d2[j]
            closer = row < kth[j]
            n_closer = int(closer.sum())
            ones = int(train_y[closer].sum())
            short = k - n_closer
            if short > 0:
                tied = np.flatnonzero(row == kth[j])[:short]
                ones += int(train_y[tied].sum())
            preds[start + j] = 1 if 2 * ones >= k else 0
    return preds


def knn_classify(
    train: Dataset, query_rows, k: int, mask: Optional[FeatureSubset] = None
) -> np.ndarray:
    """Majority label among the k nearest training rows on masked columns.

    ``mask=None`` means all columns.  Distances are Euclidean; ties are
    broken deterministically (lower row index; even votes go to class 1).
    """
    query_rows = np.atleast_2d(np.asarray(query_rows, dtype=float))
    if query_rows.shape[1] != train.n_features:
        raise ValueError(
            f"query width {query_rows.shape[1]} does not match {train.n_features} features"
        )
    if mask is None:
        cols = slice(None)
    else:
        if mask.mask.size != train.n_features:
            raise ValueError("mask length does not match the feature count")
        cols = mask.columns
    return _knn_predict(train.features[:, cols], train.labels, query_rows[:, cols], k)


def _holdout_split(labels: np.ndarray, fraction: float, seed: int):
    rng = np.random.default_rng(seed)
    held = []
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        perm = rng.permutation(idx)
        held.append(perm[: max(1, int(round(fraction * idx.size)))])
    held = np.sort(np.concatenate(held))
    keep = np.ones(labels.size, dtype=bool)
    keep[held] = False
    fit = np.flatnonzero(keep)
    if fit.size == 0 or held.size == 0:
        raise ValueError("degenerate holdout split: one side is empty")
    return fit, held


def subset_fitness(mask: FeatureSubset, train: Dataset, spec: WrapperFitnessSpec) -> float:
    """Holdout accuracy in [0, 1] of KNN restricted to the masked columns."""
    spec.validate()
    seed = 0 if spec.split_seed is None else spec.split_seed
    fit_idx, held_idx = _holdout_split(train.labels, spec.holdout_fraction, seed)
    preds = knn_classify(train.take(fit_idx), train.features[held_idx], spec.k_neighbors, mask)
    return float(np.mean(preds == train.labels[held_idx]))


def _repair_empty_mask(position: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # The transfer layer may emit the empty subset; switch one random bit on.
    if position.sum() == 0:
        position = position.copy()
        position[int(rng.integers(0, position.size))] = 1.0
    return position


def select_features(
    train: Dataset, params: PfmParams, spec: WrapperFitnessSpec
) -> tuple[FeatureSubset, RunTrace]:
    """Search feature masks maximizing wrapper fitness; returns best + trace."""
    params.validate()
    spec.validate()
    if train.n_features < 2:
        raise ValueError("need at least 2 features to select from")
    if np.unique(train.labels).size < 2:
        raise DataError("training data contains a single class")
    resolved = spec if spec.split_seed is not None else replace(spec, split_seed=params.seed)

    def objective(position):
        return subset_fitness(FeatureSubset(position), train, resolved)

    problem = Problem(
        dimension=train.n_features,
        domain=Binary(),
        objective=objective,
        sense="max",
        repair=_repair_empty_mask,
    )
    trace = optimize(problem, params)
    return FeatureSubset(trace.best_solution.position), trace


def top_subsets(population, n: int = 3) -> list[tuple[FeatureSubset, float]]:
    """Best n distinct masks from a final population (fitness desc, then smaller)."""
    ordered = sorted(population, key=lambda p: (-p.fitness, int(p.position.sum())))
    seen = set()
    out = []
    for p in ordered:
        key = p.position.tobytes()
        if key in seen:
            continue
        seen.add(key)
        out.append((FeatureSubset(p.position), p.fitness))
        if len(out) == n:
            break
    return out


def evaluate_subset(
    mask: Optional[FeatureSubset], train: Dataset, test: Dataset, k: int
) -> ConfusionCounts:
    """Classify every test row against the training set; tally the confusion counts.

    ``mask=None`` evaluates on all features (identical to the all-ones mask).
    """
    if train.n_features != test.n_features:
        raise ValueError("train and test feature counts differ")
    if (
        train.provenance is not None
        and test.provenance is not None
        and train.provenance != test.provenance
    ):
        raise DataError("train and test datasets come from different transforms")
    preds = knn_classify(train, test.features, k, mask)
    actual = test.labels
    return ConfusionCounts(
        tp=int(np.sum((preds == 1) & (actual == 1))),
        tn=int(np.sum((preds == 0) & (actual == 0))),
        fp=int(np.sum((preds == 1) & (actual == 0))),
        fn=int(np.sum((preds == 0) & (actual == 1))),
    )


def cross_validate(
    mask: Optional[FeatureSubset], data: Dataset, folds: FoldPlan, k: int
) -> tuple[list[ConfusionCounts], MetricsReport]:
    """Per-fold confusion counts plus metrics of the elementwise-pooled counts."""
    if folds.assignments.size != data.n_rows:
        raise ValueError("fold plan does not cover the dataset")
    per_fold = []
    for fold in range(folds.k):
        test_idx = folds.fold_indices(fold)
        train_idx = np.flatnonzero(folds.assignments != fold)
        train_part = data.take(train_idx)
        if np.unique(train_part.labels).size < 2:
            warnings.warn(f"fold {fold}: training portion has a single class")
        preds = knn_classify(train_part, data.features[test_idx], k, mask)
        actual = data.labels[test_idx]
        per_fold.append(
            ConfusionCounts(
                tp=int(np.sum((preds == 1) & (actual == 1))),
                tn=int(np.sum((preds == 0) & (actual == 0))),
                fp=int(np.sum((preds == 1) & (actual == 0))),
                fn=int(np.sum((preds == 0) & (actual == 1))),
            )
        )
    pooled = ConfusionCounts()
    for counts in per_fold:
        pooled = pooled + counts
    return per_fold, compute_metrics(pooled)
