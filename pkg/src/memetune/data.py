"""Dataset ingestion, z-score normalization, and a seeded banana-shaped generator.

Supported on-disk formats:
  * sparse libsvm text: ``<label> <index>:<value> ...`` with ascending 1-based
    indices; anything not strictly positive maps to label -1.
  * dense CSV: rectangular numeric table, one column holding the labels; an
    optional header row is detected by a non-numeric first line.

Datasets are densified eagerly; everything here targets desk-scale data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ParseError(ValueError):
    """Malformed input file; the message carries the offending location."""


@dataclass
class Dataset:
    """Dense binary-classification data: features (n x d) and labels in {-1, +1}."""

    features: np.ndarray
    labels: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.float64)
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-D matrix")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels must be a vector with one entry per row")
        if self.features.shape[0] < 1:
            raise ValueError("dataset must contain at least one example")
        if not np.all(np.isin(self.labels, (-1.0, 1.0))):
            raise ValueError("labels must be strictly in {-1, +1}")

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def feature_count(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray, name: str = "") -> "Dataset":
        return Dataset(self.features[indices], self.labels[indices], name or self.name)


@dataclass(frozen=True)
class NormalizationStats:
    """Per-column mean and population std of a training set (zero std -> 1)."""

    mean: np.ndarray
    std: np.ndarray


def _map_label(raw: float) -> float:
    return 1.0 if raw > 0 else -1.0


def load_libsvm(source) -> Dataset:
    """Load sparse libsvm-format text (a path or a readable stream) into a dense Dataset."""
    if hasattr(source, "read"):
        return _parse_libsvm(source, getattr(source, "name", "<stream>"))
    with open(source, "r") as handle:
        return _parse_libsvm(handle, source)


def _parse_libsvm(handle, path) -> Dataset:
    rows: list[dict[int, float]] = []
    labels: list[float] = []
    width = 0
    for lineno, raw in enumerate(handle, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode()
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        try:
            label = float(parts[0])
        except ValueError:
            raise ParseError(f"{path}:{lineno}: bad label {parts[0]!r}") from None
        entries: dict[int, float] = {}
        previous = 0
        for token in parts[1:]:
            index_text, sep, value_text = token.partition(":")
            if not sep:
                raise ParseError(f"{path}:{lineno}: expected index:value, got {token!r}")
            try:
                index = int(index_text)
                value = float(value_text)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad feature entry {token!r}") from None
            if index < 1:
                raise ParseError(f"{path}:{lineno}: feature indices are 1-based, got {index}")
            if index <= previous:
                raise ParseError(
                    f"{path}:{lineno}: feature indices must be strictly ascending"
                )
            previous = index
            entries[index] = value
        width = max(width, previous)
        rows.append(entries)
        labels.append(_map_label(label))
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    features = np.zeros((len(rows), width))
    for i, entries in enumerate(rows):
        for index, value in entries.items():
            features[i, index - 1] = value
    return Dataset(features, np.array(labels), name=str(path))


def dump_libsvm(dataset: Dataset, path) -> None:
    """Write a Dataset in libsvm text format (all entries explicit, full precision)."""
    with open(path, "w") as handle:
        for row, label in zip(dataset.features, dataset.labels):
            cells = " ".join(f"{j + 1}:{float(value)!r}" for j, value in enumerate(row))
            handle.write(f"{int(label):+d} {cells}\n".rstrip() + "\n")


def load_csv(path, label_column: int) -> Dataset:
    """Load a rectangular numeric CSV; ``label_column`` is a 0-based column index."""
    rows: list[list[float]] = []
    with open(path, "r") as handle:
        lines = handle.read().splitlines()
    start = 0
    if lines:
        try:
            [float(cell) for cell in lines[0].split(",")]
        except ValueError:
            start = 1  # header row
    for lineno in range(start, len(lines)):
        line = lines[lineno].strip()
        if not line:
            continue
        cells = line.split(",")
        values = []
        for col, cell in enumerate(cells):
            try:
                values.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"{path}:{lineno + 1}: column {col}: non-numeric cell {cell.strip()!r}"
                ) from None
        if rows and len(values) != len(rows[0]):
            raise ParseError(
                f"{path}:{lineno + 1}: ragged row ({len(values)} cells, expected {len(rows[0])})"
            )
        rows.append(values)
    if not rows:
        raise ValueError(f"{path}: empty dataset")
    table = np.array(rows)
    if not (0 <= label_column < table.shape[1]):
        raise ValueError(f"label column {label_column} out of range for {table.shape[1]} columns")
    labels = np.array([_map_label(v) for v in table[:, label_column]])
    features = np.delete(table, label_column, axis=1)
    return Dataset(features, labels, name=str(path))


def normalize_fit(train: Dataset) -> NormalizationStats:
    """Column means and population stds of the training features (std 0 -> 1)."""
    mean = train.features.mean(axis=0)
    std = train.features.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return NormalizationStats(mean=mean, std=std)


def normalize_apply(stats: NormalizationStats, data: Dataset) -> Dataset:
    """Transform features with training-set statistics; labels pass through."""
    return Dataset((data.features - stats.mean) / stats.std, data.labels.copy(), data.name)


def gen_banana(n: int, noise: float, seed) -> Dataset:
    """Two interleaved crescent-shaped classes in 2-D with Gaussian noise.

    Labels are balanced (counts differ by at most one) and rows are shuffled;
    the same (n, noise, seed) always produces the identical dataset.
    """
    if n < 2:
        raise ValueError("need at least 2 examples")
    if noise < 0:
        raise ValueError("noise must be non-negative")
    rng = np.random.default_rng(seed)
    n_pos = (n + 1) // 2
    n_neg = n // 2
    t_pos = rng.uniform(0.0, math.pi, n_pos)
    t_neg = rng.uniform(0.0, math.pi, n_neg)
    top = np.column_stack([np.cos(t_pos), np.sin(t_pos)])
    bottom = np.column_stack([1.0 - np.cos(t_neg), 0.5 - np.sin(t_neg)])
    features = np.vstack([top, bottom])
    labels = np.concatenate([np.ones(n_pos), -np.ones(n_neg)])
    features = features + rng.normal(0.0, noise, features.shape) if noise > 0 else features
    order = rng.permutation(n)
    return Dataset(features[order], labels[order], name=f"banana(n={n},noise={noise})")


__all__ = [
    "Dataset",
    "NormalizationStats",
    "ParseError",
    "load_libsvm",
    "dump_libsvm",
    "load_csv",
    "normalize_fit",
    "normalize_apply",
    "gen_banana",
]
