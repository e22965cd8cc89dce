"""Training datasets: feature vectors with optionally missing class labels."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DataError

# Label encoding: 0 = missing, 1 and 2 the two classes.
MISSING = 0


@dataclass(frozen=True)
class Dataset:
    """n records of a p-vector feature and an optional class label.

    labels[j] is 1 or 2 when record j is classified and 0 when its label is
    missing, so the missing-label indicator is simply labels == 0.
    """

    y: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        y = np.atleast_2d(np.asarray(self.y, dtype=float))
        labels = np.asarray(self.labels, dtype=np.int64)
        if y.ndim != 2:
            raise DataError(f"features must be a 2-d array, got shape {y.shape}")
        if labels.shape != (y.shape[0],):
            raise DataError(
                f"labels shape {labels.shape} does not match {y.shape[0]} records"
            )
        if not np.all(np.isin(labels, (0, 1, 2))):
            bad = labels[~np.isin(labels, (0, 1, 2))][0]
            raise DataError(f"labels must be 0 (missing), 1 or 2; got {bad}")
        if not np.all(np.isfinite(y)):
            raise DataError("features contain non-finite values")
        y.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.y.shape[1]

    @property
    def m(self) -> np.ndarray:
        """Missing-label indicator vector."""
        return self.labels == MISSING

    @property
    def n_labeled(self) -> int:
        return int(np.sum(self.labels != MISSING))

    @property
    def n_unlabeled(self) -> int:
        return int(np.sum(self.labels == MISSING))

    @property
    def fully_labeled(self) -> bool:
        return self.n_unlabeled == 0

    def labeled_subset(self) -> "Dataset":
        keep = self.labels != MISSING
        return Dataset(self.y[keep], self.labels[keep])

    def with_labels(self, z: np.ndarray) -> "Dataset":
        """A fully labeled copy using the supplied class labels."""
        return Dataset(self.y, np.asarray(z, dtype=np.int64))


def write_dataset_csv(path: str | Path, data: Dataset) -> None:
    """Write a dataset as y1,...,yp,label with a blank label when missing."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"y{i + 1}" for i in range(data.p)] + ["label"])
        for row, lab in zip(data.y, data.labels):
            writer.writerow([repr(float(v)) for v in row] + [str(lab) if lab else ""])


def write_truth_csv(path: str | Path, y: np.ndarray, z: np.ndarray, m: np.ndarray) -> None:
    """Sidecar with the hidden true labels and the missingness indicator."""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"y{i + 1}" for i in range(y.shape[1])] + ["label", "m"])
        for row, zj, mj in zip(y, z, m):
            writer.writerow([repr(float(v)) for v in row] + [str(int(zj)), str(int(mj))])


def read_dataset_csv(path: str | Path) -> Dataset:
    """Parse a y1,...,yp,label CSV; blank or absent label means missing."""
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        if not header or header[-1] != "label":
            raise DataError(f"{path}: last column must be 'label', got {header[-1:]}")
        p = len(header) - 1
        expected = [f"y{i + 1}" for i in range(p)]
        if header[:-1] != expected:
            raise DataError(f"{path}: expected columns {expected + ['label']}, got {header}")
        rows: list[list[float]] = []
        labels: list[int] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != p + 1:
                raise DataError(f"{path}: row {lineno} has {len(row)} fields, expected {p + 1}")
            try:
                rows.append([float(c) for c in row[:p]])
            except ValueError as exc:
                raise DataError(f"{path}: row {lineno}: non-numeric feature ({exc})") from None
            lab = row[p].strip()
            if lab == "":
                labels.append(MISSING)
            elif lab in ("1", "2"):
                labels.append(int(lab))
            else:
                raise DataError(f"{path}: row {lineno}: label must be 1, 2 or empty, got {lab!r}")
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Dataset(np.array(rows), np.array(labels))
