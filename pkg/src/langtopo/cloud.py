"""Category point clouds and per-language sub-clouds."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .ingest import MISSING, CategoricalTable, TableError

# dimension presets: 2 for plotting, 4 for the topological analysis
VIS_DIMS = 2
ANALYSIS_DIMS = 4


@dataclass(frozen=True, eq=False)
class PointCloud:
    labels: tuple
    coords: np.ndarray

    def __post_init__(self):
        coords = np.atleast_2d(np.asarray(self.coords, dtype=float))
        if coords.shape[0] != len(self.labels):
            coords = coords.reshape(len(self.labels), -1)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("point labels must be unique")

    @property
    def d(self):
        return self.coords.shape[1]

    def __len__(self):
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class SubCloud:
    language_id: str
    points: PointCloud
    source_categories: tuple

    @property
    def labels(self):
        return self.points.labels

    @property
    def coords(self):
        return self.points.coords

    def truncate(self, d):
        return SubCloud(
            self.language_id,
            PointCloud(self.points.labels, self.points.coords[:, :d]),
            self.source_categories,
        )

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["feature_id", "category_code", *(f"dim{k + 1}" for k in range(self.points.d))])
        for (f, _), lab, row in zip(self.source_categories, self.points.labels, self.points.coords):
            w.writerow([f, lab[len(str(f)) + 1:], *(format(x, ".17g") for x in row)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, language_id, text):
        """Read back a sub-cloud file; sources hold (feature, value label)."""
        rows = list(csv.reader(io.StringIO(text)))[1:]
        sources = tuple((r[0], r[1]) for r in rows)
        labels = [f"{f}:{v}" for f, v in sources]
        coords = np.array([[float(x) for x in r[2:]] for r in rows], dtype=float)
        return cls(language_id, PointCloud(labels, coords.reshape(len(rows), -1)), sources)


@dataclass(frozen=True, eq=False)
class CategoryCoordinates:
    """Category coordinates as stored on disk, usable wherever a model is."""

    column_ids: tuple
    coordinates: np.ndarray
    column_labels: tuple

    @property
    def J(self):
        return len(self.column_ids)

    @classmethod
    def from_csv(cls, text, table: CategoricalTable):
        """Parse ``coordinates.csv``, mapping value labels to the table's codes."""
        rows = list(csv.reader(io.StringIO(text)))[1:]
        ids, labels, coords = [], [], []
        for r in rows:
            f, val = r[0], r[1]
            q = table.feature_ids.index(f)
            ids.append((f, table.category_labels[q].index(val)))
            labels.append(f"{f}:{val}")
            coords.append([float(x) for x in r[2:]])
        return cls(tuple(ids), np.array(coords, dtype=float).reshape(len(rows), -1), tuple(labels))


def _labels(model):
    if model.column_labels:
        return model.column_labels
    return tuple(f"{f}:{c}" for f, c in model.column_ids)


def full_cloud(model, d: int) -> PointCloud:
    if not 1 <= d <= model.J:
        raise ValueError(f"d must lie in [1, {model.J}], got {d}")
    return PointCloud(_labels(model), model.coordinates[:, :d])


def subcloud(model, table: CategoricalTable, language_id: str, d: int) -> SubCloud:
    """Points of the categories a language actually takes, one per feature."""
    if not 1 <= d <= model.J:
        raise ValueError(f"d must lie in [1, {model.J}], got {d}")
    try:
        i = table.sample_ids.index(language_id)
    except ValueError:
        raise KeyError(f"unknown language {language_id!r}") from None
    row = table.cells[i]
    if (row == MISSING).any():
        raise TableError(f"language {language_id} has missing values")
    index = {cid: j for j, cid in enumerate(model.column_ids)}
    labels = _labels(model)
    rows, sources = [], []
    for f, code in zip(table.feature_ids, row):
        key = (f, int(code))
        # the language itself observes this category, so it cannot have been dropped
        assert key in index, f"category {key} missing from the model"
        rows.append(index[key])
        sources.append(key)
    pts = PointCloud([labels[j] for j in rows], model.coordinates[rows, :d])
    return SubCloud(language_id, pts, tuple(sources))
