"""Loading and cleaning of categorical typological tables.

A table is stored as an integer grid of per-feature category codes, with
``MISSING`` (-1) for unknown cells. Codes are assigned per feature in the
order values are first seen, and the original value strings are kept as
display labels.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

MISSING = -1
DEFAULT_SENTINELS = frozenset({"", "?", "NA"})

# Grambank codes its word-order features as 1 = "XY", 2 = "YX", 3 = "both".
DEFAULT_TERNARY_MAP = {"1": (1, 0), "2": (0, 1), "3": (1, 1)}


class TableError(ValueError):
    """Raised for malformed input files or impossible preprocessing requests."""


@dataclass(frozen=True, eq=False)
class CategoricalTable:
    sample_ids: tuple
    feature_ids: tuple
    cells: np.ndarray
    category_labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        object.__setattr__(self, "feature_ids", tuple(self.feature_ids))
        object.__setattr__(
            self, "category_labels", tuple(tuple(lab) for lab in self.category_labels)
        )
        cells = np.asarray(self.cells, dtype=np.int64).reshape(
            len(self.sample_ids), len(self.feature_ids)
        )
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise TableError("duplicate sample ids")
        if len(set(self.feature_ids)) != len(self.feature_ids):
            raise TableError("duplicate feature ids")
        if len(self.category_labels) != len(self.feature_ids):
            raise TableError("one label list is required per feature")
        for q, labels in enumerate(self.category_labels):
            col = cells[:, q]
            bad = (col != MISSING) & ((col < 0) | (col >= len(labels)))
            if bad.any():
                raise TableError(
                    f"feature {self.feature_ids[q]!r} has codes without labels"
                )

    @property
    def shape(self):
        return self.cells.shape

    @property
    def missing_mask(self):
        return self.cells == MISSING

    def label(self, feature_index, code):
        return self.category_labels[feature_index][code]

    def value_label(self, sample_id, feature_id):
        i = self.sample_ids.index(sample_id)
        q = self.feature_ids.index(feature_id)
        code = self.cells[i, q]
        return None if code == MISSING else self.category_labels[q][code]

    def take(self, sample_idx=None, feature_idx=None):
        """Sub-table by integer positions (order preserved)."""
        si = np.arange(len(self.sample_ids)) if sample_idx is None else np.asarray(sample_idx, dtype=int)
        fi = np.arange(len(self.feature_ids)) if feature_idx is None else np.asarray(feature_idx, dtype=int)
        return CategoricalTable(
            [self.sample_ids[i] for i in si],
            [self.feature_ids[q] for q in fi],
            self.cells[np.ix_(si, fi)],
            [self.category_labels[q] for q in fi],
        )

    def equals(self, other):
        return (
            self.sample_ids == other.sample_ids
            and self.feature_ids == other.feature_ids
            and self.category_labels == other.category_labels
            and np.array_equal(self.cells, other.cells)
        )

    def to_wide_csv(self):
        """Serialize with value labels; missing cells are written empty."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["Language_ID", *self.feature_ids])
        for i, sid in enumerate(self.sample_ids):
            row = [sid]
            for q in range(len(self.feature_ids)):
                c = self.cells[i, q]
                row.append("" if c == MISSING else self.category_labels[q][c])
            w.writerow(row)
        return buf.getvalue()


@dataclass
class PreprocessReport:
    dropped_constant_features: list = field(default_factory=list)
    dropped_excluded_samples: list = field(default_factory=list)
    dropped_by_missingness: tuple = field(default_factory=lambda: ([], []))
    imputed_cell_count: int = 0
    ternary_splits: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def merge(self, other: "PreprocessReport") -> "PreprocessReport":
        return PreprocessReport(
            self.dropped_constant_features + other.dropped_constant_features,
            self.dropped_excluded_samples + other.dropped_excluded_samples,
            (
                self.dropped_by_missingness[0] + other.dropped_by_missingness[0],
                self.dropped_by_missingness[1] + other.dropped_by_missingness[1],
            ),
            self.imputed_cell_count + other.imputed_cell_count,
            {**self.ternary_splits, **other.ternary_splits},
            self.warnings + other.warnings,
        )

    def to_text(self):
        lines = []
        for s in self.dropped_excluded_samples:
            lines.append(f"exclude sample {s}")
        for f in self.dropped_constant_features:
            lines.append(f"drop constant feature {f}")
        for f in self.dropped_by_missingness[0]:
            lines.append(f"drop feature {f} (missingness)")
        for s in self.dropped_by_missingness[1]:
            lines.append(f"drop sample {s} (missingness)")
        lines.append(f"imputed cells {self.imputed_cell_count}")
        for src, (a, b) in self.ternary_splits.items():
            lines.append(f"split ternary {src} -> {a}, {b}")
        for msg in self.warnings:
            lines.append(f"warning {msg}")
        return "\n".join(lines) + "\n"

    def dropped_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "id", "reason"])
        for s in self.dropped_excluded_samples:
            w.writerow(["sample", s, "excluded"])
        for f in self.dropped_constant_features:
            w.writerow(["feature", f, "constant"])
        for f in self.dropped_by_missingness[0]:
            w.writerow(["feature", f, "missingness"])
        for s in self.dropped_by_missingness[1]:
            w.writerow(["sample", s, "missingness"])
        return buf.getvalue()


class _CodeBook:
    """Per-feature first-seen code assignment."""

    def __init__(self):
        self.labels: dict = {}

    def code(self, feature, value):
        labs = self.labels.setdefault(feature, {})
        if value not in labs:
            labs[value] = len(labs)
        return labs[value]

    def label_list(self, feature):
        labs = self.labels.get(feature, {})
        return [v for v, _ in sorted(labs.items(), key=lambda kv: kv[1])]


def load_value_table(
    path,
    format: str = "long",
    sentinels: Iterable[str] = DEFAULT_SENTINELS,
    samples: Iterable[str] | None = None,
) -> CategoricalTable:
    """Read a categorical table from CSV.

    Parameters
    ----------
    path : path-like
        CSV file. ``long`` files need the columns ``Language_ID``,
        ``Parameter_ID`` and ``Value`` (extra columns are ignored, so a
        CLDF ``values.csv`` loads directly). ``wide`` files carry sample
        ids in the first column and feature ids in the header.
    format : {"long", "wide"}
    sentinels : iterable of str
        Values read as missing.
    samples : iterable of str, optional
        Keep only these sample ids (e.g. one macro-area).
    """
    sentinels = frozenset(sentinels)
    keep = None if samples is None else set(samples)
    with open(path, newline="", encoding="utf-8") as fh:
        text = fh.read()
    if format == "long":
        return _load_long(text, sentinels, keep)
    if format == "wide":
        return _load_wide(text, sentinels, keep)
    raise TableError(f"unknown table format {format!r}")


def _load_long(text, sentinels, keep):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TableError("empty file") from None
    try:
        li, pi, vi = (header.index(c) for c in ("Language_ID", "Parameter_ID", "Value"))
    except ValueError:
        raise TableError(
            "long format needs columns Language_ID, Parameter_ID, Value"
        ) from None

    values: dict = {}
    sample_order: dict = {}
    feature_order: dict = {}
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise TableError(
                f"line {reader.line_num}: expected {len(header)} fields, got {len(row)}"
            )
        lang, feat, val = row[li].strip(), row[pi].strip(), row[vi].strip()
        if not lang or not feat:
            raise TableError(f"line {reader.line_num}: empty Language_ID or Parameter_ID")
        if keep is not None and lang not in keep:
            continue
        sample_order.setdefault(lang, len(sample_order))
        feature_order.setdefault(feat, len(feature_order))
        if (lang, feat) in values and values[(lang, feat)] != val:
            raise TableError(
                f"conflicting values for ({lang}, {feat}): "
                f"{values[(lang, feat)]!r} vs {val!r} (line {reader.line_num})"
            )
        values[(lang, feat)] = val

    samples = list(sample_order)
    features = list(feature_order)
    book = _CodeBook()
    cells = np.full((len(samples), len(features)), MISSING, dtype=np.int64)
    for (lang, feat), val in values.items():
        if val in sentinels:
            continue
        cells[sample_order[lang], feature_order[feat]] = book.code(feat, val)
    return CategoricalTable(samples, features, cells, [book.label_list(f) for f in features])


def _load_wide(text, sentinels, keep):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TableError("empty file") from None
    features = [h.strip() for h in header[1:]]
    book = _CodeBook()
    samples, rows = [], []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise TableError(
                f"line {reader.line_num}: expected {len(header)} fields, got {len(row)}"
            )
        sid = row[0].strip()
        if keep is not None and sid not in keep:
            continue
        samples.append(sid)
        codes = []
        for feat, val in zip(features, row[1:]):
            val = val.strip()
            codes.append(MISSING if val in sentinels else book.code(feat, val))
        rows.append(codes)
    cells = np.array(rows, dtype=np.int64).reshape(len(samples), len(features))
    return CategoricalTable(samples, features, cells, [book.label_list(f) for f in features])


def read_wide_text(text: str, sentinels: Iterable[str] = DEFAULT_SENTINELS) -> CategoricalTable:
    """Parse a wide table from a string (as written by ``to_wide_csv``)."""
    return _load_wide(text, frozenset(sentinels), None)


def samples_in_macroarea(languages_csv, macroarea: str) -> list:
    """Ids from a CLDF ``languages.csv`` whose ``Macroarea`` matches."""
    with open(languages_csv, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [r["ID"] for r in rows if r.get("Macroarea", "") == macroarea]


def _is_constant(col):
    observed = col[col != MISSING]
    return observed.size == 0 or np.all(observed == observed[0])


def apply_exclusions(
    table: CategoricalTable, excluded_samples: Sequence[str] = (), drop_constant: bool = True
):
    """Remove listed samples, then (optionally) single-valued features."""
    report = PreprocessReport()
    excluded = list(dict.fromkeys(excluded_samples))
    present = set(table.sample_ids)
    for s in excluded:
        if s not in present:
            report.warnings.append(f"excluded sample {s} not present")
    drop = set(excluded) & present
    report.dropped_excluded_samples = [s for s in table.sample_ids if s in drop]
    keep_rows = [i for i, s in enumerate(table.sample_ids) if s not in drop]
    out = table.take(sample_idx=keep_rows)

    if drop_constant:
        keep_cols = []
        for q, f in enumerate(out.feature_ids):
            if _is_constant(out.cells[:, q]):
                report.dropped_constant_features.append(f)
            else:
                keep_cols.append(q)
        out = out.take(feature_idx=keep_cols)
    return out, report


def filter_by_missingness(table: CategoricalTable, max_fraction: float = 0.2):
    """Drop features, then samples, whose missing share exceeds ``max_fraction``.

    Each pass runs once; features are judged over all current samples and
    samples over the surviving features.
    """
    if not 0.0 <= max_fraction <= 1.0:
        raise TableError("max_fraction must lie in [0, 1]")
    report = PreprocessReport()
    n, m = table.shape
    if n == 0 or m == 0:
        raise TableError("table is empty")
    miss = table.missing_mask
    feat_frac = miss.mean(axis=0)
    keep_f = np.flatnonzero(feat_frac <= max_fraction)
    dropped_f = [table.feature_ids[q] for q in np.flatnonzero(feat_frac > max_fraction)]
    if keep_f.size == 0:
        raise TableError("missingness filter removed every feature")
    samp_frac = miss[:, keep_f].mean(axis=1)
    keep_s = np.flatnonzero(samp_frac <= max_fraction)
    dropped_s = [table.sample_ids[i] for i in np.flatnonzero(samp_frac > max_fraction)]
    if keep_s.size == 0:
        raise TableError("missingness filter removed every sample")
    report.dropped_by_missingness = (dropped_f, dropped_s)
    return table.take(keep_s, keep_f), report


def split_ternary(
    table: CategoricalTable,
    ternary_features: Sequence[str] = (),
    mapping: Mapping[str, tuple] | None = None,
):
    """Replace each listed feature ``F`` by binary features ``F_XY`` and ``F_YX``.

    ``mapping`` sends a value label to its (XY, YX) pair; missing stays
    missing in both halves. Derived features use labels ``"0"``/``"1"``
    with codes equal to the bit.
    """
    mapping = dict(DEFAULT_TERNARY_MAP if mapping is None else mapping)
    report = PreprocessReport()
    wanted = list(dict.fromkeys(ternary_features))
    for f in wanted:
        if f not in table.feature_ids:
            report.warnings.append(f"ternary feature {f} not present")
    wanted = set(wanted)

    feats, cols, labels = [], [], []
    for q, f in enumerate(table.feature_ids):
        col = table.cells[:, q]
        if f not in wanted:
            feats.append(f)
            cols.append(col)
            labels.append(table.category_labels[q])
            continue
        labs = table.category_labels[q]
        if len(labs) > 3:
            raise TableError(f"feature {f} has {len(labs)} categories; ternary expected")
        unknown = [lab for lab in labs if lab not in mapping]
        if unknown:
            raise TableError(f"feature {f}: no ternary mapping for values {unknown}")
        xy = np.full(col.shape, MISSING, dtype=np.int64)
        yx = np.full(col.shape, MISSING, dtype=np.int64)
        for code, lab in enumerate(labs):
            sel = col == code
            xy[sel], yx[sel] = mapping[lab]
        names = (f"{f}_XY", f"{f}_YX")
        feats.extend(names)
        cols.extend([xy, yx])
        labels.extend([("0", "1"), ("0", "1")])
        report.ternary_splits[f] = names
    cells = np.column_stack(cols) if cols else np.zeros((len(table.sample_ids), 0), dtype=np.int64)
    return CategoricalTable(table.sample_ids, feats, cells, labels), report


def _majority(codes, rng):
    values, counts = np.unique(codes, return_counts=True)
    best = values[counts == counts.max()]
    if best.size == 1:
        return int(best[0])
    return int(rng.choice(best))


def gower_distances(cells: np.ndarray, i: int):
    """Share of mismatches between row ``i`` and every row, over co-observed features.

    Rows sharing no observed feature with ``i`` get ``nan``.
    """
    obs = cells != MISSING
    both = obs & obs[i]
    n_common = both.sum(axis=1)
    mismatch = ((cells != cells[i]) & both).sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        d = mismatch / n_common
    d = d.astype(float)
    d[n_common == 0] = np.nan
    return d


def impute(table: CategoricalTable, method: str = "mode", k: int = 5, seed: int = 0):
    """Fill every missing cell.

    ``mode`` uses the per-feature majority code. ``knn`` takes the majority
    among the ``k`` Gower-nearest samples observed at that feature (distance
    ties broken by sample order), falling back to the mode when no sample
    shares an observed feature. Majority ties are resolved by a draw from a
    generator seeded with ``seed``.
    """
    if method not in ("mode", "knn"):
        raise TableError(f"unknown imputation method {method!r}")
    if method == "knn" and k < 1:
        raise TableError("k must be positive")
    cells = table.cells
    miss = cells == MISSING
    for q, f in enumerate(table.feature_ids):
        if miss[:, q].all():
            raise TableError(f"feature {f} is entirely missing")
    rng = np.random.default_rng(seed)
    out = cells.copy()
    report = PreprocessReport(imputed_cell_count=int(miss.sum()))
    if not miss.any():
        return table, report

    modes = {}

    def mode_of(q):
        if q not in modes:
            col = cells[:, q]
            modes[q] = _majority(col[col != MISSING], rng)
        return modes[q]

    for i in range(cells.shape[0]):
        gaps = np.flatnonzero(miss[i])
        if gaps.size == 0:
            continue
        dist = gower_distances(cells, i) if method == "knn" else None
        for q in gaps:
            if method == "mode":
                out[i, q] = mode_of(q)
                continue
            donors = np.flatnonzero(~miss[:, q] & ~np.isnan(dist))
            donors = donors[donors != i]
            if donors.size == 0:
                out[i, q] = mode_of(q)
                continue
            order = donors[np.argsort(dist[donors], kind="stable")][:k]
            out[i, q] = _majority(cells[order, q], rng)
    return CategoricalTable(table.sample_ids, table.feature_ids, out, table.category_labels), report


@dataclass
class PreprocessConfig:
    excluded_samples: tuple = ("katu1276", "tere1281")
    drop_constant: bool = True
    max_missing: float = 0.2
    impute_method: str = "mode"
    impute_k: int = 5
    seed: int = 0
    ternary_features: tuple = ("GB024", "GB025", "GB065", "GB130", "GB193", "GB203")
    ternary_map: dict = field(default_factory=lambda: dict(DEFAULT_TERNARY_MAP))


def preprocess(table: CategoricalTable, config: PreprocessConfig | None = None):
    """Exclusions, constant drop, missingness filter, imputation, ternary split."""
    config = config or PreprocessConfig()
    table, report = apply_exclusions(table, config.excluded_samples, config.drop_constant)
    table, r = filter_by_missingness(table, config.max_missing)
    report = report.merge(r)
    table, r = impute(table, config.impute_method, config.impute_k, config.seed)
    report = report.merge(r)
    table, r = split_ternary(table, config.ternary_features, config.ternary_map)
    return table, report.merge(r)
