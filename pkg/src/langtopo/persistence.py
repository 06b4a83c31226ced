"""Vietoris-Rips filtrations and persistent homology over GF(2).

Filtration values use the *diameter* convention by default: a simplex
enters at the largest pairwise distance among its vertices, so an edge
appears at its length. Pass ``convention="radius"`` to halve every value
(balls of radius r overlap pairwise once the distance is at most 2r).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

DEFAULT_SIMPLEX_BUDGET = 5_000_000


class FiltrationError(ValueError):
    pass


def boundary(simplex: Sequence[int]) -> list:
    """Facets of a simplex, obtained by dropping one vertex at a time.

    Returned in lexicographic order; a vertex has an empty boundary.
    """
    s = tuple(simplex)
    if len(s) <= 1:
        return []
    return sorted(s[:i] + s[i + 1:] for i in range(len(s)))


def chain_boundary(chain) -> set:
    """GF(2) boundary of a chain given as an iterable of simplices."""
    out: set = set()
    for s in chain:
        out ^= set(boundary(s))
    return out


@dataclass(eq=False)
class Filtration:
    """Simplices sorted by (value, dimension, vertices) with face indices.

    ``truncated`` marks a Rips complex cut off at ``max_dim`` below the full
    simplex; homology in degree ``max_dim`` is then unreliable.
    """

    simplices: list
    values: np.ndarray
    faces: list
    max_dim: int
    truncated: bool = False
    n_vertices: int = 0
    scale_convention: str = "diameter"
    complete: bool = False
    _index: dict | None = field(default=None, repr=False)
    _dims: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.simplices)

    @property
    def dims(self):
        if self._dims is None:
            self._dims = np.fromiter((len(s) - 1 for s in self.simplices), dtype=np.int64, count=len(self))
        return self._dims

    def index(self, simplex):
        if self._index is None:
            self._index = {s: i for i, s in enumerate(self.simplices)}
        return self._index[tuple(simplex)]


def pairwise_distances(points) -> np.ndarray:
    x = np.asarray(getattr(points, "coords", points), dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    diff = x[:, None, :] - x[None, :, :]
    dm = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    np.fill_diagonal(dm, 0.0)
    return dm


def _keys(layer, base):
    key = np.zeros(layer.shape[0], dtype=np.int64)
    for c in range(layer.shape[1]):
        key = key * base + layer[:, c]
    return key


def _assemble(layers, layer_values, n_vertices, max_dim, truncated, convention, complete, names=None):
    """Sort simplices (given per dimension as vertex arrays) and index their faces.

    ``names`` maps the internal vertex ranks back to user vertex labels.
    """
    base = max(n_vertices, 1)
    sizes = [len(layer) for layer in layers]
    offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    total = int(offsets[-1])
    width = len(layers)
    dims = np.concatenate([np.full(m, p, dtype=np.int64) for p, m in enumerate(sizes)])
    values = np.concatenate([np.asarray(v, dtype=float) for v in layer_values])
    pad = np.full((total, width), -1, dtype=np.int64)
    for p, layer in enumerate(layers):
        pad[offsets[p]:offsets[p + 1], : p + 1] = layer
    order = np.lexsort(tuple(pad[:, k] for k in reversed(range(width))) + (dims, values))
    pos = np.empty(total, dtype=np.int64)
    pos[order] = np.arange(total)

    face_rows = [()] * sizes[0]
    prev_sorted = prev_perm = None
    for p, layer in enumerate(layers):
        keys = _keys(layer, base)
        perm = np.argsort(keys, kind="stable")
        if p > 0:
            cols = []
            for drop in range(p + 1):
                sub = np.delete(layer, drop, axis=1)
                sk = _keys(sub, base)
                at = np.searchsorted(prev_sorted, sk)
                at = np.minimum(at, len(prev_sorted) - 1)
                if len(sk) and not np.array_equal(prev_sorted[at], sk):
                    raise FiltrationError(f"a face of a dimension-{p} simplex is missing")
                cols.append(pos[offsets[p - 1] + prev_perm[at]])
            face_rows.extend(np.sort(np.column_stack(cols), axis=1).tolist() if cols and len(layer) else [])
        prev_sorted, prev_perm = keys[perm], perm

    flat = pad.tolist()
    if names is None:
        simplices = [tuple(flat[i][: dims[i] + 1]) for i in order]
    else:
        simplices = [tuple(names[v] for v in flat[i][: dims[i] + 1]) for i in order]
    faces = [tuple(face_rows[i]) for i in order]
    return Filtration(
        simplices, values[order], faces, max_dim, truncated, n_vertices, convention, complete,
        _dims=dims[order],
    )


def rips_filtration(
    dm,
    max_dim: int = 2,
    max_scale: float | None = None,
    convention: str = "diameter",
    budget: int = DEFAULT_SIMPLEX_BUDGET,
) -> Filtration:
    """Vietoris-Rips filtration of a distance matrix.

    Parameters
    ----------
    dm : (n, n) array_like
        Symmetric distance matrix.
    max_dim : int
        Largest simplex dimension built. Homology is exact up to degree
        ``max_dim - 1``.
    max_scale : float, optional
        Largest filtration value kept, in the units of ``convention``.
        Defaults to the largest distance (radius: half of it), which
        yields every simplex up to ``max_dim``.
    convention : {"diameter", "radius"}
    budget : int
        Maximum number of simplices; exceeding it raises FiltrationError.
    """
    dm = np.asarray(dm, dtype=float)
    n = dm.shape[0]
    if max_dim < 0:
        raise FiltrationError("max_dim must be non-negative")
    if convention not in ("diameter", "radius"):
        raise FiltrationError(f"unknown scale convention {convention!r}")
    factor = 0.5 if convention == "radius" else 1.0
    if max_scale is None:
        max_scale = factor * (dm.max() if n else 0.0)
    elif max_scale <= 0:
        raise FiltrationError("max_scale must be positive")
    cutoff = max_scale / factor

    layers = [np.arange(n, dtype=np.int64)[:, None]]
    layer_values = [np.zeros(n)]
    if max_dim >= 1 and n > 1:
        adj = dm <= cutoff
        np.fill_diagonal(adj, False)
        iu, ju = np.nonzero(np.triu(adj, 1))
        layer = np.column_stack([iu, ju])
        diam = dm[iu, ju]
        for k in range(1, max_dim + 1):
            if k > 1:
                if layer.shape[0] == 0:
                    break
                mask = np.logical_and.reduce([adj[layer[:, c]] for c in range(layer.shape[1])])
                mask &= np.arange(n)[None, :] > layer[:, -1:]
                rows, extra = np.nonzero(mask)
                total = sum(len(x) for x in layers) + rows.size
                if total > budget:
                    raise FiltrationError(
                        f"Rips complex exceeds the simplex budget ({total} > {budget})"
                    )
                new_diam = diam[rows]
                for c in range(layer.shape[1]):
                    new_diam = np.maximum(new_diam, dm[layer[rows, c], extra])
                layer = np.column_stack([layer[rows], extra])
                diam = new_diam
            layers.append(layer)
            layer_values.append(diam * factor)
    counts = [len(x) for x in layers] + [0] * (max_dim + 1 - len(layers))
    truncated = max_dim < n - 1
    complete = all(c == math.comb(n, k + 1) for k, c in enumerate(counts))
    return _assemble(layers, layer_values, n, max_dim, truncated, convention, complete)


def filtration_from_simplices(items, max_dim: int | None = None) -> Filtration:
    """Validated filtration from explicit ``(vertices, value)`` pairs.

    The complex is taken as given (not truncated); every face must be listed
    with a value no larger than its coface.
    """
    given: dict = {}
    for verts, value in items:
        s = tuple(sorted(verts))
        if len(set(s)) != len(s) or not s:
            raise FiltrationError(f"invalid simplex {verts!r}")
        if value < 0:
            raise FiltrationError(f"negative filtration value for {s}")
        if s in given and given[s] != value:
            raise FiltrationError(f"simplex {s} listed twice with different values")
        given[s] = float(value)
    for s, v in given.items():
        for f in boundary(s):
            if f not in given:
                raise FiltrationError(f"face {f} of {s} is missing")
            if given[f] > v:
                raise FiltrationError(f"face {f} enters after its coface {s}")
    names = sorted({v for s in given for v in s})
    rank = {v: i for i, v in enumerate(names)}
    top = max((len(s) - 1 for s in given), default=0)
    layers = [[] for _ in range(top + 1)]
    layer_values = [[] for _ in range(top + 1)]
    for s, v in given.items():
        layers[len(s) - 1].append([rank[x] for x in s])
        layer_values[len(s) - 1].append(v)
    layers = [np.array(x, dtype=np.int64).reshape(-1, p + 1) for p, x in enumerate(layers)]
    return _assemble(
        layers,
        layer_values,
        len(names),
        top if max_dim is None else max_dim,
        False,
        "diameter",
        False,
        names,
    )


@dataclass(eq=False)
class Reduction:
    """Outcome of the boundary-matrix reduction.

    ``pairs`` holds (birth index, death index) into the filtration;
    ``reduced`` maps each death index to its reduced column (a set of
    simplex indices forming a cycle); ``cycles`` maps essential indices to
    a cycle chain when cycle tracking was requested.
    """

    filtration: Filtration
    pairs: list
    essential: list
    reduced: dict
    cycles: dict | None = None


def _reduce_columns(columns, faces, pivot_of, reduced, chains, dims=None, top_dim=None, top_target=None):
    """Left-to-right reduction of the given columns against ``pivot_of``."""
    found = 0
    for j in columns:
        if top_target is not None and dims[j] == top_dim:
            if found >= top_target:
                continue
        col = set(faces[j])
        chain = {j} if chains is not None else None
        while col:
            k = pivot_of.get(max(col))
            if k is None:
                break
            col ^= reduced[k]
            if chain is not None:
                chain ^= chains[k]
        if col:
            pivot_of[max(col)] = j
            reduced[j] = col
            if top_target is not None and dims[j] == top_dim:
                found += 1
        if chains is not None:
            chains[j] = chain


def _cohomology_deaths(filtration: Filtration) -> dict:
    """Persistence pairing from the coboundary matrix, bottom-up with clearing.

    Returns a map death index -> birth index. The pairing coincides with the
    one from reducing the boundary matrix.
    """
    faces = filtration.faces
    dims = filtration.dims
    cob: list = [[] for _ in range(len(faces))]
    for j, fs in enumerate(faces):
        for f in fs:
            cob[f].append(j)
    deaths: dict = {}
    cleared: set = set()
    top = int(dims.max()) if len(faces) else 0
    for p in range(top):
        pivot_of: dict = {}
        red: dict = {}
        for j in np.flatnonzero(dims == p)[::-1].tolist():
            if j in cleared:
                continue
            col = set(cob[j])
            while col:
                k = pivot_of.get(min(col))
                if k is None:
                    break
                col ^= red[k]
            if col:
                piv = min(col)
                pivot_of[piv] = j
                red[j] = col
                deaths[piv] = j
        cleared = set(pivot_of)
    return deaths


def reduce(filtration: Filtration, method: str = "cohomology", track_cycles: bool = False) -> Reduction:
    """GF(2) column reduction of the filtration's boundary matrix.

    A column is repeatedly XOR-ed with the earlier column sharing its
    lowest nonzero row until that row is unique or the column vanishes.

    ``method`` picks the column schedule; all three give identical pairs
    and identical reduced columns:

    ``"standard"``
        every column, left to right.
    ``"clearing"``
        dimensions top-down; a column whose simplex is already a pivot row
        is known to vanish and is skipped.
    ``"cohomology"``
        the pairing is first read off the coboundary matrix (bottom-up with
        clearing, cheap for Rips complexes); only the death columns are then
        reduced, since vanishing columns never take part in additions.

    With ``track_cycles`` the column operations are recorded so that
    essential classes get a representative cycle.
    """
    faces = filtration.faces
    n = len(faces)
    dims = filtration.dims
    pivot_of: dict = {}
    reduced: dict = {}
    chains: dict | None = {} if track_cycles else None

    if method == "cohomology":
        deaths = _cohomology_deaths(filtration)
        _reduce_columns(sorted(deaths), faces, pivot_of, reduced, chains)
        assert all(pivot_of.get(b) == d for d, b in deaths.items()), "pairing mismatch"
    elif method in ("standard", "clearing"):
        top_target = None
        if filtration.complete and filtration.truncated and filtration.max_dim >= 1:
            # a full k-skeleton on n vertices has rank(boundary_k) = C(n-1, k)
            top_target = math.comb(filtration.n_vertices - 1, filtration.max_dim)
        if method == "standard":
            columns = [j for j in range(n) if dims[j] > 0]
        else:
            columns = _clearing_schedule(dims, pivot_of)
        _reduce_columns(columns, faces, pivot_of, reduced, chains, dims, filtration.max_dim, top_target)
    else:
        raise ValueError(f"unknown reduction method {method!r}")

    pairs = sorted(pivot_of.items(), key=lambda p: p[1])
    births = set(pivot_of)
    essential = [j for j in range(n) if j not in reduced and j not in births]
    cycles = None
    if track_cycles:
        cycles = {}
        for j in essential:
            if dims[j] == 0:
                cycles[j] = {j}
            elif j in chains:
                cycles[j] = chains[j]
            elif not (filtration.truncated and dims[j] == filtration.max_dim):
                _reduce_columns([j], faces, pivot_of, reduced, chains)
                assert j not in reduced
                cycles[j] = chains[j]
    return Reduction(filtration, pairs, essential, reduced, cycles)


def _clearing_schedule(dims, pivot_of):
    """Columns by decreasing dimension, skipping those cleared on the way."""
    top = int(dims.max()) if len(dims) else 0
    for p in range(top, 0, -1):
        for j in np.flatnonzero(dims == p).tolist():
            if j not in pivot_of:
                yield j


@dataclass(eq=False)
class PersistenceDiagram:
    """Birth/death pairs, with the simplex indices that created them."""

    dims: np.ndarray
    births: np.ndarray
    deaths: np.ndarray
    sources: list = field(default_factory=list)
    representatives: dict | None = None

    def __len__(self):
        return len(self.births)

    @classmethod
    def from_pairs(cls, pairs, dim=1):
        """Diagram from an iterable of (birth, death) tuples."""
        arr = np.asarray(list(pairs), dtype=float).reshape(-1, 2)
        return cls(np.full(len(arr), dim, dtype=np.int64), arr[:, 0].copy(), arr[:, 1].copy())

    @property
    def points(self):
        return np.column_stack([self.births, self.deaths]) if len(self) else np.zeros((0, 2))

    @property
    def persistence(self):
        return self.deaths - self.births

    def finite(self):
        keep = np.isfinite(self.deaths)
        return self.select(keep)

    def select(self, mask):
        mask = np.asarray(mask, dtype=bool)
        src = [s for s, m in zip(self.sources, mask) if m] if self.sources else []
        return PersistenceDiagram(self.dims[mask], self.births[mask], self.deaths[mask], src)

    def in_dim(self, p):
        return self.select(self.dims == p)

    def multiset(self):
        return sorted(zip(self.dims.tolist(), self.births.tolist(), self.deaths.tolist()))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dim", "birth", "death"])
        for p, b, d in zip(self.dims, self.births, self.deaths):
            w.writerow([int(p), format(b, ".17g"), "inf" if math.isinf(d) else format(d, ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls(
            np.array([int(r["dim"]) for r in rows], dtype=np.int64),
            np.array([float(r["birth"]) for r in rows]),
            np.array([float(r["death"]) for r in rows]),
        )


def diagram(source, p: int) -> PersistenceDiagram:
    """Degree-``p`` persistence diagram, zero-persistence pairs dropped.

    ``source`` is a Filtration (reduced here) or a Reduction.
    """
    red = source if isinstance(source, Reduction) else reduce(source)
    filt = red.filtration
    if filt.truncated and p > filt.max_dim - 1:
        raise FiltrationError(
            f"degree {p} needs simplices of dimension {p + 1}; rebuild with max_dim >= {p + 1}"
        )
    vals = filt.values
    dims, births, deaths, src = [], [], [], []
    for b, d in red.pairs:
        if len(filt.simplices[b]) - 1 != p or vals[d] <= vals[b]:
            continue
        dims.append(p)
        births.append(vals[b])
        deaths.append(vals[d])
        src.append((b, d))
    for e in red.essential:
        if len(filt.simplices[e]) - 1 == p:
            dims.append(p)
            births.append(vals[e])
            deaths.append(math.inf)
            src.append((e, None))
    return PersistenceDiagram(
        np.array(dims, dtype=np.int64), np.array(births, dtype=float), np.array(deaths, dtype=float), src
    )


def betti_at(dgm: PersistenceDiagram, t: float) -> int:
    return int(np.sum((dgm.births <= t) & (t < dgm.deaths)))


@dataclass(frozen=True)
class Cycle:
    simplices: tuple
    vertices: tuple
    labels: tuple = ()


def representative_cycle(red: Reduction, pair, labels=None) -> Cycle:
    """Cycle representing the class of a persistence pair.

    ``pair`` is (birth index, death index) from a diagram's ``sources``. For
    a finite pair this is the reduced column of the death simplex. Essential
    classes (death ``None``) need a reduction run with ``track_cycles``.
    """
    filt = red.filtration
    b, d = pair
    if d is None:
        if red.cycles is None or b not in red.cycles:
            raise FiltrationError(
                "essential class has no death column; reduce with track_cycles=True"
            )
        idx = red.cycles[b]
    else:
        if d not in red.reduced:
            raise FiltrationError(f"simplex {d} is not a death simplex")
        idx = red.reduced[d]
    simplices = tuple(sorted(filt.simplices[i] for i in idx))
    verts = tuple(sorted({v for s in simplices for v in s}))
    names = tuple(labels[v] for v in verts) if labels is not None else ()
    return Cycle(simplices, verts, names)


def persistence(points, max_hom_dim: int = 1, max_scale=None, convention="diameter", track_cycles=False):
    """Rips reduction of a point cloud, built one dimension above ``max_hom_dim``."""
    dm = pairwise_distances(points)
    filt = rips_filtration(dm, max_hom_dim + 1, max_scale, convention)
    return reduce(filt, track_cycles=track_cycles)


def dense_reduction_pairs(filtration: Filtration):
    """Reference pairing via dense GF(2) elimination on a numpy matrix.

    Slow; meant for cross-checking :func:`reduce` on small complexes.
    """
    n = len(filtration)
    m = np.zeros((n, n), dtype=np.uint8)
    for j, fs in enumerate(filtration.faces):
        m[list(fs), j] = 1
    lows = np.full(n, -1)
    for j in range(n):
        while True:
            nz = np.flatnonzero(m[:, j])
            if nz.size == 0:
                break
            low = nz[-1]
            hit = np.flatnonzero(lows[:j] == low)
            if hit.size == 0:
                lows[j] = low
                break
            m[:, j] ^= m[:, hit[0]]
    return [(int(lows[j]), j) for j in range(n) if lows[j] >= 0]


def persistent_cycles_for_labels(red: Reduction, dgm: PersistenceDiagram, labels, top: int = 1):
    """Representatives of the ``top`` most persistent finite classes in ``dgm``."""
    finite = [(dgm.deaths[i] - dgm.births[i], i) for i in range(len(dgm)) if np.isfinite(dgm.deaths[i])]
    finite.sort(key=lambda t: (-t[0], t[1]))
    return [representative_cycle(red, dgm.sources[i], labels) for _, i in finite[:top]]


__all__ = [
    "Filtration",
    "PersistenceDiagram",
    "Reduction",
    "Cycle",
    "FiltrationError",
    "boundary",
    "chain_boundary",
    "pairwise_distances",
    "rips_filtration",
    "filtration_from_simplices",
    "reduce",
    "diagram",
    "betti_at",
    "representative_cycle",
    "persistence",
    "dense_reduction_pairs",
    "persistent_cycles_for_labels",
]
