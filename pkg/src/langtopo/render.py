"""Static SVG figures: scree, scatter, sub-cloud, persistence diagram, MDS.

Output is plain SVG 1.1 text. Every datum becomes one element whose id
starts with ``pt-``; numbers are printed with fixed precision so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .cloud import PointCloud, SubCloud
from .mds import Embedding
from .persistence import PersistenceDiagram

KINDS = ("scree", "scatter", "subcloud", "diagram", "mds2d", "mds3d")
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
MARGIN = 48


@dataclass
class PlotSpec:
    kind: str
    title: str = ""
    width: int = 480
    height: int = 480
    show_labels: bool = False
    group_colors: dict = field(default_factory=dict)
    groups: dict = field(default_factory=dict)  # label -> group name
    axes: tuple = (0, 1)
    far_threshold: float | None = None  # diagram points with larger persistence get class "far"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive")


def _f(x):
    return f"{x:.3f}"


class _Canvas:
    def __init__(self, spec: PlotSpec, xlim, ylim):
        self.spec = spec
        self.parts = []
        self.xlim = _pad(xlim)
        self.ylim = _pad(ylim)

    def sx(self, x):
        lo, hi = self.xlim
        return MARGIN + (x - lo) / (hi - lo) * (self.spec.width - 2 * MARGIN)

    def sy(self, y):
        lo, hi = self.ylim
        return self.spec.height - MARGIN - (y - lo) / (hi - lo) * (self.spec.height - 2 * MARGIN)

    def add(self, s):
        self.parts.append(s)

    def frame(self, xlabel="", ylabel=""):
        w, h = self.spec.width, self.spec.height
        self.add(
            f'<rect x="{MARGIN}" y="{MARGIN}" width="{w - 2 * MARGIN}" height="{h - 2 * MARGIN}" '
            'fill="none" stroke="#444" stroke-width="1"/>'
        )
        for axis, lim in (("x", self.xlim), ("y", self.ylim)):
            for t in np.linspace(lim[0], lim[1], 5):
                if axis == "x":
                    x = self.sx(t)
                    self.add(
                        f'<text x="{_f(x)}" y="{_f(h - MARGIN + 14)}" font-size="9" '
                        f'text-anchor="middle">{t:.2f}</text>'
                    )
                else:
                    y = self.sy(t)
                    self.add(
                        f'<text x="{_f(MARGIN - 4)}" y="{_f(y + 3)}" font-size="9" '
                        f'text-anchor="end">{t:.2f}</text>'
                    )
        if xlabel:
            self.add(f'<text x="{w / 2:.1f}" y="{h - 10}" font-size="11" text-anchor="middle">{escape(xlabel)}</text>')
        if ylabel:
            self.add(
                f'<text x="12" y="{h / 2:.1f}" font-size="11" text-anchor="middle" '
                f'transform="rotate(-90 12 {h / 2:.1f})">{escape(ylabel)}</text>'
            )

    def svg(self):
        w, h = self.spec.width, self.spec.height
        head = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" '
            f'viewBox="0 0 {w} {h}">\n'
            f'<rect width="{w}" height="{h}" fill="white"/>\n'
        )
        if self.spec.title:
            head += f'<text x="{w / 2:.1f}" y="20" font-size="13" text-anchor="middle">{escape(self.spec.title)}</text>\n'
        return head + "\n".join(self.parts) + "\n</svg>\n"


def _pad(lim):
    lo, hi = float(lim[0]), float(lim[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        c = lo if math.isfinite(lo) else 0.0
        return c - 1.0, c + 1.0
    span = hi - lo
    return lo - 0.05 * span, hi + 0.05 * span


def _color(spec, label, default=PALETTE[0]):
    group = spec.groups.get(label)
    if group is None:
        return default
    if group in spec.group_colors:
        return spec.group_colors[group]
    names = sorted(set(spec.groups.values()))
    return PALETTE[names.index(group) % len(PALETTE)]


def _points(spec, labels, xy, sizes=None):
    if len(labels) == 0:
        c = _Canvas(spec, (0, 1), (0, 1))
        c.frame()
        return c.svg()
    xy = np.asarray(xy, dtype=float)
    c = _Canvas(spec, (xy[:, 0].min(), xy[:, 0].max()), (xy[:, 1].min(), xy[:, 1].max()))
    c.frame(f"dim{spec.axes[0] + 1}", f"dim{spec.axes[1] + 1}")
    for i, (lab, (x, y)) in enumerate(zip(labels, xy)):
        r = 3.0 if sizes is None else sizes[i]
        c.add(
            f'<circle id="pt-{i}" class="marker" cx="{_f(c.sx(x))}" cy="{_f(c.sy(y))}" r="{_f(r)}" '
            f'fill="{_color(spec, lab)}" fill-opacity="0.8"><title>{escape(str(lab))}</title></circle>'
        )
        if spec.show_labels:
            c.add(
                f'<text x="{_f(c.sx(x) + 4)}" y="{_f(c.sy(y) - 4)}" font-size="8">{escape(str(lab))}</text>'
            )
    return c.svg()


def _scree(spec, data):
    vals = np.asarray(data, dtype=float).ravel()
    c = _Canvas(spec, (0.5, max(len(vals), 1) + 0.5), (0.0, max(float(vals.max()) if vals.size else 1.0, 1e-12)))
    c.frame("component", "share of adjusted inertia")
    base = c.sy(0.0)
    bw = (spec.width - 2 * MARGIN) / max(len(vals), 1) * 0.7
    for i, v in enumerate(vals):
        x = c.sx(i + 1) - bw / 2
        top = c.sy(v)
        c.add(
            f'<rect id="pt-{i}" class="marker" x="{_f(x)}" y="{_f(top)}" width="{_f(bw)}" '
            f'height="{_f(base - top)}" fill="{PALETTE[0]}"/>'
        )
    return c.svg()


def _diagram(spec, dgm):
    pts = dgm.points if isinstance(dgm, PersistenceDiagram) else np.asarray(dgm, dtype=float).reshape(-1, 2)
    finite = np.isfinite(pts[:, 1])
    top = pts[finite, 1].max() if finite.any() else (pts[:, 0].max() if len(pts) else 1.0)
    cap = 1.05 * top if top > 0 else 1.0
    hi = max(cap, 1e-12)
    c = _Canvas(spec, (0.0, hi), (0.0, hi))
    c.frame("birth", "death")
    lo_x, hi_x = c.xlim
    lo = max(lo_x, c.ylim[0])
    hi2 = min(hi_x, c.ylim[1])
    c.add(
        f'<line class="diagonal" x1="{_f(c.sx(lo))}" y1="{_f(c.sy(lo))}" x2="{_f(c.sx(hi2))}" '
        f'y2="{_f(c.sy(hi2))}" stroke="#888" stroke-dasharray="4 3"/>'
    )
    for i, (b, d) in enumerate(pts):
        if math.isfinite(d):
            cls = "marker"
            if spec.far_threshold is not None and d - b > spec.far_threshold:
                cls += " far"
            c.add(
                f'<circle id="pt-{i}" class="{cls}" cx="{_f(c.sx(b))}" cy="{_f(c.sy(d))}" r="3.000" '
                f'fill="{PALETTE[1]}"/>'
            )
        else:
            x, y = c.sx(b), c.sy(cap)
            c.add(
                f'<path id="pt-{i}" class="marker essential" d="M{_f(x)} {_f(y - 4)} '
                f'L{_f(x - 4)} {_f(y + 3)} L{_f(x + 4)} {_f(y + 3)} Z" fill="{PALETTE[0]}"/>'
            )
    return c.svg()


def render_plot(spec: PlotSpec, data) -> str:
    """SVG text for ``data`` drawn as ``spec.kind``.

    ``scree`` takes a vector of shares; ``scatter`` a PointCloud;
    ``subcloud`` a SubCloud; ``diagram`` a PersistenceDiagram or (n, 2)
    array; ``mds2d`` / ``mds3d`` an Embedding. In ``mds3d`` the third
    coordinate sets the marker size.
    """
    kind = spec.kind
    a, b = spec.axes
    if kind == "scree":
        return _scree(spec, data)
    if kind == "diagram":
        if not isinstance(data, PersistenceDiagram) and np.asarray(data).size % 2:
            raise ValueError("diagram data must be (birth, death) pairs")
        return _diagram(spec, data)
    if kind == "scatter":
        if not isinstance(data, PointCloud):
            raise ValueError("scatter needs a PointCloud")
        return _points(spec, data.labels, data.coords[:, [a, b]] if len(data) else [])
    if kind == "subcloud":
        if not isinstance(data, SubCloud):
            raise ValueError("subcloud needs a SubCloud")
        return _points(spec, data.labels, data.coords[:, [a, b]] if len(data.labels) else [])
    if kind in ("mds2d", "mds3d"):
        if not isinstance(data, Embedding):
            raise ValueError(f"{kind} needs an Embedding")
        k = data.coordinates.shape[1]
        need = 3 if kind == "mds3d" else 2
        if k < need:
            raise ValueError(f"{kind} needs at least {need} embedding dimensions")
        xy = data.coordinates[:, [a, b]]
        sizes = None
        if kind == "mds3d":
            third = [i for i in range(k) if i not in (a, b)][0]
            z = data.coordinates[:, third]
            span = z.max() - z.min()
            sizes = 3.0 + (6.0 * (z - z.min()) / span if span > 0 else np.zeros_like(z))
        return _points(spec, data.labels, xy, sizes)
    raise ValueError(f"unknown plot kind {kind!r}")


def marker_count(svg: str, css_class: str = "marker") -> int:
    """Number of data elements carrying ``css_class``."""
    return sum(css_class in m.split() for m in re.findall(r'id="pt-\d+" class="([^"]*)"', svg))


__all__ = ["PlotSpec", "render_plot", "marker_count", "KINDS"]
