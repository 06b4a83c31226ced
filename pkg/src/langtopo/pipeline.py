"""End-to-end run: ingest, MCA, sub-clouds, diagrams, distances, MDS, test, plots.

Every stage reads the files written by its predecessor in the output
directory, so a stage can be rerun on its own and ``run_pipeline`` is just
the stages in sequence.
"""
from __future__ import annotations

import csv
import hashlib
import io
import logging
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from . import ingest, mca, permtest, render
from .cloud import CategoryCoordinates, SubCloud, full_cloud, subcloud
from .mds import Embedding, classical_mds
from .metrics import LabeledMatrix, Metric, distance_matrix
from .persistence import (
    PersistenceDiagram,
    diagram,
    pairwise_distances,
    persistent_cycles_for_labels,
    reduce,
    rips_filtration,
)

log = logging.getLogger(__name__)

STAGES = ("ingest", "mca", "clouds", "diagrams", "distmat", "mds", "permtest", "plot")


class StageError(RuntimeError):
    def __init__(self, stage, cause):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineConfig:
    input: str = ""
    format: str = "long"
    languages_csv: str | None = None
    macroarea: str | None = None
    exclude: list = field(default_factory=lambda: ["katu1276", "tere1281"])
    drop_constant: bool = True
    max_missing: float = 0.2
    ternary_features: list = field(
        default_factory=lambda: ["GB024", "GB025", "GB065", "GB130", "GB193", "GB203"]
    )
    ternary_map: dict = field(default_factory=lambda: {k: list(v) for k, v in ingest.DEFAULT_TERNARY_MAP.items()})
    impute_method: str = "mode"
    impute_k: int = 5
    dims: int = 4
    hom_dim: int = 1
    max_scale: float | None = None
    metric: str = "wasserstein"
    q: float = 2.0
    ground: str = "Lq"
    permutations: int = 100
    seed: int = 0
    exact: bool = False
    groups: dict = field(default_factory=dict)
    grouping: str | None = None
    compare: list = field(default_factory=list)
    languages: list = field(default_factory=list)
    mds_dims: int = 2
    cycles: int = 1
    workers: int = 0
    out: str = "out"

    @classmethod
    def load(cls, path=None, **overrides):
        """Config from a YAML file; non-None ``overrides`` win."""
        data = {}
        if path is not None:
            with open(path, encoding="utf-8") as fh:
                data = yaml.safe_load(fh) or {}
            base = Path(path).resolve().parent
            for key in ("input", "languages_csv", "grouping"):
                if data.get(key) and not os.path.isabs(data[key]):
                    data[key] = str(base / data[key])
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def metric_obj(self):
        return Metric(self.metric, float(self.q), self.ground)

    def group_map(self):
        groups = dict(self.groups)
        if self.grouping:
            with open(self.grouping, newline="", encoding="utf-8") as fh:
                for row in csv.DictReader(fh):
                    groups[row["Language_ID"].strip()] = row["Group"].strip()
        return groups

    def n_workers(self):
        return self.workers if self.workers and self.workers > 0 else (os.cpu_count() or 1)


class Outputs:
    """Files written in one invocation, renamed ``*.partial`` on failure."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.written: list = []

    def path(self, name):
        return self.root / name

    def write(self, name, text):
        p = self.path(name)
        with open(p, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.written.append(p)
        return p

    def read(self, name):
        p = self.path(name)
        if not p.exists():
            raise FileNotFoundError(f"{p} not found; run the earlier stage first")
        return p.read_text(encoding="utf-8")

    def mark_partial(self):
        for p in self.written:
            if p.exists():
                p.replace(p.with_name(p.name + ".partial"))


def _safe(name):
    return re.sub(r"[^A-Za-z0-9_.-]", "_", str(name))


def stage_ingest(cfg: PipelineConfig, out: Outputs):
    samples = None
    if cfg.languages_csv and cfg.macroarea:
        samples = ingest.samples_in_macroarea(cfg.languages_csv, cfg.macroarea)
    table = ingest.load_value_table(cfg.input, cfg.format, samples=samples)
    pc = ingest.PreprocessConfig(
        excluded_samples=tuple(cfg.exclude),
        drop_constant=cfg.drop_constant,
        max_missing=cfg.max_missing,
        impute_method=cfg.impute_method,
        impute_k=cfg.impute_k,
        seed=cfg.seed,
        ternary_features=tuple(cfg.ternary_features),
        ternary_map={k: tuple(v) for k, v in cfg.ternary_map.items()},
    )
    table, report = ingest.preprocess(table, pc)
    out.write("table.csv", table.to_wide_csv())
    out.write("preprocess_report.txt", report.to_text())
    out.write("dropped.csv", report.dropped_csv())
    log.info("ingest: %d samples x %d features", *table.shape)
    return table, report


def _table(out):
    return ingest.read_wide_text(out.read("table.csv"))


def stage_mca(cfg, out):
    model = mca.fit(_table(out))
    out.write("coordinates.csv", model.coordinates_csv())
    try:
        out.write("scree.csv", model.scree_csv())
    except ValueError as exc:
        log.warning("mca: no scree table (%s)", exc)
    return model


def _languages(cfg, table):
    groups = cfg.group_map()
    absent = [x for x in groups if x not in table.sample_ids]
    if absent:
        raise KeyError(f"grouped languages absent after preprocessing: {absent}")
    langs = list(cfg.languages)
    if not langs:
        langs = [s for s in table.sample_ids if s in groups] if groups else list(table.sample_ids)
    missing = [x for x in langs if x not in table.sample_ids]
    if missing:
        raise KeyError(f"languages not in the preprocessed table: {missing}")
    return langs


def stage_clouds(cfg, out):
    table = _table(out)
    coords = CategoryCoordinates.from_csv(out.read("coordinates.csv"), table)
    langs = _languages(cfg, table)
    clouds = {}
    for lang in langs:
        sc = subcloud(coords, table, lang, cfg.dims)
        out.write(f"subcloud_{_safe(lang)}.csv", sc.to_csv())
        clouds[lang] = sc
    out.write("languages.txt", "\n".join(langs) + "\n")
    return clouds


def _diagram_job(args):
    lang, coords, labels, hom_dim, max_scale, n_cycles = args
    filt = rips_filtration(pairwise_distances(coords), hom_dim + 1, max_scale)
    red = reduce(filt)
    dgms = [diagram(red, p) for p in range(hom_dim + 1)]
    dgm = PersistenceDiagram(
        np.concatenate([d.dims for d in dgms]),
        np.concatenate([d.births for d in dgms]),
        np.concatenate([d.deaths for d in dgms]),
    )
    cycles = persistent_cycles_for_labels(red, dgms[hom_dim], labels, n_cycles) if n_cycles else []
    return lang, dgm.to_csv(), [c.labels for c in cycles]


def _language_list(out):
    return [x for x in out.read("languages.txt").splitlines() if x]


def stage_diagrams(cfg, out):
    jobs = []
    for lang in _language_list(out):
        sc = SubCloud.from_csv(lang, out.read(f"subcloud_{_safe(lang)}.csv"))
        jobs.append((lang, sc.coords, sc.labels, cfg.hom_dim, cfg.max_scale, cfg.cycles))
    workers = min(cfg.n_workers(), max(len(jobs), 1))
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_diagram_job, jobs))
    else:
        results = [_diagram_job(j) for j in jobs]
    for lang, text, cycles in results:
        out.write(f"diagram_{_safe(lang)}.csv", text)
        for k, labels in enumerate(cycles, start=1):
            out.write(f"cycle_{_safe(lang)}_{k}.csv", "label\n" + "".join(f"{x}\n" for x in labels))
    return {lang: PersistenceDiagram.from_csv(text) for lang, text, _ in results}


def _read_diagrams(cfg, out):
    res = {}
    for lang in _language_list(out):
        d = PersistenceDiagram.from_csv(out.read(f"diagram_{_safe(lang)}.csv"))
        res[lang] = d.in_dim(cfg.hom_dim)
    return res


def stage_distmat(cfg, out):
    dgms = _read_diagrams(cfg, out)
    mat = distance_matrix(dgms, cfg.metric_obj(), workers=1)
    out.write("distmat.csv", mat.to_csv())
    return mat


def stage_mds(cfg, out):
    mat = LabeledMatrix.from_csv(out.read("distmat.csv"))
    k = min(cfg.mds_dims, max(len(mat.labels) - 1, 1))
    emb = classical_mds(mat.values, k, mat.labels)
    out.write("mds.csv", emb.to_csv())
    out.write("mds_eigenvalues.csv", emb.eigenvalues_csv())
    return emb


def _two_groups(cfg, labels):
    groups = cfg.group_map()
    names = list(cfg.compare) or list(dict.fromkeys(groups[x] for x in labels if x in groups))
    if len(names) != 2:
        raise ValueError(f"the permutation test needs exactly two groups, got {names}")
    g1 = [x for x in labels if groups.get(x) == names[0]]
    g2 = [x for x in labels if groups.get(x) == names[1]]
    return names, g1, g2


def stage_permtest(cfg, out):
    mat = LabeledMatrix.from_csv(out.read("distmat.csv"))
    _, g1, g2 = _two_groups(cfg, mat.labels)
    dm = permtest.grouped_matrix(mat, g1, g2)
    desc = cfg.metric_obj().describe()
    if cfg.exact:
        res = permtest.exact_test_matrix(dm, len(g1), metric_name=desc)
    else:
        res = permtest.permutation_test_matrix(dm, len(g1), cfg.permutations, cfg.seed, desc)
    out.write("permtest.csv", res.to_csv())
    return res


def stage_plot(cfg, out):
    table = _table(out)
    groups = cfg.group_map()
    scree = out.path("scree.csv")
    if scree.exists():
        rows = list(csv.DictReader(io.StringIO(out.read("scree.csv"))))
        shares = [float(r["percentage"]) / 100 for r in rows]
        out.write("scree_mca.svg", render.render_plot(render.PlotSpec("scree", "Scree plot"), shares))
    coords = CategoryCoordinates.from_csv(out.read("coordinates.csv"), table)
    if coords.J >= 2:
        cloud = full_cloud(coords, 2)
        out.write("scatter_mca.svg", render.render_plot(render.PlotSpec("scatter", "MCA categories"), cloud))
    for lang in _language_list(out):
        sc = SubCloud.from_csv(lang, out.read(f"subcloud_{_safe(lang)}.csv"))
        if sc.points.d >= 2:
            spec = render.PlotSpec("subcloud", f"{lang}", show_labels=False)
            out.write(f"subcloud_{_safe(lang)}.svg", render.render_plot(spec, sc))
        dpath = out.path(f"diagram_{_safe(lang)}.csv")
        if dpath.exists():
            d = PersistenceDiagram.from_csv(out.read(dpath.name)).in_dim(cfg.hom_dim)
            spec = render.PlotSpec("diagram", f"{lang} H{cfg.hom_dim}")
            out.write(f"diagram_{_safe(lang)}.svg", render.render_plot(spec, d))
    mpath = out.path("mds.csv")
    if mpath.exists():
        rows = list(csv.reader(io.StringIO(out.read("mds.csv"))))
        labels = [r[0] for r in rows[1:]]
        xy = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
        emb = Embedding(tuple(labels), xy, np.zeros(xy.shape[1]), 0.0)
        kind = "mds3d" if xy.shape[1] >= 3 else "mds2d"
        if xy.shape[1] >= 2:
            spec = render.PlotSpec(kind, "MDS", show_labels=True, groups=groups)
            out.write(f"{kind}_{_safe(cfg.metric)}.svg", render.render_plot(spec, emb))


STAGE_FUNCS = {
    "ingest": stage_ingest,
    "mca": stage_mca,
    "clouds": stage_clouds,
    "diagrams": stage_diagrams,
    "distmat": stage_distmat,
    "mds": stage_mds,
    "permtest": stage_permtest,
    "plot": stage_plot,
}


def write_manifest(root):
    root = Path(root)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["file", "bytes", "sha256"])
    for p in sorted(root.iterdir()):
        if p.name == "manifest.csv" or p.name.endswith(".partial") or not p.is_file():
            continue
        data = p.read_bytes()
        w.writerow([p.name, len(data), hashlib.sha256(data).hexdigest()])
    text = buf.getvalue()
    (root / "manifest.csv").write_text(text, encoding="utf-8")
    return text


def run_stage(name, cfg: PipelineConfig, out: Outputs | None = None):
    out = out or Outputs(cfg.out)
    try:
        return STAGE_FUNCS[name](cfg, out)
    except Exception as exc:
        out.mark_partial()
        raise StageError(name, exc) from exc


def run_pipeline(cfg: PipelineConfig, stages=STAGES):
    """Run the stages in order and write ``manifest.csv``.

    On failure, every file written so far is renamed with a ``.partial``
    suffix and StageError names the failing stage.
    """
    out = Outputs(cfg.out)
    results = {}
    for name in stages:
        if name == "permtest" and not (cfg.groups or cfg.grouping):
            log.info("permtest skipped: no grouping given")
            continue
        if name == "mds":
            n = len(_language_list(out))
            if n < 2:
                log.info("mds skipped: fewer than two languages")
                continue
        if name == "distmat" and len(_language_list(out)) < 2:
            log.info("distmat skipped: fewer than two languages")
            continue
        try:
            results[name] = STAGE_FUNCS[name](cfg, out)
        except Exception as exc:
            out.mark_partial()
            raise StageError(name, exc) from exc
    write_manifest(out.root)
    return results


def config_dump(cfg: PipelineConfig):
    return yaml.safe_dump(asdict(cfg), sort_keys=True)
