"""Planted two-group dataset used by the examples and the end-to-end tests.

Background languages sit at angles around a circle and answer feature
``q`` with 1 exactly when they face the feature's direction ``phi_q``.
MCA then lays the categories out on a circle. An "arc" language takes the
categories of one half-circle, so its sub-cloud is an arc with no loop. A
"ring" language answers 1 to all but one feature, so its categories wrap
around the circle and its sub-cloud carries one persistent loop.

Running ``python -m langtopo.synthetic DIR`` checks the planted properties
with the full pipeline and then writes the files.
"""
from __future__ import annotations

import csv
import io
import sys
import tempfile
from importlib import resources
from pathlib import Path

import numpy as np

N_FEATURES = 16
N_RING = 6
N_ARC = 6
N_BACKGROUND = 36
MISSING_CELLS = 6
SEED = 2
LOOP_THRESHOLD = 0.3
MAX_P_VALUE = 0.05

FILES = ("synthetic_values.csv", "synthetic_groups.csv", "synthetic.yaml")

CONFIG = """\
# Run configuration for the bundled planted dataset.
input: synthetic_values.csv
format: long
exclude: [dial0001]
max_missing: 0.2
ternary_features: []
impute_method: mode
dims: 4
hom_dim: 1
metric: wasserstein
q: 2
ground: Lq
permutations: 100
seed: 0
exact: true
grouping: synthetic_groups.csv
out: out
"""


def planted_cells(seed: int = SEED):
    """Sample ids, feature ids and a 0/1 matrix with planted structure.

    Returns
    -------
    ids : list of str
    features : list of str
    cells : (n, Q) int ndarray
    groups : dict
        ``ring*`` languages map to ``"ring"``, ``arc*`` ones to ``"arc"``.
    """
    rng = np.random.default_rng(seed)
    phi = 2 * np.pi * np.arange(N_FEATURES) / N_FEATURES

    def facing(theta):
        return (np.cos(theta - phi) > 0).astype(int)

    ids, rows, groups = [], [], {}
    for i in range(N_RING):
        row = np.ones(N_FEATURES, dtype=int)
        row[rng.integers(N_FEATURES)] = 0
        ids.append(f"ring{i + 1:02d}")
        rows.append(row)
        groups[ids[-1]] = "ring"
    for i in range(N_ARC):
        ids.append(f"arc{i + 1:02d}")
        rows.append(facing(rng.uniform(0, 2 * np.pi)))
        groups[ids[-1]] = "arc"
    for i in range(N_BACKGROUND):
        ids.append(f"bg{i + 1:02d}")
        rows.append(facing(2 * np.pi * (i + rng.uniform()) / N_BACKGROUND))
    features = [f"SF{q + 1:02d}" for q in range(N_FEATURES)]
    return ids, features, np.array(rows), groups


def planted_tables(seed: int = SEED):
    """Long-format value CSV and grouping CSV as text.

    Besides the planted signal the table holds material the preprocessing
    has to remove: a dialect row listed for exclusion, a constant feature,
    a feature missing in most languages and a few blank background cells.
    """
    rng = np.random.default_rng(seed + 1)
    ids, features, cells, groups = planted_cells(seed)
    values = {(lang, f): str(cells[i, q]) for i, lang in enumerate(ids) for q, f in enumerate(features)}
    for lang in ids:
        values[(lang, "SFC1")] = "1"
    for i, lang in enumerate(ids):
        values[(lang, "SFM1")] = str(i % 2) if i % 3 == 0 else "?"
    for q, f in enumerate(features):
        values[("dial0001", f)] = str(1 - cells[0, q])
    background = [lang for lang in ids if lang.startswith("bg")]
    for k in rng.choice(len(background) * N_FEATURES, MISSING_CELLS, replace=False):
        values[(background[k // N_FEATURES], features[k % N_FEATURES])] = ""

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ID", "Language_ID", "Parameter_ID", "Value"])
    for n, ((lang, f), v) in enumerate(values.items(), start=1):
        w.writerow([n, lang, f, v])
    gbuf = io.StringIO()
    g = csv.writer(gbuf, lineterminator="\n")
    g.writerow(["Language_ID", "Group"])
    for lang, grp in groups.items():
        g.writerow([lang, grp])
    return buf.getvalue(), gbuf.getvalue()


def write_bundle(directory, seed: int = SEED):
    """Write the value table, grouping and run configuration to ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    values, groups = planted_tables(seed)
    for name, text in zip(FILES, (values, groups, CONFIG)):
        (directory / name).write_text(text, encoding="utf-8")
    return [directory / name for name in FILES]


def verify(directory, dims: int = 2):
    """Run the pipeline on a written bundle and check the planted structure.

    Every ring language must carry a degree-1 class with persistence above
    ``LOOP_THRESHOLD``, no arc language may, and the exact permutation test
    between the two groups must give p <= ``MAX_P_VALUE``.

    Returns
    -------
    dict
        ``persistence`` (largest degree-1 persistence per language) and
        ``p_value``.
    """
    from .persistence import PersistenceDiagram
    from .pipeline import PipelineConfig, run_pipeline

    directory = Path(directory)
    with tempfile.TemporaryDirectory() as out:
        cfg = PipelineConfig.load(directory / "synthetic.yaml", dims=dims, out=out, workers=1, exact=True)
        run_pipeline(cfg, stages=("ingest", "mca", "clouds", "diagrams", "distmat", "permtest"))
        pers = {}
        for lang in cfg.group_map():
            text = (Path(out) / f"diagram_{lang}.csv").read_text(encoding="utf-8")
            d = PersistenceDiagram.from_csv(text).in_dim(1)
            pers[lang] = float(d.persistence.max()) if len(d) else 0.0
        rows = list(csv.DictReader(io.StringIO((Path(out) / "permtest.csv").read_text(encoding="utf-8"))))
        p_value = float(rows[0]["p_value"])
    problems = [lang for lang, v in pers.items() if (v > LOOP_THRESHOLD) != lang.startswith("ring")]
    if problems or p_value > MAX_P_VALUE:
        raise AssertionError(f"planted structure not realised: languages {problems}, p = {p_value}")
    return {"persistence": pers, "p_value": p_value}


def bundled_path(name: str = "synthetic.yaml") -> Path:
    """Location of a shipped data file."""
    return Path(str(resources.files("langtopo") / "data" / name))


if __name__ == "__main__":
    with tempfile.TemporaryDirectory() as tmp:
        write_bundle(tmp)
        summary = verify(tmp)
    for p in write_bundle(sys.argv[1] if len(sys.argv) > 1 else bundled_path().parent):
        print(p)
    print(f"exact p = {summary['p_value']:.6g}")
    for lang, v in summary["persistence"].items():
        print(f"{lang}: largest degree-1 persistence {v:.3f}")
