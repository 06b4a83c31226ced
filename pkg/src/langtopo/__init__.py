"""Topological comparison of languages from categorical typology tables.

Pipeline: a language-by-feature table is reduced with adjusted multiple
correspondence analysis; each language selects the category points it
takes, giving a small point cloud; Vietoris-Rips persistent homology turns
each cloud into a persistence diagram; diagrams are compared with
Wasserstein or bottleneck distances, embedded with classical MDS and
tested for group differences by permutation.
"""
from .cloud import ANALYSIS_DIMS, VIS_DIMS, PointCloud, SubCloud, full_cloud, subcloud
from .ingest import CategoricalTable, PreprocessConfig, PreprocessReport, TableError, load_value_table, preprocess
from .mca import McaModel, burt_matrix, fit, indicator_matrix, mca_adjusted, variance_percentages
from .mds import Embedding, classical_mds
from .metrics import LabeledMatrix, Metric, bottleneck, distance_matrix, wasserstein
from .permtest import TestResult, exact_permutation_test, group_loss, permutation_test
from .persistence import (
    Filtration,
    PersistenceDiagram,
    Reduction,
    betti_at,
    boundary,
    diagram,
    reduce,
    representative_cycle,
    rips_filtration,
)
from .render import PlotSpec, render_plot

__all__ = [
    "ANALYSIS_DIMS",
    "VIS_DIMS",
    "PointCloud",
    "SubCloud",
    "full_cloud",
    "subcloud",
    "CategoricalTable",
    "PreprocessConfig",
    "PreprocessReport",
    "TableError",
    "load_value_table",
    "preprocess",
    "McaModel",
    "burt_matrix",
    "fit",
    "indicator_matrix",
    "mca_adjusted",
    "variance_percentages",
    "Embedding",
    "classical_mds",
    "LabeledMatrix",
    "Metric",
    "bottleneck",
    "distance_matrix",
    "wasserstein",
    "TestResult",
    "exact_permutation_test",
    "group_loss",
    "permutation_test",
    "Filtration",
    "PersistenceDiagram",
    "Reduction",
    "betti_at",
    "boundary",
    "diagram",
    "reduce",
    "representative_cycle",
    "rips_filtration",
    "PlotSpec",
    "render_plot",
]

__version__ = "0.1.0"
