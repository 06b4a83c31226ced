import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from langtopo import ingest
from langtopo.ingest import MISSING, CategoricalTable, TableError


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def binary_table(rows, ids=None, feats=None):
    rows = np.asarray(rows)
    ids = ids or [f"L{i}" for i in range(rows.shape[0])]
    feats = feats or [f"F{q}" for q in range(rows.shape[1])]
    return CategoricalTable(ids, feats, rows, [("0", "1")] * rows.shape[1])


LONG = """ID,Language_ID,Parameter_ID,Value,Comment
1,a,F1,1,
2,a,F2,0,x
3,b,F1,0,
4,b,F2,?,
5,c,F1,1,
"""


def test_long_format_codes_and_missing(tmp_path):
    t = ingest.load_value_table(write(tmp_path, "v.csv", LONG))
    assert t.sample_ids == ("a", "b", "c")
    assert t.feature_ids == ("F1", "F2")
    assert t.value_label("a", "F1") == "1"
    assert t.value_label("b", "F2") is None  # sentinel
    assert t.value_label("c", "F2") is None  # absent row
    assert t.missing_mask.sum() == 2
    assert not t.cells.flags.writeable


def test_long_format_sample_filter(tmp_path):
    t = ingest.load_value_table(write(tmp_path, "v.csv", LONG), samples=["a", "c"])
    assert t.sample_ids == ("a", "c")


def test_long_missing_column_is_rejected(tmp_path):
    with pytest.raises(TableError):
        ingest.load_value_table(write(tmp_path, "v.csv", "Language_ID,Value\na,1\n"))


def test_conflicting_duplicate_is_rejected(tmp_path):
    text = "Language_ID,Parameter_ID,Value\na,F1,1\na,F1,0\n"
    with pytest.raises(TableError):
        ingest.load_value_table(write(tmp_path, "v.csv", text))


def test_wide_row_length_error_names_line(tmp_path):
    text = "Language_ID,F1,F2\na,1,0\nb,1\n"
    with pytest.raises(TableError, match="3"):
        ingest.load_value_table(write(tmp_path, "v.csv", text), format="wide")


def test_wide_round_trip(tmp_path):
    t = ingest.load_value_table(write(tmp_path, "v.csv", LONG))
    back = ingest.read_wide_text(t.to_wide_csv())
    assert back.sample_ids == t.sample_ids
    for s in t.sample_ids:
        for f in t.feature_ids:
            assert back.value_label(s, f) == t.value_label(s, f)


def test_unknown_format(tmp_path):
    with pytest.raises(TableError):
        ingest.load_value_table(write(tmp_path, "v.csv", LONG), format="json")


def test_macroarea_selection(tmp_path):
    p = write(tmp_path, "languages.csv", "ID,Name,Macroarea\na,A,South America\nb,B,Africa\n")
    assert ingest.samples_in_macroarea(p, "South America") == ["a"]


def test_exclusions_and_constant_drop():
    t = binary_table([[1, 0, 1], [1, 1, 0], [1, 0, 0]], ids=["x", "y", "z"])
    out, rep = ingest.apply_exclusions(t, ["y", "absent"])
    assert out.sample_ids == ("x", "z")
    # F0 is constant everywhere, F1 becomes constant once y is gone
    assert rep.dropped_constant_features == ["F0", "F1"]
    assert out.feature_ids == ("F2",)
    assert any("absent" in w for w in rep.warnings)


def test_missingness_features_before_samples():
    m = MISSING
    rows = [
        [0, 1, m, m, 0],
        [1, 0, m, 1, 1],
        [0, 0, m, 0, 1],
        [1, 1, m, 1, 0],
        [0, 1, 1, 0, 1],
    ]
    t = binary_table(rows)
    out, rep = ingest.filter_by_missingness(t, 0.2)
    # F2 (80% missing) goes first; L0 then has 1/4 = 25% missing and goes too
    assert rep.dropped_by_missingness == (["F2"], ["L0"])
    assert out.shape == (4, 4)
    # with the threshold at 25% L0 survives
    out, rep = ingest.filter_by_missingness(t, 0.25)
    assert rep.dropped_by_missingness == (["F2"], [])


def test_missingness_empty_result_raises():
    m = MISSING
    with pytest.raises(TableError):
        ingest.filter_by_missingness(binary_table([[m, m], [m, 0]]), 0.2)


def test_ternary_split_default_mapping():
    t = CategoricalTable(["a", "b", "c", "d"], ["T", "F"], [[0, 0], [1, 1], [2, 0], [MISSING, 1]],
                         [("1", "2", "3"), ("0", "1")])
    out, rep = ingest.split_ternary(t, ["T"])
    assert out.feature_ids == ("T_XY", "T_YX", "F")
    assert out.value_label("a", "T_XY") == "1" and out.value_label("a", "T_YX") == "0"
    assert out.value_label("b", "T_XY") == "0" and out.value_label("b", "T_YX") == "1"
    assert out.value_label("c", "T_XY") == "1" and out.value_label("c", "T_YX") == "1"
    assert out.value_label("d", "T_XY") is None
    assert rep.ternary_splits == {"T": ("T_XY", "T_YX")}


def test_ternary_split_custom_mapping_and_errors():
    t = CategoricalTable(["a", "b"], ["T"], [[0], [1]], [("1", "3")])
    out, _ = ingest.split_ternary(t, ["T"], {"1": (1, 0), "2": (0, 1), "3": (0, 0)})
    assert out.value_label("b", "T_XY") == "0"
    with pytest.raises(TableError):
        ingest.split_ternary(t, ["T"], {"1": (1, 0)})
    wide = CategoricalTable(["a"], ["T"], [[0]], [("1", "2", "3", "4")])
    with pytest.raises(TableError):
        ingest.split_ternary(wide, ["T"])


def test_mode_imputation():
    m = MISSING
    t = binary_table([[1, 0], [1, 1], [0, m], [m, 1]])
    out, rep = ingest.impute(t, "mode")
    assert rep.imputed_cell_count == 2
    assert out.cells[3, 0] == 1
    assert out.cells[2, 1] == 1


def test_knn_imputation_uses_nearest():
    m = MISSING
    rows = [
        [1, 1, 1, 1],
        [1, 1, 1, 1],
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [0, 0, 0, 0],
        [1, 1, 1, m],
    ]
    out, _ = ingest.impute(binary_table(rows), "knn", k=2)
    # the mode of the last column is 0, but both nearest rows say 1
    assert out.cells[5, 3] == 1


def test_gower_distance():
    m = MISSING
    cells = np.array([[0, 1, m], [0, 0, 1], [m, m, 0]])
    d = ingest.gower_distances(cells, 0)
    assert d[0] == 0.0
    assert d[1] == 0.5
    assert np.isnan(d[2])


def test_imputation_is_seeded():
    rng = np.random.default_rng(3)
    rows = rng.integers(0, 2, (30, 6))
    rows[rng.random(rows.shape) < 0.15] = MISSING
    t = binary_table(rows)
    a, _ = ingest.impute(t, "knn", 3, seed=7)
    b, _ = ingest.impute(t, "knn", 3, seed=7)
    assert a.equals(b)
    assert not (a.cells == MISSING).any()


def test_preprocess_report_text():
    m = MISSING
    t = binary_table([[1, 0, 1], [1, 1, m], [1, 0, 0], [1, 1, 0], [1, 0, 1]],
                     ids=["a", "b", "katu1276", "d", "e"])
    out, rep = ingest.preprocess(t, ingest.PreprocessConfig(ternary_features=()))
    assert "katu1276" not in out.sample_ids
    txt = rep.to_text()
    assert "exclude sample katu1276" in txt and "drop constant feature F0" in txt
    assert rep.dropped_csv().splitlines()[0] == "kind,id,reason"


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 10).flatmap(
        lambda n: st.lists(st.lists(st.sampled_from([0, 1, MISSING]), min_size=4, max_size=4),
                           min_size=n, max_size=n)
    ),
    st.floats(0.0, 1.0),
)
def test_missingness_survivors_respect_threshold(rows, frac):
    t = binary_table(rows)
    try:
        out, rep = ingest.filter_by_missingness(t, frac)
    except TableError:
        return
    assert (out.missing_mask.mean(axis=1) <= frac + 1e-12).all()
    dropped_f, dropped_s = rep.dropped_by_missingness
    assert len(out.feature_ids) + len(dropped_f) == 4
    assert len(out.sample_ids) + len(dropped_s) == len(rows)
