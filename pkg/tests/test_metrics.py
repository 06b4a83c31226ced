import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import cloud_wasserstein_oracle, matching_oracle

from langtopo import persistence as P
from langtopo.assignment import has_perfect_matching, linear_assignment
from langtopo.metrics import (
    LabeledMatrix,
    Metric,
    bottleneck,
    distance_matrix,
    strip_essential,
    wasserstein,
)


def random_diagram(rng, k):
    b = rng.uniform(0, 1, k)
    return np.column_stack([b, b + rng.uniform(0.01, 1, k)])


# ------------------------------------------------------------ assignment


def test_assignment_small():
    rows, cols = linear_assignment([[4, 1, 3], [2, 0, 5], [3, 2, 2]])
    assert sorted(rows) == [0, 1, 2]
    assert sum([[4, 1, 3], [2, 0, 5], [3, 2, 2]][r][c] for r, c in zip(rows, cols)) == 5


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_assignment_against_permutations(n, seed):
    from itertools import permutations

    c = np.random.default_rng(seed).uniform(0, 10, (n, n))
    rows, cols = linear_assignment(c)
    best = min(sum(c[i, p[i]] for i in range(n)) for p in permutations(range(n)))
    assert c[rows, cols].sum() == pytest.approx(best, abs=1e-12)
    assert sorted(cols) == list(range(n))


def test_perfect_matching_check():
    assert has_perfect_matching([[1, 0], [0, 1]])
    assert not has_perfect_matching([[1, 1], [0, 0]])
    assert not has_perfect_matching([[1, 0], [1, 0]])


def test_assignment_rejects_bad_input():
    with pytest.raises(ValueError):
        linear_assignment(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        linear_assignment([[np.inf]])


# ------------------------------------------------------------- distances


def test_single_point_against_empty():
    assert wasserstein([[0, 2]], [], 2) == pytest.approx(math.sqrt(2))
    assert bottleneck([[0, 2]], []) == pytest.approx(1.0)


def test_identical_diagrams():
    d = [[0.1, 0.5], [0.2, 0.9]]
    assert wasserstein(d, d) == 0.0
    assert bottleneck(d, d) == 0.0
    assert wasserstein([], []) == 0.0


def test_point_to_point_versus_diagonal():
    # two distant points are cheaper to send to the diagonal
    assert bottleneck([[0, 1]], [[0, 2]]) == pytest.approx(1.0)
    assert bottleneck([[0, 1]], [[0, 1.5]]) == pytest.approx(0.5)


def test_infinite_deaths_must_be_handled():
    d = P.PersistenceDiagram.from_pairs([(0.0, math.inf), (0.0, 1.0)], dim=0)
    with pytest.raises(ValueError):
        wasserstein(d, d)
    assert strip_essential(d).shape == (1, 2)
    assert strip_essential(d, cap=5.0)[:, 1].tolist() == [5.0, 1.0]


def test_argument_checks():
    with pytest.raises(ValueError):
        wasserstein([[0, 1]], [[0, 2]], q=0.5)
    assert wasserstein([[0, 1]], [[0, 2]], q=math.inf) == bottleneck([[0, 1]], [[0, 2]])
    with pytest.raises(ValueError):
        wasserstein([[0, 1]], [[0, 2]], ground="L7")
    mixed = P.PersistenceDiagram(np.array([0, 1]), np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        wasserstein(mixed, [])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 10**6))
def test_exhaustive_matching_oracle(k1, k2, seed):
    rng = np.random.default_rng(seed)
    a, b = random_diagram(rng, k1), random_diagram(rng, k2)
    for q in (1, 2):
        assert wasserstein(a, b, q) == pytest.approx(matching_oracle(a, b, q), abs=1e-12)
        assert wasserstein(a, b, q, "Linf") == pytest.approx(matching_oracle(a, b, q, "Linf"), abs=1e-12)
    assert bottleneck(a, b) == pytest.approx(matching_oracle(a, b, math.inf), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_metric_axioms(seed):
    rng = np.random.default_rng(seed)
    ds = [random_diagram(rng, int(rng.integers(0, 6))) for _ in range(3)]
    for f in (lambda x, y: wasserstein(x, y, 1), lambda x, y: wasserstein(x, y, 2), bottleneck):
        ab, ba = f(ds[0], ds[1]), f(ds[1], ds[0])
        assert ab == ba
        assert f(ds[0], ds[2]) <= ab + f(ds[1], ds[2]) + 1e-9
        shuffled = ds[0][rng.permutation(len(ds[0]))]
        assert f(ds[0], shuffled) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([0.01, 0.05]))
def test_bottleneck_stability(seed, eps):
    rng = np.random.default_rng(seed)
    x = rng.uniform(0, 1, (12, 2))
    step = rng.normal(size=x.shape)
    y = x + eps * rng.uniform(0, 1, (12, 1)) * step / np.linalg.norm(step, axis=1, keepdims=True)

    def dgm(pts):
        f = P.rips_filtration(P.pairwise_distances(pts), 2, convention="radius")
        return P.diagram(f, 1)

    assert bottleneck(dgm(x), dgm(y)) <= eps + 1e-9


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 6), st.integers(0, 10**6), st.sampled_from([1, 2]))
def test_wasserstein_stability(m, seed, q):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(m, 2))
    y = x + rng.normal(scale=0.2, size=x.shape)
    bound = 2 ** (m / (q + 1)) * cloud_wasserstein_oracle(x, y, q)
    for p in (0, 1):
        a = P.diagram(P.rips_filtration(P.pairwise_distances(x), 2, convention="radius"), p)
        b = P.diagram(P.rips_filtration(P.pairwise_distances(y), 2, convention="radius"), p)
        assert wasserstein(strip_essential(a), strip_essential(b), q) <= bound + 1e-9


# ---------------------------------------------------------------- matrix


def test_distance_matrix_and_csv():
    rng = np.random.default_rng(0)
    dgms = {f"L{i}": random_diagram(rng, 3) for i in range(4)}
    m = distance_matrix(dgms, Metric("wasserstein", 2))
    assert m.values.shape == (4, 4)
    assert np.array_equal(m.values, m.values.T)
    assert np.all(np.diag(m.values) == 0)
    assert m.values[0, 1] == wasserstein(dgms["L0"], dgms["L1"])
    threaded = distance_matrix(dgms, Metric("bottleneck"), workers=3)
    assert threaded.values[2, 3] == bottleneck(dgms["L2"], dgms["L3"])
    back = LabeledMatrix.from_csv(m.to_csv())
    assert back.labels == m.labels and np.array_equal(back.values, m.values)
    assert back.sub(["L2", "L0"]).values[0, 1] == m.values[2, 0]


def test_distance_matrix_essential_policies():
    d = P.PersistenceDiagram.from_pairs([(0.0, math.inf), (0.0, 1.0)], dim=0)
    e = P.PersistenceDiagram.from_pairs([(0.0, math.inf)], dim=0)
    assert distance_matrix({"a": d, "b": e}).values[0, 1] == pytest.approx(math.sqrt(0.5))
    capped = distance_matrix({"a": d, "b": e}, essential="cap", cap=3.0)
    assert capped.values[0, 1] == pytest.approx(math.sqrt(0.5))
    with pytest.raises(ValueError):
        distance_matrix({"a": d, "b": e}, essential="error")
    with pytest.raises(ValueError):
        distance_matrix({"a": d})


def test_metric_description():
    assert Metric().describe() == "wasserstein(q=2,ground=Lq)"
    assert Metric("bottleneck").describe() == "bottleneck"
    with pytest.raises(ValueError):
        Metric("cosine")([], [])
