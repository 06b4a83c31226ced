import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from langtopo.mds import classical_mds
from langtopo.persistence import pairwise_distances


def test_collinear_points():
    x = np.array([[0.0], [1.0], [3.0]])
    emb = classical_mds(pairwise_distances(x), 1, labels="abc")
    assert np.allclose(np.abs(emb.coordinates[:, 0] - emb.coordinates[0, 0]), [0, 1, 3])
    assert emb.labels == ("a", "b", "c")
    assert emb.stress == pytest.approx(0.0, abs=1e-10)


def test_padding_when_rank_is_short():
    # three collinear points have one positive eigenvalue; a second axis is zero-filled
    emb = classical_mds(pairwise_distances(np.array([[0.0], [1.0], [2.0]])), 2)
    assert emb.padded
    assert np.allclose(emb.coordinates[:, 1], 0.0)
    assert emb.eigenvalues_used[1] == 0.0


def test_input_validation():
    with pytest.raises(ValueError):
        classical_mds(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(ValueError):
        classical_mds(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        classical_mds(np.zeros((3, 3)), k=3)


def test_csv_outputs():
    emb = classical_mds(pairwise_distances(np.random.default_rng(0).normal(size=(5, 2))), 2, labels="vwxyz")
    assert emb.to_csv().splitlines()[0] == "label,dim1,dim2"
    ev = emb.eigenvalues_csv().splitlines()
    assert ev[0] == "component,eigenvalue,used"
    assert ev[-1].startswith("stress,")


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 9), st.integers(1, 3), st.integers(0, 10**6))
def test_euclidean_distances_recovered(n, d, seed):
    x = np.random.default_rng(seed).normal(size=(n, d))
    dm = pairwise_distances(x)
    k = min(d, n - 1)
    emb = classical_mds(dm, k)
    assert np.allclose(pairwise_distances(emb.coordinates), dm, atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 8), st.integers(0, 10**6))
def test_label_permutation(n, seed):
    rng = np.random.default_rng(seed)
    dm = pairwise_distances(rng.normal(size=(n, 2)))
    perm = rng.permutation(n)
    a = classical_mds(dm, 2)
    b = classical_mds(dm[np.ix_(perm, perm)], 2)
    # same configuration up to an isometry: compare the embedded distances
    da = pairwise_distances(a.coordinates)[np.ix_(perm, perm)]
    assert np.allclose(da, pairwise_distances(b.coordinates), atol=1e-8)
