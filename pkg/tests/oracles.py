"""Independent reference implementations used only by the tests.

Nothing here imports the package's numerical code: each oracle is a
direct, slow transcription of the definition.
"""
from itertools import combinations, permutations

import numpy as np


# ----------------------------------------------------------------- MCA


def mca_oracle(cells):
    """Adjusted MCA of a complete integer table via numpy.linalg.eigh.

    Returns (lam, adj, tau, F, column_ids) with eigenvalues descending.
    """
    cells = np.asarray(cells)
    n, Q = cells.shape
    cols = [(q, c) for q in range(Q) for c in sorted(set(cells[:, q].tolist()))]
    Z = np.zeros((n, len(cols)))
    for i in range(n):
        for j, (q, c) in enumerate(cols):
            Z[i, j] = 1.0 if cells[i, q] == c else 0.0
    B = np.zeros((len(cols), len(cols)))
    for a in range(len(cols)):
        for b in range(len(cols)):
            B[a, b] = sum(Z[i, a] * Z[i, b] for i in range(n))
    P = B / B.sum()
    r = P.sum(axis=1)
    S = (P - np.outer(r, r)) / np.sqrt(np.outer(r, r))
    lam, V = np.linalg.eigh(S)
    lam, V = lam[::-1], V[:, ::-1]
    J = len(cols)
    if Q > 1:
        adj = np.array([(Q / (Q - 1) * (x - 1 / Q)) ** 2 if x > 1 / Q else 0.0 for x in lam])
        tau = Q / (Q - 1) * (np.sum(lam**2) - (J - Q) / Q**2)
    else:
        adj, tau = np.zeros(J), 0.0
    F = V / np.sqrt(r)[:, None] * np.sqrt(adj)[None, :]
    return lam, adj, tau, F, cols


def eigen_clusters(values, tol=1e-7):
    """Index groups of (numerically) equal consecutive eigenvalues."""
    groups, cur = [], [0]
    for j in range(1, len(values)):
        if abs(values[j] - values[j - 1]) <= tol:
            cur.append(j)
        else:
            groups.append(cur)
            cur = [j]
    groups.append(cur)
    return groups


# ----------------------------------------------------------- homology


def random_closed_complex(rng, max_vertices=8, max_dim=3):
    """A random simplicial complex, closed under faces, with monotone values.

    Returns a list of (simplex tuple, value) sorted so faces come first.
    """
    n = int(rng.integers(1, max_vertices + 1))
    top = []
    for _ in range(int(rng.integers(1, 6))):
        k = int(rng.integers(1, min(max_dim, n - 1) + 2)) if n > 1 else 1
        top.append(tuple(sorted(rng.choice(n, size=k, replace=False).tolist())))
    simplices = {(v,) for v in range(n)}
    for s in top:
        for k in range(1, len(s) + 1):
            simplices.update(combinations(s, k))
    value = {}
    for s in sorted(simplices, key=len):
        base = max((value[f] for f in combinations(s, len(s) - 1)), default=0.0) if len(s) > 1 else 0.0
        value[s] = base + float(rng.integers(0, 3))
    return sorted(value.items(), key=lambda kv: (kv[1], len(kv[0]), kv[0]))


def double_boundary_is_zero(simplex):
    """Apply the boundary twice with mod-2 counting."""
    counts = {}
    for i in range(len(simplex)):
        face = simplex[:i] + simplex[i + 1:]
        for j in range(len(face)):
            ff = face[:j] + face[j + 1:]
            counts[ff] = counts.get(ff, 0) + 1
    return all(c % 2 == 0 for c in counts.values())


def rips_diagram_oracle(points, max_hom_dim=1, dist=None):
    """Finite and essential pairs of a Rips filtration by dense elimination.

    The full complex up to dimension ``max_hom_dim + 1`` is enumerated
    with itertools, ordered by (diameter, dimension, vertices) and reduced
    as a dense 0/1 matrix. Zero-persistence pairs are dropped. Returns a
    sorted list of (dim, birth, death) with death ``inf`` for essentials,
    restricted to dims ``<= max_hom_dim``. Passing ``dist`` reuses a given
    distance matrix so that only the reduction is being compared.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if dist is None:
        dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    simplices = []
    for k in range(1, min(max_hom_dim + 2, n) + 1):
        for s in combinations(range(n), k):
            diam = max((dist[a, b] for a, b in combinations(s, 2)), default=0.0)
            simplices.append((diam, k - 1, s))
    simplices.sort()
    index = {s: i for i, (_, _, s) in enumerate(simplices)}
    m = len(simplices)
    M = np.zeros((m, m), dtype=np.uint8)
    for j, (_, k, s) in enumerate(simplices):
        if k > 0:
            for i in range(len(s)):
                M[index[s[:i] + s[i + 1:]], j] = 1
    low = {}
    lows = [-1] * m
    for j in range(m):
        while True:
            nz = np.flatnonzero(M[:, j])
            if nz.size == 0:
                break
            lw = int(nz[-1])
            if lw in low:
                M[:, j] ^= M[:, low[lw]]
            else:
                low[lw] = j
                lows[j] = lw
                break
    out = []
    paired = set()
    for j in range(m):
        if lows[j] >= 0:
            b = lows[j]
            paired.update((b, j))
            dim = simplices[b][1]
            if dim <= max_hom_dim and simplices[j][0] > simplices[b][0]:
                out.append((dim, simplices[b][0], simplices[j][0]))
    for i, (v, k, _) in enumerate(simplices):
        if i not in paired and k <= max_hom_dim and not M[:, i].any():
            out.append((k, v, float("inf")))
    return sorted(out)


# -------------------------------------------------------- distances


def matching_oracle(a, b, q=2.0, ground="Lq"):
    """Wasserstein-q (or bottleneck for q=inf) by enumerating all matchings.

    Every partial injection between the two point sets is tried; unmatched
    points go to their diagonal projection.
    """
    a = [tuple(p) for p in np.asarray(a, dtype=float).reshape(-1, 2)]
    b = [tuple(p) for p in np.asarray(b, dtype=float).reshape(-1, 2)]

    def cost(x, y):
        d = np.abs(np.subtract(x, y))
        if ground == "Linf" or q == np.inf:
            return float(d.max())
        return float((d**q).sum() ** (1 / q))

    def diag(x):
        m = (x[0] + x[1]) / 2
        return (m, m)

    best = np.inf
    for k in range(min(len(a), len(b)) + 1):
        for sa in combinations(range(len(a)), k):
            for sb in permutations(range(len(b)), k):
                costs = [cost(a[i], b[j]) for i, j in zip(sa, sb)]
                costs += [cost(a[i], diag(a[i])) for i in range(len(a)) if i not in sa]
                costs += [cost(b[j], diag(b[j])) for j in range(len(b)) if j not in sb]
                if q == np.inf:
                    val = max(costs, default=0.0)
                else:
                    val = sum(c**q for c in costs) ** (1 / q)
                best = min(best, val)
    return best


def cloud_wasserstein_oracle(p1, p2, q):
    """Wasserstein-q between equal-size clouds over all bijections."""
    n = len(p1)
    best = np.inf
    for perm in permutations(range(n)):
        d = sum(np.linalg.norm(p1[i] - p2[j]) ** q for i, j in enumerate(perm))
        best = min(best, d ** (1 / q))
    return best


# ------------------------------------------------- permutation test


def partition_loss(dm, g1, g2):
    """Half the sum of the two within-group averages over ordered pairs.

    A singleton group averages to 0.
    """
    def avg(g):
        if len(g) < 2:
            return 0.0
        return sum(dm[i][j] for i in g for j in g if i != j) / (len(g) * (len(g) - 1))
    return 0.5 * (avg(g1) + avg(g2))
