"""Brute-force reference computations on explicit adjacency, for small N only.

These deliberately share no code with the arithmetic paths they check.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .graph import NetworkSpec


def labels(spec: NetworkSpec) -> list[int]:
    return [i for i in range(1, spec.size + 1) if i not in spec.removed]


def adjacency_matrix(spec: NetworkSpec) -> np.ndarray:
    """Dense 0/1 matrix indexed by label - 1; removed labels get empty rows."""
    n = spec.size
    a = np.zeros((n, n), dtype=np.int64)
    live = labels(spec)
    for x, i in enumerate(live):
        for j in live[x + 1 :]:
            if j % i == 0 or i % j == 0:
                a[i - 1, j - 1] = a[j - 1, i - 1] = 1
    return a


def edge_count(spec: NetworkSpec) -> int:
    return sum(1 for i, j in combinations(labels(spec), 2) if j % i == 0)


def degrees(spec: NetworkSpec) -> dict[int, int]:
    a = adjacency_matrix(spec)
    return {i: int(a[i - 1].sum()) for i in labels(spec)}


def triangle_count(spec: NetworkSpec) -> int:
    """Every unordered triple tested for all three edges."""
    a = adjacency_matrix(spec)
    live = [i - 1 for i in labels(spec)]
    return sum(1 for x, y, z in combinations(live, 3) if a[x, y] and a[y, z] and a[x, z])


def triangle_count_matrix(spec: NetworkSpec) -> int:
    a = adjacency_matrix(spec)
    return int(np.trace(a @ a @ a)) // 6


def local_clustering(spec: NetworkSpec) -> dict[int, float]:
    a = adjacency_matrix(spec)
    out = {}
    for i in labels(spec):
        nb = np.nonzero(a[i - 1])[0]
        k = nb.size
        e = int(a[np.ix_(nb, nb)].sum()) // 2
        out[i] = e / (k * (k - 1) / 2) if k >= 2 else 0.0
    return out


def assortativity_dense(spec: NetworkSpec) -> float:
    return assortativity_matrix(adjacency_matrix(spec))


def assortativity_matrix(a: np.ndarray) -> float:
    """Double sum over a dense adjacency matrix, written out term by term."""
    a = np.asarray(a, dtype=np.float64)
    k = a.sum(axis=1)
    two_m = k.sum()
    kk = np.outer(k, k)
    num = ((a - kk / two_m) * kk).sum()
    den = ((np.diag(k) - kk / two_m) * kk).sum()
    return float(num / den)
