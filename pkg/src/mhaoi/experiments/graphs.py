"""Connected simple graphs up to isomorphism, for small node counts.

Every connected graph on ``n`` nodes is a connected graph on ``n - 1`` nodes
plus one vertex joined to a nonempty neighbour set (delete any non-cut vertex
to see this). Candidates are grown that way from the previous level and reduced
to a canonical form: the smallest edge bitmask over all vertex orderings.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

MAX_NODES = 7


def _pair_bits(n: int) -> np.ndarray:
    """``W[u, v] = 2**idx(u, v)`` for ``u < v`` (lexicographic pair order), else 0."""
    W = np.zeros((n, n), dtype=np.int64)
    for idx, (u, v) in enumerate(itertools.combinations(range(n), 2)):
        W[u, v] = 1 << idx
    return W


def canonical_codes(adj: np.ndarray) -> np.ndarray:
    """Canonical code of each adjacency matrix in a ``(C, n, n)`` 0/1 stack."""
    n = adj.shape[1]
    W = _pair_bits(n)
    A = adj.astype(np.int64)
    best = None
    for perm in itertools.permutations(range(n)):
        p = list(perm)
        code = np.einsum("cij,ij->c", A[:, p][:, :, p], W)
        best = code if best is None else np.minimum(best, code)
    return best


def decode(code: int, n: int) -> list[tuple[int, int]]:
    """1-based edge list of a canonical code."""
    return [(u + 1, v + 1) for idx, (u, v) in enumerate(itertools.combinations(range(n), 2))
            if (int(code) >> idx) & 1]


def _adjacency(code: int, n: int) -> np.ndarray:
    A = np.zeros((n, n), dtype=np.int8)
    for u, v in decode(code, n):
        A[u - 1, v - 1] = A[v - 1, u - 1] = 1
    return A


@lru_cache(maxsize=None)
def _codes(n: int) -> tuple:
    if n == 1:
        return (0,)
    prev = _codes(n - 1)
    cands = []
    for code in prev:
        base = _adjacency(code, n - 1)
        for mask in range(1, 1 << (n - 1)):
            A = np.zeros((n, n), dtype=np.int8)
            A[:n - 1, :n - 1] = base
            nb = [i for i in range(n - 1) if (mask >> i) & 1]
            A[n - 1, nb] = A[nb, n - 1] = 1
            cands.append(A)
    codes = np.unique(canonical_codes(np.stack(cands)))
    ordered = sorted(int(c) for c in codes)
    return tuple(sorted(ordered, key=lambda c: (bin(c).count("1"), c)))


def enumerate_connected_graphs(n: int) -> list[list[tuple[int, int]]]:
    """One edge list per isomorphism class of connected graphs on ``n`` nodes.

    Ordered by edge count, then by canonical code, so the order is stable.
    """
    if not 1 <= n <= MAX_NODES:
        raise ValueError(f"graph enumeration supports 1 <= n <= {MAX_NODES}, got {n}")
    return [decode(c, n) for c in _codes(n)]
