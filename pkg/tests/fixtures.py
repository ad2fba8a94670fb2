"""Reference example matrices and slow, direct transcriptions of the definitions.

The transcriptions work on dense 0/1 arrays row by row and share no code with
the package, so they can serve as independent oracles. Only the small random
fixtures are drawn with the package's design builder.
"""

from itertools import combinations
from fractions import Fraction

import numpy as np

from edocs.designs import build_random_cw_design

EX1_M = np.array([
    [0, 0, 0, 1, 0, 1, 0, 0],
    [1, 0, 0, 0, 1, 0, 0, 1],
])

EX1_U = np.array([
    [0, 0, 0, 0, 1, 1, 1, 1],
    [0, 0, 1, 1, 0, 0, 1, 1],
    [0, 1, 0, 1, 0, 1, 0, 1],
    [1, 1, 1, 1, 0, 0, 0, 0],
    [1, 1, 0, 0, 1, 1, 0, 0],
    [1, 0, 1, 0, 1, 0, 1, 0],
])

EX1_A_PRIME = np.array([
    [0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 1, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 1, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 1],
    [1, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 0, 0],
])

F = Fraction
EX2_V = [
    [0, F(1), F(1, 2), 0, F(1, 3), 0, 0, F(1, 4)],
    [0, F(1, 2), F(1, 3), 0, F(1, 4), 0, 0, F(1, 5)],
    [0, F(1, 3), F(1, 4), 0, F(1, 5), 0, 0, F(1, 6)],
]


def direct_distinguishable(A, k, l):
    A = np.asarray(A)
    m, n = A.shape
    for X in combinations(range(n), k):
        singles = set()
        for r in range(m):
            hit = [j for j in X if A[r, j]]
            if len(hit) == 1:
                singles.add(hit[0])
        if len(singles) <= k - l:
            return False
    return True


def direct_list_uf(A, k, l, alpha):
    A = np.asarray(A)
    m, n = A.shape
    cols = [set(np.flatnonzero(A[:, j]).tolist()) for j in range(n)]
    for S in combinations(range(n), l):
        rest = [i for i in range(n) if i not in S]
        for T in combinations(rest, k):
            ok = False
            for j in S:
                union = set()
                for i in set(S) | set(T):
                    if i != j:
                        union |= cols[i]
                if len(cols[j] & union) < alpha * len(cols[j]):
                    ok = True
                    break
            if not ok:
                return False
    return True


def dense_nz(A, x_dense, tol=0.0):
    return (np.abs(np.asarray(A, dtype=float) @ np.asarray(x_dense, dtype=float)) > tol).astype(np.uint8)


SMALL_SHAPES = [(9, 6, 3, 3, 2), (12, 7, 4, 3, 1), (10, 7, 3, 3, 1), (10, 6, 2, 2, 1)]


def small_fixture(i):
    """i-th random (design, k, l) triple, small enough for brute force."""
    m, n, d, k, l = SMALL_SHAPES[i % len(SMALL_SHAPES)]
    return build_random_cw_design(m, n, d, [i, m, n]), k, l
