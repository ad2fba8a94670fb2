"""Combinatorial matrices for the universal schemes.

* the signature matrix ``U = [b_j; complement(b_j)]`` with ``b_j`` the
  MSB-first binary form of ``j``;
* random constant-column-weight designs that stand in for the
  distinguishable and list union-free matrices;
* U-magnification, which replaces each 1 of a design by the signature column
  of that design column.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace
from functools import cached_property
from typing import Optional

import numpy as np

from .core import BinaryDesign


def signature_length(n: int) -> int:
    """L = ceil(log2 n), computed exactly on integers."""
    if n < 2:
        raise ValueError("signature matrix needs n >= 2")
    return (n - 1).bit_length()


def signature_bits(indices, L: int) -> np.ndarray:
    """Signature columns for ``indices`` as rows of a (len, 2L) uint8 array."""
    idx = np.atleast_1d(np.asarray(indices, dtype=np.int64))
    shifts = np.arange(L - 1, -1, -1, dtype=np.int64)
    top = ((idx[:, None] >> shifts) & 1).astype(np.uint8)
    return np.concatenate([top, 1 - top], axis=1)


@dataclass(frozen=True)
class SignatureMatrix:
    n: int
    L: int

    def __post_init__(self):
        if self.L != signature_length(self.n):
            raise ValueError("L must equal ceil(log2 n)")

    @property
    def rows(self) -> int:
        return 2 * self.L

    def column(self, j: int) -> np.ndarray:
        if not 0 <= j < self.n:
            raise IndexError(j)
        return signature_bits(j, self.L)[0]

    def to_dense(self) -> np.ndarray:
        return signature_bits(np.arange(self.n), self.L).T.copy()

    @cached_property
    def design(self) -> BinaryDesign:
        bits = signature_bits(np.arange(self.n), self.L)
        rows = np.nonzero(bits)[1].reshape(self.n, self.L)
        return BinaryDesign.from_support_matrix(self.rows, rows)


def build_signature(n: int) -> SignatureMatrix:
    return SignatureMatrix(n, signature_length(n))


def decode_singleton(block, n: int) -> Optional[int]:
    """Index whose signature column equals ``block``, or None.

    Accepts only blocks of weight exactly L whose bottom half is the bitwise
    complement of the top half and whose value is below n.
    """
    L = signature_length(n)
    b = np.asarray(block, dtype=np.uint8).ravel()
    if b.size != 2 * L:
        raise ValueError(f"block length {b.size} != {2 * L}")
    if int(b.sum()) != L:
        return None
    top, bottom = b[:L], b[L:]
    if np.any(top == bottom):
        return None
    value = 0
    for bit in top.tolist():
        value = (value << 1) | bit
    return value if value < n else None


def decode_singletons(blocks: np.ndarray, n: int) -> np.ndarray:
    """Vectorised :func:`decode_singleton` over a (num_blocks, 2L) array.

    Returns the decoded index per block, -1 where the block is not a singleton.
    """
    L = signature_length(n)
    blocks = np.asarray(blocks, dtype=np.uint8)
    if blocks.ndim != 2 or blocks.shape[1] != 2 * L:
        raise ValueError(f"expected blocks of width {2 * L}")
    top = blocks[:, :L].astype(np.int64)
    ok = (blocks.sum(axis=1) == L) & np.all(blocks[:, :L] != blocks[:, L:], axis=1)
    values = top @ (1 << np.arange(L - 1, -1, -1, dtype=np.int64))
    ok &= values < n
    return np.where(ok, values, -1)


def build_random_cw_design(rows: int, cols: int, col_weight: int, seed, chunk: int = 256) -> BinaryDesign:
    """Each column gets an independent uniform ``col_weight``-subset of the rows."""
    if not 0 < col_weight <= rows:
        raise ValueError(f"column weight {col_weight} must be in [1, {rows}]")
    rng = np.random.default_rng(seed)
    out = np.empty((cols, col_weight), dtype=np.int64)
    if col_weight == rows:
        out[:] = np.arange(rows)
        return BinaryDesign.from_support_matrix(rows, out)
    step = max(1, min(chunk, (1 << 24) // rows))
    for start in range(0, cols, step):
        stop = min(cols, start + step)
        keys = rng.random((stop - start, rows))
        out[start:stop] = np.argpartition(keys, col_weight - 1, axis=1)[:, :col_weight]
    return BinaryDesign.from_support_matrix(rows, out)


def magnify(M: BinaryDesign, U: SignatureMatrix) -> BinaryDesign:
    """U-magnified matrix: block (i, j) is U_j when M[i, j] = 1, else zero."""
    if M.cols != U.n:
        raise ValueError(f"design has {M.cols} columns, signature has {U.n}")
    u = U.rows
    cols = []
    for j in range(M.cols):
        sig_rows = np.flatnonzero(U.column(j))
        blocks = M.column(j)
        cols.append((blocks[:, None] * u + sig_rows[None, :]).ravel())
    w = M.col_weight * U.L if M.col_weight is not None else None
    return BinaryDesign.from_columns(M.rows * u, cols, w)


@dataclass(frozen=True)
class DesignParams:
    """Sizes of the first-stage (distinguishable) and second-stage (list-UF) designs.

    ``c_rows``/``c_weight`` scale the first-stage design, ``uf_rows``/``uf_weight``
    the second. ``m1, d1, m2, d2`` are derived by :func:`sizing_aa` / :func:`sizing_ae`.
    """

    kind: str
    n: int
    k: int
    eps: Optional[float] = None
    alpha_uf: float = 0.5
    c_rows: float = 4.0
    c_weight: float = 4.0
    uf_rows: float = 48.0
    uf_weight: float = 8.0
    seed: int = 0
    m1: int = field(default=0)
    d1: int = field(default=0)
    m2: int = field(default=0)
    d2: int = field(default=0)

    def dumps(self) -> str:
        return "".join(f"{k}={'' if v is None else v}\n" for k, v in asdict(self).items())

    @classmethod
    def loads(cls, text: str) -> "DesignParams":
        raw = {}
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                key, _, val = line.partition("=")
                raw[key.strip()] = val.strip()
        kw = {"kind": raw["kind"]}
        for key in ("n", "k", "seed", "m1", "d1", "m2", "d2"):
            kw[key] = int(raw[key])
        for key in ("alpha_uf", "c_rows", "c_weight", "uf_rows", "uf_weight"):
            kw[key] = float(raw[key])
        kw["eps"] = float(raw["eps"]) if raw.get("eps") else None
        return cls(**kw)


def _check_constants(*consts):
    if any(c <= 0 for c in consts):
        raise ValueError("construction constants must be positive")


def sizing_aa(n: int, k: int, eps: float, c_rows=4.0, c_weight=4.0,
              uf_rows=48.0, uf_weight=8.0, seed: int = 0, alpha_uf: float = 0.5) -> DesignParams:
    """Rows ceil(c*k*(2/eps)*ln(n/k)), weight ceil(c*(2/eps)*ln(n/k)) for both stages.

    The 2/eps factor is the eps/2 substitution of the approximate scheme. eps up
    to 2 is accepted here (eps/2 <= 1); scheme construction limits eps to 1.
    """
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    if not 0 < eps <= 2:
        raise ValueError(f"eps must be in (0, 2], got {eps}")
    _check_constants(c_rows, c_weight, uf_rows, uf_weight)
    base = (2.0 / eps) * math.log(n / k)
    return DesignParams("aa", n, k, eps, alpha_uf, c_rows, c_weight, uf_rows, uf_weight, seed,
                        m1=math.ceil(c_rows * k * base), d1=math.ceil(c_weight * base),
                        m2=math.ceil(uf_rows * k * base), d2=math.ceil(uf_weight * base))


def sizing_ae(n: int, k: int, c_rows=4.0, c_weight=4.0,
              uf_rows=48.0, uf_weight=8.0, seed: int = 0, alpha_uf: float = 0.5) -> DesignParams:
    """Rows ceil(c*k^2*ln(n/k)), weight ceil(c*k*ln(n/k)) for both stages."""
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    _check_constants(c_rows, c_weight, uf_rows, uf_weight)
    base = math.log(n / k)
    return DesignParams("ae", n, k, None, alpha_uf, c_rows, c_weight, uf_rows, uf_weight, seed,
                        m1=math.ceil(c_rows * k * k * base), d1=math.ceil(c_weight * k * base),
                        m2=math.ceil(uf_rows * k * k * base), d2=math.ceil(uf_weight * k * base))


def with_seed(params: DesignParams, seed: int) -> DesignParams:
    return replace(params, seed=seed)
