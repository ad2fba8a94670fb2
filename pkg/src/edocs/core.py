"""Shared types and the sign / nz measurement semantics.

Indices are 0-based everywhere. Binary designs are stored column-sparse
(CSC-like ``indptr``/``indices`` arrays) so that measuring a k-sparse signal
costs O(sum of the touched column weights), never O(n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

FLOAT_TOL = 1e-12


def _check_finite(a: float) -> float:
    a = float(a)
    if not math.isfinite(a):
        raise ValueError(f"non-finite input: {a!r}")
    return a


def sign_scalar(a: float) -> int:
    """+1 for a >= 0, -1 for a < 0."""
    return 1 if _check_finite(a) >= 0 else -1


def nz_scalar(a: float, tol: float = 0.0) -> int:
    """1 iff |a| > tol (tol=0 gives the exact a != 0 test)."""
    return 1 if abs(_check_finite(a)) > tol else 0


def nz_from_signs(a: float) -> int:
    # nz recovered from the two one-bit measurements sign(a), sign(-a):
    # both are +1 exactly when a == 0.
    return 0 if sign_scalar(a) == 1 and sign_scalar(-a) == 1 else 1


def nz_array(values: np.ndarray, tol: float = 0.0) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError("non-finite measurement values")
    return (np.abs(values) > tol).astype(np.uint8)


@dataclass(frozen=True)
class SparseSignal:
    """A k-sparse real vector of dimension ``dim``; ``entries`` maps index -> nonzero value."""

    dim: int
    entries: Mapping[int, float]

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        clean = {}
        for i, v in self.entries.items():
            i = int(i)
            v = float(v)
            if not 0 <= i < self.dim:
                raise ValueError(f"index {i} out of range for dim {self.dim}")
            if v == 0.0 or not math.isfinite(v):
                raise ValueError(f"entry {i} must be a finite nonzero value, got {v}")
            clean[i] = v
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @property
    def support(self) -> frozenset:
        return frozenset(self.entries)

    @property
    def sparsity(self) -> int:
        return len(self.entries)

    def indices(self) -> np.ndarray:
        return np.fromiter(self.entries.keys(), dtype=np.int64, count=len(self.entries))

    def values(self) -> np.ndarray:
        return np.fromiter(self.entries.values(), dtype=float, count=len(self.entries))

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices()] = self.values()
        return out

    @classmethod
    def from_dense(cls, x: Sequence[float]) -> "SparseSignal":
        x = np.asarray(x, dtype=float)
        nzi = np.flatnonzero(x)
        return cls(len(x), {int(i): float(x[i]) for i in nzi})


@dataclass(frozen=True)
class MeasurementBits:
    bits: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.bits, dtype=np.uint8).ravel()
        if b.size and b.max() > 1:
            raise ValueError("bits must be 0/1")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "bits", b)

    def __len__(self) -> int:
        return int(self.bits.size)

    def blocks(self, width: int) -> np.ndarray:
        """View the bits as consecutive blocks of ``width`` (one block per row)."""
        if width <= 0 or self.bits.size % width:
            raise ValueError(f"length {self.bits.size} is not a multiple of {width}")
        return self.bits.reshape(-1, width)

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def from_string(cls, s: str) -> "MeasurementBits":
        s = "".join(s.split())
        if set(s) - {"0", "1"}:
            raise ValueError("bit string may only contain 0 and 1")
        return cls(np.frombuffer(s.encode(), dtype=np.uint8) - ord("0"))

    def __eq__(self, other):
        if not isinstance(other, MeasurementBits):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class BinaryDesign:
    """Binary m x n matrix stored by column supports.

    ``indptr`` has n+1 entries; the support of column j is
    ``indices[indptr[j]:indptr[j+1]]``, sorted and duplicate-free.
    """

    rows: int
    cols: int
    indptr: np.ndarray
    indices: np.ndarray
    col_weight: Optional[int] = None

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        if indptr.shape != (self.cols + 1,) or indptr[0] != 0 or indptr[-1] != indices.size:
            raise ValueError("malformed indptr")
        if np.any(np.diff(indptr) < 0):
            raise ValueError("indptr must be non-decreasing")
        if indices.size and (indices.min() < 0 or indices.max() >= self.rows):
            raise ValueError("row index out of range")
        weights = np.diff(indptr)
        d = np.diff(indices)
        inner = np.ones(d.size, dtype=bool)
        # ignore differences that straddle two columns
        inner[indptr[1:-1][(indptr[1:-1] > 0) & (indptr[1:-1] < indices.size)] - 1] = False
        if np.any(d[inner] <= 0):
            raise ValueError("column supports must be sorted without duplicates")
        if self.col_weight is not None and np.any(weights != self.col_weight):
            raise ValueError(f"not every column has weight {self.col_weight}")
        for arr in (indptr, indices):
            arr.setflags(write=False)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def from_columns(cls, rows: int, columns: Iterable[Iterable[int]], col_weight=None) -> "BinaryDesign":
        cols = [np.unique(np.asarray(list(c), dtype=np.int64)) for c in columns]
        indptr = np.zeros(len(cols) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([c.size for c in cols])
        indices = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        return cls(rows, len(cols), indptr, indices, col_weight)

    @classmethod
    def from_support_matrix(cls, rows: int, supports: np.ndarray) -> "BinaryDesign":
        """Constant-weight design from an (n, d) array of row indices."""
        supports = np.sort(np.asarray(supports, dtype=np.int64), axis=1)
        n, d = supports.shape
        indptr = np.arange(n + 1, dtype=np.int64) * d
        return cls(rows, n, indptr, supports.ravel(), d)

    @classmethod
    def from_dense(cls, matrix) -> "BinaryDesign":
        a = np.asarray(matrix)
        if a.ndim != 2 or np.any((a != 0) & (a != 1)):
            raise ValueError("expected a 2-D 0/1 matrix")
        design = cls.from_columns(a.shape[0], (np.flatnonzero(a[:, j]) for j in range(a.shape[1])))
        w = design.weights()
        if w.size and np.all(w == w[0]):
            return cls(design.rows, design.cols, design.indptr, design.indices, int(w[0]))
        return design

    def column(self, j: int) -> np.ndarray:
        if not 0 <= j < self.cols:
            raise IndexError(f"column {j} out of range")
        return self.indices[self.indptr[j]:self.indptr[j + 1]]

    def weights(self) -> np.ndarray:
        return np.diff(self.indptr)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        colidx = np.repeat(np.arange(self.cols), self.weights())
        out[self.indices, colidx] = 1
        return out

    def column_masks(self) -> list:
        """Column supports as Python int bitmasks (bit r set iff row r in support)."""
        masks = []
        for j in range(self.cols):
            m = 0
            for r in self.column(j).tolist():
                m |= 1 << r
            masks.append(m)
        return masks

    def __eq__(self, other):
        if not isinstance(other, BinaryDesign):
            return NotImplemented
        return (self.rows == other.rows and self.cols == other.cols
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    __hash__ = None

    def dumps(self) -> str:
        """Text format: header ``n m d`` (d = -1 for varying weight), then one line per column."""
        d = -1 if self.col_weight is None else self.col_weight
        lines = [f"{self.cols} {self.rows} {d}"]
        for j in range(self.cols):
            lines.append(" ".join(map(str, self.column(j).tolist())))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "BinaryDesign":
        lines = text.split("\n")
        try:
            n, m, d = (int(t) for t in lines[0].split())
        except ValueError as exc:
            raise ValueError("design header must be 'n m d'") from exc
        body = lines[1:1 + n]
        if len(body) < n:
            raise ValueError(f"expected {n} column lines, found {len(body)}")
        return cls.from_columns(m, ([int(t) for t in ln.split()] for ln in body),
                                None if d < 0 else d)

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256(self.dumps().encode())
        return h.hexdigest()[:16]


def measure_binary(design: BinaryDesign, x: SparseSignal, tol: float = 0.0) -> MeasurementBits:
    """nz(A x) for a binary A, accumulated column by column over supp(x)."""
    if design.cols != x.dim:
        raise ValueError(f"design has {design.cols} columns but signal has dim {x.dim}")
    acc = np.zeros(design.rows)
    for j, v in x.entries.items():
        acc[design.column(j)] += v
    return MeasurementBits(nz_array(acc, tol))


@dataclass(frozen=True)
class BlockSensingMatrix:
    """Vertical stack of real-valued blocks; each block is (support, coeffs[l, |support|])."""

    dim: int
    blocks: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        for b in self.blocks:
            if len(b.support) and max(b.support) >= self.dim:
                raise ValueError("block support exceeds dimension")

    @property
    def rows(self) -> int:
        return sum(b.l for b in self.blocks)


def measure_blocks(matrix: BlockSensingMatrix, x: SparseSignal, tol: float = FLOAT_TOL) -> MeasurementBits:
    if matrix.dim != x.dim:
        raise ValueError(f"block matrix has dim {matrix.dim} but signal has dim {x.dim}")
    out = []
    for block in matrix.blocks:
        out.append(nz_array(block.apply(x), tol))
    if not out:
        return MeasurementBits(np.zeros(0, dtype=np.uint8))
    return MeasurementBits(np.concatenate(out))
