"""Probabilistic exact (EE) scheme built on fast binary splitting.

Every group test ``B^i`` becomes a block of ``k_alpha`` real measurements whose
nonzero pattern is ``supp(B^i)`` (an AsTIM block). As long as no test holds
more than ``k_alpha`` defectives, a block is zero exactly when its test is
negative, so the 1-bit result translates back to a group-testing outcome.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import FLOAT_TOL, BlockSensingMatrix, MeasurementBits, SparseSignal, nz_array
from .splitting import FbsDesign, GtResult, fbs_decode, next_power_of_two

COEFF_KINDS = ("gaussian", "hilbert")


class RegimeWarning(UserWarning):
    """k is below the (ln n)^(1/(alpha-1)) regime where the error bound vanishes."""


def kalpha(k: int, alpha: float, C: int = 16) -> int:
    """ceil(alpha * ln(Ck) / ln ln(Ck)), natural logs."""
    v = C * k
    if v <= math.e:
        raise ValueError(f"C*k = {v} too small for ln ln(C*k) > 0")
    return max(1, math.ceil(alpha * math.log(v) / math.log(math.log(v)) - 1e-12))


def regime_threshold(n: int, alpha: float) -> float:
    try:
        return math.log(n) ** (1.0 / (alpha - 1.0))
    except OverflowError:
        return math.inf


@dataclass(frozen=True, eq=False)
class AstimBlock:
    support: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.support, dtype=np.int64)
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        if s.size == 0:
            raise ValueError("AsTIM block needs a nonempty support")
        if np.any(np.diff(s) <= 0):
            raise ValueError("support must be sorted and duplicate-free")
        if c.shape[1] != s.size:
            raise ValueError("coefficient columns must match the support")
        if np.any(c == 0):
            raise ValueError("AsTIM coefficients on the support must be nonzero")
        s.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "support", s)
        object.__setattr__(self, "coeffs", c)

    @property
    def l(self) -> int:
        return self.coeffs.shape[0]

    def apply(self, x: SparseSignal) -> np.ndarray:
        out = np.zeros(self.l)
        if not x.entries:
            return out
        idx, vals = x.indices(), x.values()
        pos = np.searchsorted(self.support, idx)
        pos_c = np.minimum(pos, self.support.size - 1)
        hit = self.support[pos_c] == idx
        if hit.any():
            out = self.coeffs[:, pos_c[hit]] @ vals[hit]
        return out

    def to_dense(self, dim: int) -> np.ndarray:
        out = np.zeros((self.l, dim))
        out[:, self.support] = self.coeffs
        return out


def hilbert_coeffs(l: int, width: int) -> np.ndarray:
    r = np.arange(l)[:, None]
    c = np.arange(width)[None, :]
    return 1.0 / (r + c + 1)


def build_astim(support, l: int, seed=0, kind: str = "gaussian") -> AstimBlock:
    support = np.unique(np.asarray(list(support), dtype=np.int64))
    if support.size == 0:
        raise ValueError("empty support")
    if l < 1:
        raise ValueError("l must be >= 1")
    if kind == "gaussian":
        coeffs = np.random.default_rng(seed).standard_normal((l, support.size))
    elif kind == "hilbert":
        coeffs = hilbert_coeffs(l, support.size)
    else:
        raise ValueError(f"unknown coefficient kind {kind!r}")
    return AstimBlock(support, coeffs)


@dataclass(frozen=True, eq=False)
class EeScheme:
    """EE sensing matrix: one AsTIM-``k_alpha`` block per fast-binary-splitting test.

    Gaussian coefficients are drawn per item: item j's stream
    ``default_rng([seed, 1, j])`` yields a (log2 n, k_alpha) array whose row
    ``layer`` is j's coefficient column in its test of that layer. Blocks are
    therefore re-derivable without storing the matrix.
    """

    fbs: FbsDesign
    alpha: float
    k_alpha: int
    n: int
    k: int
    seed: int = 0
    coeff_kind: str = "gaussian"

    @property
    def m_B(self) -> int:
        return self.fbs.m_B

    @property
    def m(self) -> int:
        return self.k_alpha * self.fbs.m_B

    def item_coeffs(self, j: int) -> np.ndarray:
        if self.coeff_kind == "gaussian":
            return np.random.default_rng([self.seed, 1, int(j)]).standard_normal(
                (self.fbs.log_n, self.k_alpha))
        tests = self.fbs.item_tests(j)[0]
        out = np.empty((self.fbs.log_n, self.k_alpha))
        for layer, t in enumerate(tests):
            pos = int(np.searchsorted(self.fbs.row_support(int(t)), j))
            out[layer] = 1.0 / (np.arange(self.k_alpha) + pos + 1)
        return out

    def block(self, test_id: int) -> AstimBlock:
        support = self.fbs.row_support(test_id)
        layer = test_id // self.fbs.tests_per_layer
        if self.coeff_kind == "hilbert":
            return AstimBlock(support, hilbert_coeffs(self.k_alpha, support.size))
        cols = [self.item_coeffs(j)[layer] for j in support.tolist()]
        return AstimBlock(support, np.array(cols).T)

    def blocks(self) -> BlockSensingMatrix:
        """Materialise every block (padded dimension). Intended for small n."""
        blocks = []
        for t in range(self.m_B):
            if self.fbs.row_support(t).size:
                blocks.append(self.block(t))
            else:
                blocks.append(_EmptyBlock(self.k_alpha))
        return BlockSensingMatrix(self.fbs.n, blocks)

    def measure(self, x: SparseSignal, tol: float = FLOAT_TOL) -> MeasurementBits:
        if x.dim != self.n:
            raise ValueError(f"signal dim {x.dim} != n = {self.n}")
        acc = np.zeros((self.m_B, self.k_alpha))
        if x.entries:
            idx = x.indices()
            tests = self.fbs.item_tests(idx)
            for row, (j, v) in enumerate(x.entries.items()):
                acc[tests[row]] += v * self.item_coeffs(j)
        return MeasurementBits(nz_array(acc.ravel(), tol))

    def translate(self, y: MeasurementBits) -> np.ndarray:
        """Group-testing outcome: test i is positive iff block i of y is nonzero."""
        bits = y.bits if isinstance(y, MeasurementBits) else np.asarray(y, dtype=np.uint8)
        if bits.size != self.m:
            raise ValueError(f"expected {self.m} measurements, got {bits.size}")
        return bits.reshape(self.m_B, self.k_alpha).any(axis=1).astype(np.uint8)

    def decode(self, y: MeasurementBits, cap: int = 8) -> GtResult:
        res = fbs_decode(self.fbs, self.translate(y), cap)
        pos = frozenset(i for i in res.positives if i < self.n)
        return GtResult(pos, res.failed, res.candidates_peak, res.visits, self.m)

    def dumps(self) -> str:
        return ("# edocs ee scheme\nkind=ee\n"
                f"n={self.n}\nk={self.k}\nalpha={self.alpha!r}\nC={self.fbs.C}\n"
                f"k_alpha={self.k_alpha}\nseed={self.seed}\ncoeff_kind={self.coeff_kind}\n")

    @classmethod
    def loads(cls, text: str) -> "EeScheme":
        raw = {}
        for line in text.splitlines():
            if line.strip() and not line.startswith("#"):
                key, _, val = line.partition("=")
                raw[key.strip()] = val.strip()
        scheme = build_ee(int(raw["n"]), int(raw["k"]), float(raw["alpha"]), int(raw["C"]),
                          int(raw["seed"]), raw.get("coeff_kind", "gaussian"), warn=False)
        if scheme.k_alpha != int(raw["k_alpha"]):
            raise ValueError("k_alpha in file disagrees with the parameters")
        return scheme


class _EmptyBlock:
    """Placeholder for a test no node hashed into; always measures zero."""

    support = np.zeros(0, dtype=np.int64)

    def __init__(self, l):
        self.l = l

    def apply(self, x):
        return np.zeros(self.l)


def build_ee(n: int, k: int, alpha: float, C: int = 16, seed: int = 0,
             coeff_kind: str = "gaussian", warn: bool = True) -> EeScheme:
    """Assemble the EE scheme; n and k are padded up to powers of two (k at least 2)."""
    if alpha <= 1:
        raise ValueError(f"alpha must be > 1, got {alpha}")
    if coeff_kind not in COEFF_KINDS:
        raise ValueError(f"unknown coefficient kind {coeff_kind!r}")
    if not 1 <= k < n:
        raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
    n_pad = next_power_of_two(max(n, 2))
    k_pad = next_power_of_two(max(k, 2))
    if k_pad >= n_pad:
        raise ValueError(f"padded k={k_pad} must stay below padded n={n_pad}")
    fbs = FbsDesign(n_pad, k_pad, C, seed)
    ka = kalpha(k_pad, alpha, C)
    if warn and k_pad <= regime_threshold(n_pad, alpha):
        warnings.warn(f"k={k_pad} is not above (ln n)^(1/(alpha-1)) = "
                      f"{regime_threshold(n_pad, alpha):.3g}; the error bound does not vanish here",
                      RegimeWarning, stacklevel=2)
    return EeScheme(fbs, float(alpha), ka, n, k, seed, coeff_kind)


def decode_ee(scheme: EeScheme, y: MeasurementBits) -> GtResult:
    return scheme.decode(y)
