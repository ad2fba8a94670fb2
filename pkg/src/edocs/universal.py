"""Universal (for-all) schemes: approximate (AA) and exact (AE) support recovery.

The sensing matrix is ``[A'; A'']`` where ``A'`` is the U-magnification of a
distinguishable design ``M`` and ``A''`` is a list union-free design. Decoding
reads the ``m'`` signature blocks of ``y'`` to collect singleton candidates,
then keeps a candidate only when at least half of its ``A''`` column is lit in
``y''``. Only candidate columns of ``A''`` are ever read.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from . import oracle
from .core import BinaryDesign, MeasurementBits, SparseSignal, nz_array
from .designs import (DesignParams, SignatureMatrix, build_random_cw_design, build_signature,
                      decode_singletons, magnify, signature_bits, sizing_aa, sizing_ae)

log = logging.getLogger(__name__)

VERIFY_MAX_N = 64
VERIFY_MAX_K = 3
VERIFY_BUDGET = 10**7


class VerificationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RecoveredSupport:
    indices: frozenset
    stage1_size: int
    column_reads: int
    stage1: tuple = ()


@dataclass(frozen=True, eq=False)
class UniversalScheme:
    params: DesignParams
    M: BinaryDesign
    A_second: BinaryDesign
    verified: bool = False
    attempts: tuple = (1, 1)

    def __post_init__(self):
        if self.M.cols != self.n or self.A_second.cols != self.n:
            raise ValueError("design widths must equal n")
        if self.A_second.col_weight is None:
            raise ValueError("second-stage design must have constant column weight")

    kind = property(lambda self: self.params.kind)
    n = property(lambda self: self.params.n)
    k = property(lambda self: self.params.k)
    eps = property(lambda self: self.params.eps)
    seed = property(lambda self: self.params.seed)

    @property
    def L(self) -> int:
        return self.signature.L

    @cached_property
    def signature(self) -> SignatureMatrix:
        return build_signature(self.n)

    @property
    def m_prime(self) -> int:
        return self.M.rows

    @property
    def rows_prime(self) -> int:
        return 2 * self.L * self.M.rows

    @property
    def d2(self) -> int:
        return self.A_second.col_weight

    @property
    def m(self) -> int:
        return self.rows_prime + self.A_second.rows

    @cached_property
    def A_prime(self) -> BinaryDesign:
        # Materialised on demand only; measure() never needs it.
        return magnify(self.M, self.signature)

    def measure(self, x: SparseSignal, tol: float = 0.0) -> MeasurementBits:
        if x.dim != self.n:
            raise ValueError(f"signal dim {x.dim} != n = {self.n}")
        acc1 = np.zeros((self.m_prime, 2 * self.L))
        acc2 = np.zeros(self.A_second.rows)
        idx = x.indices()
        sigs = signature_bits(idx, self.L) if idx.size else None
        for pos, (j, v) in enumerate(x.entries.items()):
            acc1[self.M.column(j)] += v * sigs[pos]
            acc2[self.A_second.column(j)] += v
        return MeasurementBits(np.concatenate([nz_array(acc1.ravel(), tol), nz_array(acc2, tol)]))

    def decode(self, y: MeasurementBits) -> RecoveredSupport:
        bits = y.bits if isinstance(y, MeasurementBits) else np.asarray(y, dtype=np.uint8)
        if bits.size != self.m:
            raise ValueError(f"expected {self.m} measurements, got {bits.size}")
        blocks = bits[:self.rows_prime].reshape(self.m_prime, 2 * self.L)
        hits = decode_singletons(blocks, self.n)
        hits = hits[hits >= 0]
        _, first = np.unique(hits, return_index=True)
        stage1 = hits[np.sort(first)].tolist()
        reads = self.m_prime
        y2 = bits[self.rows_prime:]
        kept = set()
        for i in stage1:
            col = self.A_second.column(i)
            reads += col.size
            if int(y2[col].sum()) * 2 >= self.d2:
                kept.add(i)
        return RecoveredSupport(frozenset(kept), len(stage1), reads, tuple(stage1))

    def verify(self, budget: int = VERIFY_BUDGET) -> bool:
        return _verify_first(self.params, self.M, budget) and _verify_second(self.params, self.A_second, budget)

    def dumps(self) -> str:
        head = "# edocs universal scheme\n" + self.params.dumps()
        head += f"L={self.L}\nverified={int(self.verified)}\nattempts={self.attempts[0]},{self.attempts[1]}\n"
        return head + "[M]\n" + self.M.dumps() + "[A2]\n" + self.A_second.dumps()

    @classmethod
    def loads(cls, text: str) -> "UniversalScheme":
        head, _, rest = text.partition("[M]\n")
        m_text, _, a2_text = rest.partition("[A2]\n")
        if not m_text or not a2_text:
            raise ValueError("universal scheme file needs [M] and [A2] sections")
        extra = {}
        for line in head.splitlines():
            key, _, val = line.partition("=")
            extra[key.strip()] = val.strip()
        params = DesignParams.loads(head)
        attempts = tuple(int(a) for a in extra.get("attempts", "1,1").split(","))
        return cls(params, BinaryDesign.loads(m_text), BinaryDesign.loads(a2_text),
                   extra.get("verified") == "1", attempts)


def _verify_first(p: DesignParams, M: BinaryDesign, budget: int) -> bool:
    if p.kind == "ae":
        return oracle.check_distinguishable(M, p.k, 1, budget)
    return oracle.check_strongly_distinguishable(M, p.k, p.eps / 2, budget)


def _verify_second(p: DesignParams, A2: BinaryDesign, budget: int) -> bool:
    if p.kind == "ae":
        return oracle.check_list_uf(A2, p.k, 1, p.alpha_uf, budget)
    return oracle.check_strongly_list_uf(A2, p.k, p.eps / 2, p.alpha_uf, budget)


def _build(params: DesignParams, verify: Optional[bool], max_retries: int, budget: int) -> UniversalScheme:
    p = params
    if p.d1 > p.m1 or p.d2 > p.m2:
        raise ValueError(f"infeasible sizing: d'={p.d1}, m'={p.m1}, d''={p.d2}, m''={p.m2}")
    if verify is None:
        verify = p.n <= VERIFY_MAX_N and p.k <= VERIFY_MAX_K

    def draw(stage, rows, weight, check):
        for attempt in range(1, max_retries + 1):
            design = build_random_cw_design(rows, p.n, weight, [p.seed, stage, attempt - 1])
            if not verify or check(p, design, budget):
                return design, attempt
            log.info("stage %d design failed verification (attempt %d)", stage, attempt)
        raise VerificationError(f"stage {stage} design not verified after {max_retries} attempts")

    M, a1 = draw(1, p.m1, p.d1, _verify_first)
    A2, a2 = draw(2, p.m2, p.d2, _verify_second)
    return UniversalScheme(p, M, A2, bool(verify), (a1, a2))


def build_aa(n: int, k: int, eps: float, seed: int = 0, *, c_rows=4.0, c_weight=4.0,
             uf_rows=48.0, uf_weight=8.0, verify: Optional[bool] = None,
             max_retries: int = 20, budget: int = VERIFY_BUDGET) -> UniversalScheme:
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    params = sizing_aa(n, k, eps, c_rows, c_weight, uf_rows, uf_weight, seed)
    return _build(params, verify, max_retries, budget)


def build_ae(n: int, k: int, seed: int = 0, *, c_rows=4.0, c_weight=4.0,
             uf_rows=48.0, uf_weight=8.0, verify: Optional[bool] = None,
             max_retries: int = 20, budget: int = VERIFY_BUDGET) -> UniversalScheme:
    params = sizing_ae(n, k, c_rows, c_weight, uf_rows, uf_weight, seed)
    return _build(params, verify, max_retries, budget)


def decode(scheme: UniversalScheme, y: MeasurementBits) -> RecoveredSupport:
    return scheme.decode(y)
