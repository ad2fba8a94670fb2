"""Fast binary splitting: non-adaptive group testing over a binary prefix tree.

Items are the leaves of a depth-log2(n) tree; a node at depth ``ell`` is an
``ell``-bit prefix. Phase 1 ("grow and prune") has one layer of ``C*k`` tests
per depth ``log2 k + 1 .. log2 n``; phase 2 ("leaf trimming") has ``log2 k``
further layers that assign individual leaves. Within a layer every node is
sent to one test by a seeded hash, so assignments are re-derived on demand
and never stored.

Test ids are laid out layer by layer: ``test = layer * (C*k) + slot``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BinaryDesign, MeasurementBits

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finaliser; uint64 array arithmetic wraps modulo 2**64
    z = z ^ (z >> np.uint64(30))
    z = z * _M1
    z = z ^ (z >> np.uint64(27))
    z = z * _M2
    return z ^ (z >> np.uint64(31))


def is_power_of_two(v: int) -> bool:
    return v >= 1 and v & (v - 1) == 0


def next_power_of_two(v: int) -> int:
    return 1 if v <= 1 else 1 << (v - 1).bit_length()


@dataclass(frozen=True)
class FbsDesign:
    n: int
    k: int
    C: int = 16
    seed: int = 0

    def __post_init__(self):
        if not (is_power_of_two(self.n) and is_power_of_two(self.k)):
            raise ValueError("n and k must be powers of two (pad first)")
        if not 2 <= self.k < self.n:
            raise ValueError(f"need 2 <= k < n, got k={self.k}, n={self.n}")
        if self.C < 1:
            raise ValueError("C must be positive")

    @property
    def log_n(self) -> int:
        return self.n.bit_length() - 1

    @property
    def log_k(self) -> int:
        return self.k.bit_length() - 1

    @property
    def tests_per_layer(self) -> int:
        return self.C * self.k

    @property
    def phase1_layers(self) -> int:
        return self.log_n - self.log_k

    @property
    def phase2_layers(self) -> int:
        return self.log_k

    @property
    def m_B(self) -> int:
        return self.tests_per_layer * self.log_n

    def layer_depth(self, layer: int) -> int:
        """Prefix length hashed in ``layer`` (phase-2 layers hash full leaves)."""
        if layer < self.phase1_layers:
            return self.log_k + 1 + layer
        return self.log_n

    def slots(self, layer: int, nodes) -> np.ndarray:
        """Test slot in [0, C*k) of each node within ``layer``."""
        nodes = np.atleast_1d(np.asarray(nodes, dtype=np.uint64))
        lkey = _mix64(np.array([(self.seed * 0x10001 + layer) & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64)
                      + _GOLDEN)
        h = _mix64(lkey ^ (nodes * _GOLDEN + np.uint64(1)))
        return (h % np.uint64(self.tests_per_layer)).astype(np.int64)

    def item_tests(self, items) -> np.ndarray:
        """(len(items), log2 n) array of the test ids containing each item, one per layer."""
        items = np.atleast_1d(np.asarray(items, dtype=np.int64))
        if items.size and (items.min() < 0 or items.max() >= self.n):
            raise IndexError("item out of range")
        out = np.empty((items.size, self.log_n), dtype=np.int64)
        T = self.tests_per_layer
        for layer in range(self.log_n):
            nodes = items >> (self.log_n - self.layer_depth(layer))
            out[:, layer] = layer * T + self.slots(layer, nodes)
        return out

    def row_support(self, test_id: int) -> np.ndarray:
        """Sorted items in test ``test_id``. O(number of nodes in its layer)."""
        if not 0 <= test_id < self.m_B:
            raise IndexError(f"test {test_id} out of range")
        layer, slot = divmod(test_id, self.tests_per_layer)
        depth = self.layer_depth(layer)
        nodes = np.arange(1 << depth, dtype=np.int64)
        hit = nodes[self.slots(layer, nodes) == slot]
        width = 1 << (self.log_n - depth)
        return (hit[:, None] * width + np.arange(width)[None, :]).ravel()

    def to_binary_design(self) -> BinaryDesign:
        tests = self.item_tests(np.arange(self.n))
        return BinaryDesign.from_support_matrix(self.m_B, tests)

    def dumps(self) -> str:
        return f"n={self.n}\nk={self.k}\nC={self.C}\nseed={self.seed}\n"


def build_fbs(n: int, k: int, C: int = 16, seed: int = 0) -> FbsDesign:
    return FbsDesign(n, k, C, seed)


@dataclass(frozen=True)
class GtResult:
    positives: frozenset
    failed: bool = False
    candidates_peak: int = 0
    visits: int = 0
    bit_reads: int = 0


def fbs_decode(design: FbsDesign, y_gt, cap: int = 8) -> GtResult:
    """Walk the tree from the k depth-log2(k) prefixes, keeping children whose test is positive.

    After the last depth, a leaf survives only if its test is positive in every
    trimming layer. The run is reported as failed (with no positives) as soon
    as the candidate set exceeds ``cap * k``.
    """
    y = np.asarray(getattr(y_gt, "bits", y_gt), dtype=np.uint8)
    if y.size != design.m_B:
        raise ValueError(f"expected {design.m_B} test results, got {y.size}")
    T = design.tests_per_layer
    limit = cap * design.k
    cand = np.arange(design.k, dtype=np.int64)
    peak = cand.size
    visits = 0
    for layer in range(design.log_n):
        if layer < design.phase1_layers:
            nodes = np.concatenate([2 * cand, 2 * cand + 1])
        else:
            nodes = cand
        visits += nodes.size
        positive = y[layer * T + design.slots(layer, nodes)] == 1
        cand = np.sort(nodes[positive])
        peak = max(peak, cand.size)
        if cand.size > limit:
            return GtResult(frozenset(), True, peak, visits)
    return GtResult(frozenset(cand.tolist()), False, peak, visits)


def or_measure(design: FbsDesign, defectives) -> MeasurementBits:
    """Noiseless OR-semantics group-testing outcome for a defective set."""
    y = np.zeros(design.m_B, dtype=np.uint8)
    d = np.fromiter(defectives, dtype=np.int64)
    if d.size:
        y[design.item_tests(d).ravel()] = 1
    return MeasurementBits(y)
