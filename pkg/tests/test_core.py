import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from edocs.core import (BinaryDesign, MeasurementBits, SparseSignal, measure_binary, nz_array,
                        nz_from_signs, nz_scalar, sign_scalar)
from fixtures import EX1_A_PRIME, dense_nz

finite = st.floats(allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize("a, expected", [(0, 1), (0.0, 1), (-0.0, 1), (-3.5, -1), (7, 1)])
def test_sign_scalar(a, expected):
    assert sign_scalar(a) == expected


@pytest.mark.parametrize("a, expected", [(0, 0), (-3, 1), (1e-300, 1)])
def test_nz_scalar(a, expected):
    assert nz_scalar(a) == expected


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_non_finite_rejected(bad):
    with pytest.raises(ValueError):
        sign_scalar(bad)
    with pytest.raises(ValueError):
        nz_scalar(bad)


def test_nz_tolerance():
    assert nz_scalar(1e-13, tol=1e-12) == 0
    assert nz_scalar(1e-11, tol=1e-12) == 1


@given(finite)
def test_nz_is_recoverable_from_two_signs(a):
    assert nz_scalar(a) == nz_from_signs(a)
    both_plus = sign_scalar(a) == 1 and sign_scalar(-a) == 1
    assert nz_scalar(a) == (0 if both_plus else 1)


def test_nz_identity_on_grid():
    for a in np.linspace(-5, 5, 101).tolist() + [0.0, 5e-324, -5e-324]:
        assert nz_scalar(a) == nz_from_signs(a)


class TestSparseSignal:
    def test_invariants(self):
        x = SparseSignal(10, {3: 1.0, 7: -2.0})
        assert x.support == {3, 7}
        assert x.sparsity == 2
        assert x.to_dense()[7] == -2.0

    @pytest.mark.parametrize("entries", [{10: 1.0}, {-1: 1.0}, {2: 0.0}, {2: math.nan}])
    def test_rejects(self, entries):
        with pytest.raises(ValueError):
            SparseSignal(10, entries)

    def test_dense_round_trip(self):
        x = SparseSignal(6, {0: 1.5, 5: -1.0})
        assert SparseSignal.from_dense(x.to_dense()) == x


class TestBinaryDesign:
    def test_dense_round_trip(self):
        D = BinaryDesign.from_dense(EX1_A_PRIME)
        assert D.rows == 12 and D.cols == 8
        assert np.array_equal(D.to_dense(), EX1_A_PRIME)

    def test_constant_weight_detected(self):
        D = BinaryDesign.from_dense(np.eye(4, dtype=int))
        assert D.col_weight == 1

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            BinaryDesign.from_columns(3, [[0, 3]])
        with pytest.raises(ValueError):
            BinaryDesign(3, 1, np.array([0, 2]), np.array([2, 1]))
        with pytest.raises(ValueError):
            BinaryDesign.from_columns(3, [[0], [0, 1]], col_weight=1)

    def test_text_format(self):
        D = BinaryDesign.from_columns(5, [[0, 3], [], [1, 2, 4]])
        text = D.dumps()
        assert text.splitlines()[0] == "3 5 -1"
        assert text.splitlines()[1] == "0 3"
        assert BinaryDesign.loads(text) == D

    @given(st.integers(1, 12), st.lists(st.sets(st.integers(0, 11), max_size=12), max_size=10))
    def test_text_round_trip_bit_exact(self, rows, cols):
        cols = [[r for r in c if r < rows] for c in cols]
        D = BinaryDesign.from_columns(rows, cols)
        text = D.dumps()
        again = BinaryDesign.loads(text)
        assert again == D
        assert again.dumps() == text

    def test_loads_rejects_truncated(self):
        with pytest.raises(ValueError):
            BinaryDesign.loads("3 4 1\n0\n1\n")


class TestMeasureBinary:
    row = BinaryDesign.from_dense([[0, 0, 0, 1, 0, 1, 0, 0]])

    def test_positive_pair(self):
        y = measure_binary(self.row, SparseSignal(8, {3: 1.0, 5: 1.0}))
        assert y.bits.tolist() == [1]

    def test_accidental_zero(self):
        y = measure_binary(self.row, SparseSignal(8, {3: 1.0, 5: -1.0}))
        assert y.bits.tolist() == [0]

    def test_example_column(self):
        A = BinaryDesign.from_dense(EX1_A_PRIME)
        y = measure_binary(A, SparseSignal(8, {3: 2.0}))
        assert y.bits.tolist() == EX1_A_PRIME[:, 3].tolist()

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            measure_binary(self.row, SparseSignal(9, {0: 1.0}))

    @given(st.data())
    def test_matches_dense_and_no_false_ones(self, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        m, n = data.draw(st.integers(1, 15)), data.draw(st.integers(1, 15))
        A = (rng.random((m, n)) < 0.3).astype(int)
        k = data.draw(st.integers(0, n))
        supp = rng.choice(n, k, replace=False)
        vals = rng.choice([-2.0, -1.0, 1.0, 2.0], size=k)
        x = SparseSignal(n, dict(zip(supp.tolist(), vals.tolist())))
        y = measure_binary(BinaryDesign.from_dense(A), x).bits
        assert np.array_equal(y, dense_nz(A, x.to_dense()))
        touches = A[:, supp].any(axis=1) if k else np.zeros(m, bool)
        assert not np.any(y[~touches])


def test_no_accidental_zeros_for_gaussian_values():
    rng = np.random.default_rng(11)
    A = (rng.random((30, 40)) < 0.25).astype(int)
    D = BinaryDesign.from_dense(A)
    misses = 0
    for _ in range(10_000):
        supp = rng.choice(40, rng.integers(1, 6), replace=False)
        x = SparseSignal(40, dict(zip(supp.tolist(), rng.standard_normal(supp.size).tolist())))
        y = measure_binary(D, x).bits
        misses += int(np.sum(A[:, supp].any(axis=1) & (y == 0)))
    assert misses == 0


class TestMeasurementBits:
    def test_string_round_trip(self):
        y = MeasurementBits([1, 0, 1, 1])
        assert MeasurementBits.from_string(y.to_string()) == y

    def test_blocks(self):
        y = MeasurementBits([1, 0, 1, 1, 0, 0])
        assert y.blocks(3).tolist() == [[1, 0, 1], [1, 0, 0]]
        with pytest.raises(ValueError):
            y.blocks(4)

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            MeasurementBits([0, 2])

    def test_immutable(self):
        y = MeasurementBits([0, 1])
        with pytest.raises(ValueError):
            y.bits[0] = 1


def test_nz_array_rejects_nan():
    with pytest.raises(ValueError):
        nz_array([0.0, math.nan])
