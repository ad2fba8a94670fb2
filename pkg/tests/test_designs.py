import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from edocs import oracle
from edocs.core import BinaryDesign
from edocs.designs import (DesignParams, build_random_cw_design, build_signature, decode_singleton,
                           decode_singletons, magnify, signature_length, sizing_aa, sizing_ae)
from fixtures import EX1_A_PRIME, EX1_M, EX1_U, direct_distinguishable


class TestSignature:
    def test_example_matrix(self):
        assert np.array_equal(build_signature(8).to_dense(), EX1_U)

    def test_example_column_four(self):
        col = build_signature(8).column(3)
        assert col[:3].tolist() == [0, 1, 1]

    def test_n_two(self):
        assert build_signature(2).to_dense().tolist() == [[0, 1], [1, 0]]

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            build_signature(1)

    @pytest.mark.parametrize("n, L", [(2, 1), (3, 2), (8, 3), (9, 4), (1000, 10), (1024, 10), (1025, 11)])
    def test_length(self, n, L):
        assert signature_length(n) == L

    @pytest.mark.parametrize("n", [2, 3, 8, 64, 100, 1000, 1024])
    def test_weights_and_pairwise_unions(self, n):
        U = build_signature(n)
        dense = U.to_dense().astype(bool)
        assert np.all(dense.sum(axis=0) == U.L)
        assert np.array_equal(dense[U.L:], ~dense[:U.L])
        for a in range(n - 1):
            assert (dense[:, a:a + 1] | dense[:, a + 1:]).sum(axis=0).min() >= U.L + 1

    def test_design_view_matches_dense(self):
        U = build_signature(37)
        assert np.array_equal(U.design.to_dense(), U.to_dense())
        assert U.design.col_weight == U.L


class TestDecodeSingleton:
    def test_example_column(self):
        assert decode_singleton([0, 1, 1, 1, 0, 0], 8) == 3

    def test_union_of_two_columns(self):
        U = EX1_U
        block = U[:, 3] | U[:, 5]
        assert block.sum() == 5
        assert decode_singleton(block, 8) is None

    def test_zero_block(self):
        assert decode_singleton([0] * 6, 8) is None

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            decode_singleton([0] * 5, 8)

    def test_value_beyond_n_rejected(self):
        U = build_signature(8)
        assert decode_singleton(U.column(6), 5) is None

    def test_complement_check(self):
        # weight L but bottom half is not the complement of the top half
        assert decode_singleton([1, 1, 0, 1, 0, 0], 8) is None

    @pytest.mark.parametrize("n", [2, 5, 8, 1000, 1024])
    def test_round_trip_exhaustive(self, n):
        U = build_signature(n)
        dense = U.to_dense().T
        assert decode_singletons(dense, n).tolist() == list(range(n))
        for j in range(0, n, max(1, n // 50)):
            assert decode_singleton(U.column(j), n) == j

    @given(st.integers(2, 300), st.data())
    def test_vectorised_matches_scalar(self, n, data):
        L = signature_length(n)
        blocks = np.array(data.draw(st.lists(st.lists(st.integers(0, 1), min_size=2 * L, max_size=2 * L),
                                             min_size=1, max_size=20)))
        vec = decode_singletons(blocks, n).tolist()
        scalar = [decode_singleton(b, n) for b in blocks]
        assert vec == [-1 if s is None else s for s in scalar]


class TestRandomDesign:
    def test_full_weight(self):
        D = build_random_cw_design(5, 7, 5, seed=1)
        assert all(D.column(j).tolist() == list(range(5)) for j in range(7))

    def test_deterministic(self):
        assert build_random_cw_design(30, 20, 6, 3) == build_random_cw_design(30, 20, 6, 3)
        assert build_random_cw_design(30, 20, 6, 3) != build_random_cw_design(30, 20, 6, 4)

    def test_weight_too_large(self):
        with pytest.raises(ValueError):
            build_random_cw_design(4, 3, 5, 0)

    def test_constant_weight(self):
        D = build_random_cw_design(50, 300, 9, 0, chunk=7)
        assert D.col_weight == 9
        assert np.all(D.weights() == 9)

    def test_rows_roughly_uniform(self):
        D = build_random_cw_design(20, 4000, 5, 2)
        counts = np.bincount(D.indices, minlength=20)
        expected = 4000 * 5 / 20
        chi2 = float(((counts - expected) ** 2 / expected).sum())
        assert chi2 < 50  # 19 dof; p ~ 1e-4

    def test_fixture_is_distinguishable(self):
        D = build_random_cw_design(40, 32, 8, 7)
        # frozen from both the package verifier and the dense transcription
        assert oracle.check_distinguishable(D, 2, 1) is True
        assert direct_distinguishable(D.to_dense(), 2, 1) is True


class TestMagnify:
    def test_example(self):
        A = magnify(BinaryDesign.from_dense(EX1_M), build_signature(8))
        assert np.array_equal(A.to_dense(), EX1_A_PRIME)

    def test_zero_design(self):
        M = BinaryDesign.from_columns(3, [[] for _ in range(8)])
        A = magnify(M, build_signature(8))
        assert A.rows == 18 and not A.to_dense().any()

    def test_single_all_ones_row(self):
        A = magnify(BinaryDesign.from_dense([[1, 1]]), build_signature(2))
        assert A.to_dense().tolist() == [[0, 1], [1, 0]]

    def test_width_mismatch(self):
        with pytest.raises(ValueError):
            magnify(BinaryDesign.from_dense([[1, 1, 1]]), build_signature(2))

    def test_block_structure(self):
        rng = np.random.default_rng(5)
        Md = (rng.random((6, 13)) < 0.4).astype(int)
        U = build_signature(13)
        A = magnify(BinaryDesign.from_dense(Md), U).to_dense()
        Ud = U.to_dense()
        u = U.rows
        for _ in range(40):
            i, j = rng.integers(6), rng.integers(13)
            assert np.array_equal(A[i * u:(i + 1) * u, j], Ud[:, j] * Md[i, j])

    def test_constant_weight_propagates(self):
        M = build_random_cw_design(10, 16, 3, 0)
        A = magnify(M, build_signature(16))
        assert A.col_weight == 3 * 4


class TestSizing:
    def test_aa_example(self):
        assert sizing_aa(1024, 4, 0.5, c_rows=4, c_weight=4).m1 == math.ceil(4 * 4 * 4 * math.log(256)) == 355

    def test_k_one_coincides(self):
        aa = sizing_aa(100, 1, 2.0)
        ae = sizing_ae(100, 1)
        assert (aa.m1, aa.d1, aa.m2, aa.d2) == (ae.m1, ae.d1, ae.m2, ae.d2)

    def test_doubling_n(self):
        for n in (64, 128, 256):
            a, b = sizing_ae(n, 4), sizing_ae(2 * n, 4)
            assert a.m1 == math.ceil(4 * 16 * math.log(n / 4))
            assert b.m1 == math.ceil(4 * 16 * math.log(2 * n / 4))
            assert b.m1 > a.m1

    def test_ae_formula(self):
        p = sizing_ae(64, 3, c_rows=4, c_weight=4, uf_rows=48, uf_weight=8)
        base = math.log(64 / 3)
        assert (p.m1, p.d1) == (math.ceil(36 * base), math.ceil(12 * base))
        assert (p.m2, p.d2) == (math.ceil(48 * 9 * base), math.ceil(24 * base))

    @pytest.mark.parametrize("args", [(10, 10, 0.5), (10, 0, 0.5), (10, 2, 0.0), (10, 2, 2.5)])
    def test_domain(self, args):
        with pytest.raises(ValueError):
            sizing_aa(*args)

    def test_constants_positive(self):
        with pytest.raises(ValueError):
            sizing_ae(10, 2, c_rows=0)

    def test_params_round_trip(self):
        for p in (sizing_aa(300, 5, 0.3, seed=9), sizing_ae(300, 5, uf_rows=30.5)):
            assert DesignParams.loads(p.dumps()) == p
            assert all("=" in line for line in p.dumps().splitlines())
