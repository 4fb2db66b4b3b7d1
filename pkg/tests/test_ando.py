import numpy as np
import pytest

import qdilate as qd
from qdilate import ando
from qdilate.matcore import adj, eye, frob

from conftest import rand_vec


def zero_pair(n=1):
    return qd.validate(1.0, np.zeros((n, n)), np.zeros((n, n)))


class TestConstruction:
    def test_zero_pair_dim1_hand_values(self):
        # all defects are C; Lambda(1) = (0, 1) and U maps (0, 1) to (1, 0)
        tup = qd.special_ando_tuple(zero_pair())
        assert (tup.d1_dim, tup.d2_dim, tup.dt_dim, tup.e_dim) == (1, 1, 1, 0)
        assert np.allclose(tup.lam.ravel(), [0.0, 1.0])
        assert np.allclose(tup.u @ np.array([0.0, 1.0]), [1.0, 0.0])
        assert frob(adj(tup.u) @ tup.u - eye(2)) < 1e-12

    def test_unitary_pair_trivial(self):
        tup = qd.special_ando_tuple(qd.gen_clock_shift(4, 1.0))
        assert tup.f_dim == 0
        assert tup.lam.shape == (0, 0)

    def test_scaled_clock_shift_invariants(self):
        p = qd.gen_clock_shift(2, 0.5)
        tup = qd.special_ando_tuple(p)
        rep = ando.verify_tuple_invariants(tup, p)
        assert rep.overall, rep.summary_lines()

    def test_projection_is_first_summand(self):
        p = qd.gen_nilpotent(3, 1j, 0.8, 0.9)
        tup = qd.special_ando_tuple(p)
        expected = np.zeros((tup.f_dim, tup.f_dim), dtype=complex)
        expected[:tup.d1_dim, :tup.d1_dim] = eye(tup.d1_dim)
        assert np.array_equal(tup.p, expected)

    def test_user_supplied_completion(self):
        pair = zero_pair()
        swap = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
        tup = qd.special_ando_tuple(pair, unitary_completion=swap)
        assert np.array_equal(tup.u, swap)
        assert qd.verify_prop1(tup, pair).overall

    def test_bad_completion_rejected(self):
        pair = zero_pair()
        with pytest.raises(Exception):
            qd.special_ando_tuple(pair, unitary_completion=eye(2))


class TestDefectIdentity:
    @pytest.mark.parametrize("seed", range(4))
    def test_lambda_isometry_identity(self, seed, corpus):
        # ||D_{T1} T2 h||^2 + ||D_{T2} h||^2 = ||D_T h||^2 for random h
        rng = np.random.default_rng(seed)
        name, p, _ = corpus[rng.integers(len(corpus))]
        tup = qd.special_ando_tuple(p)
        h = rand_vec(rng, p.dim)
        lhs = (np.linalg.norm(tup.defect_t1.operator @ p.t2 @ h) ** 2
               + np.linalg.norm(tup.defect_t2.operator @ h) ** 2)
        rhs = np.linalg.norm(tup.defect_t.operator @ h) ** 2
        assert abs(lhs - rhs) < 1e-10 * max(1.0, rhs)

    def test_operator_form(self):
        p = qd.gen_nilpotent(4, np.exp(1j), 1.0, 0.7)
        t = p.product()
        d_sq = eye(4) - adj(t) @ t
        d2_sq = eye(4) - adj(p.t2) @ p.t2
        d1_sq = eye(4) - adj(p.t1) @ p.t1
        assert frob(d_sq - (d2_sq + adj(p.t2) @ d1_sq @ p.t2)) < 1e-13
        assert frob(d_sq - (d1_sq + adj(p.t1) @ d2_sq @ p.t1)) < 1e-13


class TestStructuralIdentities:
    def test_zero_pair_exact(self):
        pair = zero_pair()
        tup = qd.special_ando_tuple(pair)
        rep = qd.verify_prop1(tup, pair, tol=1e-12)
        assert rep.overall, rep.summary_lines()
        star = qd.star_ando_tuple(pair)
        rep2 = qd.verify_prop2(star, pair, tol=1e-12)
        assert rep2.overall, rep2.summary_lines()

    def test_unitary_pair_collapse(self):
        pair = qd.gen_clock_shift(3, 1.0)
        tup = qd.special_ando_tuple(pair)
        rep = qd.verify_prop1(tup, pair, tol=1e-12)
        assert rep.overall

    def test_conjugated_nilpotent(self):
        base = qd.gen_nilpotent(3, 1j, 0.9, 0.8)
        pair, _ = qd.gen_conjugated(base, seed=3)
        tup = qd.special_ando_tuple(pair)
        assert qd.verify_prop1(tup, pair, tol=1e-10).overall
        star = qd.star_ando_tuple(pair)
        assert qd.verify_prop2(star, pair, tol=1e-10).overall

    def test_star_tuple_shapes(self):
        pair = zero_pair()
        star = qd.star_ando_tuple(pair)
        assert (star.d1_dim, star.d2_dim, star.dt_dim) == (1, 1, 1)
        tup = qd.special_ando_tuple(qd.gen_nilpotent(3, 1j, 0.8, 0.9))
        assert tup.f_dim == tup.d1_dim + tup.d2_dim

    def test_corpus(self, corpus):
        for name, p, _ in corpus:
            tup = qd.special_ando_tuple(p)
            star = qd.star_ando_tuple(p)
            assert qd.verify_prop1(tup, p, tol=1e-10).overall, name
            assert qd.verify_prop2(star, p, tol=1e-10).overall, name

    def test_star_defect_matches_product_adjoint(self):
        # the starred tuple's product defect is D_{T*} for T = T1 T2
        p = qd.gen_nilpotent(3, np.exp(1j), 0.9, 0.8)
        star = qd.star_ando_tuple(p)
        t = p.product()
        from qdilate import matcore
        d_direct = matcore.psd_sqrt(eye(3) - t @ adj(t))
        assert frob(star.defect_t.operator - d_direct) < 1e-12


class TestJson:
    def test_tuple_json(self):
        tup = qd.special_ando_tuple(qd.gen_clock_shift(2, 0.5))
        obj = tup.to_json()
        assert obj["e_dim"] == 0
        assert obj["lambda"]["rows"] == tup.f_dim
