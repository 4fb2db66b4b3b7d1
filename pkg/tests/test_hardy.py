import numpy as np
import pytest

from qdilate import hardy
from qdilate.errors import FiberMismatchError, NotQCommutantError, TailTooLargeError
from qdilate.hardy import (
    TruncHardy,
    TwistedSymbol,
    ev0,
    extract_symbol,
    identity_symbol,
    materialize,
    obs_op,
    obs_tail_identity,
    rotation_symbol,
    shift_symbol,
    symbol_compose,
    symbol_is_inner,
)
from qdilate.matcore import adj, defect, eye, frob, opnorm

Q = np.exp(2j * np.pi / 7)


def random_symbol(rng, q, fiber, degree, twist=1):
    coeffs = tuple(rng.standard_normal((fiber, fiber))
                   + 1j * rng.standard_normal((fiber, fiber))
                   for _ in range(degree + 1))
    return TwistedSymbol(q, twist, coeffs)


class TestCompose:
    def test_shift_rot_squared(self):
        # (M_z R_q)^2 = q M_{z^2} R_{q^2}
        s = symbol_compose(shift_symbol(Q, 1), rotation_symbol(Q, 1))
        ss = symbol_compose(s, s)
        assert ss.twist == 2
        assert ss.degree == 2
        assert abs(ss.coeffs[2][0, 0] - Q) < 1e-15
        assert frob(ss.coeffs[0]) == 0.0 and frob(ss.coeffs[1]) == 0.0

    def test_identity_neutral(self):
        rng = np.random.default_rng(1)
        s = random_symbol(rng, Q, 3, 2)
        left = symbol_compose(identity_symbol(Q, 3), s)
        assert left.twist == s.twist and left.degree == s.degree
        assert all(frob(a - b) < 1e-14 for a, b in zip(left.coeffs, s.coeffs))

    def test_rotation_past_constant(self):
        # R_q composed with a constant multiplier keeps the coefficient
        rng = np.random.default_rng(2)
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        s = symbol_compose(rotation_symbol(Q, 2), TwistedSymbol(Q, 0, (a,)))
        assert s.twist == 1
        assert frob(s.coeffs[0] - a) < 1e-15

    def test_fiber_mismatch(self):
        with pytest.raises(FiberMismatchError):
            symbol_compose(identity_symbol(Q, 2), identity_symbol(Q, 3))

    @pytest.mark.parametrize("seed", range(4))
    def test_materialize_respects_compose(self, seed):
        # product of materializations equals materialized product after
        # restricting inputs by the combined degree; exact coefficients
        rng = np.random.default_rng(seed)
        n = 9
        s1 = random_symbol(rng, Q, 2, rng.integers(0, 3), twist=int(rng.integers(-2, 3)))
        s2 = random_symbol(rng, Q, 2, rng.integers(0, 3), twist=int(rng.integers(-2, 3)))
        prod = symbol_compose(s1, s2)
        lhs = materialize(s1, n).matrix @ materialize(s2, n).matrix
        rhs = materialize(prod, n).matrix
        emb = TruncHardy(2, n).embed(n - s1.degree - s2.degree)
        assert opnorm((lhs - rhs) @ emb) < 1e-13 * max(1.0, opnorm(rhs))


class TestInner:
    def test_projection_unitary_symbol(self):
        # (P_perp + z P) U with P a projection and U unitary is inner
        p = np.diag([1.0, 0.0]).astype(complex)
        u = np.array([[0, 1], [1, 0]], dtype=complex)
        s = TwistedSymbol(Q, 1, ((eye(2) - p) @ u, p @ u))
        ok, res = symbol_is_inner(s)
        assert ok and res < 1e-14

    def test_strict_contraction_not_inner(self):
        s = TwistedSymbol(Q, 0, (0.5 * eye(2),))
        ok, res = symbol_is_inner(s)
        assert not ok and res > 0.5

    def test_shift_inner(self):
        ok, _ = symbol_is_inner(shift_symbol(Q, 3))
        assert ok

    def test_inner_implies_truncated_isometry(self):
        p = np.diag([1.0, 0.0]).astype(complex)
        u = np.array([[0, 1], [1, 0]], dtype=complex)
        s = TwistedSymbol(Q, 1, ((eye(2) - p) @ u, p @ u))
        n = 8
        m = materialize(s, n)
        emb = TruncHardy(2, n).embed(n - 1)
        assert opnorm((adj(m.matrix) @ m.matrix - eye(m.matrix.shape[0])) @ emb) < 1e-12


class TestMaterialize:
    def test_shift_blocks(self):
        m = materialize(shift_symbol(Q, 1), 2).matrix
        vec = np.array([1.0, 2.0, 3.0], dtype=complex)
        assert np.allclose(m @ vec, [0.0, 1.0, 2.0])

    def test_rotation_diagonal(self):
        m = materialize(rotation_symbol(Q, 1), 2).matrix
        assert np.allclose(np.diag(m), [1.0, Q, Q ** 2])

    def test_degree_one_block_structure(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        m = materialize(TwistedSymbol(Q, 1, (a, b)), 1).matrix
        expected = np.block([[a, np.zeros((2, 2))], [b, Q * a]])
        assert frob(m - expected) < 1e-14

    def test_generating_relation(self):
        # R_q M_z = q M_z R_q on degrees <= N-1
        n = 6
        mz = materialize(shift_symbol(Q, 2), n).matrix
        rq = materialize(rotation_symbol(Q, 2), n).matrix
        emb = TruncHardy(2, n).embed(n - 1)
        assert opnorm((rq @ mz - Q * mz @ rq) @ emb) < 1e-13


class TestEv0:
    def test_picks_constants(self):
        e = ev0(3, 2)
        vec = np.arange(8, dtype=complex)
        assert np.allclose(e.matrix @ vec, [0.0, 1.0])

    def test_adjoint_embeds_constants(self):
        e = ev0(3, 2)
        xi = np.array([1.0, -2.0], dtype=complex)
        f = adj(e.matrix) @ xi
        assert np.allclose(f[:2], xi) and frob(f[2:].reshape(-1, 1)) == 0.0


class TestObservability:
    def test_zero_contraction(self):
        t = np.zeros((2, 2), dtype=complex)
        _, basis = defect(adj(t))
        col = obs_op(t, basis, 3).matrix
        assert col.shape == (8, 2)
        assert frob(col[:2] @ basis.columns - eye(2)) < 1e-14
        assert frob(col[2:]) == 0.0

    def test_unitary_gives_zero(self):
        t = np.diag([1j, -1j]).astype(complex)
        _, basis = defect(adj(t))
        assert basis.dim == 0
        col = obs_op(t, basis, 3).matrix
        assert col.shape == (0, 2)

    def test_scalar_geometric(self):
        t = np.array([[0.5]], dtype=complex)
        _, basis = defect(adj(t))
        col = obs_op(t, basis, 4).matrix
        expected = np.sqrt(0.75) * 0.5 ** np.arange(5)
        assert np.allclose(np.abs(col.ravel()), expected)

    def test_tail_identity_unitary(self):
        t = np.diag([1j]).astype(complex)
        lhs, rhs = obs_tail_identity(t, 5, np.array([1.0]))
        assert abs(lhs) < 1e-14 and abs(rhs) < 1e-14

    def test_tail_identity_zero(self):
        t = np.zeros((3, 3), dtype=complex)
        h = np.array([1.0, 2.0, -1.0], dtype=complex)
        lhs, rhs = obs_tail_identity(t, 4, h)
        assert abs(lhs - np.linalg.norm(h) ** 2) < 1e-12
        assert abs(lhs - rhs) < 1e-12

    def test_tail_identity_hand_value(self):
        # T = diag(0.5), h = e1, N = 3: both sides are 1 - 0.5^8 (telescoping)
        t = np.array([[0.5]], dtype=complex)
        lhs, rhs = obs_tail_identity(t, 3, np.array([1.0]))
        assert abs(lhs - (1 - 0.5 ** 8)) < 1e-14
        assert abs(rhs - (1 - 0.5 ** 8)) < 1e-14

    @pytest.mark.parametrize("seed", range(6))
    def test_tail_identity_corpus(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 33))
        dim = int(rng.integers(1, 5))
        a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        t = a / (np.linalg.norm(a, 2) + rng.random())
        h = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        lhs, rhs = obs_tail_identity(t, n, h)
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(rhs))

    def test_choose_trunc(self):
        t = np.array([[0.5]], dtype=complex)
        n = hardy.choose_trunc(t, 1e-10)
        assert 0.5 ** (n + 1) < 1e-10 <= 0.5 ** n
        with pytest.raises(TailTooLargeError):
            hardy.choose_trunc(np.array([[1.0]], dtype=complex), 1e-10, max_degree=16)


class TestExtract:
    def test_round_trip_degree_one(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        s = TwistedSymbol(Q, 1, (a, b))
        sym, res = extract_symbol(materialize(s, 8), Q)
        assert sym.degree == 1
        assert frob(sym.coeffs[0] - a) < 1e-13
        assert frob(sym.coeffs[1] - b) < 1e-13
        assert res < 1e-12

    def test_round_trip_degree_two(self):
        rng = np.random.default_rng(5)
        coeffs = tuple(rng.standard_normal((2, 2)) + 0j for _ in range(3))
        s = TwistedSymbol(Q, 1, coeffs)
        sym, res = extract_symbol(materialize(s, 8), Q)
        assert sym.degree == 2 and res < 1e-12

    def test_shift_rotation(self):
        s = symbol_compose(shift_symbol(Q, 1), rotation_symbol(Q, 1))
        sym, res = extract_symbol(materialize(s, 6), Q)
        assert sym.degree == 1
        assert abs(sym.coeffs[1][0, 0] - 1.0) < 1e-14
        assert res < 1e-13

    def test_rejects_non_commutant(self):
        n = 6
        proj = np.zeros(((n + 1), (n + 1)), dtype=complex)
        proj[0, 0] = 1.0
        op = hardy.TruncOperator(proj, TruncHardy(1, n), TruncHardy(1, n), 0)
        with pytest.raises(NotQCommutantError):
            extract_symbol(op, Q)


class TestJson:
    def test_symbol_round_trip(self):
        rng = np.random.default_rng(6)
        s = random_symbol(rng, Q, 2, 1, twist=-1)
        back = hardy.symbol_from_json(hardy.symbol_to_json(s))
        assert back.twist == -1
        assert all(frob(a - b) < 1e-15 for a, b in zip(back.coeffs, s.coeffs))
