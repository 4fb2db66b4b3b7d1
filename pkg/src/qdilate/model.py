"""Fundamental operators, canonical unitary pair, characteristic triple,
functional-model compression, coincidence and admissibility checks.

Coordinate conventions: everything on the product defect spaces uses one
fixed basis per pair.  The basis of ran D_T comes from defect(T); the basis
of ran D_{T*} is the one carried by the starred Andô tuple (its product
defect equals D_{T*} exactly).  Consumers that must agree (fundamental
operators, Theta, model compression, coincidence) all draw from that shared
data, so basis freedom inside degenerate eigenspaces cannot split them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import hardy, matcore
from .ando import AndoTuple, DefectData, star_ando_tuple
from .errors import (
    FundamentalEquationResidualError,
    NonUnitarySolutionError,
    NotCnuError,
    NotIntertwinerError,
    SingularResolventError,
    TailTooLargeError,
)
from .hardy import TruncHardy, TwistedSymbol, materialize, obs_op, tail_norm
from .matcore import SubspaceBasis, adj, as_cmatrix, eye, frob, opnorm
from .qpair import QPair, cnu_decompose
from .report import Report


@dataclass(frozen=True)
class FundamentalPair:
    """The unique solutions (G1, G2) on ran D_{T*} of
    D_{T*} G1 D_{T*} = T1* - T2 T*  and  D_{T*} G2 D_{T*} = T2* - q T1 T*,
    in the coordinates of `defect`."""

    g1: np.ndarray
    g2: np.ndarray
    defect: DefectData
    funeq_residual: float
    oracle_gap: float


@dataclass(frozen=True)
class CanonicalUnitaryPair:
    """q-commuting unitaries on ran Q_{T*} induced by W_i* Q = Q T_i*."""

    q: complex
    basis: SubspaceBasis
    w1: np.ndarray
    w2: np.ndarray
    wd: np.ndarray
    q_op: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.dim


@dataclass(frozen=True)
class CharTriple:
    """Characteristic triple of a pair with cnu product.

    The unitary component collapses to dimension 0 in finite dimensions
    (recorded via q_residual = ||Q_{T*}||); theta evaluates the
    characteristic function of the product in the shared defect bases.
    """

    q: complex
    fundamental: FundamentalPair
    unitary_dim: int
    q_residual: float
    theta: Callable[[complex], np.ndarray]
    dt: DefectData
    dstar: DefectData
    product: np.ndarray

    def theta_coeffs(self, degree: int) -> list[np.ndarray]:
        return theta_taylor_coeffs(self.product, degree, self.dt, self.dstar)


def fundamental_from_tuple(star_tup: AndoTuple):
    """(G1, G2) = Lambda_** (P_*perp U_*, U_** P_*) Lambda_*."""
    lam, p, u = star_tup.lam, star_tup.p, star_tup.u
    p_perp = eye(star_tup.f_dim) - p
    g1 = adj(lam) @ p_perp @ u @ lam
    g2 = adj(lam) @ adj(u) @ p @ lam
    return g1, g2


def fundamental_ops(pair: QPair, tol: float = 1e-10,
                    star_tup: AndoTuple | None = None) -> FundamentalPair:
    """Fundamental operators from the starred tuple, cross-checked against the
    independent pseudoinverse solution of the defining equations.

    The oracle solves D G D = RHS in the kept defect coordinates, i.e.
    G_hat = (B*DB)^{-1} B* RHS B (B*DB)^{-1}; sandwiching by the basis keeps
    the inversion away from directions the rank cutoff already discarded.
    """
    if star_tup is None:
        star_tup = star_ando_tuple(pair)
    g1, g2 = fundamental_from_tuple(star_tup)
    dstar = star_tup.defect_t
    t = pair.product()
    t_star = adj(t)
    rhs1 = adj(pair.t1) - pair.t2 @ t_star
    rhs2 = adj(pair.t2) - pair.q * pair.t1 @ t_star
    b = dstar.basis.columns
    d_op = dstar.operator
    res = 0.0
    for g, rhs in ((g1, rhs1), (g2, rhs2)):
        res = max(res, frob(d_op @ (b @ g @ adj(b)) @ d_op - rhs))
    if res > tol:
        raise FundamentalEquationResidualError(
            f"fundamental equations violated: residual {res:.3e} > {tol:.1e}")
    gap = 0.0
    if dstar.dim:
        bd_inv = np.linalg.inv(matcore.hermitize(adj(b) @ d_op @ b))
        for g, rhs in ((g1, rhs1), (g2, rhs2)):
            g_hat = bd_inv @ (adj(b) @ rhs @ b) @ bd_inv
            gap = max(gap, frob(g_hat - g))
    return FundamentalPair(g1, g2, dstar, res, gap)


def canonical_unitary_pair(pair: QPair, tol: float = 1e-8,
                           power_tol: float = 1e-13) -> CanonicalUnitaryPair:
    """Unitaries on ran Q_{T*} solving W_i* Q = Q T_i*, W_D* Q = Q T*.

    Q^2 = lim T^n T*^n is an orthogonal projection in finite dimensions, so
    the least-squares solutions are isometries on its range; unitarity is a
    checked postcondition, not an assumption.
    """
    t = pair.product()
    a_lim = matcore.power_limit(t, tol=power_tol)
    q_op = matcore.psd_sqrt(a_lim)
    w, v = np.linalg.eigh(q_op)
    order = np.argsort(w)[::-1]
    keep = [i for i in order if w[i] > 0.5]
    n = t.shape[0]
    basis = SubspaceBasis(v[:, keep] if keep else np.zeros((n, 0), np.complex128))
    rq = adj(basis.columns) @ q_op
    rq_pinv = np.linalg.pinv(rq) if basis.dim else rq.T.conj()
    ws = []
    for op in (pair.t1, pair.t2, t):
        x_star = (rq @ adj(op)) @ rq_pinv
        k = basis.dim
        if k and frob(adj(x_star) @ x_star - eye(k)) > tol:
            raise NonUnitarySolutionError(
                "intertwining solution on ran Q is not unitary; "
                "rank tolerance likely misconfigured")
        ws.append(adj(x_star))
    return CanonicalUnitaryPair(pair.q, basis, ws[0], ws[1], ws[2], q_op)


def verify_canonical_pair(cp: CanonicalUnitaryPair, pair: QPair,
                          tol: float = 1e-10) -> Report:
    """Residuals of the canonical-pair axioms."""
    rep = Report("canonical-pair", {"tol": tol})
    k = cp.dim
    rq = adj(cp.basis.columns) @ cp.q_op
    rep.check("w1-intertwine", "W1* Q = Q T1*",
              frob(adj(cp.w1) @ rq - rq @ adj(pair.t1)), tol)
    rep.check("w2-intertwine", "W2* Q = Q T2*",
              frob(adj(cp.w2) @ rq - rq @ adj(pair.t2)), tol)
    rep.check("wd-intertwine", "W_D* Q = Q T*",
              frob(adj(cp.wd) @ rq - rq @ adj(pair.product())), tol)
    rep.check("q-commuting", "W1 W2 = q W2 W1",
              frob(cp.w1 @ cp.w2 - cp.q * cp.w2 @ cp.w1), tol)
    rep.check("product-relation", "W1* W2* = q W_D*",
              frob(adj(cp.w1) @ adj(cp.w2) - cp.q * adj(cp.wd)), tol)
    for name, w_mat in (("w1", cp.w1), ("w2", cp.w2), ("wd", cp.wd)):
        rep.check(f"{name}-unitary", "W*W = I",
                  frob(adj(w_mat) @ w_mat - eye(k)), tol)
    rep.check("fixed-point", "T Q^2 T* = Q^2",
              frob(pair.product() @ (cp.q_op @ cp.q_op) @ adj(pair.product())
                   - cp.q_op @ cp.q_op), 1e-10)
    return rep


def canonicity_transport(pair_a: QPair, pair_b: QPair, psi: np.ndarray,
                         tol: float = 1e-10) -> Report:
    """Transport psi|ran Q and verify it intertwines the canonical pairs."""
    psi = as_cmatrix(psi)
    int_res = max(frob(psi @ pair_a.t1 - pair_b.t1 @ psi),
                  frob(psi @ pair_a.t2 - pair_b.t2 @ psi))
    if int_res > 1e-10 or frob(adj(psi) @ psi - eye(pair_a.dim)) > 1e-10:
        raise NotIntertwinerError(
            f"psi does not unitarily intertwine the pairs: residual {int_res:.3e}")
    cp_a = canonical_unitary_pair(pair_a)
    cp_b = canonical_unitary_pair(pair_b)
    rep = Report("canonicity-transport", {"tol": tol})
    if cp_a.dim != cp_b.dim:
        rep.require("rank-match", "dim ran Q preserved", False,
                    note=f"{cp_a.dim} vs {cp_b.dim}")
        return rep
    tau = adj(cp_b.basis.columns) @ psi @ cp_a.basis.columns
    rep.check("tau-unitary", "tau = psi|ran Q is unitary",
              frob(adj(tau) @ tau - eye(cp_a.dim)), tol)
    rep.check("tau-w1", "tau W1 = W1' tau", frob(tau @ cp_a.w1 - cp_b.w1 @ tau), tol)
    rep.check("tau-w2", "tau W2 = W2' tau", frob(tau @ cp_a.w2 - cp_b.w2 @ tau), tol)
    rep.check("tau-wd", "tau W_D = W_D' tau", frob(tau @ cp_a.wd - cp_b.wd @ tau), tol)
    return rep


def verify_unique_canonical(pair: QPair, w1p: np.ndarray, w2p: np.ndarray,
                            tol: float = 1e-9):
    """Check the uniqueness characterization of the canonical pair.

    Candidates are given in the coordinates of canonical_unitary_pair(pair).
    Returns (bool, Report): preconditions W'_j* Q = Q T_j* and
    W'_1* W'_2* = q W_D*, then equality with the canonical pair.
    """
    cp = canonical_unitary_pair(pair)
    rep = Report("unique-canonical", {"tol": tol})
    if cp.dim == 0:
        rep.skip("vacuous", "ran Q = 0: uniqueness vacuous")
        return True, rep
    w1p, w2p = as_cmatrix(w1p), as_cmatrix(w2p)
    rq = adj(cp.basis.columns) @ cp.q_op
    ok = rep.check("pre-w1", "W1'* Q = Q T1*",
                   frob(adj(w1p) @ rq - rq @ adj(pair.t1)), tol)
    ok &= rep.check("pre-w2", "W2'* Q = Q T2*",
                    frob(adj(w2p) @ rq - rq @ adj(pair.t2)), tol)
    ok &= rep.check("pre-product", "W1'* W2'* = q W_D*",
                    frob(adj(w1p) @ adj(w2p) - cp.q * adj(cp.wd)), tol)
    ok &= rep.check("equality", "(W1', W2') = (W1, W2)",
                    max(frob(w1p - cp.w1), frob(w2p - cp.w2)), tol)
    return bool(ok), rep


def _resolvent_apply(t_star: np.ndarray, z: complex, rhs: np.ndarray) -> np.ndarray:
    n = t_star.shape[0]
    a = eye(n) - z * t_star
    try:
        x = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularResolventError(f"I - z T* singular at z = {z}") from exc
    if frob(a @ x - rhs) > 1e-8 * max(1.0, frob(rhs)):
        raise SingularResolventError(f"I - z T* numerically singular at z = {z}")
    return x


def char_fn(t: np.ndarray, z: complex, dt: DefectData | None = None,
            dstar: DefectData | None = None) -> np.ndarray:
    """Characteristic function Theta(z) = -T + z D_{T*}(I - zT*)^{-1} D_T,
    returned as a matrix between the defect-space coordinates."""
    t = matcore.check_contraction(t)
    if dt is None:
        dt = DefectData(*matcore.defect(t))
    if dstar is None:
        dstar = DefectData(*matcore.defect(adj(t)))
    t_star = adj(t)
    core = -t + z * dstar.operator @ _resolvent_apply(t_star, z, dt.operator)
    return adj(dstar.basis.columns) @ core @ dt.basis.columns


def theta_taylor_coeffs(t: np.ndarray, degree: int, dt: DefectData,
                        dstar: DefectData) -> list[np.ndarray]:
    """Taylor coefficients of Theta: Theta_0 = -T|, Theta_k = D_{T*}T*^{k-1}D_T|."""
    b_t, b_s = dt.basis.columns, dstar.basis.columns
    coeffs = [-adj(b_s) @ t @ b_t]
    block = dstar.operator
    t_star = adj(t)
    for _ in range(degree):
        coeffs.append(adj(b_s) @ block @ dt.operator @ b_t)
        block = block @ t_star
    return coeffs


def delta_fn(t: np.ndarray, zeta: complex, r: float | None = None,
             dt: DefectData | None = None, dstar: DefectData | None = None) -> np.ndarray:
    """Boundary defect (I - Theta(zeta)* Theta(zeta))^{1/2} on ran D_T.

    Direct evaluation at |zeta| = 1 needs rho(T) < 1; otherwise supply a
    radial parameter r < 1 to evaluate at r * zeta.
    """
    z = zeta if r is None else r * zeta
    if dt is None:
        dt = DefectData(*matcore.defect(t))
    theta = char_fn(t, z, dt, dstar)
    return matcore.psd_sqrt(eye(dt.dim) - adj(theta) @ theta)


def char_triple(pair: QPair, cnu_tol: float = 1e-8) -> CharTriple:
    """Characteristic triple of a pair whose product is cnu.

    The canonical unitary component is trivial at finite dimension; the
    collapse is asserted (||Q_{T*}|| recorded) rather than constructed.
    """
    t = pair.product()
    dec = cnu_decompose(t, cnu_tol)
    if dec.unitary_part.dim:
        raise NotCnuError(
            f"product has a unitary part of dimension {dec.unitary_part.dim}; "
            "restrict to the cnu part first")
    star_tup = star_ando_tuple(pair)
    fund = fundamental_ops(pair, star_tup=star_tup)
    q_norm = opnorm(matcore.psd_sqrt(matcore.power_limit(t, tol=1e-14)))
    dt = DefectData(*matcore.defect(t))
    dstar = fund.defect

    def theta(z: complex) -> np.ndarray:
        return char_fn(t, z, dt, dstar)

    return CharTriple(pair.q, fund, 0, q_norm, theta, dt, dstar, t)


def model_space(t: np.ndarray, n: int, dstar_basis: SubspaceBasis | None = None,
                tail_tol: float = 1e-10) -> SubspaceBasis:
    """Orthonormal basis of ran(obs column) inside TruncHardy(ran D_{T*})."""
    tail = tail_norm(t, n)
    if tail >= tail_tol:
        raise TailTooLargeError(f"||T*^{n + 1}|| = {tail:.3e} >= {tail_tol:.1e}")
    if dstar_basis is None:
        _, dstar_basis = matcore.defect(adj(t))
    obs = obs_op(t, dstar_basis, n)
    return SubspaceBasis(matcore.orth_columns(obs.matrix))


@dataclass(frozen=True)
class ModelCompression:
    m1: np.ndarray
    m2: np.ndarray
    basis: SubspaceBasis
    trunc: int
    tail: float
    defect: float
    report: Report


def model_symbols(q: complex, g1: np.ndarray, g2: np.ndarray):
    """The two model multipliers: M_{G1*+zG2} R_q and R_qbar M_{G2*+zG1}
    (the latter rewritten with the rotation on the right)."""
    sym1 = TwistedSymbol(q, 1, (adj(g1), g2))
    sym2 = TwistedSymbol(q, -1, (adj(g2), np.conj(q) * g1))
    return sym1, sym2


def model_compress(pair: QPair, n: int | None = None, tail_tol: float = 1e-10,
                   tol: float = 1e-8) -> ModelCompression:
    """Compress the model multipliers to the truncated model space and verify
    unitary equivalence with the source pair, tail-corrected."""
    t = pair.product()
    dec = cnu_decompose(t)
    if dec.unitary_part.dim:
        raise NotCnuError("model compression needs a cnu product")
    if n is None:
        n = max(hardy.choose_trunc(t, tail_tol), 4)
    tail = tail_norm(t, n)
    if tail >= tail_tol:
        raise TailTooLargeError(f"||T*^{n + 1}|| = {tail:.3e} >= {tail_tol:.1e}")
    star_tup = star_ando_tuple(pair)
    fund = fundamental_ops(pair, star_tup=star_tup)
    sym1, sym2 = model_symbols(pair.q, fund.g1, fund.g2)
    mat1 = materialize(sym1, n).matrix
    mat2 = materialize(sym2, n).matrix
    obs = obs_op(t, fund.defect.basis, n)
    basis = SubspaceBasis(matcore.orth_columns(obs.matrix))
    b = basis.columns
    m1 = adj(b) @ mat1 @ b
    m2 = adj(b) @ mat2 @ b
    pihat = adj(b) @ obs.matrix

    rep = Report("model-compress", {"trunc": n, "tol": tol, "tail": tail})
    r1 = opnorm(adj(mat1) @ obs.matrix - obs.matrix @ adj(pair.t1))
    r2 = opnorm(adj(mat2) @ obs.matrix - obs.matrix @ adj(pair.t2))
    corrected = tol + 10.0 * tail
    rep.check("intertwine-1", "M1* Pi = Pi T1* (tail-corrected)", r1, corrected)
    rep.check("intertwine-2", "M2* Pi = Pi T2* (tail-corrected)", r2, corrected)
    rep.check("pi-isometry", "Pi*Pi = I up to the exact tail",
              frob(adj(pihat) @ pihat - eye(pair.dim)), tol + 10.0 * tail ** 2)
    e1 = opnorm(pihat @ adj(pair.t1) - adj(m1) @ pihat)
    e2 = opnorm(pihat @ adj(pair.t2) - adj(m2) @ pihat)
    defect_val = max(e1, e2)
    rep.check("equivalence-defect",
              "compressed pair unitarily equivalent to the source pair",
              defect_val, corrected)
    mz = materialize(hardy.shift_symbol(pair.q, fund.defect.dim), n).matrix
    rep.check("compressed-q-commute", "M1 M2 = q M2 M1 on the model space",
              opnorm(m1 @ m2 - pair.q * m2 @ m1), corrected)
    rep.check("compressed-product", "M1 M2 equals the compressed shift",
              opnorm(m1 @ m2 - adj(b) @ mz @ b), corrected)
    return ModelCompression(m1, m2, basis, n, tail, defect_val, rep)


def induced_defect_unitaries(triple_a: CharTriple, triple_b: CharTriple,
                             psi: np.ndarray, tol: float = 1e-9):
    """Restrict a unitary pair-intertwiner to the defect spaces."""
    psi = as_cmatrix(psi)
    u = adj(triple_b.dt.basis.columns) @ psi @ triple_a.dt.basis.columns
    u_star = adj(triple_b.dstar.basis.columns) @ psi @ triple_a.dstar.basis.columns
    for name, mat, k in (("u", u, triple_a.dt.dim), ("u_star", u_star,
                                                     triple_a.dstar.dim)):
        if mat.shape[0] != mat.shape[1]:
            raise NotIntertwinerError(f"{name} is not square: defect dims differ")
        if frob(adj(mat) @ mat - eye(k)) > tol:
            raise NotIntertwinerError(f"{name} fails to be unitary: psi does not "
                                      "map the defect space onto its partner")
    return u, u_star


def verify_coincidence(triple_a: CharTriple, triple_b: CharTriple,
                       u: np.ndarray, u_star: np.ndarray,
                       radii=None, angles: int = 16, tol: float = 1e-9) -> Report:
    """Residuals of coincidence via the supplied defect unitaries.

    (i) u_* Theta(z) = Theta'(z) u on a disk grid, (ii) conjugation of the
    fundamental pairs, (iii) unitary parts (trivial at finite dimension)."""
    if radii is None:
        radii = np.linspace(0.1, 0.9, 8)
    rep = Report("coincidence", {"radii": len(list(radii)), "angles": angles,
                                 "tol": tol})
    u, u_star = as_cmatrix(u), as_cmatrix(u_star)
    worst = 0.0
    for r in radii:
        for k in range(angles):
            z = r * np.exp(2j * np.pi * k / angles)
            worst = max(worst, frob(u_star @ triple_a.theta(z)
                                    - triple_b.theta(z) @ u))
    rep.check("theta-coincide", "u_* Theta(z) = Theta'(z) u on the grid",
              worst, tol)
    g_res = max(frob(triple_b.fundamental.g1 - u_star @ triple_a.fundamental.g1 @ adj(u_star)),
                frob(triple_b.fundamental.g2 - u_star @ triple_a.fundamental.g2 @ adj(u_star)))
    rep.check("fundamental-conjugate", "(G1', G2') = u_* (G1, G2) u_**", g_res, tol)
    if triple_a.unitary_dim == 0 and triple_b.unitary_dim == 0:
        rep.check("unitary-part", "residual unitary parts both 0-dimensional",
                  max(triple_a.q_residual, triple_b.q_residual), 1e-6)
    else:
        rep.require("unitary-part", "nontrivial residual parts not representable "
                    "at finite dimension", False)
    return rep


def verify_admissible(g1: np.ndarray, g2: np.ndarray, theta_coeffs, n: int,
                      q: complex, tol: float = 1e-9) -> Report:
    """Check the four admissibility conditions for ((G1,G2), trivial, Theta).

    Theta is a matrix polynomial given by its coefficient list (fiber
    ran D -> ran D_*).  The Delta-space must be trivial (Theta two-sided
    inner), which is the finite-dimensional scope; condition (2) is then
    vacuous and recorded as such.
    """
    g1, g2 = as_cmatrix(g1), as_cmatrix(g2)
    coeffs = [as_cmatrix(c) for c in theta_coeffs]
    theta_sym = TwistedSymbol(q, 0, tuple(coeffs))
    d_in, d_out = theta_sym.fiber_in, theta_sym.fiber_out
    d_theta = theta_sym.degree
    rep = Report("admissible", {"trunc": n, "tol": tol})

    sym1, sym2 = model_symbols(q, g1, g2)
    op1 = materialize(sym1, n)
    op2 = materialize(sym2, n)
    excess = max(opnorm(op1.restricted()), opnorm(op2.restricted())) - 1.0
    rep.check("cond1-contractive",
              "M_{G1*+zG2}R_q and R_qbar M_{G2*+zG1} are contractions",
              max(0.0, excess), 1e-9)

    inner_res = 0.0
    for k in range(64):
        zeta = np.exp(2j * np.pi * k / 64)
        th = theta_sym.value(zeta)
        inner_res = max(inner_res, frob(adj(th) @ th - eye(d_in)))
    if inner_res <= 1e-8:
        rep.check("cond2-trivial-delta",
                  "Theta inner on the circle: Delta-space is 0, W-condition vacuous",
                  inner_res, 1e-8)
    else:
        rep.require("cond2-trivial-delta",
                    "nontrivial Delta-space: outside finite-dimensional scope",
                    False, note=f"worst boundary defect {inner_res:.3e}")
        return rep

    dom = TruncHardy(d_in, n)
    cod = TruncHardy(d_out, n)
    t_theta = materialize(theta_sym, n).matrix
    q_cols = t_theta @ dom.embed(n - d_theta)
    q_basis = matcore.orth_columns(q_cols)
    interior = max(n - d_theta - 1, -1)
    test_cols = matcore.orth_columns(t_theta @ dom.embed(interior))
    mz = materialize(hardy.shift_symbol(q, d_out), n).matrix
    worst_inv = 0.0
    if test_cols.shape[1]:
        for a_mat in (op1.matrix, op2.matrix, mz):
            image = a_mat @ test_cols
            worst_inv = max(worst_inv,
                            opnorm(image - q_basis @ (adj(q_basis) @ image)))
    rep.check("cond3-invariance",
              "(Theta)H^2 invariant under both multipliers and M_z",
              worst_inv, tol)

    k_int = n - d_theta - 2
    if k_int < 0:
        rep.skip("cond4-compression",
                 "compressed product identities on the model complement",
                 note="truncation too small to expose an interior complement")
        return rep
    low = cod.embed(k_int)
    w_cols = adj(low) @ (t_theta @ dom.embed(k_int))
    x_red = _null_space(adj(w_cols))
    x = low @ x_red
    if x.shape[1] == 0:
        rep.skip("cond4-compression",
                 "compressed product identities on the model complement",
                 note="model complement has no low-degree vectors at this truncation")
        return rep
    a1, a2 = op1.matrix, op2.matrix
    prod12 = adj(a1) @ (adj(a2) @ x)
    prod21 = adj(a2) @ (adj(a1) @ x)
    r4a = opnorm(prod12 - q * prod21)
    r4b = opnorm(prod21 - adj(mz) @ x)
    rep.check("cond4-q-commute", "A1* A2* = q A2* A1* on the model space", r4a, tol)
    rep.check("cond4-product", "A2* A1* = M_z* on the model space", r4b, tol)
    return rep


def _null_space(a: np.ndarray) -> np.ndarray:
    """Orthonormal basis of ker(a), deterministic SVD route."""
    a = as_cmatrix(a)
    if a.shape[1] == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    if a.shape[0] == 0:
        return eye(a.shape[1])
    u, s, vh = np.linalg.svd(a)
    tol = max(a.shape) * matcore.EPS * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > tol))
    return adj(vh)[:, rank:]
