"""Isometric-lift constructions and verification under the truncation contract.

Two models are built at finite Hardy truncation N:

* the inclusion-type lift on H (+) TruncHardy(F): block lower triangular,
  heads (T1, T2), twisted multipliers on the Hardy part and one constant
  column injecting the defect data;
* the Douglas-type lift on TruncHardy(F_*) (+) ran Q_{T*}: block diagonal
  multipliers plus the canonical unitary pair on the tail, with the
  observability column as the embedding.

Every verified identity carries a degree budget: an identity whose sides have
maximal z-degree d is asserted on inputs of degree <= N - d only, where it
holds exactly; Douglas embedding residuals are instead bounded by the exact
tail quantity ||D_{T*} T*^{N+1}|| of the observability column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import hardy, matcore, model
from .ando import AndoTuple
from .errors import GeneratorError, NotModelFormError
from .hardy import TruncHardy, TwistedSymbol, materialize, shift_symbol
from .matcore import adj, eye, frob, opnorm
from .model import CanonicalUnitaryPair
from .qpair import QPair
from .report import Report


@dataclass(frozen=True)
class LiftSpace:
    """H (+) TruncHardy (+) unitary tail, in that order."""

    head_dim: int
    hardy: TruncHardy
    tail_dim: int

    @property
    def total_dim(self) -> int:
        return self.head_dim + self.hardy.total_dim + self.tail_dim

    def embed_interior(self, d: int) -> np.ndarray:
        """Embedding of head (+) degrees <= N-d (+) tail into the full space."""
        blocks = [eye(self.head_dim), self.hardy.embed(self.hardy.max_degree - d),
                  eye(self.tail_dim)]
        return scipy.linalg.block_diag(*blocks).astype(np.complex128)

    @property
    def hardy_start(self) -> int:
        return self.head_dim

    @property
    def tail_start(self) -> int:
        return self.head_dim + self.hardy.total_dim


@dataclass(frozen=True)
class LiftRealization:
    kind: str
    q: complex
    space: LiftSpace
    pi: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    trunc: int
    tuple_: AndoTuple
    canonical: CanonicalUnitaryPair | None = None


def schaffer_symbols(tup: AndoTuple, q: complex):
    """Hardy-block symbols of the inclusion-type lift: ((I-P)+zP)U twisted by
    R_q, and U*(P+z(I-P)) twisted by R_qbar (rotation pulled to the right).
    Their composition is exactly the shift symbol, coefficient by coefficient.
    """
    p, u = tup.p, tup.u
    p_perp = eye(tup.f_dim) - p
    sym1 = TwistedSymbol(q, 1, (p_perp @ u, p @ u))
    sym2 = TwistedSymbol(q, -1, (adj(u) @ p, np.conj(q) * (adj(u) @ p_perp)))
    return sym1, sym2


def douglas_symbols(star_tup: AndoTuple, q: complex):
    """Hardy-block symbols of the Douglas-type lift: U_**((I-P_*)+zP_*)
    twisted by R_q, and (P_*+z(I-P_*))U_* twisted by R_qbar."""
    p, u = star_tup.p, star_tup.u
    p_perp = eye(star_tup.f_dim) - p
    sym1 = TwistedSymbol(q, 1, (adj(u) @ p_perp, adj(u) @ p))
    sym2 = TwistedSymbol(q, -1, (p @ u, np.conj(q) * (p_perp @ u)))
    return sym1, sym2


def schaffer_lift(pair: QPair, tup: AndoTuple, n: int = hardy.DEFAULT_TRUNC) -> LiftRealization:
    """Inclusion-type lift on H (+) TruncHardy(F).

    V1 = [[T1, 0], [ev0* PU Lambda D_T, q M_{((I-P)+zP)U} R_q]],
    V2 = [[T2, 0], [qbar ev0* U*(I-P) Lambda D_T, qbar R_qbar M_{U*(P+z(I-P))}]].
    """
    q = pair.q
    f = tup.f_dim
    h_dim = pair.dim
    space = LiftSpace(h_dim, TruncHardy(f, n), 0)
    p, u = tup.p, tup.u
    p_perp = eye(f) - p
    ell = tup.lam_dt()

    sym1, sym2 = schaffer_symbols(tup, q)
    hblock1 = q * materialize(sym1, n).matrix
    hblock2 = np.conj(q) * materialize(sym2, n).matrix

    def assemble(head, const_row, hblock):
        v = np.zeros((space.total_dim, space.total_dim), dtype=np.complex128)
        v[:h_dim, :h_dim] = head
        v[h_dim:h_dim + f, :h_dim] = const_row
        v[h_dim:, h_dim:] = hblock
        return v

    v1 = assemble(pair.t1, p @ u @ ell, hblock1)
    v2 = assemble(pair.t2, np.conj(q) * (adj(u) @ p_perp @ ell), hblock2)
    pi = np.zeros((space.total_dim, h_dim), dtype=np.complex128)
    pi[:h_dim] = eye(h_dim)
    return LiftRealization("schaffer", q, space, pi, v1, v2, n, tup)


def douglas_lift(pair: QPair, star_tup: AndoTuple,
                 n: int = hardy.DEFAULT_TRUNC) -> LiftRealization:
    """Douglas-type lift on TruncHardy(F_*) (+) ran Q_{T*}.

    V1 = M_{U_**((I-P_*)+zP_*)}R_q (+) W1, V2 = R_qbar M_{(P_*+z(I-P_*))U_*} (+) W2;
    the embedding stacks the Lambda_*-dressed observability column on the
    Q_{T*}-coordinates.
    """
    q = pair.q
    t = pair.product()
    cp = model.canonical_unitary_pair(pair)
    f = star_tup.f_dim
    space = LiftSpace(0, TruncHardy(f, n), cp.dim)

    sym1, sym2 = douglas_symbols(star_tup, q)
    v1 = scipy.linalg.block_diag(materialize(sym1, n).matrix, cp.w1).astype(np.complex128)
    v2 = scipy.linalg.block_diag(materialize(sym2, n).matrix, cp.w2).astype(np.complex128)

    pi = np.zeros((space.total_dim, pair.dim), dtype=np.complex128)
    block = star_tup.lam @ star_tup.defect_t.coords()
    t_star = adj(t)
    for deg in range(n + 1):
        pi[deg * f:(deg + 1) * f] = block
        block = block @ t_star
    pi[space.tail_start:] = adj(cp.basis.columns) @ cp.q_op
    return LiftRealization("douglas", q, space, pi, v1, v2, n, star_tup, cp)


def verify_lift(lift: LiftRealization, pair: QPair, tol: float = 1e-10) -> Report:
    """Residuals of the lift axioms under the degree-budget contract.

    Intertwinings are exact for the inclusion-type lift and tail-corrected
    for Douglas; isometry uses budget 1, q-commutation budget 2.  For Douglas
    the intertwinings of the plain observability embedding against the
    fundamental-operator multipliers are checked as well.
    """
    q = pair.q
    t = pair.product()
    n = lift.trunc
    rep = Report(f"lift-{lift.kind}", {"trunc": n, "tol": tol})
    tail = hardy.defect_tail_norm(t, n) if lift.kind == "douglas" else 0.0
    rep.environment["tail"] = tail

    int_tol = 1e-11 if lift.kind == "schaffer" else 1e-9 + 10.0 * tail
    for name, v, t_i in (("v1", lift.v1, pair.t1), ("v2", lift.v2, pair.t2)):
        rep.check(f"intertwine-{name}", f"V{name[-1]}* Pi = Pi T{name[-1]}*",
                  opnorm(adj(v) @ lift.pi - lift.pi @ adj(t_i)), int_tol)
    e1 = lift.space.embed_interior(1)
    e2 = lift.space.embed_interior(2)
    dim_total = lift.space.total_dim
    for name, v in (("v1", lift.v1), ("v2", lift.v2)):
        rep.check(f"isometry-{name}", f"{name}*{name} = I on degrees <= N-1",
                  opnorm((adj(v) @ v - eye(dim_total)) @ e1), tol)
    rep.check("q-commute", "V1 V2 = q V2 V1 on degrees <= N-2",
              opnorm((lift.v1 @ lift.v2 - q * lift.v2 @ lift.v1) @ e2), tol)

    if lift.kind == "schaffer":
        rep.check("pi-isometry", "Pi*Pi = I (inclusion)",
                  frob(adj(lift.pi) @ lift.pi - eye(pair.dim)), 1e-12)
    if lift.kind == "douglas":
        cp = lift.canonical
        qq = cp.q_op @ cp.q_op
        tp = np.linalg.matrix_power(t, n + 1)
        gram_target = eye(pair.dim) - tp @ adj(tp) + qq
        rep.check("pi-energy",
                  "Pi*Pi = I - T^{N+1}T*^{N+1} + Q^2 (exact finite-N identity)",
                  frob(adj(lift.pi) @ lift.pi - gram_target), 1e-11)
        mz = materialize(shift_symbol(q, lift.space.hardy.fiber_dim), n).matrix
        vd = scipy.linalg.block_diag(mz, cp.wd).astype(np.complex128)
        rep.check("product-structure", "V1 V2 = M_z (+) W_D on degrees <= N-2",
                  opnorm((lift.v1 @ lift.v2 - vd) @ e2), tol)
        rep.merge(_fundamental_intertwinings(lift, pair, tail))
    return rep


def _fundamental_intertwinings(lift: LiftRealization, pair: QPair,
                               tail: float) -> Report:
    """Intertwinings of the undressed Douglas embedding with the
    fundamental-operator multipliers (the G-form of the lift adjoints)."""
    rep = Report("douglas-gform", {})
    q = pair.q
    t = pair.product()
    n = lift.trunc
    star_tup = lift.tuple_
    g1, g2 = model.fundamental_from_tuple(star_tup)
    dstar = star_tup.defect_t
    obs = hardy.obs_op(t, dstar.basis, n).matrix
    cp = lift.canonical
    rq = adj(cp.basis.columns) @ cp.q_op
    pi_d = np.vstack([obs, rq])
    sym1, sym2 = model.model_symbols(q, g1, g2)
    w1 = scipy.linalg.block_diag(materialize(sym1, n).matrix, cp.w1)
    w2 = scipy.linalg.block_diag(materialize(sym2, n).matrix, cp.w2)
    tol = 1e-9 + 10.0 * tail
    rep.check("gform-intertwine-1", "(M_{G1*+zG2}R_q (+) W1)* Pi_D = Pi_D T1*",
              opnorm(adj(w1) @ pi_d - pi_d @ adj(pair.t1)), tol)
    rep.check("gform-intertwine-2", "(R_qbar M_{G2*+zG1} (+) W2)* Pi_D = Pi_D T2*",
              opnorm(adj(w2) @ pi_d - pi_d @ adj(pair.t2)), tol)
    return rep


def minimality_check(lift: LiftRealization, pair: QPair,
                     rank_tol: float = 1e-8) -> Report:
    """Product-Krylov reachability, cross-checked against a greedy orbit oracle.

    Rank of [Pi, V Pi, ..., V^{N+1} Pi] with V = V1 V2; both routes use the
    same explicit cutoff so direction weights ~rho^N below it are dropped
    consistently.  The report carries the achieved rank, the oracle rank and
    the full space dimension (the unreachable truncation slice is their gap).
    """
    v = lift.v1 @ lift.v2
    cols = [lift.pi]
    block = lift.pi
    for _ in range(lift.trunc + 1):
        block = v @ block
        cols.append(block)
    kry = np.hstack(cols)
    achieved = matcore.numerical_rank(kry, rank_tol=rank_tol)
    oracle = matcore.greedy_orbit_rank(v, lift.pi, rank_tol=rank_tol)
    rep = Report("minimality", {
        "achieved_rank": achieved,
        "oracle_rank": oracle,
        "space_dim": lift.space.total_dim,
        "rank_tol": rank_tol,
    })
    rep.require("rank-consistency",
                "SVD Krylov rank equals the greedy orbit oracle",
                achieved == oracle,
                note=f"achieved {achieved}, oracle {oracle}, "
                     f"space {lift.space.total_dim}")
    return rep


@dataclass(frozen=True)
class AndoFragments:
    """Defect data recovered from a lift in model form."""

    lam: np.ndarray        # Lambda in defect coordinates, F x dim(ran D_T)
    pul_dt: np.ndarray     # P U Lambda D_T : H -> F
    upl_dt: np.ndarray     # U*(I-P) Lambda D_T : H -> F


def extract_ando_from_lift(lift: LiftRealization, pair: QPair,
                           tol: float = 1e-10):
    """Recover (Lambda, PU Lambda D_T, U*(I-P) Lambda D_T) from a lift in
    inclusion model form, and verify their structural consistency.

    Returns (AndoFragments, Report).  The lift must be block lower triangular
    with shift-type Hardy diagonal in the product; the constant column C of
    V = V1 V2 then satisfies C*C = I - T*T and M_z*C = 0 and factors through
    an isometry Lambda.
    """
    if lift.space.head_dim != pair.dim or lift.space.tail_dim != 0:
        raise NotModelFormError("expected an inclusion-type lift layout")
    q = pair.q
    h_dim = pair.dim
    f = lift.space.hardy.fiber_dim
    n = lift.trunc
    hs = lift.space.hardy_start
    t = pair.product()

    for name, v in (("v1", lift.v1), ("v2", lift.v2)):
        upper = opnorm(v[:h_dim, hs:])
        if upper > tol:
            raise NotModelFormError(f"{name} has a head->Hardy block of norm {upper:.3e}")
    v = lift.v1 @ lift.v2
    mz = materialize(shift_symbol(q, f), n).matrix
    diag_res = opnorm((v[hs:, hs:] - mz) @ lift.space.hardy.embed(n - 1))
    if diag_res > tol:
        raise NotModelFormError(
            f"Hardy diagonal of V1 V2 is not the shift: residual {diag_res:.3e}")
    c_block = v[hs:, :h_dim]
    rep = Report("ando-extract", {"tol": tol})
    rep.check("mzstar-c", "M_z* C = 0 (C is a constant column)",
              opnorm(c_block[f:]), tol)
    c0 = c_block[:f]
    rep.check("c-defect", "C*C = I - T*T",
              frob(adj(c0) @ c0 - (eye(h_dim) - adj(t) @ t)), tol)

    d_t, b_t = matcore.defect(t)
    x = adj(b_t.columns) @ d_t
    lam_rec = c0 @ np.linalg.pinv(x)
    rep.check("lambda-isometry", "recovered Lambda is an isometry on ran D_T",
              frob(adj(lam_rec) @ lam_rec - eye(b_t.dim)), tol)
    rep.check("lambda-consistency", "Lambda (ran D_T coords) reproduces C",
              frob(lam_rec @ x - c0), tol)

    a1 = lift.v1[hs:hs + f, :h_dim]
    a2 = q * lift.v2[hs:hs + f, :h_dim]
    rep.check("frag-t1", "T1*T1 + (PUL)*(PUL) = I",
              frob(adj(pair.t1) @ pair.t1 + adj(a1) @ a1 - eye(h_dim)), tol)
    rep.check("frag-t2", "T2*T2 + (U*(I-P)L)*(U*(I-P)L) = I",
              frob(adj(pair.t2) @ pair.t2 + adj(a2) @ a2 - eye(h_dim)), tol)
    rest = c0 - a1 @ pair.t2
    rep.check("frag-third", "||U*(I-P)L h|| = ||(L - PUL T2) h|| for all h",
              frob(adj(a2) @ a2 - adj(rest) @ rest), tol)
    closed = rest @ pair.t1 + a1
    rep.check("frag-fourth", "||L h|| = ||((I-P)L T1 + PUL) h|| for all h",
              frob(adj(c0) @ c0 - adj(closed) @ closed), tol)
    return AndoFragments(lam_rec, a1, a2), rep


def _bidisk_ops(n: int, q: complex):
    """Shift and rotation matrices on the box-truncated two-variable space.

    Basis z1^a z2^b, 0 <= a, b <= n, index a*(n+1)+b; the rotation acts on
    the second variable, which is what makes (R_q M_{z1}, M_{z2}) q-commute.
    """
    m = n + 1
    dim = m * m
    mz1 = np.zeros((dim, dim), dtype=np.complex128)
    mz2 = np.zeros((dim, dim), dtype=np.complex128)
    rot = np.zeros((dim, dim), dtype=np.complex128)
    for a in range(m):
        for b in range(m):
            i = a * m + b
            if a + 1 < m:
                mz1[(a + 1) * m + b, i] = 1.0
            if b + 1 < m:
                mz2[a * m + b + 1, i] = 1.0
            rot[i, i] = q ** b
    return mz1, mz2, rot


def nonisolifts_fixture(n: int, q: complex = np.exp(1j)) -> Report:
    """Two minimal lifts of the zero pair on C that fail to be equivalent.

    Pair A = (R_q M_z, M_z) on truncated H^2(D); pair B = (R_q M_{z1}, M_{z2})
    on the box-truncated two-variable space, rotation on z2.  Both are
    q-commuting isometric lifts of (0, 0) and jointly minimal; the
    doubly-q-commuting discriminator ||V2 V1* - q V1* V2|| separates them.
    """
    if n < 2:
        raise GeneratorError("two-lifts fixture needs truncation >= 2")
    rep = Report("nonisolifts", {"trunc": n, "q": [float(np.real(q)), float(np.imag(q))]})

    hs = TruncHardy(1, n)
    one = np.eye(1, dtype=np.complex128)
    v1a = materialize(TwistedSymbol(q, 1, (0 * one, q * one)), n).matrix
    v2a = materialize(shift_symbol(q, 1), n).matrix
    pi_a = np.zeros((hs.total_dim, 1), dtype=np.complex128)
    pi_a[0, 0] = 1.0
    e1 = hs.embed(n - 1)
    e2 = hs.embed(n - 2)
    rep.check("a-q-commute", "pair A: V1 V2 = q V2 V1 on degrees <= N-2",
              opnorm((v1a @ v2a - q * v2a @ v1a) @ e2), 1e-12)
    rep.check("a-isometry", "pair A: V_i*V_i = I on degrees <= N-1",
              max(opnorm((adj(v1a) @ v1a - eye(hs.total_dim)) @ e1),
                  opnorm((adj(v2a) @ v2a - eye(hs.total_dim)) @ e1)), 1e-12)
    rep.check("a-lift", "pair A lifts (0,0): V_i* Pi = 0",
              max(opnorm(adj(v1a) @ pi_a), opnorm(adj(v2a) @ pi_a)), 1e-12)
    rank_a = matcore.greedy_orbit_rank([v1a, v2a], pi_a)
    rep.require("a-minimal", "pair A joint orbit spans the whole space",
                rank_a == hs.total_dim, note=f"rank {rank_a} of {hs.total_dim}")
    disc_a = opnorm((v2a @ adj(v1a) - q * adj(v1a) @ v2a) @ e1)
    rep.require("a-not-doubly", "pair A discriminator ||V2 V1* - q V1* V2|| > 0.5",
                disc_a > 0.5, note=f"discriminator {disc_a:.6f}")

    mz1, mz2, rot = _bidisk_ops(n, q)
    v1b = rot @ mz1
    v2b = mz2
    m = n + 1
    dim_b = m * m

    def box_embed(a_max, b_max):
        cols = [a * m + b for a in range(a_max + 1) for b in range(b_max + 1)]
        e = np.zeros((dim_b, len(cols)), dtype=np.complex128)
        for j, i in enumerate(cols):
            e[i, j] = 1.0
        return e

    e_int = box_embed(n - 1, n - 1)
    pi_b = np.zeros((dim_b, 1), dtype=np.complex128)
    pi_b[0, 0] = 1.0
    rep.check("b-q-commute", "pair B: V1 V2 = q V2 V1 on the interior box",
              opnorm((v1b @ v2b - q * v2b @ v1b) @ e_int), 1e-12)
    rep.check("b-isometry", "pair B: V_i*V_i = I on the interior box",
              max(opnorm((adj(v1b) @ v1b - eye(dim_b)) @ box_embed(n - 1, n)),
                  opnorm((adj(v2b) @ v2b - eye(dim_b)) @ box_embed(n, n - 1))), 1e-12)
    rep.check("b-lift", "pair B lifts (0,0): V_i* Pi = 0",
              max(opnorm(adj(v1b) @ pi_b), opnorm(adj(v2b) @ pi_b)), 1e-12)
    rank_b = matcore.greedy_orbit_rank([v1b, v2b], pi_b)
    rep.require("b-minimal", "pair B joint orbit spans the whole space",
                rank_b == dim_b, note=f"rank {rank_b} of {dim_b}")
    disc_b = opnorm((v2b @ adj(v1b) - q * adj(v1b) @ v2b) @ box_embed(n, n - 1))
    rep.check("b-doubly", "pair B discriminator vanishes (doubly q-commuting)",
              disc_b, 1e-12)
    rep.require("separation", "discriminators separated by a factor >= 1e10",
                disc_a >= 1e10 * max(disc_b, 1e-30),
                note=f"A {disc_a:.3e} vs B {disc_b:.3e}")
    return rep
