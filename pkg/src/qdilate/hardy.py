"""Twisted-symbol calculus on vector-valued Hardy space, finite sections.

An analytic operator here is M_phi R_{q^m}: multiply by the matrix polynomial
phi(z) = sum_k z^k C_k after rotating the argument, (R_q f)(z) = f(qz).  The
symbol algebra is exact: composition is integer-indexed coefficient
arithmetic, so identities proved at symbol level hold to machine precision
after materialization.

Truncation contract: materializing at degree N drops coefficients beyond N,
so an operator identity whose sides have maximal z-degree d is asserted only
after restricting inputs to degrees <= N - d (full outputs are then exact).
Adjoints lower degree and need no restriction, but products involving adjoints
of *different* symbols still inherit the forward budget of each factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matcore
from .errors import (
    DimensionMismatchError,
    FiberMismatchError,
    NotQCommutantError,
    TailTooLargeError,
)
from .matcore import adj, as_cmatrix, eye, frob, opnorm

DEFAULT_TRUNC = 24


@dataclass(frozen=True)
class TruncHardy:
    """Degree-truncated Hardy space: degrees 0..max_degree, degree-major layout."""

    fiber_dim: int
    max_degree: int

    def __post_init__(self):
        if self.max_degree < 0 or self.fiber_dim < 0:
            raise DimensionMismatchError("TruncHardy needs fiber_dim, max_degree >= 0")

    @property
    def total_dim(self) -> int:
        return (self.max_degree + 1) * self.fiber_dim

    def embed(self, k: int) -> np.ndarray:
        """Embedding of the degrees <= k slice, total_dim x (k+1)*fiber_dim."""
        k = min(k, self.max_degree)
        if k < 0:
            return np.zeros((self.total_dim, 0), dtype=np.complex128)
        e = np.zeros((self.total_dim, (k + 1) * self.fiber_dim), dtype=np.complex128)
        e[: (k + 1) * self.fiber_dim] = eye((k + 1) * self.fiber_dim)
        return e

    def block(self, mat: np.ndarray, i: int, j: int, cod: "TruncHardy | None" = None):
        """Degree-(i, j) coefficient block of a matrix on this space."""
        fr = (cod or self).fiber_dim
        fc = self.fiber_dim
        return mat[i * fr:(i + 1) * fr, j * fc:(j + 1) * fc]


@dataclass(frozen=True)
class TwistedSymbol:
    """Operator M_phi R_{q^twist} with phi(z) = sum_k z^k coeffs[k]."""

    q: complex
    twist: int
    coeffs: tuple

    def __post_init__(self):
        coeffs = tuple(as_cmatrix(c) for c in self.coeffs)
        if not coeffs:
            raise DimensionMismatchError("symbol needs at least one coefficient")
        shape = coeffs[0].shape
        if any(c.shape != shape for c in coeffs):
            raise FiberMismatchError("all symbol coefficients must share one shape")
        if abs(abs(self.q) - 1.0) > 1e-12:
            raise FiberMismatchError(f"twist base q must be unimodular, |q|={abs(self.q)}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def fiber_in(self) -> int:
        return self.coeffs[0].shape[1]

    @property
    def fiber_out(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def value(self, z: complex) -> np.ndarray:
        """phi(z); note the operator sends f to phi(z) f(q^twist z)."""
        acc = np.zeros_like(self.coeffs[0])
        for k in range(self.degree, -1, -1):
            acc = z * acc + self.coeffs[k]
        return acc

    def scaled(self, a: complex) -> "TwistedSymbol":
        return TwistedSymbol(self.q, self.twist, tuple(a * c for c in self.coeffs))


def identity_symbol(q: complex, fiber: int) -> TwistedSymbol:
    return TwistedSymbol(q, 0, (eye(fiber),))


def shift_symbol(q: complex, fiber: int) -> TwistedSymbol:
    """M_z as a symbol."""
    return TwistedSymbol(q, 0, (np.zeros((fiber, fiber), dtype=np.complex128),
                                eye(fiber)))


def rotation_symbol(q: complex, fiber: int, m: int = 1) -> TwistedSymbol:
    """R_{q^m} as a symbol."""
    return TwistedSymbol(q, m, (eye(fiber),))


def symbol_compose(s1: TwistedSymbol, s2: TwistedSymbol) -> TwistedSymbol:
    """Product symbol of s1 applied after s2.

    Pushing R_{q^m} across a coefficient rotates its argument:
    (M_a R_{q^m})(M_b R_{q^l}) = M_{a(z) b(q^m z)} R_{q^{m+l}}, so the product
    coefficient at degree j is sum_{k+r=j} a_k q^{m r} b_r.
    """
    if abs(s1.q - s2.q) > 1e-12:
        raise FiberMismatchError("symbols built over different twist bases")
    if s1.fiber_in != s2.fiber_out:
        raise FiberMismatchError(
            f"fiber mismatch: s1 takes {s1.fiber_in}, s2 gives {s2.fiber_out}")
    d1, d2 = s1.degree, s2.degree
    out = [np.zeros((s1.fiber_out, s2.fiber_in), dtype=np.complex128)
           for _ in range(d1 + d2 + 1)]
    qm = s1.q ** s1.twist
    for k, a in enumerate(s1.coeffs):
        for r, b in enumerate(s2.coeffs):
            out[k + r] += a @ ((qm ** r) * b)
    return TwistedSymbol(s1.q, s1.twist + s2.twist, tuple(out))


def symbol_is_inner(s: TwistedSymbol, tol: float = 1e-12):
    """Whether M_phi R is isometric: sum_k C_k* C_{k+j} = delta_{j0} I.

    The rotation is unitary, so only the coefficient Toeplitz test matters.
    Returns (bool, worst residual).
    """
    worst = 0.0
    for j in range(s.degree + 1):
        acc = np.zeros((s.fiber_in, s.fiber_in), dtype=np.complex128)
        for k in range(s.degree + 1 - j):
            acc += adj(s.coeffs[k]) @ s.coeffs[k + j]
        target = eye(s.fiber_in) if j == 0 else 0.0
        worst = max(worst, frob(acc - target))
    return worst <= tol, worst


@dataclass(frozen=True)
class TruncOperator:
    """A materialized operator together with its truncation metadata."""

    matrix: np.ndarray
    domain: object    # TruncHardy or plain dimension
    codomain: object
    degree_shift: int

    def restricted(self, d: int | None = None) -> np.ndarray:
        """Matrix with inputs restricted to degrees <= N - d (d defaults to
        the operator's own degree)."""
        if not isinstance(self.domain, TruncHardy):
            return self.matrix
        if d is None:
            d = self.degree_shift
        return self.matrix @ self.domain.embed(self.domain.max_degree - d)


def materialize(s: TwistedSymbol, n: int) -> TruncOperator:
    """Matrix of M_phi R_{q^twist} on TruncHardy(fiber, n).

    Monomial action: z^j (x) xi  |->  sum_k q^{twist j} z^{j+k} (x) C_k xi,
    coefficients beyond degree n dropped.
    """
    if n < s.degree:
        raise DimensionMismatchError(f"truncation {n} below symbol degree {s.degree}")
    dom = TruncHardy(s.fiber_in, n)
    cod = TruncHardy(s.fiber_out, n)
    mat = np.zeros((cod.total_dim, dom.total_dim), dtype=np.complex128)
    fi, fo = s.fiber_in, s.fiber_out
    qt = s.q ** s.twist
    for j in range(n + 1):
        phase = qt ** j
        for k, c in enumerate(s.coeffs):
            if j + k > n:
                break
            mat[(j + k) * fo:(j + k + 1) * fo, j * fi:(j + 1) * fi] += phase * c
    return TruncOperator(mat, dom, cod, s.degree)


def ev0(n: int, fiber_dim: int) -> TruncOperator:
    """Evaluation at zero, TruncHardy -> fiber; its adjoint embeds constants."""
    space = TruncHardy(fiber_dim, n)
    mat = np.zeros((fiber_dim, space.total_dim), dtype=np.complex128)
    mat[:, :fiber_dim] = eye(fiber_dim)
    return TruncOperator(mat, space, fiber_dim, 0)


def obs_op(t: np.ndarray, defect_basis, n: int) -> TruncOperator:
    """Observability column H -> TruncHardy(D_{T*}): degree-k block
    D_{T*} T*^k in the supplied defect basis of ran D_{T*}."""
    t = matcore.check_contraction(t)
    dim = t.shape[0]
    dstar = psd_defect_star(t)
    coords = adj(defect_basis.columns) @ dstar
    k = coords.shape[0]
    space = TruncHardy(k, n)
    mat = np.zeros((space.total_dim, dim), dtype=np.complex128)
    block = coords
    tstar = adj(t)
    for deg in range(n + 1):
        mat[deg * k:(deg + 1) * k] = block
        block = block @ tstar
    return TruncOperator(mat, dim, space, 0)


def psd_defect_star(t: np.ndarray) -> np.ndarray:
    """D_{T*} = (I - T T*)^{1/2}."""
    t = as_cmatrix(t)
    return matcore.psd_sqrt(eye(t.shape[0]) - t @ adj(t))


def obs_tail_identity(t: np.ndarray, n: int, h: np.ndarray):
    """Exact finite-section energy identity of the observability column.

    Returns (lhs, rhs) of
    sum_{k<=n} ||D_{T*} T*^k h||^2 = ||h||^2 - ||T*^{n+1} h||^2,
    used as the truncation-error oracle everywhere tails matter.
    """
    t = matcore.check_contraction(t)
    h = np.asarray(h, dtype=np.complex128).reshape(-1)
    dstar = psd_defect_star(t)
    tstar = adj(t)
    lhs = 0.0
    vec = h
    for _ in range(n + 1):
        lhs += float(np.linalg.norm(dstar @ vec) ** 2)
        vec = tstar @ vec
    rhs = float(np.linalg.norm(h) ** 2 - np.linalg.norm(vec) ** 2)
    return lhs, rhs


def tail_norm(t: np.ndarray, n: int) -> float:
    """||T*^{n+1}||, the exact truncation-error scale at degree n."""
    return opnorm(np.linalg.matrix_power(adj(t), n + 1))


def defect_tail_norm(t: np.ndarray, n: int) -> float:
    """||D_{T*} T*^{n+1}||: the truncation error of the observability column.

    Sharper than tail_norm when T has a unitary part, on which the defect
    vanishes; this is the quantity that actually bounds the missing
    degree-(n+1) coefficient.
    """
    return opnorm(psd_defect_star(t) @ np.linalg.matrix_power(adj(t), n + 1))


def choose_trunc(t: np.ndarray, tail_tol: float = 1e-10, max_degree: int = 512) -> int:
    """Smallest n with ||T*^{n+1}|| < tail_tol."""
    tstar = adj(as_cmatrix(t))
    power = tstar
    for n in range(max_degree + 1):
        if opnorm(power) < tail_tol:
            return n
        power = power @ tstar
    raise TailTooLargeError(
        f"no truncation below {max_degree} reaches tail {tail_tol:.1e}")


def extract_symbol(a: TruncOperator, q: complex, tol: float = 1e-10):
    """Read off phi from an operator in the q-commutant of the shift.

    Precondition (checked on degrees <= N-1): A M_z = q M_z A.  The Taylor
    coefficients are A's action on the degree-0 block; returns the symbol and
    the restricted reconstruction residual.
    """
    if not isinstance(a.domain, TruncHardy) or a.domain != a.codomain:
        raise DimensionMismatchError("extract_symbol needs an endomorphism of TruncHardy")
    space = a.domain
    n, f = space.max_degree, space.fiber_dim
    mz = materialize(shift_symbol(q, f), n).matrix
    pre = opnorm((a.matrix @ mz - q * (mz @ a.matrix)) @ space.embed(n - 1))
    if pre > tol * max(1.0, opnorm(a.matrix)):
        raise NotQCommutantError(
            f"||A Mz - q Mz A|| = {pre:.3e} on degrees <= {n - 1}")
    scale = max(1.0, opnorm(a.matrix))
    coeffs = [np.array(space.block(a.matrix, k, 0)) for k in range(n + 1)]
    deg = 0
    for k in range(n, 0, -1):
        if frob(coeffs[k]) > tol * scale:
            deg = k
            break
    sym = TwistedSymbol(q, 1, tuple(coeffs[:deg + 1]))
    resid = opnorm((a.matrix - materialize(sym, n).matrix) @ space.embed(n - deg))
    return sym, resid


def symbol_to_json(s: TwistedSymbol) -> dict:
    return {
        "q": [float(s.q.real), float(s.q.imag)],
        "twist": s.twist,
        "coeffs": [matcore.matrix_to_json(c) for c in s.coeffs],
    }


def symbol_from_json(obj: dict) -> TwistedSymbol:
    q = complex(obj["q"][0], obj["q"][1])
    coeffs = tuple(matcore.matrix_from_json(c) for c in obj["coeffs"])
    return TwistedSymbol(q, int(obj["twist"]), coeffs)
