"""Dense complex-matrix primitives used by every other module.

Operators are plain complex128 numpy arrays.  Subspaces are wrapped in
:class:`SubspaceBasis`, which checks orthonormality once at construction.
All routines are pure and deterministic: random input never enters here, and
the one genuinely non-canonical construction (completing a partial isometry
to a unitary) is pinned to a fixed pivoted-QR convention so results are
reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    MaxIterationsExceededError,
    NegativeEigenvalueError,
    NotContractionError,
    NotHermitianError,
    NotIsometricOnSourceError,
)

STRUCT_TOL = 1e-12
EPS = float(np.finfo(np.float64).eps)


def adj(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a)) if a.size else 0.0


def opnorm(a: np.ndarray) -> float:
    """Spectral norm; 0 for empty matrices."""
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def as_cmatrix(data) -> np.ndarray:
    """Coerce to a finite 2-d complex128 array."""
    a = np.asarray(data, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionMismatchError(f"expected a 2-d array, got ndim={a.ndim}")
    if a.size and not (np.all(np.isfinite(a.real)) and np.all(np.isfinite(a.imag))):
        raise ValueError("matrix entries must be finite")
    return a


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + adj(a)) / 2.0


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal columns spanning a subspace of C^ambient_dim."""

    columns: np.ndarray

    def __post_init__(self):
        cols = as_cmatrix(self.columns)
        object.__setattr__(self, "columns", cols)
        k = cols.shape[1]
        if k:
            gram = adj(cols) @ cols
            if frob(gram - eye(k)) > 1e-12 * max(1.0, np.sqrt(k)):
                raise NotIsometricOnSourceError(
                    f"basis columns not orthonormal: residual {frob(gram - eye(k)):.3e}")

    @property
    def ambient_dim(self) -> int:
        return self.columns.shape[0]

    @property
    def dim(self) -> int:
        return self.columns.shape[1]

    def projector(self) -> np.ndarray:
        return self.columns @ adj(self.columns)


def matrix_to_json(a: np.ndarray) -> dict:
    """Serialize as {"rows", "cols", "data": [[re, im], ...]} row-major."""
    a = as_cmatrix(a)
    data = [[float(x.real), float(x.imag)] for x in a.ravel(order="C")]
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "data": data}


def matrix_from_json(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    data = obj["data"]
    if len(data) != rows * cols:
        raise DimensionMismatchError(
            f"matrix JSON: {rows}x{cols} needs {rows * cols} entries, got {len(data)}")
    flat = np.array([complex(re, im) for re, im in data], dtype=np.complex128)
    return flat.reshape(rows, cols)


def _checked_eigh(h: np.ndarray, clamp_tol: float | None):
    """Eigendecomposition of a Hermitian matrix with PSD clamping.

    Eigenvalues in [-clamp_tol, 0) are clamped to 0; anything below -clamp_tol
    raises.  Returns (clamped eigenvalues ascending, eigenvectors).
    """
    h = as_cmatrix(h)
    scale = frob(h)
    if frob(h - adj(h)) > 1e-12 * max(1.0, scale):
        raise NotHermitianError(
            f"matrix not Hermitian: asymmetry {frob(h - adj(h)):.3e} vs norm {scale:.3e}")
    if clamp_tol is None:
        clamp_tol = 1e-10 * max(1.0, scale)
    if h.shape[0] == 0:
        return np.zeros(0), h.copy()
    w, v = np.linalg.eigh(hermitize(h))
    if w[0] < -clamp_tol:
        raise NegativeEigenvalueError(
            f"eigenvalue {w[0]:.3e} below -clamp_tol (-{clamp_tol:.3e})")
    w = np.where(w < 0.0, 0.0, w)
    return w, v


def psd_sqrt(h: np.ndarray, clamp_tol: float | None = None) -> np.ndarray:
    """Hermitian PSD square root S with S^2 = H (after clamping roundoff).

    Eigenvalues in [-clamp_tol, 0) are treated as roundoff and set to 0;
    default clamp_tol is 1e-10 * max(1, ||H||_F).
    """
    w, v = _checked_eigh(h, clamp_tol)
    s = (v * np.sqrt(w)) @ adj(v)
    return hermitize(s)


def check_contraction(t: np.ndarray, slack: float = 1e-10) -> np.ndarray:
    t = as_cmatrix(t)
    if t.shape[0] != t.shape[1]:
        raise DimensionMismatchError("contraction must be square")
    nrm = opnorm(t)
    if nrm > 1.0 + slack:
        raise NotContractionError(f"operator norm {nrm:.12f} exceeds 1 + {slack:.1e}")
    return t


def defect(t: np.ndarray, rank_tol: float | None = None):
    """Defect operator D = (I - T*T)^{1/2} and an orthonormal basis of ran D.

    The basis columns are eigenvectors of D with eigenvalue > rank_tol,
    ordered by decreasing eigenvalue.  The default cutoff is the rank
    convention dim * eps * ||D|| raised to the noise floor of the square
    root: roundoff accumulated in I - T*T surfaces as sqrt(eps)-sized
    eigenvalues of D near an isometry, so anything below
    sqrt(256 * dim * eps * max(1, ||I - T*T||)) is indistinguishable from 0.
    The factor 256 keeps the cutoff safely above the measured matmul
    accumulation noise, which otherwise straddles it and lets the product
    defect keep a junk direction the factor defects drop.
    """
    t = check_contraction(t)
    n = t.shape[0]
    h = eye(n) - adj(t) @ t
    w, v = _checked_eigh(h, None)
    sqw = np.sqrt(w)
    d = hermitize((v * sqw) @ adj(v))
    if rank_tol is None:
        rank_tol = max(n * EPS * (sqw[-1] if n else 0.0),
                       np.sqrt(256.0 * n * EPS * max(1.0, frob(h))))
    order = np.argsort(sqw)[::-1]
    keep = [i for i in order if sqw[i] > rank_tol]
    basis = SubspaceBasis(v[:, keep] if keep else np.zeros((n, 0), dtype=np.complex128))
    return d, basis


def complement_basis(projector: np.ndarray, dim: int) -> np.ndarray:
    """Deterministic orthonormal basis of ran(I - projector).

    Pivoted QR of (I - projector) applied to the standard basis; the first
    `dim` Q-columns (pivot order) span the complement.
    """
    n = projector.shape[0]
    if dim == 0:
        return np.zeros((n, 0), dtype=np.complex128)
    qmat, _, _ = scipy.linalg.qr(eye(n) - projector, pivoting=True)
    return np.ascontiguousarray(qmat[:, :dim])


def complete_to_unitary(source: SubspaceBasis, target: SubspaceBasis,
                        partial: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Extend a partial isometry (source subspace -> target subspace) to a unitary.

    `partial` acts on the ambient space and must map the source columns
    isometrically into the span of the target.  The complements are matched in
    the deterministic pivoted-QR order from :func:`complement_basis`.
    """
    if source.ambient_dim != target.ambient_dim:
        raise DimensionMismatchError("source and target live in different ambient spaces")
    if source.dim != target.dim:
        raise DimensionMismatchError(
            f"source dim {source.dim} != target dim {target.dim}")
    n, k = source.ambient_dim, source.dim
    ps = as_cmatrix(partial) @ source.columns
    if k:
        iso_res = frob(adj(ps) @ ps - eye(k))
        range_res = frob(ps - target.projector() @ ps)
        if iso_res > tol or range_res > tol:
            raise NotIsometricOnSourceError(
                f"partial map not isometric onto target: isometry residual "
                f"{iso_res:.3e}, range residual {range_res:.3e}")
    u = ps @ adj(source.columns)
    m = n - k
    if m:
        comp_s = complement_basis(source.projector(), m)
        comp_t = complement_basis(target.projector(), m)
        u = u + comp_t @ adj(comp_s)
    res = frob(adj(u) @ u - eye(n))
    if res > 1e-12 * max(1.0, n):
        raise NotIsometricOnSourceError(f"completion failed to be unitary: {res:.3e}")
    return u


def power_limit(t: np.ndarray, tol: float = 1e-12, max_doublings: int = 64) -> np.ndarray:
    """Limit of T^n T*^n, computed on the subsequence n = 2^k.

    The full sequence is monotone decreasing PSD, so sampling powers of two
    converges to the same limit; repeated squaring keeps everything bounded
    since ||T|| <= 1.
    """
    t = check_contraction(t)
    b = t
    a = b @ adj(b)
    gap = np.inf
    for _ in range(max_doublings):
        b = b @ b
        a_next = b @ adj(b)
        gap = frob(a_next - a)
        a = a_next
        if gap < tol:
            return hermitize(a)
    raise MaxIterationsExceededError(
        f"power limit not converged after {max_doublings} doublings; last gap {gap:.3e}")


def orth_columns(a: np.ndarray, rank_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (SVD left vectors) of the column space of a."""
    a = as_cmatrix(a)
    if a.size == 0 or not a.shape[1]:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if rank_tol is None:
        rank_tol = max(a.shape) * EPS * (s[0] if s.size else 0.0)
    r = int(np.sum(s > rank_tol))
    return np.ascontiguousarray(u[:, :r])


def numerical_rank(a: np.ndarray, rank_tol: float | None = None) -> int:
    a = as_cmatrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if rank_tol is None:
        rank_tol = max(a.shape) * EPS * (s[0] if s.size else 0.0)
    else:
        rank_tol = rank_tol * (s[0] if s.size else 0.0)
    return int(np.sum(s > rank_tol))


def greedy_orbit_rank(ops, seed_columns: np.ndarray, rank_tol: float = 1e-8,
                      max_rounds: int | None = None) -> int:
    """Dimension of span{op_{i1}...op_{ik} seed} by greedy re-orthogonalization.

    Independent route to the Krylov rank: grows an orthonormal basis one
    application at a time, discarding directions below rank_tol.  `ops` is a
    single matrix or an iterable of matrices (joint orbit).
    """
    if isinstance(ops, np.ndarray):
        ops = [ops]
    ops = [as_cmatrix(o) for o in ops]
    n = seed_columns.shape[0]
    basis = orth_columns(seed_columns, rank_tol=rank_tol)
    if max_rounds is None:
        max_rounds = n + 1
    frontier = basis
    for _ in range(max_rounds):
        if basis.shape[1] >= n or frontier.shape[1] == 0:
            break
        images = np.hstack([op @ frontier for op in ops]) if ops else frontier
        resid = images - basis @ (adj(basis) @ images)
        # second projection pass guards against loss of orthogonality
        resid = resid - basis @ (adj(basis) @ resid)
        new = orth_columns(resid, rank_tol=rank_tol)
        if new.shape[1] == 0:
            break
        basis = np.hstack([basis, new])
        frontier = new
    return basis.shape[1]
