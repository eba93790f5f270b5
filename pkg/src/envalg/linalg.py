"""Dense complex linear-algebra kernel.

Conventions used throughout the package:

* Operators are dense complex numpy arrays.
* ``vec``/``unvec`` use column stacking, so vec(AXB) = (B^T kron A) vec(X).
* A bipartite operator on the system (dim N) tensor the environment (dim d)
  is stored with the system as the outer block index:

      row = i_sys * d + i_env.

  With this convention the (i, j) system block of a matrix M is the d x d
  environment operator ``M.reshape(N, d, N, d)[i, :, j, :]``.
* The Hilbert-Schmidt inner product <A, B> = Tr[A^dag B] is the geometry
  behind every span/orthonormality computation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalRankError


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds.

    rank_rel: relative cutoff (against the largest singular value) for
        rank / nullspace decisions.
    eq_abs: absolute threshold for matrix-equality and flag assertions.
    """

    rank_rel: float = 1e-10
    eq_abs: float = 1e-9

    def __post_init__(self):
        if not (0.0 < self.rank_rel < 1.0):
            raise ValueError(f"rank_rel out of range: {self.rank_rel}")
        if not (0.0 < self.eq_abs < 1.0):
            raise ValueError(f"eq_abs out of range: {self.eq_abs}")


DEFAULT_TOL = Tolerance()


def resolve_tol(tol: Tolerance | None) -> Tolerance:
    return DEFAULT_TOL if tol is None else tol


# ----------------------------------------------------------------------
# Elementary constructions
# ----------------------------------------------------------------------


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; (A kron B)[i*rB+k, j*cB+l] = A[i,j] B[k,l]."""
    return np.kron(a, b)


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return a.conj().T


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Inverse of :func:`vec`; square by default."""
    v = np.asarray(v).reshape(-1)
    if shape is None:
        n = int(round(np.sqrt(v.size)))
        shape = (n, n)
    return v.reshape(shape, order="F")


def matrix_unit(d: int, k: int, l: int) -> np.ndarray:
    """|e_k><e_l| on C^d."""
    e = np.zeros((d, d), dtype=complex)
    e[k, l] = 1.0
    return e


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def hermiticity_residual(a: np.ndarray) -> float:
    return frob(a - dagger(a))


def unitarity_residual(a: np.ndarray) -> float:
    return frob(dagger(a) @ a - np.eye(a.shape[0]))


# ----------------------------------------------------------------------
# Bipartite operators
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class BipartiteOperator:
    """A square operator on system tensor environment.

    The matrix has size (sys_dim * env_dim) with row index
    ``i_sys * env_dim + i_env``.  ``kind`` records whether the operator is
    expected to be unitary or hermitian; validation against that flag is
    done by :func:`bipartite_operator`.
    """

    sys_dim: int
    env_dim: int
    matrix: np.ndarray
    kind: str = "unitary"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.sys_dim * self.env_dim
        if self.sys_dim < 1 or self.env_dim < 1:
            raise ValueError("dimensions must be positive")
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} != ({n}, {n})")
        if not np.all(np.isfinite(m)):
            raise ValueError("matrix entries must be finite")
        if self.kind not in ("unitary", "hermitian"):
            raise ValueError(f"unknown kind {self.kind!r}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def total_dim(self) -> int:
        return self.sys_dim * self.env_dim

    def reshape4(self) -> np.ndarray:
        """View as a (N, d, N, d) tensor: [i_sys, i_env, j_sys, j_env]."""
        return self.matrix.reshape(
            self.sys_dim, self.env_dim, self.sys_dim, self.env_dim
        )

    def adjoint(self) -> "BipartiteOperator":
        return BipartiteOperator(self.sys_dim, self.env_dim, dagger(self.matrix), self.kind)

    def flag_residual(self) -> float:
        if self.kind == "unitary":
            return unitarity_residual(self.matrix)
        return hermiticity_residual(self.matrix)


def bipartite_operator(
    matrix: np.ndarray,
    sys_dim: int,
    env_dim: int,
    kind: str = "unitary",
    tol: Tolerance | None = None,
) -> BipartiteOperator:
    """Construct and validate a :class:`BipartiteOperator`.

    Raises ValueError when the unitarity/hermiticity residual exceeds
    ``tol.eq_abs``.
    """
    tol = resolve_tol(tol)
    op = BipartiteOperator(sys_dim, env_dim, matrix, kind)
    res = op.flag_residual()
    if res > tol.eq_abs:
        raise ValueError(f"{kind} flag violated: residual {res:.3e} > {tol.eq_abs:.3e}")
    return op


def partial_trace_env(op: BipartiteOperator) -> np.ndarray:
    """Trace out the environment: result[i,j] = sum_k M[(i,k),(j,k)]."""
    return np.einsum("ikjk->ij", op.reshape4())


def partial_trace_sys(op: BipartiteOperator) -> np.ndarray:
    """Trace out the system: result[k,l] = sum_i M[(i,k),(i,l)]."""
    return np.einsum("ikil->kl", op.reshape4())


def partial_trace_weighted(
    op: BipartiteOperator, weight: np.ndarray, over: str = "env"
) -> np.ndarray:
    """Partial trace against a weight operator on the traced factor.

    For ``over="env"`` the weight F is d x d and

        result[i,j] = sum_{k,l} F[l,k] M[(i,k),(j,l)],

    i.e. result = Tr_env[ M (I kron F) ].  With a rank-one weight
    F = |g><f| this realizes <phi, result psi> = <phi ox f, M (psi ox g)>.
    For ``over="sys"`` the weight is N x N and the roles of the factors are
    exchanged; with F = |e_j><e_i| the result is the (i, j) system block.
    """
    m4 = op.reshape4()
    w = np.asarray(weight, dtype=complex)
    if over == "env":
        if w.shape != (op.env_dim, op.env_dim):
            raise ValueError(f"weight shape {w.shape} != env dim {op.env_dim}")
        return np.einsum("lk,ikjl->ij", w, m4)
    if over == "sys":
        if w.shape != (op.sys_dim, op.sys_dim):
            raise ValueError(f"weight shape {w.shape} != sys dim {op.sys_dim}")
        return np.einsum("ji,ikjl->kl", w, m4)
    raise ValueError(f"unknown factor {over!r}")


def compress_env(op: BipartiteOperator, env_basis: np.ndarray, kind: str | None = None) -> BipartiteOperator:
    """Compress onto system tensor span(env_basis).

    ``env_basis`` holds orthonormal columns in C^d; the result acts on the
    compressed coordinates and has env_dim = number of columns.
    """
    b = np.asarray(env_basis, dtype=complex)
    m4 = op.reshape4()
    comp = np.einsum("ka,ikjl,lb->iajb", b.conj(), m4, b)
    k = b.shape[1]
    return BipartiteOperator(
        op.sys_dim, k, comp.reshape(op.sys_dim * k, op.sys_dim * k), kind or op.kind
    )


# ----------------------------------------------------------------------
# Factorizations, nullspaces, orthonormalization
# ----------------------------------------------------------------------


def eig_hermitian(a: np.ndarray, tol: Tolerance | None = None):
    """Eigendecomposition of a hermitian matrix.

    Returns (eigenvalues ascending, eigenvector columns).  Rejects inputs
    whose hermiticity residual exceeds ``tol.eq_abs`` (relative to norm).
    """
    tol = resolve_tol(tol)
    a = np.asarray(a, dtype=complex)
    res = hermiticity_residual(a)
    if res > tol.eq_abs * max(1.0, frob(a)):
        raise ValueError(f"matrix is not hermitian: residual {res:.3e}")
    return np.linalg.eigh(a)


def svd(a: np.ndarray):
    """Singular value decomposition A = U diag(s) Vh, s descending."""
    return np.linalg.svd(np.asarray(a, dtype=complex))


def nullspace(a: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical nullspace of A.

    Singular values below ``rank_rel * sigma_max`` count as zero; an all-zero
    matrix (sigma_max below the absolute floor eq_abs) has full nullspace.
    """
    tol = resolve_tol(tol)
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.shape[0] == 0:
        return np.eye(a.shape[1], dtype=complex)
    u, s, vh = np.linalg.svd(a)
    if s.size == 0 or s[0] <= tol.eq_abs:
        return np.eye(a.shape[1], dtype=complex)
    rank = int(np.sum(s > tol.rank_rel * s[0]))
    return vh[rank:].conj().T


def numerical_rank(a: np.ndarray, tol: Tolerance | None = None) -> int:
    tol = resolve_tol(tol)
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] <= tol.eq_abs:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def hs_orthonormalize(mats, tol: Tolerance | None = None) -> np.ndarray:
    """Hilbert-Schmidt orthonormal basis of the span of the given matrices.

    Returns an array of shape (rank, d, d).  Implemented through an SVD of
    the stacked vectorizations, so the output size equals the numerical rank
    of the family.
    """
    tol = resolve_tol(tol)
    mats = np.asarray(mats, dtype=complex)
    if mats.size == 0:
        d = mats.shape[-1] if mats.ndim == 3 else 0
        return np.zeros((0, d, d), dtype=complex)
    k, d = mats.shape[0], mats.shape[-1]
    rows = mats.reshape(k, d * d)
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] <= tol.eq_abs:
        return np.zeros((0, d, d), dtype=complex)
    rank = int(np.sum(s > tol.rank_rel * s[0]))
    return vh[:rank].reshape(rank, d, d)


def projection_range_basis(p: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Deterministic orthonormal basis (columns) of the range of a projection.

    Built by projecting the canonical basis vectors and running a pivoted
    Gram-Schmidt pass, so degenerate ranges get a reproducible basis.
    """
    tol = resolve_tol(tol)
    p = np.asarray(p, dtype=complex)
    d = p.shape[0]
    r = int(round(float(np.trace(p).real)))
    if abs(np.trace(p).real - r) > 1e-6:
        raise NumericalRankError(f"projection trace {np.trace(p).real} not integral")
    if r == 0:
        return np.zeros((d, 0), dtype=complex)
    cand = p.copy()
    cols = []
    for _ in range(r):
        norms = np.linalg.norm(cand, axis=0)
        k = int(np.argmax(norms))
        if norms[k] < 1e-8:
            raise NumericalRankError("projection range collapsed below tolerance")
        v = cand[:, k] / norms[k]
        cols.append(v)
        cand -= np.outer(v, v.conj() @ cand)
    basis = np.stack(cols, axis=1)
    if frob(p @ basis - basis) > 1e2 * tol.eq_abs:
        raise NumericalRankError("range basis does not reproduce the projection")
    return basis


def fix_phase(v: np.ndarray, cutoff: float = 1e-6) -> np.ndarray:
    """Rotate v so its first non-negligible coordinate is real positive."""
    v = np.asarray(v, dtype=complex)
    peak = np.max(np.abs(v))
    if peak == 0.0:
        return v
    idx = int(np.argmax(np.abs(v) > cutoff * peak))
    return v * (v[idx].conjugate() / abs(v[idx]))


def unitary_from_hermitian(g: np.ndarray) -> np.ndarray:
    """exp(i G) for hermitian G via eigendecomposition."""
    w, v = np.linalg.eigh(np.asarray(g, dtype=complex))
    return (v * np.exp(1j * w)) @ dagger(v)
