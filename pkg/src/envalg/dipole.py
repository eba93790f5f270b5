"""Spoke-coupling ("dipole") Hamiltonians and their classification.

The model couples a system Hamiltonian to a distinguished environment level
e_0 through d coupling operators:

    H = H_S kron I + sum_{i=1..d} ( V_i kron |e_i><e_0| + V_i^dag kron |e_0><e_i| ),

on system tensor C^{d+1}, with no free environment Hamiltonian.  A unitary
change of basis on span{e_1..e_d} can always cancel all but
m = rank{vec(V_i)} of the couplings; the environment algebra of H is then
either commutative (single effectively self-adjoint coupling direction) or
splits as all operators on a small subspace plus scalars on the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import environment_algebra
from .errors import ConstructionError
from .linalg import (
    BipartiteOperator,
    Tolerance,
    dagger,
    fix_phase,
    frob,
    hermiticity_residual,
    hs_orthonormalize,
    kron,
    resolve_tol,
)
from .rand import as_rng
from .star_algebra import StarAlgebra, is_commutative, span_equal


@dataclass(frozen=True)
class DipoleModel:
    """System Hamiltonian plus environment couplings V_1..V_d."""

    h_sys: np.ndarray  # N x N hermitian
    couplings: np.ndarray  # (d, N, N)

    def __post_init__(self):
        h = np.asarray(self.h_sys, dtype=complex)
        v = np.asarray(self.couplings, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise ValueError("h_sys must be square")
        if hermiticity_residual(h) > 1e-9 * max(1.0, frob(h)):
            raise ValueError("h_sys must be hermitian")
        if v.ndim != 3 or v.shape[0] < 1 or v.shape[1:] != h.shape:
            raise ValueError("couplings must be a non-empty list of N x N matrices")
        h.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "h_sys", h)
        object.__setattr__(self, "couplings", v)

    @property
    def sys_dim(self) -> int:
        return self.h_sys.shape[0]

    @property
    def coupling_count(self) -> int:
        return self.couplings.shape[0]

    @property
    def env_dim(self) -> int:
        return self.coupling_count + 1

    def assemble(self, tol: Tolerance | None = None) -> BipartiteOperator:
        """Full hermitian operator on system tensor C^{d+1}."""
        n, d1 = self.sys_dim, self.env_dim
        h = kron(self.h_sys, np.eye(d1, dtype=complex))
        for i, v in enumerate(self.couplings, start=1):
            lower = np.zeros((d1, d1), dtype=complex)
            lower[i, 0] = 1.0
            h = h + kron(v, lower) + kron(dagger(v), lower.T.conj())
        return BipartiteOperator(n, d1, h, "hermitian")


def coupling_matrix(couplings: np.ndarray) -> np.ndarray:
    """N^2 x d matrix whose k-th column is vec(V_k)."""
    v = np.asarray(couplings, dtype=complex)
    return v.reshape(v.shape[0], -1).T


def transform_couplings(w: np.ndarray, couplings: np.ndarray) -> np.ndarray:
    """Apply W^dag entrywise-over-operators: out_k = sum_l conj(W[l,k]) V_l."""
    return np.einsum("lk,lij->kij", np.asarray(w).conj(), np.asarray(couplings))


def dipole_reduce(couplings, tol: Tolerance | None = None) -> tuple[np.ndarray, int]:
    """Cancel as many coupling components as a unitary basis change allows.

    Returns (W, m) where m is the rank of the stacked-coupling matrix and
    W is the d x d unitary for which transform_couplings(W, V) has exactly
    its first m components nonzero and linearly independent.
    """
    tol = resolve_tol(tol)
    a = coupling_matrix(couplings)
    d = a.shape[1]
    u, s, vh = np.linalg.svd(a)
    if s.size == 0 or s[0] <= tol.eq_abs:
        return np.eye(d, dtype=complex), 0
    m = int(np.sum(s > tol.rank_rel * s[0]))
    # a @ q has only its first m columns nonzero for q = vh^H; the action
    # routes through conj(W), hence W = conj(q).  Column phases are fixed
    # (first significant entry real positive) for deterministic output.
    w = vh.T
    w = np.stack([fix_phase(w[:, k]) for k in range(d)], axis=1)
    return w, m


@dataclass(frozen=True)
class ClassificationResult:
    """Outcome of the coupling classification.

    case "commutative": a single self-adjoint-up-to-phase coupling
    direction; payload (theta, amplitudes) with V_i = a_i V', and the
    environment algebra commutative.
    case "block-split": the environment splits into K_1 (level e_0 plus the
    coupling directions) carrying all operators, and K_2 carrying scalars.
    """

    case: str
    algebra: StarAlgebra
    theta: float | None = None
    amplitudes: np.ndarray | None = None
    k1_basis: np.ndarray | None = None  # (d+1) x (m+1)
    k2_basis: np.ndarray | None = None  # (d+1) x (d-m)
    reduced_rank: int = 0
    normal_form_residual: float | None = None
    algebra_residual: float | None = None


def _case1_normal_form(model: DipoleModel, theta: float, amps: np.ndarray,
                       reduced: np.ndarray) -> float:
    """Residual of H against H_S kron I + (e^{i theta/2} V') kron M with M the
    hermitian spoke matrix built from (theta, a_i)."""
    d1 = model.env_dim
    m_env = np.zeros((d1, d1), dtype=complex)
    for i, a in enumerate(amps, start=1):
        m_env[i, 0] = np.exp(-1j * theta / 2.0) * a
        m_env[0, i] = np.exp(1j * theta / 2.0) * np.conj(a)
    tilde_v = np.exp(1j * theta / 2.0) * reduced
    h = kron(model.h_sys, np.eye(d1)) + kron(tilde_v, m_env)
    return frob(h - model.assemble().matrix)


def dipole_classify(
    model: DipoleModel, tol: Tolerance | None = None, rng=0
) -> ClassificationResult:
    """Classify the environment algebra of a spoke-coupling Hamiltonian.

    After reduction to m independent couplings: if m <= 1 and the remaining
    coupling V' satisfies V'^dag = a V' with |a| = 1, the algebra is
    commutative and H takes the single-direction normal form with
    theta = arg(a); otherwise the environment splits orthogonally with the
    algebra equal to everything on K_1 plus scalars on K_2.  The claimed
    algebra is verified against the computed one in both cases.
    """
    tol = resolve_tol(tol)
    rng = as_rng(rng)
    d = model.coupling_count
    w, m = dipole_reduce(model.couplings, tol)
    reduced = transform_couplings(w, model.couplings)
    h_op = model.assemble(tol)
    alg = environment_algebra(h_op, tol)

    if m <= 1:
        v1 = reduced[0] if m == 1 else np.zeros_like(model.h_sys)
        if m == 0:
            a = 1.0 + 0.0j
            collinear = True
        else:
            a = np.vdot(v1, dagger(v1)) / (frob(v1) ** 2)
            collinear = (
                frob(dagger(v1) - a * v1) <= tol.eq_abs * max(1.0, frob(v1))
                and abs(abs(a) - 1.0) <= 1e2 * tol.eq_abs
            )
        if collinear:
            theta = float(np.angle(a))
            amps = w[:, 0] if m == 1 else np.zeros(d, dtype=complex)
            nf_res = _case1_normal_form(model, theta, amps, v1)
            if nf_res > 1e3 * tol.eq_abs * max(1.0, frob(h_op.matrix)):
                raise ConstructionError(f"single-direction normal form failed: {nf_res:.3e}")
            if not is_commutative(alg, tol):
                raise ConstructionError("commutative case but algebra is not commutative")
            return ClassificationResult(
                "commutative",
                alg,
                theta=theta,
                amplitudes=np.asarray(amps),
                reduced_rank=m,
                normal_form_residual=nf_res,
            )

    # block-split case: K_1 = span{e_0} + coupling directions, K_2 = rest
    d1 = model.env_dim
    k1 = np.zeros((d1, m + 1), dtype=complex)
    k1[0, 0] = 1.0
    k1[1:, 1 : m + 1] = w[:, :m]
    k2 = np.zeros((d1, d - m), dtype=complex)
    k2[1:, :] = w[:, m:]

    expected = [
        np.outer(k1[:, i], k1[:, j].conj()) for i in range(m + 1) for j in range(m + 1)
    ]
    if d - m > 0:
        expected.append(k2 @ dagger(k2))
    expected_alg = StarAlgebra(d1, hs_orthonormalize(np.asarray(expected), tol), True)
    ok, res = span_equal(alg, expected_alg)
    if not ok:
        raise ConstructionError(
            f"block-split algebra mismatch: dims {alg.dim}/{expected_alg.dim}, "
            f"residual {res:.3e}"
        )
    return ClassificationResult(
        "block-split",
        alg,
        k1_basis=k1,
        k2_basis=k2,
        reduced_rank=m,
        algebra_residual=res,
    )
