"""Environment blocks, the environment algebra, the classical/quantum
decomposition of the environment, and the commutative normal form.

An operator M on system tensor environment decomposes as

    M = sum_{i,j} |e_i><e_j| kron B[i][j]

over a system basis, where B[i][j] is a d x d environment operator (the
(i, j) system block).  The environment algebra is the smallest unital
*-algebra on the environment containing every block of M and of M^dag; M
then lives in B(H) kron A, and any invariant splitting of the environment
is read off the commutant of A.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstructionError, CrossCheckError, NumericalRankError
from .linalg import (
    BipartiteOperator,
    Tolerance,
    compress_env,
    dagger,
    fix_phase,
    frob,
    hs_orthonormalize,
    kron,
    partial_trace_weighted,
    projection_range_basis,
    resolve_tol,
    unitarity_residual,
)
from .rand import as_rng
from .star_algebra import (
    StarAlgebra,
    _spectral_projections,
    commutant,
    commutant_of_family,
    generate_algebra,
    is_commutative,
    span_equal,
    structure_decomposition,
)

_MAX_GENERIC_ATTEMPTS = 16


@dataclass(frozen=True)
class BlockFamily:
    """System-indexed grid of environment operators of M and M^dag."""

    sys_dim: int
    env_dim: int
    blocks: np.ndarray  # (N, N, d, d)
    adjoint_blocks: np.ndarray  # (N, N, d, d), blocks of M^dag

    def reconstruct(self) -> np.ndarray:
        """sum |e_i><e_j| kron B[i][j], which must reproduce M."""
        n, d = self.sys_dim, self.env_dim
        return self.blocks.transpose(0, 2, 1, 3).reshape(n * d, n * d)

    def flat(self) -> np.ndarray:
        return self.blocks.reshape(-1, self.env_dim, self.env_dim)

    def flat_adjoint(self) -> np.ndarray:
        return self.adjoint_blocks.reshape(-1, self.env_dim, self.env_dim)


def env_blocks(op: BipartiteOperator) -> BlockFamily:
    """Extract all system blocks of M and M^dag."""
    m4 = op.reshape4()
    blocks = m4.transpose(0, 2, 1, 3)
    adj = op.adjoint().reshape4().transpose(0, 2, 1, 3)
    return BlockFamily(op.sys_dim, op.env_dim, np.ascontiguousarray(blocks),
                       np.ascontiguousarray(adj))


def environment_algebra(op: BipartiteOperator, tol: Tolerance | None = None) -> StarAlgebra:
    """Smallest unital *-algebra A on the environment with M and M^dag in
    B(H) kron A; generated by all blocks of both."""
    tol = resolve_tol(tol)
    fam = env_blocks(op)
    gens = np.concatenate([fam.flat(), fam.flat_adjoint()])
    alg = generate_algebra(gens, dim=op.env_dim, tol=tol)
    worst = max(alg.membership_residual(b) for b in gens)
    if worst > 10 * tol.eq_abs:
        raise CrossCheckError(f"generator escaped its own algebra: {worst:.3e}")
    return alg


def environment_commutant_direct(
    op: BipartiteOperator, tol: Tolerance | None = None, check: bool = True
) -> StarAlgebra:
    """Commutant of the environment algebra from the defining commutation
    equations [I kron Y, M] = [I kron Y, M^dag] = 0.

    Blockwise these read [Y, B] = 0 for every block of M and M^dag, which is
    solved as one stacked nullspace, independently of the span-closure
    pipeline.  When ``check`` is set the result is compared against
    commutant(environment_algebra(M)); disagreement raises CrossCheckError.
    """
    tol = resolve_tol(tol)
    fam = env_blocks(op)
    family = np.concatenate([fam.flat(), fam.flat_adjoint()])
    direct = commutant_of_family(family, op.env_dim, tol)
    if check:
        via_alg = commutant(environment_algebra(op, tol), tol)
        ok, res = span_equal(direct, via_alg)
        if not ok:
            raise CrossCheckError(
                f"direct commutant disagrees with algebra commutant: dims "
                f"{direct.dim}/{via_alg.dim}, residual {res:.3e}"
            )
    return direct


# ----------------------------------------------------------------------
# Classical / quantum decomposition
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class EnvironmentSplit:
    """Decomposition of the environment into its maximal commutative part
    and the complementary quantum part."""

    projection: np.ndarray  # P_c on the environment
    classical_basis: np.ndarray  # d x k_c orthonormal columns
    quantum_basis: np.ndarray  # d x k_q orthonormal columns
    classical_part: BipartiteOperator | None  # restriction to H kron K_c
    quantum_part: BipartiteOperator | None
    invariance_residual: float

    @property
    def classical_dim(self) -> int:
        return self.classical_basis.shape[1]

    @property
    def quantum_dim(self) -> int:
        return self.quantum_basis.shape[1]


def _off_block_residual(op: BipartiteOperator, p: np.ndarray) -> float:
    """Norm of the parts of M mapping H kron range(p) outside itself."""
    n = op.sys_dim
    pc = kron(np.eye(n), p)
    pq = kron(np.eye(n), np.eye(op.env_dim) - p)
    m = op.matrix
    return max(frob(pq @ m @ pc), frob(pc @ m @ pq))


def classical_quantum_split(
    op: BipartiteOperator, tol: Tolerance | None = None, rng=0
) -> EnvironmentSplit:
    """Split K = K_c oplus K_q with H kron K_c invariant, the restriction to
    K_c having commutative environment algebra, and K_q carrying no
    commutative part.

    P_c is the maximal projection in the commutant of the environment
    algebra with commutative compression; both defining properties of the
    split are re-verified on the restrictions.
    """
    tol = resolve_tol(tol)
    rng = as_rng(rng)
    d = op.env_dim
    alg = environment_algebra(op, tol)
    sd = structure_decomposition(alg, tol, rng)
    p_c = sd.commutative_projection()

    kc_basis = projection_range_basis(p_c, tol) if frob(p_c) > tol.eq_abs else np.zeros(
        (d, 0), dtype=complex
    )
    p_q = np.eye(d) - p_c
    kq_basis = projection_range_basis(p_q, tol) if frob(p_q) > tol.eq_abs else np.zeros(
        (d, 0), dtype=complex
    )

    inv_res = _off_block_residual(op, p_c)
    if inv_res > 1e2 * tol.eq_abs:
        raise ConstructionError(
            f"H kron K_c is not invariant: off-block residual {inv_res:.3e}"
        )

    classical = None
    quantum = None
    if kc_basis.shape[1] > 0:
        classical = compress_env(op, kc_basis)
        if not is_commutative(environment_algebra(classical, tol), tol):
            raise ConstructionError("restriction to K_c has non-commutative algebra")
    if kq_basis.shape[1] > 0:
        quantum = compress_env(op, kq_basis)
        q_alg = environment_algebra(quantum, tol)
        q_pc = structure_decomposition(q_alg, tol, rng).commutative_projection()
        if frob(q_pc) > 1e2 * tol.eq_abs:
            raise ConstructionError("quantum part still has a commutative subspace")
    return EnvironmentSplit(p_c, kc_basis, kq_basis, classical, quantum, inv_res)


# ----------------------------------------------------------------------
# Commutative normal form
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ClassicalForm:
    """U = sum_i U_i kron |phi_i><psi_i| (phi = psi when absent)."""

    unitaries: np.ndarray  # (d, N, N)
    psi: np.ndarray  # (d, d): psi[i] is the i-th vector
    phi: np.ndarray | None = None

    def reconstruct(self) -> np.ndarray:
        phi = self.psi if self.phi is None else self.phi
        return sum(
            kron(self.unitaries[i], np.outer(phi[i], self.psi[i].conj()))
            for i in range(self.psi.shape[0])
        )


def commutative_form(
    op: BipartiteOperator, tol: Tolerance | None = None, rng=0
) -> ClassicalForm:
    """Write an operator with commutative environment algebra as
    sum_i U_i kron |psi_i><psi_i|.

    The psi_i diagonalize the algebra: a generic hermitian element is split
    into eigenprojections (the minimal projections), each refined into
    rank-one pieces by deterministically projecting canonical basis vectors;
    inside one minimal projection the attached U_i coincide.  Each psi_i is
    phase-normalized so its first non-negligible coordinate is real
    positive.
    """
    tol = resolve_tol(tol)
    rng = as_rng(rng)
    d = op.env_dim
    alg = environment_algebra(op, tol)
    if not is_commutative(alg, tol):
        raise ValueError("environment algebra is not commutative")

    projs = None
    for _ in range(_MAX_GENERIC_ATTEMPTS):
        g = alg.random_hermitian_element(rng)
        projs = _spectral_projections(g, alg.dim, tol)
        if projs is not None:
            break
    if projs is None:
        raise NumericalRankError("could not split a generic element of the algebra")

    vectors = []
    for p in projs:
        cols = projection_range_basis(p, tol)
        for j in range(cols.shape[1]):
            vectors.append(fix_phase(cols[:, j]))
    psi = np.asarray(vectors)
    if psi.shape != (d, d):
        raise NumericalRankError("minimal projections do not resolve the environment")

    unitaries = []
    for v in psi:
        u = partial_trace_weighted(op, np.outer(v, v.conj()), over="env")
        res = unitarity_residual(u)
        if op.kind == "unitary" and res > 1e2 * tol.eq_abs:
            raise ConstructionError(f"piece attached to a basis vector not unitary: {res:.3e}")
        unitaries.append(u)
    form = ClassicalForm(np.asarray(unitaries), psi)
    rec = frob(form.reconstruct() - op.matrix)
    if rec > 1e2 * tol.eq_abs:
        raise ConstructionError(f"normal form does not reconstruct the operator: {rec:.3e}")
    return form
