"""Superoperators attached to a bipartite unitary and their spectral links
to the environment algebras.

The canonical channel sends environment states through the coupling with a
maximally mixed system:

    L(X)  = Tr_sys[ U (I/N kron X) U^dag ],
    L*(X) = Tr_sys[ U^dag (I/N kron X) U ]   (its Hilbert-Schmidt adjoint).

Both are doubly stochastic CP maps, hence Hilbert-Schmidt contractions.
The commutant of the environment algebra is the joint eigenvalue-1 space of
L and L*, and the commutant of the right-action algebra is the singular-
value-1 right space of L; both facts are used as cross-pipeline checks.
An entropy production bound with an exact equality criterion rounds out
the toolbox.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import env_blocks, environment_algebra
from .errors import CrossCheckError, NumericalRankError
from .linalg import (
    BipartiteOperator,
    Tolerance,
    dagger,
    frob,
    kron,
    matrix_unit,
    nullspace,
    partial_trace_sys,
    partial_trace_weighted,
    resolve_tol,
    unvec,
    vec,
)
from .right_action import right_action_algebra
from .star_algebra import StarAlgebra, algebra_from_span, commutant, span_equal


@dataclass(frozen=True)
class Superoperator:
    """A linear map on operators, stored as a matrix acting on
    column-stacked inputs."""

    dim: int
    matrix: np.ndarray  # dim^2 x dim^2
    tag: str

    def apply(self, x: np.ndarray) -> np.ndarray:
        return unvec(self.matrix @ vec(x), (self.dim, self.dim))

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)


def _check_doubly_stochastic(sop: Superoperator, tol: Tolerance) -> None:
    d = sop.dim
    eye = np.eye(d)
    unital = frob(sop.apply(eye) - eye)
    traces = max(
        abs(np.trace(sop.apply(matrix_unit(d, k, l))) - (1.0 if k == l else 0.0))
        for k in range(d)
        for l in range(d)
    )
    if unital > 1e2 * tol.eq_abs or traces > 1e2 * tol.eq_abs:
        raise CrossCheckError(
            f"channel is not doubly stochastic: unital {unital:.3e}, trace {traces:.3e}"
        )


def env_state_channel(op: BipartiteOperator, tol: Tolerance | None = None) -> Superoperator:
    """L(X) = Tr_sys[U (I/N kron X) U^dag], column by column over matrix
    units."""
    tol = resolve_tol(tol)
    if op.kind != "unitary":
        raise ValueError("channel construction requires a unitary")
    n, d = op.sys_dim, op.env_dim
    u = op.matrix
    cols = np.zeros((d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            x = matrix_unit(d, k, l)
            big = u @ kron(np.eye(n) / n, x) @ dagger(u)
            img = partial_trace_sys(BipartiteOperator(n, d, big, "hermitian"))
            cols[:, l * d + k] = vec(img)
    sop = Superoperator(d, cols, "state")
    _check_doubly_stochastic(sop, tol)
    return sop


def env_state_channel_adjoint(op: BipartiteOperator, tol: Tolerance | None = None) -> Superoperator:
    """L*(X) = Tr_sys[U^dag (I/N kron X) U]; verified to be the HS adjoint
    of the forward channel."""
    tol = resolve_tol(tol)
    forward = env_state_channel(op, tol)
    back = env_state_channel(op.adjoint(), tol)
    res = frob(back.matrix - dagger(forward.matrix))
    if res > 1e2 * tol.eq_abs:
        raise CrossCheckError(f"adjoint channel is not the HS adjoint: {res:.3e}")
    return Superoperator(op.env_dim, back.matrix, "state_adjoint")


def _devectorize_space(cols: np.ndarray, d: int, tol: Tolerance) -> StarAlgebra:
    """Nullspace columns -> operator space with *-closure repair."""
    mats = np.asarray([unvec(cols[:, j], (d, d)) for j in range(cols.shape[1])])
    alg, repair = algebra_from_span(mats, d, tol)
    if repair > 1e2 * tol.eq_abs:
        raise NumericalRankError(f"spectral space is not *-stable: repair {repair:.3e}")
    return alg


def fixed_space(
    op: BipartiteOperator, tol: Tolerance | None = None, check: bool = True
) -> StarAlgebra:
    """Joint eigenvalue-1 space of L and L*, devectorized.

    Must coincide with the commutant of the environment algebra; with
    ``check`` on a disagreement raises CrossCheckError.
    """
    tol = resolve_tol(tol)
    d = op.env_dim
    lmat = env_state_channel(op, tol).matrix
    lstar = env_state_channel_adjoint(op, tol).matrix
    eye = np.eye(d * d)
    stacked = np.concatenate([lmat - eye, lstar - eye], axis=0)
    space = _devectorize_space(nullspace(stacked, tol), d, tol)
    if check:
        target = commutant(environment_algebra(op, tol), tol)
        ok, res = span_equal(space, target)
        if not ok:
            raise CrossCheckError(
                f"fixed space disagrees with the environment commutant: dims "
                f"{space.dim}/{target.dim}, residual {res:.3e}"
            )
    return space


def singular_one_space(
    op: BipartiteOperator, tol: Tolerance | None = None, check: bool = True
) -> StarAlgebra:
    """Right singular space of L at singular value 1, via the nullspace of
    L^dag L - I.

    Valid because a doubly stochastic CP map is an HS contraction, so 1 is
    an extremal singular value; the contraction property is asserted at
    runtime rather than assumed.  Must coincide with the commutant of the
    right-action algebra.
    """
    tol = resolve_tol(tol)
    d = op.env_dim
    sop = env_state_channel(op, tol)
    smax = float(sop.singular_values()[0])
    if smax > 1.0 + 1e2 * tol.eq_abs:
        raise CrossCheckError(f"channel is not an HS contraction: sigma_max {smax}")
    gram = dagger(sop.matrix) @ sop.matrix
    space = _devectorize_space(nullspace(gram - np.eye(d * d), tol), d, tol)
    if check:
        target = commutant(right_action_algebra(op, tol, check=False).algebra, tol)
        ok, res = span_equal(space, target)
        if not ok:
            raise CrossCheckError(
                f"singular space disagrees with the right-action commutant: dims "
                f"{space.dim}/{target.dim}, residual {res:.3e}"
            )
    return space


def heisenberg_channel(
    op: BipartiteOperator, omega: np.ndarray, tol: Tolerance | None = None
) -> Superoperator:
    """The system channel X -> Tr_omega[U^dag (X kron I) U] for an
    environment state omega; unital and completely positive, and trace
    preserving only for special omega."""
    tol = resolve_tol(tol)
    check_density(omega, tol)
    n, d = op.sys_dim, op.env_dim
    u = op.matrix
    cols = np.zeros((n * n, n * n), dtype=complex)
    for k in range(n):
        for l in range(n):
            big = dagger(u) @ kron(matrix_unit(n, k, l), np.eye(d)) @ u
            img = partial_trace_weighted(
                BipartiteOperator(n, d, big, "hermitian"), omega, over="env"
            )
            cols[:, l * n + k] = vec(img)
    sop = Superoperator(n, cols, "heisenberg")
    unital = frob(sop.apply(np.eye(n)) - np.eye(n))
    if unital > 1e2 * tol.eq_abs:
        raise CrossCheckError(f"heisenberg channel not unital: {unital:.3e}")
    return sop


# ----------------------------------------------------------------------
# Entropies
# ----------------------------------------------------------------------


def check_density(omega: np.ndarray, tol: Tolerance | None = None) -> np.ndarray:
    """Validate a density matrix: hermitian, eigenvalues >= -eq_abs,
    trace 1.  Returns clipped eigenvalues."""
    tol = resolve_tol(tol)
    omega = np.asarray(omega, dtype=complex)
    if frob(omega - dagger(omega)) > 1e2 * tol.eq_abs:
        raise ValueError("density matrix must be hermitian")
    if abs(np.trace(omega).real - 1.0) > 1e2 * tol.eq_abs:
        raise ValueError(f"density matrix trace {np.trace(omega).real} != 1")
    evals = np.linalg.eigvalsh(omega)
    if evals[0] < -1e2 * tol.eq_abs:
        raise ValueError(f"density matrix has negative eigenvalue {evals[0]:.3e}")
    return np.clip(evals, 0.0, None)


def shannon_entropy(p, tol: Tolerance | None = None) -> float:
    """-sum p_i log p_i with 0 log 0 = 0 (natural log)."""
    tol = resolve_tol(tol)
    p = np.asarray(p, dtype=float)
    if np.any(p < -1e2 * tol.eq_abs) or abs(p.sum() - 1.0) > 1e2 * tol.eq_abs:
        raise ValueError("not a probability vector")
    p = np.clip(p, 0.0, None)
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz))) + 0.0


def entropy(omega: np.ndarray, tol: Tolerance | None = None) -> float:
    """Von Neumann entropy -Tr[omega log omega] from the eigenvalues."""
    evals = check_density(omega, tol)
    nz = evals[evals > 0.0]
    return float(-np.sum(nz * np.log(nz))) + 0.0


@dataclass(frozen=True)
class EntropyCheck:
    entropy_before: float
    entropy_after: float
    increased: bool
    equality_condition_holds: bool
    factorization_residual: float


def entropy_check(
    op: BipartiteOperator, omega: np.ndarray, tol: float = 1e-10
) -> EntropyCheck:
    """Entropy production of the environment channel on omega.

    S(L(omega)) >= S(omega) always (a violation beyond tol is a hard
    failure); entropies agree exactly when U (I/N kron omega) U^dag factors
    as I/N kron L(omega), whose residual is reported and compared at
    sqrt(tol) whenever the entropies match.
    """
    lchan = env_state_channel(op)
    after_state = lchan.apply(omega)
    s0 = entropy(omega)
    s1 = entropy(after_state)
    if s1 < s0 - tol:
        raise CrossCheckError(f"entropy decreased: {s0} -> {s1}")
    n = op.sys_dim
    big = op.matrix @ kron(np.eye(n) / n, omega) @ dagger(op.matrix)
    fact_res = frob(big - kron(np.eye(n) / n, after_state))
    eq_holds = fact_res <= np.sqrt(tol)
    if abs(s1 - s0) <= tol and not eq_holds:
        raise CrossCheckError(
            f"entropies agree but the factorization fails: residual {fact_res:.3e}"
        )
    return EntropyCheck(s0, s1, s1 >= s0 - tol, eq_holds, fact_res)
