"""The right-action algebra of the environment and its consequences.

Two bipartite unitaries act identically on system observables
(U^dag (X kron I) U for all X) exactly when they differ by I kron W.  The
right-action algebra is the smallest unital *-algebra A_r on the
environment with U^dag (X kron I) U in B(H) kron A_r for every X; it is
generated by the products (block of U^dag) x (block of U) and always sits
inside the environment algebra.

This module computes A_r, its commutant from the defining commutation
equations, the I kron W witness between same-action unitaries, a
representative of the same-action class whose environment algebra shrinks
to A_r, the two-basis normal form when A_r is commutative, and the
minimality / cyclic-vector tests for the induced isometry dilations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .environment import ClassicalForm, commutative_form, env_blocks, environment_algebra
from .errors import ConstructionError, CrossCheckError
from .linalg import (
    BipartiteOperator,
    Tolerance,
    dagger,
    frob,
    hs_orthonormalize,
    kron,
    matrix_unit,
    numerical_rank,
    partial_trace_sys,
    projection_range_basis,
    resolve_tol,
    unitarity_residual,
)
from .rand import as_rng
from .star_algebra import (
    StarAlgebra,
    commutant,
    commutant_of_family,
    generate_algebra,
    span_equal,
    span_residual,
    structure_decomposition,
)


@dataclass(frozen=True)
class RightActionAlgebra:
    algebra: StarAlgebra
    generator_count: int


def _right_action_generators(op: BipartiteOperator) -> np.ndarray:
    """All products (block of U^dag)(block of U); N^4 of them, deduplicated
    by orthonormalization."""
    fam = env_blocks(op)
    adj = fam.flat_adjoint()
    blk = fam.flat()
    prods = np.einsum("aij,bjk->abik", adj, blk)
    return prods.reshape(-1, op.env_dim, op.env_dim)


def _heisenberg_image(op: BipartiteOperator, x: np.ndarray) -> np.ndarray:
    """U^dag (X kron I) U."""
    u = op.matrix
    return dagger(u) @ kron(x, np.eye(op.env_dim)) @ u


def right_action_algebra(
    op: BipartiteOperator, tol: Tolerance | None = None, check: bool = True
) -> RightActionAlgebra:
    """Generate A_r(U) and verify its defining invariants.

    With ``check`` on, confirms that every system block of
    U^dag (X kron I) U lies in the span (for matrix-unit X) and that the
    algebra is contained in the environment algebra of U.
    """
    tol = resolve_tol(tol)
    if op.kind != "unitary":
        raise ValueError("right action requires a unitary operator")
    gens = _right_action_generators(op)
    dedup = hs_orthonormalize(gens, tol)
    alg = generate_algebra(dedup, dim=op.env_dim, tol=tol)
    if check:
        n, d = op.sys_dim, op.env_dim
        for i in range(n):
            for j in range(n):
                t = _heisenberg_image(op, matrix_unit(n, i, j))
                t_blocks = t.reshape(n, d, n, d).transpose(0, 2, 1, 3).reshape(-1, d, d)
                worst = max(alg.membership_residual(b) for b in t_blocks)
                if worst > 1e2 * tol.eq_abs:
                    raise CrossCheckError(
                        f"image of a matrix unit escapes the algebra: {worst:.3e}"
                    )
        env_alg = environment_algebra(op, tol)
        res = span_residual(alg, env_alg)
        if res > 1e2 * tol.eq_abs:
            raise CrossCheckError(
                f"right-action algebra not inside environment algebra: {res:.3e}"
            )
    return RightActionAlgebra(alg, int(gens.shape[0]))


def right_action_commutant_direct(
    op: BipartiteOperator, tol: Tolerance | None = None, check: bool = True
) -> StarAlgebra:
    """Commutant of A_r(U) from [I kron Y, U^dag (X kron I) U] = 0 over
    matrix-unit X; blockwise this is the commutant of the raw generator
    family, solved as a stacked nullspace with no span closure involved."""
    tol = resolve_tol(tol)
    gens = hs_orthonormalize(_right_action_generators(op), tol)
    direct = commutant_of_family(gens, op.env_dim, tol)
    if check:
        via_alg = commutant(right_action_algebra(op, tol, check=False).algebra, tol)
        ok, res = span_equal(direct, via_alg)
        if not ok:
            raise CrossCheckError(
                f"direct right-action commutant mismatch: dims {direct.dim}/"
                f"{via_alg.dim}, residual {res:.3e}"
            )
    return direct


def same_action(
    u_op: BipartiteOperator, v_op: BipartiteOperator, tol: Tolerance | None = None
) -> np.ndarray | None:
    """If U and V act identically on all system observables, return the
    unitary W with V = (I kron W) U; otherwise None.

    W is read off the system trace of V U^dag, which must be I kron W.
    """
    tol = resolve_tol(tol)
    if (u_op.sys_dim, u_op.env_dim) != (v_op.sys_dim, v_op.env_dim):
        raise ValueError("operators act on different spaces")
    n, d = u_op.sys_dim, u_op.env_dim
    for i in range(n):
        for j in range(n):
            x = matrix_unit(n, i, j)
            if frob(_heisenberg_image(u_op, x) - _heisenberg_image(v_op, x)) > 1e2 * tol.eq_abs:
                return None
    prod = BipartiteOperator(n, d, v_op.matrix @ dagger(u_op.matrix), "unitary")
    w = partial_trace_sys(prod) / n
    if frob(prod.matrix - kron(np.eye(n), w)) > 1e2 * tol.eq_abs:
        return None
    return w


# ----------------------------------------------------------------------
# Same-action representative with minimal environment algebra
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class ActionEquivalenceWitness:
    """V = (I kron W) U with environment_algebra(V) = A_r(U)."""

    env_unitary: np.ndarray  # W
    operator: BipartiteOperator  # V
    block_reports: tuple
    algebra_residual: float
    same_action_residual: float


def _conjugation_rep(op: BipartiteOperator, grid_cols: np.ndarray,
                     n_fac: int, mult: int, tol: Tolerance):
    """Compress X -> U^dag (X kron I) U onto a central block of A_r(U) and
    strip the multiplicity.

    grid_cols has shape d x (n_fac * mult) with columns ordered (j, beta).
    Returns (rho, structure_residual): rho maps matrix units of the system
    into (N*n_fac) square matrices with
    compressed image = rho(X) kron I_mult.
    """
    n = op.sys_dim
    gamma = kron(np.eye(n), grid_cols)  # (N d) x (N n m)
    rhos = np.zeros((n, n, n * n_fac, n * n_fac), dtype=complex)
    worst = 0.0
    for i in range(n):
        for j in range(n):
            t = _heisenberg_image(op, matrix_unit(n, i, j))
            comp = dagger(gamma) @ t @ gamma
            t6 = comp.reshape(n, n_fac, mult, n, n_fac, mult)
            rho = np.einsum("ijbklb->ijkl", t6) / mult
            rho = rho.reshape(n * n_fac, n * n_fac)
            worst = max(worst, frob(comp - np.kron(rho, np.eye(mult))))
            rhos[i, j] = rho
    return rhos, worst


def same_action_representative(
    op: BipartiteOperator, tol: Tolerance | None = None, rng=0
) -> ActionEquivalenceWitness:
    """Build V in the same-action class of U with
    environment_algebra(V) = A_r(U).

    Per central block of A_r(U) (structure M_n kron I_m on range z): the
    compressed map X -> U^dag (X kron I) U is a unital representation of the
    system algebra of the form rho kron I_m; matrix units of rho give an
    intertwiner S on the system-times-factor space with
    rho(X) = S (X kron I_n) S^dag, and the block contribution to V is
    (S^dag kron I_m) pushed back to the original coordinates.  Every block
    is verified a posteriori (structure residual, projection rank, column
    orthonormality, membership of the blocks of V in A_r); failures raise
    with the offending block's report attached.
    """
    tol = resolve_tol(tol)
    rng = as_rng(rng)
    n, d = op.sys_dim, op.env_dim
    ra = right_action_algebra(op, tol, check=False)
    sd = structure_decomposition(ra.algebra, tol, rng)

    v_full = np.zeros((n * d, n * d), dtype=complex)
    reports = []
    failures = []
    for idx, blk in enumerate(sd.blocks):
        nf, m = blk.factor_dim, blk.multiplicity
        grid_cols = blk.iso_basis.reshape(nf * m, d).T  # d x (nf m)
        rhos, struct_res = _conjugation_rep(op, grid_cols, nf, m, tol)
        report = {
            "block": idx,
            "factor_dim": nf,
            "multiplicity": m,
            "rank": blk.rank,
            "structure_residual": struct_res,
        }
        f00 = rhos[0, 0]
        proj_res = frob(f00 @ f00 - f00)
        report["projection_residual"] = proj_res
        ok = struct_res <= 1e3 * tol.eq_abs and proj_res <= 1e3 * tol.eq_abs
        if ok:
            u_cols = projection_range_basis(f00, tol)  # (n nf) x nf
            s_cols = np.concatenate(
                [rhos[i, 0] @ u_cols for i in range(n)], axis=1
            )  # columns ordered (i, j) = i * nf + j
            ortho_res = frob(dagger(s_cols) @ s_cols - np.eye(n * nf))
            report["orthonormality_residual"] = ortho_res
            if ortho_res > 1e-6:
                ok = False
            else:
                uu, _, vvh = np.linalg.svd(s_cols)
                s_mat = uu @ vvh  # closest unitary
                v_tilde = np.kron(dagger(s_mat), np.eye(m))
                gamma = kron(np.eye(n), grid_cols)
                v_full += gamma @ v_tilde @ dagger(gamma)
        reports.append(report)
        if not ok:
            failures.append(report)

    if failures:
        raise ConstructionError(
            f"{len(failures)} central block(s) failed verification", reports
        )

    v_op = BipartiteOperator(n, d, v_full, "unitary")
    uni_res = unitarity_residual(v_full)
    if uni_res > 1e2 * tol.eq_abs:
        raise ConstructionError(f"assembled operator not unitary: {uni_res:.3e}", reports)

    w = same_action(op, v_op, tol)
    if w is None:
        raise ConstructionError("assembled operator changes the system action", reports)
    sa_res = frob(v_op.matrix - kron(np.eye(n), w) @ op.matrix)

    member_worst = max(
        ra.algebra.membership_residual(b) for b in env_blocks(v_op).flat()
    )
    env_v = environment_algebra(v_op, tol)
    ok_eq, alg_res = span_equal(env_v, ra.algebra)
    for r in reports:
        r["membership_residual"] = member_worst
    if member_worst > 1e2 * tol.eq_abs or not ok_eq:
        raise ConstructionError(
            f"environment algebra of the representative mismatches the right-action "
            f"algebra: membership {member_worst:.3e}, span residual {alg_res:.3e}",
            reports,
        )
    return ActionEquivalenceWitness(w, v_op, tuple(reports), alg_res, sa_res)


def right_commutative_form(
    op: BipartiteOperator, tol: Tolerance | None = None, rng=0
) -> ClassicalForm:
    """Two-basis normal form U = sum U_i kron |phi_i><psi_i|, available
    exactly when A_r(U) is commutative.

    The same-action representative V is put in single-basis form and the
    second basis is pulled back through the witness: phi_i = W^dag psi_i.
    """
    tol = resolve_tol(tol)
    rng = as_rng(rng)
    wit = same_action_representative(op, tol, rng)
    base = commutative_form(wit.operator, tol, rng)
    phi = np.asarray([dagger(wit.env_unitary) @ v for v in base.psi])
    form = ClassicalForm(base.unitaries, base.psi, phi)
    rec = frob(form.reconstruct() - op.matrix)
    if rec > 1e2 * tol.eq_abs:
        raise ConstructionError(f"two-basis form does not reconstruct the input: {rec:.3e}")
    return form


# ----------------------------------------------------------------------
# Dilation minimality and cyclic vectors
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class StinespringWitness:
    psi: np.ndarray
    minimal: bool
    cyclic: bool
    span_rank: int


def cyclic_vector(alg: StarAlgebra, psi: np.ndarray, tol: Tolerance | None = None) -> bool:
    """True when the algebra orbit of psi spans the environment."""
    tol = resolve_tol(tol)
    psi = np.asarray(psi, dtype=complex)
    cols = np.einsum("kij,j->ik", alg.basis, psi)
    return numerical_rank(cols, tol) == alg.dim_space


def stinespring_minimal(
    op: BipartiteOperator, psi: np.ndarray, tol: Tolerance | None = None
) -> StinespringWitness:
    """Minimality of the isometry f -> U (f kron psi) as a dilation of the
    induced system channel, plus the cyclic-vector test for A_r(U).

    Minimality reduces to the blocks of U applied to psi spanning the
    environment; minimality must imply cyclicity, and a violation raises.
    """
    tol = resolve_tol(tol)
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-8:
        raise ValueError("psi must be a unit vector")
    fam = env_blocks(op)
    cols = np.einsum("kij,j->ik", fam.flat(), psi)  # d x N^2
    rank = numerical_rank(cols, tol)
    minimal = rank == op.env_dim
    cyc = cyclic_vector(right_action_algebra(op, tol, check=False).algebra, psi, tol)
    if minimal and not cyc:
        raise CrossCheckError("minimal dilation whose vector is not cyclic")
    return StinespringWitness(psi, minimal, cyc, rank)
