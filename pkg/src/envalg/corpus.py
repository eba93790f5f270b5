"""Canonical example operators and the randomized corpus used by the
self-check and the property suites.

The literature displays bipartite matrices with the environment as the
outer block index; this package stores the system outer.  The builders
below therefore assemble operators abstractly from Kronecker products so
that the resulting objects are the intended ones independent of display
convention.
"""

from __future__ import annotations

import numpy as np

from .dipole import DipoleModel
from .linalg import BipartiteOperator, kron, matrix_unit
from .rand import (
    as_rng,
    commutative_form_unitary,
    haar_bipartite,
    haar_unitary,
    product_unitary,
    two_basis_form_unitary,
)

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


def spontaneous_emission(theta: float) -> BipartiteOperator:
    """Qubit-qubit excitation-exchange unitary: identity on the 00 and 11
    levels, a rotation by theta in the middle two; the standard example of
    an environment with no commutative part."""
    c, s = np.cos(theta), np.sin(theta)
    m = np.array(
        [
            [1, 0, 0, 0],
            [0, c, -s, 0],
            [0, s, c, 0],
            [0, 0, 0, 1],
        ],
        dtype=complex,
    )
    return BipartiteOperator(2, 2, m, "unitary")


def classical_quantum_mix(alpha: float, beta: float, theta: float) -> BipartiteOperator:
    """A qubit system with a 4-level environment whose first two levels act
    classically (rotations by alpha and beta against fixed environment
    projectors) and whose last two carry the excitation-exchange dynamics.

    The maximal commutative part is span{e_0, e_1}; the quantum part is
    span{e_2, e_3}.
    """
    d = 4
    m = kron(rotation(alpha), matrix_unit(d, 0, 0)) + kron(
        rotation(beta), matrix_unit(d, 1, 1)
    )
    se = spontaneous_emission(theta).reshape4()  # [i, k, j, l] with k, l in {0, 1}
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    m += se[i, k, j, l] * kron(matrix_unit(2, i, j), matrix_unit(d, 2 + k, 2 + l))
    return BipartiteOperator(2, d, m, "unitary")


def swap_action_pair(u1: np.ndarray, u2: np.ndarray) -> tuple[BipartiteOperator, BipartiteOperator]:
    """The off-diagonal / diagonal pair with identical system action:

        U = U_2 kron |e_0><e_1| + U_1 kron |e_1><e_0|,
        V = U_1 kron |e_0><e_0| + U_2 kron |e_1><e_1|,

    related by U = (I kron swap) V.  The environment algebra of U is full
    while its right-action algebra is the diagonal (commutative) one.
    """
    u1 = np.asarray(u1, dtype=complex)
    u2 = np.asarray(u2, dtype=complex)
    n = u1.shape[0]
    u = kron(u2, matrix_unit(2, 0, 1)) + kron(u1, matrix_unit(2, 1, 0))
    v = kron(u1, matrix_unit(2, 0, 0)) + kron(u2, matrix_unit(2, 1, 1))
    return (
        BipartiteOperator(n, 2, u, "unitary"),
        BipartiteOperator(n, 2, v, "unitary"),
    )


def dipole_single_x() -> DipoleModel:
    """Single self-adjoint coupling: commutative case."""
    return DipoleModel(np.diag([1.0, -1.0]).astype(complex), np.asarray([PAULI_X]))


def dipole_x_z() -> DipoleModel:
    """Two independent couplings: block-split case with full algebra on C^3."""
    return DipoleModel(
        np.diag([1.0, -1.0]).astype(complex), np.asarray([PAULI_X, PAULI_Z])
    )


def dipole_padded_x(zeros: int = 2) -> DipoleModel:
    """sigma_x plus zero couplings: still the commutative case."""
    v = [PAULI_X] + [np.zeros((2, 2), dtype=complex)] * zeros
    return DipoleModel(np.diag([1.0, -1.0]).astype(complex), np.asarray(v))


def named_examples() -> list[tuple[str, BipartiteOperator]]:
    """The fixed examples every suite runs over."""
    u_swap, v_swap = swap_action_pair(np.eye(2), np.diag([1.0, -1.0]))
    return [
        ("spontaneous_emission_pi6", spontaneous_emission(np.pi / 6)),
        ("spontaneous_emission_pi3", spontaneous_emission(np.pi / 3)),
        ("spontaneous_emission_pi2", spontaneous_emission(np.pi / 2)),
        ("classical_quantum_mix", classical_quantum_mix(0.3, 0.7, np.pi / 4)),
        ("swap_action_u", u_swap),
        ("swap_action_v", v_swap),
        ("identity_2x2", BipartiteOperator(2, 2, np.eye(4, dtype=complex), "unitary")),
    ]


def random_corpus(seed: int = 0, per_kind: int = 8, dims=(2, 3, 4)) -> list[tuple[str, BipartiteOperator]]:
    """Randomized corpus over all (sys_dim, env_dim) pairs: Haar unitaries,
    single-basis commutative forms, two-basis forms, and product unitaries."""
    rng = as_rng(seed)
    out = []
    for n in dims:
        for d in dims:
            for k in range(per_kind):
                out.append((f"haar_{n}x{d}_{k}", haar_bipartite(n, d, rng)))
                out.append(
                    (f"commform_{n}x{d}_{k}", commutative_form_unitary(n, d, rng))
                )
                out.append((f"twobasis_{n}x{d}_{k}", two_basis_form_unitary(n, d, rng)))
            out.append((f"product_{n}x{d}", product_unitary(n, d, rng)))
    return out


def full_corpus(seed: int = 0, per_kind: int = 8) -> list[tuple[str, BipartiteOperator]]:
    return named_examples() + random_corpus(seed, per_kind)
