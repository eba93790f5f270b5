"""Seeded random constructions used by tests, demos and the self-check
corpus.  Every function takes an explicit numpy Generator (or a seed); no
global random state is touched."""

from __future__ import annotations

import numpy as np

from .linalg import BipartiteOperator, dagger, kron, unitary_from_hermitian
from .star_algebra import StarAlgebra, hs_orthonormalize


def as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(0 if rng is None else rng)


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix with the
    standard phase fix."""
    rng = as_rng(rng)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_hermitian(n: int, rng, scale: float = 1.0) -> np.ndarray:
    rng = as_rng(rng)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (g + dagger(g)) / 2.0


def random_density(n: int, rng) -> np.ndarray:
    """Normalized Wishart state G G^dag / Tr."""
    rng = as_rng(rng)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    w = g @ dagger(g)
    return w / np.trace(w).real


def random_pure_state(n: int, rng) -> np.ndarray:
    rng = as_rng(rng)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def commutative_form_unitary(sys_dim: int, env_dim: int, rng,
                             repeats: int = 0) -> BipartiteOperator:
    """U = sum_i U_i kron |psi_i><psi_i| with Haar U_i and a Haar basis.

    ``repeats`` forces that many coincidences among the U_i, producing
    environment algebras with multiplicity > 1 blocks.
    """
    rng = as_rng(rng)
    basis = haar_unitary(env_dim, rng)
    us = [haar_unitary(sys_dim, rng) for _ in range(env_dim)]
    for k in range(min(repeats, env_dim - 1)):
        us[k + 1] = us[0] if k % 2 == 0 else us[k]
    m = sum(
        kron(us[i], np.outer(basis[:, i], basis[:, i].conj())) for i in range(env_dim)
    )
    return BipartiteOperator(sys_dim, env_dim, m, "unitary")


def two_basis_form_unitary(sys_dim: int, env_dim: int, rng) -> BipartiteOperator:
    """U = sum_i U_i kron |phi_i><psi_i| with two independent Haar bases."""
    rng = as_rng(rng)
    psis = haar_unitary(env_dim, rng)
    phis = haar_unitary(env_dim, rng)
    m = sum(
        kron(haar_unitary(sys_dim, rng), np.outer(phis[:, i], psis[:, i].conj()))
        for i in range(env_dim)
    )
    return BipartiteOperator(sys_dim, env_dim, m, "unitary")


def haar_bipartite(sys_dim: int, env_dim: int, rng) -> BipartiteOperator:
    rng = as_rng(rng)
    return BipartiteOperator(
        sys_dim, env_dim, haar_unitary(sys_dim * env_dim, rng), "unitary"
    )


def product_unitary(sys_dim: int, env_dim: int, rng) -> BipartiteOperator:
    rng = as_rng(rng)
    return BipartiteOperator(
        sys_dim,
        env_dim,
        kron(haar_unitary(sys_dim, rng), haar_unitary(env_dim, rng)),
        "unitary",
    )


def random_block_algebra(d: int, rng, partition=None):
    """A *-algebra with known structure: a random-unitary conjugate of
    oplus_a M_{n_a} kron I_{m_a}.

    Returns (StarAlgebra, sorted [(n_a, m_a)], conjugating unitary).  The
    partition is drawn at random unless given as a list of (n, m) pairs with
    sum n*m = d.
    """
    rng = as_rng(rng)
    if partition is None:
        partition = []
        left = d
        while left > 0:
            n = int(rng.integers(1, left + 1))
            m = int(rng.integers(1, left // n + 1))
            partition.append((n, m))
            left -= n * m
    assert sum(n * m for n, m in partition) == d
    q = haar_unitary(d, rng)
    mats = []
    offset = 0
    for n, m in partition:
        for i in range(n):
            for j in range(n):
                blk = np.zeros((d, d), dtype=complex)
                eij = np.zeros((n, n))
                eij[i, j] = 1.0
                blk[offset : offset + n * m, offset : offset + n * m] = np.kron(
                    eij, np.eye(m)
                )
                mats.append(q @ blk @ dagger(q))
        offset += n * m
    basis = hs_orthonormalize(np.asarray(mats))
    return StarAlgebra(d, basis, True), sorted(partition, reverse=True), q


def unitary_inside_algebra(sys_dim: int, alg: StarAlgebra, rng) -> BipartiteOperator:
    """A unitary in B(H) kron alg: exp(i G) of a hermitian element of that
    algebra, so U and U^dag both stay inside."""
    rng = as_rng(rng)
    d = alg.dim_space
    g = np.zeros((sys_dim * d, sys_dim * d), dtype=complex)
    for _ in range(3):
        x = random_hermitian(sys_dim, rng)
        a = alg.random_hermitian_element(rng)
        g += kron(x, a)
        y = rng.standard_normal((sys_dim, sys_dim)) + 1j * rng.standard_normal(
            (sys_dim, sys_dim)
        )
        b = alg.random_element(rng)
        g += kron(y, b) + dagger(kron(y, b))
    return BipartiteOperator(sys_dim, d, unitary_from_hermitian(g), "unitary")
