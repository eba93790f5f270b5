import numpy as np
import pytest

from envalg.corpus import PAULI_X, PAULI_Z, spontaneous_emission
from envalg.linalg import (
    BipartiteOperator,
    Tolerance,
    bipartite_operator,
    eig_hermitian,
    hs_orthonormalize,
    kron,
    nullspace,
    numerical_rank,
    partial_trace_env,
    partial_trace_sys,
    partial_trace_weighted,
    svd,
)

import oracles

RNG = np.random.default_rng(1234)


def crandn(*shape):
    return RNG.standard_normal(shape) + 1j * RNG.standard_normal(shape)


# ----------------------------------------------------------------------
# kron
# ----------------------------------------------------------------------


def test_kron_identity():
    assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_projector_block_placement():
    e00 = np.zeros((2, 2), dtype=complex)
    e00[0, 0] = 1.0
    out = kron(e00, PAULI_X)
    expected = np.zeros((4, 4), dtype=complex)
    expected[0:2, 0:2] = PAULI_X
    assert np.allclose(out, expected)


def test_kron_mixed_product_identity():
    for _ in range(5):
        a, b, c, d = (crandn(2, 2) for _ in range(4))
        assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-12)


def test_kron_matches_loop_oracle():
    a, b = crandn(3, 2), crandn(2, 4)
    assert np.allclose(kron(a, b), oracles.kron_loops(a, b), atol=1e-13)


# ----------------------------------------------------------------------
# partial traces
# ----------------------------------------------------------------------


def test_partial_trace_env_product():
    a, b = crandn(3, 3), crandn(2, 2)
    op = BipartiteOperator(3, 2, kron(a, b), "hermitian")
    assert np.allclose(partial_trace_env(op), np.trace(b) * a, atol=1e-12)


def test_partial_trace_env_identity():
    op = BipartiteOperator(2, 3, np.eye(6), "unitary")
    assert np.allclose(partial_trace_env(op), 3 * np.eye(2))


def test_partial_trace_env_random_vs_loops():
    m = crandn(4, 4)
    op = BipartiteOperator(2, 2, m, "hermitian")
    assert np.allclose(partial_trace_env(op), oracles.trace_env_loops(m, 2, 2), atol=1e-13)


def test_partial_trace_env_of_kron_is_trace_times_left():
    for _ in range(10):
        a, b = crandn(2, 2), crandn(3, 3)
        op = BipartiteOperator(2, 3, kron(a, b), "hermitian")
        assert np.linalg.norm(partial_trace_env(op) - np.trace(b) * a) <= 1e-10


def test_partial_trace_sys():
    a, b = crandn(2, 2), crandn(3, 3)
    op = BipartiteOperator(2, 3, kron(a, b), "hermitian")
    assert np.allclose(partial_trace_sys(op), np.trace(a) * b, atol=1e-12)


def test_weighted_trace_identity_weight():
    m = crandn(6, 6)
    op = BipartiteOperator(2, 3, m, "hermitian")
    assert np.allclose(
        partial_trace_weighted(op, np.eye(3)), partial_trace_env(op), atol=1e-12
    )


def test_weighted_trace_product_case():
    a, b = crandn(2, 2), crandn(3, 3)
    f = crandn(3, 3)
    op = BipartiteOperator(2, 3, kron(a, b), "hermitian")
    assert np.allclose(
        partial_trace_weighted(op, f), np.trace(b @ f) * a, atol=1e-12
    )


def test_weighted_trace_excitation_exchange_block():
    # weight |e0><e0| picks the environment-(0,0) sub-block diag(1, cos t)
    theta = 0.7
    op = spontaneous_emission(theta)
    f = np.zeros((2, 2), dtype=complex)
    f[0, 0] = 1.0
    out = partial_trace_weighted(op, f)
    assert np.allclose(out, np.diag([1.0, np.cos(theta)]), atol=1e-12)


def test_weighted_trace_random_vs_loops():
    m = crandn(6, 6)
    f = crandn(3, 3)
    op = BipartiteOperator(2, 3, m, "hermitian")
    assert np.allclose(
        partial_trace_weighted(op, f), oracles.trace_weighted_loops(m, f, 2, 3), atol=1e-12
    )


def test_weighted_trace_defining_pairing():
    # <phi, result psi> = <phi ox f, M (psi ox g)> for F = |g><f|
    n, d = 2, 3
    m = crandn(n * d, n * d)
    op = BipartiteOperator(n, d, m, "hermitian")
    for _ in range(4):
        f = crandn(d)
        g = crandn(d)
        out = partial_trace_weighted(op, np.outer(g, f.conj()))
        for i in range(n):
            for j in range(n):
                phi = np.zeros(n)
                psi = np.zeros(n)
                phi[i] = 1.0
                psi[j] = 1.0
                lhs = out[i, j]
                rhs = np.vdot(np.kron(phi, f), m @ np.kron(psi, g))
                assert abs(lhs - rhs) < 1e-10


def test_weighted_trace_sys_gives_blocks():
    m = crandn(6, 6)
    op = BipartiteOperator(2, 3, m, "hermitian")
    for i in range(2):
        for j in range(2):
            f = np.zeros((2, 2), dtype=complex)
            f[j, i] = 1.0  # |e_j><e_i| selects the (i, j) system block
            out = partial_trace_weighted(op, f, over="sys")
            assert np.allclose(out, oracles.system_block_loops(m, 2, 3, i, j), atol=1e-12)


# ----------------------------------------------------------------------
# eigendecomposition / svd
# ----------------------------------------------------------------------


def test_eig_hermitian_diagonal():
    w, _ = eig_hermitian(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [1.0, 2.0, 3.0])


def test_eig_hermitian_pauli_x():
    w, _ = eig_hermitian(PAULI_X)
    assert np.allclose(w, [-1.0, 1.0])


def test_eig_hermitian_reconstruction():
    a = crandn(6, 6)
    a = (a + a.conj().T) / 2
    w, v = eig_hermitian(a)
    assert np.linalg.norm((v * w) @ v.conj().T - a) <= 1e-10
    assert np.linalg.norm(v.conj().T @ v - np.eye(6)) <= 1e-10


def test_eig_hermitian_rejects_nonhermitian():
    with pytest.raises(ValueError):
        eig_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_svd_zero():
    _, s, _ = svd(np.zeros((3, 3)))
    assert np.allclose(s, 0.0)


def test_svd_unitary_singular_values():
    q, _ = np.linalg.qr(crandn(4, 4))
    _, s, _ = svd(q)
    assert np.allclose(s, 1.0, atol=1e-12)


def test_svd_gram_oracle():
    a = crandn(5, 3)
    u, s, vh = svd(a)
    gram_eigs = np.sort(np.linalg.eigvalsh(a.conj().T @ a))[::-1]
    assert np.allclose(s**2, gram_eigs, atol=1e-10)
    assert np.linalg.norm(u[:, :3] @ np.diag(s) @ vh - a) <= 1e-10 * max(1, s[0])


# ----------------------------------------------------------------------
# nullspace / orthonormalization
# ----------------------------------------------------------------------


def test_nullspace_identity_empty():
    assert nullspace(np.eye(3)).shape == (3, 0)


def test_nullspace_zero_full():
    ns = nullspace(np.zeros((3, 3)))
    assert ns.shape == (3, 3)
    assert np.allclose(ns.conj().T @ ns, np.eye(3))


def test_nullspace_rank_one_projector():
    p = np.zeros((2, 2))
    p[0, 0] = 1.0
    ns = nullspace(p)
    assert ns.shape == (2, 1)
    assert abs(abs(ns[1, 0]) - 1.0) < 1e-12


def test_nullspace_dim_plus_rank():
    for _ in range(10):
        rows = int(RNG.integers(2, 6))
        cols = int(RNG.integers(2, 6))
        rank = int(RNG.integers(0, min(rows, cols) + 1))
        a = crandn(rows, rank) @ crandn(rank, cols) if rank else np.zeros((rows, cols))
        ns = nullspace(a)
        assert ns.shape[1] + numerical_rank(a) == cols
        if ns.shape[1]:
            assert np.linalg.norm(a @ ns) <= 1e-8 * max(1.0, np.linalg.norm(a))


def test_hs_orthonormalize_collinear():
    out = hs_orthonormalize([np.eye(2), 2 * np.eye(2)])
    assert out.shape == (1, 2, 2)
    assert np.allclose(np.abs(out[0]), np.eye(2) / np.sqrt(2), atol=1e-12)


def test_hs_orthonormalize_already_orthogonal():
    out = hs_orthonormalize([PAULI_X, PAULI_Z])
    assert out.shape[0] == 2


def test_hs_orthonormalize_gram_oracle():
    mats = [crandn(3, 3) for _ in range(10)]
    out = hs_orthonormalize(mats)
    assert out.shape[0] == oracles.span_rank(mats)
    gram = np.einsum("aij,bij->ab", out.conj(), out)
    assert np.linalg.norm(gram - np.eye(out.shape[0])) <= 1e-10
    assert oracles.spans_equal(mats, list(out))


# ----------------------------------------------------------------------
# bipartite operator validation
# ----------------------------------------------------------------------


def test_bipartite_shape_validation():
    with pytest.raises(ValueError):
        BipartiteOperator(2, 2, np.eye(3), "unitary")


def test_bipartite_unitary_flag():
    good = bipartite_operator(np.eye(4), 2, 2, "unitary")
    assert good.flag_residual() < 1e-12
    with pytest.raises(ValueError):
        bipartite_operator(np.eye(4) * 1.05, 2, 2, "unitary")


def test_bipartite_hermitian_flag():
    with pytest.raises(ValueError):
        bipartite_operator(np.diag([1.0, 1j, 1.0, 1.0]), 2, 2, "hermitian")


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerance(rank_rel=0.0)
    with pytest.raises(ValueError):
        Tolerance(eq_abs=2.0)
