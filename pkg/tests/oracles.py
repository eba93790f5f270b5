"""Independent brute-force reference implementations for the test suite.

Everything here is written with explicit index loops and first-principles
definitions, deliberately avoiding the library's reshape/einsum pipelines,
so the two routes stay independent.
"""

import numpy as np


def kron_loops(a, b):
    ra, ca = a.shape
    rb, cb = b.shape
    out = np.zeros((ra * rb, ca * cb), dtype=complex)
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k, j * cb + l] = a[i, j] * b[k, l]
    return out


def trace_env_loops(m, n, d):
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(d):
                out[i, j] += m[i * d + k, j * d + k]
    return out


def trace_weighted_loops(m, f, n, d):
    """sum_{k,l} F[l,k] M[(i,k),(j,l)]."""
    out = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(d):
                for l in range(d):
                    out[i, j] += f[l, k] * m[i * d + k, j * d + l]
    return out


def system_block_loops(m, n, d, i, j):
    out = np.zeros((d, d), dtype=complex)
    for k in range(d):
        for l in range(d):
            out[k, l] = m[i * d + k, j * d + l]
    return out


def span_rank(mats, tol=1e-10):
    """Rank of a family of matrices as vectors, via Gaussian elimination."""
    rows = [np.asarray(m, dtype=complex).reshape(-1).copy() for m in mats]
    rank = 0
    ncols = rows[0].size if rows else 0
    used = []
    for r in rows:
        v = r.copy()
        for piv, basis_vec in used:
            v = v - basis_vec * v[piv]
        mags = np.abs(v)
        if mags.max() > tol:
            piv = int(np.argmax(mags))
            v = v / v[piv]
            used.append((piv, v))
            rank += 1
            # eliminate this pivot from stored vectors to keep them reduced
            used = [(p, w - v * w[piv] if p != piv else w) for p, w in used]
    return rank


def in_span(x, mats, tol=1e-8):
    """Least-squares membership of x in the linear span of mats."""
    if len(mats) == 0:
        return np.linalg.norm(x) <= tol
    a = np.stack([np.asarray(m).reshape(-1) for m in mats], axis=1)
    b = np.asarray(x).reshape(-1)
    coef, *_ = np.linalg.lstsq(a, b, rcond=None)
    return np.linalg.norm(a @ coef - b) <= tol


def spans_equal(mats1, mats2, tol=1e-8):
    return all(in_span(m, mats2, tol) for m in mats1) and all(
        in_span(m, mats1, tol) for m in mats2
    )


def commutes_with_all(y, mats, tol=1e-9):
    return all(np.linalg.norm(y @ b - b @ y) <= tol for b in mats)


def heisenberg_image_loops(u, x, n, d):
    """U^dag (X kron I_d) U by explicit embedding."""
    big = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(d):
                big[i * d + k, j * d + k] = x[i, j]
    return u.conj().T @ big @ u


def channel_direct_loops(u, x, n, d):
    """L(X) = Tr_sys[U (I/N kron X) U^dag] from the raw definition."""
    big = np.zeros((n * d, n * d), dtype=complex)
    for i in range(n):
        for k in range(d):
            for l in range(d):
                big[i * d + k, i * d + l] = x[k, l] / n
    m = u @ big @ u.conj().T
    out = np.zeros((d, d), dtype=complex)
    for k in range(d):
        for l in range(d):
            for i in range(n):
                out[k, l] += m[i * d + k, i * d + l]
    return out
