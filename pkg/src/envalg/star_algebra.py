"""Finite-dimensional matrix *-algebra engine.

A *-algebra on C^d is stored as a Hilbert-Schmidt orthonormal basis of its
linear span.  The span is required to be closed under adjoints and products
and (for every algebra produced here) to contain the identity.

Provided operations: generated algebra (iterative span closure), commutant,
bicommutant check, center, structure (Wedderburn) decomposition into blocks
M_n kron I_m via minimal central projections, and the maximal projection
with commutative compression.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CrossCheckError, NumericalRankError
from .linalg import (
    Tolerance,
    dagger,
    frob,
    hs_orthonormalize,
    kron,
    nullspace,
    projection_range_basis,
    resolve_tol,
    unvec,
)

_MAX_GENERIC_ATTEMPTS = 16


@dataclass(frozen=True)
class StarAlgebra:
    """A *-closed unital operator algebra on C^d, stored by an HS-orthonormal
    basis of its linear span."""

    dim_space: int
    basis: np.ndarray  # (k, d, d)
    contains_identity: bool = True

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 3 or b.shape[1:] != (self.dim_space, self.dim_space):
            raise ValueError(f"basis shape {b.shape} incompatible with d={self.dim_space}")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        """Linear dimension of the algebra."""
        return self.basis.shape[0]

    def project(self, x: np.ndarray) -> np.ndarray:
        """HS-orthogonal projection of x onto the span."""
        coeffs = np.einsum("kij,ij->k", self.basis.conj(), x)
        return np.einsum("k,kij->ij", coeffs, self.basis)

    def membership_residual(self, x: np.ndarray) -> float:
        """||x - P(x)|| / max(1, ||x||)."""
        return frob(x - self.project(x)) / max(1.0, frob(x))

    def contains(self, x: np.ndarray, tol: Tolerance | None = None) -> bool:
        return self.membership_residual(x) <= resolve_tol(tol).eq_abs

    def hermitian_spanning_set(self) -> np.ndarray:
        """Real-linear spanning set of the hermitian part of the span."""
        parts = []
        for b in self.basis:
            parts.append((b + dagger(b)) / 2.0)
            parts.append((b - dagger(b)) / 2.0j)
        return np.asarray(parts)

    def random_hermitian_element(self, rng: np.random.Generator) -> np.ndarray:
        """Generic hermitian element: random real combination of the
        hermitian spanning set, normalized."""
        h = self.hermitian_spanning_set()
        coeffs = rng.standard_normal(h.shape[0])
        g = np.einsum("k,kij->ij", coeffs, h)
        n = frob(g)
        if n < 1e-14:
            raise NumericalRankError("hermitian part of the span is degenerate")
        return g / n

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        coeffs = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        return np.einsum("k,kij->ij", coeffs, self.basis)

    def closure_residuals(self) -> dict:
        """Residuals of the defining invariants: adjoint closure, product
        closure, identity membership."""
        star = max((self.membership_residual(dagger(b)) for b in self.basis), default=0.0)
        prods = np.einsum("aij,bjk->abik", self.basis, self.basis)
        prods = prods.reshape(-1, self.dim_space, self.dim_space)
        mult = max((self.membership_residual(p) for p in prods), default=0.0)
        ident = self.membership_residual(np.eye(self.dim_space))
        return {"star": star, "product": mult, "identity": ident}


def full_algebra(d: int) -> StarAlgebra:
    """B(C^d) with the matrix-unit basis (already HS-orthonormal)."""
    basis = np.zeros((d * d, d, d), dtype=complex)
    for k in range(d):
        for l in range(d):
            basis[k * d + l, k, l] = 1.0
    return StarAlgebra(d, basis, True)


def scalar_algebra(d: int) -> StarAlgebra:
    return StarAlgebra(d, np.eye(d, dtype=complex)[None, :, :] / np.sqrt(d), True)


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(0 if rng is None else rng)


# ----------------------------------------------------------------------
# Span arithmetic
# ----------------------------------------------------------------------


def span_residual(sub, sup: StarAlgebra) -> float:
    """Largest projection defect of sub's basis against sup's span."""
    basis = sub.basis if isinstance(sub, StarAlgebra) else np.asarray(sub)
    if basis.shape[0] == 0:
        return 0.0
    return max(sup.membership_residual(b) for b in basis)


def span_equal(a: StarAlgebra, b: StarAlgebra) -> tuple[bool, float]:
    """Subspace equality: dimensions agree and mutual projection residuals
    vanish.  Returns (equal within 1e-8, worst residual)."""
    res = max(span_residual(a, b), span_residual(b, a))
    return (a.dim == b.dim and res <= 1e-8), res


def algebra_from_span(mats, d: int, tol: Tolerance | None = None) -> tuple[StarAlgebra, float]:
    """Orthonormalize a family into a StarAlgebra, repairing *-closure.

    Adjoints are appended before orthonormalization; the repair residual
    (how far the original span was from being *-stable) is returned and
    must be small for mathematically *-stable inputs.
    """
    tol = resolve_tol(tol)
    mats = np.asarray(mats, dtype=complex)
    if mats.shape[0] == 0:
        return StarAlgebra(d, mats.reshape(0, d, d), False), 0.0
    base = hs_orthonormalize(mats, tol)
    pre = StarAlgebra(d, base, False)
    repair = max(pre.membership_residual(dagger(b)) for b in base)
    full = np.concatenate([base, np.conj(np.transpose(base, (0, 2, 1)))])
    basis = hs_orthonormalize(full, tol)
    alg = StarAlgebra(d, basis, contains_identity=True)
    return alg, repair


# ----------------------------------------------------------------------
# Generated algebra, commutant, center
# ----------------------------------------------------------------------


def generate_algebra(gens, dim: int | None = None, tol: Tolerance | None = None) -> StarAlgebra:
    """Smallest unital *-closed multiplicatively closed span containing gens.

    Iterative span closure: seed with {I, g, g^dag}, orthonormalize, append
    all pairwise products, repeat until the dimension stabilizes.  The
    dimension is bounded by d^2 and strictly increases between rounds, so
    this terminates.
    """
    tol = resolve_tol(tol)
    gens = [np.asarray(g, dtype=complex) for g in gens]
    if gens:
        d = gens[0].shape[0]
    elif dim is not None:
        d = dim
    else:
        raise ValueError("need generators or an explicit dimension")
    seed = [np.eye(d, dtype=complex)]
    for g in gens:
        if g.shape != (d, d):
            raise ValueError(f"generator shape {g.shape} != ({d}, {d})")
        seed.append(g)
        seed.append(dagger(g))
    basis = hs_orthonormalize(np.asarray(seed), tol)
    while True:
        prods = np.einsum("aij,bjk->abik", basis, basis).reshape(-1, d, d)
        new = hs_orthonormalize(np.concatenate([basis, prods]), tol)
        if new.shape[0] == basis.shape[0]:
            return StarAlgebra(d, new, True)
        basis = new


def commutant_of_family(mats, d: int, tol: Tolerance | None = None) -> StarAlgebra:
    """All Y with [Y, B] = 0 for every B in the family.

    Solved as one stacked nullspace of the linear maps
    Y -> Y B - B Y, via vec(YB - BY) = (B^T kron I - I kron B) vec(Y).
    """
    tol = resolve_tol(tol)
    mats = np.asarray(mats, dtype=complex)
    if mats.shape[0] == 0:
        return full_algebra(d)
    eye = np.eye(d)
    rows = [kron(b.T, eye) - kron(eye, b) for b in mats]
    null = nullspace(np.concatenate(rows, axis=0), tol)
    sols = np.asarray([unvec(null[:, j], (d, d)) for j in range(null.shape[1])])
    alg, repair = algebra_from_span(sols, d, tol)
    if repair > 10 * tol.eq_abs:
        raise NumericalRankError(f"commutant span not *-stable: repair residual {repair:.3e}")
    return alg


def commutant(alg: StarAlgebra, tol: Tolerance | None = None) -> StarAlgebra:
    """Commutant of a StarAlgebra (computed from its basis)."""
    return commutant_of_family(alg.basis, alg.dim_space, tol)


def bicommutant_check(gens, dim: int | None = None, tol: Tolerance | None = None) -> bool:
    """Verify the double-commutant equality for a generated algebra.

    Returns True when generate_algebra(gens) equals its bicommutant as a
    subspace; a mismatch beyond tolerance raises, since it signals a
    numerical-rank fault rather than a mathematical possibility.
    """
    alg = generate_algebra(gens, dim=dim, tol=tol)
    bicomm = commutant(commutant(alg, tol), tol)
    ok, res = span_equal(alg, bicomm)
    if not ok:
        raise CrossCheckError(
            f"bicommutant mismatch: dims {alg.dim}/{bicomm.dim}, residual {res:.3e}"
        )
    return True


def is_commutative(alg: StarAlgebra, tol: Tolerance | None = None) -> bool:
    """True iff all basis pairs commute within tol.eq_abs."""
    tol = resolve_tol(tol)
    b = alg.basis
    comm = np.einsum("aij,bjk->abik", b, b) - np.einsum("bij,ajk->abik", b, b)
    worst = 0.0 if comm.size == 0 else float(
        np.max(np.linalg.norm(comm.reshape(comm.shape[0] * comm.shape[1], -1), axis=1))
    )
    return worst <= tol.eq_abs


def center(alg: StarAlgebra, tol: Tolerance | None = None) -> StarAlgebra:
    """Center = algebra intersect commutant, as a span intersection."""
    tol = resolve_tol(tol)
    comm = commutant(alg, tol)
    d = alg.dim_space
    va = alg.basis.reshape(alg.dim, d * d)
    vb = comm.basis.reshape(comm.dim, d * d)
    pa = va.T @ va.conj()  # projector onto span(alg), d^2 x d^2
    pb = vb.T @ vb.conj()
    eye = np.eye(d * d)
    stacked = np.concatenate([eye - pa, eye - pb], axis=0)
    null = nullspace(stacked, tol)
    mats = np.asarray([null[:, j].reshape(d, d) for j in range(null.shape[1])])
    out, repair = algebra_from_span(mats, d, tol)
    if repair > 10 * tol.eq_abs:
        raise NumericalRankError(f"center span not *-stable: {repair:.3e}")
    return out


# ----------------------------------------------------------------------
# Structure (Wedderburn) decomposition
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class FactorBlock:
    """One central block of a *-algebra: z A z is isomorphic to
    M_n kron I_m on range(z)."""

    projection: np.ndarray  # z, d x d
    factor_dim: int  # n
    multiplicity: int  # m
    iso_basis: np.ndarray  # (n, m, d): orthonormal grid basis of range(z)

    @property
    def rank(self) -> int:
        return self.factor_dim * self.multiplicity


@dataclass(frozen=True)
class StructureDecomposition:
    dim_space: int
    blocks: tuple

    def commutative_projection(self) -> np.ndarray:
        """Sum of the central projections of the abelian (n = 1) blocks."""
        p = np.zeros((self.dim_space, self.dim_space), dtype=complex)
        for blk in self.blocks:
            if blk.factor_dim == 1:
                p = p + blk.projection
        return p

    def factor_dims(self):
        return [(b.factor_dim, b.multiplicity) for b in self.blocks]


def _cluster_ascending(vals: np.ndarray, gap: float):
    """Split ascending values into groups separated by more than gap."""
    groups = []
    start = 0
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] > gap:
            groups.append(list(range(start, i)))
            start = i
    groups.append(list(range(start, len(vals))))
    return groups


def _spectral_projections(element: np.ndarray, expected: int, tol: Tolerance):
    """Eigenprojections of a hermitian element whose spectrum should split
    into `expected` clusters; returns None when the clustering is ambiguous."""
    w, v = np.linalg.eigh(element)
    spread = float(w[-1] - w[0])
    if spread <= tol.eq_abs:
        groups = [list(range(len(w)))]
    else:
        groups = _cluster_ascending(w, 1e3 * tol.rank_rel * spread)
    if len(groups) != expected:
        return None
    projs = []
    for g in groups:
        cols = v[:, g]
        projs.append(cols @ dagger(cols))
    return projs


def _central_projections(alg: StarAlgebra, zcenter: StarAlgebra, tol: Tolerance,
                         rng: np.random.Generator):
    """Minimal central projections via spectral splitting of a generic
    hermitian central element; retries with fresh randomness on ambiguity."""
    d = alg.dim_space
    if zcenter.dim == 1:
        return [np.eye(d, dtype=complex)]
    for _ in range(_MAX_GENERIC_ATTEMPTS):
        c = zcenter.random_hermitian_element(rng)
        projs = _spectral_projections(c, zcenter.dim, tol)
        if projs is None:
            continue
        if all(zcenter.membership_residual(p) <= 1e2 * tol.eq_abs for p in projs):
            return projs
    raise NumericalRankError("could not isolate minimal central projections")


def _block_iso_basis(alg: StarAlgebra, z: np.ndarray, tol: Tolerance,
                     rng: np.random.Generator):
    """Exhibit z A z as M_n kron I_m: returns (n, m, iso grid (n, m, d)).

    Works in the compressed coordinates of range(z): eigenprojections of a
    generic hermitian element give the diagonal matrix units (n of them,
    rank m each); partial isometries between them come from polar parts of
    compressed generic elements; the grid vectors are their images of an
    orthonormal basis of the first diagonal range.
    """
    d = alg.dim_space
    q = projection_range_basis(z, tol)  # d x r
    r = q.shape[1]
    comp = np.einsum("ka,nkl,lb->nab", q.conj(), alg.basis, q)
    comp_basis = hs_orthonormalize(comp, tol)
    dim_c = comp_basis.shape[0]
    n = int(round(np.sqrt(dim_c)))
    if n * n != dim_c:
        raise NumericalRankError(f"block algebra dimension {dim_c} is not a square")
    if r % n != 0:
        raise NumericalRankError(f"block rank {r} not divisible by factor size {n}")
    m = r // n
    comp_alg = StarAlgebra(r, comp_basis, True)

    if n == 1:
        grid = q.T.reshape(1, m, d)
        return 1, m, grid

    for _ in range(_MAX_GENERIC_ATTEMPTS):
        h = comp_alg.random_hermitian_element(rng)
        projs = _spectral_projections(h, n, tol)
        if projs is None:
            continue
        if any(int(round(float(np.trace(p).real))) != m for p in projs):
            continue
        g = comp_alg.random_element(rng)
        isoms = [projs[0]]
        ok = True
        for i in range(1, n):
            t = projs[i] @ g @ projs[0]
            u, s, vh = np.linalg.svd(t)
            if s[m - 1] <= 1e3 * tol.rank_rel * max(s[0], 1.0):
                ok = False
                break
            isoms.append(u[:, :m] @ vh[:m, :])
        if not ok:
            continue
        u_cols = projection_range_basis(projs[0], tol)  # r x m
        grid = np.zeros((n, m, d), dtype=complex)
        for i in range(n):
            grid[i] = (q @ (isoms[i] @ u_cols)).T
        return n, m, grid
    raise NumericalRankError("could not build matrix units for a central block")


def _grid_structure_residual(alg: StarAlgebra, blk: FactorBlock) -> float:
    """How far z A z is from acting as a kron I_m on the iso grid."""
    n, m = blk.factor_dim, blk.multiplicity
    cols = blk.iso_basis.reshape(n * m, -1).T  # d x (n m)
    worst = 0.0
    for b in alg.basis:
        mat = dagger(cols) @ b @ cols
        t = mat.reshape(n, m, n, m)
        a = np.einsum("ibjb->ij", t) / m
        model = np.kron(a, np.eye(m))
        worst = max(worst, frob(mat - model))
    return worst


def structure_decomposition(
    alg: StarAlgebra,
    tol: Tolerance | None = None,
    rng=0,
) -> StructureDecomposition:
    """Wedderburn data of a unital *-algebra: minimal central projections
    z_a with z A z isomorphic to M_{n_a} kron I_{m_a}.

    Blocks are ordered by descending rank(z), ties broken by the first
    canonical basis index supporting z, so the output is deterministic for
    a fixed seed.
    """
    tol = resolve_tol(tol)
    rng = _as_rng(rng)
    d = alg.dim_space
    zc = center(alg, tol)
    projs = _central_projections(alg, zc, tol, rng)

    blocks = []
    for z in projs:
        n, m, grid = _block_iso_basis(alg, z, tol, rng)
        blocks.append(FactorBlock(z, n, m, grid))

    def support_index(z):
        diag = np.abs(np.diag(z))
        hits = np.nonzero(diag > 1e-8)[0]
        return int(hits[0]) if hits.size else d

    blocks.sort(key=lambda b: (-b.rank, support_index(b.projection)))
    sd = StructureDecomposition(d, tuple(blocks))

    total = sum(b.rank for b in sd.blocks)
    dim_sum = sum(b.factor_dim**2 for b in sd.blocks)
    if total != d:
        raise NumericalRankError(f"block ranks sum to {total} != {d}")
    if dim_sum != alg.dim:
        raise NumericalRankError(f"sum n^2 = {dim_sum} != dim(alg) = {alg.dim}")
    zsum = sum(b.projection for b in sd.blocks)
    if frob(zsum - np.eye(d)) > 1e2 * tol.eq_abs:
        raise NumericalRankError("central projections do not sum to the identity")
    worst = max(_grid_structure_residual(alg, b) for b in sd.blocks)
    if worst > 1e3 * tol.eq_abs:
        raise NumericalRankError(f"iso grid residual too large: {worst:.3e}")
    return sd


def max_commutative_projection(
    alg: StarAlgebra, tol: Tolerance | None = None, rng=0
) -> np.ndarray:
    """The largest projection P in the commutant with P A P commutative.

    Equal to the sum of the abelian central blocks of the structure
    decomposition (possibly the zero matrix).
    """
    return structure_decomposition(alg, tol, rng).commutative_projection()
