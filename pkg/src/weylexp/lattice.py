"""Exact integer linear algebra: Hermite/Smith forms, kernels, lattice quotients.

Matrices are lists of integer rows.  Everything is fraction-free; pivots are
chosen by minimal absolute value to keep entries small.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Optional, Sequence

from .polyring import SparsePoly, monomials
from .rootsys import RootSystem

IntMatrix = list  # list[list[int]]


class InfiniteExponentError(ArithmeticError):
    """N*M is never contained in L because M leaves the rational span of L."""

    def __init__(self, message: str, witness: Sequence[int]):
        super().__init__(message)
        self.witness = list(witness)


def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    if not A:
        return []
    cols = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def transpose(A: IntMatrix, ncols: Optional[int] = None) -> IntMatrix:
    if not A:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*A)]


def determinant(A: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = len(A)
    if n == 0:
        return 1
    M = [row[:] for row in A]
    sign, prev = 1, 1
    for k in range(n - 1):
        if M[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if M[i][k]), None)
            if swap is None:
                return 0
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


def _axpy(dst: list, src: list, q: int) -> list:
    """dst - q*src."""
    return [a - q * b for a, b in zip(dst, src)]


def hnf(m: IntMatrix, transform: bool = True):
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U @ m == H``, ``U`` unimodular, ``H`` in row
    echelon form with positive pivots, entries above each pivot reduced into
    ``[0, pivot)`` and zero rows last.  With ``transform=False`` ``U`` is None.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    H = [list(r) for r in m]
    U = identity(rows) if transform else None
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if H[i][c]]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(H[i][c]))
            if p != r:
                H[p], H[r] = H[r], H[p]
                if U is not None:
                    U[p], U[r] = U[r], U[p]
            piv = H[r][c]
            clean = True
            for i in range(r + 1, rows):
                if H[i][c]:
                    q = H[i][c] // piv
                    H[i] = _axpy(H[i], H[r], q)
                    if U is not None:
                        U[i] = _axpy(U[i], U[r], q)
                    if H[i][c]:
                        clean = False
            if clean:
                break
        if not H[r][c]:
            continue
        if H[r][c] < 0:
            H[r] = [-x for x in H[r]]
            if U is not None:
                U[r] = [-x for x in U[r]]
        piv = H[r][c]
        for i in range(r):
            q = H[i][c] // piv
            if q:
                H[i] = _axpy(H[i], H[r], q)
                if U is not None:
                    U[i] = _axpy(U[i], U[r], q)
        r += 1
    return H, U


def hnf_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """Nonzero HNF rows of the lattice spanned by ``vectors``."""
    if not vectors:
        return []
    H, _ = hnf([list(v) for v in vectors], transform=False)
    return [row for row in H if any(row)]


def snf(m: IntMatrix, transform: bool = True):
    """Smith normal form ``(D, U, V)`` with ``U @ m @ V == D``.

    The diagonal satisfies ``d_1 | d_2 | ...`` with all ``d_k >= 0``.
    """
    rows = len(m)
    cols = len(m[0]) if rows else 0
    D = [list(r) for r in m]
    U = identity(rows) if transform else None
    V = identity(cols) if transform else None

    def swap_rows(a, b):
        D[a], D[b] = D[b], D[a]
        if U is not None:
            U[a], U[b] = U[b], U[a]

    def swap_cols(a, b):
        for row in D:
            row[a], row[b] = row[b], row[a]
        if V is not None:
            for row in V:
                row[a], row[b] = row[b], row[a]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in D:
            row[dst] -= q * row[src]
        if V is not None:
            for row in V:
                row[dst] -= q * row[src]

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if D[i][j] and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            piv = D[t][t]
            for i in range(t + 1, rows):
                if D[i][t]:
                    q = D[i][t] // piv
                    D[i] = _axpy(D[i], D[t], q)
                    if U is not None:
                        U[i] = _axpy(U[i], U[t], q)
            for j in range(t + 1, cols):
                if D[t][j]:
                    add_col(j, t, D[t][j] // piv)
            rest = [(i, t) for i in range(t + 1, rows) if D[i][t]]
            rest += [(t, j) for j in range(t + 1, cols) if D[t][j]]
            if rest:
                i, j = min(rest, key=lambda ij: abs(D[ij[0]][ij[1]]))
                if i != t:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if D[i][j] % piv),
                None,
            )
            if bad is None:
                break
            D[t] = [a + b for a, b in zip(D[t], D[bad])]
            if U is not None:
                U[t] = [a + b for a, b in zip(U[t], U[bad])]
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    return D, U, V


def elementary_divisors(m: IntMatrix) -> list[int]:
    """Nonzero diagonal of the Smith form."""
    if not m or not m[0]:
        return []
    # shrink to a square full-rank block first
    basis = hnf_basis(m, len(m[0]))
    if not basis:
        return []
    D, _, _ = snf(basis, transform=False)
    return [D[k][k] for k in range(min(len(D), len(D[0]))) if D[k][k]]


def integer_kernel(A: IntMatrix, ncols: int) -> list[list[int]]:
    """Basis of {x in Z^ncols : A x = 0} (a saturated lattice)."""
    rows = hnf_basis(A, ncols) if A else []
    if not rows:
        return identity(ncols)
    H, U = hnf(transpose(rows))
    return [U[i] for i in range(ncols) if not any(H[i])]


def rational_coordinates(basis: Sequence[Sequence[int]], v: Sequence[int]) -> Optional[list[Fraction]]:
    """Solve ``x @ basis == v`` for an echelon ``basis``; None if v is outside the Q-span."""
    x: list[Fraction] = []
    residual = [Fraction(a) for a in v]
    for row in basis:
        p = next(j for j, a in enumerate(row) if a)
        coef = residual[p] / row[p]
        x.append(coef)
        if coef:
            residual = [a - coef * b for a, b in zip(residual, row)]
    if any(residual):
        return None
    return x


class IntLattice:
    """Z-span of integer vectors of a fixed ambient dimension."""

    def __init__(self, dim: int, generators: Sequence[Sequence[int]] = ()):
        self.dim = dim
        self.generators = [list(g) for g in generators]
        for g in self.generators:
            if len(g) != dim:
                raise ValueError(f"generator of length {len(g)} in dimension {dim}")
        self._basis: Optional[list[list[int]]] = None

    @property
    def basis(self) -> list[list[int]]:
        """Canonical (HNF) basis."""
        if self._basis is None:
            self._basis = hnf_basis(self.generators, self.dim)
        return self._basis

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __add__(self, other: "IntLattice") -> "IntLattice":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return IntLattice(self.dim, self.basis + other.basis)

    def scaled(self, k: int) -> "IntLattice":
        return IntLattice(self.dim, [[k * a for a in g] for g in self.basis])

    def coordinates(self, v: Sequence[int]) -> Optional[list[Fraction]]:
        return rational_coordinates(self.basis, v)

    def in_span(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def contains(self, v: Sequence[int]) -> bool:
        x = self.coordinates(v)
        return x is not None and all(c.denominator == 1 for c in x)

    def contains_lattice(self, other: "IntLattice") -> bool:
        return all(self.contains(g) for g in other.basis)

    def __eq__(self, other):
        if not isinstance(other, IntLattice):
            return NotImplemented
        return self.dim == other.dim and self.basis == other.basis

    def __repr__(self):
        return f"IntLattice(dim={self.dim}, rank={self.rank})"


def quotient_exponent(M: IntLattice, L: IntLattice) -> int:
    """Least N > 0 with N*M contained in L, i.e. the exponent of (M+L)/L."""
    for g in M.basis:
        if not L.in_span(g):
            raise InfiniteExponentError(
                "infinite exponent: a vector of M lies outside the rational span of L", g
            )
    total = M + L
    if not L.basis:
        return 1
    coords = []
    for g in L.basis:
        x = total.coordinates(g)
        assert x is not None and all(c.denominator == 1 for c in x)
        coords.append([int(c) for c in x])
    divisors = elementary_divisors(coords)
    assert len(divisors) == total.rank
    return max(divisors) if divisors else 1


def quotient_exponent_by_denominators(M: IntLattice, L: IntLattice) -> int:
    """Same quantity via lcm of denominators of M's coordinates in L."""
    n = 1
    for g in M.basis:
        x = L.coordinates(g)
        if x is None:
            raise InfiniteExponentError("infinite exponent", g)
        for c in x:
            n = lcm(n, c.denominator)
    return n


# invariants of the W-action on S^i(Lambda) ----------------------------------

def reflection_images(rs: RootSystem, k: int) -> list[SparsePoly]:
    """s_k(omega_j) for each j, as linear forms."""
    out = []
    for j in range(rs.rank):
        w = [1 if t == j else 0 for t in range(rs.rank)]
        if j == k:
            w = [a - b for a, b in zip(w, rs.simple_root(k))]
        out.append(SparsePoly.linear(w))
    return out


def act(rs: RootSystem, k: int, p: SparsePoly) -> SparsePoly:
    """The simple reflection s_k acting on a polynomial in S*(Lambda)."""
    return p.substitute(reflection_images(rs, k))


@lru_cache(maxsize=64)
def action_matrix(rs: RootSystem, k: int, degree: int) -> tuple:
    """Matrix of s_k on S^degree in the monomial basis; column j is s_k(m_j)."""
    images = reflection_images(rs, k)
    mons = monomials(rs.rank, degree)
    cols = []
    for m in mons:
        cols.append(SparsePoly(rs.rank, {m: 1}).substitute(images).to_vector(degree))
    return tuple(tuple(row) for row in zip(*cols)) if cols else ()


@lru_cache(maxsize=64)
def _invariant_lattice(rs: RootSystem, degree: int) -> tuple:
    d = len(monomials(rs.rank, degree))
    eqs: list[list[int]] = []
    for k in range(rs.rank):
        A = action_matrix(rs, k, degree)
        for i in range(d):
            row = [A[i][j] - (i == j) for j in range(d)]
            if any(row):
                eqs.append(row)
    kern = integer_kernel(eqs, d)
    return tuple(tuple(v) for v in hnf_basis(kern, d))


def invariant_lattice(rs: RootSystem, degree: int) -> IntLattice:
    """S^degree(Lambda)^W as a lattice in the monomial basis."""
    if not rs.kind.crystallographic:
        raise ValueError("invariant_lattice works over Z; H2 uses the Z[tau] path")
    d = len(monomials(rs.rank, degree))
    return IntLattice(d, [list(v) for v in _invariant_lattice(rs, degree)])


class NormalizationError(ArithmeticError):
    pass


@lru_cache(maxsize=32)
def normalized_q(rs: RootSystem) -> SparsePoly:
    """Generator of S^2(Lambda)^W, positive, with value 1 on short coroots."""
    lat = invariant_lattice(rs, 2)
    if lat.rank != 1:
        raise NormalizationError(f"S^2 invariants of {rs.name} have rank {lat.rank}, expected 1")
    q = SparsePoly.from_vector(rs.rank, 2, lat.basis[0])
    if q.evaluate(rs.fundamental_weight(0)) < 0:
        q = -q
    for c in rs.short_coroots():
        if q.evaluate(c) != 1:
            raise NormalizationError(f"q({c}) = {q.evaluate(c)}, expected 1 on short coroots")
    return q


# unimodular basis changes ----------------------------------------------------

def random_unimodular(n: int, rng, steps: int = 12, bound: int = 2) -> IntMatrix:
    """Product of random elementary integer row operations and sign flips."""
    B = identity(n)
    if n < 2:
        return [[rng.choice((1, -1))]]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        q = rng.randint(-bound, bound)
        B[i] = [a + q * b for a, b in zip(B[i], B[j])]
    k = rng.randrange(n)
    B[k] = [-a for a in B[k]]
    return B


def unimodular_inverse(B: IntMatrix) -> IntMatrix:
    """Integer inverse of a unimodular matrix (the HNF transform of B is B^-1)."""
    H, U = hnf(B)
    if H != identity(len(B)):
        raise ValueError("matrix is not unimodular")
    return U
