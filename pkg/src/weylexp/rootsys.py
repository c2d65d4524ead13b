"""Root systems, Weyl reflections and orbits in fundamental-weight coordinates.

Numbering follows Bourbaki.  ``cartan[i][j] = <alpha_i^vee, alpha_j>`` so the
simple root ``alpha_j`` has omega-coordinates given by column ``j``.
Weights are plain tuples of scalars (ints, or :class:`GoldenInt` for H2).
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional, Sequence

from .scalar import GoldenInt, Scalar, scalar_key, simplify

log = logging.getLogger(__name__)

Weight = tuple  # tuple[Scalar, ...]

ORBIT_CAP = int(os.environ.get("WEYLEXP_ORBIT_CAP", 10**6))
STREAM_CAP = int(os.environ.get("WEYLEXP_STREAM_CAP", 10**8))

FAMILIES = ("A", "B", "C", "D", "E", "F", "G", "H2")
CLASSICAL = ("A", "B", "C", "D")


class OrbitCapExceeded(RuntimeError):
    """Raised when an orbit grows past the configured size cap."""


@dataclass(frozen=True, order=True)
class RootSystemKind:
    family: str
    rank: int

    def __post_init__(self):
        f, n = self.family, self.rank
        ok = {
            "A": n >= 1,
            "B": n >= 2,
            "C": n >= 2,
            "D": n >= 4,
            "E": n in (6, 7, 8),
            "F": n == 4,
            "G": n == 2,
            "H2": n == 2,
        }.get(f)
        if ok is None:
            raise ValueError(f"unknown root system family {f!r}")
        if not ok:
            raise ValueError(f"inadmissible rank {n} for family {f}")

    @property
    def name(self) -> str:
        return "H2" if self.family == "H2" else f"{self.family}{self.rank}"

    @property
    def crystallographic(self) -> bool:
        return self.family != "H2"

    @classmethod
    def parse(cls, text: str) -> "RootSystemKind":
        text = text.strip().upper()
        if text == "H2":
            return cls("H2", 2)
        return cls(text[0], int(text[1:]))


def cartan_matrix(kind: RootSystemKind) -> list[list[Scalar]]:
    f, n = kind.family, kind.rank
    if f == "H2":
        t = GoldenInt(0, 1)
        return [[2, -t], [-t, 2]]
    C = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, cij=-1, cji=-1):
        C[i][j], C[j][i] = cij, cji

    if f in "ABCD":
        for i in range(n - 1):
            link(i, i + 1)
        if f == "B":
            link(n - 2, n - 1, -1, -2)  # alpha_n short
        elif f == "C":
            link(n - 2, n - 1, -2, -1)  # alpha_n long
        elif f == "D":
            C[n - 2][n - 1] = C[n - 1][n - 2] = 0
            link(n - 3, n - 1)
    elif f == "E":
        # 1-3-4-5-6-7-8 with 2 attached to 4
        for i, j in [(0, 2), (2, 3), (3, 4)] + [(k, k + 1) for k in range(4, n - 1)]:
            link(i, j)
        link(1, 3)
    elif f == "F":
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif f == "G":
        link(0, 1, -3, -1)  # alpha_1 short
    return C


def _symmetrizer(C: list[list[int]]) -> list[Fraction]:
    """Scalars d_i = (alpha_i, alpha_i)/2 with d_i*C[i][j] symmetric, long roots d=1."""
    n = len(C)
    d: list[Optional[Fraction]] = [None] * n
    d[0] = Fraction(1)
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j != i and C[i][j] != 0 and d[j] is None:
                # d_i C_ij = d_j C_ji
                d[j] = d[i] * C[i][j] / C[j][i]
                stack.append(j)
    top = max(d)
    return [x / top for x in d]


@dataclass(frozen=True)
class RootSystem:
    kind: RootSystemKind
    cartan: tuple
    symmetrizer: tuple = ()
    roots: tuple = ()
    highest_root: Optional[Weight] = None
    theta_covector: tuple = ()
    _simple_roots: tuple = field(default=(), repr=False)

    @property
    def rank(self) -> int:
        return self.kind.rank

    @property
    def name(self) -> str:
        return self.kind.name

    def simple_root(self, j: int) -> Weight:
        """omega-coordinates of alpha_j (0-based)."""
        return self._simple_roots[j]

    def fundamental_weight(self, j: int) -> Weight:
        """omega_j as a weight (0-based index)."""
        return tuple(1 if k == j else 0 for k in range(self.rank))

    def fundamental_weights(self) -> list[Weight]:
        return [self.fundamental_weight(j) for j in range(self.rank)]

    def zero(self) -> Weight:
        return (0,) * self.rank

    def long_roots(self) -> list[Weight]:
        return [r for r in self.roots if root_norm(self, r) == 2]

    def short_coroots(self) -> list[tuple]:
        """Coroots of long roots, in simple-coroot coordinates."""
        return [coroot_coordinates(self, r) for r in self.long_roots()]


def build(kind: RootSystemKind, cap: int = ORBIT_CAP) -> RootSystem:
    """Assemble Cartan data, roots and the highest-root covector for ``kind``."""
    if isinstance(kind, str):
        kind = RootSystemKind.parse(kind)
    C = cartan_matrix(kind)
    n = kind.rank
    simple = tuple(tuple(C[i][j] for i in range(n)) for j in range(n))
    rs = RootSystem(kind, tuple(tuple(r) for r in C), _simple_roots=simple)
    if not kind.crystallographic:
        return rs
    d = _symmetrizer(C)
    rs = RootSystem(kind, rs.cartan, tuple(d), _simple_roots=simple)
    found = set()
    for a in simple:
        found.update(orbit(rs, a, cap=cap))
    roots = tuple(sorted(found, key=weight_key))
    coeffs = {r: root_coefficients(rs, r) for r in roots}
    theta = max(roots, key=lambda r: (sum(coeffs[r]), weight_key(r)))
    k = coeffs[theta]
    # theta long with (theta, theta) = 2, so theta^vee = sum k_i d_i alpha_i^vee
    cov = tuple(k[i] * d[i] for i in range(n))
    assert all(c.denominator == 1 and c >= 0 for c in cov)
    cov = tuple(int(c) for c in cov)
    return RootSystem(kind, rs.cartan, tuple(d), roots, theta, cov, simple)


def _solve_rational(A: list[list], b: Sequence) -> list[Fraction]:
    """Solve the square system A x = b over Q by Gauss-Jordan elimination."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    for c in range(n):
        p = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def root_coefficients(rs: RootSystem, lam: Weight) -> list[Fraction]:
    """Coordinates of ``lam`` in the simple-root basis (solves C k = lam)."""
    return _solve_rational([list(r) for r in rs.cartan], lam)


def form(rs: RootSystem, lam: Weight, mu: Weight) -> Fraction:
    """Invariant bilinear form normalised by (alpha, alpha) = 2 on long roots."""
    # (omega_i, alpha_j) = d_j delta_ij
    k = root_coefficients(rs, mu)
    return sum(Fraction(lam[j]) * k[j] * rs.symmetrizer[j] for j in range(rs.rank))


def root_norm(rs: RootSystem, alpha: Weight) -> Fraction:
    return form(rs, alpha, alpha)


def coroot_coordinates(rs: RootSystem, alpha: Weight) -> tuple:
    """alpha^vee = 2 alpha / (alpha, alpha) in simple-coroot coordinates."""
    k = root_coefficients(rs, alpha)
    nrm = root_norm(rs, alpha)
    c = [k[i] * rs.symmetrizer[i] * 2 / nrm for i in range(rs.rank)]
    assert all(x.denominator == 1 for x in c)
    return tuple(int(x) for x in c)


def weight_key(w: Weight):
    return tuple(scalar_key(x) for x in w)


def reflect(rs: RootSystem, j: int, lam: Weight) -> Weight:
    """s_j(lam) = lam - <alpha_j^vee, lam> alpha_j  (0-based j)."""
    c = lam[j]
    if not c:
        return lam
    a = rs._simple_roots[j]
    return tuple(simplify(x - c * y) for x, y in zip(lam, a))


def _positive(x: Scalar) -> int:
    return x.sign() if isinstance(x, GoldenInt) else (x > 0) - (x < 0)


def to_dominant(rs: RootSystem, lam: Weight, max_steps: int = ORBIT_CAP) -> Weight:
    """Move ``lam`` into the dominant chamber by reflecting negative coordinates."""
    for _ in range(max_steps):
        for j in range(rs.rank):
            if _positive(lam[j]) < 0:
                lam = reflect(rs, j, lam)
                break
        else:
            return lam
    raise OrbitCapExceeded(f"no dominant representative within {max_steps} steps")


def orbit(rs: RootSystem, chi: Weight, cap: int = ORBIT_CAP) -> list[Weight]:
    """Full W-orbit by breadth-first closure under simple reflections, sorted."""
    chi = tuple(chi)
    seen = {chi}
    frontier = [chi]
    while frontier:
        nxt = []
        for lam in frontier:
            for j in range(rs.rank):
                mu = reflect(rs, j, lam)
                if mu not in seen:
                    seen.add(mu)
                    nxt.append(mu)
                    if len(seen) > cap:
                        raise OrbitCapExceeded(f"orbit of {chi} exceeds orbit cap {cap}")
        frontier = nxt
    return sorted(seen, key=weight_key)


def iter_orbit(rs: RootSystem, chi: Weight, cap: int = STREAM_CAP) -> Iterator[Weight]:
    """Yield each orbit element once, holding only two depth levels at a time.

    Starting from the dominant representative, applying ``s_j`` where the
    j-th coordinate is positive increases the depth by one and every element
    of depth ``d+1`` arises this way from depth ``d``.
    """
    level = {to_dominant(rs, tuple(chi))}
    count = 0
    while level:
        nxt = set()
        for lam in sorted(level, key=weight_key):
            count += 1
            if count > cap:
                raise OrbitCapExceeded(f"orbit of {tuple(chi)} exceeds stream cap {cap}")
            yield lam
            for j in range(rs.rank):
                if _positive(lam[j]) > 0:
                    nxt.add(reflect(rs, j, lam))
        level = nxt


def orbit_stream(rs: RootSystem, chi: Weight, visitor: Callable[[Weight], None],
                 cap: int = STREAM_CAP) -> None:
    """Invoke ``visitor`` exactly once per orbit element."""
    for lam in iter_orbit(rs, chi, cap):
        visitor(lam)


def orbit_size(rs: RootSystem, chi: Weight, cap: int = STREAM_CAP) -> int:
    return sum(1 for _ in iter_orbit(rs, chi, cap))


def pairing_with_long_coroot(rs: RootSystem, lam: Weight) -> int:
    """<lam, theta^vee> for the highest root theta."""
    if not rs.kind.crystallographic:
        raise ValueError("pairing with the highest coroot needs a crystallographic type")
    return sum(c * x for c, x in zip(rs.theta_covector, lam))


def weyl_group_order(kind: RootSystemKind) -> int:
    from math import factorial

    f, n = kind.family, kind.rank
    return {
        "A": lambda: factorial(n + 1),
        "B": lambda: 2**n * factorial(n),
        "C": lambda: 2**n * factorial(n),
        "D": lambda: 2 ** (n - 1) * factorial(n),
        "E": lambda: {6: 51840, 7: 2903040, 8: 696729600}[n],
        "F": lambda: 1152,
        "G": lambda: 12,
        "H2": lambda: 10,
    }[f]()


def root_count(kind: RootSystemKind) -> int:
    f, n = kind.family, kind.rank
    return {
        "A": n * (n + 1),
        "B": 2 * n * n,
        "C": 2 * n * n,
        "D": 2 * n * (n - 1),
        "E": {6: 72, 7: 126, 8: 240}.get(n, 0),
        "F": 48,
        "G": 12,
        "H2": 10,
    }[f]


@dataclass(frozen=True)
class OrthChart:
    """Exact conversion between omega-coordinates and the e-basis of R^m.

    For A_n the target is R^{n+1} modulo the all-ones vector; ``to_orth``
    returns the representative with ``omega_n = -e_{n+1}``.
    """

    kind: RootSystemKind
    matrix: tuple  # matrix[j] = e-coordinates of omega_j

    @property
    def dim(self) -> int:
        return len(self.matrix[0])


def orth_chart(kind: RootSystemKind) -> OrthChart:
    f, n = kind.family, kind.rank
    if f not in CLASSICAL:
        raise ValueError(f"no orthogonal chart for family {f}")
    half = Fraction(1, 2)
    rows = []
    if f == "A":
        for j in range(n):
            v = [Fraction(0)] * (n + 1)
            if j < n - 1:
                for k in range(j + 1):
                    v[k] = Fraction(1)
            else:
                v[n] = Fraction(-1)
            rows.append(tuple(v))
        return OrthChart(kind, tuple(rows))
    for j in range(n):
        v = [Fraction(1) if k <= j else Fraction(0) for k in range(n)]
        if f == "B" and j == n - 1:
            v = [half] * n
        if f == "D" and j == n - 2:
            v = [half] * (n - 1) + [-half]
        if f == "D" and j == n - 1:
            v = [half] * n
        rows.append(tuple(v))
    return OrthChart(kind, tuple(rows))


def to_orth(chart: OrthChart, lam: Sequence) -> tuple:
    out = [Fraction(0)] * chart.dim
    for j, c in enumerate(lam):
        for k, v in enumerate(chart.matrix[j]):
            out[k] += c * v
    return tuple(out)


def from_orth(chart: OrthChart, x: Sequence) -> tuple:
    """Inverse of :func:`to_orth`; integral results are returned as ints."""
    n = chart.kind.rank
    if chart.kind.family == "A":
        # <alpha_j^vee, x> = x_j - x_{j+1}, independent of the all-ones shift
        res = [Fraction(x[j]) - Fraction(x[j + 1]) for j in range(n)]
    else:
        A = [[chart.matrix[j][k] for j in range(n)] for k in range(n)]
        res = _solve_rational(A, x)
    return tuple(int(v) if v.denominator == 1 else v for v in res)
