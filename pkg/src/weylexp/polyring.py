"""Sparse polynomials in omega_1..omega_n over ints or golden integers.

Monomials are exponent tuples.  The canonical order is graded-lex with
higher degree first, which also fixes column order for lattice matrices.
"""
from __future__ import annotations

import re
from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial
from typing import Iterable, Mapping, Sequence

from .scalar import GoldenInt, Scalar, exact_div_scalar, parse_scalar, simplify

Monomial = tuple  # tuple[int, ...]


def monomial_key(m: Monomial):
    return (-sum(m), tuple(-e for e in m))


@lru_cache(maxsize=None)
def monomials(n: int, degree: int) -> tuple:
    """All degree-``degree`` monomials in ``n`` variables, canonical order."""
    out = []
    for combo in combinations_with_replacement(range(n), degree):
        e = [0] * n
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return tuple(sorted(out, key=monomial_key))


@lru_cache(maxsize=None)
def monomial_index(n: int, degree: int) -> dict:
    return {m: i for i, m in enumerate(monomials(n, degree))}


class SparsePoly:
    """Polynomial with no explicit zero coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Monomial, Scalar] | None = None):
        self.n = n
        self.terms: dict = {}
        if terms:
            for m, c in terms.items():
                c = simplify(c)
                if c:
                    self.terms[tuple(m)] = c

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, n: int, c: Scalar) -> "SparsePoly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, n: int, j: int, c: Scalar = 1, power: int = 1) -> "SparsePoly":
        e = [0] * n
        e[j] = power
        return cls(n, {tuple(e): c})

    @classmethod
    def linear(cls, coeffs: Sequence[Scalar], power: int = 1) -> "SparsePoly":
        """sum_j coeffs[j] * omega_j**power (the character lambda(power))."""
        n = len(coeffs)
        p = cls(n)
        for j, c in enumerate(coeffs):
            c = simplify(c)
            if c:
                e = [0] * n
                e[j] = power
                p.terms[tuple(e)] = c
        return p

    @classmethod
    def from_vector(cls, n: int, degree: int, vec: Sequence[Scalar]) -> "SparsePoly":
        mons = monomials(n, degree)
        return cls(n, {m: c for m, c in zip(mons, vec)})

    def to_vector(self, degree: int) -> list:
        idx = monomial_index(self.n, degree)
        v = [0] * len(idx)
        for m, c in self.terms.items():
            if sum(m) != degree:
                raise ValueError(f"term {m} is not of degree {degree}")
            v[idx[m]] = c
        return v

    # arithmetic ---------------------------------------------------------
    def copy(self) -> "SparsePoly":
        p = SparsePoly(self.n)
        p.terms = dict(self.terms)
        return p

    def iadd(self, other: "SparsePoly", scale: Scalar = 1) -> "SparsePoly":
        """In-place ``self += scale * other``."""
        t = self.terms
        for m, c in other.terms.items():
            v = simplify(t.get(m, 0) + scale * c)
            if v:
                t[m] = v
            else:
                t.pop(m, None)
        return self

    def __add__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.n, other)
        return self.copy().iadd(other)

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, SparsePoly):
            other = SparsePoly.constant(self.n, other)
        return self.copy().iadd(other, -1)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "SparsePoly":
        return SparsePoly(self.n, {m: c * v for m, v in self.terms.items()})

    def mul(self, other: "SparsePoly", cap: int | None = None) -> "SparsePoly":
        """Product, dropping every term of total degree above ``cap``."""
        out: dict = {}
        for m1, c1 in self.terms.items():
            d1 = sum(m1)
            for m2, c2 in other.terms.items():
                if cap is not None and d1 + sum(m2) > cap:
                    continue
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return SparsePoly(self.n, out)

    def __mul__(self, other):
        if isinstance(other, SparsePoly):
            return self.mul(other)
        if isinstance(other, (int, GoldenInt)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, GoldenInt)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int) -> "SparsePoly":
        result = SparsePoly.constant(self.n, 1)
        for _ in range(k):
            result = result.mul(self)
        return result

    def exact_div(self, k: int) -> "SparsePoly":
        return SparsePoly(self.n, {m: exact_div_scalar(c, k) for m, c in self.terms.items()})

    # structure ----------------------------------------------------------
    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def homogeneous_component(self, i: int) -> "SparsePoly":
        return SparsePoly(self.n, {m: c for m, c in self.terms.items() if sum(m) == i})

    def truncate(self, cap: int) -> "SparsePoly":
        return SparsePoly(self.n, {m: c for m, c in self.terms.items() if sum(m) <= cap})

    def is_homogeneous(self) -> bool:
        return len({sum(m) for m in self.terms}) <= 1

    def coefficients(self) -> list:
        return [self.terms[m] for m in sorted(self.terms, key=monomial_key)]

    def evaluate(self, point: Sequence) -> Scalar:
        total = 0
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v = v * x**e
            total = total + v
        return total

    def substitute(self, images: Sequence["SparsePoly"]) -> "SparsePoly":
        """Ring homomorphism sending omega_j to ``images[j]``."""
        if len(images) != self.n:
            raise ValueError("need one image per variable")
        n_out = images[0].n if images else 0
        powers: dict = {}

        def power(j, e):
            key = (j, e)
            if key not in powers:
                powers[key] = images[j] ** e
            return powers[key]

        out = SparsePoly(n_out)
        for m, c in self.terms.items():
            term = SparsePoly.constant(n_out, c)
            for j, e in enumerate(m):
                if e:
                    term = term.mul(power(j, e))
            out.iadd(term)
        return out

    def __eq__(self, other):
        if isinstance(other, (int, GoldenInt)):
            other = SparsePoly.constant(self.n, other)
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"SparsePoly({self.n}, {str(self)!r})"

    def __str__(self):
        return format_poly(self)


class TruncatedPoly:
    """Element of S*(Lambda) / I_a^(cap+1): products drop degrees above ``cap``."""

    __slots__ = ("poly", "cap")

    def __init__(self, poly: SparsePoly, cap: int):
        self.poly = poly.truncate(cap)
        self.cap = cap

    @property
    def n(self) -> int:
        return self.poly.n

    def __add__(self, other: "TruncatedPoly") -> "TruncatedPoly":
        return TruncatedPoly(self.poly + other.poly, min(self.cap, other.cap))

    def __sub__(self, other: "TruncatedPoly") -> "TruncatedPoly":
        return TruncatedPoly(self.poly - other.poly, min(self.cap, other.cap))

    def __mul__(self, other):
        if isinstance(other, TruncatedPoly):
            cap = min(self.cap, other.cap)
            return TruncatedPoly(self.poly.mul(other.poly, cap), cap)
        return TruncatedPoly(self.poly * other, self.cap)

    __rmul__ = __mul__

    def homogeneous_component(self, i: int) -> SparsePoly:
        return homogeneous_component(self, i)

    def __eq__(self, other):
        if not isinstance(other, TruncatedPoly):
            return NotImplemented
        return self.cap == other.cap and self.poly == other.poly

    def __repr__(self):
        return f"TruncatedPoly({self.poly}, cap={self.cap})"


def homogeneous_component(p: SparsePoly | TruncatedPoly, i: int) -> SparsePoly:
    if i < 0:
        raise ValueError("degree must be nonnegative")
    if isinstance(p, TruncatedPoly):
        if i > p.cap:
            return SparsePoly(p.n)
        p = p.poly
    return p.homogeneous_component(i)


def binomial_series_coefficient(a: int, k: int) -> int:
    """Coefficient of x^k in (1 - x)^(-a), i.e. C(a+k-1, k) for any integer a."""
    num = 1
    for t in range(k):
        num *= a + t
    return num // factorial(k)


def geometric_power(n: int, j: int, a: int, cap: int) -> TruncatedPoly:
    """Truncated expansion of (1 - omega_j)^(-a) in ``n`` variables."""
    terms = {}
    for k in range(cap + 1):
        c = binomial_series_coefficient(a, k)
        if c:
            e = [0] * n
            e[j] = k
            terms[tuple(e)] = c
    return TruncatedPoly(SparsePoly(n, terms), cap)


def substitute_linear(p: SparsePoly, images: Sequence[SparsePoly]) -> SparsePoly:
    """Substitute degree-1 forms for the variables of ``p``."""
    for q in images:
        if q and (q.degree() != 1 or not q.is_homogeneous()):
            raise ValueError("substitute_linear expects homogeneous linear images")
    return p.substitute(images)


def linear_forms(matrix: Sequence[Sequence[Scalar]]) -> list[SparsePoly]:
    """``matrix[j]`` gives the coefficients of the image of omega_j."""
    return [SparsePoly.linear(row) for row in matrix]


# text form ---------------------------------------------------------------

def _format_coeff(c: Scalar) -> str:
    s = str(c)
    return f"({s})" if isinstance(c, GoldenInt) and c.b and c.a else s


def _format_monomial(m: Monomial) -> str:
    parts = []
    for j, e in enumerate(m):
        if e == 1:
            parts.append(f"w{j + 1}")
        elif e > 1:
            parts.append(f"w{j + 1}^{e}")
    return "*".join(parts)


def format_poly(p: SparsePoly) -> str:
    """Canonical text: graded-lex terms, e.g. ``3*w1^2*w2 - w2^3 + 5``."""
    if not p.terms:
        return "0"
    out = []
    for m in sorted(p.terms, key=monomial_key):
        c = p.terms[m]
        neg = False
        if isinstance(c, int) and c < 0:
            neg, c = True, -c
        elif isinstance(c, GoldenInt) and (c.a < 0 or (c.a == 0 and c.b < 0)):
            neg, c = True, -c
        mono = _format_monomial(m)
        if not mono:
            body = _format_coeff(c)
        elif c == 1:
            body = mono
        else:
            body = f"{_format_coeff(c)}*{mono}"
        if not out:
            out.append(("-" if neg else "") + body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


_TERM = re.compile(r"\s*([+-])?\s*(\([^)]*\)|[0-9]+(?:\*tau)?|tau)?\s*\*?\s*((?:w\d+(?:\^\d+)?\*?)*)")


def parse_poly(text: str, n: int) -> SparsePoly:
    """Inverse of :func:`format_poly`."""
    text = text.strip()
    if text == "0":
        return SparsePoly(n)
    p = SparsePoly(n)
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:]!r}")
        sign, coeff, mono = m.groups()
        pos = m.end()
        c = parse_scalar(coeff.strip("()")) if coeff else 1
        if sign == "-":
            c = -c
        e = [0] * n
        for var in filter(None, mono.split("*")):
            name, _, power = var.partition("^")
            e[int(name[1:]) - 1] += int(power) if power else 1
        p.iadd(SparsePoly(n, {tuple(e): c}))
    return p


def sum_polys(polys: Iterable[SparsePoly], n: int) -> SparsePoly:
    out = SparsePoly(n)
    for q in polys:
        out.iadd(q)
    return out
