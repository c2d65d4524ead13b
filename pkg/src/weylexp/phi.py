"""The truncated isomorphism phi_i : Z[Lambda]/I_m^(i+1) -> S*(Lambda)/I_a^(i+1).

``phi_i(e^lambda) = prod_j (1 - omega_j)^(-a_j)`` for ``lambda = sum a_j omega_j``
in the fundamental-weight basis.  Several independent routes to the graded
pieces ``phi^(i)`` live here:

* :func:`phi_exp` multiplies truncated binomial series;
* :func:`universal_phi` runs the derivative recursion
  ``g_i = g*g_(i-1) + g_(i-1)'`` symbolically in the characters
  ``lambda(m) = sum_j a_j omega_j**m``;
* :func:`phi_rho_closed_form` uses the orbit-summed formulas for i <= 4;
* :func:`phi_rho` streams an orbit through a :class:`PowerSumAccumulator`.
"""
from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .polyring import SparsePoly, TruncatedPoly, geometric_power, parse_poly
from .rootsys import STREAM_CAP, RootSystem, Weight, iter_orbit, weight_key
from .scalar import GoldenInt, Scalar, simplify

log = logging.getLogger(__name__)

CACHE_VERSION = "1"
CACHE_ENV = "WEYLEXP_CACHE_DIR"
PROGRESS_EVERY = 10**6

# in-process memo keyed by (cartan, chi, degree); values are immutable in use
_MEMO: dict = {}


class ConsistencyError(AssertionError):
    """An internal identity failed; always signals a bug, never bad input."""


class NonIntegralImage(ArithmeticError):
    """phi^(i) of a golden-coordinate orbit sum has coefficients outside Z[tau]."""


# group ring ----------------------------------------------------------------

class GroupRingElement:
    """Finite sum ``sum c_lambda e^lambda`` in Z[Lambda]."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[Weight, Scalar]] = None):
        self.n = n
        self.terms: dict = {}
        for w, c in (terms or {}).items():
            if c:
                self.terms[tuple(w)] = c

    @classmethod
    def exp(cls, lam: Weight, c: Scalar = 1) -> "GroupRingElement":
        return cls(len(lam), {tuple(lam): c})

    @classmethod
    def one(cls, n: int) -> "GroupRingElement":
        return cls(n, {(0,) * n: 1})

    def augmentation(self) -> Scalar:
        return sum(self.terms.values())

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = simplify(t.get(w, 0) + c)
        return GroupRingElement(self.n, t)

    def __neg__(self):
        return GroupRingElement(self.n, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, GroupRingElement):
            t: dict = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = tuple(simplify(a + b) for a, b in zip(w1, w2))
                    t[w] = simplify(t.get(w, 0) + c1 * c2)
            return GroupRingElement(self.n, t)
        return GroupRingElement(self.n, {w: c * other for w, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return self.terms == other.terms

    def __repr__(self):
        body = " + ".join(f"{c}*e^{w}" for w, c in sorted(self.terms.items(), key=lambda t: weight_key(t[0])))
        return f"GroupRingElement({body or 0})"


def orbit_sum(rs: RootSystem, chi: Weight) -> GroupRingElement:
    """rho(chi): sum of e^lambda over the W-orbit of chi."""
    return GroupRingElement(rs.rank, {lam: 1 for lam in iter_orbit(rs, chi)})


def reduced_orbit_sum(rs: RootSystem, chi: Weight) -> GroupRingElement:
    """rho-hat(chi) = rho(chi) - |W chi|, which has augmentation zero."""
    rho = orbit_sum(rs, chi)
    return rho - GroupRingElement.one(rs.rank) * rho.augmentation()


def phi_inverse_gen(rs_or_n, j: int) -> GroupRingElement:
    """phi^{-1}(omega_j) = 1 - e^{-omega_j}."""
    n = rs_or_n if isinstance(rs_or_n, int) else rs_or_n.rank
    minus = tuple(-1 if k == j else 0 for k in range(n))
    return GroupRingElement.one(n) - GroupRingElement.exp(minus)


# truncated-series route ------------------------------------------------------

def _int_coords(lam: Weight) -> list[int]:
    out = []
    for a in lam:
        if isinstance(a, GoldenInt):
            if a.b:
                raise ValueError("phi_exp needs integer coordinates; use the universal formula over Z[tau]")
            a = a.a
        out.append(a)
    return out


def phi_exp(rs_or_n, lam: Weight, cap: int) -> TruncatedPoly:
    """phi_cap(e^lam) as a product of truncated binomial series."""
    n = rs_or_n if isinstance(rs_or_n, int) else rs_or_n.rank
    result = TruncatedPoly(SparsePoly.constant(n, 1), cap)
    for j, a in enumerate(_int_coords(lam)):
        if a:
            result = result * geometric_power(n, j, a, cap)
    return result


def phi_element(x: GroupRingElement, cap: int) -> TruncatedPoly:
    """phi_cap on an arbitrary group-ring element (Z-linear extension)."""
    out = SparsePoly(x.n)
    for lam, c in x.terms.items():
        out.iadd(phi_exp(x.n, lam, cap).poly, c)
    return TruncatedPoly(out, cap)


# universal recursion --------------------------------------------------------

@dataclass(frozen=True)
class UniversalPhiFormula:
    """``i! * phi^(i)(e^lambda)`` as an integer polynomial in lambda(1..i).

    ``scaled`` maps exponent patterns ``(e_1, ..., e_i)`` (meaning
    ``prod lambda(m)**e_m``) to integer coefficients.
    """

    degree: int
    scaled: tuple  # ((pattern, int coefficient), ...)

    @property
    def denominator(self) -> int:
        return factorial(self.degree)

    @property
    def coefficients(self) -> dict:
        """The exact rational coefficients of phi^(i) itself."""
        return {p: Fraction(c, self.denominator) for p, c in self.scaled}

    def patterns(self) -> list[tuple]:
        return [p for p, _ in self.scaled]

    def evaluate_scaled(self, chars: Sequence[SparsePoly]) -> SparsePoly:
        """i! * phi^(i)(e^lambda), given chars[m-1] = lambda(m)."""
        n = chars[0].n
        out = SparsePoly(n)
        for pattern, c in self.scaled:
            out.iadd(pattern_product(pattern, chars), c)
        return out

    def evaluate(self, chars: Sequence[SparsePoly]) -> SparsePoly:
        return self.evaluate_scaled(chars).exact_div(self.denominator)

    def __str__(self):
        terms = []
        for pattern, c in self.scaled:
            factors = []
            for m, e in enumerate(pattern, start=1):
                if e:
                    sym = "lam" if m == 1 else f"lam({m})"
                    factors.append(sym if e == 1 else f"{sym}^{e}")
            body = "*".join(factors) or "1"
            terms.append(body if c == 1 else f"{c}*{body}")
        return f"(1/{self.denominator})({' + '.join(terms)})"


def _derive(g: dict, width: int) -> dict:
    """d/dz with P_m' = m * P_(m+1), where P_m(z) = sum a_j w_j^m (1 - w_j z)^-m."""
    out: dict = {}
    for pattern, c in g.items():
        for m, e in enumerate(pattern):  # P_(m+1) has index m
            if not e:
                continue
            new = list(pattern)
            new[m] -= 1
            new[m + 1] += 1
            key = tuple(new)
            out[key] = out.get(key, 0) + c * e * (m + 1)
    return {k: v for k, v in out.items() if v}


@lru_cache(maxsize=None)
def universal_phi(i: int) -> UniversalPhiFormula:
    """Symbolic ``phi^(i)(e^lambda)`` from ``g_0 = 1, g_i = g*g_(i-1) + g_(i-1)'``."""
    if i < 0:
        raise ValueError("degree must be nonnegative")
    width = max(i, 1) + 1
    zero = (0,) * width
    g = {zero: 1}
    for _ in range(i):
        shifted: dict = {}
        for pattern, c in g.items():  # g * g_(i-1), g = P_1
            new = list(pattern)
            new[0] += 1
            shifted[tuple(new)] = shifted.get(tuple(new), 0) + c
        for pattern, c in _derive(g, width).items():
            shifted[pattern] = shifted.get(pattern, 0) + c
        g = {k: v for k, v in shifted.items() if v}
    trimmed = sorted(((p[: max(i, 1)], c) for p, c in g.items()), key=lambda t: (-t[0][0], t[0]))
    assert all(p_full[max(i, 1):] == (0,) * (width - max(i, 1)) for p_full in g)
    return UniversalPhiFormula(i, tuple(trimmed))


def characters(lam: Weight, upto: int) -> list[SparsePoly]:
    """[lambda(1), ..., lambda(upto)]."""
    return [SparsePoly.linear(lam, m) for m in range(1, upto + 1)]


def pattern_product(pattern: Sequence[int], chars: Sequence[SparsePoly]) -> SparsePoly:
    n = chars[0].n
    out = SparsePoly.constant(n, 1)
    for m, e in enumerate(pattern):
        for _ in range(e):
            out = out.mul(chars[m])
    return out


def phi_universal_exp(lam: Weight, i: int) -> SparsePoly:
    """phi^(i)(e^lam) via the universal formula (works over Z[tau] when integral)."""
    if i == 0:
        return SparsePoly.constant(len(lam), 1)
    return universal_phi(i).evaluate(characters(lam, i))


# streamed orbit sums ------------------------------------------------------

class PowerSumAccumulator:
    """Running sums ``sum_lambda prod_m lambda(m)^e_m`` for fixed patterns."""

    def __init__(self, n: int, patterns: Sequence[tuple]):
        self.n = n
        self.patterns = sorted(set(tuple(p) for p in patterns))
        self.width = max((len(p) for p in self.patterns), default=1)
        self.sums = {p: SparsePoly(n) for p in self.patterns}
        self.count = 0

    def add(self, lam: Weight) -> None:
        chars = characters(lam, self.width)
        cache: dict = {(): SparsePoly.constant(self.n, 1)}

        def product(p: tuple) -> SparsePoly:
            # strip trailing zeros so shared prefixes reuse work
            while p and p[-1] == 0:
                p = p[:-1]
            if p in cache:
                return cache[p]
            m = max(k for k, e in enumerate(p) if e)
            rest = list(p)
            rest[m] -= 1
            val = product(tuple(rest)).mul(chars[m])
            cache[p] = val
            return val

        for p in self.patterns:
            self.sums[p].iadd(product(p))
        self.count += 1

    def merge(self, other: "PowerSumAccumulator") -> None:
        for p in self.patterns:
            self.sums[p].iadd(other.sums[p])
        self.count += other.count

    def combine_scaled(self, formula: UniversalPhiFormula) -> SparsePoly:
        """``i! * phi^(i)`` of the accumulated orbit sum."""
        out = SparsePoly(self.n)
        for pattern, c in formula.scaled:
            out.iadd(self.sums[_pad(pattern, self.width)], c)
        return out

    def combine(self, formula: UniversalPhiFormula) -> SparsePoly:
        """Exact ``phi^(i)`` of the accumulated orbit sum."""
        out = self.combine_scaled(formula)
        try:
            return out.exact_div(formula.denominator)
        except ArithmeticError as exc:
            if any(isinstance(c, GoldenInt) for c in out.terms.values()):
                raise NonIntegralImage(
                    f"phi^({formula.degree}) of this orbit sum is not integral over Z[tau]"
                ) from exc
            raise ConsistencyError(
                f"phi^({formula.degree}) of an orbit sum is not divisible by {formula.denominator}"
            ) from exc


def _pad(pattern: tuple, width: int) -> tuple:
    return tuple(pattern) + (0,) * (width - len(pattern))


def _cache_dir() -> Optional[Path]:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def _cache_key(rs: RootSystem, chi: Weight, i: int) -> str:
    cartan = ";".join(",".join(str(x) for x in row) for row in rs.cartan)
    return f"{rs.name}|{cartan}|{','.join(str(x) for x in chi)}|{i}|v{CACHE_VERSION}"


def _cache_path(rs: RootSystem, chi: Weight, i: int) -> Optional[Path]:
    root = _cache_dir()
    if root is None:
        return None
    key = _cache_key(rs, chi, i)
    digest = hashlib.sha256(key.encode()).hexdigest()[:24]
    return root / rs.name / f"{digest}.txt"


def _cache_load(rs, chi, i) -> Optional[SparsePoly]:
    path = _cache_path(rs, chi, i)
    if path is None or not path.exists():
        return None
    key, _, body = path.read_text().partition("\n")
    if key != _cache_key(rs, chi, i):
        return None
    return parse_poly(body.strip(), rs.rank)


def _cache_store(rs, chi, i, poly: SparsePoly) -> None:
    path = _cache_path(rs, chi, i)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    key = _cache_key(rs, chi, i)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(f"{key}\n{poly}\n")
    tmp.replace(path)


def phi_rho_many(rs: RootSystem, chi: Weight, degrees: Sequence[int],
                 cap: int = STREAM_CAP) -> dict[int, SparsePoly]:
    """phi^(i)(rho(chi)) for several degrees from one orbit pass."""
    chi = tuple(chi)
    out: dict[int, SparsePoly] = {}
    todo = []
    for i in degrees:
        if i < 1:
            raise ValueError("phi_rho needs degree >= 1")
        hit = _MEMO.get((rs.cartan, chi, i))
        if hit is None:
            hit = _cache_load(rs, chi, i)
        if hit is not None:
            out[i] = hit
        else:
            todo.append(i)
    if todo:
        computed = phi_of_weights(iter_orbit(rs, chi, cap), rs.rank, todo)
        log.debug("%s orbit of %s streamed", rs.name, chi)
        for i in todo:
            out[i] = computed[i]
            _cache_store(rs, chi, i, out[i])
    for i, p in out.items():
        _MEMO[(rs.cartan, chi, i)] = p
    return out


def phi_of_weights(weights: Iterable[Weight], n: int, degrees: Sequence[int]) -> dict[int, SparsePoly]:
    """phi^(i) of ``sum e^lambda`` over ``weights``, one streaming pass for all degrees."""
    width = max(degrees)
    formulas = {i: universal_phi(i) for i in degrees}
    patterns = {_pad(p, width) for f in formulas.values() for p in f.patterns()}
    acc = PowerSumAccumulator(n, patterns)
    for count, lam in enumerate(weights, 1):
        acc.add(lam)
        if count % PROGRESS_EVERY == 0:
            log.info("streamed %d orbit weights", count)
    return {i: acc.combine(formulas[i]) for i in degrees}


def phi_rho(rs: RootSystem, chi: Weight, i: int, cap: int = STREAM_CAP) -> SparsePoly:
    """phi^(i)(rho(chi)), equal to phi^(i)(rho-hat(chi)) for i >= 1."""
    return phi_rho_many(rs, chi, [i], cap)[i]


def phi_rho_closed_form(rs: RootSystem, chi: Weight, i: int, scaled: bool = False) -> SparsePoly:
    """Orbit-summed closed forms:

    * ``phi^(2)(rho) = 1/2 sum lambda^2``
    * ``phi^(3)(rho) = 1/6 sum (lambda^3 + 3 lambda(2) lambda)``
    * ``phi^(4)(rho) = 1/24 sum (lambda^4 + 6 lambda(2) lambda^2 + 8 lambda(3) lambda + 3 lambda(2)^2)``
    """
    if i not in (2, 3, 4):
        raise ValueError("closed forms exist for degrees 2, 3 and 4 only")
    n = rs.rank
    total = SparsePoly(n)
    for lam in iter_orbit(rs, tuple(chi)):
        lam1, lam2, lam3 = (SparsePoly.linear(lam, m) for m in (1, 2, 3))
        if i == 2:
            term = lam1 * lam1
        elif i == 3:
            term = lam1 * lam1 * lam1 + lam2 * lam1 * 3
        else:
            sq = lam1 * lam1
            term = sq * sq + lam2 * sq * 6 + lam3 * lam1 * 8 + lam2 * lam2 * 3
        total.iadd(term)
    return total if scaled else total.exact_div(factorial(i))


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for k in range(total, -1, -1):
        for rest in _compositions(total - k, parts - 1):
            yield (k,) + rest


def phi_exp_scaled_component(lam: Weight, i: int) -> SparsePoly:
    """``i!`` times the degree-i part of ``prod_j (1 - omega_j)^(-a_j)``.

    Each factor contributes ``rising(a_j, k_j) / k_j!``; scaling by ``i!``
    turns the product of those denominators into a multinomial coefficient,
    so the result is integral over Z[tau] as well as over Z.
    """
    n = len(lam)
    out = SparsePoly(n)
    for ks in _compositions(i, n):
        c: Scalar = factorial(i)
        for k in ks:
            c //= factorial(k)
        for a, k in zip(lam, ks):
            for t in range(k):
                c = c * (a + t)
        out.iadd(SparsePoly(n, {ks: c}))
    return out


def phi_rho_series(rs: RootSystem, chi: Weight, i: int, scaled: bool = False) -> SparsePoly:
    """Orbit sum of the degree-i parts of the binomial series expansion.

    Integer weights use the truncated products of :func:`phi_exp`; golden
    weights, whose per-weight coefficients are not integral, use
    :func:`phi_exp_scaled_component` and one division by ``i!`` at the end.
    """
    total = SparsePoly(rs.rank)
    if rs.kind.crystallographic:
        for lam in iter_orbit(rs, tuple(chi)):
            total.iadd(phi_exp(rs, lam, i).poly.homogeneous_component(i))
        return total * factorial(i) if scaled else total
    for lam in iter_orbit(rs, tuple(chi)):
        total.iadd(phi_exp_scaled_component(lam, i))
    return total if scaled else total.exact_div(factorial(i))


def phi_rho_universal(rs: RootSystem, chi: Weight, i: int, scaled: bool = False) -> SparsePoly:
    """Orbit sum of per-weight universal-formula evaluations (scaled, then divided)."""
    f = universal_phi(i)
    total = SparsePoly(rs.rank)
    for lam in iter_orbit(rs, tuple(chi)):
        total.iadd(f.evaluate_scaled(characters(lam, i)))
    return total if scaled else total.exact_div(f.denominator)


def phi_rho_scaled(rs: RootSystem, chi: Weight, i: int, cap: int = STREAM_CAP) -> SparsePoly:
    """``i! * phi^(i)(rho(chi))`` by streaming; integral even where phi^(i) is not."""
    f = universal_phi(i)
    acc = PowerSumAccumulator(rs.rank, f.patterns())
    for lam in iter_orbit(rs, tuple(chi), cap):
        acc.add(lam)
    return acc.combine_scaled(f)


def power_sum(rs: RootSystem, chi: Weight, m: int) -> SparsePoly:
    """sum over the orbit of lambda(m); zero for essential actions."""
    total = SparsePoly(rs.rank)
    for lam in iter_orbit(rs, tuple(chi)):
        total.iadd(SparsePoly.linear(lam, m))
    return total
