"""Exponents tau_i of Weyl group actions, Dynkin indices and torsion bounds.

For degree ``i`` two lattices in S^i(Lambda) are compared:

* ``L_i``, the image of I_m^W: the Z-span of ``f * phi^(j)(rho(omega_l))``
  with ``f`` a monomial of degree ``i - j``.  The reduced sums rho-hat
  generate I_m^W, and ``phi^(j)(rho-hat) = phi^(j)(rho)`` for ``j >= 1``.
  Products of two generators need no separate treatment: a product
  ``phi^(j1)(rho-hat) * phi^(j2)(rho-hat)`` is already ``f * phi^(j2)(rho-hat)``
  with ``f`` in S^(j1).
* ``M_i = I_a^W cap S^i``: monomials times homogeneous invariants.  The
  W-action preserves degree, so homogeneous invariants generate I_a^W.

``tau_i`` is the least N with ``N * M_i`` inside ``L_i``.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from math import factorial, gcd
from typing import Optional

from .lattice import (
    IntLattice,
    act,
    invariant_lattice,
    normalized_q,
    quotient_exponent,
    unimodular_inverse,
)
from .phi import ConsistencyError, phi_of_weights, phi_rho, phi_rho_many
from .polyring import SparsePoly, monomials
from .rootsys import (
    STREAM_CAP,
    RootSystem,
    RootSystemKind,
    build,
    from_orth,
    iter_orbit,
    orth_chart,
    pairing_with_long_coroot,
)
from .scalar import GoldenInt, canonical_associate, gcd_golden, is_associate, SQRT5

log = logging.getLogger(__name__)

MAX_DEGREE = 4
LARGE_TYPES = {("E", 7), ("E", 8)}


@dataclass
class ExponentReport:
    kind: str
    rank: int
    tau: dict = field(default_factory=dict)
    dynkin_per_weight: dict = field(default_factory=dict)
    dynkin_gcd: int = 0
    torsion_bounds: dict = field(default_factory=dict)
    ch4_constants: Optional[tuple] = None
    containment: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def name(self) -> str:
        return f"{self.kind}{self.rank}"

    def check(self) -> None:
        """Structural invariants every emitted report must satisfy."""
        if self.tau.get(0, 1) != 1 or self.tau.get(1, 1) != 1:
            raise ConsistencyError(f"{self.name}: tau_0 and tau_1 must be 1, got {self.tau}")
        degrees = sorted(self.tau)
        for a, b in zip(degrees, degrees[1:]):
            if self.tau[b] % self.tau[a]:
                raise ConsistencyError(f"{self.name}: tau_{a}={self.tau[a]} does not divide tau_{b}={self.tau[b]}")
        if self.dynkin_per_weight:
            g = 0
            for v in self.dynkin_per_weight.values():
                g = gcd(g, v)
            if g != self.dynkin_gcd:
                raise ConsistencyError(f"{self.name}: dynkin_gcd {self.dynkin_gcd} != gcd {g}")

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": self.kind,
            "rank": self.rank,
            "tau": {str(k): v for k, v in sorted(self.tau.items())},
            "dynkin_per_weight": {str(k): v for k, v in sorted(self.dynkin_per_weight.items())},
            "dynkin_gcd": self.dynkin_gcd,
            "torsion_bounds": {str(k): v for k, v in sorted(self.torsion_bounds.items())},
            "ch4_constants": list(self.ch4_constants) if self.ch4_constants else None,
            "containment": {str(k): v for k, v in sorted(self.containment.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExponentReport":
        if d.get("schema") != 1:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        intkeys = lambda m: {int(k): v for k, v in (m or {}).items()}
        ch4 = d.get("ch4_constants")
        return cls(
            kind=d["kind"],
            rank=d["rank"],
            tau=intkeys(d["tau"]),
            dynkin_per_weight=intkeys(d["dynkin_per_weight"]),
            dynkin_gcd=d["dynkin_gcd"],
            torsion_bounds=intkeys(d["torsion_bounds"]),
            ch4_constants=tuple(ch4) if ch4 else None,
            containment=intkeys(d.get("containment")),
        )


@dataclass
class H2Report:
    tau2: GoldenInt
    is_sqrt5: bool
    form: SparsePoly
    form_omega2: SparsePoly

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "kind": "H2",
            "tau2": {"a": self.tau2.a, "b": self.tau2.b, "display": f"{self.tau2.a}{self.tau2.b:+d}*tau"},
            "is_sqrt5": self.is_sqrt5,
            "phi2_rho_omega1": str(self.form),
        }


def _check_crystallographic(rs: RootSystem) -> None:
    if not rs.kind.crystallographic:
        raise ValueError(f"{rs.name} is not crystallographic")


def fundamental_images(rs: RootSystem, max_degree: int, cap: int = STREAM_CAP) -> tuple:
    """``phi^(j)(rho(omega_l))`` for ``1 <= j <= max_degree``; indexed [l][j]."""
    out = []
    for chi in rs.fundamental_weights():
        out.append(phi_rho_many(rs, chi, range(1, max_degree + 1), cap))
    return tuple(out)


def _times_monomials(rs: RootSystem, p: SparsePoly, degree: int) -> list[list[int]]:
    """Vectors of ``m * p`` for all monomials m of the given degree."""
    target = degree + (p.degree() if p else 0)
    vecs = []
    for m in monomials(rs.rank, degree):
        q = p.mul(SparsePoly(rs.rank, {m: 1}))
        vecs.append(q.to_vector(target))
    return vecs


def image_lattice_L(rs: RootSystem, i: int, cap: int = STREAM_CAP) -> IntLattice:
    """phi^(i)(I_m^W) inside S^i(Lambda)."""
    _check_crystallographic(rs)
    d = len(monomials(rs.rank, i))
    gens: list[list[int]] = []
    if i == 0:
        return IntLattice(d)
    images = fundamental_images(rs, i, cap)
    for j in range(1, i + 1):
        for per_weight in images:
            p = per_weight[j]
            if p:
                gens.extend(_times_monomials(rs, p, i - j))
    return IntLattice(d, gens)


def target_lattice_M(rs: RootSystem, i: int) -> IntLattice:
    """(I_a^W)^(i): monomials of degree i-j times a basis of S^j(Lambda)^W."""
    _check_crystallographic(rs)
    d = len(monomials(rs.rank, i))
    gens: list[list[int]] = []
    for j in range(1, i + 1):
        for v in invariant_lattice(rs, j).basis:
            g = SparsePoly.from_vector(rs.rank, j, v)
            gens.extend(_times_monomials(rs, g, i - j))
    return IntLattice(d, gens)


def exponent_tau(rs: RootSystem, i: int, cap: int = STREAM_CAP) -> int:
    """The i-th exponent of the W-action on the weight lattice."""
    if i == 0:
        return 1
    return quotient_exponent(target_lattice_M(rs, i), image_lattice_L(rs, i, cap))


def exponent_tau_in_basis(rs: RootSystem, i: int, B, cap: int = STREAM_CAP) -> int:
    """tau_i recomputed with phi taken in the basis ``b_k = sum_j B[j][k] omega_j``.

    Exploratory: the omega basis is the pinned convention and this value is
    only reported next to it.
    """
    _check_crystallographic(rs)
    if i == 0:
        return 1
    n = rs.rank
    Binv = unimodular_inverse(B)
    d = len(monomials(n, i))
    gens: list[list[int]] = []
    for chi in rs.fundamental_weights():
        weights = (tuple(sum(Binv[k][j] * lam[j] for j in range(n)) for k in range(n))
                   for lam in iter_orbit(rs, chi, cap))
        images = phi_of_weights(weights, n, range(1, i + 1))
        for j in range(1, i + 1):
            if images[j]:
                gens.extend(_times_monomials(rs, images[j], i - j))
    L = IntLattice(d, gens)
    # omega_j = sum_k Binv[k][j] b_k
    subs = [SparsePoly.linear([Binv[k][j] for k in range(n)]) for j in range(n)]
    mgens = []
    for v in target_lattice_M(rs, i).basis:
        mgens.append(SparsePoly.from_vector(n, i, v).substitute(subs).to_vector(i))
    return quotient_exponent(IntLattice(d, mgens), L)


def dynkin_index_orbit(rs: RootSystem, j: int, cap: int = STREAM_CAP) -> int:
    """1/2 * sum over W(omega_j) of <lambda, theta^vee>^2 (j is 0-based)."""
    _check_crystallographic(rs)
    total = 0
    for lam in iter_orbit(rs, rs.fundamental_weight(j), cap):
        total += pairing_with_long_coroot(rs, lam) ** 2
    if total % 2:
        raise ConsistencyError(f"odd pairing sum {total} for {rs.name}, omega_{j + 1}")
    return total // 2


def divide_by_q(p: SparsePoly, q: SparsePoly) -> int:
    """N with p == N*q, raising if p is not an integer multiple of q."""
    if not p:
        return 0
    m = next(iter(q.terms))
    n, r = divmod(p.terms.get(m, 0), q.terms[m])
    if r or p != q * n:
        raise ConsistencyError("phi^2(rho) not a multiple of q")
    return n


def dynkin_index_via_q(rs: RootSystem, j: int, cap: int = STREAM_CAP) -> int:
    """N(omega_j) from phi^(2)(rho(omega_j)) = N * q; must match the orbit formula."""
    _check_crystallographic(rs)
    n = divide_by_q(phi_rho(rs, rs.fundamental_weight(j), 2, cap), normalized_q(rs))
    expected = dynkin_index_orbit(rs, j, cap)
    if n != expected:
        raise ConsistencyError(
            f"{rs.name}, omega_{j + 1}: N = {n} but the orbit Dynkin index is {expected}"
        )
    return n


def torsion_bounds(rs: RootSystem, tau: Optional[dict] = None) -> tuple[dict, Optional[tuple]]:
    """Annihilators ``tau_i * (i-1)!`` for i = 3, 4 and, for B/D, the CH^4 constants.

    The CH^4 pair is ``(bound_4 * 3!, 2-primary part of that)``.
    """
    _check_crystallographic(rs)
    if tau is None:
        tau = {i: exponent_tau(rs, i) for i in (3, 4)}
    bounds = {i: tau[i] * factorial(i - 1) for i in (3, 4)}
    ch4 = None
    f, n = rs.kind.family, rs.rank
    if (f == "B" and n >= 3) or (f == "D" and n >= 4):
        if bounds[4] != 12:
            raise ConsistencyError(f"{rs.name}: degree-4 annihilator {bounds[4]}, expected 12")
        total = bounds[4] * factorial(3)
        two = 1
        while total % (two * 2) == 0:
            two *= 2
        ch4 = (total, two)
    return bounds, ch4


def compute_report(kind: RootSystemKind | str, max_degree: int = MAX_DEGREE,
                   allow_large: bool = False, cap: int = STREAM_CAP) -> ExponentReport:
    """Exponents, Dynkin indices and torsion bounds for one root system."""
    if isinstance(kind, str):
        kind = RootSystemKind.parse(kind)
    if not kind.crystallographic:
        raise ValueError("use h2_tau2 for H2")
    if (kind.family, kind.rank) in LARGE_TYPES and not allow_large:
        raise ValueError(f"{kind.name} needs allow_large (orbits exceed desk scale)")
    if not 1 <= max_degree <= MAX_DEGREE:
        raise ValueError(f"max degree must be between 1 and {MAX_DEGREE}")
    rs = build(kind)
    rep = ExponentReport(kind.family, kind.rank)
    t0 = time.perf_counter()
    fundamental_images(rs, max(max_degree, 2), cap)  # one orbit pass per weight
    rep.timings["orbits"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    for j in range(rs.rank):
        rep.dynkin_per_weight[j + 1] = dynkin_index_via_q(rs, j, cap)
    g = 0
    for v in rep.dynkin_per_weight.values():
        g = gcd(g, v)
    rep.dynkin_gcd = g
    rep.timings["dynkin"] = time.perf_counter() - t0
    rep.tau[0] = 1
    for i in range(1, max_degree + 1):
        t0 = time.perf_counter()
        M = target_lattice_M(rs, i)
        L = image_lattice_L(rs, i, cap)
        rep.tau[i] = quotient_exponent(M, L)
        rep.containment[i] = M.contains_lattice(L)
        rep.timings[f"tau{i}"] = time.perf_counter() - t0
        log.info("%s: tau_%d = %d", rs.name, i, rep.tau[i])
    if max_degree >= 4:
        rep.torsion_bounds, rep.ch4_constants = torsion_bounds(rs, rep.tau)
    rep.check()
    return rep


def h2_tau2() -> H2Report:
    """Second exponent of H2 over Z[tau], via the coefficient gcd of phi^(2)(rho(omega_1))."""
    rs = build(RootSystemKind("H2", 2))
    form1 = phi_rho(rs, (1, 0), 2)
    form2 = phi_rho(rs, (0, 1), 2)
    for k in range(2):
        if act(rs, k, form1) != form1:
            raise ConsistencyError("phi^2(rho(omega_1)) is not W-invariant for H2")
    g = None
    for c in form1.terms.values():
        g = GoldenInt.coerce(c) if g is None else gcd_golden(g, c)
    tau2 = canonical_associate(g)
    return H2Report(tau2, is_associate(tau2, SQRT5), form1, form2)


# identities among degree-4 images ---------------------------------------------

def _e_forms(rs: RootSystem) -> list[SparsePoly]:
    """The e-basis vectors as linear forms in the omega variables."""
    chart = orth_chart(rs.kind)
    out = []
    for k in range(chart.dim):
        unit = [0] * chart.dim
        unit[k] = 1
        coords = from_orth(chart, unit)
        if any(not isinstance(c, int) for c in coords):
            raise ValueError(f"e_{k + 1} is not in the weight lattice of {rs.name}")
        out.append(SparsePoly.linear(coords))
    return out


def power_sum_q(rs: RootSystem, i: int) -> SparsePoly:
    """q_i = sum_k e_k^i in omega variables."""
    total = SparsePoly(rs.rank)
    for e in _e_forms(rs):
        total.iadd(e ** i)
    return total


def _weight_from_e(rs: RootSystem, e_coords) -> tuple:
    chart = orth_chart(rs.kind)
    vec = list(e_coords) + [0] * (chart.dim - len(e_coords))
    w = from_orth(chart, vec)
    assert all(isinstance(c, int) for c in w)
    return tuple(w)


@dataclass
class IdentityResult:
    name: str
    ok: bool
    lhs: SparsePoly
    rhs: SparsePoly

    @property
    def diff(self) -> SparsePoly:
        return self.lhs - self.rhs


def verify_identities(rs: RootSystem) -> list[IdentityResult]:
    """Evaluate the degree 2-4 identities relating orbit images to power sums."""
    f, n = rs.kind.family, rs.rank
    if f not in ("A", "B", "C", "D"):
        raise ValueError(f"no identities for family {f}")
    q2, q3, q4 = (power_sum_q(rs, i) for i in (2, 3, 4))
    out = []

    def rec(name, lhs, rhs):
        out.append(IdentityResult(name, lhs == rhs, lhs, rhs))

    if f == "A":
        w = rs.fundamental_weights()
        rec("A: phi2(rho(w1)) = q2/2", phi_rho(rs, w[0], 2), q2.exact_div(2))
        if n >= 2:
            rec("A: phi3(rho(w1)) - phi3(rho(wn)) = q3/3",
                phi_rho(rs, w[0], 3) - phi_rho(rs, w[-1], 3), q3.exact_div(3))
        if n == 2:
            rec("A2: 2*q4 = q2^2", q4 * 2, q2 * q2)
        if n >= 3:
            w1n = tuple(a + b for a, b in zip(w[0], w[-1]))
            lhs = phi_rho(rs, w1n, 4) + phi_rho(rs, w[1], 4) + phi_rho(rs, w[n - 2], 4)
            lhs = lhs - (phi_rho(rs, w[0], 4) + phi_rho(rs, w[-1], 4)) * (2 * n)
            rec("A: degree-4 orbit identity", lhs, (q2 * q2 - q4).exact_div(2))
    else:
        e1 = _weight_from_e(rs, [1])
        e12 = _weight_from_e(rs, [1, 1])
        rec(f"{f}: phi2(rho(e1)) = q2", phi_rho(rs, e1, 2), q2)
        lhs = phi_rho(rs, e12, 4) - phi_rho(rs, e1, 4) * (2 * (n - 1))
        rec(f"{f}: degree-4 orbit identity", lhs, (q2 * q2 - q4).exact_div(2))
    return out


def is_w_invariant(rs: RootSystem, p: SparsePoly) -> bool:
    return all(act(rs, k, p) == p for k in range(rs.rank))


def fixed_linear_forms_rank(rs: RootSystem) -> int:
    """Rank of Lambda^W, solved from the fixed-point equations of the simple reflections."""
    return invariant_lattice(rs, 1).rank
