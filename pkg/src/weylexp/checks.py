"""Batch verification suite behind ``weylexp verify``.

Each check is a named callable ``(rs, rng, cap) -> str`` that raises on
failure.  Checks marked ``needs_orbits`` only run once the ``finite-orbits``
gate has passed; a Cartan matrix of an infinite group fails that gate instead
of streaming forever.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Optional

from .exponents import compute_report, dynkin_index_via_q, verify_identities
from .lattice import act, invariant_lattice, random_unimodular, unimodular_inverse
from .phi import (
    GroupRingElement,
    phi_element,
    phi_rho,
    phi_rho_closed_form,
    phi_rho_series,
    phi_rho_universal,
    power_sum,
)
from .polyring import SparsePoly
from .rootsys import (
    CLASSICAL,
    RootSystem,
    RootSystemKind,
    build,
    orbit,
    root_count,
)

DEFAULT_SCOPE = (
    ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "G2", "F4"]
)
SUM_SETS = 500


class CheckFailed(AssertionError):
    pass


def _expect(ok: bool, message: str) -> None:
    if not ok:
        raise CheckFailed(message)


@dataclass
class CheckResult:
    system: str
    check: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.system} {self.check}" + (f": {self.detail}" if self.detail else "")


@dataclass(frozen=True)
class Check:
    name: str
    fn: Callable
    needs_orbits: bool = True
    applies: Callable[[RootSystem], bool] = lambda rs: True


def perturbed_system(kind: RootSystemKind | str, i: int = 0, j: int = 1) -> RootSystem:
    """``kind`` with the sign of Cartan entry (i, j) flipped (a negative control)."""
    if isinstance(kind, str):
        kind = RootSystemKind.parse(kind)
    base = build(kind)
    C = [list(row) for row in base.cartan]
    if i == j or not C[i][j]:
        raise ValueError("perturb a nonzero off-diagonal entry")
    C[i][j] = -C[i][j]
    n = kind.rank
    simple = tuple(tuple(C[r][c] for r in range(n)) for c in range(n))
    return RootSystem(kind, tuple(tuple(r) for r in C), base.symmetrizer, _simple_roots=simple)


# the individual checks ------------------------------------------------------

def check_cartan(rs, rng, cap):
    _expect(all(rs.cartan[k][k] == 2 for k in range(rs.rank)), "Cartan diagonal is not 2")
    found = set()
    for k in range(rs.rank):
        found.update(orbit(rs, rs.simple_root(k), cap))
    _expect(len(found) == root_count(rs.kind),
            f"{len(found)} roots, expected {root_count(rs.kind)}")
    return f"{len(found)} roots"


def check_finite_orbits(rs, rng, cap):
    sizes = [len(orbit(rs, chi, cap)) for chi in rs.fundamental_weights()]
    return "orbit sizes " + ",".join(map(str, sizes))


def check_fixed_forms(rs, rng, cap):
    r = invariant_lattice(rs, 1).rank
    _expect(r == 0, f"invariant linear forms of rank {r}")
    return ""


def check_orbit_character_sums(rs, rng, cap):
    for chi in rs.fundamental_weights():
        for m in range(1, 5):
            s = power_sum(rs, chi, m)
            _expect(not s, f"sum of lambda({m}) over W{chi} is {s}")
    return ""


def _random_weights(rs, rng, size, bound=3):
    return [tuple(rng.randint(-bound, bound) for _ in range(rs.rank)) for _ in range(size)]


def _char_sum(weights, n, m1, m2, x, y) -> SparsePoly:
    total = SparsePoly(n)
    for lam in weights:
        total.iadd(SparsePoly.linear(lam, m1) ** x * SparsePoly.linear(lam, m2) ** y)
    return total


def check_sign_symmetric_sums(rs, rng, cap, sets: int = SUM_SETS):
    n = rs.rank
    for _ in range(sets):
        S = _random_weights(rs, rng, rng.randint(1, 4))
        m1, m2 = rng.randint(1, 4), rng.randint(1, 4)
        x, y = rng.randint(0, 2), rng.randint(0, 2)
        both = S + [tuple(-a for a in lam) for lam in S]
        lhs = _char_sum(both, n, m1, m2, x, y)
        rhs = _char_sum(S, n, m1, m2, x, y) * (1 + (-1) ** (x + y))
        _expect(lhs == rhs, f"S={S}, m=({m1},{m2}), exponents ({x},{y})")
    return f"{sets} sets"


def check_pair_sums(rs, rng, cap, sets: int = SUM_SETS):
    n = rs.rank
    for _ in range(sets):
        r = rng.randint(2, 5)
        S = _random_weights(rs, rng, r)
        m1, m2 = rng.randint(1, 4), rng.randint(1, 4)
        pairs = [(a, b) for a in range(r) for b in range(a + 1, r)]
        plus = [tuple(u + v for u, v in zip(S[a], S[b])) for a, b in pairs]
        minus = [tuple(u - v for u, v in zip(S[a], S[b])) for a, b in pairs]
        base = _char_sum(S, n, m1, m2, 1, 1) * (r - 1)
        cross = SparsePoly(n)
        for a in range(r):
            for b in range(r):
                if a != b:
                    cross.iadd(SparsePoly.linear(S[a], m1) * SparsePoly.linear(S[b], m2))
        _expect(_char_sum(plus, n, m1, m2, 1, 1) == base + cross, f"sums: S={S}, m=({m1},{m2})")
        _expect(_char_sum(minus, n, m1, m2, 1, 1) == base - cross, f"differences: S={S}, m=({m1},{m2})")
    return f"{sets} sets"


def check_quadratic_invariance(rs, rng, cap):
    for chi in rs.fundamental_weights():
        p = phi_rho(rs, chi, 2, cap)
        for k in range(rs.rank):
            _expect(act(rs, k, p) == p, f"phi^2(rho{chi}) moved by s_{k + 1}")
    return ""


def check_phi_routes(rs, rng, cap, degrees=(2, 3, 4)):
    for chi in rs.fundamental_weights():
        for i in degrees:
            streamed = phi_rho(rs, chi, i, cap)
            others = {
                "series": phi_rho_series(rs, chi, i),
                "universal": phi_rho_universal(rs, chi, i),
                "closed form": phi_rho_closed_form(rs, chi, i),
            }
            for name, p in others.items():
                _expect(p == streamed, f"{name} differs from streamed at {chi}, degree {i}")
    return f"{rs.rank} weights x degrees {list(degrees)}"


def _random_element(n, rng, support=3, bound=2) -> GroupRingElement:
    terms = {}
    for _ in range(support):
        lam = tuple(rng.randint(-bound, bound) for _ in range(n))
        terms[lam] = terms.get(lam, 0) + rng.choice((-3, -2, -1, 1, 2, 3))
    return GroupRingElement(n, terms)


def check_ring_hom(rs, rng, cap, trials: int = 20, degree: int = 4):
    n = rs.rank
    for _ in range(trials):
        x, y = _random_element(n, rng), _random_element(n, rng)
        lhs = phi_element(x * y, degree)
        rhs = phi_element(x, degree) * phi_element(y, degree)
        _expect(lhs == rhs, f"phi(xy) != phi(x)phi(y) for x={x}, y={y}")
    return f"{trials} pairs"


def check_basis_change(rs, rng, cap, trials: int = 10):
    n = rs.rank
    for _ in range(trials):
        B = random_unimodular(n, rng)
        Binv = unimodular_inverse(B)
        i = rng.randint(1, 3)
        x = GroupRingElement.one(n)
        for _ in range(i):
            mu = tuple(rng.randint(-2, 2) for _ in range(n))
            x = x * (GroupRingElement.one(n) - GroupRingElement.exp(tuple(-a for a in mu)))
        moved = GroupRingElement(
            n, {tuple(sum(Binv[k][j] * lam[j] for j in range(n)) for k in range(n)): c
                for lam, c in x.terms.items()})
        # b_k = sum_j B[j][k] omega_j
        back = [SparsePoly.linear([B[j][k] for j in range(n)]) for k in range(n)]
        top = phi_element(x, i).homogeneous_component(i)
        top_b = phi_element(moved, i).homogeneous_component(i).substitute(back)
        _expect(top == top_b, f"degree-{i} component changed under basis {B}")
    return f"{trials} basis changes"


def check_invariant_ranks(rs, rng, cap):
    r2 = invariant_lattice(rs, 2).rank
    _expect(r2 == 1, f"S^2 invariants of rank {r2}")
    if rs.kind.family != "A":
        r3 = invariant_lattice(rs, 3).rank
        _expect(r3 == 0, f"S^3 invariants of rank {r3}")
    return ""


def check_identities(rs, rng, cap):
    results = verify_identities(rs)
    for r in results:
        _expect(r.ok, f"{r.name} fails, difference {r.diff}")
    return "; ".join(r.name for r in results)


def check_dynkin_routes(rs, rng, cap):
    values = [dynkin_index_via_q(rs, j, cap) for j in range(rs.rank)]
    return "indices " + ",".join(map(str, values))


def check_exponent_report(rs, rng, cap):
    rep = compute_report(rs.kind, cap=cap)
    taus = [rep.tau[i] for i in (2, 3, 4)]
    _expect(len(set(taus)) == 1, f"tau_2..tau_4 = {taus} are not equal")
    _expect(rep.tau[2] == rep.dynkin_gcd, f"tau_2 = {rep.tau[2]} but Dynkin gcd {rep.dynkin_gcd}")
    return f"tau_2 = {rep.tau[2]}"


CHECKS = [
    Check("cartan", check_cartan, needs_orbits=False),
    Check("finite-orbits", check_finite_orbits, needs_orbits=False),
    Check("fixed-linear-forms", check_fixed_forms, needs_orbits=False),
    Check("sign-symmetric-sums", check_sign_symmetric_sums, needs_orbits=False,
          applies=lambda rs: rs.kind.family in CLASSICAL),
    Check("pair-sums", check_pair_sums, needs_orbits=False,
          applies=lambda rs: rs.kind.family in CLASSICAL),
    Check("ring-homomorphism", check_ring_hom, needs_orbits=False),
    Check("basis-change-top-degree", check_basis_change, needs_orbits=False,
          applies=lambda rs: rs.rank <= 3),
    Check("orbit-character-sums", check_orbit_character_sums),
    Check("quadratic-invariance", check_quadratic_invariance),
    Check("phi-routes", check_phi_routes),
    Check("invariant-ranks", check_invariant_ranks),
    Check("degree-4-identities", check_identities, applies=lambda rs: rs.kind.family in CLASSICAL),
    Check("dynkin-routes", check_dynkin_routes),
    Check("exponent-report", check_exponent_report),
]


def run_checks(rs: RootSystem, seed: int = 0, cap: int = 10**5,
               only: Optional[set] = None) -> list[CheckResult]:
    """Run every applicable check on ``rs``; each gets its own seeded RNG."""
    out = []
    gate_ok = True
    for chk in CHECKS:
        if only is not None and chk.name not in only and chk.name != "finite-orbits":
            continue
        if not chk.applies(rs):
            continue
        if chk.needs_orbits and not gate_ok:
            out.append(CheckResult(rs.name, chk.name, False, "not run: finite-orbits failed"))
            continue
        rng = random.Random(f"{seed}:{rs.name}:{chk.name}")
        try:
            detail = chk.fn(rs, rng, cap)
            out.append(CheckResult(rs.name, chk.name, True, detail or ""))
        except Exception as exc:  # a failing check must not stop the suite
            out.append(CheckResult(rs.name, chk.name, False, f"{type(exc).__name__}: {exc}"))
            if chk.name == "finite-orbits":
                gate_ok = False
    return out


def run_suite(kinds=DEFAULT_SCOPE, seed: int = 0, cap: int = 10**5,
              only: Optional[set] = None) -> list[CheckResult]:
    results = []
    for k in kinds:
        rs = k if isinstance(k, RootSystem) else build(k)
        results.extend(run_checks(rs, seed, cap, only))
    return results
