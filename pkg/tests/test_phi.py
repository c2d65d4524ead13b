import random
from fractions import Fraction

import pytest

from weylexp import phi as phimod
from weylexp.lattice import act, normalized_q
from weylexp.phi import (
    ConsistencyError,
    GroupRingElement,
    PowerSumAccumulator,
    characters,
    orbit_sum,
    phi_element,
    phi_exp,
    phi_inverse_gen,
    phi_rho,
    phi_rho_closed_form,
    phi_rho_many,
    phi_rho_series,
    phi_rho_universal,
    phi_universal_exp,
    power_sum,
    reduced_orbit_sum,
    universal_phi,
)
from weylexp.polyring import SparsePoly, parse_poly
from weylexp.rootsys import build, iter_orbit
from weylexp.scalar import GoldenInt

SMALL_TYPES = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C2", "C3", "C4", "D4", "G2", "F4"]


def test_phi_exp_examples():
    assert phi_exp(2, (0, 0), 3).poly == SparsePoly.constant(2, 1)
    assert phi_exp(1, (1,), 3).poly == parse_poly("w1^3 + w1^2 + w1 + 1", 1)
    top = phi_exp(2, (1, 1), 2).homogeneous_component(2)
    assert top == parse_poly("w1^2 + w1*w2 + w2^2", 2)
    assert top == phi_universal_exp((1, 1), 2)


def test_phi_inverse_gen():
    for j in range(3):
        g = phi_inverse_gen(3, j)
        assert g.augmentation() == 0
        assert phi_element(g, 3).homogeneous_component(1) == SparsePoly.variable(3, j)
    prod = phi_inverse_gen(3, 0) * phi_inverse_gen(3, 1)
    img = phi_element(prod, 3)
    assert not img.homogeneous_component(0) and not img.homogeneous_component(1)


@pytest.mark.parametrize("i,expected", [
    (1, {(1,): 1}),
    (2, {(2, 0): 1, (0, 1): 1}),
    (4, {(4, 0, 0, 0): 1, (0, 0, 0, 1): 6, (2, 1, 0, 0): 6, (1, 0, 1, 0): 8, (0, 2, 0, 0): 3}),
])
def test_universal_formula_table(i, expected):
    f = universal_phi(i)
    assert dict(f.scaled) == expected
    assert f.coefficients == {p: Fraction(c, f.denominator) for p, c in expected.items()}


def test_universal_formula_degree_three():
    assert dict(universal_phi(3).scaled) == {(3, 0, 0): 1, (1, 1, 0): 3, (0, 0, 1): 2}


@pytest.mark.parametrize("i", range(0, 7))
def test_universal_matches_series_on_random_weights(i):
    rng = random.Random(i)
    for _ in range(20):
        lam = tuple(rng.randint(-4, 4) for _ in range(3))
        assert phi_universal_exp(lam, i) == phi_exp(3, lam, i).homogeneous_component(i)


def test_integrality_on_random_weights():
    rng = random.Random(3)
    for name in ["A3", "B4", "C3", "D4", "G2", "F4"]:
        n = build(name).rank
        for _ in range(100):
            lam = tuple(rng.randint(-6, 6) for _ in range(n))
            p = phi_exp(n, lam, 4).poly
            assert all(isinstance(c, int) for c in p.terms.values())


def test_phi_rho_examples():
    a2 = build("A2")
    assert phi_rho(a2, (1, 0), 2) == parse_poly("w1^2 - w1*w2 + w2^2", 2)
    for name in ["A3", "B3", "G2", "F4"]:
        rs = build(name)
        for chi in rs.fundamental_weights():
            assert not phi_rho(rs, chi, 1)


def test_phi_rho_h2():
    h2 = build("H2")
    tau = GoldenInt(0, 1)
    expected = SparsePoly(2, {(2, 0): 1 + tau * tau, (0, 2): 1 + tau * tau, (1, 1): -(2 * tau + tau * tau)})
    assert phi_rho(h2, (1, 0), 2) == expected
    assert phi_rho(h2, (0, 1), 2) == expected


def test_closed_form_examples():
    b2 = build("B2")
    assert phi_rho_closed_form(b2, (0, 1), 3) == phi_rho(b2, (0, 1), 3)
    a2 = build("A2")
    diff = phi_rho_closed_form(a2, (1, 0), 3) - phi_rho_closed_form(a2, (0, 1), 3)
    # q3/3 with e1 = w1, e2 = w2 - w1, e3 = -w2
    e = [parse_poly("w1", 2), parse_poly("w2 - w1", 2), parse_poly("-w2", 2)]
    q3 = e[0] ** 3 + e[1] ** 3 + e[2] ** 3
    assert diff == q3.exact_div(3)
    g2 = build("G2")
    assert phi_rho_closed_form(g2, (1, 0), 2) == normalized_q(g2) * 2
    with pytest.raises(ValueError):
        phi_rho_closed_form(a2, (1, 0), 5)


@pytest.mark.parametrize("name", SMALL_TYPES)
def test_four_routes_agree(name):
    rs = build(name)
    for chi in rs.fundamental_weights():
        for i in (2, 3, 4):
            streamed = phi_rho(rs, chi, i)
            assert phi_rho_series(rs, chi, i) == streamed
            assert phi_rho_universal(rs, chi, i) == streamed
            assert phi_rho_closed_form(rs, chi, i) == streamed


@pytest.mark.parametrize("name", ["A2", "B3", "G2", "F4"])
def test_quadratic_image_is_invariant(name):
    rs = build(name)
    for chi in rs.fundamental_weights():
        p = phi_rho(rs, chi, 2)
        assert all(act(rs, k, p) == p for k in range(rs.rank))


@pytest.mark.parametrize("name", SMALL_TYPES)
def test_orbit_character_sums_vanish(name):
    rs = build(name)
    for chi in rs.fundamental_weights():
        for m in range(1, 5):
            assert not power_sum(rs, chi, m)


def test_reduced_orbit_sum():
    rs = build("B2")
    r = reduced_orbit_sum(rs, (1, 0))
    assert r.augmentation() == 0
    assert orbit_sum(rs, (1, 0)).augmentation() == 4
    for i in (1, 2, 3):
        assert phi_element(r, i).homogeneous_component(i) == phi_rho(rs, (1, 0), i)


def test_ring_homomorphism():
    rng = random.Random(11)
    for _ in range(30):
        x = GroupRingElement(2, {(rng.randint(-2, 2), rng.randint(-2, 2)): rng.randint(-3, 3) for _ in range(3)})
        y = GroupRingElement(2, {(rng.randint(-2, 2), rng.randint(-2, 2)): rng.randint(-3, 3) for _ in range(3)})
        assert phi_element(x * y, 4) == phi_element(x, 4) * phi_element(y, 4)


def test_accumulator_merge_is_order_independent():
    rs = build("B3")
    weights = list(iter_orbit(rs, (0, 1, 0)))
    patterns = universal_phi(3).patterns() + [(1, 0, 0)]
    whole = PowerSumAccumulator(3, patterns)
    for lam in weights:
        whole.add(lam)
    a, b = PowerSumAccumulator(3, patterns), PowerSumAccumulator(3, patterns)
    for lam in weights[::2]:
        a.add(lam)
    for lam in reversed(weights[1::2]):
        b.add(lam)
    b.merge(a)
    assert b.count == whole.count == len(weights)
    assert b.combine(universal_phi(3)) == whole.combine(universal_phi(3))
    assert not whole.sums[(1, 0, 0)]


def test_inexact_division_is_a_consistency_error():
    acc = PowerSumAccumulator(1, universal_phi(2).patterns())
    acc.add((1,))
    acc.add((1,))
    acc.sums[(2, 0)].iadd(SparsePoly.variable(1, 0, 1, 2))
    with pytest.raises(ConsistencyError):
        acc.combine(universal_phi(2))


def test_series_route_refuses_golden_weights():
    with pytest.raises(ValueError):
        phi_exp(2, (GoldenInt(0, 1), 0), 2)


def test_disk_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv(phimod.CACHE_ENV, str(tmp_path))
    rs = build("C3")
    phimod._MEMO.clear()
    first = phi_rho_many(rs, (0, 1, 0), [2, 3, 4])
    files = list(tmp_path.rglob("*.txt"))
    assert len(files) == 3
    phimod._MEMO.clear()
    calls = []
    monkeypatch.setattr(phimod, "iter_orbit", lambda *a, **k: calls.append(a) or iter(()))
    assert phi_rho_many(rs, (0, 1, 0), [2, 3, 4]) == first
    assert not calls
    phimod._MEMO.clear()


def test_characters():
    assert characters((2, -1), 2) == [parse_poly("2*w1 - w2", 2), parse_poly("2*w1^2 - w2^2", 2)]


def test_h2_routes_agree_after_scaling():
    h2 = build("H2")
    for chi in h2.fundamental_weights():
        for i in (2, 3, 4):
            streamed = phimod.phi_rho_scaled(h2, chi, i)
            assert phi_rho_series(h2, chi, i, scaled=True) == streamed
            assert phi_rho_universal(h2, chi, i, scaled=True) == streamed
            assert phi_rho_closed_form(h2, chi, i, scaled=True) == streamed
    assert phi_rho_series(h2, (1, 0), 2) == phi_rho(h2, (1, 0), 2)


def test_h2_higher_images_are_not_integral():
    # (1 - w)^(-tau) already has the coefficient (2*tau + 1)/2 in degree 2
    h2 = build("H2")
    with pytest.raises(phimod.NonIntegralImage):
        phi_rho(h2, (1, 0), 3)
    six = phimod.phi_rho_scaled(h2, (1, 0), 3)
    assert six.terms[(2, 1)] == GoldenInt(-3, -9)


def test_scaled_component_matches_series():
    from math import factorial

    rng = random.Random(8)
    for _ in range(50):
        lam = tuple(rng.randint(-4, 4) for _ in range(3))
        i = rng.randint(0, 5)
        scaled = phimod.phi_exp_scaled_component(lam, i)
        assert scaled == phi_exp(3, lam, i).homogeneous_component(i) * factorial(i)
