import itertools
import json
import os
from math import gcd

import pytest

from weylexp.exponents import (
    ExponentReport,
    compute_report,
    dynkin_index_orbit,
    dynkin_index_via_q,
    exponent_tau,
    exponent_tau_in_basis,
    h2_tau2,
    image_lattice_L,
    is_w_invariant,
    target_lattice_M,
    torsion_bounds,
    verify_identities,
)
from weylexp.lattice import random_unimodular
from weylexp.phi import ConsistencyError
from weylexp.rootsys import build, orbit
from oracles import orbit_pairing_oracle
from weylexp.scalar import SQRT5, GoldenInt, is_associate

large = pytest.mark.skipif(os.environ.get("WEYLEXP_RUN_LARGE") != "1", reason="set WEYLEXP_RUN_LARGE=1")


# lattices ---------------------------------------------------------------------

def test_image_lattice_examples():
    a1 = build("A1")
    L = image_lattice_L(a1, 2)
    assert L.basis == [[1]]
    a2 = build("A2")
    L2 = image_lattice_L(a2, 2)
    assert L2.rank == 1 and L2.basis == [[1, -1, 1]]


def test_target_lattice_examples():
    for name in ["A2", "B3", "G2"]:
        assert target_lattice_M(build(name), 2).rank == 1
    assert target_lattice_M(build("B3"), 3).rank == 3
    # A2 in degree 4: monomials * q (3 of them) plus w_k * cubic (2) minus the relation-free overlap
    M = target_lattice_M(build("A2"), 4)
    assert M.rank == 5


def test_exponent_examples():
    a3, b3 = build("A3"), build("B3")
    assert [exponent_tau(a3, i) for i in (2, 3, 4)] == [1, 1, 1]
    assert exponent_tau(b3, 4) == 2
    assert exponent_tau(build("F4"), 2) == 6
    assert exponent_tau(a3, 0) == 1 and exponent_tau(a3, 1) == 1


def test_basis_probe_agrees_on_small_types():
    import random

    rng = random.Random(4)
    for name in ["A2", "B2", "G2", "B3"]:
        rs = build(name)
        B = random_unimodular(rs.rank, rng)
        assert [exponent_tau_in_basis(rs, i, B) for i in (2, 3, 4)] == [exponent_tau(rs, i) for i in (2, 3, 4)]


# Dynkin indices -------------------------------------------------------------------

def test_dynkin_examples():
    for n in range(1, 6):
        assert dynkin_index_orbit(build(f"A{n}"), 0) == 1
    b3 = build("B3")
    assert dynkin_index_orbit(b3, 0) == 2
    assert dynkin_index_via_q(build("A2"), 0) == 1
    for n in (2, 3, 4):
        assert dynkin_index_via_q(build(f"B{n}"), 0) == 2


def test_b3_adjoint_orbit_versus_full_character():
    # W(e1 + e2) is the 12 long roots; the 6 short roots and zero weights are not in it
    b3 = build("B3")
    assert len(orbit(b3, (0, 1, 0))) == 12
    assert dynkin_index_orbit(b3, 1) == 8
    theta = (1, 1, 0)
    longs = [v for v in itertools.product((-1, 0, 1), repeat=3) if sum(map(abs, v)) == 2]
    shorts = [v for v in itertools.product((-1, 0, 1), repeat=3) if sum(map(abs, v)) == 1]
    pair = lambda v: sum(a * b for a, b in zip(v, theta))
    assert sum(pair(v) ** 2 for v in longs) // 2 == 8
    assert sum(pair(v) ** 2 for v in longs + shorts) // 2 == 10


def test_g2_long_root_orbit():
    g2 = build("G2")
    assert dynkin_index_orbit(g2, 0) == 2
    assert dynkin_index_orbit(g2, 1) == 6
    assert dynkin_index_via_q(g2, 1) == 6


@pytest.mark.parametrize("name", ["A3", "B2", "B4", "C3", "C4", "D4", "G2", "F4", "E6"])
def test_dynkin_routes_match_form_oracle(name):
    rs = build(name)
    for j in range(rs.rank):
        expected = orbit_pairing_oracle(rs, j)
        assert dynkin_index_orbit(rs, j) == expected
        assert dynkin_index_via_q(rs, j) == expected


@large
@pytest.mark.large
@pytest.mark.parametrize("name,expected", [("E7", 12), ("E8", 60)])
def test_large_dynkin_gcd(name, expected):
    rs = build(name)
    g = 0
    for j in range(rs.rank):
        g = gcd(g, dynkin_index_orbit(rs, j))
    assert g == expected


# torsion bounds --------------------------------------------------------------------

def test_torsion_examples():
    assert torsion_bounds(build("A4")) == ({3: 2, 4: 6}, None)
    assert torsion_bounds(build("B4")) == ({3: 4, 4: 12}, (72, 8))
    assert torsion_bounds(build("D4"))[1] == (72, 8)
    assert torsion_bounds(build("G2"), {3: 2, 4: 2}) == ({3: 4, 4: 12}, None)


def test_torsion_bound_assertion_for_orthogonal_types():
    with pytest.raises(ConsistencyError):
        torsion_bounds(build("B3"), {3: 2, 4: 4})


# reports --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def b3_report():
    return compute_report("B3")


def test_report_b3(b3_report):
    rep = b3_report
    assert rep.tau == {0: 1, 1: 1, 2: 2, 3: 2, 4: 2}
    assert rep.dynkin_per_weight == {1: 2, 2: 8, 3: 2}
    assert rep.dynkin_gcd == 2
    assert rep.torsion_bounds == {3: 4, 4: 12}
    assert rep.ch4_constants == (72, 8)
    assert set(rep.containment) == {1, 2, 3, 4}


def test_report_json_round_trip(b3_report):
    d = b3_report.to_dict()
    text = json.dumps(d, sort_keys=True)
    back = ExponentReport.from_dict(json.loads(text))
    assert back == b3_report
    assert "timings" not in d and d["schema"] == 1


def test_report_schema_guard():
    with pytest.raises(ValueError):
        ExponentReport.from_dict({"schema": 2})


def test_report_check_rejects_broken_chain():
    rep = ExponentReport("X", 1, tau={0: 1, 1: 1, 2: 2, 3: 3})
    with pytest.raises(ConsistencyError):
        rep.check()
    rep = ExponentReport("X", 1, tau={0: 1, 1: 2})
    with pytest.raises(ConsistencyError):
        rep.check()
    rep = ExponentReport("X", 1, tau={0: 1, 1: 1}, dynkin_per_weight={1: 4, 2: 6}, dynkin_gcd=1)
    with pytest.raises(ConsistencyError):
        rep.check()


def test_compute_report_guards():
    with pytest.raises(ValueError):
        compute_report("H2")
    with pytest.raises(ValueError):
        compute_report("E7")
    with pytest.raises(ValueError):
        compute_report("A2", max_degree=5)


def test_lower_max_degree():
    rep = compute_report("G2", max_degree=2)
    assert rep.tau == {0: 1, 1: 1, 2: 2}
    assert rep.torsion_bounds == {}


# H2 ------------------------------------------------------------------------------

def test_h2():
    rep = h2_tau2()
    tau = GoldenInt(0, 1)
    assert rep.tau2 == GoldenInt(-1, 2)
    assert rep.is_sqrt5 and is_associate(rep.tau2, SQRT5)
    assert rep.form.terms == {(2, 0): 1 + tau * tau, (0, 2): 1 + tau * tau, (1, 1): -(2 * tau + tau * tau)}
    assert rep.form_omega2 == rep.form
    assert is_w_invariant(build("H2"), rep.form)
    d = rep.to_dict()
    assert d["tau2"] == {"a": -1, "b": 2, "display": "-1+2*tau"}


# degree-4 identities -----------------------------------------------------------------

@pytest.mark.parametrize("name", ["A2", "A3", "A4", "A5", "B2", "B3", "B4", "C2", "C3", "C4", "D4"])
def test_identities_hold(name):
    results = verify_identities(build(name))
    assert results and all(r.ok for r in results), [(r.name, str(r.diff)) for r in results if not r.ok]


def test_identity_degeneration_for_a2():
    names = [r.name for r in verify_identities(build("A2"))]
    assert "A2: 2*q4 = q2^2" in names


def test_identities_reject_exceptional():
    with pytest.raises(ValueError):
        verify_identities(build("G2"))
