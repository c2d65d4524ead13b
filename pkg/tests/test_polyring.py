from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from weylexp.polyring import (
    SparsePoly,
    TruncatedPoly,
    binomial_series_coefficient,
    format_poly,
    geometric_power,
    homogeneous_component,
    monomials,
    parse_poly,
    substitute_linear,
)
from weylexp.scalar import GoldenInt

N = 3
small = st.integers(-4, 4)
mono = st.tuples(*[st.integers(0, 3)] * N)
polys = st.dictionaries(mono, small, max_size=6).map(lambda d: SparsePoly(N, d))


def P(text, n=2):
    return parse_poly(text, n)


def test_homogeneous_component_examples():
    p = P("1 + w1 + w1*w2")
    assert homogeneous_component(p, 2) == P("w1*w2")
    assert not homogeneous_component(p, 7)


@given(polys)
def test_components_reconstruct(p):
    total = SparsePoly(N)
    for i in range(p.degree() + 1 if p else 1):
        total.iadd(homogeneous_component(p, i))
    assert total == p


def test_geometric_power_examples():
    assert geometric_power(1, 0, 1, 2).poly == parse_poly("w1^2 + w1 + 1", 1)
    assert geometric_power(1, 0, 0, 4).poly == SparsePoly.constant(1, 1)
    assert geometric_power(1, 0, -1, 5).poly == parse_poly("-w1 + 1", 1)


def _binomial_table(a, k):
    # (1 - x)^(-a): C(a+k-1, k) for a > 0, signed C(|a|, k) for a <= 0
    if a > 0:
        return comb(a + k - 1, k)
    return (-1) ** k * comb(-a, k)


@pytest.mark.parametrize("a", range(-6, 7))
def test_geometric_power_matches_binomial_table(a):
    for cap in range(7):
        g = geometric_power(1, 0, a, cap).poly
        for k in range(cap + 1):
            assert g.terms.get((k,), 0) == _binomial_table(a, k)
            assert binomial_series_coefficient(a, k) == _binomial_table(a, k)


def test_substitute_examples():
    p = P("w1^2")
    x1, x2 = SparsePoly.variable(2, 0), SparsePoly.variable(2, 1)
    assert substitute_linear(p, [x1, x2]) == p
    assert substitute_linear(p, [x1 + x2, x2]) == P("w1^2 + 2*w1*w2 + w2^2")
    with pytest.raises(ValueError):
        substitute_linear(p, [x1 * x1, x2])


@settings(max_examples=60)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == SparsePoly(N)


@settings(max_examples=60)
@given(polys, polys, st.integers(0, 5))
def test_truncated_product(a, b, cap):
    t = TruncatedPoly(a, cap) * TruncatedPoly(b, cap)
    assert t.poly == (a * b).truncate(cap)
    assert all(sum(m) <= cap for m in t.poly.terms)


@given(polys)
def test_text_round_trip(p):
    assert parse_poly(format_poly(p), N) == p


def test_format_examples():
    p = P("3*w1^2*w2 - w2^3 + 5")
    assert format_poly(p) == "3*w1^2*w2 - w2^3 + 5"
    g = SparsePoly(2, {(2, 0): GoldenInt(2, 1), (1, 1): GoldenInt(-1, -3), (0, 2): GoldenInt(0, 1)})
    text = format_poly(g)
    assert text == "(2+1*tau)*w1^2 - (1+3*tau)*w1*w2 + 1*tau*w2^2"
    assert parse_poly(text, 2) == g


def test_no_zero_coefficients_stored():
    p = SparsePoly(2, {(1, 0): 0, (0, 1): 2})
    assert p.terms == {(0, 1): 2}
    assert not (p - p).terms


def test_monomial_basis_is_graded_lex():
    assert monomials(2, 2) == ((2, 0), (1, 1), (0, 2))
    assert len(monomials(4, 4)) == comb(7, 3)


def test_vector_round_trip():
    p = P("w1^2 - 3*w1*w2")
    assert SparsePoly.from_vector(2, 2, p.to_vector(2)) == p
    with pytest.raises(ValueError):
        P("w1 + w2^2").to_vector(2)
