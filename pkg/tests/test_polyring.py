from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lecalc.errors import InputError, ParseError
from lecalc.polyring import (
    DEGREVLEX,
    LEX,
    Poly,
    Ring,
    block_order,
    dehomogenize,
    determinant,
    format_poly,
    homogenize,
    jacobian,
    linear_change,
    order_from_name,
    parse_poly,
    partial_derivative,
)

XYZ = Ring(("x", "y", "z"))
P4 = Ring(tuple(f"x{i}" for i in range(5)))


def P(text: str, ring: Ring = XYZ) -> Poly:
    return parse_poly(text, ring)


# -- parsing ---------------------------------------------------------------


def test_parse_two_terms():
    f = P("y^2 - x^2*z")
    assert len(f.terms) == 2
    assert f.terms[(0, 2, 0)] == 1
    assert f.terms[(2, 0, 1)] == -1


def test_parse_single_monomial_in_five_vars():
    f = P("x0*x1", P4)
    assert f.terms == {(1, 1, 0, 0, 0): 1}


def test_parse_cancellation_gives_zero():
    assert P("3/2*x - 3/2*x").is_zero()


def test_parse_rational_coefficients_and_constants():
    f = P("-1/2*x*y + 7 - 4/6")
    assert f.terms == {(1, 1, 0): Fraction(-1, 2), (0, 0, 0): Fraction(19, 3)}


def test_parse_whitespace_insignificant():
    assert P(" x ^ 2  *y+ 1 ") == P("x^2*y+1")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("x + w", "unknown variable"),
        ("1/0*x", "zero denominator"),
        ("x +* y", ""),
        ("x^", ""),
        ("", ""),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        P(text)
    assert fragment in str(info.value)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        P("x + w")
    assert info.value.position == 4


def test_format_examples():
    assert format_poly(P("3/2*x^2*y - y + 1")) == "3/2*x^2*y - y + 1"
    assert format_poly(P("0")) == "0"
    assert format_poly(P("-x")) == "-x"


# -- derivatives -----------------------------------------------------------


def test_partial_derivative_examples():
    assert partial_derivative(P("x^2*y"), 0) == P("2*x*y")
    assert partial_derivative(P("y^2 - x^2*z"), 1) == P("2*y")
    assert partial_derivative(P("5"), 0).is_zero()


def test_partial_derivative_index_out_of_range():
    with pytest.raises(IndexError):
        partial_derivative(P("x"), 3)


def test_jacobian_of_umbrella():
    assert jacobian(P("y^2 - x^2*z")) == [P("-2*x*z"), P("2*y"), P("-x^2")]


# -- linear changes --------------------------------------------------------


def test_linear_change_examples():
    xy = Ring(("x", "y"))
    x = parse_poly("x", xy)
    assert linear_change(x, [[1, 0], [0, 1]]) == x
    assert linear_change(x, [[0, 1], [1, 0]]) == parse_poly("y", xy)
    f = parse_poly("x^2 + y^2", xy)
    # (x+y)^2 + y^2
    assert linear_change(f, [[1, 1], [0, 1]]) == parse_poly("x^2 + 2*x*y + 2*y^2", xy)


def test_linear_change_rejects_singular():
    with pytest.raises(InputError):
        linear_change(P("x"), [[1, 1, 0], [1, 1, 0], [0, 0, 1]])


def test_determinant():
    assert determinant([[2, 1], [1, 1]]) == 1
    assert determinant([[1, 2, 3], [4, 5, 6], [7, 8, 9]]) == 0


# -- homogenization --------------------------------------------------------


def test_homogenize_example():
    xy = Ring(("x", "y"))
    g = homogenize(parse_poly("x^2 + y", xy), "w")
    assert g.ring.names == ("x", "y", "w")
    assert g == parse_poly("x^2 + y*w", g.ring)


def test_dehomogenize_plane_pair_chart():
    f = dehomogenize(P("x0*x1", P4), 4)
    assert f.ring.names == ("x0", "x1", "x2", "x3")
    assert f.terms == {(1, 1, 0, 0): 1}


def test_dehomogenize_then_homogenize_roundtrip():
    f = P("x0^3 - x1*x2*x4 + 2*x3^2*x4", P4)
    g = homogenize(dehomogenize(f, 4), "x4")
    assert g == f


# -- orders ----------------------------------------------------------------


def test_order_names():
    assert order_from_name("lex") is LEX
    assert order_from_name("degrevlex") is DEGREVLEX
    assert order_from_name("block(1)").name == "block(1)"
    with pytest.raises(InputError):
        order_from_name("grevlex-ish")


def test_degrevlex_known_ranking():
    # x^2 > xy > y^2 > xz > yz > z^2 in degree 2
    monos = [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)]
    assert sorted(monos, key=DEGREVLEX.key, reverse=True) == monos


@pytest.mark.parametrize("order", [LEX, DEGREVLEX, block_order(1), block_order(2)])
def test_orders_total_and_multiplicative(order):
    monos = [e for e in itertools.product(range(5), repeat=3) if sum(e) <= 4]
    keys = {e: order.key(e) for e in monos}
    assert len(set(keys.values())) == len(monos)
    small = [e for e in monos if sum(e) <= 2]
    for a, b in itertools.combinations(monos, 2):
        if keys[a] > keys[b]:
            a, b = b, a
        for c in small:
            ac = tuple(i + j for i, j in zip(a, c))
            bc = tuple(i + j for i, j in zip(b, c))
            assert order.key(ac) < order.key(bc)


# -- properties ------------------------------------------------------------

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exps = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(exps, coeffs, max_size=5).map(lambda t: Poly(XYZ, t))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert f * (g + h) == f * g + f * h
    assert f * g == g * f
    assert f - f == XYZ.zero()


@settings(max_examples=60, deadline=None)
@given(polys, polys, st.integers(0, 2))
def test_leibniz_rule(f, g, i):
    assert (f * g).diff(i) == f.diff(i) * g + f * g.diff(i)


@settings(max_examples=60, deadline=None)
@given(polys)
def test_parse_format_roundtrip(f):
    assert parse_poly(format_poly(f), XYZ) == f


@settings(max_examples=40, deadline=None)
@given(polys)
def test_derivative_lowers_degree_in_variable(f):
    for i in range(3):
        d = f.diff(i)
        if not d.is_zero():
            assert d.degree_in(i) == f.degree_in(i) - 1
