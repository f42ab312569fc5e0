"""Polynomial and Laurent arithmetic."""

from fractions import Fraction

import pytest

from jsdeg.exact import (
    LaurentPoly,
    MPoly,
    PolyParseError,
    parse_laurent,
    parse_poly,
    structure_var,
    structure_var_indices,
)


def test_ring_axioms_small():
    x = MPoly.variable("x")
    y = MPoly.variable("y")
    assert (x + y) * (x - y) == x * x - y * y
    assert (x + 1) ** 3 == x**3 + 3 * x**2 + 3 * x + 1
    assert x - x == MPoly.zero()
    assert (x * 0).is_zero()
    assert MPoly.const(Fraction(2, 3)) * 3 == 2


def test_rational_coefficients_stay_exact():
    x = MPoly.variable("x")
    p = x * Fraction(1, 3) + Fraction(1, 6)
    q = p * 6
    assert q == 2 * x + 1
    assert p.evaluate({"x": Fraction(1, 2)}) == Fraction(1, 3)


def test_substitute_polynomial_values():
    x, y = MPoly.variable("x"), MPoly.variable("y")
    p = x**2 + y
    assert p.substitute({"x": y + 1}) == y**2 + 3 * y + 1
    # untouched variables survive
    assert p.substitute({"y": 0}) == x**2


def test_total_degree_and_constants():
    x, y = MPoly.variable("x"), MPoly.variable("y")
    assert (x**2 * y + x).total_degree() == 3
    assert MPoly.zero().total_degree() == -1
    c = MPoly.const(Fraction(-7, 2))
    assert c.is_constant() and c.constant_value() == Fraction(-7, 2)
    assert (x + 5).constant_term() == 5


def test_equality_ignores_variable_bookkeeping():
    x = MPoly.variable("x")
    y = MPoly.variable("y")
    p = x + y - y  # y disappears again
    assert p == x
    assert hash(p) == hash(x)


def test_parse_poly_roundtrip():
    texts = [
        "x^2 - 2*x + 1",
        "c11^2*c12^1 - 1/2*c22^2",
        "3/4",
        "-x*y + y^3 - 1",
        "(c11^2)^2 - c12^3",
    ]
    for t in texts:
        p = parse_poly(t)
        assert parse_poly(p.to_text()) == p


def test_parse_poly_implicit_products_rejected():
    with pytest.raises(PolyParseError):
        parse_poly("2x")
    with pytest.raises(PolyParseError):
        parse_poly("x +")
    with pytest.raises(PolyParseError):
        parse_poly("")


def test_structure_var_names():
    assert structure_var(1, 2, 3) == "c_1_2_3"
    assert structure_var_indices("c_1_2_3") == (1, 2, 3)
    assert structure_var_indices("x") is None
    # surface syntax maps to the internal name and back
    p = parse_poly("c12^3")
    assert p == MPoly.variable("c_1_2_3")
    assert p.to_text() == "c12^3"
    assert p.to_text(surface=False) == "c_1_2_3"


def test_powered_surface_variable_prints_unambiguously():
    p = parse_poly("c11^2") ** 2
    assert p.to_text() == "(c11^2)^2"
    assert parse_poly(p.to_text()) == p


def test_laurent_orders_and_limits():
    t1 = parse_laurent("t^-1")
    assert t1.order() == -1
    assert t1.limit() is None  # pole
    s = parse_laurent("t^2 + 3*t^5")
    assert s.order() == 2
    assert s.limit() == MPoly.zero()
    c = parse_laurent("5 + t")
    assert c.limit() == MPoly.const(5)
    assert LaurentPoly().is_zero()
    assert LaurentPoly().order() is None


def test_laurent_arithmetic():
    a = parse_laurent("t^-1 + 1")
    b = parse_laurent("t")
    assert a * b == parse_laurent("1 + t")
    assert (a - a).is_zero()
    x = MPoly.variable("x")
    mixed = LaurentPoly.t_power(-2, x) + 1
    assert mixed.coeff(-2) == x
    assert mixed.coeff(0) == MPoly.one()
    assert mixed.leading_coeff() == x


def test_laurent_parse_errors():
    with pytest.raises(PolyParseError):
        parse_laurent("t^")
    with pytest.raises(PolyParseError):
        parse_laurent("q + [")
