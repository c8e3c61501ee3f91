from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from stable_field_lab.quadratic import QuadraticNumber, parse_rational

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=12)
fields = st.sampled_from([1, 2, 3, 5, 6, 7])


def is_zero(expr) -> bool:
    return abs(sympy.N(expr, 60)) < sympy.Float("1e-45")


def as_sympy(x: QuadraticNumber):
    return sympy.Rational(x.a.numerator, x.a.denominator) + sympy.Rational(
        x.b.numerator, x.b.denominator) * sympy.sqrt(x.D)


@settings(max_examples=60)
@given(fractions, fractions, fractions, fractions, fields)
def test_arithmetic_matches_symbolic(a, b, c, d, D):
    x, y = QuadraticNumber(a, b, D), QuadraticNumber(c, d, D)
    sx, sy = as_sympy(x), as_sympy(y)
    assert is_zero(as_sympy(x + y) - (sx + sy))
    assert is_zero(as_sympy(x * y) - sx * sy)
    if y:
        assert is_zero(as_sympy(x / y) - sx / sy)


@settings(max_examples=60)
@given(fractions, fractions, fractions, fractions, fields)
def test_order_matches_symbolic(a, b, c, d, D):
    x, y = QuadraticNumber(a, b, D), QuadraticNumber(c, d, D)
    diff = as_sympy(x) - as_sympy(y)
    assert (x < y) == bool(diff < 0)
    assert (x == y) == is_zero(diff)
    assert abs(x).sign() >= 0


def test_sqrt2_facts():
    r2 = QuadraticNumber(0, 1, 2)
    assert r2 * r2 == 2
    assert QuadraticNumber(1, 0, 2) - r2 < 0
    assert QuadraticNumber(3, -2, 2).sign() == 1   # 3 - 2*sqrt2 > 0
    assert QuadraticNumber(-3, 2, 2).sign() == -1


def test_rational_field_forces_zero_surd():
    x = QuadraticNumber(1, 2, 1)
    assert x.b == 0 and x.a == 3
    with pytest.raises(ValueError):
        QuadraticNumber.from_json({"a": "1", "b": "1"}, 1)


def test_non_squarefree_rejected():
    with pytest.raises(ValueError):
        QuadraticNumber(1, 1, 8)


def test_parse_rational_rejects_floats():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    with pytest.raises(TypeError):
        parse_rational(0.5)
