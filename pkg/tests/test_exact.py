"""Tests for exact scalars, polynomials and rational functions."""

from fractions import Fraction

import pytest
import sympy
from sympy.polys.domains import QQ

from cherednik import CoordinateRing, RationalFn
from cherednik.exact import (
    divide_exact_by_linear,
    exponents_of_degree,
    exponents_up_to_degree,
    format_scalar,
    poly_arith,
    scalar_field,
    substitute,
    to_scalar,
)
from cherednik.exceptions import NotDivisible, PoleAtPoint, VariableMismatch, ZeroDenominator


class TestScalars:
    def test_rational_text(self) -> None:
        assert format_scalar(to_scalar("3/6", QQ), QQ) == "1/2"
        assert format_scalar(to_scalar(Fraction(-4, 2), QQ), QQ) == "-2"

    def test_quadratic_field(self) -> None:
        dom = scalar_field(2)
        r = to_scalar(sympy.sqrt(2), dom)
        assert r * r == to_scalar(2, dom)
        assert format_scalar(to_scalar(1 + 3 * sympy.sqrt(2), dom), dom) == "1+3*sqrt(2)"
        assert format_scalar(-r, dom) == "-sqrt(2)"

    def test_floats_are_rejected(self) -> None:
        with pytest.raises(TypeError, match="not exact"):
            to_scalar(0.5, QQ)
        with pytest.raises(TypeError):
            to_scalar(True, QQ)


class TestMPoly:
    def test_text_form(self) -> None:
        space = CoordinateRing(2, params=("c",))
        x1, x2 = space.xs()
        c = space.param("c")
        assert (c * x1 * (x1 + x2)).to_text() == "c*x1^2+c*x1*x2"
        assert (x1 - x2 * Fraction(3, 2)).to_text() == "x1-3/2*x2"
        assert space.zero().to_text() == "0"

    def test_parse_matches_arithmetic(self) -> None:
        space = CoordinateRing(2)
        x1, x2 = space.xs()
        assert space.parse("x1^2 - 3/2*x2") == x1**2 - x2 * Fraction(3, 2)
        with pytest.raises(ValueError, match="cannot read"):
            space.parse("x3 +")

    def test_degrees_and_parts(self) -> None:
        space = CoordinateRing(2, params=("c",))
        x1, x2 = space.xs()
        c = space.param("c")
        f = c * c * x1 + x1 * x2**2 + 1
        assert f.x_degree() == 3
        assert f.param_degree() == 2
        assert f.homogeneous_part(3) == x1 * x2**2
        assert not f.is_homogeneous()
        assert f.constant_term() == 1

    def test_mixed_rings_are_rejected(self) -> None:
        a = CoordinateRing(2).x(0)
        b = CoordinateRing(3).x(0)
        with pytest.raises(VariableMismatch):
            _ = a + b
        with pytest.raises(VariableMismatch, match="variable sets differ"):
            poly_arith(a, b, "mul")

    def test_subs_params_and_evaluate(self) -> None:
        space = CoordinateRing(2, params=("c",))
        x1, x2 = space.xs()
        f = space.param("c") * x1 + x2
        g = f.subs_params({"c": Fraction(1, 2)})
        assert g.space.params == ()
        assert g.to_text() == "1/2*x1+x2"
        assert f.evaluate([2, 3], {"c": Fraction(1, 2)}) == to_scalar(4, QQ)
        with pytest.raises(ValueError, match="missing parameter"):
            f.subs_params({})
        assert substitute(f, {"c": 1}, [1, 1]) == to_scalar(2, QQ)

    def test_substitute_linear_swaps(self) -> None:
        space = CoordinateRing(2)
        x1, x2 = space.xs()
        one = QQ.one
        swap = [[QQ.zero, one], [one, QQ.zero]]
        assert (x1**2 * x2).substitute_linear(swap) == x2**2 * x1

    def test_exponent_orders(self) -> None:
        assert exponents_of_degree(2, 2) == [(2, 0), (1, 1), (0, 2)]
        assert len(exponents_up_to_degree(3, 2)) == 10


class TestDivision:
    def test_exact_quotient(self) -> None:
        space = CoordinateRing(2)
        x1, x2 = space.xs()
        assert divide_exact_by_linear(x1**2 - x2**2, x1 - x2) == x1 + x2

    def test_remainder_is_reported(self) -> None:
        space = CoordinateRing(2)
        x1, _ = space.xs()
        with pytest.raises(NotDivisible) as info:
            divide_exact_by_linear(x1**2 + 1, x1)
        assert info.value.remainder == 1


class TestRationalFn:
    def test_cross_multiplied_equality(self) -> None:
        space = CoordinateRing(2)
        x1, x2 = space.xs()
        f = RationalFn(x1**2 - x2**2, x1 - x2)
        assert f == x1 + x2
        assert f.as_poly() == x1 + x2
        assert (f - (x1 + x2)).is_zero

    def test_arithmetic_and_derivative(self) -> None:
        space = CoordinateRing(1)
        x = space.x(0)
        inv = RationalFn(space.one(), x)
        assert inv * x == 1
        assert inv.diff_x(0) == RationalFn(-space.one(), x * x)
        assert (inv + inv).to_text() == "(2)/(x1)"

    def test_poles_and_zero_denominators(self) -> None:
        space = CoordinateRing(2)
        x1, x2 = space.xs()
        f = RationalFn(x1, x1 - x2)
        with pytest.raises(PoleAtPoint):
            f.evaluate([1, 1])
        with pytest.raises(ZeroDenominator):
            RationalFn(x1, space.zero())
        with pytest.raises(ZeroDenominator):
            _ = f / space.zero()
        with pytest.raises(NotDivisible):
            f.as_poly()
