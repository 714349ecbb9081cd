"""Tests for Hecke algebras and deformed Coxeter rewriting."""

from fractions import Fraction

import pytest
import sympy
from sympy.polys.domains import CC

from cherednik import ReflectionGroup, build_group
from cherednik.exceptions import MoveCapExceeded, UnsupportedType
from cherednik.hecke import (
    DeformedCoxeter,
    HeckeAlgebra,
    classical_specialization_check,
    hecke_algebra_typeA,
    hecke_dim_check,
    hecke_mul_typeA,
    rewrite_canonical,
)


def real(spec: str) -> ReflectionGroup:
    group = build_group(spec)
    assert isinstance(group, ReflectionGroup)
    return group


class TestHeckeAlgebra:
    def test_quadratic_relation(self) -> None:
        algebra = HeckeAlgebra(real("S2"), 2)
        s = algebra.generator(0)
        # T^2 = q + (1 - q) T
        expected = algebra.element({0: 2, algebra.group.generators[0]: -1})
        assert algebra.mul(s, s) == expected

    def test_group_algebra_at_q_one(self) -> None:
        algebra = hecke_algebra_typeA(3, 1)
        for i in range(2):
            s = algebra.generator(i)
            assert algebra.mul(s, s) == algebra.one()

    def test_braid_relation_generic_q(self) -> None:
        algebra = hecke_algebra_typeA(3)
        assert algebra.basis_element((0, 1, 0)) == algebra.basis_element((1, 0, 1))
        assert algebra.dim == 6

    def test_text_form(self) -> None:
        algebra = HeckeAlgebra(real("S2"))
        s = algebra.basis_element((0,))
        assert algebra.mul(s, s).to_text() == "(q)*T[e] + (1 - q)*T[s1]"

    def test_specialize_element(self) -> None:
        algebra = HeckeAlgebra(real("S2"))
        s = algebra.generator(0)
        square = algebra.specialize_element(algebra.mul(s, s), Fraction(1, 3))
        special = algebra.specialize(Fraction(1, 3))
        t = special.generator(0)
        assert square == special.mul(t, t)

    def test_type_a_bounds(self) -> None:
        with pytest.raises(UnsupportedType):
            hecke_algebra_typeA(7)

    def test_mul_needs_generic_coefficients(self) -> None:
        special = hecke_algebra_typeA(3, 2)
        one = special.one()
        with pytest.raises(ValueError, match="Q\\(q\\)"):
            hecke_mul_typeA(3, one, one)


class TestDimensionCheck:
    def test_exhaustive_for_s3(self) -> None:
        report = hecke_dim_check(3, Fraction(3, 2))
        assert report.passed
        assert report.details["dim"] == 6
        assert report.details["associativity_triples"] == 216

    def test_sampled_for_s4(self) -> None:
        report = hecke_dim_check(4, Fraction(-2, 5), samples=40, seed=1)
        assert report.passed
        assert report.details["associativity_triples"] == 40

    def test_size_limit(self) -> None:
        with pytest.raises(ValueError, match="n <= 5"):
            hecke_dim_check(6, 1)


class TestRewriting:
    def test_canonical_words_are_fixed(self) -> None:
        group = real("A2")
        engine = DeformedCoxeter(group)
        for w in range(group.order):
            assert engine.rewrite(group.words[w]).coeffs == {w: engine.one}

    def test_squares_cancel(self) -> None:
        group = real("B2")
        result = rewrite_canonical(group, (1, 1, 0, 0))
        assert list(result.coeffs) == [0]
        assert result.to_text() == "(1)*T[e]"

    @pytest.mark.parametrize("spec", ["A2", "B2"])
    def test_classical_specialization(self, spec: str) -> None:
        report = classical_specialization_check(real(spec))
        assert report.passed
        assert report.details["pairs"] == real(spec).order ** 2

    def test_deformed_braid_move(self) -> None:
        group = real("A2")
        engine = DeformedCoxeter(group)
        result = engine.rewrite((1, 0, 1))
        t1, t2, t3 = sympy.symbols("t12_1 t12_2 t12_3")
        e1, e2, e3 = t1 + t2 + t3, t1 * t2 + t1 * t3 + t2 * t3, t1 * t2 * t3
        expected = {(0, 1, 0): 1 / e3, (0,): -e1 / e3, (1,): e2 / e3}
        got = {group.words[w]: engine.domain.to_sympy(c) for w, c in result.coeffs.items()}
        assert got.keys() == expected.keys()
        for word, coeff in expected.items():
            assert sympy.simplify(got[word] - coeff) == 0

    def test_specialized_coefficients_live_in_cc(self) -> None:
        group = real("A2")
        result = DeformedCoxeter.classical(group).rewrite((1, 0, 1))
        assert result.domain == CC
        longest = group.element_of_word((0, 1, 0))
        assert list(result.coeffs) == [longest]
        assert abs(complex(result.coefficient(longest)) - 1) < 1e-12

    def test_move_cap(self) -> None:
        with pytest.raises(MoveCapExceeded):
            rewrite_canonical(real("A2"), (0, 0), move_cap=0)

    def test_order_limit(self) -> None:
        with pytest.raises(UnsupportedType, match="order <= 48"):
            rewrite_canonical(real("D4"), (0,))

    def test_specialization_values_are_validated(self) -> None:
        with pytest.raises(ValueError, match="no value given"):
            DeformedCoxeter(real("A2"), values={})
