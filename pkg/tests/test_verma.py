"""Tests for graded pieces of standard modules."""

from fractions import Fraction

import pytest

from cherednik import DunklContext, ReflectionGroup, build_group
from cherednik.exceptions import NonTerminating, RDivisibleByN, UnsupportedType
from cherednik.verma import (
    character_series,
    contravariant_gram,
    gram_kernel_consistency,
    gram_report,
    power_condition,
    quotient_dimension_search,
    rank1_spectrum,
    rank1_spectrum_float,
    singular_vectors,
    typeA_quotient,
    typeA_singular_vectors,
    typeA_support_membership,
)


def real(spec: str) -> ReflectionGroup:
    group = build_group(spec)
    assert isinstance(group, ReflectionGroup)
    return group


class TestRankOne:
    def test_spectrum_at_half_odd(self) -> None:
        spectrum = rank1_spectrum(2, Fraction(3, 2), 6)
        assert spectrum.b == ["0", "3", "0", "3", "0", "3", "0"]
        assert spectrum.r == 3

    def test_no_finite_quotient_at_integer_c(self) -> None:
        assert rank1_spectrum(2, 1, 8).r is None

    def test_a_is_a_running_product(self) -> None:
        spectrum = rank1_spectrum(2, Fraction(1, 2), 3)
        # b = 0, 1, 0, 1 so a_n = prod (k - b_k)
        assert spectrum.a == ["1", "0", "0", "0"]
        assert spectrum.r == 1

    def test_float_variant_agrees(self) -> None:
        b, r = rank1_spectrum_float(2, [1.5], 6)
        assert r == 3
        assert b[3] == pytest.approx(3.0)

    def test_float_variant_checks_parameter_count(self) -> None:
        with pytest.raises(ValueError, match="expected 2 parameters"):
            rank1_spectrum_float(3, [0.1], 4)

    def test_m_must_be_at_least_two(self) -> None:
        with pytest.raises(ValueError):
            rank1_spectrum(1, 1, 3)


class TestGram:
    def test_at_zero_coupling_is_diagonal_factorials(self) -> None:
        gram = contravariant_gram(real("A2"), 2, equal_parameters=True)
        assert gram.is_symmetric()
        values = gram.specialize({"c": 0})
        diagonal = sorted(values[i][i] for i in range(len(values)))
        assert diagonal == [1, 1, 1, 2, 2, 2]
        assert all(values[i][j] == 0 for i in range(6) for j in range(6) if i != j)

    def test_singular_degree_one_in_rank_one(self) -> None:
        report = gram_report(real("A1"), Fraction(1, 2), 1)
        assert report.gram_rank == 0
        assert report.singular_dim == 1
        assert report.c == "1/2"

    def test_singular_vector_in_degree_r(self) -> None:
        group = real("A1")
        assert gram_report(group, Fraction(3, 2), 3).singular_dim == 1
        assert gram_report(group, Fraction(3, 2), 2).singular_dim == 0

    def test_singular_vectors_need_numbers(self) -> None:
        ctx = DunklContext.build(real("A1"))
        with pytest.raises(ValueError, match="numeric couplings"):
            singular_vectors(ctx, 1)

    def test_kernel_consistency(self) -> None:
        assert gram_kernel_consistency(real("A1"), Fraction(3, 2), 4).passed


class TestQuotientSearch:
    def test_needs_essential_realization(self) -> None:
        with pytest.raises(UnsupportedType, match="essential"):
            quotient_dimension_search(real("A2"), Fraction(1, 3), 3)

    def test_one_dimensional_quotient(self) -> None:
        assert quotient_dimension_search(real("I2(3)"), Fraction(1, 3), 3) == [1]

    def test_generic_c_does_not_terminate(self) -> None:
        assert quotient_dimension_search(real("I2(3)"), Fraction(1, 5), 2) is None


class TestTypeA:
    def test_residue_vectors(self) -> None:
        fs = typeA_singular_vectors(3, 2)
        assert len(fs) == 3
        assert all(f.is_homogeneous() and f.x_degree() == 2 for f in fs)

    def test_residue_vectors_in_two_variables(self) -> None:
        f1, f2 = typeA_singular_vectors(2, 1)
        assert f1.to_text() == "-1/2*x1+1/2*x2"
        assert (f1 + f2).is_zero

    def test_r_divisible_by_n(self) -> None:
        with pytest.raises(RDivisibleByN):
            typeA_singular_vectors(3, 6)

    @pytest.mark.parametrize(
        ("n", "r", "series"),
        [(2, 1, [1]), (3, 1, [1]), (2, 3, [1, 1, 1]), (3, 2, [1, 2, 1])],
    )
    def test_quotient(self, n: int, r: int, series: list[int]) -> None:
        report = typeA_quotient(n, r)
        assert report.hilbert_series == series
        assert report.dim == r ** (n - 1)
        assert report.palindromic
        assert report.frobenius_ok
        assert report.matches_character

    def test_quotient_not_finite_when_gcd_exceeds_one(self) -> None:
        with pytest.raises(NonTerminating):
            typeA_quotient(4, 2, degree_cap=6)

    def test_power_condition(self) -> None:
        assert power_condition([0, 0, 1, 1], 2)
        assert not power_condition([0, 0, 0, 1], 2)
        assert power_condition([Fraction(1, 2)] * 3, 3)

    def test_support_membership(self) -> None:
        assert typeA_support_membership(4, 2, [0, 0, 1, 1])
        assert not typeA_support_membership(4, 2, [0, 1, 2, 3])
        with pytest.raises(ValueError, match="4 coordinates"):
            typeA_support_membership(4, 2, [0, 1])


class TestCharacters:
    def test_identity_series(self) -> None:
        group = real("A1")
        assert character_series(group, "trivial", 0, 4) == [1, 1, 1, 1]

    def test_reflection_series_and_sign(self) -> None:
        group = real("A1")
        assert character_series(group, "trivial", [0], 4) == [1, -1, 1, -1]
        assert character_series(group, "sign", [0], 4) == [-1, 1, -1, 1]
