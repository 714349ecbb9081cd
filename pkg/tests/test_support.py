"""Tests for the degree-count support criterion."""

from fractions import Fraction

import pytest

from cherednik import ReflectionGroup, build_group
from cherednik.exceptions import MissingParabolicTable
from cherednik.support import (
    CSV_HEADER,
    criterion_table,
    divisible_degree_count,
    e7_table,
    finite_dim_criterion,
    finite_dim_denominators,
    monotonicity_check,
    parabolic_degree_entries,
    quotient_consistency_check,
    stratum_in_support,
    support_report,
)


def real(spec: str) -> ReflectionGroup:
    group = build_group(spec)
    assert isinstance(group, ReflectionGroup)
    return group


class TestCounts:
    def test_divisible_degree_count(self) -> None:
        assert divisible_degree_count([2, 4, 6], 2) == 3
        assert divisible_degree_count([2, 4, 6], 4) == 1
        with pytest.raises(ValueError, match="positive"):
            divisible_degree_count([2], 0)

    def test_stratum_in_support(self) -> None:
        assert stratum_in_support([2, 3], [2], Fraction(1, 2))
        assert not stratum_in_support([2, 3], [2], Fraction(1, 3))
        # integer c: everything
        assert stratum_in_support([2, 3], [], 4)

    def test_sign_of_c_is_ignored(self) -> None:
        assert stratum_in_support([2, 3], [2], Fraction(-1, 2))
        assert finite_dim_criterion(real("A2"), Fraction(-1, 3))


class TestFiniteDimensionality:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_symmetric_groups(self, n: int) -> None:
        assert finite_dim_denominators(f"S{n}", 12) == {n}

    def test_e7(self) -> None:
        assert e7_table() == {2, 6, 14, 18}

    def test_integer_c_never_qualifies(self) -> None:
        assert not finite_dim_criterion(real("B2"), 1)

    def test_coxeter_number_always_qualifies(self) -> None:
        # the largest degree is the Coxeter number
        for spec, h in (("B3", 6), ("D4", 6), ("I2(6)", 6)):
            assert finite_dim_criterion(real(spec), Fraction(1, h))

    def test_table_parabolics(self) -> None:
        labels = [entry.label for entry in parabolic_degree_entries("E7")]
        assert len(labels) == 7
        assert "E7/E6" in labels

    def test_noncrystallographic_parabolics(self) -> None:
        entries = {e.label: e.degrees for e in parabolic_degree_entries("H3")}
        assert entries["H3/I2(5)"] == (2, 5)
        assert len(entries) == 3

    def test_missing_parabolic_rows(self) -> None:
        with pytest.raises(MissingParabolicTable):
            finite_dim_criterion("X9", Fraction(1, 2))


class TestReports:
    def test_support_report(self) -> None:
        report = support_report(real("A2"), Fraction(1, 3))
        assert report.m == 3
        assert report.deg_count == 1
        assert report.strata_in_support == ["A2[1,2]"]
        assert report.finite_dim

    def test_half_is_not_finite_for_a2(self) -> None:
        report = support_report(real("A2"), Fraction(1, 2))
        assert not report.finite_dim
        assert "A2[1]" in report.strata_in_support

    def test_criterion_table_rows(self) -> None:
        rows = criterion_table(real("A2"), [Fraction(1, 3), Fraction(1, 2)])
        # four standard parabolics per value
        assert len(rows) == 8
        assert all(len(row) == len(CSV_HEADER) for row in rows)
        assert rows[0][:3] == ("A2", "1/3", "3")
        assert {row[6] for row in rows} == {"true", "false"}


class TestConsistency:
    @pytest.mark.parametrize("spec", ["A2", "B2", "A3", "B3", "I2(6)"])
    def test_monotonicity(self, spec: str) -> None:
        assert monotonicity_check(real(spec)).passed

    def test_agrees_with_quotient_search(self) -> None:
        assert quotient_consistency_check(real("I2(3)"), [2, 3], 3).passed
