"""Tests for reflection group construction and invariants."""

import pytest
import sympy

from cherednik import CyclicGroup, ReflectionGroup, build_group, degrees, poincare_polynomial
from cherednik.exceptions import OrderCapExceeded, UnsupportedType
from cherednik.groups import (
    conjugation_check,
    coxeter_matrix,
    degree_table,
    maximal_parabolics,
    q_integer,
    reflections,
    stabilizer,
    standard_parabolic,
)

q = sympy.Symbol("q")


def real(spec: str) -> ReflectionGroup:
    group = build_group(spec)
    assert isinstance(group, ReflectionGroup)
    return group


class TestBuildGroup:
    @pytest.mark.parametrize(
        ("spec", "order", "n_reflections"),
        [
            ("A1", 2, 1),
            ("A2", 6, 3),
            ("A3", 24, 6),
            ("S3", 6, 3),
            ("B2", 8, 4),
            ("B3", 48, 9),
            ("D4", 192, 12),
            ("I2(3)", 6, 3),
            ("I2(4)", 8, 4),
            ("I2(6)", 12, 6),
        ],
    )
    def test_orders(self, spec: str, order: int, n_reflections: int) -> None:
        group = real(spec)
        assert group.order == order
        assert len(reflections(group)) == n_reflections

    def test_classes(self) -> None:
        assert real("A2").n_classes == 1
        assert real("B2").n_classes == 2
        assert real("I2(6)").n_classes == 2
        assert real("D4").n_classes == 1

    def test_cyclic(self) -> None:
        group = build_group("Zm:5")
        assert isinstance(group, CyclicGroup)
        assert group.reflection_exponents == (1, 2, 3, 4)
        assert degrees(group) == [5]

    @pytest.mark.parametrize("spec", ["E7", "I2(5)", "Zm:1", "B1", "X3"])
    def test_unsupported(self, spec: str) -> None:
        with pytest.raises(UnsupportedType):
            build_group(spec)

    def test_order_cap(self) -> None:
        with pytest.raises(OrderCapExceeded, match="more than 10"):
            build_group("B3", order_cap=10)

    def test_group_law(self) -> None:
        group = real("A3")
        for w in range(group.order):
            assert group.multiply(w, group.inverse(w)) == 0
            assert group.element_of_word(group.canonical_word(w)) == w
        assert max(group.length(w) for w in range(group.order)) == 6

    def test_reflection_class_is_conjugation_stable(self) -> None:
        for spec in ("A3", "B2", "I2(6)"):
            assert conjugation_check(real(spec)) is None


class TestDegrees:
    @pytest.mark.parametrize(
        ("spec", "expected"),
        [
            ("A1", [2]),
            ("A2", [2, 3]),
            ("S4", [2, 3, 4]),
            ("B2", [2, 4]),
            ("B3", [2, 4, 6]),
            ("D4", [2, 4, 4, 6]),
            ("I2(6)", [2, 6]),
        ],
    )
    def test_built_groups(self, spec: str, expected: list[int]) -> None:
        assert degrees(real(spec)) == expected

    def test_table_lookup(self) -> None:
        assert degrees("E7") == [2, 6, 8, 10, 12, 14, 18]
        assert degree_table()["E7/D6"] == (2, 4, 6, 6, 8, 10)

    def test_poincare_polynomial(self) -> None:
        poly = poincare_polynomial(real("A2"))
        assert poly.as_expr() == 1 + 2 * q + 2 * q**2 + q**3
        assert poly == q_integer(2) * q_integer(3)
        assert poincare_polynomial(CyclicGroup(4)) == q_integer(4)


class TestParabolics:
    def test_coxeter_matrix(self) -> None:
        assert coxeter_matrix(real("B2")) == [[1, 4], [4, 1]]
        a3 = coxeter_matrix(real("A3"))
        assert a3[0][1] == 3
        assert a3[0][2] == 2

    def test_maximal_parabolics(self) -> None:
        orders = [sub.order for sub in maximal_parabolics(real("A3"))]
        assert orders == [6, 4, 6]

    def test_standard_parabolic_label(self) -> None:
        sub = standard_parabolic(real("B3"), [1, 2])
        assert sub.label == "B3[2,3]"
        assert sub.order == 8

    def test_stabilizer(self) -> None:
        a2 = real("A2")
        assert stabilizer(a2, [1, 1, 0]).order == 2
        assert stabilizer(a2, [0, 0, 0]).order == 6
        assert stabilizer(a2, [3, 2, 1]).order == 1
