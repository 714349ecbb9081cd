"""Tests for Dunkl operators and their identities."""

from fractions import Fraction

import pytest

from cherednik import DunklContext, ReflectionGroup, build_group
from cherednik.dunkl import (
    classical_commutativity_check,
    classical_dunkl_apply,
    classical_op_check,
    commutativity_check,
    commutator_defect,
    dunkl_apply,
    equivariance_check,
    lowest_weight,
    op_restrict,
    pbw_check,
    quantum_op_check,
    reynolds,
    sigma_vanish_check,
    sl2_check,
    verify_dunkl_x_commutator,
)
from cherednik.exceptions import NotInvariant


def context(spec: str, **kwargs: bool) -> DunklContext:
    group = build_group(spec)
    assert isinstance(group, ReflectionGroup)
    return DunklContext.build(group, **kwargs)


class TestDunklContext:
    def test_parameters_per_class(self) -> None:
        assert context("A2").params == ("c",)
        assert context("B2").params == ("c1", "c2")
        assert context("B2", equal_parameters=True).params == ("c",)

    def test_specialize(self) -> None:
        ctx = context("B2").specialize({"c1": Fraction(1, 2), "c2": 3})
        assert ctx.params == ()
        assert {c.to_text() for c in ctx.class_coupling} == {"1/2", "3"}

    def test_lowest_weight(self) -> None:
        ctx = context("A2")
        c = ctx.space.param("c")
        assert lowest_weight(ctx) == ctx.space.scalar(Fraction(3, 2)) - c * 3


class TestDunklApply:
    def test_rank_one_formula(self) -> None:
        ctx = context("A1")
        x = ctx.space.x(0)
        c = ctx.space.param("c")
        # odd powers pick up the reflection term, even powers do not
        assert dunkl_apply(ctx, [1], x**3) == x**2 * 3 - c * x**2 * 2
        assert dunkl_apply(ctx, [1], x**2) == x * 2
        assert dunkl_apply(ctx, [1], x) == ctx.space.one() - c * 2

    def test_constants_are_killed(self) -> None:
        ctx = context("B2")
        assert dunkl_apply(ctx, [1, 0], ctx.space.one()).is_zero

    def test_commutator_defect_vanishes(self) -> None:
        ctx = context("A2")
        f = ctx.space.parse("x1^2*x2 + x3^3")
        assert commutator_defect(ctx, [1, 0, 0], [0, 1, 0], f).is_zero


class TestIdentityChecks:
    @pytest.mark.parametrize("spec", ["A2", "B2", "I2(6)"])
    def test_commutativity(self, spec: str) -> None:
        report = commutativity_check(context(spec), 3)
        assert report.passed
        assert report.max_degree == 3

    def test_equivariance(self) -> None:
        assert equivariance_check(context("A2"), 2).passed

    @pytest.mark.parametrize("spec", ["A2", "B2"])
    def test_sigma_vanishes(self, spec: str) -> None:
        assert sigma_vanish_check(context(spec)).is_zero

    def test_sl2(self) -> None:
        assert sl2_check(context("B2"), 2).passed

    def test_x_commutator(self) -> None:
        report = verify_dunkl_x_commutator(context("A2"), [1, 0, 0], [1, 1, 0], 2)
        assert report.passed
        assert "s1" in report.details["element"]

    def test_quantum_op(self) -> None:
        ctx = context("A2")
        for f in ctx.monomials_up_to(1):
            assert quantum_op_check(ctx, f).passed

    def test_pbw_in_rank_one(self) -> None:
        report = pbw_check(context("A1"), {"c": Fraction(3, 7)})
        assert report.passed
        assert report.details["operators"] == 20


class TestRestriction:
    def test_invariant_input(self) -> None:
        ctx = context("A2")
        r2 = ctx.space.parse("x1^2 + x2^2 + x3^2")
        result = op_restrict(ctx, r2)
        assert result.via_dunkl == result.via_formula

    def test_reynolds_makes_inputs_invariant(self) -> None:
        ctx = context("B2")
        f = reynolds(ctx, ctx.space.parse("x1^4"))
        assert op_restrict(ctx, f).via_dunkl == op_restrict(ctx, f).via_formula

    def test_rejects_non_invariant(self) -> None:
        ctx = context("A2")
        with pytest.raises(NotInvariant):
            op_restrict(ctx, ctx.space.x(0))


class TestClassical:
    def test_needs_momenta(self) -> None:
        ctx = context("A1")
        with pytest.raises(ValueError, match="momenta=True"):
            classical_dunkl_apply(ctx, [1], ctx.space.one())

    def test_commutativity(self) -> None:
        assert classical_commutativity_check(context("A2", momenta=True), 2).passed

    @pytest.mark.parametrize("spec", ["A1", "A2"])
    def test_op_identity(self, spec: str) -> None:
        assert classical_op_check(context(spec, momenta=True)).passed
