"""Dunkl operators and the identities they satisfy.

Operators are represented extensionally, as functions on polynomials.
Every identity is certified on all monomials up to a degree cap with the
coupling parameters kept as formal symbols, which is enough because each
identity is polynomial in finitely many coefficients per degree.
"""

from __future__ import annotations

import functools
import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .exact import (
    CoordinateRing,
    MPoly,
    RationalFn,
    Scalar,
    divide_exact_by_linear,
    exponents_up_to_degree,
    monomials_of_degree,
    to_scalar,
)
from .exceptions import IdentityViolation, NotInvariant
from .groups import Matrix, ReflectionData, ReflectionGroup, pairing
from .models import CheckReport

__all__ = [
    "DunklContext",
    "GroupAlgebraElement",
    "RestrictionResult",
    "apply_in_dunkl",
    "classical_commutativity_check",
    "classical_dunkl_apply",
    "classical_op_check",
    "commutativity_check",
    "commutator_defect",
    "dunkl_apply",
    "dunkl_powers",
    "dunkl_x_commutator",
    "equivariance_check",
    "grading_apply",
    "lowest_weight",
    "op_integrals_check",
    "op_restrict",
    "pbw_check",
    "quantum_op_check",
    "reynolds",
    "sigma_vanish_check",
    "sl2_check",
    "verify_dunkl_x_commutator",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class _Term:
    data: ReflectionData
    form: MPoly
    coupling: MPoly


@dataclass(frozen=True, eq=False)
class DunklContext:
    """A group, a coordinate ring and one coupling per reflection class.

    Couplings are either formal parameters of ``space`` or, after
    ``specialize``, rational constants.
    """

    group: ReflectionGroup
    space: CoordinateRing
    class_coupling: tuple[MPoly, ...]

    @classmethod
    def build(
        cls,
        group: ReflectionGroup,
        *,
        equal_parameters: bool = False,
        momenta: bool = False,
        values: Mapping[str, Any] | None = None,
    ) -> DunklContext:
        """Context with parameter ``c`` (one class or equal parameters)
        or ``c1..cp`` (one per class). ``values`` specialises them."""
        if equal_parameters or group.n_classes <= 1:
            names = ("c",)
            per_class = ("c",) * group.n_classes
        else:
            names = tuple(f"c{i + 1}" for i in range(group.n_classes))
            per_class = names
        space = group.space(names, momenta=momenta)
        ctx = cls(group, space, tuple(space.param(n) for n in per_class))
        return ctx.specialize(values) if values is not None else ctx

    def specialize(self, values: Mapping[str, Any]) -> DunklContext:
        """Substitute rational values for all couplings."""
        target = self.space.without_params()
        couplings = tuple(c.subs_params(values) for c in self.class_coupling)
        return DunklContext(self.group, target, couplings)

    @property
    def params(self) -> tuple[str, ...]:
        return self.space.params

    @property
    def domain(self) -> Any:
        return self.space.domain

    @property
    def dim(self) -> int:
        return self.group.dim

    @functools.cached_property
    def terms(self) -> tuple[_Term, ...]:
        return tuple(
            _Term(r, self.space.linear_form(r.root), self.class_coupling[r.class_id])
            for r in self.group.reflection_data
        )

    @functools.cached_property
    def delta(self) -> MPoly:
        """delta = product of the positive roots as linear forms."""
        out = self.space.one()
        for t in self.terms:
            out = out * t.form
        return out

    @functools.cached_property
    def delta_over_root(self) -> tuple[MPoly, ...]:
        return tuple(divide_exact_by_linear(self.delta, t.form) for t in self.terms)

    def basis(self, i: int) -> tuple[Scalar, ...]:
        dom = self.domain
        return tuple(dom.one if j == i else dom.zero for j in range(self.dim))

    def vector(self, direction: Sequence[Any]) -> tuple[Scalar, ...]:
        return tuple(to_scalar(a, self.domain) for a in direction)

    def act(self, w: int, f: MPoly) -> MPoly:
        """(w.f)(x) = f(w^-1 x)."""
        return f.substitute_linear(self.group.elements[self.group.inverse(w)])

    def monomials(self, degree: int) -> list[MPoly]:
        return monomials_of_degree(self.space, degree)

    def monomials_up_to(self, degree: int) -> list[MPoly]:
        return [self.space.monomial(e) for e in exponents_up_to_degree(self.dim, degree)]


# === Quantum Dunkl operators ===


def dunkl_apply(ctx: DunklContext, direction: Sequence[Any], f: MPoly) -> MPoly:
    """D_a f = d_a f - sum_s c_s alpha_s(a) (f - s f) / alpha_s."""
    a = ctx.vector(direction)
    result = f.directional(a)
    for term in ctx.terms:
        weight = pairing(term.data.root, a, ctx.domain)
        if not weight:
            continue
        diff = f - f.substitute_linear(term.data.matrix)
        if diff.is_zero:
            continue
        quotient = divide_exact_by_linear(diff, term.form)
        result = result - quotient * term.coupling.scale(weight)
    return result


def commutator_defect(
    ctx: DunklContext, a: Sequence[Any], b: Sequence[Any], f: MPoly
) -> MPoly:
    """(D_a D_b - D_b D_a) f, identically zero."""
    return dunkl_apply(ctx, a, dunkl_apply(ctx, b, f)) - dunkl_apply(
        ctx, b, dunkl_apply(ctx, a, f)
    )


def commutativity_check(ctx: DunklContext, max_degree: int) -> CheckReport:
    """Commutator defect on every monomial of degree <= max_degree."""
    pairs = [(i, j) for i in range(ctx.dim) for j in range(i + 1, ctx.dim)]
    for f in ctx.monomials_up_to(max_degree):
        for i, j in pairs:
            defect = commutator_defect(ctx, ctx.basis(i), ctx.basis(j), f)
            if not defect.is_zero:
                return CheckReport.from_witness(
                    "dunkl-commutativity",
                    ctx.group.label,
                    f"[D{i + 1},D{j + 1}]({f.to_text()}) = {defect.to_text()}",
                    max_degree=max_degree,
                )
    logger.info("Dunkl operators of %s commute up to degree %d", ctx.group.label, max_degree)
    return CheckReport.from_witness(
        "dunkl-commutativity", ctx.group.label, None, max_degree=max_degree
    )


def equivariance_check(ctx: DunklContext, max_degree: int) -> CheckReport:
    """w . D_a (w^-1 . f) == D_{wa} f for all w, basis a, monomials f."""
    group = ctx.group
    for w in range(group.order):
        w_inv = group.inverse(w)
        for i in range(ctx.dim):
            a = ctx.basis(i)
            wa = group.act(w, a)
            for f in ctx.monomials_up_to(max_degree):
                lhs = ctx.act(w, dunkl_apply(ctx, a, ctx.act(w_inv, f)))
                rhs = dunkl_apply(ctx, wa, f)
                if lhs != rhs:
                    return CheckReport.from_witness(
                        "dunkl-equivariance",
                        group.label,
                        f"w={group.words[w]}, a=e{i + 1}, f={f.to_text()}",
                        max_degree=max_degree,
                    )
    return CheckReport.from_witness(
        "dunkl-equivariance", group.label, None, max_degree=max_degree
    )


# === Group algebra ===


@dataclass(frozen=True, eq=False)
class GroupAlgebraElement:
    """Finite sum of group elements with ParamScalar coefficients."""

    group: ReflectionGroup
    coefficients: Mapping[int, MPoly]

    def __add__(self, other: GroupAlgebraElement) -> GroupAlgebraElement:
        out = dict(self.coefficients)
        for w, c in other.coefficients.items():
            out[w] = out[w] + c if w in out else c
        return GroupAlgebraElement(self.group, {w: c for w, c in out.items() if c})

    def __mul__(self, other: GroupAlgebraElement) -> GroupAlgebraElement:
        out: dict[int, MPoly] = {}
        for g, a in self.coefficients.items():
            for h, b in other.coefficients.items():
                gh = self.group.multiply(g, h)
                out[gh] = out[gh] + a * b if gh in out else a * b
        return GroupAlgebraElement(self.group, {w: c for w, c in out.items() if c})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupAlgebraElement):
            return NotImplemented
        keys = set(self.coefficients) | set(other.coefficients)
        return all(
            (self.coefficients.get(k) or 0) == (other.coefficients.get(k) or 0)
            for k in keys
        )

    __hash__ = None  # type: ignore[assignment]

    def apply(self, ctx: DunklContext, f: MPoly) -> MPoly:
        result = ctx.space.zero()
        for w, c in self.coefficients.items():
            result = result + c * ctx.act(w, f)
        return result

    def to_text(self) -> str:
        parts = []
        for w in sorted(self.coefficients):
            word = "".join(f"s{i + 1}" for i in self.group.words[w]) or "e"
            parts.append(f"({self.coefficients[w].to_text()})*{word}")
        return " + ".join(parts) or "0"


def dunkl_x_commutator(
    ctx: DunklContext, direction: Sequence[Any], x_form: Sequence[Any]
) -> GroupAlgebraElement:
    """[D_a, x] = (a, x) - sum_s c_s (a, alpha_s)(x, alpha_s^vee) s."""
    a, v = ctx.vector(direction), ctx.vector(x_form)
    dom = ctx.domain
    coefficients: dict[int, MPoly] = {}
    const = pairing(a, v, dom)
    if const:
        coefficients[0] = ctx.space.one().scale(const)
    for term in ctx.terms:
        weight = pairing(a, term.data.root, dom) * pairing(v, term.data.coroot, dom)
        if weight:
            coefficients[term.data.element] = -term.coupling.scale(weight)
    return GroupAlgebraElement(ctx.group, coefficients)


def verify_dunkl_x_commutator(
    ctx: DunklContext,
    direction: Sequence[Any],
    x_form: Sequence[Any],
    max_degree: int = 3,
) -> CheckReport:
    element = dunkl_x_commutator(ctx, direction, x_form)
    x = ctx.space.linear_form(ctx.vector(x_form))
    for f in ctx.monomials_up_to(max_degree):
        lhs = dunkl_apply(ctx, direction, x * f) - x * dunkl_apply(ctx, direction, f)
        rhs = element.apply(ctx, f)
        if lhs != rhs:
            return CheckReport.from_witness(
                "dunkl-x-commutator",
                ctx.group.label,
                f"f={f.to_text()}: {lhs.to_text()} != {rhs.to_text()}",
                max_degree=max_degree,
            )
    return CheckReport.from_witness(
        "dunkl-x-commutator",
        ctx.group.label,
        None,
        max_degree=max_degree,
        element=element.to_text(),
    )


# === Grading element and sl2 ===


def lowest_weight(ctx: DunklContext) -> MPoly:
    """h_c(C) = dim/2 - sum_s c_s on the trivial lowest weight."""
    out = ctx.space.scalar(Fraction(ctx.dim, 2))
    for term in ctx.terms:
        out = out - term.coupling
    return out


def grading_apply(ctx: DunklContext, f: MPoly) -> MPoly:
    """h f = sum_i x_i D_i f + (dim/2) f - sum_s c_s s f."""
    result = f * Fraction(ctx.dim, 2)
    for i in range(ctx.dim):
        result = result + ctx.space.x(i) * dunkl_apply(ctx, ctx.basis(i), f)
    for term in ctx.terms:
        result = result - term.coupling * f.substitute_linear(term.data.matrix)
    return result


def _e_op(ctx: DunklContext, f: MPoly) -> MPoly:
    r2 = ctx.space.zero()
    for x in ctx.space.xs():
        r2 = r2 + x * x
    return r2 * f * Fraction(-1, 2)


def _f_op(ctx: DunklContext, f: MPoly) -> MPoly:
    out = ctx.space.zero()
    for i in range(ctx.dim):
        e = ctx.basis(i)
        out = out + dunkl_apply(ctx, e, dunkl_apply(ctx, e, f))
    return out * Fraction(1, 2)


def sl2_check(ctx: DunklContext, max_degree: int = 4) -> CheckReport:
    """[h,x]=x, [h,y]=-y, [E,F]=h, [h,E]=2E, [h,F]=-2F on monomials."""
    h = functools.partial(grading_apply, ctx)
    e_op = functools.partial(_e_op, ctx)
    f_op = functools.partial(_f_op, ctx)
    label = ctx.group.label
    for f in ctx.monomials_up_to(max_degree):
        expected = lowest_weight(ctx) + f.x_degree()
        if h(f) != expected * f:
            return CheckReport.from_witness(
                "sl2", label, f"h({f.to_text()}) is not (h_c+deg)*f", max_degree=max_degree
            )
        for i in range(ctx.dim):
            x = ctx.space.x(i)
            if h(x * f) - x * h(f) != x * f:
                return CheckReport.from_witness(
                    "sl2", label, f"[h,x{i + 1}]({f.to_text()})", max_degree=max_degree
                )
            y = functools.partial(dunkl_apply, ctx, ctx.basis(i))
            if h(y(f)) - y(h(f)) != -y(f):
                return CheckReport.from_witness(
                    "sl2", label, f"[h,y{i + 1}]({f.to_text()})", max_degree=max_degree
                )
        checks = {
            "[E,F]=h": (e_op(f_op(f)) - f_op(e_op(f)), h(f)),
            "[h,E]=2E": (h(e_op(f)) - e_op(h(f)), e_op(f) * 2),
            "[h,F]=-2F": (h(f_op(f)) - f_op(h(f)), f_op(f) * -2),
        }
        for name, (lhs, rhs) in checks.items():
            if lhs != rhs:
                return CheckReport.from_witness(
                    "sl2", label, f"{name} fails on {f.to_text()}", max_degree=max_degree
                )
    return CheckReport.from_witness("sl2", label, None, max_degree=max_degree)


# === Olshanetsky-Perelomov operators ===


@dataclass(frozen=True)
class RestrictionResult:
    via_dunkl: MPoly
    via_formula: MPoly


def _assert_invariant(ctx: DunklContext, f: MPoly) -> None:
    for g in ctx.group.generators:
        if f.substitute_linear(ctx.group.elements[g]) != f:
            raise NotInvariant(f"{f.to_text()} is not {ctx.group.label}-invariant")


def _laplacian(ctx: DunklContext, f: MPoly) -> MPoly:
    out = ctx.space.zero()
    for i in range(ctx.dim):
        out = out + f.diff_x(i).diff_x(i)
    return out


def op_restrict(ctx: DunklContext, f: MPoly) -> RestrictionResult:
    """m(sum D_i^2) f and Hbar f = Laplacian f - sum c_s (a,a)/a_s d_(a^vee) f.

    Raises:
        NotInvariant: If f is not invariant.
        IdentityViolation: If the two computations disagree.
    """
    _assert_invariant(ctx, f)
    via_dunkl = ctx.space.zero()
    for i in range(ctx.dim):
        e = ctx.basis(i)
        via_dunkl = via_dunkl + dunkl_apply(ctx, e, dunkl_apply(ctx, e, f))
    via_formula = _laplacian(ctx, f)
    for term in ctx.terms:
        root = term.data.root
        norm = pairing(root, root, ctx.domain)
        grad = f.directional(term.data.coroot)
        via_formula = via_formula - divide_exact_by_linear(grad, term.form) * (
            term.coupling.scale(norm)
        )
    if via_dunkl != via_formula:
        raise IdentityViolation(
            "m(sum D^2) differs from Hbar",
            witness=f"{via_dunkl.to_text()} != {via_formula.to_text()}",
        )
    return RestrictionResult(via_dunkl, via_formula)


def sigma_vanish_check(ctx: DunklContext) -> RationalFn:
    """sum_{s != u} c_s c_u (alpha_s, alpha_u) / (alpha_s alpha_u) over delta."""
    terms = ctx.terms
    dom = ctx.domain
    num = ctx.space.zero()
    for i, s in enumerate(terms):
        for j, u in enumerate(terms):
            if i == j:
                continue
            weight = pairing(s.data.root, u.data.root, dom)
            if not weight:
                continue
            rest = divide_exact_by_linear(ctx.delta_over_root[i], u.form)
            num = num + rest * (s.coupling * u.coupling).scale(weight)
    return RationalFn(num, ctx.delta)


def _log_delta_gradient(ctx: DunklContext) -> list[RationalFn]:
    """d_i log delta_c = sum_s c_s alpha_s(e_i) / alpha_s, over delta."""
    out = []
    for i in range(ctx.dim):
        num = ctx.space.zero()
        for k, t in enumerate(ctx.terms):
            weight = t.data.root[i]
            if weight:
                num = num + ctx.delta_over_root[k] * t.coupling.scale(weight)
        out.append(RationalFn(num, ctx.delta))
    return out


def quantum_op_check(ctx: DunklContext, f: MPoly) -> CheckReport:
    """delta_c^-1 Hbar delta_c f == (Laplacian - sum c(c+1)(a,a)/a^2) f.

    Both sides are multiplied through by delta^2 and compared as polynomials.
    """
    big_g = [g.num for g in _log_delta_gradient(ctx)]
    dom = ctx.domain
    delta = ctx.delta
    lhs = ctx.space.zero()
    for i in range(ctx.dim):
        u = delta * f.diff_x(i) + big_g[i] * f
        lhs = lhs + delta * u.diff_x(i) - u * delta.diff_x(i) + big_g[i] * u
    rhs = delta * delta * _laplacian(ctx, f)
    for k, t in enumerate(ctx.terms):
        root = t.data.root
        norm = pairing(root, root, dom)
        q = ctx.delta_over_root[k]
        shift = ctx.space.zero()
        for i, g in enumerate(big_g):
            if root[i]:
                shift = shift + g.scale(root[i])
        drift = delta * f.directional(t.data.coroot) + shift * f
        lhs = lhs - q * drift * t.coupling.scale(norm)
        rhs = rhs - q * q * f * (t.coupling * (t.coupling + 1)).scale(norm)
    witness = None if lhs == rhs else f"conjugated Hbar differs from H on {f.to_text()}"
    return CheckReport.from_witness(
        "quantum-op", ctx.group.label, witness, max_degree=f.x_degree()
    )


def dunkl_powers(ctx: DunklContext, f: MPoly) -> Callable[[tuple[int, ...]], MPoly]:
    """Memoized exps -> D^exps f; each power reuses the one a step below."""
    cache: dict[tuple[int, ...], MPoly] = {(0,) * ctx.dim: f}

    def power(exps: tuple[int, ...]) -> MPoly:
        if exps in cache:
            return cache[exps]
        i = next(k for k, e in enumerate(exps) if e)
        lower = (*exps[:i], exps[i] - 1, *exps[i + 1 :])
        cache[exps] = dunkl_apply(ctx, ctx.basis(i), power(lower))
        return cache[exps]

    return power


def apply_in_dunkl(ctx: DunklContext, poly: MPoly, f: MPoly) -> MPoly:
    """P(D) f for a polynomial P read in the Dunkl operators."""
    power = dunkl_powers(ctx, f)
    out = ctx.space.zero()
    for exps, coeff in poly.x_coefficients().items():
        out = out + coeff * power(exps)
    return out


def reynolds(ctx: DunklContext, f: MPoly) -> MPoly:
    """Average of f over the group."""
    out = ctx.space.zero()
    for w in range(ctx.group.order):
        out = out + ctx.act(w, f)
    return out * Fraction(1, ctx.group.order)


def op_integrals_check(
    ctx: DunklContext, invariants: Sequence[MPoly], test_functions: Iterable[MPoly]
) -> CheckReport:
    """The operators m(P(D)) preserve invariants and commute pairwise."""
    label = ctx.group.label
    for f in test_functions:
        _assert_invariant(ctx, f)
        images = [apply_in_dunkl(ctx, p, f) for p in invariants]
        for p, image in zip(invariants, images, strict=True):
            try:
                _assert_invariant(ctx, image)
            except NotInvariant:
                return CheckReport.from_witness(
                    "op-integrals", label, f"{p.to_text()}(D) breaks invariance"
                )
        for i, p in enumerate(invariants):
            for j in range(i + 1, len(invariants)):
                q = invariants[j]
                lhs = apply_in_dunkl(ctx, p, images[j])
                rhs = apply_in_dunkl(ctx, q, images[i])
                if lhs != rhs:
                    return CheckReport.from_witness(
                        "op-integrals",
                        label,
                        f"[{p.to_text()}(D), {q.to_text()}(D)] != 0 on {f.to_text()}",
                    )
    return CheckReport.from_witness("op-integrals", label, None)


# === PBW spot check ===


def _as_domain_matrix(rows: list[list[Scalar]], domain: Any) -> DomainMatrix:
    ncols = len(rows[0]) if rows else 0
    if domain != QQ and all(
        len(e.to_list()) <= 1 for row in rows for e in row if e
    ):
        rows = [[e.to_list()[0] if e else QQ.zero for e in row] for row in rows]
        domain = QQ
    return DomainMatrix(rows, (len(rows), ncols), domain)


def pbw_check(
    ctx: DunklContext,
    values: Mapping[str, Any],
    *,
    max_order: int = 3,
    input_degree: int = 6,
) -> CheckReport:
    """Linear independence of g D^m x^n, |m|+|n| <= max_order, as maps.

    Independence at one generic rational parameter implies independence
    over the field of rational functions in the parameters.
    """
    num = ctx.specialize(values) if ctx.params else ctx
    group = num.group
    inputs = num.monomials_up_to(input_degree)
    exps = exponents_up_to_degree(2 * num.dim, max_order)
    columns: dict[tuple[int, tuple[int, ...]], int] = {}
    images: list[dict[tuple[int, tuple[int, ...]], Scalar]] = []
    for w in range(group.order):
        for e in exps:
            d_exps, x_exps = e[: num.dim], e[num.dim :]
            x_mon = num.space.monomial(x_exps)
            d_mon = num.space.monomial(d_exps)
            row: dict[tuple[int, tuple[int, ...]], Scalar] = {}
            for k, f in enumerate(inputs):
                image = num.act(w, apply_in_dunkl(num, d_mon, x_mon * f))
                for mono, coeff in image.scalar_coefficients().items():
                    key = (k, mono)
                    columns.setdefault(key, len(columns))
                    row[key] = coeff
            images.append(row)
    dom = num.domain
    dense = [[row.get(key, dom.zero) for key in columns] for row in images]
    rank = _as_domain_matrix(dense, dom).rank() if dense and columns else 0
    witness = None if rank == len(images) else f"rank {rank} < {len(images)} operators"
    return CheckReport.from_witness(
        "pbw",
        group.label,
        witness,
        max_degree=input_degree,
        operators=len(images),
        rank=rank,
    )


# === Classical (t = 0) operators ===


def _reflect(f: MPoly, matrix: Matrix) -> MPoly:
    return f.substitute_linear(matrix)


def _semi_invariance_sign(den: MPoly, matrix: Matrix) -> int:
    image = _reflect(den, matrix)
    if image == den:
        return 1
    if image == -den:
        return -1
    raise ValueError(f"denominator {den.to_text()} is not semi-invariant")


def classical_dunkl_apply(
    ctx: DunklContext, direction: Sequence[Any], f: MPoly | RationalFn
) -> RationalFn:
    """D0_a F = p_a F - sum_s c_s alpha_s(a) (F - sF) / alpha_s.

    s acts on x and p simultaneously. (1 - s)F is not divisible by
    alpha_s(x) once p enters, so the result is a RationalFn; denominators
    stay powers of delta so that results compare numerator to numerator.
    """
    if not ctx.space.momenta:
        raise ValueError("classical operators need a context built with momenta=True")
    a = ctx.vector(direction)
    fn = f if isinstance(f, RationalFn) else RationalFn.from_poly(f)
    num, den = fn.num, fn.den
    delta = ctx.delta
    p_a = ctx.space.momentum_form(a)
    out = p_a * num * delta
    for k, term in enumerate(ctx.terms):
        weight = pairing(term.data.root, a, ctx.domain)
        if not weight:
            continue
        sign = _semi_invariance_sign(den, term.data.matrix)
        diff = num - _reflect(num, term.data.matrix) * sign
        if diff.is_zero:
            continue
        out = out - diff * ctx.delta_over_root[k] * term.coupling.scale(weight)
    return RationalFn(out, den * delta)


def classical_commutativity_check(ctx: DunklContext, max_degree: int) -> CheckReport:
    pairs = [(i, j) for i in range(ctx.dim) for j in range(i + 1, ctx.dim)]
    space = ctx.space
    for exps in exponents_up_to_degree(2 * ctx.dim, max_degree):
        f = space.monomial(exps[: ctx.dim], exps[ctx.dim :])
        for i, j in pairs:
            a, b = ctx.basis(i), ctx.basis(j)
            ab = classical_dunkl_apply(ctx, a, classical_dunkl_apply(ctx, b, f))
            ba = classical_dunkl_apply(ctx, b, classical_dunkl_apply(ctx, a, f))
            if ab != ba:
                return CheckReport.from_witness(
                    "classical-commutativity",
                    ctx.group.label,
                    f"[D0_{i + 1},D0_{j + 1}]({f.to_text()}) != 0",
                    max_degree=max_degree,
                )
    return CheckReport.from_witness(
        "classical-commutativity", ctx.group.label, None, max_degree=max_degree
    )


def _shift_momenta(ctx: DunklContext, fn: RationalFn, shifts: Sequence[MPoly]) -> RationalFn:
    """Substitute p_i -> p_i + shifts_i / delta in a RationalFn.

    Each p-homogeneous part N_j of the numerator becomes
    N_j(x, delta p + shift) / delta^j; everything is brought to delta^k.
    """
    space = ctx.space
    ring = space.ring
    po = space.p_offset
    delta = ctx.delta
    parts: dict[int, dict[tuple[int, ...], Any]] = {}
    for monom, coeff in fn.num.elem.items():
        parts.setdefault(sum(monom[po:]), {})[monom] = coeff
    top = max(parts, default=0)
    p_gens = ring.gens[po:]
    pairs = [
        (gen, gen * delta.elem + shift.elem)
        for gen, shift in zip(p_gens, shifts, strict=True)
    ]
    num = ring.zero
    for j, terms in parts.items():
        shifted = ring.from_dict(terms).compose(pairs)
        num += shifted * delta.elem ** (top - j)
    return RationalFn(MPoly(space, num), fn.den * delta**top)


def classical_op_check(ctx: DunklContext) -> CheckReport:
    """m(theta_c(sum (D0_i)^2)) == H0 = p^2 - sum c_s^2 (a,a)/alpha_s^2."""
    space = ctx.space
    one = space.one()
    hbar0 = RationalFn.from_poly(space.zero())
    for i in range(ctx.dim):
        e = ctx.basis(i)
        hbar0 = hbar0 + classical_dunkl_apply(ctx, e, classical_dunkl_apply(ctx, e, one))
    shifts = [g.num for g in _log_delta_gradient(ctx)]
    h0_theta = _shift_momenta(ctx, hbar0, shifts)
    delta = ctx.delta
    p2 = space.zero()
    for i in range(ctx.dim):
        p2 = p2 + space.p(i) * space.p(i)
    num = p2 * delta * delta
    for k, t in enumerate(ctx.terms):
        root = t.data.root
        norm = pairing(root, root, ctx.domain)
        q = ctx.delta_over_root[k]
        num = num - q * q * (t.coupling * t.coupling).scale(norm)
    h0 = RationalFn(num, delta * delta)
    witness = None if h0_theta == h0 else f"{h0_theta.to_text()} != {h0.to_text()}"
    return CheckReport.from_witness("classical-op", ctx.group.label, witness)
