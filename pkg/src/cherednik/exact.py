"""Exact scalars, polynomials and rational functions.

Scalars live in Q or in a real quadratic field Q(sqrt d). Polynomials are
sympy sparse ring elements over that field, in the formal coupling
parameters followed by the coordinates x1..xn (and optionally the momenta
p1..pn), with graded-lex order. ``MPoly`` wraps them with the coordinate
layout so that parameter coefficients, x-degrees and group actions can be
read off directly.

Example:
    >>> space = CoordinateRing(2, params=("c",))
    >>> x1, x2 = space.xs()
    >>> c = space.param("c")
    >>> (c * x1 * (x1 + x2)).to_text()
    'c*x1^2+c*x1*x2'
"""

from __future__ import annotations

import functools
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, TypeAlias

import sympy
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing
from sympy.polys.rings import ring as sympy_ring

from .exceptions import NotDivisible, PoleAtPoint, VariableMismatch, ZeroDenominator

__all__ = [
    "CoordinateRing",
    "Exponents",
    "MPoly",
    "RationalFn",
    "Scalar",
    "divide_exact_by_linear",
    "exponents_of_degree",
    "exponents_up_to_degree",
    "format_scalar",
    "monomials_of_degree",
    "poly_arith",
    "scalar_field",
    "scalar_to_complex",
    "substitute",
    "to_scalar",
]

#: Element of ``scalar_field(d)``: a rational or an a+b*sqrt(d) number.
Scalar: TypeAlias = Any

Exponents: TypeAlias = tuple[int, ...]


@functools.lru_cache(maxsize=None)
def scalar_field(d: int = 1) -> Any:
    """Return Q for ``d == 1`` and Q(sqrt d) otherwise."""
    if d < 1:
        raise ValueError(f"quadratic extension constant must be positive, got {d}")
    if d == 1:
        return QQ
    return QQ.algebraic_field(sympy.sqrt(d))


def to_scalar(value: Any, domain: Any) -> Scalar:
    """Convert ints, Fractions, sympy numbers and numeric strings exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, Fraction):
        return domain.from_sympy(sympy.Rational(value.numerator, value.denominator))
    if isinstance(value, int):
        return domain.from_sympy(sympy.Integer(value))
    if isinstance(value, float):
        raise TypeError("floats are not exact scalars; pass a Fraction or 'p/q'")
    if isinstance(value, str):
        return domain.from_sympy(sympy.sympify(value, rational=True))
    if isinstance(value, sympy.Basic):
        return domain.from_sympy(value)
    return domain.convert(value)


def _rational_text(value: Any) -> str:
    num, den = int(value.numerator), int(value.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def _split_quadratic(value: Scalar, domain: Any) -> tuple[Any, Any]:
    """Return (a, b) with value = a + b*sqrt(d)."""
    if domain == QQ:
        return value, QQ.zero
    rep = value.to_list()
    a = rep[-1] if rep else QQ.zero
    b = rep[-2] if len(rep) > 1 else QQ.zero
    return a, b


@functools.lru_cache(maxsize=None)
def _field_constant(domain: Any) -> int:
    return int(domain.ext.as_expr() ** 2)


def format_scalar(value: Scalar, domain: Any) -> str:
    """Canonical text: ``num/den`` or ``a+b*sqrt(d)``."""
    a, b = _split_quadratic(value, domain)
    if not b:
        return _rational_text(a)
    d = _field_constant(domain)
    if b == 1:
        irrational = f"sqrt({d})"
    elif b == -1:
        irrational = f"-sqrt({d})"
    else:
        irrational = f"{_rational_text(b)}*sqrt({d})"
    if not a:
        return irrational
    sign = "" if irrational.startswith("-") else "+"
    return f"{_rational_text(a)}{sign}{irrational}"


def scalar_to_complex(value: Scalar, domain: Any) -> complex:
    return complex(sympy.N(domain.to_sympy(value), 17))


def exponents_of_degree(nvars: int, degree: int) -> list[Exponents]:
    """Exponent vectors of total ``degree`` in descending lex order."""
    if nvars == 1:
        return [(degree,)]
    return [
        (head, *rest)
        for head in range(degree, -1, -1)
        for rest in exponents_of_degree(nvars - 1, degree - head)
    ]


def exponents_up_to_degree(nvars: int, degree: int) -> list[Exponents]:
    return [e for k in range(degree + 1) for e in exponents_of_degree(nvars, k)]


def monomials_of_degree(space: CoordinateRing, degree: int) -> list[MPoly]:
    """Graded-lex basis of the degree piece of C[x1..xn] inside ``space``."""
    return [space.monomial(e) for e in exponents_of_degree(space.nvars, degree)]


@functools.lru_cache(maxsize=None)
def _poly_ring(names: tuple[str, ...], d: int) -> PolyRing:
    ring, *_ = sympy_ring(",".join(names), scalar_field(d), grlex)
    return ring


@dataclass(frozen=True)
class CoordinateRing:
    """Variable layout shared by every polynomial of one computation.

    Generators are ordered parameters first, then x1..xn, then p1..pn when
    ``momenta`` is set.
    """

    nvars: int
    params: tuple[str, ...] = ()
    sqrt_d: int = 1
    momenta: bool = False

    def __post_init__(self) -> None:
        if self.nvars < 1:
            raise ValueError("a coordinate ring needs at least one variable")

    @property
    def names(self) -> tuple[str, ...]:
        xs = tuple(f"x{i + 1}" for i in range(self.nvars))
        ps = tuple(f"p{i + 1}" for i in range(self.nvars)) if self.momenta else ()
        return (*self.params, *xs, *ps)

    @functools.cached_property
    def ring(self) -> PolyRing:
        return _poly_ring(self.names, self.sqrt_d)

    @property
    def domain(self) -> Any:
        return scalar_field(self.sqrt_d)

    @property
    def x_offset(self) -> int:
        return len(self.params)

    @property
    def p_offset(self) -> int:
        return len(self.params) + self.nvars

    def with_params(self, params: Sequence[str]) -> CoordinateRing:
        return CoordinateRing(self.nvars, tuple(params), self.sqrt_d, self.momenta)

    def without_params(self) -> CoordinateRing:
        return self.with_params(())

    def with_momenta(self, momenta: bool = True) -> CoordinateRing:
        return CoordinateRing(self.nvars, self.params, self.sqrt_d, momenta)

    # === Constructors ===

    def zero(self) -> MPoly:
        return MPoly(self, self.ring.zero)

    def one(self) -> MPoly:
        return MPoly(self, self.ring.one)

    def scalar(self, value: Any) -> MPoly:
        return MPoly(self, self.ring.ground_new(to_scalar(value, self.domain)))

    def x(self, i: int) -> MPoly:
        return MPoly(self, self.ring.gens[self.x_offset + i])

    def xs(self) -> list[MPoly]:
        return [self.x(i) for i in range(self.nvars)]

    def p(self, i: int) -> MPoly:
        if not self.momenta:
            raise ValueError("coordinate ring has no momentum variables")
        return MPoly(self, self.ring.gens[self.p_offset + i])

    def param(self, name: str) -> MPoly:
        return MPoly(self, self.ring.gens[self.params.index(name)])

    def monomial(self, x_exps: Exponents, p_exps: Exponents | None = None) -> MPoly:
        full = [0] * self.ring.ngens
        full[self.x_offset : self.p_offset] = x_exps
        if p_exps is not None:
            full[self.p_offset :] = p_exps
        return MPoly(self, self.ring({tuple(full): self.domain.one}))

    def parse(self, text: str) -> MPoly:
        """Read a polynomial written in this ring's variable names."""
        symbols = {name: sympy.Symbol(name) for name in self.names}
        try:
            expr = sympy.sympify(text.replace("^", "**"), locals=symbols, rational=True)
            return MPoly(self, self.ring.from_expr(expr))
        except (sympy.SympifyError, ValueError, TypeError) as exc:
            raise ValueError(f"cannot read {text!r} as a polynomial in {self.names}") from exc

    def linear_form(self, coefficients: Sequence[Scalar]) -> MPoly:
        """The linear form sum_i a_i x_i for scalar coefficients a_i."""
        gens = self.ring.gens[self.x_offset : self.p_offset]
        elem = self.ring.zero
        for gen, a in zip(gens, coefficients, strict=True):
            if a:
                elem += gen.mul_ground(a)
        return MPoly(self, elem)

    def momentum_form(self, coefficients: Sequence[Scalar]) -> MPoly:
        gens = self.ring.gens[self.p_offset :]
        elem = self.ring.zero
        for gen, a in zip(gens, coefficients, strict=True):
            if a:
                elem += gen.mul_ground(a)
        return MPoly(self, elem)


class MPoly:
    """Polynomial in x (and p) with ParamScalar coefficients.

    A ParamScalar is an ``MPoly`` of x-degree 0; no separate type is needed.
    """

    __slots__ = ("elem", "space")

    def __init__(self, space: CoordinateRing, elem: PolyElement) -> None:
        self.space = space
        self.elem = elem

    # === Arithmetic ===

    def _coerce(self, other: Any) -> PolyElement:
        if isinstance(other, MPoly):
            if other.space != self.space:
                raise VariableMismatch(
                    f"cannot combine polynomials over {self.space.names} "
                    f"and {other.space.names}"
                )
            return other.elem
        return self.space.ring.ground_new(to_scalar(other, self.space.domain))

    def __add__(self, other: Any) -> MPoly:
        return MPoly(self.space, self.elem + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other: Any) -> MPoly:
        return MPoly(self.space, self.elem - self._coerce(other))

    def __rsub__(self, other: Any) -> MPoly:
        return MPoly(self.space, self._coerce(other) - self.elem)

    def __mul__(self, other: Any) -> MPoly:
        if isinstance(other, MPoly):
            return MPoly(self.space, self.elem * self._coerce(other))
        return MPoly(self.space, self.elem.mul_ground(to_scalar(other, self.space.domain)))

    __rmul__ = __mul__

    def __neg__(self) -> MPoly:
        return MPoly(self.space, -self.elem)

    def __pow__(self, exponent: int) -> MPoly:
        return MPoly(self.space, self.elem**exponent)

    def scale(self, value: Scalar) -> MPoly:
        """Multiply by a field element that is already in the scalar domain."""
        if not value:
            return self.space.zero()
        return MPoly(self.space, self.elem.mul_ground(value))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, MPoly):
            return self.space == other.space and self.elem == other.elem
        if isinstance(other, (int, Fraction)):
            return self.elem == self._coerce(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.space, self.elem))

    def __bool__(self) -> bool:
        return bool(self.elem)

    def __repr__(self) -> str:
        return f"MPoly({self.to_text()})"

    @property
    def is_zero(self) -> bool:
        return not self.elem

    # === Structure ===

    def _split(self, monom: Exponents) -> tuple[Exponents, Exponents, Exponents]:
        xo, po = self.space.x_offset, self.space.p_offset
        return monom[:xo], monom[xo:po], monom[po:]

    def x_degree(self) -> int:
        """Total degree in x and p; -1 for the zero polynomial."""
        xo = self.space.x_offset
        return max((sum(m[xo:]) for m in self.elem.itermonoms()), default=-1)

    def param_degree(self) -> int:
        xo = self.space.x_offset
        return max((sum(m[:xo]) for m in self.elem.itermonoms()), default=-1)

    def homogeneous_part(self, degree: int) -> MPoly:
        xo = self.space.x_offset
        parts = {m: c for m, c in self.elem.items() if sum(m[xo:]) == degree}
        return MPoly(self.space, self.space.ring.from_dict(parts))

    def is_homogeneous(self) -> bool:
        xo = self.space.x_offset
        return len({sum(m[xo:]) for m in self.elem.itermonoms()}) <= 1

    def terms(self) -> Iterator[tuple[Exponents, Exponents, Scalar]]:
        """Yield (param exponents, x/p exponents, coefficient) in text order."""
        xo = self.space.x_offset
        items = sorted(
            self.elem.items(),
            key=lambda item: (
                sum(item[0][xo:]),
                item[0][xo:],
                sum(item[0][:xo]),
                item[0][:xo],
            ),
            reverse=True,
        )
        for monom, coeff in items:
            yield monom[:xo], monom[xo:], coeff

    def x_coefficients(self) -> dict[Exponents, MPoly]:
        """Group terms by their x (and p) exponent; values are ParamScalars."""
        xo = self.space.x_offset
        ring = self.space.ring
        grouped: dict[Exponents, dict[Exponents, Scalar]] = {}
        for monom, coeff in self.elem.items():
            pm = monom[:xo] + (0,) * (ring.ngens - xo)
            grouped.setdefault(monom[xo:], {})[pm] = coeff
        return {k: MPoly(self.space, ring.from_dict(v)) for k, v in grouped.items()}

    def scalar_coefficients(self) -> dict[Exponents, Scalar]:
        """Exponent -> Scalar for polynomials free of parameters."""
        xo = self.space.x_offset
        out: dict[Exponents, Scalar] = {}
        for monom, coeff in self.elem.items():
            if any(monom[:xo]):
                raise ValueError("polynomial still depends on formal parameters")
            out[monom[xo:]] = coeff
        return out

    def constant_term(self) -> MPoly:
        return self.homogeneous_part(0)

    # === Calculus ===

    def diff_x(self, i: int) -> MPoly:
        return MPoly(self.space, self.elem.diff(self.space.ring.gens[self.space.x_offset + i]))

    def diff_p(self, i: int) -> MPoly:
        return MPoly(self.space, self.elem.diff(self.space.ring.gens[self.space.p_offset + i]))

    def directional(self, direction: Sequence[Scalar]) -> MPoly:
        """Derivative along a vector of scalars in the x coordinates."""
        result = self.space.ring.zero
        for i, a in enumerate(direction):
            if a:
                result += self.diff_x(i).elem.mul_ground(a)
        return MPoly(self.space, result)

    def substitute_linear(self, matrix: Sequence[Sequence[Scalar]]) -> MPoly:
        """Return f(Mx) (and f(Mx, Mp) when momenta are present)."""
        space = self.space
        ring = space.ring
        pairs = []
        blocks = [space.x_offset]
        if space.momenta:
            blocks.append(space.p_offset)
        for offset in blocks:
            gens = ring.gens[offset : offset + space.nvars]
            for i, row in enumerate(matrix):
                image = ring.zero
                for gen, a in zip(gens, row, strict=True):
                    if a:
                        image += gen.mul_ground(a)
                pairs.append((gens[i], image))
        return MPoly(space, self.elem.compose(pairs))

    # === Substitution ===

    def subs_params(self, values: Mapping[str, Any]) -> MPoly:
        """Substitute rational values for every formal parameter."""
        space = self.space
        missing = set(space.params) - set(values)
        if missing:
            raise ValueError(f"missing parameter values: {sorted(missing)}")
        target = space.without_params()
        domain = space.domain
        point = [to_scalar(values[name], domain) for name in space.params]
        xo = space.x_offset
        out: dict[Exponents, Scalar] = {}
        for monom, coeff in self.elem.items():
            factor = coeff
            for v, e in zip(point, monom[:xo]):
                if e:
                    factor = factor * v**e
            if factor:
                key = monom[xo:]
                out[key] = out.get(key, domain.zero) + factor
        return MPoly(target, target.ring.from_dict({k: v for k, v in out.items() if v}))

    def evaluate(
        self,
        point: Sequence[Any],
        params: Mapping[str, Any] | None = None,
        momenta: Sequence[Any] | None = None,
    ) -> Scalar:
        """Full substitution: parameters, x coordinates and momenta."""
        space = self.space
        domain = space.domain
        params = params or {}
        missing = set(space.params) - set(params)
        if missing:
            raise ValueError(f"missing parameter values: {sorted(missing)}")
        if len(point) != space.nvars:
            raise ValueError(f"point has dimension {len(point)}, expected {space.nvars}")
        values = [to_scalar(params[name], domain) for name in space.params]
        values += [to_scalar(v, domain) for v in point]
        if space.momenta:
            if momenta is None or len(momenta) != space.nvars:
                raise ValueError("momentum values required for this ring")
            values += [to_scalar(v, domain) for v in momenta]
        total = domain.zero
        for monom, coeff in self.elem.items():
            term = coeff
            for v, e in zip(values, monom):
                if e:
                    term = term * v**e
            total += term
        return total

    # === Text ===

    def to_text(self) -> str:
        space = self.space
        names = space.names
        if self.is_zero:
            return "0"
        pieces: list[str] = []
        for pm, xm, coeff in self.terms():
            factors = [
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(names, (*pm, *xm))
                if e
            ]
            coeff_text = format_scalar(coeff, space.domain)
            rational = "sqrt" not in coeff_text
            negative = rational and coeff_text.startswith("-")
            body = coeff_text.lstrip("-") if negative else coeff_text
            if not rational:
                body = f"({body})"
            if factors:
                if body == "1":
                    term = "*".join(factors)
                else:
                    term = body + "*" + "*".join(factors)
            else:
                term = body
            if negative:
                pieces.append("-" + term)
            else:
                pieces.append(("+" if pieces else "") + term)
        return "".join(pieces)


def poly_arith(a: MPoly, b: MPoly, op: str) -> MPoly:
    """Exact ``add``, ``sub`` or ``mul`` of two polynomials over one ring."""
    if a.space != b.space:
        raise VariableMismatch(f"variable sets differ: {a.space.names} vs {b.space.names}")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def divide_exact_by_linear(p: MPoly, form: MPoly) -> MPoly:
    """Return q with q * form == p, raising NotDivisible otherwise."""
    if form.space != p.space:
        raise VariableMismatch("polynomial and linear form live in different rings")
    if form.is_zero:
        raise ValueError("cannot divide by the zero linear form")
    if p.is_zero:
        return p
    (quotient,), remainder = p.elem.div([form.elem])
    if remainder:
        rem = MPoly(p.space, remainder)
        raise NotDivisible(
            f"{p.to_text()} is not divisible by {form.to_text()}", remainder=rem
        )
    return MPoly(p.space, quotient)


@dataclass(frozen=True, eq=False)
class RationalFn:
    """Quotient of two polynomials, compared by cross-multiplication."""

    num: MPoly
    den: MPoly

    def __post_init__(self) -> None:
        if self.den.is_zero:
            raise ZeroDenominator("rational function with zero denominator")
        if self.num.space != self.den.space:
            raise VariableMismatch("numerator and denominator live in different rings")

    @classmethod
    def from_poly(cls, p: MPoly) -> RationalFn:
        return cls(p, p.space.one())

    @property
    def space(self) -> CoordinateRing:
        return self.num.space

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def _lift(self, other: Any) -> RationalFn:
        if isinstance(other, RationalFn):
            return other
        if isinstance(other, MPoly):
            return RationalFn.from_poly(other)
        return RationalFn.from_poly(self.space.scalar(other))

    def __add__(self, other: Any) -> RationalFn:
        o = self._lift(other)
        if self.den == o.den:
            return RationalFn(self.num + o.num, self.den)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> RationalFn:
        return RationalFn(-self.num, self.den)

    def __sub__(self, other: Any) -> RationalFn:
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> RationalFn:
        return self._lift(other) - self

    def __mul__(self, other: Any) -> RationalFn:
        o = self._lift(other)
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> RationalFn:
        o = self._lift(other)
        if o.is_zero:
            raise ZeroDenominator("division by the zero rational function")
        return RationalFn(self.num * o.den, self.den * o.num)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (RationalFn, MPoly, int, Fraction)):
            o = self._lift(other)
            if self.den == o.den:
                return self.num == o.num
            return self.num * o.den == o.num * self.den
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"RationalFn({self.to_text()})"

    def diff_x(self, i: int) -> RationalFn:
        n, d = self.num, self.den
        return RationalFn(n.diff_x(i) * d - n * d.diff_x(i), d * d)

    def diff_p(self, i: int) -> RationalFn:
        n, d = self.num, self.den
        return RationalFn(n.diff_p(i) * d - n * d.diff_p(i), d * d)

    def substitute_linear(self, matrix: Sequence[Sequence[Scalar]]) -> RationalFn:
        return RationalFn(self.num.substitute_linear(matrix), self.den.substitute_linear(matrix))

    def cancel(self) -> RationalFn:
        """Reduce to lowest terms. Never applied implicitly."""
        num, den = self.num.elem.cancel(self.den.elem)
        return RationalFn(MPoly(self.space, num), MPoly(self.space, den))

    def as_poly(self) -> MPoly:
        """Exact polynomial value, or NotDivisible if the quotient has a pole."""
        (quotient,), remainder = self.num.elem.div([self.den.elem])
        if remainder:
            raise NotDivisible(
                f"{self.to_text()} is not a polynomial",
                remainder=MPoly(self.space, remainder),
            )
        return MPoly(self.space, quotient)

    def subs_params(self, values: Mapping[str, Any]) -> RationalFn:
        return RationalFn(self.num.subs_params(values), self.den.subs_params(values))

    def evaluate(
        self,
        point: Sequence[Any],
        params: Mapping[str, Any] | None = None,
        momenta: Sequence[Any] | None = None,
    ) -> Scalar:
        den = self.den.evaluate(point, params, momenta)
        if not den:
            raise PoleAtPoint(f"denominator {self.den.to_text()} vanishes at {list(point)}")
        return self.num.evaluate(point, params, momenta) / den

    def to_text(self) -> str:
        if self.den == 1:
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"


def substitute(
    p: MPoly | RationalFn,
    params: Mapping[str, Any],
    point: Sequence[Any] | None = None,
) -> Any:
    """Substitute parameters, and optionally a point, into p.

    Without a point the result is an MPoly (or RationalFn) over the
    parameter-free ring; with a point it is a Scalar.
    """
    if point is None:
        return p.subs_params(params)
    return p.evaluate(point, params)
