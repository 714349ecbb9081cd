"""Graded pieces of standard modules with trivial or sign lowest weight.

The standard module M_c(tau) is identified with the polynomial ring, the
Dunkl operators acting as the y's. Everything here is degree-by-degree
linear algebra over Q or Q(sqrt d); formal parameters appear only in the
contravariant Gram matrices.
"""

from __future__ import annotations

import cmath
import functools
import logging
import math
from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Literal

import numpy as np
import sympy
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from .dunkl import DunklContext, dunkl_apply, dunkl_powers
from .exact import (
    CoordinateRing,
    Exponents,
    MPoly,
    Scalar,
    exponents_of_degree,
    format_scalar,
    to_scalar,
)
from .exceptions import (
    IdentityViolation,
    NonTerminating,
    RDivisibleByN,
    UnsupportedType,
)
from .groups import ReflectionGroup, build_group
from .models import CheckReport, GramReport, QuotientReport, Rank1Spectrum

__all__ = [
    "DEFAULT_DEGREE_CAP",
    "GradedPiece",
    "GramMatrix",
    "character_series",
    "character_verma",
    "contravariant_gram",
    "gram_kernel_consistency",
    "gram_report",
    "lowest_weight_exponent",
    "numeric_context",
    "power_condition",
    "quotient_dimension_search",
    "radical_dimensions",
    "rank1_spectrum",
    "rank1_spectrum_float",
    "singular_vectors",
    "typeA_quotient",
    "typeA_singular_vectors",
    "typeA_support_membership",
]

logger = logging.getLogger(__name__)

DEFAULT_DEGREE_CAP = 40

Tau = Literal["trivial", "sign"]

_t = sympy.Symbol("t")


# === Contexts ===


def _twist(ctx: DunklContext, tau: Tau) -> DunklContext:
    """On M_c(sign) the y's act as Dunkl operators with c replaced by -c."""
    if tau == "trivial":
        return ctx
    if tau != "sign":
        raise ValueError(f"lowest weight must be 'trivial' or 'sign', got {tau!r}")
    return DunklContext(ctx.group, ctx.space, tuple(-c for c in ctx.class_coupling))


def numeric_context(
    group: ReflectionGroup,
    c: Any | Mapping[str, Any],
    *,
    tau: Tau = "trivial",
) -> DunklContext:
    """Dunkl context at rational couplings.

    ``c`` is either one value (equal parameters) or a mapping with one
    value per reflection class (``c1``, ``c2``, ...).
    """
    if isinstance(c, Mapping):
        ctx = DunklContext.build(group)
        values = dict(c)
        if ctx.params == ("c",) and "c" not in values and len(values) == 1:
            values = {"c": next(iter(values.values()))}
    else:
        ctx = DunklContext.build(group, equal_parameters=True)
        values = {"c": c}
    return _twist(ctx.specialize(values), tau)


# === Graded pieces ===


@dataclass(frozen=True, eq=False)
class GradedPiece:
    """Degree-d polynomials with their monomial basis."""

    ctx: DunklContext
    degree: int

    @functools.cached_property
    def basis(self) -> list[Exponents]:
        return exponents_of_degree(self.ctx.dim, self.degree) if self.degree >= 0 else []

    @functools.cached_property
    def position(self) -> dict[Exponents, int]:
        return {e: k for k, e in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def group(self) -> ReflectionGroup:
        return self.ctx.group

    @property
    def params(self) -> tuple[str, ...]:
        return self.ctx.params

    def monomial(self, k: int) -> MPoly:
        return self.ctx.space.monomial(self.basis[k])

    def coordinates(self, f: MPoly) -> list[Scalar]:
        dom = self.ctx.domain
        vec = [dom.zero] * self.dim
        for exps, coeff in f.scalar_coefficients().items():
            vec[self.position[exps]] = coeff
        return vec

    def from_coordinates(self, vec: Sequence[Scalar]) -> MPoly:
        space = self.ctx.space
        out = space.zero()
        for k, a in enumerate(vec):
            if a:
                out = out + self.monomial(k).scale(a)
        return out


def _dunkl_block(piece: GradedPiece) -> list[list[Scalar]]:
    """Matrix of f -> (D_1 f, ..., D_r f) from degree d to r copies of d-1."""
    lower = GradedPiece(piece.ctx, piece.degree - 1)
    ctx = piece.ctx
    rows = [[ctx.domain.zero] * piece.dim for _ in range(ctx.dim * lower.dim)]
    for col in range(piece.dim):
        f = piece.monomial(col)
        for i in range(ctx.dim):
            image = lower.coordinates(dunkl_apply(ctx, ctx.basis(i), f))
            for k, a in enumerate(image):
                rows[i * lower.dim + k][col] = a
    return rows


def _matrix(rows: list[list[Scalar]], ncols: int, domain: Any) -> DomainMatrix:
    return DomainMatrix(rows, (len(rows), ncols), domain)


def _kernel(rows: list[list[Scalar]], ncols: int, domain: Any) -> list[list[Scalar]]:
    """Basis of {v : rows . v = 0} as coordinate lists."""
    if not rows:
        return [[domain.one if j == k else domain.zero for j in range(ncols)] for k in range(ncols)]
    return _matrix(rows, ncols, domain).nullspace().to_list()


def _rank(rows: list[list[Scalar]], ncols: int, domain: Any) -> int:
    if not rows or not ncols:
        return 0
    return _matrix(rows, ncols, domain).rank()


# === Contravariant form ===


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """beta_c(x^A, x^B) = (D^B x^A)(0) on one degree piece."""

    piece: GradedPiece
    entries: tuple[tuple[MPoly, ...], ...]

    @property
    def degree(self) -> int:
        return self.piece.degree

    def is_symmetric(self) -> bool:
        n = len(self.entries)
        return all(self.entries[i][j] == self.entries[j][i] for i in range(n) for j in range(i))

    def specialize(self, values: Mapping[str, Any]) -> list[list[Scalar]]:
        return [[_constant(e.subs_params(values)) for e in row] for row in self.entries]

    def rank(self, values: Mapping[str, Any] | None = None) -> int:
        rows = self.specialize(values or {})
        return _rank(rows, len(rows), self.piece.ctx.domain)

    def to_text(self) -> list[list[str]]:
        return [[e.to_text() for e in row] for row in self.entries]


def _constant(p: MPoly) -> Scalar:
    coeffs = p.scalar_coefficients()
    if any(sum(e) for e in coeffs):
        raise ValueError(f"{p.to_text()} is not a constant")
    return next(iter(coeffs.values()), p.space.domain.zero)


def contravariant_gram(
    group: ReflectionGroup | DunklContext,
    degree: int,
    *,
    tau: Tau = "trivial",
    equal_parameters: bool = False,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> GramMatrix:
    """Gram matrix of the contravariant form in one degree.

    Entries are polynomials in the coupling parameters; at c = 0 the matrix
    is diag(A!) in the monomial basis.
    """
    if degree > degree_cap:
        raise ValueError(f"degree {degree} exceeds the configured cap {degree_cap}")
    if isinstance(group, DunklContext):
        ctx = _twist(group, tau)
    else:
        ctx = _twist(DunklContext.build(group, equal_parameters=equal_parameters), tau)
    piece = GradedPiece(ctx, degree)
    rows = []
    for a in piece.basis:
        power = dunkl_powers(ctx, ctx.space.monomial(a))
        rows.append(tuple(power(b).constant_term() for b in piece.basis))
    return GramMatrix(piece, tuple(rows))


def gram_report(
    group: ReflectionGroup, c: Any, degree: int, *, tau: Tau = "trivial"
) -> GramReport:
    """Gram rank and singular-vector count at a rational equal parameter."""
    ctx = numeric_context(group, c, tau=tau)
    gram = contravariant_gram(ctx, degree)
    return GramReport(
        group=group.label,
        tau=tau,
        c=format_scalar(to_scalar(c, QQ), QQ),
        degree=degree,
        gram_rank=gram.rank(),
        singular_dim=len(singular_vectors(ctx, degree)),
    )


# === Singular vectors and the radical ===


def singular_vectors(
    group: ReflectionGroup | DunklContext,
    degree: int,
    c: Any | Mapping[str, Any] | None = None,
) -> list[MPoly]:
    """Basis of the joint kernel of the Dunkl operators in one degree."""
    ctx = group if isinstance(group, DunklContext) else numeric_context(group, c)
    if ctx.params:
        raise ValueError("singular vectors need numeric couplings")
    if degree <= 0:
        return []
    piece = GradedPiece(ctx, degree)
    kernel = _kernel(_dunkl_block(piece), piece.dim, ctx.domain)
    return [piece.from_coordinates(v) for v in kernel]


def _annihilator(basis: list[list[Scalar]], ncols: int, domain: Any) -> list[list[Scalar]]:
    """Rows of a matrix whose kernel is the span of ``basis``."""
    if not basis:
        return [[domain.one if j == k else domain.zero for j in range(ncols)] for k in range(ncols)]
    return _kernel(basis, ncols, domain)


def radical_dimensions(ctx: DunklContext, max_degree: int) -> list[int]:
    """dim J_d for d = 0..max_degree, J_d = {v : D_i v in J_(d-1) for all i}.

    J is the maximal proper graded submodule of M_c(tau); J_0 = 0.
    """
    dom = ctx.domain
    dims = [0]
    previous: list[list[Scalar]] = []
    for d in range(1, max_degree + 1):
        piece = GradedPiece(ctx, d)
        lower_dim = GradedPiece(ctx, d - 1).dim
        phi = _annihilator(previous, lower_dim, dom)
        block = _dunkl_block(piece)
        rows: list[list[Scalar]] = []
        if phi:
            functionals = _matrix(phi, lower_dim, dom)
            for i in range(ctx.dim):
                chunk = _matrix(block[i * lower_dim : (i + 1) * lower_dim], piece.dim, dom)
                rows.extend((functionals * chunk).to_list())
        previous = _kernel(rows, piece.dim, dom)
        dims.append(len(previous))
        logger.debug("%s: dim J_%d = %d", ctx.group.label, d, len(previous))
    return dims


def gram_kernel_consistency(
    group: ReflectionGroup, c: Any | Mapping[str, Any], max_degree: int
) -> CheckReport:
    """Gram rank deficiency equals dim J_d, and singular vectors lie in the kernel."""
    ctx = numeric_context(group, c)
    radical = radical_dimensions(ctx, max_degree)
    deficiency = []
    for d in range(max_degree + 1):
        gram = contravariant_gram(ctx, d)
        rows = gram.specialize({})
        n = len(rows)
        deficiency.append(n - _rank(rows, n, ctx.domain))
        piece = gram.piece
        for v in singular_vectors(ctx, d):
            coords = piece.coordinates(v)
            image = [sum((r[k] * coords[k] for k in range(n)), ctx.domain.zero) for r in rows]
            if any(image):
                return CheckReport.from_witness(
                    "gram-kernel",
                    group.label,
                    f"singular vector {v.to_text()} not in the Gram kernel",
                    max_degree=max_degree,
                )
    witness = None
    if deficiency != radical:
        witness = f"rank deficiency {deficiency} != radical dimensions {radical}"
    return CheckReport.from_witness(
        "gram-kernel",
        group.label,
        witness,
        max_degree=max_degree,
        deficiency=deficiency,
        radical=radical,
    )


def quotient_dimension_search(
    group: ReflectionGroup, c: Any, max_degree: int
) -> list[int] | None:
    """Hilbert series of L_c(triv) if it terminates by ``max_degree``.

    Needs an essential realization (dim == rank): on C^n the symmetric
    group's centre direction never dies, so use I2(3) for A2.
    """
    if group.dim != group.rank:
        raise UnsupportedType(
            f"{group.label} acts on C^{group.dim} with rank {group.rank}; "
            "quotient search needs an essential realization"
        )
    ctx = numeric_context(group, c)
    radical = radical_dimensions(ctx, max_degree)
    series = [GradedPiece(ctx, d).dim - j for d, j in enumerate(radical)]
    if 0 not in series:
        return None
    return series[: series.index(0)]


# === Rank one ===


def _b_equal(m: int, c: Fraction, n: int) -> Fraction:
    return 2 * c * (m * -(-n // m) - n)


def rank1_spectrum(m: int, c: Any, n_max: int) -> Rank1Spectrum:
    """b_n, a_n and the dimension r of L_c for Z/m with equal parameters.

    b_n = 2c (m ceil(n/m) - n), a_n = prod_(k<=n) (k - b_k).
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    c = Fraction(c)
    b = [_b_equal(m, c, n) for n in range(n_max + 1)]
    a = [Fraction(1)]
    for n in range(1, n_max + 1):
        a.append(a[-1] * (n - b[n]))
    r = next((n for n in range(1, n_max + 1) if b[n] == n), None)
    if r is not None and r % m == 0:
        raise IdentityViolation(f"r={r} is divisible by m={m}")
    return Rank1Spectrum(
        m=m,
        c=str(c),
        b=[str(v) for v in b],
        a=[str(v) for v in a],
        r=r,
    )


def rank1_spectrum_float(
    m: int, c_values: Sequence[float], n_max: int, *, tol: float = 1e-10
) -> tuple[np.ndarray, int | None]:
    """b_n = 2 sum_j (1 - l^(jn)) / (1 - l^j) c_j with l = exp(2 pi i / m).

    ``c_values`` holds c_1..c_(m-1). Returns the real parts of b_0..b_n_max
    and the first r with |r - b_r| < tol.
    """
    if len(c_values) != m - 1:
        raise ValueError(f"expected {m - 1} parameters, got {len(c_values)}")
    lam = cmath.exp(2j * math.pi / m)
    b = np.zeros(n_max + 1, dtype=complex)
    for n in range(n_max + 1):
        total = 0j
        for j, cj in enumerate(c_values, start=1):
            total += (1 - lam ** (j * n)) / (1 - lam**j) * cj
        b[n] = 2 * total
    r = next((n for n in range(1, n_max + 1) if abs(n - b[n]) < tol), None)
    return b.real.copy(), r


# === Characters ===


def lowest_weight_exponent(ctx: DunklContext, tau: Tau = "trivial") -> MPoly:
    """h_c(tau) = dim/2 - sum_s c_s chi_tau(s)."""
    out = ctx.space.scalar(Fraction(ctx.dim, 2))
    sign = -1 if tau == "trivial" else 1
    for term in ctx.terms:
        out = out + term.coupling * sign
    return out


def _det_coefficients(group: ReflectionGroup, g: int) -> list[Fraction]:
    """Coefficients of det(1 - t g) in increasing powers of t.

    charpoly lists det(l - g) from the top; t^n det(1/t - g) reads the same
    list from the bottom.
    """
    dom = group.domain
    matrix = DomainMatrix([list(row) for row in group.elements[g]], (group.dim,) * 2, dom)
    coeffs = []
    for a in matrix.charpoly():
        value = dom.to_sympy(a)
        if not value.is_rational:
            raise ValueError(f"characteristic polynomial coefficient {value} is irrational")
        coeffs.append(Fraction(int(value.p), int(value.q)))
    return coeffs


def _resolve_element(group: ReflectionGroup, g: int | Sequence[int]) -> int:
    return g if isinstance(g, int) else group.element_of_word(g)


def _chi(group: ReflectionGroup, tau: Tau, g: int) -> int:
    return 1 if tau == "trivial" else (-1) ** group.length(g)


def character_verma(
    group: ReflectionGroup,
    tau: Tau = "trivial",
    g: int | Sequence[int] = 0,
) -> sympy.Expr:
    """chi_tau(g) t^h_c(tau) / det(1 - t g), h_c symbolic in the couplings."""
    w = _resolve_element(group, g)
    ctx = DunklContext.build(group)
    h = lowest_weight_exponent(ctx, tau)
    h_expr = sympy.sympify(h.to_text().replace("^", "**"))
    coeffs = _det_coefficients(group, w)
    det = sum(sympy.Rational(a.numerator, a.denominator) * _t**k for k, a in enumerate(coeffs))
    return _chi(group, tau, w) * _t**h_expr / sympy.factor(det)


def character_series(
    group: ReflectionGroup,
    tau: Tau = "trivial",
    g: int | Sequence[int] = 0,
    n_terms: int = 10,
) -> list[Fraction]:
    """Coefficients of chi_tau(g) / det(1 - t g), the character without t^h_c."""
    w = _resolve_element(group, g)
    det = _det_coefficients(group, w)
    series: list[Fraction] = []
    for n in range(n_terms):
        value = Fraction(1 if n == 0 else 0)
        for k in range(1, min(n, len(det) - 1) + 1):
            value -= det[k] * series[n - k]
        series.append(value)
    chi = _chi(group, tau, w)
    return [chi * v for v in series]


# === Type A residue vectors ===


def typeA_singular_vectors(n: int, r: int, *, verify: bool = True) -> list[MPoly]:
    """f_i = Res_inf [(z - x_1)...(z - x_n)]^(r/n) dz / (z - x_i).

    Res_inf is minus the coefficient of 1/z. The f_i are homogeneous of
    degree r, sum to zero, and are killed by the S_n Dunkl operators at
    c = r/n (checked when ``verify`` is set).
    """
    if n < 2 or r < 1:
        raise ValueError("need n >= 2 and r >= 1")
    if r % n == 0:
        raise RDivisibleByN(f"n={n} divides r={r}")
    # w = 1/z rides along as the first generator; only w-degrees <= r matter
    wspace = CoordinateRing(n, params=("w",))
    w = wspace.param("w")
    u = wspace.one()
    for x in wspace.xs():
        u = u * (1 - x * w)
    u = u - 1

    def truncate(p: MPoly) -> MPoly:
        kept = {m: c for m, c in p.elem.items() if m[0] <= r}
        return MPoly(wspace, wspace.ring.from_dict(kept))

    exponent = Fraction(r, n)
    series = wspace.zero()
    power = wspace.one()
    binom = Fraction(1)
    for k in range(r + 1):
        series = series + power * binom
        binom = binom * (exponent - k) / (k + 1)
        power = truncate(power * u)
    by_w: dict[int, dict[Exponents, Any]] = {}
    for monom, coeff in series.elem.items():
        by_w.setdefault(monom[0], {})[monom[1:]] = coeff

    space = CoordinateRing(n)

    def layer(k: int) -> MPoly:
        return MPoly(space, space.ring.from_dict(by_w.get(k, {})))

    fs = []
    for i in range(n):
        f = space.zero()
        for k in range(r + 1):
            f = f + layer(r - k) * space.x(i) ** k
        fs.append(-f)
    if verify:
        _verify_residue_vectors(n, r, fs)
    return fs


def _verify_residue_vectors(n: int, r: int, fs: list[MPoly]) -> None:
    total = fs[0].space.zero()
    for f in fs:
        total = total + f
    if not total.is_zero:
        raise IdentityViolation("residue vectors do not sum to zero", witness=total.to_text())
    group = build_group(f"S{n}")
    assert isinstance(group, ReflectionGroup)
    ctx = numeric_context(group, Fraction(r, n))
    for k, f in enumerate(fs):
        if not f.is_homogeneous() or f.x_degree() != r:
            raise IdentityViolation(f"f_{k + 1} is not homogeneous of degree {r}")
        for i in range(n):
            image = dunkl_apply(ctx, ctx.basis(i), f)
            if not image.is_zero:
                raise IdentityViolation(
                    f"D_{i + 1} f_{k + 1} != 0 at c={r}/{n}", witness=image.to_text()
                )


def _to_differences(fs: list[MPoly], n: int) -> list[MPoly]:
    """Set x_n = 0; translation invariance makes this the u_i = x_i - x_n chart."""
    space = CoordinateRing(n - 1)
    out = []
    for f in fs[: n - 1]:
        terms = {m[: n - 1]: c for m, c in f.elem.items() if m[n - 1] == 0}
        out.append(MPoly(space, space.ring.from_dict(terms)))
    return out


def _quotient_series(gens: list[MPoly], nvars: int, degree_cap: int) -> list[int]:
    r = gens[0].x_degree()
    series = []
    for d in range(degree_cap + 1):
        basis = exponents_of_degree(nvars, d)
        position = {e: k for k, e in enumerate(basis)}
        rows = []
        if d >= r:
            space = gens[0].space
            for e in exponents_of_degree(nvars, d - r):
                mono = space.monomial(e)
                for f in gens:
                    row = [QQ.zero] * len(basis)
                    for exps, coeff in (mono * f).scalar_coefficients().items():
                        row[position[exps]] = coeff
                    rows.append(row)
        dim = len(basis) - _rank(rows, len(basis), QQ)
        logger.info("quotient degree %d: dim %d", d, dim)
        if dim == 0:
            return series
        series.append(dim)
    raise NonTerminating(f"quotient still nonzero in degree {degree_cap}")


def typeA_quotient(n: int, r: int, *, degree_cap: int = DEFAULT_DEGREE_CAP) -> QuotientReport:
    """C[x]^T / <f_i> at c = r/n, computed in difference coordinates.

    Raises:
        NonTerminating: If the quotient is still nonzero at ``degree_cap``,
            which happens exactly when gcd(r, n) > 1.
    """
    fs = _to_differences(typeA_singular_vectors(n, r), n)
    series = _quotient_series(fs, n - 1, degree_cap)
    expected_poly = sympy.Poly((sum(_t**k for k in range(r))) ** (n - 1), _t)
    expected = [int(v) for v in reversed(expected_poly.all_coeffs())]
    return QuotientReport(
        n=n,
        r=r,
        hilbert_series=series,
        dim=sum(series),
        palindromic=series == series[::-1],
        frobenius_ok=bool(series) and series[-1] == 1 and sum(series) == r ** (n - 1),
        matches_character=series == expected,
    )


def power_condition(point: Sequence[Any], k: int) -> bool:
    """Is prod (z - x_i) a k-th power, i.e. every multiplicity divisible by k?"""
    counts = Counter(Fraction(v) for v in point)
    return all(mult % k == 0 for mult in counts.values())


def typeA_support_membership(n: int, r: int, point: Sequence[Any]) -> bool:
    """Do all f_i vanish at ``point``? Checked against the power criterion."""
    if len(point) != n:
        raise ValueError(f"point must have {n} coordinates")
    d = math.gcd(n, r)
    fs = typeA_singular_vectors(n, r, verify=False)
    values = [f.evaluate([Fraction(v) for v in point]) for f in fs]
    vanishes = not any(values)
    if vanishes != power_condition(point, n // d):
        raise IdentityViolation(
            f"f_i vanishing ({vanishes}) disagrees with the {n // d}-th power test at {list(point)}"
        )
    return vanishes
