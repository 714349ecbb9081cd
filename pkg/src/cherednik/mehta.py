"""The Macdonald-Mehta integral and the polynomial b(k).

F(k) = (2 pi)^(-r/2) int exp(-(x, x)/2) |delta(x)|^(2k) dx is estimated by
Monte Carlo and compared with prod Gamma(1 + k d_i) / Gamma(1 + k). The
polynomial b(k) = beta_c(delta, delta) at c = -k is computed exactly with
Dunkl operators and compared with its product formula over the degrees.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from fractions import Fraction
from typing import Any

import numpy as np
import sympy
from scipy.special import gammaln

from .dunkl import DunklContext, apply_in_dunkl, dunkl_apply
from .exact import MPoly, Scalar, scalar_to_complex
from .exceptions import IdentityViolation
from .groups import ReflectionGroup, build_group, degrees, float_roots
from .models import CheckReport, GammaPairingReport, MCEstimate, MehtaReport

__all__ = [
    "DEFAULT_SAMPLES",
    "bk_closed",
    "bk_exact_via_form",
    "bk_roots",
    "delta_poly",
    "gaussian_pairing_exact",
    "gaussian_pairing_mc_check",
    "mm_mc_estimate",
    "mm_report",
    "mm_rhs",
    "recursion_check",
    "wick_moment",
]

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES = 1_000_000
_BATCH = 200_000

_k = sympy.Symbol("k")


def _group(group: ReflectionGroup | str) -> ReflectionGroup:
    if isinstance(group, ReflectionGroup):
        return group
    built = build_group(group)
    if not isinstance(built, ReflectionGroup):
        raise ValueError(f"{group} has no real reflection representation")
    return built


# === Right-hand side and b(k) ===


def mm_rhs(group: ReflectionGroup | str, k: float) -> float:
    """prod_i Gamma(1 + k d_i) / Gamma(1 + k), through log-Gamma."""
    ds = degrees(group)
    if k <= -1 / max(ds):
        raise ValueError(f"k must exceed -1/{max(ds)}")
    log_value = sum(gammaln(1 + k * d) - gammaln(1 + k) for d in ds)
    return math.exp(log_value)


def bk_closed(group: ReflectionGroup | str) -> sympy.Poly:
    """b(k) = |W| prod_i prod_(m=1)^(d_i - 1) (k d_i + m), expanded over ZZ."""
    ds = degrees(group)
    order = math.prod(ds)
    expr = sympy.Integer(order)
    for d in ds:
        for m in range(1, d):
            expr *= d * _k + m
    return sympy.Poly(sympy.expand(expr), _k, domain="ZZ")


def delta_poly(ctx: DunklContext) -> MPoly:
    """delta = prod over positive roots of (alpha_s, x)."""
    return ctx.delta


def _to_k_poly(value: MPoly) -> sympy.Poly:
    """ParamScalar in the couplings -> polynomial in k after c_j = -k."""
    domain = value.space.domain
    xo = value.space.x_offset
    expr = sympy.Integer(0)
    for monom, coeff in value.elem.items():
        if any(monom[xo:]):
            raise ValueError("expected a constant in x")
        expr += domain.to_sympy(coeff) * (-_k) ** sum(monom[:xo])
    return sympy.Poly(sympy.expand(expr), _k, domain="QQ")


def bk_exact_via_form(
    group: ReflectionGroup | str, *, equal_parameters: bool = False
) -> sympy.Poly:
    """beta_c(delta, delta) = (delta(D) delta)(0) with every coupling set to -k.

    Raises:
        IdentityViolation: If the result differs from ``bk_closed`` or its
            degree is not the number of reflections.
    """
    g = _group(group)
    ctx = DunklContext.build(g, equal_parameters=equal_parameters)
    delta = ctx.delta
    value = apply_in_dunkl(ctx, delta, delta).constant_term()
    poly = _to_k_poly(value)
    closed = bk_closed(g)
    if poly != sympy.Poly(closed.as_expr(), _k, domain="QQ"):
        raise IdentityViolation(
            f"b(k) for {g.label} differs from the product formula",
            witness=f"{poly.as_expr()} != {closed.as_expr()}",
        )
    n_reflections = len(g.reflection_data)
    if poly.degree() != n_reflections:
        raise IdentityViolation(
            f"deg b = {poly.degree()} but {g.label} has {n_reflections} reflections"
        )
    return poly


def bk_roots(group: ReflectionGroup | str) -> list[Fraction]:
    """Roots of b(k) with multiplicity; all are negative rationals."""
    poly = bk_closed(group)
    out: list[Fraction] = []
    for root, mult in sympy.roots(poly, _k).items():
        if not (root.is_rational and root < 0):
            raise IdentityViolation(f"b(k) has the root {root}, not a negative rational")
        out.extend([Fraction(int(root.p), int(root.q))] * mult)
    if len(out) != poly.degree():
        raise IdentityViolation("b(k) does not split over Q")
    return sorted(out)


# === Monte Carlo ===


def _batches(dim: int, n_samples: int, seed: int) -> Iterator[np.ndarray]:
    """Standard normal samples from independent streams spawned off ``seed``."""
    n_batches = max(1, -(-n_samples // _BATCH))
    children = np.random.SeedSequence(seed).spawn(n_batches)
    remaining = n_samples
    for child in children:
        size = min(_BATCH, remaining)
        remaining -= size
        yield np.random.default_rng(child).standard_normal((size, dim))


def _delta_power(roots: np.ndarray, x: np.ndarray, k: float) -> np.ndarray:
    if k == 0:
        return np.ones(len(x))
    forms = np.abs(x @ roots.T)
    with np.errstate(divide="ignore"):
        return np.exp(2 * k * np.log(forms).sum(axis=1))


class _Moments:
    """Running count-weighted sums for mean, variance and a covariance."""

    def __init__(self) -> None:
        self.n = 0
        self.sums = np.zeros(2)
        self.squares = np.zeros((2, 2))

    def add(self, a: np.ndarray, b: np.ndarray) -> None:
        stacked = np.vstack([a, b])
        self.n += stacked.shape[1]
        self.sums += stacked.sum(axis=1)
        self.squares += stacked @ stacked.T

    def mean(self) -> np.ndarray:
        return self.sums / self.n

    def cov(self) -> np.ndarray:
        m = self.mean()
        ddof = max(self.n - 1, 1)
        return (self.squares - self.n * np.outer(m, m)) / ddof


def mm_mc_estimate(
    group: ReflectionGroup | str, k: float, n_samples: int = DEFAULT_SAMPLES, *, seed: int
) -> MCEstimate:
    """E|delta(x)|^(2k) for x standard normal in the reflection representation."""
    if k < 0:
        raise ValueError("Monte Carlo estimation needs k >= 0")
    g = _group(group)
    roots = float_roots(g)
    moments = _Moments()
    for x in _batches(g.dim, n_samples, seed):
        values = _delta_power(roots, x, k)
        moments.add(values, values)
    mean = float(moments.mean()[0])
    variance = max(float(moments.cov()[0, 0]), 0.0) if k else 0.0
    stderr = math.sqrt(variance / moments.n)
    logger.info("%s k=%s: F = %.6g +- %.2g from %d samples", g.label, k, mean, stderr, moments.n)
    return MCEstimate(mean=mean, std_error=stderr, n_samples=moments.n, seed=seed)


def _z(estimate: float, exact: float, stderr: float) -> float:
    if stderr == 0:
        return 0.0 if math.isclose(estimate, exact, rel_tol=1e-12) else math.inf
    return (estimate - exact) / stderr


def mm_report(
    group: ReflectionGroup | str, k: float, n_samples: int = DEFAULT_SAMPLES, *, seed: int
) -> MehtaReport:
    g = _group(group)
    rhs = mm_rhs(g, k)
    mc = mm_mc_estimate(g, k, n_samples, seed=seed)
    return MehtaReport(
        group=g.label,
        k=k,
        rhs=rhs,
        mc_mean=mc.mean,
        mc_stderr=mc.std_error,
        z=_z(mc.mean, rhs, mc.std_error),
    )


def wick_moment(group: ReflectionGroup | str, k: int) -> Fraction:
    """Exact E[delta^(2k)] by Wick: E[x^a] = prod (a_i - 1)!! for even a."""
    if k < 0:
        raise ValueError("k must be a non-negative integer")
    g = _group(group)
    space = g.space()
    delta = space.one()
    for r in g.reflection_data:
        delta = delta * space.linear_form(r.root)
    power = delta ** (2 * k)
    domain = space.domain
    total = domain.zero
    for exps, coeff in power.scalar_coefficients().items():
        if any(e % 2 for e in exps):
            continue
        total += coeff * math.prod(_double_factorial(e - 1) for e in exps)
    value = domain.to_sympy(total)
    if not value.is_rational:
        raise IdentityViolation(f"Wick moment {value} is not rational")
    return Fraction(int(value.p), int(value.q))


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def recursion_check(
    group: ReflectionGroup | str, k: float, n_samples: int = DEFAULT_SAMPLES, *, seed: int
) -> CheckReport:
    """F(k + 1) = b(k) F(k) within three combined standard errors."""
    g = _group(group)
    seeds = np.random.SeedSequence(seed).generate_state(2)
    f0 = mm_mc_estimate(g, k, n_samples, seed=int(seeds[0]))
    f1 = mm_mc_estimate(g, k + 1, n_samples, seed=int(seeds[1]))
    b = float(bk_closed(g).eval(k))
    err = math.hypot(f1.std_error, b * f0.std_error)
    z = _z(f1.mean, b * f0.mean, err)
    witness = None if abs(z) <= 3 else f"F(k+1)={f1.mean:.6g}, b(k)F(k)={b * f0.mean:.6g}, z={z:.2f}"
    return CheckReport.from_witness(
        "mm-recursion", g.label, witness, k=k, b=b, f0=f0.mean, f1=f1.mean, z=z
    )


# === Gaussian pairing ===


def _exp_f(ctx: DunklContext, p: MPoly) -> MPoly:
    """exp(F) p with F = sum D_i^2 / 2; F lowers degree by two."""
    out = p
    term = p
    j = 0
    while True:
        j += 1
        nxt = ctx.space.zero()
        for i in range(ctx.dim):
            e = ctx.basis(i)
            nxt = nxt + dunkl_apply(ctx, e, dunkl_apply(ctx, e, term))
        term = nxt * Fraction(1, 2 * j)
        if term.is_zero:
            return out
        out = out + term


def _beta(ctx: DunklContext, u: MPoly, v: MPoly) -> Scalar:
    """beta_c(u, v) summed over degrees, each block (v_d(D) u_d)(0)."""
    total = ctx.domain.zero
    for d in range(max(u.x_degree(), v.x_degree()) + 1):
        ud, vd = u.homogeneous_part(d), v.homogeneous_part(d)
        if ud.is_zero or vd.is_zero:
            continue
        value = apply_in_dunkl(ctx, vd, ud).constant_term()
        total += value.scalar_coefficients().get((0,) * ctx.dim, ctx.domain.zero)
    return total


def gaussian_pairing_exact(group: ReflectionGroup | str, k: Any, p: MPoly, q: MPoly) -> Scalar:
    """gamma_c(p, q) = beta_c(exp(F) p, exp(F) q) at c = -k, exactly."""
    g = _group(group)
    c = -Fraction(k)
    ctx = DunklContext.build(g, equal_parameters=True, values={"c": c})
    p, q = _rebase(ctx, p), _rebase(ctx, q)
    return _beta(ctx, _exp_f(ctx, p), _exp_f(ctx, q))


def _rebase(ctx: DunklContext, p: MPoly) -> MPoly:
    if p.space != ctx.space:
        if p.space.params:
            raise ValueError("pairing inputs must be free of formal parameters")
        return MPoly(ctx.space, ctx.space.ring.from_dict(dict(p.elem.items())))
    return p


def _evaluate_samples(p: MPoly, x: np.ndarray) -> np.ndarray:
    domain = p.space.domain
    out = np.zeros(len(x))
    for exps, coeff in p.scalar_coefficients().items():
        out += scalar_to_complex(coeff, domain).real * np.prod(x**np.array(exps), axis=1)
    return out


def gaussian_pairing_mc_check(
    group: ReflectionGroup | str,
    k: float,
    p: MPoly,
    q: MPoly,
    n_samples: int = DEFAULT_SAMPLES,
    *,
    seed: int,
    p_text: str | None = None,
    q_text: str | None = None,
) -> GammaPairingReport:
    """gamma_c(p, q) against E[p q |delta|^2k] / E[|delta|^2k] (ratio estimator)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    g = _group(group)
    exact_value = gaussian_pairing_exact(g, Fraction(k).limit_denominator(10**6), p, q)
    exact = scalar_to_complex(exact_value, g.domain).real
    roots = float_roots(g)
    moments = _Moments()
    for x in _batches(g.dim, n_samples, seed):
        weight = _delta_power(roots, x, k)
        moments.add(_evaluate_samples(p, x) * _evaluate_samples(q, x) * weight, weight)
    (num, den), cov = moments.mean(), moments.cov() / moments.n
    ratio = num / den
    # delta-method variance of a ratio of means
    var = (cov[0, 0] - 2 * ratio * cov[0, 1] + ratio**2 * cov[1, 1]) / den**2
    stderr = math.sqrt(max(float(var), 0.0))
    return GammaPairingReport(
        group=g.label,
        k=k,
        p=p_text or p.to_text(),
        q=q_text or q.to_text(),
        exact=exact,
        mc_ratio=float(ratio),
        mc_stderr=stderr,
        z=_z(float(ratio), exact, stderr),
    )
