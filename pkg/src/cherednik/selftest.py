"""End-to-end acceptance suite behind ``cherednik-wb --selftest``.

Each section returns ``CheckReport`` objects; the CLI aggregates them into
one artefact and exits non-zero if any fails. Sizes are the full ones, so a
run takes minutes rather than seconds.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from fractions import Fraction

import numpy as np
import sympy

from . import calogero, dunkl, hecke, kz, mehta, support, verma
from .exceptions import CherednikError, IdentityViolation
from .groups import ReflectionGroup, build_group
from .models import CheckReport, Settings

__all__ = ["SECTIONS", "run_selftest"]

logger = logging.getLogger(__name__)

_k = sympy.Symbol("k")


def _real_group(spec: str, settings: Settings) -> ReflectionGroup:
    group = build_group(spec, order_cap=settings.order_cap)
    assert isinstance(group, ReflectionGroup)
    return group


# === Dunkl operators ===


def dunkl_commutativity(settings: Settings) -> list[CheckReport]:
    reports = []
    for spec in ("A2", "B2", "A3"):
        group = _real_group(spec, settings)
        reports.append(dunkl.commutativity_check(dunkl.DunklContext.build(group), 5))
        classical = dunkl.DunklContext.build(group, momenta=True)
        reports.append(dunkl.classical_commutativity_check(classical, 3))
    return reports


def structural_identities(settings: Settings) -> list[CheckReport]:
    reports = []
    for spec in ("A2", "B2", "A3"):
        ctx = dunkl.DunklContext.build(_real_group(spec, settings))
        residue = dunkl.sigma_vanish_check(ctx)
        witness = None if residue.is_zero else residue.to_text()
        reports.append(CheckReport.from_witness("sigma-vanish", spec, witness))
        reports.append(dunkl.sl2_check(ctx, 4))
    for spec in ("A1", "A2"):
        classical = dunkl.DunklContext.build(_real_group(spec, settings), momenta=True)
        reports.append(dunkl.classical_op_check(classical))
    return reports


# === Macdonald-Mehta ===


def mehta_polynomials(settings: Settings) -> list[CheckReport]:
    reports = []
    expected_a2 = sympy.Poly(6 * (2 * _k + 1) * (3 * _k + 1) * (3 * _k + 2), _k)
    for spec in ("A1", "A2", "B2", "I2(6)"):
        group = _real_group(spec, settings)
        try:
            via_form = mehta.bk_exact_via_form(group)
        except IdentityViolation as exc:
            reports.append(CheckReport.from_witness("mm-bk", spec, str(exc)))
            continue
        witness = None
        if via_form != mehta.bk_closed(group):
            witness = f"form gives {via_form.as_expr()}"
        elif spec == "A2" and via_form.as_expr().expand() != expected_a2.as_expr().expand():
            witness = f"A2 b(k) = {via_form.as_expr()}"
        reports.append(CheckReport.from_witness("mm-bk", spec, witness))
    return reports


def mehta_integrals(settings: Settings, samples: int = mehta.DEFAULT_SAMPLES) -> list[CheckReport]:
    reports = []
    for seed, (spec, k, exact) in enumerate(
        (("A1", 1.0, 2.0), ("A2", 1.0, 12.0), ("B2", 1.0, None)), start=1
    ):
        group = _real_group(spec, settings)
        report = mehta.mm_report(group, k, samples, seed=seed)
        witness = None
        if abs(report.z) > 3:
            witness = f"z = {report.z:.2f}"
        elif exact is not None and not math.isclose(report.rhs, exact, rel_tol=1e-12):
            witness = f"rhs {report.rhs} != {exact}"
        reports.append(
            CheckReport.from_witness("mm-integral", spec, witness, z=report.z, rhs=report.rhs)
        )
    pairs = (("A1", "x1", "x1"), ("A2", "x1 - x2", "x1 - x2"), ("B2", "x1^2", "1"))
    for seed, (spec, p_text, q_text) in enumerate(pairs, start=10):
        group = _real_group(spec, settings)
        space = group.space()
        pairing = mehta.gaussian_pairing_mc_check(
            group,
            1.0,
            space.parse(p_text),
            space.parse(q_text),
            samples,
            seed=seed,
            p_text=p_text,
            q_text=q_text,
        )
        witness = None if abs(pairing.z) <= 3 else f"gamma({p_text}, {q_text}) z = {pairing.z:.2f}"
        reports.append(CheckReport.from_witness("mm-pairing", spec, witness, z=pairing.z))
    return reports


# === Representations ===


def rank_one(settings: Settings) -> list[CheckReport]:
    reports = []
    a1 = _real_group("A1", settings)
    for n in range(5):
        c = Fraction(2 * n + 1, 2)
        spectrum = verma.rank1_spectrum(2, c, 2 * n + 3)
        witness = None
        if spectrum.r != 2 * n + 1:
            witness = f"c={c}: r = {spectrum.r}"
        elif verma.gram_report(a1, c, 2 * n + 1).singular_dim == 0:
            witness = f"c={c}: no singular vector in degree {2 * n + 1}"
        reports.append(CheckReport.from_witness("rank1", "Z/2", witness))
    for c in (Fraction(1, 3), Fraction(2, 3), Fraction(5, 7)):
        exact = verma.rank1_spectrum(3, c, 12)
        floats, _ = verma.rank1_spectrum_float(3, [float(c), float(c)], 12)
        gap = max(abs(float(Fraction(b)) - f) for b, f in zip(exact.b, floats, strict=True))
        witness = None if gap <= 1e-10 else f"c={c}: b_n differ by {gap:.3g}"
        reports.append(CheckReport.from_witness("rank1-float", "Z/3", witness))
    return reports


def _structured_points(n: int, count: int, seed: int) -> list[list[int]]:
    """Points whose coordinates repeat in a random multiplicity pattern."""
    rng = np.random.default_rng(seed)
    patterns = [(4,), (2, 2), (3, 1), (2, 1, 1), (1, 1, 1, 1)] if n == 4 else [(1,) * n]
    points = []
    for _ in range(count):
        pattern = patterns[int(rng.integers(len(patterns)))]
        values = rng.choice(np.arange(-20, 21), size=len(pattern), replace=False)
        point = [int(v) for v, mult in zip(values, pattern, strict=True) for _ in range(mult)]
        rng.shuffle(point)
        points.append(point)
    return points


def type_a(settings: Settings) -> list[CheckReport]:
    reports = []
    for n, r in ((2, 1), (2, 3), (3, 1), (3, 2), (4, 3)):
        label = f"S{n}"
        fs = verma.typeA_singular_vectors(n, r, verify=True)
        if not sum(fs[1:], fs[0]).is_zero:
            reports.append(CheckReport.from_witness("typeA", label, f"r={r}: sum f_i != 0"))
            continue
        quotient = verma.typeA_quotient(n, r, degree_cap=settings.degree_cap)
        witness = None
        if quotient.dim != r ** (n - 1):
            witness = f"r={r}: dim {quotient.dim}"
        elif not (quotient.palindromic and quotient.frobenius_ok and quotient.matches_character):
            witness = f"r={r}: series {quotient.hilbert_series}"
        reports.append(CheckReport.from_witness("typeA", label, witness))
    try:
        for point in _structured_points(4, 100, seed=4):
            verma.typeA_support_membership(4, 2, point)
        reports.append(CheckReport.from_witness("typeA-support", "S4", None))
    except IdentityViolation as exc:
        reports.append(CheckReport.from_witness("typeA-support", "S4", str(exc)))
    return reports


def support_criteria(settings: Settings) -> list[CheckReport]:
    e7 = support.e7_table()
    reports = [
        CheckReport.from_witness(
            "support-e7", "E7", None if e7 == {2, 6, 14, 18} else f"denominators {sorted(e7)}"
        )
    ]
    for n in range(2, 7):
        found = support.finite_dim_denominators(_real_group(f"S{n}", settings), 12)
        witness = None if found == {n} else f"denominators {sorted(found)}"
        reports.append(CheckReport.from_witness("support-Sn", f"S{n}", witness))
    for spec in ("A2", "B2", "A3", "B3", "D4", "I2(6)"):
        reports.append(support.monotonicity_check(_real_group(spec, settings)))
    return reports


# === Calogero-Moser ===


def calogero_moser(settings: Settings) -> list[CheckReport]:
    reports = []
    grid = np.linspace(0.0, 1.0, 201)
    # outgoing momenta: the attractive pull never closes the gaps on [0, 1]
    starts = {2: ([-1.0, 1.0], [-1.0, 1.0]), 3: ([-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0])}
    for n, (x, p) in starts.items():
        chart = calogero.CoordChart.of(x, p)
        spectral = calogero.trajectories_spectral(chart, grid, tau_sep=settings.tau_sep)
        ode = calogero.trajectories_ode(chart, grid, rtol=settings.rtol, atol=settings.atol)
        deviation = float(np.max(np.abs(spectral.x - ode.x)))
        witness = None if deviation <= 1e-6 else f"deviation {deviation:.3g}"
        reports.append(
            CheckReport.from_witness("cm-trajectories", f"n={n}", witness, deviation=deviation)
        )
    reports.extend(calogero.flow_invariance_check(n, seed=n) for n in (2, 3, 4))
    rng = np.random.default_rng(2024)
    letters = np.array(["X", "Y"])
    worst, failed = 0.0, None
    for idx in range(100):
        u, v = ("".join(rng.choice(letters, size=int(rng.integers(1, 5)))) for _ in range(2))
        report = calogero.necklace_bracket_check(u, v, 4, 5, seed=idx)
        worst = max(worst, report.details["max_relative_error"])
        if not report.passed and failed is None:
            failed = f"{{{u}, {v}}}: {report.witness}"
    reports.append(CheckReport.from_witness("necklace", "gl4", failed, max_relative_error=worst))
    for m in range(1, 4):
        for k in range(1, 4):
            reports.append(calogero.coordinate_poisson_check(3, m, k))
    reports.append(calogero.hamiltonians_commute_check(3))
    return reports


# === Hecke algebras and KZ ===


def hecke_kz(settings: Settings) -> list[CheckReport]:
    reports = [
        hecke.hecke_dim_check(3, Fraction(3, 2)),
        hecke.hecke_dim_check(4, Fraction(-2, 5), samples=300, seed=1),
    ]
    a2 = _real_group("A2", settings)
    for c in (0.1, 0.3):
        report = kz.monodromy_eigencheck(a2, c, rtol=settings.rtol, atol=settings.atol)
        expected = (1, -complex(math.cos(2 * math.pi * c), math.sin(2 * math.pi * c)))
        off = max(
            min(abs(complex(e.re, e.im) - z) for z in expected) for e in report.eigenvalues
        )
        residuals = (off, report.relation_residual, report.braid_residual or 0.0)
        witness = None if max(residuals) <= 1e-6 else f"c={c}: residuals {residuals}"
        reports.append(CheckReport.from_witness("kz-monodromy", "A2", witness))
    reports.append(kz.conjugation_covariance_check(a2, 0.2, rtol=settings.rtol, atol=settings.atol))
    for spec in ("A2", "B2", "A3"):
        reports.append(
            hecke.classical_specialization_check(
                _real_group(spec, settings), move_cap=settings.move_cap
            )
        )
    return reports


SECTIONS: dict[str, Callable[[Settings], list[CheckReport]]] = {
    "dunkl": dunkl_commutativity,
    "mehta-bk": mehta_polynomials,
    "mehta-integral": mehta_integrals,
    "rank1": rank_one,
    "typeA": type_a,
    "support": support_criteria,
    "calogero-moser": calogero_moser,
    "hecke-kz": hecke_kz,
    "structural": structural_identities,
}


def run_selftest(settings: Settings, sections: list[str] | None = None) -> list[CheckReport]:
    """Run the named sections (all by default); errors become failed reports."""
    reports: list[CheckReport] = []
    for name in sections or list(SECTIONS):
        logger.info("selftest section %s", name)
        try:
            reports.extend(SECTIONS[name](settings))
        except CherednikError as exc:
            logger.warning("selftest section %s raised %s", name, exc)
            reports.append(CheckReport.from_witness(name, "-", f"{type(exc).__name__}: {exc}"))
    return reports
