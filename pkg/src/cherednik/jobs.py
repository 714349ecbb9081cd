"""Subcommand handlers: one ``JobConfig`` in, one ``JobResult`` out.

Handlers are plain functions so that ``run_job`` can be shipped to worker
processes. Rationals arrive as ``p/q`` strings and go through
``parse_rational``; floats only reach numeric paths.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable
from fractions import Fraction
from typing import Any

import numpy as np

from . import calogero, dunkl, hecke, kz, mehta, support, verma
from .exceptions import (
    CherednikError,
    CollisionDetected,
    ConfigError,
    StepFailure,
    UnsupportedType,
)
from .groups import (
    CyclicGroup,
    ReflectionGroup,
    build_group,
    degree_table,
    degrees,
    poincare_polynomial,
    q_integer,
)
from .models import CheckReport, JobConfig, JobResult, Settings
from .utils import parse_float_list, parse_rational

__all__ = ["SWEEP_KEYS", "dispatch", "run_job"]

logger = logging.getLogger(__name__)

#: Option swept by ``--sweep`` for each subcommand.
SWEEP_KEYS = {
    "dunkl-check": "c",
    "verma": "c",
    "support": "c",
    "mm": "k",
    "cm-sim": "g",
    "cm-check": "n",
    "hecke": "q",
    "kz": "c",
}

DUNKL_CHECKS = (
    "commutativity",
    "equivariance",
    "sl2",
    "sigma",
    "quantum-op",
    "pbw",
    "classical",
    "classical-op",
)


# === Option helpers ===


def _opt(config: JobConfig, name: str, default: Any = None) -> Any:
    value = config.options.get(name)
    return default if value is None else value


def _rational(config: JobConfig, name: str, default: Any = None) -> Fraction:
    value = _opt(config, name, default)
    if value is None:
        raise ConfigError(f"'{config.subcommand}' needs --{name}")
    return value if isinstance(value, Fraction) else parse_rational(str(value))


def _float(config: JobConfig, name: str, default: float | None = None) -> float:
    value = _opt(config, name, default)
    if value is None:
        raise ConfigError(f"'{config.subcommand}' needs --{name}")
    try:
        return float(value)
    except ValueError as exc:
        raise ConfigError(f"--{name} must be a number, got {value!r}") from exc


def _int(config: JobConfig, name: str, default: int | None = None) -> int:
    value = _opt(config, name, default)
    if value is None:
        raise ConfigError(f"'{config.subcommand}' needs --{name}")
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"--{name} must be an integer, got {value!r}") from exc


def _group(config: JobConfig, settings: Settings, default: str | None = None) -> ReflectionGroup:
    spec = config.group or default
    if spec is None:
        raise ConfigError(f"'{config.subcommand}' needs --group")
    try:
        group = build_group(spec, order_cap=settings.order_cap)
    except UnsupportedType as exc:
        raise ConfigError(str(exc)) from exc
    if isinstance(group, CyclicGroup):
        raise ConfigError(f"'{config.subcommand}' needs a real reflection group, got {spec}")
    return group


def _tol(config: JobConfig, settings: Settings, name: str) -> float:
    return float(config.tolerances.get(name, getattr(settings, name)))


def _reports(config: JobConfig, reports: list[CheckReport], **extra: Any) -> JobResult:
    passed = all(r.passed for r in reports)
    lines = [
        f"{r.check} [{r.group}]: {r.status}" + (f" ({r.witness})" if r.witness else "")
        for r in reports
    ]
    return JobResult(
        subcommand=config.subcommand,
        data={"reports": [r.model_dump(mode="json", exclude_none=True) for r in reports], **extra},
        summary="\n".join(lines),
        passed=passed,
    )


# === dunkl-check ===


def _dunkl_check(config: JobConfig, settings: Settings) -> JobResult:
    group = _group(config, settings)
    checks = str(_opt(config, "checks", "commutativity,sigma")).split(",")
    unknown = set(checks) - set(DUNKL_CHECKS)
    if unknown:
        raise ConfigError(f"unknown checks {sorted(unknown)}; choose from {', '.join(DUNKL_CHECKS)}")
    equal = bool(_opt(config, "equal", False))
    degree = _int(config, "max_degree", settings.commutativity_degree)
    ctx = dunkl.DunklContext.build(group, equal_parameters=equal)
    if _opt(config, "c") is not None:
        c = _rational(config, "c")
        ctx = ctx.specialize({name: c for name in ctx.params})
    reports = []
    for check in checks:
        logger.info("dunkl-check %s on %s", check, group.label)
        if check == "commutativity":
            reports.append(dunkl.commutativity_check(ctx, degree))
        elif check == "equivariance":
            reports.append(dunkl.equivariance_check(ctx, min(degree, 3)))
        elif check == "sl2":
            reports.append(dunkl.sl2_check(ctx, min(degree, 4)))
        elif check == "sigma":
            residue = dunkl.sigma_vanish_check(ctx)
            witness = None if residue.is_zero else residue.to_text()
            reports.append(CheckReport.from_witness("sigma-vanish", group.label, witness))
        elif check == "quantum-op":
            reports.extend(dunkl.quantum_op_check(ctx, f) for f in ctx.monomials_up_to(2))
        elif check == "pbw":
            generic = {name: Fraction(3, 7) for name in ctx.params}
            reports.append(
                dunkl.pbw_check(
                    ctx,
                    generic,
                    max_order=settings.pbw_order,
                    input_degree=settings.pbw_input_degree,
                )
            )
        elif check == "classical":
            classical = dunkl.DunklContext.build(group, equal_parameters=equal, momenta=True)
            reports.append(dunkl.classical_commutativity_check(classical, min(degree, 3)))
        else:
            classical = dunkl.DunklContext.build(group, equal_parameters=equal, momenta=True)
            reports.append(dunkl.classical_op_check(classical))
    return _reports(config, reports)


# === verma ===


def _verma(config: JobConfig, settings: Settings) -> JobResult:
    mode = _opt(config, "mode", "gram")
    tau = _opt(config, "tau", "trivial")
    if mode == "rank1":
        m = _int(config, "m", 2)
        spectrum = verma.rank1_spectrum(m, _rational(config, "c"), _int(config, "n_max", 10))
        summary = f"Z/{m} c={spectrum.c}: first r with r = b_r is {spectrum.r}"
        return JobResult(subcommand="verma", data=spectrum.model_dump(mode="json"), summary=summary)
    if mode == "typeA":
        n, r = _int(config, "n"), _int(config, "r")
        report = verma.typeA_quotient(n, r, degree_cap=settings.degree_cap)
        passed = report.palindromic and report.frobenius_ok and report.matches_character
        summary = f"S{n} c={r}/{n}: quotient dim {report.dim}, series {report.hilbert_series}"
        return JobResult(
            subcommand="verma", data=report.model_dump(mode="json"), summary=summary, passed=passed
        )
    group = _group(config, settings)
    if mode == "character":
        element = _int(config, "element", 0)
        expr = verma.character_verma(group, tau, element)
        series = verma.character_series(group, tau, element, _int(config, "n_max", 10))
        data = {
            "group": group.label,
            "tau": tau,
            "element": element,
            "character": str(expr),
            "series": [str(v) for v in series],
        }
        return JobResult(subcommand="verma", data=data, summary=f"chi = {expr}")
    c = _rational(config, "c")
    degree = _int(config, "degree", 2)
    if mode == "gram":
        gram = verma.gram_report(group, c, degree, tau=tau)
        summary = (
            f"{group.label} c={c} degree {degree}: "
            f"rank {gram.gram_rank}, singular {gram.singular_dim}"
        )
        return JobResult(subcommand="verma", data=gram.model_dump(mode="json"), summary=summary)
    if mode == "singular":
        vectors = verma.singular_vectors(group, degree, c)
        data = {
            "group": group.label,
            "c": str(c),
            "degree": degree,
            "vectors": [v.to_text() for v in vectors],
        }
        return JobResult(
            subcommand="verma", data=data, summary=f"{len(vectors)} singular vectors in degree {degree}"
        )
    if mode == "consistency":
        return _reports(config, [verma.gram_kernel_consistency(group, c, degree)])
    raise ConfigError(f"unknown verma mode {mode!r}")


# === support ===


def _support(config: JobConfig, settings: Settings) -> JobResult:
    label = config.group
    if label is None:
        raise ConfigError("'support' needs --group")
    target: ReflectionGroup | str = label
    if label not in degree_table():
        target = _group(config, settings)
    if _opt(config, "table", False):
        top = _int(config, "max_denominator", 18)
        rows = []
        finite = []
        for m in range(2, top + 1):
            report = support.support_report(target, Fraction(1, m))
            rows.append(
                [report.group, report.c, str(m), str(report.deg_count), str(report.finite_dim).lower()]
            )
            if report.finite_dim:
                finite.append(m)
        return JobResult(
            subcommand="support",
            format="csv",
            header=["group", "c", "m", "deg_count_W", "finite_dim"],
            rows=rows,
            summary=f"finite-dimensional at denominators {finite}",
        )
    c_text = str(_opt(config, "c", ""))
    if not c_text:
        raise ConfigError("'support' needs --c or --table")
    values = [parse_rational(part) for part in c_text.split(",") if part.strip()]
    rows = [list(row) for row in support.criterion_table(target, values)]
    finite = [str(c) for c in values if support.finite_dim_criterion(target, c)]
    return JobResult(
        subcommand="support",
        format="csv",
        header=list(support.CSV_HEADER),
        rows=rows,
        summary=f"finite-dimensional L_c(triv) for c in {finite or 'none'}",
    )


# === mm ===


def _mm(config: JobConfig, settings: Settings) -> JobResult:
    group = _group(config, settings)
    mode = _opt(config, "mode", "integral")
    seed = config.seed if config.seed is not None else 0
    samples = _int(config, "samples", mehta.DEFAULT_SAMPLES)
    if mode == "bk":
        poly = mehta.bk_exact_via_form(group)
        data = {
            "group": group.label,
            "b": str(poly.as_expr()),
            "roots": [str(r) for r in mehta.bk_roots(group)],
        }
        return JobResult(subcommand="mm", data=data, summary=f"b(k) = {poly.as_expr()}")
    k = _float(config, "k")
    if mode == "recursion":
        return _reports(config, [mehta.recursion_check(group, k, samples, seed=seed)])
    if mode == "pairing":
        space = group.space()
        p_text, q_text = str(_opt(config, "p", "1")), str(_opt(config, "q", "1"))
        report = mehta.gaussian_pairing_mc_check(
            group,
            k,
            space.parse(p_text),
            space.parse(q_text),
            samples,
            seed=seed,
            p_text=p_text,
            q_text=q_text,
        )
        return JobResult(
            subcommand="mm",
            data=report.model_dump(mode="json"),
            summary=(
                f"gamma_c({p_text}, {q_text}) = {report.exact:.8g}, "
                f"MC {report.mc_ratio:.8g}, z={report.z:.2f}"
            ),
            passed=abs(report.z) <= 3,
        )
    integral = mehta.mm_report(group, k, samples, seed=seed)
    return JobResult(
        subcommand="mm",
        data=integral.model_dump(mode="json"),
        summary=(
            f"{group.label} k={k}: rhs {integral.rhs:.8g}, "
            f"MC {integral.mc_mean:.8g} +- {integral.mc_stderr:.2g}, z={integral.z:.2f}"
        ),
        passed=abs(integral.z) <= 3,
    )


# === cm-sim / cm-check ===


def _cm_sim(config: JobConfig, settings: Settings) -> JobResult:
    x = parse_float_list(str(_opt(config, "x", "")))
    p = parse_float_list(str(_opt(config, "p", "")))
    n = _int(config, "n", len(x))
    if len(x) != n or len(p) != n:
        raise ConfigError(f"--x and --p need {n} values each")
    t0, t1 = _float(config, "t0", 0.0), _float(config, "t1", 1.0)
    steps = _int(config, "steps", 200)
    g = _float(config, "g", 1.0)
    grid = np.linspace(t0, t1, steps + 1)
    chart = calogero.CoordChart.of(x, p)
    tau_sep = _tol(config, settings, "tau_sep")
    notes = []
    try:
        spectral = calogero.trajectories_spectral(chart, grid, g=g, tau_sep=tau_sep, strict=True)
    except CollisionDetected as exc:
        spectral = exc.trajectory
        notes.append(f"collision: {exc}")
    assert spectral is not None
    # the ODE comparison only covers the grid before the first collision
    clear = spectral.collisions[0] if spectral.collisions else len(grid)
    passed = False
    if clear < 2:
        notes.append("no collision-free stretch to compare against the ODE")
    else:
        try:
            ode = calogero.trajectories_ode(
                chart,
                grid[:clear],
                g=g,
                rtol=_tol(config, settings, "rtol"),
                atol=_tol(config, settings, "atol"),
                tau_sep=tau_sep,
            )
            deviation = float(np.max(np.abs(spectral.x[:clear] - ode.x)))
            drift = calogero.energy_drift(ode)
            notes.append(
                f"spectral vs ODE max deviation {deviation:.3g} on t in "
                f"[{grid[0]:.6g}, {grid[clear - 1]:.6g}]; ODE energy drift {drift:.3g}"
            )
            passed = deviation <= 1e-6 and not spectral.collisions
        except StepFailure as exc:
            notes.append(f"ODE stopped: {exc}; no spectral vs ODE comparison")
    return JobResult(
        subcommand="cm-sim",
        format="csv",
        header=spectral.csv_header(),
        rows=[row.csv_fields() for row in spectral.rows()],
        summary="\n".join(notes),
        passed=passed,
    )


def _random_words(rng: np.random.Generator, count: int, max_length: int) -> list[tuple[str, str]]:
    def word() -> str:
        length = int(rng.integers(1, max_length + 1))
        return "".join(rng.choice(["X", "Y"], size=length))

    return [(word(), word()) for _ in range(count)]


def _cm_check(config: JobConfig, settings: Settings) -> JobResult:
    mode = _opt(config, "mode", "necklace")
    seed = config.seed if config.seed is not None else 0
    n = _int(config, "n", 4)
    if mode == "necklace":
        u, v = _opt(config, "u"), _opt(config, "v")
        samples = _int(config, "samples", 5)
        if u and v:
            pairs = [(str(u), str(v))]
        else:
            pairs = _random_words(np.random.default_rng(seed), _int(config, "pairs", 100), 4)
        seeds = np.random.SeedSequence(seed).generate_state(len(pairs))
        reports = [
            calogero.necklace_bracket_check(a, b, n, samples, seed=int(s))
            for (a, b), s in zip(pairs, seeds, strict=True)
        ]
        failed = [r for r in reports if not r.passed]
        worst = max(r.details["max_relative_error"] for r in reports)
        data = {
            "n": n,
            "pairs": len(pairs),
            "max_relative_error": worst,
            "failures": [r.model_dump(mode="json") for r in failed],
        }
        return JobResult(
            subcommand="cm-check",
            data=data,
            summary=f"{len(pairs)} word pairs, worst relative error {worst:.3g}",
            passed=not failed,
        )
    if mode == "poisson":
        top = _int(config, "max_index", 3)
        reports = [
            calogero.coordinate_poisson_check(n, m, k)
            for m, k in itertools.product(range(1, top + 1), repeat=2)
        ]
        reports.append(calogero.hamiltonians_commute_check(n))
        return _reports(config, reports)
    if mode == "flows":
        return _reports(config, [calogero.flow_invariance_check(n, seed=seed)])
    raise ConfigError(f"unknown cm-check mode {mode!r}")


# === hecke / kz / poincare ===


def _hecke(config: JobConfig, settings: Settings) -> JobResult:
    mode = _opt(config, "mode", "dim")
    if mode == "dim":
        n = _int(config, "n", 3)
        q = _rational(config, "q", "3/2")
        return _reports(config, [hecke.hecke_dim_check(n, q, seed=config.seed or 0)])
    group = _group(config, settings)
    if mode == "classical":
        report = hecke.classical_specialization_check(group, move_cap=settings.move_cap)
        return _reports(config, [report])
    if mode == "rewrite":
        word = tuple(int(a) - 1 for a in str(_opt(config, "word", "")).split(",") if a.strip())
        element = hecke.rewrite_canonical(group, word, move_cap=settings.move_cap)
        data = {"group": group.label, "word": [a + 1 for a in word], "normal_form": element.to_text()}
        return JobResult(subcommand="hecke", data=data, summary=element.to_text())
    raise ConfigError(f"unknown hecke mode {mode!r}")


def _kz(config: JobConfig, settings: Settings) -> JobResult:
    mode = _opt(config, "mode", "eigen")
    rtol, atol = _tol(config, settings, "rtol"), _tol(config, settings, "atol")
    tol = float(config.tolerances.get("check", 1e-6))
    if mode == "cyclic":
        m = _int(config, "m", 3)
        c_values = parse_float_list(str(_opt(config, "c", "")))
        clusters = kz.cyclic_monodromy(m, c_values, rtol=rtol, atol=atol)
        data = {"group": f"Zm:{m}", "c": c_values, "eigenvalues": [e.model_dump() for e in clusters]}
        return JobResult(subcommand="kz", data=data, summary=f"{len(clusters)} eigenvalue clusters")
    group = _group(config, settings)
    c = _float(config, "c")
    if mode == "tolerance":
        return _reports(config, [kz.tolerance_scaling_check(group, c)])
    if mode == "conjugation":
        report = kz.conjugation_covariance_check(group, c, rtol=rtol, atol=atol, tol=tol)
        return _reports(config, [report])
    report = kz.monodromy_eigencheck(
        group,
        c,
        _int(config, "class_id", 0),
        rtol=rtol,
        atol=atol,
        tau_sep=_tol(config, settings, "tau_sep"),
    )
    expected = (1, -complex(math.cos(2 * math.pi * c), math.sin(2 * math.pi * c)))
    on_target = all(
        min(abs(complex(e.re, e.im) - z) for z in expected) <= tol for e in report.eigenvalues
    )
    passed = on_target and report.relation_residual <= tol and (report.braid_residual or 0.0) <= tol
    values = ", ".join(f"{e.re:+.6f}{e.im:+.6f}i (x{e.mult})" for e in report.eigenvalues)
    return JobResult(
        subcommand="kz",
        data=report.model_dump(mode="json", by_alias=True, exclude_none=True),
        summary=f"eigenvalues {values}; relation residual {report.relation_residual:.3g}",
        passed=passed,
    )


def _poincare(config: JobConfig, settings: Settings) -> JobResult:
    label = config.group
    if label is None:
        raise ConfigError("'poincare' needs --group")
    if label in degree_table():
        degs = degrees(label)
        poly = math.prod((q_integer(d) for d in degs), start=q_integer(1))
        order = math.prod(degs)
    else:
        try:
            group = build_group(label, order_cap=settings.order_cap)
        except UnsupportedType as exc:
            raise ConfigError(str(exc)) from exc
        poly, degs, order = poincare_polynomial(group), degrees(group), group.order
    data = {
        "group": label,
        "order": order,
        "poincare": str(poly.as_expr()),
        "degrees": degs,
    }
    return JobResult(subcommand="poincare", data=data, summary=f"{label}: degrees {degs}")


_HANDLERS: dict[str, Callable[[JobConfig, Settings], JobResult]] = {
    "dunkl-check": _dunkl_check,
    "verma": _verma,
    "support": _support,
    "mm": _mm,
    "cm-sim": _cm_sim,
    "cm-check": _cm_check,
    "hecke": _hecke,
    "kz": _kz,
    "poincare": _poincare,
}


def dispatch(config: JobConfig, settings: Settings) -> JobResult:
    """Run one job. Configuration problems raise ``ConfigError``."""
    return _HANDLERS[config.subcommand](config, settings)


def run_job(config: JobConfig, settings: Settings) -> JobResult:
    """``dispatch`` with mathematical failures turned into failed results.

    Module level so that it can be pickled into worker processes.
    """
    try:
        result = dispatch(config, settings)
    except ConfigError:
        raise
    except CherednikError as exc:
        logger.warning("%s failed: %s", config.subcommand, exc)
        result = JobResult(
            subcommand=config.subcommand,
            data={
                "error": type(exc).__name__,
                "message": str(exc),
                "witness": getattr(exc, "witness", None),
            },
            summary=f"{type(exc).__name__}: {exc}",
            passed=False,
        )
    sweep_key = SWEEP_KEYS.get(config.subcommand)
    if sweep_key and config.options.get(sweep_key) is not None:
        result.sweep_value = str(config.options[sweep_key])
    return result
