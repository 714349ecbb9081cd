"""Supports and finite-dimensionality of L_c(triv) from degree counts.

A stratum with stabilizer W_a lies in the support of L_c exactly when the
number of degrees of W divisible by the denominator m of c equals the same
count for W_a. Everything reduces to integer divisibility; no root of unity
is ever evaluated.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .exceptions import MissingParabolicTable, UnsupportedType
from .groups import (
    ReflectionGroup,
    build_group,
    degree_table,
    degrees,
    maximal_parabolics,
    poincare_polynomial,
    standard_parabolic,
)
from .models import CheckReport, SupportEntry, SupportReport
from .verma import quotient_dimension_search

__all__ = [
    "CSV_HEADER",
    "ParabolicDegrees",
    "criterion_table",
    "divisible_degree_count",
    "e7_table",
    "finite_dim_criterion",
    "finite_dim_denominators",
    "monotonicity_check",
    "parabolic_degree_entries",
    "quotient_consistency_check",
    "stratum_in_support",
    "support_report",
]

logger = logging.getLogger(__name__)

CSV_HEADER = ("group", "c", "m", "stratum", "deg_count_W", "deg_count_Wa", "in_support")


@dataclass(frozen=True)
class ParabolicDegrees:
    label: str
    degrees: tuple[int, ...]


def divisible_degree_count(degrees: Iterable[int], m: int) -> int:
    """#{i : m | d_i}."""
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    return sum(1 for d in degrees if d % m == 0)


def _denominator(c: Any) -> int:
    return Fraction(c).denominator


def stratum_in_support(
    w_degrees: Sequence[int], wa_degrees: Sequence[int], c: Any
) -> bool:
    """Whether the stratum of W_a lies in supp L_c(triv).

    Uses the denominator of |c|; for integer c every stratum is in the
    support.
    """
    m = _denominator(c)
    if m == 1:
        return True
    return divisible_degree_count(w_degrees, m) == divisible_degree_count(wa_degrees, m)


# === Parabolic data ===


def _resolve(group: ReflectionGroup | str) -> tuple[str, tuple[int, ...], ReflectionGroup | None]:
    if isinstance(group, ReflectionGroup):
        return group.label, tuple(degrees(group)), group
    table = degree_table()
    if group in table:
        return group, table[group], None
    try:
        built = build_group(group)
    except UnsupportedType as exc:
        raise MissingParabolicTable(f"no degree data for {group!r}") from exc
    if not isinstance(built, ReflectionGroup):
        raise UnsupportedType(f"{group} has no parabolic subgroups")
    return built.label, tuple(degrees(built)), built


def parabolic_degree_entries(group: ReflectionGroup | str) -> list[ParabolicDegrees]:
    """Degrees of each maximal standard parabolic.

    Built groups compute them from the parabolic's own Poincare polynomial;
    exceptional labels read the ``GROUP/PARABOLIC`` rows of the table.

    Raises:
        MissingParabolicTable: For a table group without parabolic rows.
    """
    label, _, built = _resolve(group)
    if built is not None:
        return [
            ParabolicDegrees(sub.label, tuple(degrees(sub)))
            for sub in maximal_parabolics(built)
        ]
    prefix = f"{label}/"
    rows = [
        ParabolicDegrees(key, value)
        for key, value in degree_table().items()
        if key.startswith(prefix)
    ]
    if not rows:
        raise MissingParabolicTable(f"no maximal parabolic rows for {label}")
    return rows


def finite_dim_criterion(group: ReflectionGroup | str, c: Any) -> bool:
    """L_c(triv) is finite-dimensional iff the count strictly drops for
    every maximal parabolic. Integer c never qualifies."""
    _, w_degrees, _ = _resolve(group)
    m = _denominator(c)
    if m == 1:
        return False
    count = divisible_degree_count(w_degrees, m)
    return all(
        count > divisible_degree_count(entry.degrees, m)
        for entry in parabolic_degree_entries(group)
    )


def finite_dim_denominators(group: ReflectionGroup | str, max_denominator: int) -> set[int]:
    return {
        m for m in range(2, max_denominator + 1) if finite_dim_criterion(group, Fraction(1, m))
    }


def e7_table(max_denominator: int = 18) -> set[int]:
    """Denominators m <= max_denominator with L_(1/m)(triv) finite for E7."""
    return finite_dim_denominators("E7", max_denominator)


# === Reports ===


def _strata(group: ReflectionGroup | str) -> list[ParabolicDegrees]:
    label, w_degrees, built = _resolve(group)
    whole = ParabolicDegrees(label, w_degrees)
    if built is not None and built.rank <= 4:
        # every standard parabolic of a small group
        entries = []
        for mask in range(1 << built.rank):
            subset = [i for i in range(built.rank) if mask >> i & 1]
            sub = standard_parabolic(built, subset)
            entries.append(ParabolicDegrees(sub.label, tuple(degrees(sub))))
        return entries
    trivial = ParabolicDegrees(f"{label}[]", ())
    return [trivial, *parabolic_degree_entries(group), whole]


def support_report(group: ReflectionGroup | str, c: Any) -> SupportReport:
    label, w_degrees, _ = _resolve(group)
    m = _denominator(c)
    entries = []
    for stratum in _strata(group):
        entries.append(
            SupportEntry(
                label=stratum.label,
                degrees=list(stratum.degrees),
                div_count=divisible_degree_count(stratum.degrees, m),
                in_support=stratum_in_support(w_degrees, stratum.degrees, c),
            )
        )
    in_support = [e.label for e in entries if e.in_support]
    rank = len(w_degrees)
    proper = [e for e in entries if len(e.degrees) < rank]
    return SupportReport(
        group=label,
        c=str(Fraction(c)),
        m=m,
        deg_count=divisible_degree_count(w_degrees, m),
        entries=entries,
        strata_in_support=in_support,
        finite_dim=m > 1 and not any(e.in_support for e in proper),
    )


def criterion_table(
    group: ReflectionGroup | str, c_values: Iterable[Any]
) -> list[tuple[str, ...]]:
    """CSV rows ``group,c,m,stratum,deg_count_W,deg_count_Wa,in_support``."""
    rows: list[tuple[str, ...]] = []
    for c in c_values:
        report = support_report(group, c)
        for entry in report.entries:
            rows.append(
                (
                    report.group,
                    report.c,
                    str(report.m),
                    entry.label,
                    str(report.deg_count),
                    str(entry.div_count),
                    str(entry.in_support).lower(),
                )
            )
    return rows


# === Consistency ===


def monotonicity_check(group: ReflectionGroup) -> CheckReport:
    """count(W', m) <= count(W, m) and P_W' | P_W for every standard parabolic."""
    w_degrees = degrees(group)
    top = max(w_degrees, default=1)
    p_w = poincare_polynomial(group)
    for mask in range(1 << group.rank):
        subset = [i for i in range(group.rank) if mask >> i & 1]
        sub = standard_parabolic(group, subset)
        sub_degrees = degrees(sub)
        for m in range(2, top + 1):
            if divisible_degree_count(sub_degrees, m) > divisible_degree_count(w_degrees, m):
                return CheckReport.from_witness(
                    "support-monotonicity", group.label, f"{sub.label}, m={m}"
                )
        _, rem = p_w.div(poincare_polynomial(sub))
        if not rem.is_zero:
            return CheckReport.from_witness(
                "support-monotonicity",
                group.label,
                f"P_{sub.label} does not divide P_{group.label}",
            )
    return CheckReport.from_witness("support-monotonicity", group.label, None)


def quotient_consistency_check(
    group: ReflectionGroup, denominators: Iterable[int], max_degree: int
) -> CheckReport:
    """The divisibility criterion agrees with an explicit quotient search at c = 1/m."""
    agreed = {}
    for m in denominators:
        c = Fraction(1, m)
        predicted = finite_dim_criterion(group, c)
        series = quotient_dimension_search(group, c, max_degree)
        found = series is not None
        agreed[str(c)] = {"criterion": predicted, "series": series}
        logger.info("%s c=%s: criterion %s, quotient %s", group.label, c, predicted, series)
        if predicted != found:
            return CheckReport.from_witness(
                "support-quotient",
                group.label,
                f"c={c}: criterion says {predicted}, quotient search found {series}",
                max_degree=max_degree,
            )
    return CheckReport.from_witness(
        "support-quotient", group.label, None, max_degree=max_degree, results=agreed
    )
