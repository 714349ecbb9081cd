"""Pydantic models for settings, job configuration and check reports."""

from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

__all__ = [
    "SAMPLED_SUBCOMMANDS",
    "SCHEMA_VERSION",
    "SUBCOMMANDS",
    "CheckReport",
    "EigenvalueCluster",
    "GammaPairingReport",
    "GramReport",
    "JobConfig",
    "JobResult",
    "MCEstimate",
    "MehtaReport",
    "MonodromyReport",
    "QuotientReport",
    "Rank1Spectrum",
    "Settings",
    "SupportEntry",
    "SupportReport",
    "TrajectoryRow",
]

SCHEMA_VERSION = "cherednik-wb/1"

SUBCOMMANDS = (
    "dunkl-check",
    "verma",
    "support",
    "mm",
    "cm-sim",
    "cm-check",
    "hecke",
    "kz",
    "poincare",
)
SAMPLED_SUBCOMMANDS = frozenset({"mm", "cm-sim", "cm-check"})

Status = Literal["pass", "fail"]


# === Configuration ===


class Settings(BaseModel):
    """Tunable caps and tolerances, loaded by ``load_settings``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    workers: int = Field(4, ge=1, le=256)
    order_cap: int = Field(1_000_000, ge=1)
    tau_sep: float = Field(1e-8, gt=0)
    rtol: float = Field(1e-10, gt=0)
    atol: float = Field(1e-12, gt=0)
    move_cap: int = Field(100_000, ge=1)
    degree_cap: int = Field(40, ge=1)
    commutativity_degree: int = Field(5, ge=0)
    pbw_order: int = Field(3, ge=0)
    pbw_input_degree: int = Field(6, ge=0)


class JobConfig(BaseModel):
    """One CLI invocation (or one member of a sweep)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    subcommand: Literal[
        "dunkl-check",
        "verma",
        "support",
        "mm",
        "cm-sim",
        "cm-check",
        "hecke",
        "kz",
        "poincare",
    ]
    group: str | None = None
    options: dict[str, Any] = Field(default_factory=dict)
    seed: int | None = None
    output: Path | None = None
    tolerances: dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _require_seed(self) -> JobConfig:
        if self.subcommand in SAMPLED_SUBCOMMANDS and self.seed is None:
            raise ValueError(f"'{self.subcommand}' samples randomly: --seed is required")
        return self


# === Check reports ===


class CheckReport(BaseModel):
    """Outcome of an identity check on a finite test space."""

    check: str
    group: str
    max_degree: int | None = None
    status: Status
    witness: str | None = None
    details: dict[str, Any] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @classmethod
    def from_witness(
        cls,
        check: str,
        group: str,
        witness: str | None,
        *,
        max_degree: int | None = None,
        **details: Any,
    ) -> CheckReport:
        return cls(
            check=check,
            group=group,
            max_degree=max_degree,
            status="pass" if witness is None else "fail",
            witness=witness,
            details=details,
        )


# === Standard modules ===


class GramReport(BaseModel):
    group: str
    tau: Literal["trivial", "sign"] = "trivial"
    c: str
    degree: int
    gram_rank: int
    singular_dim: int


class Rank1Spectrum(BaseModel):
    """b_n, a_n and the first r with r = b_r for the cyclic group of order m."""

    m: int
    c: str
    b: list[str]
    a: list[str]
    r: int | None = None


class QuotientReport(BaseModel):
    n: int
    r: int
    hilbert_series: list[int]
    dim: int
    palindromic: bool
    frobenius_ok: bool
    matches_character: bool


# === Supports ===


class SupportEntry(BaseModel):
    label: str
    degrees: list[int]
    div_count: int
    in_support: bool


class SupportReport(BaseModel):
    group: str
    c: str
    m: int
    deg_count: int
    entries: list[SupportEntry]
    strata_in_support: list[str]
    finite_dim: bool


# === Numerics ===


class MCEstimate(BaseModel):
    """Monte Carlo mean with its standard error and provenance."""

    model_config = ConfigDict(frozen=True)

    mean: float
    std_error: float
    n_samples: int
    seed: int


class MehtaReport(BaseModel):
    group: str
    k: float
    rhs: float
    mc_mean: float
    mc_stderr: float
    z: float


class GammaPairingReport(BaseModel):
    group: str
    k: float
    p: str
    q: str
    exact: float
    mc_ratio: float
    mc_stderr: float
    z: float


class TrajectoryRow(BaseModel):
    """One grid time of a Calogero-Moser trajectory."""

    t: float
    x: list[complex]
    p: list[complex]
    h: list[complex]

    def csv_fields(self) -> list[str]:
        return [repr(self.t), *(_format_number(v) for v in (*self.x, *self.p, *self.h))]


def _format_number(value: complex) -> str:
    if abs(value.imag) <= 1e-14 * max(1.0, abs(value.real)):
        return repr(float(value.real))
    return repr(complex(value))


class EigenvalueCluster(BaseModel):
    re: float
    im: float
    mult: int


class MonodromyReport(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    group: str
    c: float
    class_: int = Field(alias="class")
    eigenvalues: list[EigenvalueCluster]
    relation_residual: float
    braid_residual: float | None = None


# === Jobs ===


class JobResult(BaseModel):
    """Artefact payload and verdict of one dispatched job."""

    subcommand: str
    format: Literal["json", "csv"] = "json"
    data: Any = None
    header: list[str] | None = None
    rows: list[list[str]] = Field(default_factory=list)
    summary: str = ""
    passed: bool = True
    sweep_value: str | None = None
