"""Tests for Pydantic models."""

import pytest
from pydantic import ValidationError

from cherednik import CheckReport, JobConfig, JobResult, Settings
from cherednik.models import MonodromyReport, TrajectoryRow


class TestSettings:
    def test_defaults(self) -> None:
        settings = Settings()
        assert settings.order_cap == 1_000_000
        assert settings.commutativity_degree == 5

    def test_frozen(self) -> None:
        settings = Settings()
        with pytest.raises(ValidationError):
            settings.workers = 2  # type: ignore[misc]

    def test_rejects_unknown_fields(self) -> None:
        with pytest.raises(ValidationError):
            Settings.model_validate({"wrokers": 2})

    def test_bounds(self) -> None:
        with pytest.raises(ValidationError):
            Settings(tau_sep=0)


class TestJobConfig:
    def test_minimal(self) -> None:
        config = JobConfig(subcommand="poincare", group="B3")
        assert config.options == {}
        assert config.seed is None

    def test_sampled_subcommands_need_seed(self) -> None:
        for name in ("mm", "cm-sim", "cm-check"):
            with pytest.raises(ValidationError, match="--seed is required"):
                JobConfig(subcommand=name, group="A2")
        assert JobConfig(subcommand="mm", group="A2", seed=1).seed == 1

    def test_unknown_subcommand(self) -> None:
        with pytest.raises(ValidationError):
            JobConfig(subcommand="plot")  # type: ignore[arg-type]


class TestReports:
    def test_from_witness(self) -> None:
        ok = CheckReport.from_witness("commutativity", "A2", None, max_degree=5)
        bad = CheckReport.from_witness("commutativity", "A2", "[D1,D2](x1)", count=3)
        assert ok.passed
        assert ok.status == "pass"
        assert not bad.passed
        assert bad.details == {"count": 3}

    def test_monodromy_alias(self) -> None:
        report = MonodromyReport.model_validate(
            {"group": "A2", "c": 0.1, "class": 0, "eigenvalues": [], "relation_residual": 0.0}
        )
        assert report.class_ == 0
        dumped = report.model_dump(by_alias=True, exclude_none=True)
        assert dumped["class"] == 0
        assert "braid_residual" not in dumped

    def test_trajectory_row_drops_tiny_imaginary_parts(self) -> None:
        row = TrajectoryRow(t=0.5, x=[1 + 1e-17j], p=[0.25 + 0j], h=[2 + 1j])
        assert row.csv_fields() == ["0.5", "1.0", "0.25", "(2+1j)"]

    def test_job_result_defaults(self) -> None:
        result = JobResult(subcommand="poincare")
        assert result.format == "json"
        assert result.passed
        assert result.rows == []
