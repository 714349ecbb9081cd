"""Tests for the command-line front end and job dispatch."""

import json
from collections.abc import Iterator
from pathlib import Path
from unittest.mock import patch

import pytest

from cherednik import ConfigError, JobConfig, JobResult, Settings
from cherednik.cli import _attach_negative_values, build_parser, main, render_artifact
from cherednik.jobs import run_job


@pytest.fixture(autouse=True)
def no_settings_file(tmp_path: Path) -> Iterator[None]:
    with patch("cherednik.utils._SETTINGS_PATHS", (tmp_path / "nonexistent.json",)):
        yield


def read_artifact(path: Path) -> tuple[str, str]:
    header, _, body = path.read_text().partition("\n")
    return header, body


class TestParser:
    def test_subcommand_options(self) -> None:
        args = build_parser().parse_args(["verma", "--group", "A2", "--mode", "rank1", "--m", "3"])
        assert args.subcommand == "verma"
        assert args.group == "A2"
        assert args.m == 3
        assert args.tau == "trivial"

    def test_negative_values_are_attached(self) -> None:
        argv = ["cm-sim", "--x", "-1,1", "--p", "0,0", "--t0", "-0.5"]
        assert _attach_negative_values(argv) == ["cm-sim", "--x=-1,1", "--p", "0,0", "--t0=-0.5"]

    def test_flags_are_left_alone(self) -> None:
        assert _attach_negative_values(["--selftest", "-v"]) == ["--selftest", "-v"]


class TestRenderArtifact:
    def test_json(self) -> None:
        result = JobResult(subcommand="poincare", data={"b": 1, "a": 2}, summary="ok")
        header, _, body = render_artifact(result).partition("\n")
        assert header == "# schema=cherednik-wb/1 subcommand=poincare"
        assert json.loads(body) == {"passed": True, "summary": "ok", "data": {"a": 2, "b": 1}}
        assert body.index('"a"') < body.index('"b"')

    def test_csv(self) -> None:
        result = JobResult(subcommand="support", format="csv", header=["x", "y"], rows=[["1", "2"]])
        assert render_artifact(result) == "# schema=cherednik-wb/1 subcommand=support\nx,y\n1,2\n"


class TestMain:
    def test_poincare(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        out = tmp_path / "a2.json"
        assert main(["poincare", "--group", "A2", "--out", str(out)]) == 0
        header, body = read_artifact(out)
        assert header == "# schema=cherednik-wb/1 subcommand=poincare"
        data = json.loads(body)["data"]
        assert data["order"] == 6
        assert data["degrees"] == [2, 3]
        assert "PASS" in capsys.readouterr().out

    def test_poincare_from_table(self, tmp_path: Path) -> None:
        out = tmp_path / "e7.json"
        assert main(["poincare", "--group", "E7", "--out", str(out)]) == 0
        assert json.loads(read_artifact(out)[1])["data"]["order"] == 2903040

    def test_support_csv(self, tmp_path: Path) -> None:
        out = tmp_path / "support.csv"
        assert main(["support", "--group", "A2", "--c", "1/3,1/2", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[1] == "group,c,m,stratum,deg_count_W,deg_count_Wa,in_support"
        assert len(lines) == 2 + 8

    def test_report_artifact_shape(self, tmp_path: Path) -> None:
        out = tmp_path / "dunkl.json"
        argv = ["dunkl-check", "--group", "A1", "--checks", "sigma", "--out", str(out)]
        assert main(argv) == 0
        data = json.loads(read_artifact(out)[1])["data"]
        assert [r["check"] for r in data["reports"]] == ["sigma-vanish"]

    def test_default_artifact_path(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.chdir(tmp_path)
        assert main(["poincare", "--group", "B2"]) == 0
        assert (tmp_path / "cherednik-poincare.json").exists()

    def test_mathematical_failure_exits_one(self, tmp_path: Path) -> None:
        out = tmp_path / "typeA.json"
        assert main(["verma", "--mode", "typeA", "--n", "3", "--r", "3", "--out", str(out)]) == 1
        data = json.loads(read_artifact(out)[1])
        assert not data["passed"]
        assert data["data"]["error"] == "RDivisibleByN"

    @pytest.mark.parametrize(
        "argv",
        [
            ["mm", "--group", "A1", "--mode", "bk"],
            ["poincare", "--group", "X9"],
            ["kz", "--mode", "spiral"],
            ["support", "--group", "A2"],
            [],
        ],
    )
    def test_configuration_errors_exit_two(self, argv: list[str], tmp_path: Path) -> None:
        assert main([*argv, "--out", str(tmp_path / "x.json")] if argv else []) == 2

    def test_sweep(self, tmp_path: Path) -> None:
        out = tmp_path / "sweep.csv"
        code = main(["support", "--group", "A2", "--sweep", "1/3,1/2", "--out", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[1].startswith("sweep_c,group,c")
        assert lines[2].startswith("1/3,A2,1/3")
        assert len(lines) == 2 + 8

    def test_unsweepable(self, tmp_path: Path) -> None:
        argv = ["poincare", "--group", "A2", "--sweep", "1,2", "--out", str(tmp_path / "x.json")]
        assert main(argv) == 2


class TestRunJob:
    def test_failures_become_results(self) -> None:
        config = JobConfig(subcommand="verma", options={"mode": "typeA", "n": 3, "r": 6})
        result = run_job(config, Settings())
        assert not result.passed
        assert result.data["error"] == "RDivisibleByN"

    def test_configuration_errors_propagate(self) -> None:
        with pytest.raises(ConfigError):
            run_job(JobConfig(subcommand="poincare"), Settings())

    def test_cm_sim_through_a_collision_fails(self) -> None:
        options = {"n": 3, "x": "-1,0,1", "p": "0.3,0,-0.3", "t0": 0, "t1": 1, "steps": 200}
        result = run_job(JobConfig(subcommand="cm-sim", options=options, seed=7), Settings())
        assert not result.passed
        assert "collision" in result.summary
        assert "max deviation" in result.summary
        assert len(result.rows) == 201

    def test_cm_sim_collision_free(self) -> None:
        options = {"x": "-1,0,1", "p": "-2,0,2", "steps": 100}
        result = run_job(JobConfig(subcommand="cm-sim", options=options), Settings())
        assert result.passed
        assert "max deviation" in result.summary

    def test_support_for_table_label(self) -> None:
        config = JobConfig(subcommand="support", group="G2", options={"c": "1/6,1/4"})
        result = run_job(config, Settings())
        assert result.passed
        assert result.rows[0][0] == "G2"
        assert "1/6" in result.summary
        assert "1/4" not in result.summary

    def test_sweep_value_is_recorded(self) -> None:
        config = JobConfig(subcommand="support", group="A2", options={"c": "1/3"})
        assert run_job(config, Settings()).sweep_value == "1/3"


class TestSelftest:
    @pytest.mark.slow
    def test_support_section(self, tmp_path: Path) -> None:
        out = tmp_path / "selftest.json"
        assert main(["--selftest", "--sections", "support", "--out", str(out)]) == 0
        reports = json.loads(read_artifact(out)[1])["data"]
        assert reports
        assert all(r["status"] == "pass" for r in reports)

    def test_unknown_section(self, tmp_path: Path) -> None:
        out = tmp_path / "selftest.json"
        assert main(["--selftest", "--sections", "plots", "--out", str(out)]) == 2
