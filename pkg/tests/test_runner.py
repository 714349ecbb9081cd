"""Tests for parameter sweeps."""

import asyncio

import pytest

from cherednik import CherednikError, ConfigError, JobConfig, JobResult, Settings, SweepRunner
from cherednik.runner import expand_sweep


class TestExpandSweep:
    def test_substitutes_the_sweep_key(self) -> None:
        config = JobConfig(subcommand="kz", group="A2", options={"mode": "eigen", "c": "0.1"})
        configs = expand_sweep(config, ["0.2", "0.3"])
        assert [c.options["c"] for c in configs] == ["0.2", "0.3"]
        assert all(c.options["mode"] == "eigen" for c in configs)
        assert config.options["c"] == "0.1"

    def test_key_per_subcommand(self) -> None:
        config = JobConfig(subcommand="hecke", options={"mode": "dim", "n": 3})
        assert expand_sweep(config, ["2"])[0].options["q"] == "2"

    def test_unsweepable(self) -> None:
        with pytest.raises(ConfigError, match="no sweepable option"):
            expand_sweep(JobConfig(subcommand="poincare", group="A2"), ["1"])


class TestSweepRunner:
    def test_requires_context(self) -> None:
        async def run() -> None:
            await SweepRunner(Settings()).run([])

        with pytest.raises(CherednikError, match="not initialized"):
            asyncio.run(run())

    @pytest.mark.slow
    def test_results_in_input_order(self) -> None:
        base = JobConfig(subcommand="support", group="B2")
        configs = expand_sweep(base, ["1/4", "1/2", "1/3"])

        async def run() -> list[JobResult]:
            async with SweepRunner(Settings(workers=2)) as runner:
                return await runner.run(configs)

        results = asyncio.run(run())
        assert [r.sweep_value for r in results] == ["1/4", "1/2", "1/3"]
        assert all(r.format == "csv" for r in results)

    def test_hecke_sweep(self) -> None:
        base = JobConfig(subcommand="hecke", options={"mode": "dim", "n": 3})
        configs = expand_sweep(base, ["3/2", "2"])

        async def run() -> list[JobResult]:
            async with SweepRunner(Settings(workers=1)) as runner:
                return await runner.run(configs)

        results = asyncio.run(run())
        assert [r.passed for r in results] == [True, True]
