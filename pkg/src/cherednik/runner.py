"""Parameter sweeps over a process pool."""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor

from .exceptions import CherednikError, ConfigError
from .jobs import SWEEP_KEYS, run_job
from .models import JobConfig, JobResult, Settings

__all__ = ["SweepRunner", "expand_sweep"]

logger = logging.getLogger(__name__)


def expand_sweep(config: JobConfig, values: Sequence[str]) -> list[JobConfig]:
    """One config per sweep value, substituted into the subcommand's sweep option."""
    key = SWEEP_KEYS.get(config.subcommand)
    if key is None:
        raise ConfigError(f"'{config.subcommand}' has no sweepable option")
    return [
        config.model_copy(update={"options": {**config.options, key: value}})
        for value in values
    ]


class SweepRunner:
    """Runs independent jobs in worker processes.

    Results come back in input order; a job that fails mathematically yields
    a failed ``JobResult`` instead of aborting the sweep.

    Example:
        async with SweepRunner(settings) as runner:
            results = await runner.run(configs)
    """

    __slots__ = ("_executor", "_settings")

    def __init__(self, settings: Settings) -> None:
        self._settings = settings
        self._executor: ProcessPoolExecutor | None = None

    async def __aenter__(self) -> SweepRunner:
        self._executor = ProcessPoolExecutor(max_workers=self._settings.workers)
        return self

    async def __aexit__(self, *_: object) -> None:
        if self._executor:
            self._executor.shutdown(wait=True, cancel_futures=True)
            self._executor = None

    async def run(self, configs: Sequence[JobConfig]) -> list[JobResult]:
        if not self._executor:
            raise CherednikError("SweepRunner not initialized. Use 'async with' context.")
        executor = self._executor
        loop = asyncio.get_running_loop()
        limit = asyncio.Semaphore(self._settings.workers)

        async def one(config: JobConfig) -> JobResult:
            async with limit:
                logger.debug("submitting %s %s", config.subcommand, config.options)
                return await loop.run_in_executor(executor, run_job, config, self._settings)

        logger.info("sweep of %d jobs on %d workers", len(configs), self._settings.workers)
        return list(await asyncio.gather(*(one(c) for c in configs)))
