"""Command-line front end: ``cherednik-wb <subcommand> [options]``.

Every invocation writes one artefact (JSON or CSV, first line a schema
header) and prints a short summary. Exit status is 0 when every asserted
identity holds, 1 when one fails and 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import logging
import os
import re
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from .exceptions import CherednikError, ConfigError
from .jobs import SWEEP_KEYS, run_job
from .models import SCHEMA_VERSION, CheckReport, JobConfig, JobResult, Settings
from .runner import SweepRunner, expand_sweep
from .selftest import SECTIONS, run_selftest
from .utils import load_settings, write_atomic

__all__ = ["build_parser", "main", "render_artifact"]

logger = logging.getLogger(__name__)

_COMMON = frozenset(
    {
        "subcommand",
        "group",
        "seed",
        "out",
        "config",
        "verbose",
        "sweep",
        "rtol",
        "atol",
        "tau_sep",
        "selftest",
        "sections",
    }
)
_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


# === Parser ===


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", help="group spec: A1, A<n>, S<n>, B<n>, D<n>, I2(m), Zm:<m>, or E6/E7/E8/F4/H3/H4 for tables")
    common.add_argument("--seed", type=int, help="seed for every sampled computation")
    common.add_argument("--out", type=Path, help="artefact path (default: cherednik-<subcommand>.<ext>)")
    common.add_argument("--config", help="JSON settings file")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")
    common.add_argument("--sweep", help="comma-separated values for the subcommand's main parameter")
    common.add_argument("--rtol", type=float, help="integrator relative tolerance")
    common.add_argument("--atol", type=float, help="integrator absolute tolerance")
    common.add_argument("--tau-sep", type=float, dest="tau_sep", help="minimum particle / hyperplane separation")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="cherednik-wb",
        description="Dunkl operators, Cherednik algebra representations, Calogero-Moser flows and KZ monodromy",
        parents=[common],
    )
    parser.add_argument("--selftest", action="store_true", help="run the acceptance suite")
    parser.add_argument(
        "--sections", help=f"comma-separated selftest sections ({', '.join(SECTIONS)})"
    )
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    p = sub.add_parser("dunkl-check", parents=[common], help="Dunkl operator identities")
    p.add_argument("--checks", default="commutativity,sigma", help="comma-separated checks")
    p.add_argument("--max-degree", type=int, dest="max_degree")
    p.add_argument("--equal", action="store_true", help="one parameter for all classes")
    p.add_argument("--c", help="specialise the couplings to this rational")

    p = sub.add_parser("verma", parents=[common], help="Gram matrices, singular vectors, quotients")
    p.add_argument(
        "--mode",
        choices=["gram", "singular", "rank1", "typeA", "consistency", "character"],
        default="gram",
    )
    p.add_argument("--c")
    p.add_argument("--degree", type=int)
    p.add_argument("--tau", choices=["trivial", "sign"], default="trivial")
    p.add_argument("--m", type=int, help="order of the cyclic group (rank1)")
    p.add_argument("--n", type=int, help="S_n (typeA)")
    p.add_argument("--r", type=int, help="c = r/n (typeA)")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--element", type=int, help="group element index (character)")

    p = sub.add_parser("support", parents=[common], help="finite-dimensionality criterion")
    p.add_argument("--c", help="comma-separated rationals")
    p.add_argument("--table", action="store_true", help="c = 1/m for m = 2..max-denominator")
    p.add_argument("--max-denominator", type=int, dest="max_denominator")

    p = sub.add_parser("mm", parents=[common], help="Macdonald-Mehta integral")
    p.add_argument("--mode", choices=["integral", "bk", "recursion", "pairing"], default="integral")
    p.add_argument("--k")
    p.add_argument("--samples", type=int)
    p.add_argument("--p", help="polynomial in x1..xn (pairing)")
    p.add_argument("--q", help="polynomial in x1..xn (pairing)")

    p = sub.add_parser("cm-sim", parents=[common], help="Calogero-Moser trajectories")
    p.add_argument("--n", type=int)
    p.add_argument("--x", required=True, help="comma-separated positions")
    p.add_argument("--p", required=True, help="comma-separated momenta")
    p.add_argument("--t0", type=float)
    p.add_argument("--t1", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--g", help="coupling constant")

    p = sub.add_parser("cm-check", parents=[common], help="Calogero-Moser Poisson structure")
    p.add_argument("--mode", choices=["necklace", "poisson", "flows"], default="necklace")
    p.add_argument("--n", type=int)
    p.add_argument("--u", help="word in X, Y")
    p.add_argument("--v", help="word in X, Y")
    p.add_argument("--pairs", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--max-index", type=int, dest="max_index")

    p = sub.add_parser("hecke", parents=[common], help="Hecke algebras and rewriting")
    p.add_argument("--mode", choices=["dim", "rewrite", "classical"], default="dim")
    p.add_argument("--n", type=int)
    p.add_argument("--q")
    p.add_argument("--word", help="comma-separated generator indices from 1")

    p = sub.add_parser("kz", parents=[common], help="KZ monodromy")
    p.add_argument("--mode", choices=["eigen", "cyclic", "tolerance", "conjugation"], default="eigen")
    p.add_argument("--c", help="coupling (comma-separated c_1..c_(m-1) for cyclic)")
    p.add_argument("--m", type=int)
    p.add_argument("--class-id", type=int, dest="class_id")
    p.add_argument("--check-tol", type=float, dest="check_tol")

    sub.add_parser("poincare", parents=[common], help="Poincare polynomial and degrees")
    return parser


def _attach_negative_values(argv: Sequence[str]) -> list[str]:
    """``--x -1,0,1`` -> ``--x=-1,0,1`` so argparse reads it as a value."""
    out: list[str] = []
    tokens = list(argv)
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        follows = tokens[i + 1] if i + 1 < len(tokens) else ""
        if tok.startswith("--") and "=" not in tok and _NEGATIVE_VALUE.match(follows):
            out.append(f"{tok}={follows}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


# === Artefacts ===


def _header(name: str) -> str:
    return f"# schema={SCHEMA_VERSION} subcommand={name}\n"


def render_artifact(result: JobResult) -> str:
    """Schema header line, then CSV rows or sorted, indented JSON."""
    if result.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(result.header or [])
        writer.writerows(result.rows)
        return _header(result.subcommand) + buf.getvalue()
    payload = {"passed": result.passed, "summary": result.summary, "data": result.data}
    return _header(result.subcommand) + json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _render_sweep(results: Sequence[JobResult], key: str) -> JobResult:
    name = results[0].subcommand
    passed = all(r.passed for r in results)
    summary = "\n".join(f"{key}={r.sweep_value}: {r.summary.splitlines()[0] if r.summary else ''}" for r in results)
    if all(r.format == "csv" for r in results):
        rows = [[r.sweep_value or "", *row] for r in results for row in r.rows]
        return JobResult(
            subcommand=name,
            format="csv",
            header=[f"sweep_{key}", *(results[0].header or [])],
            rows=rows,
            summary=summary,
            passed=passed,
        )
    data = [{"sweep": r.sweep_value, "passed": r.passed, "data": r.data} for r in results]
    return JobResult(subcommand=name, data=data, summary=summary, passed=passed)


def _emit(result: JobResult, out: Path | None) -> None:
    target = out or Path(f"cherednik-{result.subcommand}.{result.format}")
    write_atomic(target, render_artifact(result))
    logger.info("wrote %s", target)
    if result.summary:
        print(result.summary)
    print(f"{'PASS' if result.passed else 'FAIL'}: artefact {target}")


# === Entry point ===


def _configure_logging(verbose: int) -> None:
    level: int | str = os.getenv("CHEREDNIK_LOG_LEVEL", "WARNING").upper()
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _job_config(args: argparse.Namespace) -> JobConfig:
    options: dict[str, Any] = {
        key: value for key, value in vars(args).items() if key not in _COMMON and value is not None
    }
    tolerances = {name: getattr(args, name) for name in ("rtol", "atol", "tau_sep") if getattr(args, name) is not None}
    if "check_tol" in options:
        tolerances["check"] = options.pop("check_tol")
    return JobConfig(
        subcommand=args.subcommand,
        group=args.group,
        options=options,
        seed=args.seed,
        output=args.out,
        tolerances=tolerances,
    )


async def _run_sweep(configs: list[JobConfig], settings: Settings) -> list[JobResult]:
    async with SweepRunner(settings) as runner:
        return await runner.run(configs)


def _selftest(args: argparse.Namespace, settings: Settings) -> int:
    sections = [s.strip() for s in args.sections.split(",")] if args.sections else None
    unknown = set(sections or ()) - set(SECTIONS)
    if unknown:
        raise ConfigError(f"unknown selftest sections {sorted(unknown)}")
    reports = run_selftest(settings, sections)
    failed = [r for r in reports if not r.passed]
    result = JobResult(
        subcommand="selftest",
        data=[r.model_dump(mode="json", exclude_none=True) for r in reports],
        summary="\n".join(_report_line(r) for r in reports),
        passed=not failed,
    )
    _emit(result, args.out)
    return 0 if result.passed else 1


def _report_line(report: CheckReport) -> str:
    line = f"{report.status.upper():4} {report.check} [{report.group}]"
    return f"{line}: {report.witness}" if report.witness else line


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    _configure_logging(args.verbose)

    try:
        settings = load_settings(args.config)
        if args.selftest:
            return _selftest(args, settings)
        if args.subcommand is None:
            parser.print_usage(sys.stderr)
            return 2
        config = _job_config(args)
        if args.sweep:
            values = [v.strip() for v in args.sweep.split(",") if v.strip()]
            results = asyncio.run(_run_sweep(expand_sweep(config, values), settings))
            result = _render_sweep(results, SWEEP_KEYS[config.subcommand])
        else:
            result = run_job(config, settings)
    except (ConfigError, ValidationError, ValueError) as exc:
        print(f"cherednik-wb: configuration error: {exc}", file=sys.stderr)
        return 2
    except CherednikError as exc:
        print(f"cherednik-wb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

    _emit(result, config.output)
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
