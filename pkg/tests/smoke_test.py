"""Smoke test for built distributions.

Run against the installed wheel or sdist: imports the public API and
performs one cheap exact check.
"""

from __future__ import annotations


def main() -> None:
    import cherednik
    from cherednik import DunklContext, JobConfig, ReflectionGroup, build_group, commutativity_check

    assert cherednik.__version__

    group = build_group("A2")
    assert isinstance(group, ReflectionGroup)
    assert group.order == 6
    assert commutativity_check(DunklContext.build(group), 2).passed

    _ = JobConfig(subcommand="poincare", group="B3")


if __name__ == "__main__":
    main()
