"""Tests for KZ transport and monodromy."""

import cmath
import math
from types import SimpleNamespace
from unittest.mock import patch

import numpy as np
import pytest

from cherednik import CyclicGroup, ReflectionGroup, build_group
from cherednik.exceptions import HyperplaneTooClose
from cherednik.kz import (
    KZConnection,
    braid_path,
    cluster_eigenvalues,
    conjugation_covariance_check,
    cyclic_monodromy,
    monodromy_eigencheck,
    tolerance_scaling_check,
    transport,
)
from cherednik.models import EigenvalueCluster


def real(spec: str) -> ReflectionGroup:
    group = build_group(spec)
    assert isinstance(group, ReflectionGroup)
    return group


def near_expected(clusters: list[EigenvalueCluster], c: float) -> bool:
    q = cmath.exp(2j * math.pi * c)
    return all(
        min(abs(complex(e.re, e.im) - 1), abs(complex(e.re, e.im) + q)) < 1e-6
        for e in clusters
    )


class TestMonodromy:
    @pytest.mark.parametrize("c", [0.1, 0.3])
    def test_a2_hecke_relation(self, c: float) -> None:
        report = monodromy_eigencheck(real("A2"), c)
        assert report.relation_residual < 1e-6
        assert report.braid_residual is not None
        assert report.braid_residual < 1e-6
        assert sum(e.mult for e in report.eigenvalues) == 6
        assert near_expected(report.eigenvalues, c)

    def test_rank_one_has_no_braid_relation(self) -> None:
        report = monodromy_eigencheck(real("A1"), 0.2)
        assert report.braid_residual is None
        assert [e.mult for e in report.eigenvalues] == [1, 1]
        assert near_expected(report.eigenvalues, 0.2)

    def test_unequal_parameters(self) -> None:
        report = monodromy_eigencheck(real("B2"), {0: 0.1, 1: 0.25}, class_id=1)
        assert report.c == 0.25
        assert report.relation_residual < 1e-6

    def test_unknown_class(self) -> None:
        with pytest.raises(ValueError, match="no reflection class 2"):
            monodromy_eigencheck(real("B2"), 0.1, class_id=2)

    def test_tolerance_scaling(self) -> None:
        assert tolerance_scaling_check(real("A1"), 0.2).passed

    @pytest.mark.parametrize(
        ("residuals", "passed"),
        [((1e-7, 5e-11), True), ((1e-8, 1e-8), False), ((3e-12, 4e-12), True)],
    )
    def test_tolerance_scaling_is_linear(self, residuals: tuple[float, float], passed: bool) -> None:
        reports = [SimpleNamespace(relation_residual=r) for r in residuals]
        with patch("cherednik.kz.monodromy_eigencheck", side_effect=reports):
            report = tolerance_scaling_check(real("A1"), 0.2)
        assert report.passed is passed


class TestCyclic:
    def test_zero_coupling_gives_the_shift(self) -> None:
        clusters = cyclic_monodromy(2, [0.0])
        assert [(e.re, e.mult) for e in clusters] == [(-1.0, 1), (1.0, 1)]

    def test_equal_couplings_stay_on_the_circle(self) -> None:
        clusters = cyclic_monodromy(3, [0.1, 0.1])
        assert sum(e.mult for e in clusters) == 3
        assert all(abs(abs(complex(e.re, e.im)) - 1) < 1e-6 for e in clusters)

    def test_parameter_count(self) -> None:
        with pytest.raises(ValueError, match="needs 2 parameters"):
            KZConnection.cyclic(CyclicGroup(3), [0.1])


class TestTransport:
    def test_through_the_origin(self) -> None:
        group = real("A2")
        connection = KZConnection.regular(group, 0.1)
        x0 = np.asarray(group.chamber, dtype=complex)
        with pytest.raises(HyperplaneTooClose):
            transport(connection, [x0, -x0])

    def test_needs_two_points(self) -> None:
        group = real("A1")
        with pytest.raises(ValueError, match="two points"):
            transport(KZConnection.regular(group, 0.1), [[1.0]])

    def test_reverse_path_returns_identity(self) -> None:
        group = real("A2")
        connection = KZConnection.regular(group, 0.2)
        result = transport(connection, braid_path(group, 0), verify=True)
        assert result.matrix.shape == (6, 6)
        assert abs(result.det) > 0

    def test_zero_coupling_is_flat(self) -> None:
        group = real("A2")
        result = transport(KZConnection.regular(group, 0.0), braid_path(group, 0))
        assert np.allclose(result.matrix, np.eye(6), atol=1e-12)

    def test_contractible_loop(self) -> None:
        group = real("A2")
        x0 = np.asarray(group.chamber, dtype=complex)
        u, v = np.array([0.1, 0.0, 0.0]), np.array([0.0, 0.1j, 0.0])
        loop = [x0, x0 + u, x0 + u + v, x0 + v, x0]
        result = transport(KZConnection.regular(group, 0.3), loop)
        assert np.linalg.norm(result.matrix - np.eye(6)) < 1e-8

    @pytest.mark.parametrize("spec", ["A2", "B2"])
    def test_conjugate_paths(self, spec: str) -> None:
        report = conjugation_covariance_check(real(spec), 0.2)
        assert report.passed
        assert report.details["elements"] == real(spec).order
        assert report.details["matrix_residual"] < 1e-6

    def test_braid_path_ends_at_reflected_point(self) -> None:
        group = real("B2")
        path = braid_path(group, 1)
        x0 = np.asarray(group.chamber, dtype=complex)
        assert np.allclose(path[0], x0)
        assert len(path) == 4


class TestClusters:
    def test_grouping(self) -> None:
        clusters = cluster_eigenvalues([1, 1 + 1e-7, -1])
        assert [e.mult for e in clusters] == [1, 2]
        assert clusters[0].re == -1.0
