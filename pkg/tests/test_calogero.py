"""Tests for Calogero-Moser space, flows and brackets."""

import numpy as np
import pytest

from cherednik import CoordinateRing, RationalFn
from cherednik.calogero import (
    CoordChart,
    chart_of,
    conserved_quantities,
    coordinate_poisson_check,
    energy_drift,
    flow,
    flow_invariance_check,
    hamiltonians_commute_check,
    necklace_bracket_check,
    pullback_trace,
    rank_one_residual,
    trajectories_ode,
    trajectories_spectral,
    xi_map,
)
from cherednik.exceptions import CollisionDetected, SeparationTooSmall, StepFailure


@pytest.fixture
def chart() -> CoordChart:
    return CoordChart.of([0.0, 2.0, 5.0], [-1.0, 0.0, 1.0])


class TestChart:
    def test_xi_lands_on_the_variety(self, chart: CoordChart) -> None:
        point = xi_map(chart)
        assert rank_one_residual(point) < 1e-12
        assert np.allclose(np.diag(point.Y), chart.p)

    def test_hamiltonian(self, chart: CoordChart) -> None:
        h = conserved_quantities(xi_map(chart))
        assert h[0] == pytest.approx(0.0)
        # sum p^2 - sum_(i != j) (x_i - x_j)^-2 = 2 - 361/450
        assert h[1] == pytest.approx(539 / 450)

    def test_round_trip(self, chart: CoordChart) -> None:
        back = chart_of(xi_map(chart))
        assert np.allclose(back.x, chart.x)
        assert np.allclose(back.p, chart.p)

    def test_separation_guard(self) -> None:
        with pytest.raises(SeparationTooSmall):
            xi_map(CoordChart.of([0.0, 1e-9], [0.0, 0.0]))

    def test_shape_mismatch(self) -> None:
        with pytest.raises(ValueError, match="equal length"):
            CoordChart.of([0.0, 1.0], [0.0])


class TestFlows:
    def test_flow_keeps_traces(self, chart: CoordChart) -> None:
        point = xi_map(chart)
        moved = flow(point, 2, 0.7)
        assert np.array_equal(conserved_quantities(moved), conserved_quantities(point))
        assert rank_one_residual(moved) < 1e-10

    def test_flows_are_indexed_from_one(self, chart: CoordChart) -> None:
        with pytest.raises(ValueError):
            flow(xi_map(chart), 0, 1.0)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_flow_invariance(self, n: int) -> None:
        report = flow_invariance_check(n, seed=5)
        assert report.passed
        assert report.group == f"n={n}"


class TestTrajectories:
    def test_two_body_closed_form(self) -> None:
        # x = +-sqrt(1 - t^2) until the collision at t = 1
        chart = CoordChart.of([-1.0, 1.0], [0.0, 0.0])
        t = np.linspace(0.0, 0.8, 9)
        traj = trajectories_spectral(chart, t)
        assert np.allclose(traj.x[:, 1], np.sqrt(1 - t**2))
        assert np.allclose(traj.x[:, 0], -np.sqrt(1 - t**2))

    def test_spectral_matches_ode(self, chart: CoordChart) -> None:
        t = np.linspace(0.0, 0.3, 7)
        spectral = trajectories_spectral(chart, t)
        ode = trajectories_ode(chart, t)
        assert np.max(np.abs(spectral.x - ode.x)) < 1e-6
        assert energy_drift(ode) < 1e-8

    def test_difference_momenta(self) -> None:
        chart = CoordChart.of([-1.0, 1.0], [0.0, 0.0])
        t = np.linspace(0.0, 0.5, 51)
        exact = trajectories_spectral(chart, t)
        approx = trajectories_spectral(chart, t, momenta="difference")
        assert np.max(np.abs(exact.p[1:-1] - approx.p[1:-1])) < 1e-3

    def test_collision(self) -> None:
        chart = CoordChart.of([-1.0, 1.0], [0.0, 0.0])
        grid = [0.0, 0.5, 1.0 - 1e-9]
        with pytest.raises(CollisionDetected) as info:
            trajectories_spectral(chart, grid, tau_sep=1e-3)
        assert info.value.trajectory.collisions == [2]
        relaxed = trajectories_spectral(chart, grid, tau_sep=1e-3, strict=False)
        assert relaxed.collisions == [2]

    def test_collision_between_grid_points(self) -> None:
        # eigenvalues 0, +-sqrt((1 - 0.6t)^2 - 9t^2): all three meet at t = 1/3.6
        chart = CoordChart.of([-1.0, 0.0, 1.0], [0.3, 0.0, -0.3])
        grid = np.linspace(0.0, 1.0, 201)
        with pytest.raises(CollisionDetected) as info:
            trajectories_spectral(chart, grid)
        collisions = info.value.trajectory.collisions
        assert grid[collisions[0]] == pytest.approx(0.28)
        assert collisions == list(range(56, 201))

    def test_outgoing_particles_never_collide(self) -> None:
        chart = CoordChart.of([-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0])
        traj = trajectories_spectral(chart, np.linspace(0.0, 1.0, 201))
        assert traj.collisions == []
        assert not np.iscomplexobj(traj.x)

    def test_ode_stops_before_collision(self) -> None:
        chart = CoordChart.of([-1.0, 1.0], [0.0, 0.0])
        with pytest.raises(StepFailure):
            trajectories_ode(chart, np.linspace(0.0, 1.0, 11), tau_sep=1e-3)

    def test_csv_header(self, chart: CoordChart) -> None:
        traj = trajectories_spectral(chart, [0.0, 0.1])
        assert traj.csv_header() == ["t", "x1", "x2", "x3", "p1", "p2", "p3", "H1", "H2", "H3"]
        assert len(traj.rows()) == 2


class TestBrackets:
    @pytest.mark.parametrize(("u", "v"), [("XY", "XXY"), ("Y", "XXX"), ("XYXY", "YYX")])
    def test_necklace_formula(self, u: str, v: str) -> None:
        assert necklace_bracket_check(u, v, 3, 5, seed=2).passed

    def test_rejects_bad_words(self) -> None:
        with pytest.raises(ValueError, match="over X and Y"):
            necklace_bracket_check("XZ", "Y", 2, seed=0)
        with pytest.raises(ValueError, match="length <= 6"):
            necklace_bracket_check("X" * 7, "Y", 2, seed=0)

    def test_pullback_of_hamiltonian(self) -> None:
        space = CoordinateRing(2, momenta=True)
        x1, x2 = space.xs()
        p1, p2 = space.p(0), space.p(1)
        d2 = (x1 - x2) ** 2
        expected = RationalFn((p1**2 + p2**2) * d2 - 2, d2)
        assert pullback_trace(space, "YY") == expected

    @pytest.mark.parametrize(("m", "k"), [(1, 1), (1, 2), (2, 3)])
    def test_coordinate_brackets(self, m: int, k: int) -> None:
        assert coordinate_poisson_check(2, m, k).passed

    def test_coordinate_bracket_range(self) -> None:
        with pytest.raises(ValueError, match="1..5"):
            coordinate_poisson_check(2, 6, 1)

    def test_hamiltonians_commute(self) -> None:
        assert hamiltonians_commute_check(3).passed
