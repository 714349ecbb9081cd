"""Calogero-Moser space, its integrable flows and its Poisson structure.

Points are pairs (X, Y) of complex n x n matrices with XY - YX + g rank
one. The chart xi sends positions and momenta to X = diag(x),
Y_ij = g / (x_i - x_j), Y_ii = p_i, and Tr Y^2 becomes the Calogero-Moser
Hamiltonian sum p_i^2 - g^2 sum_(i != j) 1 / (x_i - x_j)^2.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import linear_sum_assignment

from .exact import CoordinateRing, RationalFn, divide_exact_by_linear
from .exceptions import CollisionDetected, SeparationTooSmall, StepFailure
from .models import CheckReport, TrajectoryRow

__all__ = [
    "CMPoint",
    "CoordChart",
    "DEFAULT_TAU_SEP",
    "REAL_LINE_TOL",
    "Trajectory",
    "canonical_bracket",
    "chart_of",
    "conserved_quantities",
    "coordinate_poisson_check",
    "energy_drift",
    "flow",
    "flow_invariance_check",
    "hamiltonians_commute_check",
    "necklace_bracket",
    "necklace_bracket_check",
    "poisson_bracket",
    "pullback_trace",
    "rank_one_residual",
    "trajectories_ode",
    "trajectories_spectral",
    "xi_map",
]

logger = logging.getLogger(__name__)

DEFAULT_TAU_SEP = 1e-8
#: Relative imaginary part at which real positions count as having left the real line.
REAL_LINE_TOL = 1e-6


@dataclass(frozen=True)
class CoordChart:
    """Positions x (pairwise distinct) and momenta p."""

    x: np.ndarray
    p: np.ndarray

    @classmethod
    def of(cls, x: Sequence[complex], p: Sequence[complex]) -> CoordChart:
        xs, ps = np.asarray(x), np.asarray(p)
        if xs.shape != ps.shape or xs.ndim != 1:
            raise ValueError("x and p must be vectors of equal length")
        dtype = np.result_type(xs, ps, float)
        return cls(xs.astype(dtype), ps.astype(dtype))

    @property
    def n(self) -> int:
        return len(self.x)

    def min_separation(self) -> float:
        return _min_separation(self.x)


@dataclass(frozen=True)
class CMPoint:
    X: np.ndarray
    Y: np.ndarray
    g: float = 1.0

    @property
    def n(self) -> int:
        return self.X.shape[0]


def _min_separation(values: np.ndarray) -> float:
    if len(values) < 2:
        return math.inf
    diffs = np.abs(values[:, None] - values[None, :])
    return float(diffs[np.triu_indices(len(values), 1)].min())


def xi_map(chart: CoordChart, *, g: float = 1.0, tau_sep: float = DEFAULT_TAU_SEP) -> CMPoint:
    """X = diag(x), Y_ij = g / (x_i - x_j), Y_ii = p_i.

    Raises:
        SeparationTooSmall: If two positions are within ``tau_sep``.
    """
    sep = chart.min_separation()
    if sep <= tau_sep:
        raise SeparationTooSmall(f"positions {sep:.3g} apart (threshold {tau_sep:.3g})")
    x = chart.x
    n = chart.n
    dtype = x.dtype
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1)
    Y = (g / diff).astype(dtype)
    np.fill_diagonal(Y, chart.p)
    return CMPoint(np.diag(x).astype(dtype), Y, g)


def rank_one_residual(point: CMPoint) -> float:
    """Second largest singular value of XY - YX + g; zero on the variety."""
    T = point.X @ point.Y - point.Y @ point.X + point.g * np.eye(point.n)
    s = np.linalg.svd(T, compute_uv=False)
    return float(s[1]) if len(s) > 1 else 0.0


def flow(point: CMPoint, i: int, t: float) -> CMPoint:
    """(X + i t Y^(i-1), Y)."""
    if i < 1:
        raise ValueError("flows are indexed from 1")
    step = i * t * np.linalg.matrix_power(point.Y, i - 1)
    return CMPoint(point.X + step, point.Y, point.g)


def conserved_quantities(point: CMPoint) -> np.ndarray:
    """H_j = Tr(Y^j), j = 1..n."""
    out = []
    power = np.eye(point.n, dtype=point.Y.dtype)
    for _ in range(point.n):
        power = power @ point.Y
        out.append(np.trace(power))
    return np.array(out)


def chart_of(point: CMPoint) -> CoordChart:
    """Inverse of xi: eigenvalues of X and the diagonal of Y in that eigenbasis."""
    x, V = np.linalg.eig(point.X)
    p = np.diag(np.linalg.solve(V, point.Y @ V))
    order = np.lexsort((x.imag, x.real))
    return CoordChart.of(_realify(x[order]), _realify(p[order]))


def flow_invariance_check(
    n: int, *, seed: int, tol: float = 1e-10, times: int = 11
) -> CheckReport:
    """Tr(Y^j) is unchanged and XY - YX + g stays rank one along every flow
    and under a random conjugation, starting from a random chart."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    x = np.sort(rng.uniform(-2, 2, n)) + np.arange(n)
    p = rng.normal(size=n)
    point = xi_map(CoordChart.of(x, p))
    h0 = conserved_quantities(point)
    worst = rank_one_residual(point)
    for i in range(1, n + 1):
        for t in np.linspace(0.0, 1.0, times):
            moved = flow(point, i, float(t))
            worst = max(worst, rank_one_residual(moved))
            if not np.array_equal(conserved_quantities(moved), h0):
                return CheckReport.from_witness(
                    "cm-flows", f"n={n}", f"Tr(Y^j) changed under flow {i} at t={t:.3g}"
                )
    A = rng.normal(size=(n, n)) + n * np.eye(n)
    A_inv = np.linalg.inv(A)
    conj = CMPoint(A @ point.X @ A_inv, A @ point.Y @ A_inv, point.g)
    worst = max(worst, rank_one_residual(conj))
    witness = None if worst <= tol else f"rank-one residual {worst:.3g}"
    return CheckReport.from_witness("cm-flows", f"n={n}", witness, max_residual=worst)


def _realify(values: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if np.iscomplexobj(values) and np.all(np.abs(values.imag) <= tol * np.maximum(1, np.abs(values))):
        return values.real.copy()
    return values


# === Trajectories ===


@dataclass
class Trajectory:
    """Positions, momenta and H_1..H_n on a time grid."""

    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    conserved: np.ndarray
    collisions: list[int] = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.x.shape[1]

    def rows(self) -> list[TrajectoryRow]:
        return [
            TrajectoryRow(
                t=float(self.t[k]),
                x=[complex(v) for v in self.x[k]],
                p=[complex(v) for v in self.p[k]],
                h=[complex(v) for v in self.conserved[k]],
            )
            for k in range(len(self.t))
        ]

    def csv_header(self) -> list[str]:
        n = self.n
        return [
            "t",
            *(f"x{i + 1}" for i in range(n)),
            *(f"p{i + 1}" for i in range(n)),
            *(f"H{i + 1}" for i in range(n)),
        ]


def _hamiltonians(x: np.ndarray, p: np.ndarray, g: float) -> np.ndarray:
    """Tr Y(x, p)^j without the separation guard (used along paths)."""
    n = len(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        Y = (g / diff).astype(complex)
    np.fill_diagonal(Y, p)
    return conserved_quantities(CMPoint(np.diag(x).astype(complex), Y, g))[:n]


def _match(previous: np.ndarray, current: np.ndarray) -> np.ndarray:
    """Reorder ``current`` to minimise the total displacement from ``previous``."""
    cost = np.abs(previous[:, None] - current[None, :])
    _, cols = linear_sum_assignment(cost)
    return cols


def _on_real_line(values: np.ndarray) -> bool:
    scale = max(1.0, float(np.max(np.abs(values))))
    return bool(np.max(np.abs(values.imag)) <= REAL_LINE_TOL * scale)


def _order_changed(previous: np.ndarray, current: np.ndarray) -> bool:
    """Matched real eigenvalues that passed through each other."""
    return bool(np.any(np.argsort(previous.real) != np.argsort(current.real)))


def trajectories_spectral(
    chart0: CoordChart,
    t_grid: Sequence[float],
    *,
    g: float = 1.0,
    tau_sep: float = DEFAULT_TAU_SEP,
    momenta: Literal["exact", "difference"] = "exact",
    strict: bool = True,
) -> Trajectory:
    """x_i(t) = eigenvalues of X_0 + 2t Y_0, tracked across the grid.

    ``momenta="exact"`` reads p from the diagonal of Y_0 in the eigenbasis
    of X_t; ``"difference"`` uses p = x'/2 by centred differences.

    For real initial data a collision between two grid points shows up
    as positions leaving the real line or changing order; the first grid
    point after it is flagged, as are later points off the real line.

    Raises:
        CollisionDetected: If eigenvalues come within ``tau_sep`` or cross
            between grid points; the trajectory is attached to the
            exception. Suppressed when ``strict`` is false.
    """
    t = np.asarray(t_grid, dtype=float)
    start = xi_map(chart0, g=g, tau_sep=tau_sep)
    X0, Y0 = start.X.astype(complex), start.Y.astype(complex)
    n = chart0.n
    xs = np.zeros((len(t), n), dtype=complex)
    ps = np.zeros((len(t), n), dtype=complex)
    real_data = not np.iscomplexobj(chart0.x)
    collisions = []
    previous = chart0.x.astype(complex)
    previous_real = real_data
    for k, tk in enumerate(t):
        values, V = np.linalg.eig(X0 + 2 * tk * Y0)
        order = _match(previous, values)
        values, V = values[order], V[:, order]
        crossed = False
        if real_data:
            on_line = _on_real_line(values)
            swapped = previous_real and on_line and _order_changed(previous, values)
            crossed = not on_line or swapped
            previous_real = on_line
        if crossed or _min_separation(values) < tau_sep:
            collisions.append(k)
        xs[k] = values
        ps[k] = np.diag(np.linalg.solve(V, Y0 @ V))
        previous = values
    if momenta == "difference":
        ps = np.gradient(xs, t, axis=0) / 2 if len(t) > 1 else ps
    conserved = np.array([_hamiltonians(xs[k], ps[k], g) for k in range(len(t))])
    traj = Trajectory(t, _realify(xs), _realify(ps), _realify(conserved), collisions)
    if collisions:
        logger.warning("eigenvalue collision at %d grid points", len(collisions))
        if strict:
            raise CollisionDetected(
                f"eigenvalues collide by t={t[collisions[0]]:.6g} (tau_sep {tau_sep:.3g})", trajectory=traj
            )
    return traj


def trajectories_ode(
    chart0: CoordChart,
    t_grid: Sequence[float],
    *,
    g: float = 1.0,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    tau_sep: float = DEFAULT_TAU_SEP,
) -> Trajectory:
    """Integrate x' = 2p, p_i' = -4 g^2 sum_(j != i) (x_i - x_j)^-3 with DOP853.

    Raises:
        StepFailure: If the integrator fails or particles come within
            ``tau_sep`` of each other.
    """
    t = np.asarray(t_grid, dtype=float)
    n = chart0.n
    y0 = np.concatenate([chart0.x, chart0.p])
    g2 = g * g

    def rhs(_: float, y: np.ndarray) -> np.ndarray:
        x, p = y[:n], y[n:]
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        force = -4 * g2 * (diff**-3).sum(axis=1)
        return np.concatenate([2 * p, force])

    def near_collision(_: float, y: np.ndarray) -> float:
        return _min_separation(y[:n]) - tau_sep

    near_collision.terminal = True  # type: ignore[attr-defined]

    sol = solve_ivp(
        rhs,
        (float(t[0]), float(t[-1])),
        y0,
        method="DOP853",
        t_eval=t,
        rtol=rtol,
        atol=atol,
        events=near_collision if n > 1 else None,
    )
    if sol.status == -1:
        raise StepFailure(f"integration failed: {sol.message}")
    if sol.status == 1:
        raise StepFailure(f"particles within {tau_sep:.3g} at t={sol.t_events[0][0]:.6g}")
    logger.debug("DOP853: %d evaluations, %d grid points", sol.nfev, len(sol.t))
    xs, ps = sol.y[:n].T, sol.y[n:].T
    conserved = np.array([_hamiltonians(xs[k], ps[k], g) for k in range(len(t))])
    return Trajectory(t, xs, ps, _realify(conserved))


def energy_drift(trajectory: Trajectory) -> float:
    """max_t |H(t) - H(0)| / |H(0)| for H = H_2 (H_1 when n = 1)."""
    column = 1 if trajectory.n > 1 else 0
    h = trajectory.conserved[:, column]
    scale = max(abs(h[0]), 1e-300)
    return float(np.max(np.abs(h - h[0])) / scale)


# === Poisson brackets of trace functions ===


def _word_product(word: str, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    out = np.eye(X.shape[0], dtype=complex)
    for letter in word:
        out = out @ (X if letter == "X" else Y)
    return out


def _check_word(word: str) -> None:
    if not word or set(word) - {"X", "Y"}:
        raise ValueError(f"words are non-empty strings over X and Y, got {word!r}")


def _trace_gradients(word: str, X: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """d Tr(word) / dM_ab for M = X, Y by forward-mode differentiation per entry."""
    n = X.shape[0]
    grads = {"X": np.zeros((n, n), dtype=complex), "Y": np.zeros((n, n), dtype=complex)}
    zero = np.zeros((n, n), dtype=complex)
    for name in ("X", "Y"):
        if name not in word:
            continue
        for a in range(n):
            for b in range(n):
                unit = np.zeros((n, n), dtype=complex)
                unit[a, b] = 1
                value = np.eye(n, dtype=complex)
                tangent = np.zeros((n, n), dtype=complex)
                for letter in word:
                    m = X if letter == "X" else Y
                    dm = unit if letter == name else zero
                    tangent = tangent @ m + value @ dm
                    value = value @ m
                grads[name][a, b] = np.trace(tangent)
    return grads["X"], grads["Y"]


def poisson_bracket(u: str, v: str, X: np.ndarray, Y: np.ndarray) -> complex:
    """{Tr u, Tr v} from {Y_ab, X_cd} = delta_ad delta_bc, entry by entry."""
    ux, uy = _trace_gradients(u, X, Y)
    vx, vy = _trace_gradients(v, X, Y)
    return complex(np.sum(uy * vx.T) - np.sum(ux.T * vy))


def _rotations(word: str, letter: str) -> list[str]:
    return [word[i + 1 :] + word[:i] for i, c in enumerate(word) if c == letter]


def necklace_bracket(u: str, v: str, X: np.ndarray, Y: np.ndarray) -> complex:
    """Double sum over cut letters: Y in u against X in v, minus X in u against Y in v."""
    total = 0j
    for ru in _rotations(u, "Y"):
        for rv in _rotations(v, "X"):
            total += np.trace(_word_product(ru + rv, X, Y))
    for ru in _rotations(u, "X"):
        for rv in _rotations(v, "Y"):
            total -= np.trace(_word_product(ru + rv, X, Y))
    return complex(total)


def necklace_bracket_check(
    u: str, v: str, n: int, n_samples: int = 20, *, seed: int, tol: float = 1e-9
) -> CheckReport:
    """Both bracket evaluations at random complex matrix pairs."""
    _check_word(u)
    _check_word(v)
    if len(u) > 6 or len(v) > 6 or n > 6:
        raise ValueError("words of length <= 6 and n <= 6 only")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    worst = 0.0
    for _ in range(n_samples):
        X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        Y = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        a = poisson_bracket(u, v, X, Y)
        b = necklace_bracket(u, v, X, Y)
        worst = max(worst, abs(a - b) / max(1.0, abs(a), abs(b)))
    witness = None if worst <= tol else f"relative discrepancy {worst:.3g}"
    return CheckReport.from_witness(
        "necklace", f"gl{n}", witness, u=u, v=v, max_relative_error=worst
    )


# === Exact brackets in the (x, p) chart ===


def pullback_trace(space: CoordinateRing, word: str) -> RationalFn:
    """xi^*(Tr word) as an exact rational function of (x, p).

    With V = prod_(i<j) (x_i - x_j), V Y is polynomial, so a word with k
    letters Y pulls back to Tr(word in X, VY) / V^k.
    """
    _check_word(word)
    n = space.nvars
    xs = space.xs()
    vander = space.one()
    for i in range(n):
        for j in range(i + 1, n):
            vander = vander * (xs[i] - xs[j])
    zero = space.zero()
    X = [[xs[i] if i == j else zero for j in range(n)] for i in range(n)]
    Y = [[space.zero() for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                Y[i][j] = vander * space.p(i)
            else:
                Y[i][j] = divide_exact_by_linear(vander, xs[i] - xs[j])
    product = [[space.one() if i == j else zero for j in range(n)] for i in range(n)]
    for letter in word:
        m = X if letter == "X" else Y
        product = [
            [sum((product[i][k] * m[k][j] for k in range(n)), zero) for j in range(n)]
            for i in range(n)
        ]
    trace = sum((product[i][i] for i in range(n)), zero)
    return RationalFn(trace, vander ** word.count("Y"))


def canonical_bracket(f: RationalFn, g: RationalFn) -> RationalFn:
    """{f, g} = sum_i df/dp_i dg/dx_i - df/dx_i dg/dp_i, so {p_i, x_j} = delta_ij."""
    out = RationalFn.from_poly(f.space.zero())
    for i in range(f.space.nvars):
        out = out + f.diff_p(i) * g.diff_x(i) - f.diff_x(i) * g.diff_p(i)
    return out


def coordinate_poisson_check(n: int, m: int, k: int) -> CheckReport:
    """{a_m, a_k} = 0, {b_m, a_k} = k a_(m+k-1), {b_m, b_k} = (k - m) b_(m+k-1).

    a_j = Tr X^j and b_j = Tr X^j Y pulled back through xi.
    """
    if not (1 <= m <= 5 and 1 <= k <= 5):
        raise ValueError("m and k must lie in 1..5")
    space = CoordinateRing(n, momenta=True)

    def a(j: int) -> RationalFn:
        return pullback_trace(space, "X" * j)

    def b(j: int) -> RationalFn:
        return pullback_trace(space, "X" * j + "Y")

    cases = {
        f"{{a{m},a{k}}}": (canonical_bracket(a(m), a(k)), RationalFn.from_poly(space.zero())),
        f"{{b{m},a{k}}}": (canonical_bracket(b(m), a(k)), a(m + k - 1) * k),
        f"{{b{m},b{k}}}": (canonical_bracket(b(m), b(k)), b(m + k - 1) * (k - m)),
    }
    for name, (lhs, rhs) in cases.items():
        if lhs != rhs:
            return CheckReport.from_witness(
                "cm-poisson", f"n={n}", f"{name}: {lhs.to_text()} != {rhs.to_text()}"
            )
    return CheckReport.from_witness("cm-poisson", f"n={n}", None, m=m, k=k)


def hamiltonians_commute_check(n: int, j_max: int | None = None) -> CheckReport:
    """{xi^* Tr Y^i, xi^* Tr Y^j} = 0 exactly."""
    space = CoordinateRing(n, momenta=True)
    top = j_max or n
    hs = [pullback_trace(space, "Y" * j) for j in range(1, top + 1)]
    for i in range(top):
        for j in range(i + 1, top):
            if not canonical_bracket(hs[i], hs[j]).is_zero:
                return CheckReport.from_witness(
                    "cm-involution", f"n={n}", f"{{H{i + 1},H{j + 1}}} != 0"
                )
    return CheckReport.from_witness("cm-involution", f"n={n}", None, j_max=top)
