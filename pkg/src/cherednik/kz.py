"""Numerical monodromy of the KZ connection on the regular representation.

The connection is d - sum_s (2 c_s / (1 - lambda_s)) (d alpha_s / alpha_s)(1 - s)
acting on C[W] by left multiplication. Transport is integrated segment by
segment along a complex polyline with an adaptive Runge-Kutta pair; the
braid generator of a simple reflection s is L_s composed with transport
from the base point x0 to s x0 around the hyperplane of s.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import linear_sum_assignment

from .exceptions import HyperplaneTooClose, ToleranceNotMet
from .groups import CyclicGroup, ReflectionGroup, coxeter_matrix, float_matrix, float_roots
from .models import CheckReport, EigenvalueCluster, MonodromyReport

__all__ = [
    "KZConnection",
    "MonodromyMatrix",
    "braid_generator",
    "braid_path",
    "cluster_eigenvalues",
    "conjugation_covariance_check",
    "cyclic_monodromy",
    "kz_transport",
    "monodromy_eigencheck",
    "tolerance_scaling_check",
    "transport",
]

logger = logging.getLogger(__name__)

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
CLUSTER_TOL = 1e-5


@dataclass(frozen=True)
class MonodromyMatrix:
    """Transport matrix along a polyline, with the tolerances used."""

    matrix: np.ndarray
    loop: tuple[np.ndarray, ...]
    rtol: float
    atol: float

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)


@dataclass(frozen=True)
class KZConnection:
    """Residues of the connection: roots (rows) and matrices 2c/(1-lambda) (1 - L_s)."""

    roots: np.ndarray
    residues: np.ndarray
    permutations: Mapping[int, np.ndarray]
    label: str

    @property
    def size(self) -> int:
        return self.residues.shape[1]

    @classmethod
    def regular(cls, group: ReflectionGroup, c: float | Mapping[int, float]) -> KZConnection:
        """Real group: lambda_s = -1, so the residue is c_s (1 - L_s)."""
        values = _class_values(group, c)
        perms = {w: _left_regular(group, w) for w in range(group.order)}
        ident = np.eye(group.order)
        residues = np.array(
            [values[r.class_id] * (ident - perms[r.element]) for r in group.reflection_data],
            dtype=complex,
        )
        return cls(float_roots(group).astype(complex), residues, perms, group.label)

    @classmethod
    def cyclic(cls, group: CyclicGroup, c_values: Sequence[float]) -> KZConnection:
        """Z/m on C: reflections s^j with eigenvalue zeta^j and parameter c_j."""
        m = group.m
        if len(c_values) != m - 1:
            raise ValueError(f"Z/{m} needs {m - 1} parameters, got {len(c_values)}")
        shift = np.roll(np.eye(m), 1, axis=0)
        perms = {j: np.linalg.matrix_power(shift, j) for j in range(m)}
        ident = np.eye(m)
        total = np.zeros((m, m), dtype=complex)
        for j in range(1, m):
            zeta_j = cmath.exp(2j * math.pi * j / m)
            total += 2 * c_values[j - 1] / (1 - zeta_j) * (ident - perms[j])
        return cls(np.ones((1, 1), dtype=complex), total[None], perms, group.label)

    def matrix_at(self, point: np.ndarray, direction: np.ndarray) -> np.ndarray:
        weights = (self.roots @ direction) / (self.roots @ point)
        return np.tensordot(weights, self.residues, axes=1)

    def hyperplane_distance(self, point: np.ndarray) -> float:
        norms = np.linalg.norm(self.roots, axis=1)
        return float(np.min(np.abs(self.roots @ point) / norms))


def _class_values(group: ReflectionGroup, c: float | Mapping[int, float]) -> dict[int, float]:
    if isinstance(c, Mapping):
        missing = set(range(group.n_classes)) - set(c)
        if missing:
            raise ValueError(f"no parameter for reflection classes {sorted(missing)}")
        return {k: float(v) for k, v in c.items()}
    return {k: float(c) for k in range(group.n_classes)}


def _left_regular(group: ReflectionGroup, w: int) -> np.ndarray:
    """Permutation matrix of e_u -> e_(wu)."""
    n = group.order
    out = np.zeros((n, n))
    for u in range(n):
        out[group.multiply(w, u), u] = 1
    return out


def _check_path(connection: KZConnection, loop: Sequence[np.ndarray], tau_sep: float) -> None:
    for a, b in itertools.pairwise(loop):
        for s in np.linspace(0.0, 1.0, 65):
            distance = connection.hyperplane_distance(a + s * (b - a))
            if distance < tau_sep:
                raise HyperplaneTooClose(
                    f"path passes within {distance:.3g} of a reflection hyperplane"
                )


def _segment(
    connection: KZConnection, a: np.ndarray, b: np.ndarray, start: np.ndarray, rtol: float, atol: float
) -> np.ndarray:
    n = connection.size
    direction = b - a

    def rhs(s: float, y: np.ndarray) -> np.ndarray:
        F = y.reshape(n, n)
        return (connection.matrix_at(a + s * direction, direction) @ F).ravel()

    sol = solve_ivp(rhs, (0.0, 1.0), start.ravel(), method="DOP853", rtol=rtol, atol=atol)
    if sol.status != 0:
        raise ToleranceNotMet(f"transport did not converge: {sol.message}")
    logger.debug("segment: %d evaluations", sol.nfev)
    return sol.y[:, -1].reshape(n, n)


def transport(
    connection: KZConnection,
    loop: Sequence[Sequence[complex]],
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    tau_sep: float = 1e-8,
    verify: bool = False,
    verify_tol: float = 1e-8,
) -> MonodromyMatrix:
    """Transport along the polyline ``loop``; the result maps the fiber at the
    first point to the fiber at the last.

    With ``verify`` the reversed path is transported too and the product
    must be the identity within ``verify_tol``.

    Raises:
        HyperplaneTooClose: If the path passes within ``tau_sep`` of a
            hyperplane.
        ToleranceNotMet: If integration fails or the reverse check fails.
    """
    points = tuple(np.asarray(p, dtype=complex) for p in loop)
    if len(points) < 2:
        raise ValueError("a path needs at least two points")
    _check_path(connection, points, tau_sep)
    F = np.eye(connection.size, dtype=complex)
    for a, b in itertools.pairwise(points):
        F = _segment(connection, a, b, F, rtol, atol)
    if verify:
        back = np.eye(connection.size, dtype=complex)
        for a, b in itertools.pairwise(points[::-1]):
            back = _segment(connection, a, b, back, rtol, atol)
        residual = float(np.linalg.norm(back @ F - np.eye(connection.size)))
        if residual > verify_tol:
            raise ToleranceNotMet(f"reverse transport misses the identity by {residual:.3g}")
    return MonodromyMatrix(F, points, rtol, atol)


def kz_transport(
    group: ReflectionGroup,
    c: float | Mapping[int, float],
    loop: Sequence[Sequence[complex]],
    **options: Any,
) -> MonodromyMatrix:
    """Transport on C[W] for a real group; ``options`` as for ``transport``."""
    return transport(KZConnection.regular(group, c), loop, **options)


def braid_path(group: ReflectionGroup, i: int, *, height: float = 0.5) -> list[np.ndarray]:
    """Rectangle from x0 to s_i x0 over the hyperplane of s_i.

    x0 is the chamber point with alpha_j(x0) = 1. Writing x = y + (z/2) alpha_i
    with y on the hyperplane, z runs 1 -> 1 + ih -> -1 + ih -> -1, so the
    path keeps Im z = h away from every other hyperplane it could meet.
    """
    x0 = np.asarray(group.chamber, dtype=complex)
    alpha = _simple_roots(group)[i]
    z0 = complex(alpha @ x0)
    y = x0 - z0 / 2 * alpha
    corners = (z0, z0 + 1j * height * abs(z0), -z0 + 1j * height * abs(z0), -z0)
    return [y + z / 2 * alpha for z in corners]


def _simple_roots(group: ReflectionGroup) -> np.ndarray:
    roots = float_roots(group)
    index = {r.element: k for k, r in enumerate(group.reflection_data)}
    return np.array([roots[index[g]] for g in group.generators])


def braid_generator(
    group: ReflectionGroup,
    connection: KZConnection,
    i: int,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    tau_sep: float = 1e-8,
) -> np.ndarray:
    """T_i = L_(s_i) composed with transport along ``braid_path(group, i)``."""
    path = transport(connection, braid_path(group, i), rtol=rtol, atol=atol, tau_sep=tau_sep)
    return connection.permutations[group.generators[i]] @ path.matrix


def cluster_eigenvalues(values: Sequence[complex], tol: float = CLUSTER_TOL) -> list[EigenvalueCluster]:
    """Group nearby eigenvalues; sorted by (re, im) and rounded for stable output."""
    clusters: list[list[complex]] = []
    for value in values:
        for cluster in clusters:
            if abs(cluster[0] - value) < tol:
                cluster.append(value)
                break
        else:
            clusters.append([value])
    out = []
    for cluster in clusters:
        centre = complex(np.mean(cluster))
        out.append(
            EigenvalueCluster(re=round(centre.real, 9) + 0.0, im=round(centre.imag, 9) + 0.0, mult=len(cluster))
        )
    return sorted(out, key=lambda e: (e.re, e.im))


def _braid_residual(group: ReflectionGroup, gens: Sequence[np.ndarray]) -> float | None:
    if group.rank < 2:
        return None
    orders = coxeter_matrix(group)
    worst = 0.0
    for i, j in itertools.combinations(range(group.rank), 2):
        left = np.eye(gens[0].shape[0], dtype=complex)
        right = left.copy()
        for k in range(orders[i][j]):
            left = left @ gens[i if k % 2 == 0 else j]
            right = right @ gens[j if k % 2 == 0 else i]
        worst = max(worst, float(np.linalg.norm(left - right)))
    return worst


def monodromy_eigencheck(
    group: ReflectionGroup,
    c: float | Mapping[int, float],
    class_id: int = 0,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    tau_sep: float = 1e-8,
) -> MonodromyReport:
    """Braid generator of a simple reflection in ``class_id``, its eigenvalues
    and the residual of (T - 1)(T + q) with q = exp(2 pi i c_s)."""
    values = _class_values(group, c)
    if class_id not in values:
        raise ValueError(f"{group.label} has no reflection class {class_id}")
    connection = KZConnection.regular(group, values)
    class_of = {r.element: r.class_id for r in group.reflection_data}
    gens = [
        braid_generator(group, connection, i, rtol=rtol, atol=atol, tau_sep=tau_sep)
        for i in range(group.rank)
    ]
    index = next(i for i, g in enumerate(group.generators) if class_of[g] == class_id)
    T = gens[index]
    c_s = values[class_id]
    q = cmath.exp(2j * math.pi * c_s)
    ident = np.eye(group.order)
    residual = float(np.linalg.norm((T - ident) @ (T + q * ident)))
    logger.info("%s c=%s class %d: quadratic residual %.3g", group.label, c_s, class_id, residual)
    return MonodromyReport(
        group=group.label,
        c=c_s,
        class_=class_id,
        eigenvalues=cluster_eigenvalues(np.linalg.eigvals(T)),
        relation_residual=residual,
        braid_residual=_braid_residual(group, gens),
    )


def _spectral_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Largest gap between the spectra of ``a`` and ``b`` under the best matching."""
    ea, eb = np.linalg.eigvals(a), np.linalg.eigvals(b)
    cost = np.abs(ea[:, None] - eb[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def conjugation_covariance_check(
    group: ReflectionGroup,
    c: float | Mapping[int, float],
    elements: Sequence[int] | None = None,
    *,
    i: int = 0,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    tol: float = 1e-6,
) -> CheckReport:
    """Transport along w(path) against L_w F L_w^-1 for the braid path of s_i.

    The braid generator T = L_s F then conjugates to L_(wsw^-1) L_w F L_w^-1,
    whose spectrum must match T's. ``elements`` defaults to all of W.
    """
    connection = KZConnection.regular(group, c)
    path = braid_path(group, i)
    F = transport(connection, path, rtol=rtol, atol=atol).matrix
    s = group.generators[i]
    T = connection.permutations[s] @ F
    targets = list(range(group.order)) if elements is None else list(elements)
    worst_matrix = worst_spectrum = 0.0
    for w in targets:
        W = float_matrix(group, w)
        moved = transport(connection, [W @ x for x in path], rtol=rtol, atol=atol).matrix
        L = connection.permutations[w]
        worst_matrix = max(worst_matrix, float(np.linalg.norm(moved - L @ F @ L.T)))
        conjugate = group.multiply(group.multiply(w, s), group.inverse(w))
        worst_spectrum = max(
            worst_spectrum, _spectral_distance(connection.permutations[conjugate] @ moved, T)
        )
    logger.info(
        "%s conjugated transport: matrix residual %.3g, spectral distance %.3g",
        group.label,
        worst_matrix,
        worst_spectrum,
    )
    witness = None
    if max(worst_matrix, worst_spectrum) > tol:
        witness = f"matrix residual {worst_matrix:.3g}, spectral distance {worst_spectrum:.3g}"
    return CheckReport.from_witness(
        "kz-conjugation",
        group.label,
        witness,
        elements=len(targets),
        matrix_residual=worst_matrix,
        spectral_distance=worst_spectrum,
    )


def cyclic_monodromy(
    m: int,
    c_values: Sequence[float],
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    chords: int = 8,
) -> list[EigenvalueCluster]:
    """Eigenvalues of the generator of pi_1(C*/(Z/m)) on C[Z/m], as an unordered set.

    The path runs from 1 to exp(2 pi i / m) along chords of the unit circle;
    the fibre at the end is pulled back by L_s^-1.
    """
    group = CyclicGroup(m)
    connection = KZConnection.cyclic(group, c_values)
    arc = [[cmath.exp(2j * math.pi * k / (m * chords))] for k in range(chords + 1)]
    path = transport(connection, arc, rtol=rtol, atol=atol)
    T = np.linalg.inv(connection.permutations[1]) @ path.matrix
    return cluster_eigenvalues(np.linalg.eigvals(T))


def tolerance_scaling_check(
    group: ReflectionGroup,
    c: float,
    tolerances: tuple[float, float] = (1e-6, 1e-10),
    *,
    slack: float = 100.0,
    floor: float = 1e-11,
) -> CheckReport:
    """Quadratic-relation residual at a loose and a tight integrator tolerance.

    The residual is an integration error, so it must shrink with the
    tolerance, linearly up to ``slack``: r_tight <= slack * r_loose * tight / loose.
    Residuals under ``floor`` sit at rounding level and always pass.
    """
    loose, tight = sorted(tolerances, reverse=True)
    residuals = [
        monodromy_eigencheck(group, c, rtol=tol, atol=tol * 1e-2).relation_residual
        for tol in (loose, tight)
    ]
    bound = max(floor, slack * residuals[0] * tight / loose)
    witness = None
    if residuals[1] > bound:
        witness = (
            f"residual {residuals[0]:.3g} -> {residuals[1]:.3g} while the tolerance "
            f"shrank {loose / tight:.3g}-fold"
        )
    return CheckReport.from_witness(
        "kz-tolerance",
        group.label,
        witness,
        tolerances=[loose, tight],
        residuals=residuals,
        bound=bound,
    )
