"""Finite real reflection groups with explicit orthogonal matrices.

Groups are enumerated by breadth-first search over the simple reflections,
so every element carries its lexicographically smallest reduced word and
its length. Roots are normalised to (alpha, alpha) = 2 in orthonormal
coordinates, which puts all root coordinates into Q or one real quadratic
field Q(sqrt d).
"""

from __future__ import annotations

import functools
import logging
import math
import re
from collections import deque
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, TypeAlias

import numpy as np
import sympy

from .exact import CoordinateRing, Scalar, scalar_field, scalar_to_complex, to_scalar
from .exceptions import FactorizationFailed, OrderCapExceeded, UnsupportedType

__all__ = [
    "DEFAULT_ORDER_CAP",
    "CyclicGroup",
    "ReflectionData",
    "ReflectionGroup",
    "build_group",
    "conjugation_check",
    "coxeter_matrix",
    "degree_table",
    "degrees",
    "float_matrix",
    "float_roots",
    "maximal_parabolics",
    "pairing",
    "poincare_polynomial",
    "q_integer",
    "reflections",
    "stabilizer",
    "standard_parabolic",
]

logger = logging.getLogger(__name__)

DEFAULT_ORDER_CAP = 1_000_000

Vector: TypeAlias = tuple[Scalar, ...]
Matrix: TypeAlias = tuple[tuple[Scalar, ...], ...]

_q = sympy.Symbol("q")


# === Linear algebra over the scalar field ===


def pairing(u: Sequence[Scalar], v: Sequence[Scalar], domain: Any) -> Scalar:
    total = domain.zero
    for a, b in zip(u, v, strict=True):
        if a and b:
            total += a * b
    return total


def _identity(dim: int, domain: Any) -> Matrix:
    return tuple(
        tuple(domain.one if i == j else domain.zero for j in range(dim)) for i in range(dim)
    )


def _matmul(a: Matrix, b: Matrix, domain: Any) -> Matrix:
    cols = list(zip(*b))
    return tuple(tuple(pairing(row, col, domain) for col in cols) for row in a)


def _matvec(a: Matrix, v: Sequence[Scalar], domain: Any) -> Vector:
    return tuple(pairing(row, v, domain) for row in a)


def _reflection_matrix(root: Vector, domain: Any) -> Matrix:
    """s = 1 - alpha alpha^T, valid because (alpha, alpha) = 2."""
    dim = len(root)
    return tuple(
        tuple(
            (domain.one if i == j else domain.zero) - root[i] * root[j]
            for j in range(dim)
        )
        for i in range(dim)
    )


def _to_float(v: Sequence[Scalar], domain: Any) -> np.ndarray:
    return np.array([scalar_to_complex(a, domain).real for a in v])


# === Group types ===


@dataclass(frozen=True)
class ReflectionData:
    """One reflection: its matrix, root, coroot, eigenvalue and class."""

    element: int
    matrix: Matrix
    root: Vector
    coroot: Vector
    class_id: int
    eigenvalue: int = -1


@dataclass(frozen=True, eq=False)
class ReflectionGroup:
    """A finite real reflection group enumerated element by element."""

    label: str
    rank: int
    dim: int
    sqrt_d: int
    simple_roots: tuple[Vector, ...]
    elements: tuple[Matrix, ...]
    words: tuple[tuple[int, ...], ...]
    right_table: tuple[tuple[int, ...], ...]
    reflection_data: tuple[ReflectionData, ...]
    n_classes: int
    chamber: tuple[float, ...]
    _index: dict[Matrix, int] = field(repr=False)

    @property
    def domain(self) -> Any:
        return scalar_field(self.sqrt_d)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def generators(self) -> tuple[int, ...]:
        return tuple(self.right_table[i][0] for i in range(self.rank))

    def length(self, w: int) -> int:
        return len(self.words[w])

    def index_of(self, matrix: Matrix) -> int:
        return self._index[matrix]

    def element_of_word(self, word: Iterable[int]) -> int:
        w = 0
        for letter in word:
            w = self.right_table[letter][w]
        return w

    def canonical_word(self, w: int) -> tuple[int, ...]:
        return self.words[w]

    def multiply(self, u: int, v: int) -> int:
        w = u
        for letter in self.words[v]:
            w = self.right_table[letter][w]
        return w

    def inverse(self, w: int) -> int:
        return self.element_of_word(reversed(self.words[w]))

    @functools.cached_property
    def left_table(self) -> tuple[tuple[int, ...], ...]:
        """left_table[i][w] is the index of s_i w."""
        return tuple(
            tuple(self.element_of_word((i, *self.words[w])) for w in range(self.order))
            for i in range(self.rank)
        )

    def act(self, w: int, vector: Sequence[Any]) -> Vector:
        domain = self.domain
        return _matvec(self.elements[w], [to_scalar(a, domain) for a in vector], domain)

    def space(self, params: Sequence[str] = (), *, momenta: bool = False) -> CoordinateRing:
        return CoordinateRing(self.dim, tuple(params), self.sqrt_d, momenta)

    def reflections_of_class(self, class_id: int) -> list[ReflectionData]:
        return [r for r in self.reflection_data if r.class_id == class_id]

    def __repr__(self) -> str:
        return f"ReflectionGroup({self.label!r}, order={self.order})"


@dataclass(frozen=True)
class CyclicGroup:
    """Rank-1 cyclic group Z/m acting on C by a primitive m-th root of unity.

    The "reflections" s^j, j = 1..m-1, have eigenvalue zeta^j and are stored
    by their exponent j only; no cyclotomic scalars are ever formed.
    """

    m: int

    @property
    def label(self) -> str:
        return f"Zm:{self.m}"

    @property
    def order(self) -> int:
        return self.m

    @property
    def rank(self) -> int:
        return 1

    @property
    def reflection_exponents(self) -> tuple[int, ...]:
        return tuple(range(1, self.m))

    def degrees(self) -> list[int]:
        return [self.m]


# === Construction ===


def _enumerate(
    label: str,
    simple_roots: Sequence[Vector],
    dim: int,
    sqrt_d: int,
    order_cap: int,
) -> ReflectionGroup:
    domain = scalar_field(sqrt_d)
    gens = [_reflection_matrix(tuple(r), domain) for r in simple_roots]
    rank = len(gens)
    identity = _identity(dim, domain)
    elements: list[Matrix] = [identity]
    words: list[tuple[int, ...]] = [()]
    index: dict[Matrix, int] = {identity: 0}
    right: list[list[int]] = [[] for _ in range(rank)]
    queue = deque([0])
    while queue:
        w = queue.popleft()
        for i, g in enumerate(gens):
            prod = _matmul(elements[w], g, domain)
            j = index.get(prod)
            if j is None:
                j = len(elements)
                if j >= order_cap:
                    raise OrderCapExceeded(
                        f"{label}: more than {order_cap} elements enumerated"
                    )
                index[prod] = j
                elements.append(prod)
                words.append((*words[w], i))
                queue.append(j)
            right[i].append(j)

    chamber = _chamber_vector(simple_roots, dim, domain)
    data, n_classes = _reflection_data(
        simple_roots, gens, elements, words, index, chamber, domain
    )
    logger.info(
        "built %s: order %d, %d reflections in %d classes",
        label,
        len(elements),
        len(data),
        n_classes,
    )
    return ReflectionGroup(
        label=label,
        rank=rank,
        dim=dim,
        sqrt_d=sqrt_d,
        simple_roots=tuple(tuple(r) for r in simple_roots),
        elements=tuple(elements),
        words=tuple(words),
        right_table=tuple(tuple(row) for row in right),
        reflection_data=tuple(data),
        n_classes=n_classes,
        chamber=tuple(chamber.tolist()),
        _index=index,
    )


def _chamber_vector(simple_roots: Sequence[Vector], dim: int, domain: Any) -> np.ndarray:
    """A point xi in the span of the roots with (alpha_i, xi) = 1."""
    if not simple_roots:
        return np.zeros(dim)
    a = np.array([_to_float(r, domain) for r in simple_roots])
    xi, *_ = np.linalg.lstsq(a, np.ones(len(simple_roots)), rcond=None)
    return xi


def _reflection_data(
    simple_roots: Sequence[Vector],
    gens: Sequence[Matrix],
    elements: Sequence[Matrix],
    words: Sequence[tuple[int, ...]],
    index: dict[Matrix, int],
    chamber: np.ndarray,
    domain: Any,
) -> tuple[list[ReflectionData], int]:
    def positive(v: Vector) -> Vector:
        if float(_to_float(v, domain) @ chamber) < 0:
            return tuple(-a for a in v)
        return v

    class_of: dict[Vector, int] = {}
    n_classes = 0
    for root in simple_roots:
        start = positive(tuple(root))
        if start in class_of:
            continue
        class_of[start] = n_classes
        frontier = [start]
        while frontier:
            v = frontier.pop()
            for g in gens:
                image = positive(_matvec(g, v, domain))
                if image not in class_of:
                    class_of[image] = n_classes
                    frontier.append(image)
        n_classes += 1

    data = []
    for root, cid in class_of.items():
        matrix = _reflection_matrix(root, domain)
        data.append(
            ReflectionData(
                element=index[matrix],
                matrix=matrix,
                root=root,
                coroot=root,
                class_id=cid,
            )
        )
    data.sort(key=lambda r: (len(words[r.element]), words[r.element]))
    return data, n_classes


def _root(coords: Sequence[Any], domain: Any) -> Vector:
    return tuple(to_scalar(a, domain) for a in coords)


def _unit(dim: int, i: int, scale: Any = 1) -> list[Any]:
    return [scale if j == i else 0 for j in range(dim)]


_SPEC_RE = re.compile(r"^(?:(?P<fam>[ABDS])(?P<n>\d+)|I2\((?P<m>\d+)\)|Zm:(?P<z>\d+))$")


def build_group(
    spec: str, *, order_cap: int = DEFAULT_ORDER_CAP
) -> ReflectionGroup | CyclicGroup:
    """Build a reflection group from a spec string.

    Accepted specs: ``A1`` (the rank-1 line), ``A{k}`` for k >= 2 and
    ``S{n}`` (permutation matrices on C^n), ``B{n}``, ``D{n}``,
    ``I2(3)``, ``I2(4)``, ``I2(6)`` and ``Zm:{m}``.

    Raises:
        UnsupportedType: For unknown families or exceptional labels.
        OrderCapExceeded: If enumeration passes ``order_cap`` elements.
    """
    spec = spec.strip()
    match = _SPEC_RE.match(spec)
    if not match:
        raise UnsupportedType(f"cannot build group {spec!r}")
    if match["z"]:
        m = int(match["z"])
        if m < 2:
            raise UnsupportedType("cyclic groups need m >= 2")
        return CyclicGroup(m)
    if match["m"]:
        return _dihedral(int(match["m"]), order_cap)

    family, n = match["fam"], int(match["n"])
    if family == "A" and n == 1:
        domain = scalar_field(2)
        return _enumerate("A1", [_root([sympy.sqrt(2)], domain)], 1, 2, order_cap)
    if family in "AS":
        size = n + 1 if family == "A" else n
        if size < 2:
            raise UnsupportedType(f"{spec}: rank must be positive")
        domain = scalar_field(1)
        roots = [
            _root([1 if j == i else -1 if j == i + 1 else 0 for j in range(size)], domain)
            for i in range(size - 1)
        ]
        return _enumerate(spec, roots, size, 1, order_cap)
    if family == "B":
        if n < 2:
            raise UnsupportedType("B_n needs n >= 2 (use A1 for rank 1)")
        domain = scalar_field(2)
        roots = [
            _root([1 if j == i else -1 if j == i + 1 else 0 for j in range(n)], domain)
            for i in range(n - 1)
        ]
        roots.append(_root(_unit(n, n - 1, sympy.sqrt(2)), domain))
        return _enumerate(spec, roots, n, 2, order_cap)
    # family == "D"
    if n < 2:
        raise UnsupportedType("D_n needs n >= 2")
    domain = scalar_field(1)
    roots = [
        _root([1 if j == i else -1 if j == i + 1 else 0 for j in range(n)], domain)
        for i in range(n - 1)
    ]
    roots.append(_root([1 if j >= n - 2 else 0 for j in range(n)], domain))
    return _enumerate(spec, roots, n, 1, order_cap)


def _dihedral(m: int, order_cap: int) -> ReflectionGroup:
    s3 = sympy.sqrt(3)
    s2 = sympy.sqrt(2)
    half = sympy.Rational(1, 2)
    if m == 3:
        d, roots = 3, [(1, 1), (-(1 + s3) * half, (s3 - 1) * half)]
    elif m == 4:
        d, roots = 2, [(s2, 0), (-1, 1)]
    elif m == 6:
        d, roots = 3, [(1, 1), (-(1 + s3) * half, (1 - s3) * half)]
    else:
        raise UnsupportedType(f"I2({m}) is not available; use m in (3, 4, 6)")
    domain = scalar_field(d)
    return _enumerate(f"I2({m})", [_root(r, domain) for r in roots], 2, d, order_cap)


# === Invariants of the group ===


def reflections(group: ReflectionGroup) -> list[ReflectionData]:
    return list(group.reflection_data)


def float_roots(group: ReflectionGroup) -> np.ndarray:
    """Positive roots as rows of a float array."""
    return np.array([_to_float(r.root, group.domain) for r in group.reflection_data])


def float_matrix(group: ReflectionGroup, w: int) -> np.ndarray:
    return np.array([_to_float(row, group.domain) for row in group.elements[w]])


def poincare_polynomial(group: ReflectionGroup | CyclicGroup) -> sympy.Poly:
    """Length generating function sum_w q^l(w)."""
    if isinstance(group, CyclicGroup):
        return q_integer(group.m)
    counts: dict[int, int] = {}
    for word in group.words:
        counts[len(word)] = counts.get(len(word), 0) + 1
    return sympy.Poly(sum(k * _q**e for e, k in counts.items()), _q, domain="ZZ")


def q_integer(d: int) -> sympy.Poly:
    return sympy.Poly(sum(_q**e for e in range(d)), _q, domain="ZZ")


def _degrees_from_poincare(poly: sympy.Poly, order: int, rank: int, label: str) -> list[int]:
    remaining = poly
    found: list[int] = []
    while remaining.degree() > 0:
        for d in range(remaining.degree() + 1, 1, -1):
            quotient, rem = remaining.div(q_integer(d))
            if rem.is_zero:
                found.append(d)
                remaining = quotient
                break
        else:
            raise FactorizationFailed(f"{label}: {remaining.as_expr()} has no q-integer factor")
    if remaining.as_expr() != 1:
        raise FactorizationFailed(f"{label}: leftover factor {remaining.as_expr()}")
    found.sort()
    if math.prod(found) != order or len(found) != rank:
        raise FactorizationFailed(f"{label}: degrees {found} inconsistent with |W|={order}")
    return found


def degrees(group: ReflectionGroup | CyclicGroup | str) -> list[int]:
    """Sorted degrees d_1..d_r.

    Built groups factor their Poincare polynomial into q-integers, dividing
    out the largest admissible [d]_q first; labels are looked up in the
    shipped degree table.
    """
    if isinstance(group, str):
        table = degree_table()
        if group in table:
            return list(table[group])
        built = build_group(group)
        return degrees(built)
    if isinstance(group, CyclicGroup):
        return group.degrees()
    if group.rank == 0:
        return []
    return _degrees_from_poincare(poincare_polynomial(group), group.order, group.rank, group.label)


@functools.lru_cache(maxsize=1)
def degree_table() -> dict[str, tuple[int, ...]]:
    """Label -> degrees from ``data/degrees.txt``.

    Parabolic entries use ``GROUP/PARABOLIC`` labels, e.g. ``E7/D6``.
    """
    text = resources.files("cherednik").joinpath("data/degrees.txt").read_text()
    table: dict[str, tuple[int, ...]] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        label, _, values = line.partition(":")
        entries = tuple(sorted(int(v) for v in values.split(",")))
        table[label.strip()] = entries
    return table


# === Subgroups ===


def _subgroup_from_roots(
    group: ReflectionGroup, label: str, roots: Sequence[Vector]
) -> ReflectionGroup:
    return _enumerate(label, roots, group.dim, group.sqrt_d, group.order + 1)


def stabilizer(group: ReflectionGroup, point: Sequence[Any]) -> ReflectionGroup:
    """Parabolic subgroup {w : w a = a}, rebuilt as a reflection group."""
    domain = group.domain
    a = tuple(to_scalar(v, domain) for v in point)
    fixing = {w for w, m in enumerate(group.elements) if _matvec(m, a, domain) == a}
    inner = [r for r in group.reflection_data if not pairing(r.root, a, domain)]
    inner_roots = {r.root for r in inner}
    simple = []
    for r in inner:
        flipped = 0
        for other in inner_roots:
            image = _matvec(r.matrix, other, domain)
            if image not in inner_roots:
                flipped += 1
        if flipped == 1:
            simple.append(r.root)
    sub = _subgroup_from_roots(group, f"{group.label}_stab", simple)
    closure = {group.index_of(m) for m in sub.elements}
    if closure != fixing:
        raise AssertionError(
            f"stabilizer of {point} is not generated by its reflections "
            f"({len(closure)} vs {len(fixing)} elements)"
        )
    return sub


def standard_parabolic(group: ReflectionGroup, subset: Sequence[int]) -> ReflectionGroup:
    """Subgroup generated by the simple reflections listed in ``subset``."""
    roots = [group.simple_roots[i] for i in sorted(subset)]
    label = f"{group.label}[{','.join(str(i + 1) for i in sorted(subset))}]"
    return _subgroup_from_roots(group, label, roots)


def maximal_parabolics(group: ReflectionGroup) -> list[ReflectionGroup]:
    """One standard parabolic per omitted simple reflection."""
    if group.rank == 0:
        return []
    return [
        standard_parabolic(group, [j for j in range(group.rank) if j != i])
        for i in range(group.rank)
    ]


def coxeter_matrix(group: ReflectionGroup) -> list[list[int]]:
    """Orders m_ij of s_i s_j."""
    gens = group.generators
    out = [[1] * group.rank for _ in range(group.rank)]
    for i in range(group.rank):
        for j in range(group.rank):
            if i == j:
                continue
            prod = group.multiply(gens[i], gens[j])
            w, k = prod, 1
            while w != 0:
                w = group.multiply(w, prod)
                k += 1
            out[i][j] = k
    return out


def conjugation_check(group: ReflectionGroup) -> str | None:
    """Check w s w^-1 is the reflection of w alpha_s with s's class.

    Returns None on success, otherwise a witness string.
    """
    domain = group.domain
    by_element = {r.element: r for r in group.reflection_data}
    for w, mat in enumerate(group.elements):
        w_inv = group.inverse(w)
        for r in group.reflection_data:
            conj = group.multiply(group.multiply(w, r.element), w_inv)
            target = by_element.get(conj)
            if target is None:
                return f"w={group.words[w]}: conjugate of {group.words[r.element]} is not a reflection"
            image = _matvec(mat, r.root, domain)
            if image != target.root and tuple(-a for a in image) != target.root:
                return f"w={group.words[w]}: w.alpha_s not parallel to alpha_(wsw^-1)"
            if target.class_id != r.class_id:
                return f"w={group.words[w]}: class id changed under conjugation"
    return None
