"""Finite Hecke algebras and the deformed Coxeter rewriting engine.

``HeckeAlgebra`` multiplies in the T_w basis of H_q(W) with the quadratic
relation (T_s - 1)(T_s + q) = 0. ``DeformedCoxeter`` works in the algebra
with generators s_i and parameters t_(ij,k), where s_i^2 = 1 and
prod_k (s_i s_j - t_(ij,k)) = 0; any word is rewritten into a combination
of the canonical reduced words w(x).
"""

from __future__ import annotations

import cmath
import functools
import itertools
import logging
import math
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import sympy
from sympy.polys.domains import CC, QQ
from sympy.polys.matrices import DomainMatrix

from .exceptions import MoveCapExceeded, UnsupportedType
from .exact import to_scalar
from .groups import ReflectionGroup, build_group, coxeter_matrix
from .models import CheckReport

__all__ = [
    "DEFAULT_MOVE_CAP",
    "DeformedCoxeter",
    "HeckeAlgebra",
    "HeckeElement",
    "classical_specialization_check",
    "hecke_algebra_typeA",
    "hecke_dim_check",
    "hecke_mul_typeA",
    "rewrite_canonical",
]

logger = logging.getLogger(__name__)

DEFAULT_MOVE_CAP = 100_000

Word = tuple[int, ...]


def _word_text(word: Word) -> str:
    return "".join(f"s{i + 1}" for i in word) or "e"


@dataclass(frozen=True, eq=False)
class HeckeElement:
    """Finite combination sum_x a_x T_(w(x)), keyed by group element index."""

    group: ReflectionGroup
    domain: Any
    coeffs: Mapping[int, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        # drop zeros so that equality is a plain dict comparison
        object.__setattr__(self, "coeffs", {w: a for w, a in self.coeffs.items() if a})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HeckeElement):
            return NotImplemented
        return self.group is other.group and dict(self.coeffs) == dict(other.coeffs)

    __hash__ = None  # type: ignore[assignment]

    def __add__(self, other: HeckeElement) -> HeckeElement:
        out = dict(self.coeffs)
        for w, a in other.coeffs.items():
            out[w] = out.get(w, self.domain.zero) + a
        return HeckeElement(self.group, self.domain, out)

    def scale(self, value: Any) -> HeckeElement:
        """Multiply every coefficient by a domain element."""
        return HeckeElement(self.group, self.domain, {w: value * b for w, b in self.coeffs.items()})

    def coefficient(self, w: int) -> Any:
        return self.coeffs.get(w, self.domain.zero)

    def support(self) -> list[Word]:
        return sorted((self.group.words[w] for w in self.coeffs), key=lambda u: (len(u), u))

    def to_text(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for w in sorted(self.coeffs, key=lambda u: (self.group.length(u), self.group.words[u])):
            coeff = sympy.sstr(self.domain.to_sympy(self.coeffs[w]))
            parts.append(f"({coeff})*T[{_word_text(self.group.words[w])}]")
        return " + ".join(parts)


# === Iwahori-Hecke algebra ===


class HeckeAlgebra:
    """H_q(W) in the basis T_w, with (T_s - 1)(T_s + q) = 0.

    With ``q=None`` the coefficients live in Q(q); a rational ``q`` gives a
    specialized algebra over Q.

    Example:
        >>> H = HeckeAlgebra(build_group("S2"))
        >>> s = H.basis_element((0,))
        >>> H.mul(s, s).to_text()
        '(q)*T[e] + (1 - q)*T[s1]'
    """

    def __init__(self, group: ReflectionGroup, q: Any = None) -> None:
        self.group = group
        if q is None:
            self.domain = QQ.frac_field(sympy.Symbol("q"))
            self.q = self.domain.from_sympy(sympy.Symbol("q"))
        else:
            self.domain = QQ
            self.q = to_scalar(q, QQ)

    def __repr__(self) -> str:
        return f"HeckeAlgebra({self.group.label!r}, q={self.domain.to_sympy(self.q)})"

    @property
    def dim(self) -> int:
        return self.group.order

    def basis(self) -> list[HeckeElement]:
        return [self.element({w: self.domain.one}) for w in range(self.dim)]

    def element(self, coeffs: Mapping[int, Any]) -> HeckeElement:
        return HeckeElement(self.group, self.domain, dict(coeffs))

    def basis_element(self, word: Iterable[int]) -> HeckeElement:
        """T_w for a reduced word; non-reduced words are multiplied out."""
        out = self.one()
        for letter in word:
            out = self.mul(out, self.generator(letter))
        return out

    def one(self) -> HeckeElement:
        return self.element({0: self.domain.one})

    def generator(self, i: int) -> HeckeElement:
        return self.element({self.group.generators[i]: self.domain.one})

    def _left_by_generator(self, i: int, a: HeckeElement) -> HeckeElement:
        """T_s T_w = T_sw if l(sw) > l(w), else (1 - q) T_w + q T_sw."""
        group, one, q = self.group, self.domain.one, self.q
        out: dict[int, Any] = {}
        for w, coeff in a.coeffs.items():
            sw = group.left_table[i][w]
            if group.length(sw) > group.length(w):
                out[sw] = out.get(sw, self.domain.zero) + coeff
            else:
                out[w] = out.get(w, self.domain.zero) + (one - q) * coeff
                out[sw] = out.get(sw, self.domain.zero) + q * coeff
        return self.element(out)

    def mul(self, a: HeckeElement, b: HeckeElement) -> HeckeElement:
        out = self.element({})
        for x, coeff in a.coeffs.items():
            term = b
            for letter in reversed(self.group.words[x]):
                term = self._left_by_generator(letter, term)
            out = out + term.scale(coeff)
        return out

    def regular_matrix(self, a: HeckeElement) -> DomainMatrix:
        """Matrix of left multiplication by ``a``; column w is a T_w."""
        n = self.dim
        rows = [[self.domain.zero] * n for _ in range(n)]
        for w, basis_w in enumerate(self.basis()):
            for v, coeff in self.mul(a, basis_w).coeffs.items():
                rows[v][w] = coeff
        return DomainMatrix(rows, (n, n), self.domain)

    def specialize(self, q: Any) -> HeckeAlgebra:
        return HeckeAlgebra(self.group, q)

    def specialize_element(self, a: HeckeElement, q: Any) -> HeckeElement:
        """Substitute a rational value for q in every coefficient."""
        target = self.specialize(q)
        symbol = sympy.Symbol("q")
        value = sympy.Rational(str(q))
        coeffs = {
            w: QQ.from_sympy(self.domain.to_sympy(c).subs(symbol, value))
            for w, c in a.coeffs.items()
        }
        return target.element(coeffs)


@functools.lru_cache(maxsize=None)
def _symmetric_group(n: int) -> ReflectionGroup:
    if not 2 <= n <= 6:
        raise UnsupportedType(f"type A Hecke algebras are built for 2 <= n <= 6, got {n}")
    group = build_group(f"S{n}")
    assert isinstance(group, ReflectionGroup)
    return group


def hecke_algebra_typeA(n: int, q: Any = None) -> HeckeAlgebra:
    """H_q(S_n) on the permutation realization."""
    return HeckeAlgebra(_symmetric_group(n), q)


def hecke_mul_typeA(n: int, a: HeckeElement, b: HeckeElement) -> HeckeElement:
    """Product in H_q(S_n) over Q(q)."""
    algebra = hecke_algebra_typeA(n)
    if a.group is not algebra.group or b.group is not algebra.group:
        raise ValueError(f"operands must be elements of H_q(S{n})")
    if a.domain != algebra.domain or b.domain != algebra.domain:
        raise ValueError("operands must have coefficients in Q(q)")
    return algebra.mul(a, b)


def _relation_residuals(algebra: HeckeAlgebra) -> list[str]:
    """Quadratic and braid relations of the regular representation."""
    failures = []
    group = algebra.group
    n = algebra.dim
    ident = DomainMatrix.eye(n, algebra.domain)
    q_ident = DomainMatrix.diag([algebra.q] * n, algebra.domain)
    mats = [algebra.regular_matrix(algebra.generator(i)) for i in range(group.rank)]
    for i, t in enumerate(mats):
        quadratic = (t - ident) * (t + q_ident)
        if not quadratic.is_zero_matrix:
            failures.append(f"(T{i + 1}-1)(T{i + 1}+q) != 0")
    orders = coxeter_matrix(group)
    for i, j in itertools.combinations(range(group.rank), 2):
        m = orders[i][j]
        left, right = ident, ident
        for k in range(m):
            left = left * mats[i if k % 2 == 0 else j]
            right = right * mats[j if k % 2 == 0 else i]
        if left != right:
            failures.append(f"braid relation for (s{i + 1}, s{j + 1})")
    return failures


def hecke_dim_check(
    n: int, q: Any, *, samples: int = 200, seed: int = 0
) -> CheckReport:
    """Associativity, basis size and defining relations of H_q(S_n) at rational q.

    Associativity is exhaustive for n <= 3 and sampled otherwise.
    """
    if n > 5:
        raise ValueError("hecke_dim_check supports n <= 5")
    algebra = hecke_algebra_typeA(n, q)
    basis = algebra.basis()
    label = f"S{n}"
    if len(basis) != math.factorial(n):
        return CheckReport.from_witness("hecke-dim", label, f"basis has {len(basis)} elements")
    if n <= 3:
        triples: Iterable[tuple[int, int, int]] = itertools.product(range(len(basis)), repeat=3)
    else:
        rng = np.random.default_rng(seed)
        triples = [tuple(int(v) for v in rng.integers(len(basis), size=3)) for _ in range(samples)]
    checked = 0
    for i, j, k in triples:
        a, b, c = basis[i], basis[j], basis[k]
        if algebra.mul(algebra.mul(a, b), c) != algebra.mul(a, algebra.mul(b, c)):
            words = ", ".join(_word_text(algebra.group.words[w]) for w in (i, j, k))
            return CheckReport.from_witness("hecke-dim", label, f"not associative on {words}")
        checked += 1
    failures = _relation_residuals(algebra)
    return CheckReport.from_witness(
        "hecke-dim",
        label,
        "; ".join(failures) or None,
        q=str(q),
        dim=len(basis),
        associativity_triples=checked,
    )


# === Deformed Coxeter algebra ===


def _alternating(i: int, j: int, length: int) -> Word:
    return tuple(i if k % 2 == 0 else j for k in range(length))


def _free_reduce(word: Iterable[int]) -> Word:
    out: list[int] = []
    for letter in word:
        if out and out[-1] == letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


@dataclass(frozen=True)
class _Move:
    position: int
    first: int
    second: int
    length: int


class DeformedCoxeter:
    """Words in s_i over the parameters t_(ij,k), k in Z/m_ij.

    For i < j the symbols ``t{i}{j}_{k}`` (1-based, k = 1..m_ij) are
    independent; t_(ji,k) = 1 / t_(ij,-k) and s_p t_(ij,k) = t_(ji,k) s_p.
    Coefficients sit to the left of words. Passing ``values`` specializes
    the parameters to complex numbers (coefficients then live in ``CC``);
    these must satisfy t_(ij,k) t_(ij,-k) = 1 so that the twist acts trivially.
    """

    def __init__(
        self,
        group: ReflectionGroup,
        *,
        values: Mapping[str, complex] | None = None,
        move_cap: int = DEFAULT_MOVE_CAP,
    ) -> None:
        self.group = group
        self.move_cap = move_cap
        self.orders = coxeter_matrix(group)
        self.pairs = [
            (i, j) for i, j in itertools.combinations(range(group.rank), 2)
        ]
        self.symbols = {
            (i, j, k): sympy.Symbol(f"t{i + 1}{j + 1}_{k}")
            for i, j in self.pairs
            for k in range(1, self.orders[i][j] + 1)
        }
        self.values = dict(values) if values is not None else None
        if self.values is None:
            self.domain = QQ.frac_field(*self.symbols.values())
        else:
            self._check_values()
            self.domain = CC
        self._relations = {pair: self._relation(*pair) for pair in self.pairs}

    @classmethod
    def classical(cls, group: ReflectionGroup, **kwargs: Any) -> DeformedCoxeter:
        """t_(ij,k) = exp(2 pi i k / m_ij), the specialization giving C[W]."""
        orders = coxeter_matrix(group)
        values = {
            f"t{i + 1}{j + 1}_{k}": cmath.exp(2j * math.pi * k / orders[i][j])
            for i, j in itertools.combinations(range(group.rank), 2)
            for k in range(1, orders[i][j] + 1)
        }
        return cls(group, values=values, **kwargs)

    def _check_values(self) -> None:
        assert self.values is not None
        for (i, j, k), symbol in self.symbols.items():
            m = self.orders[i][j]
            name = str(symbol)
            if name not in self.values:
                raise ValueError(f"no value given for {name}")
            partner = f"t{i + 1}{j + 1}_{(m - k) % m or m}"
            if abs(self.values[name] * self.values[partner] - 1) > 1e-12:
                raise ValueError(f"{name} * {partner} must equal 1 for a specialization")

    # --- coefficients ---

    @property
    def one(self) -> Any:
        return 1 + 0j if self.values is not None else self.domain.one

    @property
    def zero(self) -> Any:
        return 0j if self.values is not None else self.domain.zero

    def _param(self, i: int, j: int, k: int) -> Any:
        symbol = self.symbols[(i, j, k)]
        if self.values is not None:
            return complex(self.values[str(symbol)])
        return self.domain.from_sympy(symbol)

    def _is_zero(self, coeff: Any) -> bool:
        if self.values is not None:
            return abs(coeff) < 1e-12
        return not coeff

    def twist(self, coeff: Any) -> Any:
        """The automorphism t_(ij,k) -> t_(ji,k) = 1 / t_(ij,-k) induced by s_p."""
        if self.values is not None:
            return coeff
        return self._twist_cached(coeff)

    @functools.cached_property
    def _twist_map(self) -> dict[sympy.Symbol, sympy.Expr]:
        out = {}
        for (i, j, k), symbol in self.symbols.items():
            m = self.orders[i][j]
            out[symbol] = 1 / self.symbols[(i, j, (m - k) % m or m)]
        return out

    @functools.lru_cache(maxsize=4096)  # noqa: B019
    def _twist_cached(self, coeff: Any) -> Any:
        expr = self.domain.to_sympy(coeff).xreplace(self._twist_map)
        return self.domain.from_sympy(sympy.cancel(expr))

    def _relation(self, i: int, j: int) -> list[tuple[Any, Word]]:
        """Coefficients c_l and words V_l of sum_l c_l V_l = 0 for the pair (i, j).

        prod_k (a - t_k) with a = s_i s_j is multiplied on the right by
        a^-h (m = 2h) or a^-(h+1) s_i (m = 2h + 1), so that V_m and V_0 are
        the two alternating words of length m starting with i and j.
        """
        m = self.orders[i][j]
        zero = self.zero
        # coefficients of prod_k (a - t_k), constant term first
        coeffs = [self.one]
        for k in range(1, m + 1):
            t = self._param(i, j, k)
            coeffs = [
                (coeffs[l - 1] if l > 0 else zero) - t * (coeffs[l] if l < len(coeffs) else zero)
                for l in range(len(coeffs) + 1)
            ]
        h, odd = divmod(m, 2)
        shift = h + 1 if odd else h
        terms = []
        for level, coeff in enumerate(coeffs):
            power = level - shift
            base = (i, j) * power if power >= 0 else (j, i) * (-power)
            word = _free_reduce((*base, i) if odd else base)
            terms.append((coeff, word))
        return terms

    # --- moves ---

    def _neighbours(self, word: Word) -> Iterable[tuple[_Move, Word]]:
        for i in range(self.group.rank):
            for j in range(self.group.rank):
                if i == j:
                    continue
                m = self.orders[i][j]
                segment = _alternating(i, j, m)
                for pos in range(len(word) - m + 1):
                    if word[pos : pos + m] == segment:
                        new = word[:pos] + _alternating(j, i, m) + word[pos + m :]
                        yield _Move(pos, i, j, m), new

    @functools.lru_cache(maxsize=None)  # noqa: B019
    def _first_move(self, word: Word) -> _Move:
        """First braid move on a shortest path to the canonical word or to a square."""
        x = self.group.element_of_word(word)
        reduced = len(word) == self.group.length(x)
        target = self.group.words[x]

        def done(w: Word) -> bool:
            if reduced:
                return w == target
            return any(a == b for a, b in itertools.pairwise(w))

        first: dict[Word, _Move] = {}
        queue = deque([word])
        seen = {word}
        while queue:
            w = queue.popleft()
            for move, new in self._neighbours(w):
                if new in seen:
                    continue
                seen.add(new)
                first[new] = first.get(w, move)
                if done(new):
                    return first[new]
                queue.append(new)
        raise MoveCapExceeded(f"no braid path from {_word_text(word)} to a normal form")

    def _apply(self, word: Word, move: _Move) -> list[tuple[Any, Word]]:
        """Replace the alternating segment at ``move`` using the deformed relation."""
        i, j = move.first, move.second
        pair = (min(i, j), max(i, j))
        terms = self._relations[pair]
        c0, _ = terms[0]
        top, lower = terms[-1], terms[1:-1]
        if i == pair[1]:
            # segment starts with the larger index: V_0 = -c0^-1 (V_m + sum c_l V_l)
            inv = -self.one / c0
            replacement = [(inv, top[1]), *((inv * c, w) for c, w in lower)]
        else:
            # V_m = -(c0 V_0 + sum c_l V_l)
            replacement = [(-c0, terms[0][1]), *((-c, w) for c, w in lower)]
        prefix, suffix = word[: move.position], word[move.position + move.length :]
        parity = len(prefix) % 2
        out = []
        for coeff, middle in replacement:
            moved = self.twist(coeff) if parity else coeff
            out.append((moved, prefix + middle + suffix))
        return out

    def rewrite(self, word: Iterable[int]) -> HeckeElement:
        """Normal form of T_word as a combination of canonical reduced words.

        Raises:
            MoveCapExceeded: If more than ``move_cap`` moves are needed.
        """
        pending: dict[Word, Any] = {tuple(word): self.one}
        result: dict[int, Any] = {}
        moves = 0
        while pending:
            current = max(pending, key=lambda w: (len(w), w))
            coeff = pending.pop(current)
            if self._is_zero(coeff):
                continue
            x = self.group.element_of_word(current)
            if current == self.group.words[x]:
                result[x] = result.get(x, self.zero) + coeff
                continue
            moves += 1
            if moves > self.move_cap:
                raise MoveCapExceeded(f"{moves} moves exceed the cap {self.move_cap}")
            square = next(
                (k for k, (a, b) in enumerate(itertools.pairwise(current)) if a == b), None
            )
            if square is not None:
                replacements = [(self.one, current[:square] + current[square + 2 :])]
            else:
                move = self._first_move(current)
                logger.debug("braid move %s on %s", move, _word_text(current))
                replacements = self._apply(current, move)
            for factor, new in replacements:
                pending[new] = pending.get(new, self.zero) + coeff * factor
        logger.debug("rewrote in %d moves", moves)
        result = {w: c for w, c in result.items() if not self._is_zero(c)}
        if self.values is not None:
            result = {w: CC.from_sympy(sympy.sympify(c)) for w, c in result.items()}
        return HeckeElement(self.group, self.domain, result)

    def specialize(self, element: HeckeElement, values: Mapping[str, complex]) -> dict[int, complex]:
        """Evaluate symbolic coefficients at complex parameter values."""
        if self.values is not None:
            return {w: complex(c) for w, c in element.coeffs.items()}
        subs = {symbol: values[str(symbol)] for symbol in self.symbols.values()}
        return {
            w: complex(self.domain.to_sympy(c).xreplace(subs).evalf())
            for w, c in element.coeffs.items()
        }


def rewrite_canonical(
    group: ReflectionGroup,
    word: Sequence[int],
    *,
    values: Mapping[str, complex] | None = None,
    move_cap: int = DEFAULT_MOVE_CAP,
) -> HeckeElement:
    """Rewrite a word in the deformed Coxeter algebra of ``group``."""
    if group.order > 48:
        raise UnsupportedType(f"{group.label}: rewriting is limited to order <= 48")
    return DeformedCoxeter(group, values=values, move_cap=move_cap).rewrite(word)


def classical_specialization_check(
    group: ReflectionGroup, *, move_cap: int = DEFAULT_MOVE_CAP
) -> CheckReport:
    """At t_(ij,k) = exp(2 pi i k / m_ij), w(x) w(y) rewrites to w(xy) for all x, y."""
    engine = DeformedCoxeter.classical(group, move_cap=move_cap)
    for x, y in itertools.product(range(group.order), repeat=2):
        got = engine.rewrite(group.words[x] + group.words[y])
        expected = group.multiply(x, y)
        coeffs = dict(got.coeffs)
        lead = coeffs.pop(expected, 0)
        if abs(lead - 1) > 1e-9 or any(abs(c) > 1e-9 for c in coeffs.values()):
            return CheckReport.from_witness(
                "deformed-classical",
                group.label,
                f"{_word_text(group.words[x])}*{_word_text(group.words[y])} -> {got.to_text()}",
            )
    return CheckReport.from_witness(
        "deformed-classical", group.label, None, pairs=group.order**2
    )
