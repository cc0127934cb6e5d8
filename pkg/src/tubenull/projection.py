"""Projected digit systems along primitive integer directions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .digits import DigitSystem, Word


class DirectionError(ValueError):
    pass


@dataclass(frozen=True)
class Direction:
    """A primitive integer vector; ``v`` and ``-v`` are the same direction.

    Stored with its first nonzero coordinate positive.
    """

    v: tuple[int, ...]

    def __init__(self, v: Sequence[int]):
        vec = tuple(v)
        if not vec or not all(isinstance(c, (int, np.integer)) and not isinstance(c, bool) for c in vec):
            raise DirectionError(f"direction must be a tuple of integers, got {v!r}")
        vec = tuple(int(c) for c in vec)
        if not any(vec):
            raise DirectionError("direction must be nonzero")
        if reduce(math.gcd, vec) != 1:
            raise DirectionError(f"direction {vec} is not primitive")
        lead = next(c for c in vec if c)
        if lead < 0:
            vec = tuple(-c for c in vec)
        object.__setattr__(self, "v", vec)

    @property
    def l1(self) -> int:
        return sum(abs(c) for c in self.v)

    @property
    def l2(self) -> float:
        return math.sqrt(sum(c * c for c in self.v))

    @property
    def low(self) -> int:
        """Minimum of ``x . v`` over the unit cube."""
        return sum(min(c, 0) for c in self.v)

    @property
    def high(self) -> int:
        return sum(max(c, 0) for c in self.v)

    @property
    def key(self) -> str:
        return ",".join(str(c) for c in self.v)

    @classmethod
    def from_key(cls, key: str) -> "Direction":
        return cls(tuple(int(c) for c in key.split(",")))

    def __repr__(self) -> str:
        return f"Direction{self.v}"


def project_digit(i: Sequence[int], v: Direction) -> int:
    return sum(a * b for a, b in zip(i, v.v))


def residue_of_digit(i: Sequence[int], v: Direction, N: int) -> int:
    # Python's % is already the non-negative remainder for N > 0.
    return project_digit(i, v) % N


def projected_position(w: Word, v: Direction) -> int:
    """``Q(w) = sum_k (w_k . v) N^(n-k)``, so the corner of ``w`` has ``x . v = Q / N^n``."""
    N = w.system.N
    q = 0
    for s in w.symbols:
        q = N * q + project_digit(s, v)
    return q


@dataclass(frozen=True)
class ProjectedAlphabet:
    system: DigitSystem
    direction: Direction

    @cached_property
    def values(self) -> tuple[int, ...]:
        """``i . v`` per digit, in system digit order (a multiset)."""
        return tuple(project_digit(i, self.direction) for i in self.system.digits)

    @cached_property
    def residues(self) -> tuple[int, ...]:
        N = self.system.N
        return tuple(x % N for x in self.values)

    @property
    def low(self) -> int:
        return self.direction.low

    @property
    def high(self) -> int:
        return self.direction.high

    @property
    def L1(self) -> int:
        return max(abs(x) for x in self.values)

    @property
    def L(self) -> int:
        """Bound on the leading symbol of a canonical representative."""
        return self.L1 * self.system.N

    @cached_property
    def fibers(self) -> tuple[int, ...]:
        """Number of distinct projected values in each residue class."""
        N = self.system.N
        classes: list[set[int]] = [set() for _ in range(N)]
        for x in self.values:
            classes[x % N].add(x)
        return tuple(len(c) for c in classes)

    @property
    def multiplicity(self) -> int:
        return max(self.fibers)

    @property
    def residue_alphabet(self) -> int:
        return sum(1 for f in self.fibers if f)

    def attainable(self, n: int) -> tuple[int, int]:
        """Inclusive range of ``Q`` over level-``n`` words."""
        N = self.system.N
        geometric = (N**n - 1) // (N - 1)
        return min(self.values) * geometric, max(self.values) * geometric

    def position_count(self, n: int) -> int:
        lo, hi = self.attainable(n)
        return hi - lo + 1


def projected_alphabet(system: DigitSystem, v: Direction) -> ProjectedAlphabet:
    return ProjectedAlphabet(system, v)


def canonicalize(q: int, n: int, alphabet: ProjectedAlphabet, absorber: str = "leading") -> tuple[int, ...]:
    """Representative ``(a_1, ..., a_n)`` of the projected value ``q`` at level ``n``.

    ``q = sum_k a_k N^(n-k)`` and all symbols but one absorbing symbol are
    base-N digits.  With ``absorber="leading"`` the absorber is ``a_1`` and
    ``|a_1| <= L`` at every level.  ``absorber="trailing"`` puts it at
    ``a_n`` via ``R = min(q // N, N^(n-1) - 1)``, ``a_n = q - N R``; the value
    is still preserved but the absorber grows with ``n``.
    """
    if n < 1:
        raise DirectionError("level must be >= 1")
    lo, hi = alphabet.attainable(n)
    if not lo <= q <= hi:
        raise DirectionError(f"q={q} outside the attainable range [{lo}, {hi}] at level {n}")
    N = alphabet.system.N
    if absorber == "leading":
        lead, rest = divmod(q, N ** (n - 1))
        return (lead, *_base_digits(rest, n - 1, N))
    if absorber == "trailing":
        R = max(min(q // N, N ** (n - 1) - 1), 0)
        return (*_base_digits(R, n - 1, N), q - N * R)
    raise ValueError(f"unknown absorber position {absorber!r}")


def _base_digits(x: int, count: int, N: int) -> list[int]:
    out = []
    for _ in range(count):
        x, r = divmod(x, N)
        out.append(r)
    return out[::-1]


def representative_value(symbols: Sequence[int], N: int) -> int:
    q = 0
    for a in symbols:
        q = N * q + a
    return q


def projected_values(system: DigitSystem, directions: Sequence[Direction]) -> np.ndarray:
    """Matrix of ``i . v``, shape (digits, directions)."""
    V = np.array([v.v for v in directions], dtype=np.int64).reshape(len(directions), system.d)
    return system.array @ V.T


def axis_and_diagonal_directions(d: int) -> list[Direction]:
    """Coordinate axes, then ``e_a + e_b`` and ``e_a - e_b`` for ``a < b``."""
    out = []
    for a in range(d):
        out.append(Direction(tuple(int(k == a) for k in range(d))))
    for a in range(d):
        for b in range(a + 1, d):
            plus = [0] * d
            plus[a] = plus[b] = 1
            minus = list(plus)
            minus[b] = -1
            out += [Direction(plus), Direction(minus)]
    return out


def primitive_directions(d: int, radius: int) -> list[Direction]:
    """Sign-canonical primitive vectors with max-norm <= radius, by l1 then lexicographic."""
    found = set()
    for vec in itertools.product(range(-radius, radius + 1), repeat=d):
        if any(vec) and reduce(math.gcd, vec) == 1:
            found.add(Direction(vec).v)
    return [Direction(v) for v in sorted(found, key=lambda v: (sum(map(abs, v)), [-c for c in v]))]
