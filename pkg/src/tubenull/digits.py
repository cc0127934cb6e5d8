"""Digit systems, words and cylinder cubes.

A digit system ``(d, N, digits)`` defines the homogeneous IFS
``x -> (x + i) / N`` for ``i`` in ``digits``.  Words compose most
significant symbol first: the cylinder of ``(w_1, ..., w_n)`` has corner
``sum_k w_k N^-k`` and side ``N^-n``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

Digit = tuple[int, ...]


class DigitSystemError(ValueError):
    """Raised for ill-formed digit system input."""


class FullGridError(DigitSystemError):
    """The digit set is the full grid; the attractor is the whole cube."""


@dataclass(frozen=True)
class DigitSystem:
    d: int
    N: int
    digits: tuple[Digit, ...]

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.digits, dtype=np.int64).reshape(len(self.digits), self.d)

    @cached_property
    def index(self) -> dict[Digit, int]:
        return {digit: k for k, digit in enumerate(self.digits)}

    @property
    def size(self) -> int:
        return len(self.digits)

    def to_dict(self) -> dict:
        return {"d": self.d, "N": self.N, "digits": [list(i) for i in self.digits]}

    @classmethod
    def from_dict(cls, data: dict) -> "DigitSystem":
        try:
            d, N, digits = data["d"], data["N"], data["digits"]
        except (KeyError, TypeError) as exc:
            raise DigitSystemError(f"system JSON needs d, N, digits: {exc}") from None
        return validate_system(d, N, digits)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def validate_system(d: int, N: int, digits: Iterable[Sequence[int]]) -> DigitSystem:
    """Check ``(d, N, digits)`` and return the canonical (sorted) system."""
    if isinstance(d, bool) or not isinstance(d, int) or d < 2:
        raise DigitSystemError(f"dimension must be an integer >= 2, got {d!r}")
    if isinstance(N, bool) or not isinstance(N, int) or N < 2:
        raise DigitSystemError(f"base must be an integer >= 2, got {N!r}")
    seen: set[Digit] = set()
    for raw in digits:
        digit = tuple(raw)
        if len(digit) != d or not all(isinstance(c, int) and not isinstance(c, bool) for c in digit):
            raise DigitSystemError(f"digit {list(raw)!r} is not an integer {d}-tuple")
        if any(c < 0 or c >= N for c in digit):
            raise DigitSystemError(f"digit {digit} has a coordinate outside 0..{N - 1}")
        if digit in seen:
            raise DigitSystemError(f"duplicate digit {digit}")
        seen.add(digit)
    if not seen:
        raise DigitSystemError("digit set is empty")
    if len(seen) >= N**d:
        raise FullGridError(f"all {N**d} digits present: the attractor is [0,1]^{d}, which is not tube-null")
    return DigitSystem(d, N, tuple(sorted(seen)))


def carpet(N: int = 3) -> DigitSystem:
    """Planar carpet: the full N x N grid minus the central cell (N odd)."""
    mid = N // 2
    cells = [(a, b) for a in range(N) for b in range(N) if not (a == mid and b == mid)]
    return validate_system(2, N, cells)


def menger_sponge() -> DigitSystem:
    cells = [c for c in itertools.product(range(3), repeat=3) if sum(x == 1 for x in c) <= 1]
    return validate_system(3, 3, cells)


@dataclass(frozen=True)
class Word:
    system: DigitSystem
    symbols: tuple[Digit, ...]

    def __post_init__(self) -> None:
        if not self.symbols:
            raise DigitSystemError("a word has level n >= 1")
        index = self.system.index
        for s in self.symbols:
            if s not in index:
                raise DigitSystemError(f"symbol {s} is not a digit of the system")

    @property
    def level(self) -> int:
        return len(self.symbols)

    def extend(self, more: Sequence[Digit]) -> "Word":
        return Word(self.system, self.symbols + tuple(tuple(s) for s in more))


def word(system: DigitSystem, symbols: Iterable[Sequence[int]]) -> Word:
    return Word(system, tuple(tuple(s) for s in symbols))


def iter_words(system: DigitSystem, n: int) -> Iterator[Word]:
    for symbols in itertools.product(system.digits, repeat=n):
        yield Word(system, symbols)


@dataclass(frozen=True)
class Cube:
    """Closed cube with corner ``numerators / N^level`` and side ``N^-level``."""

    N: int
    level: int
    numerators: tuple[int, ...]

    @property
    def corner(self) -> tuple[Fraction, ...]:
        den = self.N**self.level
        return tuple(Fraction(c, den) for c in self.numerators)

    @property
    def side(self) -> Fraction:
        return Fraction(1, self.N**self.level)

    def vertices(self) -> Iterator[tuple[Fraction, ...]]:
        side = self.side
        for offset in itertools.product((0, 1), repeat=len(self.numerators)):
            yield tuple(c + o * side for c, o in zip(self.corner, offset))

    def contains(self, other: "Cube") -> bool:
        lo, hi = self.corner, tuple(c + self.side for c in self.corner)
        olo = other.corner
        ohi = tuple(c + other.side for c in olo)
        return all(a <= b and d <= c for a, b, c, d in zip(lo, olo, hi, ohi))

    def inside_unit_cube(self) -> bool:
        return all(0 <= c and c + 1 <= self.N**self.level for c in self.numerators)


def corner_numerators(w: Word) -> tuple[int, ...]:
    """Integer corner of the cylinder of ``w`` scaled by ``N^n``."""
    N = w.system.N
    acc = [0] * w.system.d
    for s in w.symbols:
        acc = [N * a + c for a, c in zip(acc, s)]
    return tuple(acc)


def cylinder_cube(w: Word) -> Cube:
    return Cube(w.system.N, w.level, corner_numerators(w))


def sample_point(w: Word, depth: int, rng: np.random.Generator | None = None) -> tuple[Fraction, ...]:
    """Extend ``w`` with random digits to ``depth`` and return the deep cylinder's corner.

    The point lies in ``cylinder_cube(w)`` and within ``sqrt(d) N^-depth`` of the attractor.
    """
    if depth < w.level:
        raise DigitSystemError(f"depth {depth} is below the word level {w.level}")
    rng = rng if rng is not None else np.random.default_rng()
    picks = rng.integers(0, w.system.size, size=depth - w.level)
    deep = w.extend([w.system.digits[k] for k in picks])
    return cylinder_cube(deep).corner
