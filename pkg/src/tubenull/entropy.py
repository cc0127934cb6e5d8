"""Base-N entropy, residue distributions and the method of types."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Mapping, Sequence

import numpy as np

from .digits import DigitSystem, Word
from .projection import Direction


class TypeEnumerationError(RuntimeError):
    pass


DEFAULT_TYPE_CAP = 10**8


def entropy_n(dist: Sequence[float], N: int) -> float:
    """Shannon entropy with logarithm base N (``0 log 0 = 0``)."""
    h = 0.0
    for q in dist:
        if q > 0:
            h -= q * math.log(q)
    return h / math.log(N)


@lru_cache(maxsize=64)
def _xlogx_table(n: int) -> np.ndarray:
    c = np.arange(n + 1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(c > 0, c * np.log(np.maximum(c, 1.0)), 0.0)


def count_entropy(counts: np.ndarray, N: int) -> np.ndarray:
    """Base-N entropy of count vectors along the last axis (all rows share the total).

    Every partition and oracle path goes through this function, so equal
    count vectors always give bit-identical entropies.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n = int(counts.sum(axis=-1).max()) if counts.size else 0
    if n == 0:
        return np.zeros(counts.shape[:-1])
    table = _xlogx_table(n)
    total = counts.sum(axis=-1)
    s = table[counts].sum(axis=-1)
    return (table[total] - s) / (total * math.log(N))


def probability_entropy(q: np.ndarray, N: int) -> np.ndarray:
    q = np.asarray(q, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(q > 0, q * np.log(np.where(q > 0, q, 1.0)), 0.0)
    return -t.sum(axis=-1) / math.log(N)


def residue_matrix(system: DigitSystem, v: Direction) -> np.ndarray:
    """0/1 matrix of shape (N, digits) sending a digit distribution to its residues."""
    N = system.N
    res = (system.array @ np.array(v.v, dtype=np.int64)) % N
    M = np.zeros((N, system.size))
    M[res, np.arange(system.size)] = 1.0
    return M


def residue_distribution(system: DigitSystem, p: Sequence[float], v: Direction) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (system.size,):
        raise ValueError(f"probability vector has shape {p.shape}, expected ({system.size},)")
    return residue_matrix(system, v) @ p


def check_probability(p: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if np.any(p < 0) or not np.isfinite(p).all():
        raise ValueError("probability vector has negative or non-finite weights")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"probability vector sums to {p.sum()!r}")
    return p


@dataclass(frozen=True)
class EmpiricalType:
    counts: tuple[tuple[Hashable, int], ...]

    @classmethod
    def from_mapping(cls, counts: Mapping[Hashable, int]) -> "EmpiricalType":
        items = tuple(sorted((k, c) for k, c in counts.items() if c))
        if not items:
            raise ValueError("an empirical type needs n >= 1")
        if any(c < 0 for _, c in items):
            raise ValueError("negative count")
        return cls(items)

    @property
    def n(self) -> int:
        return sum(c for _, c in self.counts)

    def as_dict(self) -> dict:
        return dict(self.counts)

    def vector(self, alphabet: Sequence[Hashable]) -> tuple[int, ...]:
        d = self.as_dict()
        return tuple(d.get(a, 0) for a in alphabet)

    def frequencies(self, alphabet: Sequence[Hashable]) -> tuple[float, ...]:
        n = self.n
        return tuple(c / n for c in self.vector(alphabet))


def empirical_type(w: Word, v: Direction | None = None) -> EmpiricalType:
    """Occurrence counts of the symbols of ``w``, or of their residues mod N along ``v``."""
    if v is None:
        return EmpiricalType.from_mapping(Counter(w.symbols))
    N = w.system.N
    return EmpiricalType.from_mapping(Counter(sum(a * b for a, b in zip(s, v.v)) % N for s in w.symbols))


def type_count(n: int, m: int) -> int:
    return math.comb(n + m - 1, m - 1)


def compositions(n: int, m: int, cap: int = DEFAULT_TYPE_CAP) -> np.ndarray:
    """All count vectors of length ``m`` summing to ``n``, as an integer array."""
    if n < 0 or m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    total = type_count(n, m)
    if total > cap:
        raise TypeEnumerationError(f"{total} types of length {n} over {m} symbols exceed the cap {cap}")
    # by_sum[s] holds every composition of s into the parts built so far
    by_sum = [np.array([[s]], dtype=np.int64) for s in range(n + 1)]
    for _ in range(m - 1):
        by_sum = [
            np.vstack([
                np.hstack([np.full((len(by_sum[s - h]), 1), h, dtype=np.int64), by_sum[s - h]])
                for h in range(s, -1, -1)
            ])
            for s in range(n + 1)
        ]
    return by_sum[n]


def enumerate_types(n: int, m: int, cap: int = DEFAULT_TYPE_CAP) -> list[EmpiricalType]:
    if n < 1 or m < 1:
        raise ValueError("need n >= 1 and m >= 1")
    return [EmpiricalType.from_mapping(dict(enumerate(row.tolist()))) for row in compositions(n, m, cap)]


@lru_cache(maxsize=16)
def _factorials(n: int) -> tuple[int, ...]:
    out = [1]
    for k in range(1, n + 1):
        out.append(out[-1] * k)
    return tuple(out)


def multinomial(counts: Sequence[int]) -> int:
    n = sum(counts)
    f = _factorials(n)
    out = f[n]
    for c in counts:
        out //= f[c]
    return out


def type_class_size(t: EmpiricalType) -> int:
    return multinomial([c for _, c in t.counts])


def type_class_bounds(counts: Sequence[int], N: int) -> tuple[float, float]:
    """Natural logs of the two-sided class-size bounds ``N^(nH)/(n+1)^m`` and ``N^(nH)``.

    ``H`` is the base-N entropy and ``m`` the alphabet length, so these are the
    classical ``e^(nH_e)`` bounds written in base N.
    """
    n = sum(counts)
    m = len(counts)
    nh = n * entropy_n([c / n for c in counts], N) * math.log(N)
    return nh - m * math.log(n + 1), nh
