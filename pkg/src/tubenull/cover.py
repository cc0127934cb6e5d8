"""Level-n covers by slabs and tubes with exact width certificates.

Every level-n word gets the first direction whose residue entropy is at
most the certified threshold.  The cylinder of a word assigned to ``v`` lies
in the slab ``(Q + low) / N^n <= x.v <= (Q + high) / N^n``, so the cover is
the set of distinct positions ``Q`` per direction.  In the plane a slab is a
tube; in higher dimension each slab is cut into parallel tubes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .certify import DirectionCertificate
from .digits import Cube, DigitSystem, Word
from .entropy import compositions, count_entropy, multinomial, type_count
from .projection import Direction, ProjectedAlphabet, projected_position, projected_values

log = logging.getLogger(__name__)

DEFAULT_SLACK = 1e-9
EXACT_WORD_CAP = 2**21
AGGREGATED_TYPE_CAP = 3_000_000


class NoDirection(RuntimeError):
    """No direction meets the entropy threshold; the certificate is unsound."""


class CapExceeded(RuntimeError):
    pass


class UncertifiedError(ValueError):
    pass


class LevelNotReached(RuntimeError):
    def __init__(self, message: str, scanned: list[tuple[int, Fraction]]):
        super().__init__(message)
        self.scanned = scanned


def threshold(cert: DirectionCertificate, slack: float = DEFAULT_SLACK) -> float:
    """Entropy level every empirical type meets in some direction.

    ``1 - delta_star`` is the objective at the witness; the true maximum can
    exceed it by the certified gap, so the gap is added before the slack.
    """
    return 1.0 - cert.delta_star + cert.gap + slack


def _require_certified(cert: DirectionCertificate) -> None:
    if not cert.certified:
        raise UncertifiedError("direction set is not certified (delta_star <= gap tolerance)")


def assign_direction(w: Word, cert: DirectionCertificate, slack: float = DEFAULT_SLACK) -> Direction:
    _require_certified(cert)
    N = w.system.N
    limit = threshold(cert, slack)
    for v in cert.directions:
        counts = np.zeros(N, dtype=np.int64)
        for s in w.symbols:
            counts[sum(a * b for a, b in zip(s, v.v)) % N] += 1
        if count_entropy(counts, N) <= limit:
            return v
    raise NoDirection(f"no direction of {[v.v for v in cert.directions]} fits word {w.symbols}")


@dataclass(frozen=True)
class Slab:
    direction: Direction
    level: int
    position: int
    N: int

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        den = self.N**self.level
        v = self.direction
        return Fraction(self.position + v.low, den), Fraction(self.position + v.high, den)

    @property
    def width_bound(self) -> Fraction:
        return Fraction(self.direction.l1, self.N**self.level)

    @property
    def euclidean_width(self) -> float:
        return self.direction.l1 / (self.direction.l2 * self.N**self.level)

    def contains_point(self, x: Sequence[Fraction]) -> bool:
        lo, hi = self.interval
        return lo <= sum(Fraction(a) * b for a, b in zip(x, self.direction.v)) <= hi

    def contains_cube(self, cube: Cube) -> bool:
        return all(self.contains_point(p) for p in cube.vertices())


def slab_for(w: Word, v: Direction) -> Slab:
    return Slab(v, w.level, projected_position(w, v), w.system.N)


def _sqrt_upper(x: Fraction, bits: int = 64) -> Fraction:
    scale = 4**bits
    return Fraction(math.isqrt(-(-x.numerator * scale // x.denominator)) + 1, 2**bits)


@dataclass(frozen=True)
class TubeFamily:
    """Parallel tubes covering one slab inside the unit cube.

    For ``d >= 3`` the two coordinates ``axes`` where ``|v|`` is largest span
    the plane containing the tube direction; every other coordinate is cut
    into ``cells`` intervals of length ``h``.  A tube is the part of the slab
    over one transverse cell; it fits in the cylinder of diameter ``width``
    around its axis (``width_squared`` is exact).
    """

    slab: Slab
    d: int

    @cached_property
    def axes(self) -> tuple[int, int]:
        v = self.slab.direction.v
        order = sorted(range(self.d), key=lambda k: (-abs(v[k]), k))
        return order[0], order[1]

    @property
    def transverse(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.d) if k not in self.axes)

    @cached_property
    def cells(self) -> int:
        b = self.slab.width_bound
        return -(-b.denominator // b.numerator)

    @property
    def h(self) -> Fraction:
        return Fraction(1, self.cells)

    @property
    def count(self) -> int:
        return 1 if self.d == 2 else self.cells ** (self.d - 2)

    @cached_property
    def width_squared(self) -> Fraction:
        b = self.slab.width_bound
        if self.d == 2:
            return b * b
        v = self.slab.direction.v
        p, j = self.axes
        spread = b + sum(abs(v[t]) for t in self.transverse) * self.h
        return (self.d - 2) * self.h**2 + spread**2 / (v[p] ** 2 + v[j] ** 2)

    @cached_property
    def tube_contribution(self) -> Fraction:
        """Exact (or rational upper bound on) ``width^(d-1)`` for one tube."""
        if self.d == 2:
            return self.slab.width_bound
        half, odd = divmod(self.d - 1, 2)
        out = self.width_squared**half
        return out * _sqrt_upper(self.width_squared) if odd else out

    @property
    def contribution(self) -> Fraction:
        return self.count * self.tube_contribution

    def tube_index(self, x: Sequence[Fraction]) -> tuple[int, ...]:
        n = self.cells
        return tuple(min(int(Fraction(x[t]) * n), n - 1) for t in self.transverse)

    def contains_point(self, x: Sequence[Fraction]) -> bool:
        """Whether ``x`` lies in the closed tube over its transverse cell."""
        if not self.slab.contains_point(x):
            return False
        if self.d == 2:
            return True
        x = [Fraction(c) for c in x]
        v = self.slab.direction.v
        p, j = self.axes
        lo, hi = self.slab.interval
        centers = {t: (k + Fraction(1, 2)) * self.h for t, k in zip(self.transverse, self.tube_index(x))}
        mid = (lo + hi) / 2 - sum(v[t] * c for t, c in centers.items())
        beta2 = (v[p] * x[p] + v[j] * x[j] - mid) ** 2 / (v[p] ** 2 + v[j] ** 2)
        dist2 = sum((x[t] - c) ** 2 for t, c in centers.items()) + beta2
        return 4 * dist2 <= self.width_squared


def subdivide_slab(s: Slab, d: int) -> TubeFamily:
    if d < 2:
        raise ValueError("dimension must be >= 2")
    return TubeFamily(s, d)


def slab_contribution(v: Direction, n: int, N: int, d: int) -> tuple[int, Fraction]:
    """Tubes per slab and their summed ``width^(d-1)`` (independent of position)."""
    fam = TubeFamily(Slab(v, n, 0, N), d)
    return fam.count, fam.contribution


@dataclass(frozen=True)
class CoverCertificate:
    certificate: DirectionCertificate
    n: int
    mode: str
    word_counts: dict[str, int]
    slab_counts: dict[str, int]
    tube_counts: dict[str, int]
    total_width_bound: Fraction
    slabs: dict[str, list[int]] | None = None
    slack: float = DEFAULT_SLACK

    @property
    def system(self) -> DigitSystem:
        return self.certificate.system

    @property
    def directions(self) -> tuple[Direction, ...]:
        return self.certificate.directions

    @property
    def tube_count(self) -> int:
        return sum(self.tube_counts.values())

    def slab_list(self) -> list[Slab]:
        if self.slabs is None:
            raise ValueError("aggregated certificates carry counts only")
        N = self.system.N
        return [Slab(Direction.from_key(k), self.n, q, N) for k, qs in self.slabs.items() for q in qs]

    def to_dict(self) -> dict:
        cert = self.certificate
        return {
            "system": self.system.to_dict(),
            "V": [list(v.v) for v in cert.directions],
            "delta_star": cert.delta_star,
            "gap": cert.gap,
            "slack": self.slack,
            "n": self.n,
            "mode": self.mode,
            "slabs": None if self.slabs is None else {k: [str(q) for q in qs] for k, qs in self.slabs.items()},
            "word_counts": {k: str(c) for k, c in self.word_counts.items()},
            "slab_counts": {k: str(c) for k, c in self.slab_counts.items()},
            "tube_counts": {k: str(c) for k, c in self.tube_counts.items()},
            "tube_count": str(self.tube_count),
            "total_width_bound": f"{self.total_width_bound.numerator}/{self.total_width_bound.denominator}",
            "certificate": cert.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoverCertificate":
        cert = DirectionCertificate.from_dict(data["certificate"])
        slabs = data.get("slabs")
        return cls(
            certificate=cert,
            n=int(data["n"]),
            mode=data["mode"],
            word_counts={k: int(c) for k, c in data["word_counts"].items()},
            slab_counts={k: int(c) for k, c in data["slab_counts"].items()},
            tube_counts={k: int(c) for k, c in data["tube_counts"].items()},
            total_width_bound=Fraction(data["total_width_bound"]),
            slabs=None if slabs is None else {k: [int(q) for q in qs] for k, qs in slabs.items()},
            slack=float(data.get("slack", DEFAULT_SLACK)),
        )


def _assign_rows(H: np.ndarray, limit: float) -> np.ndarray:
    ok = H <= limit
    if not ok.any(axis=1).all():
        raise NoDirection(f"{int((~ok.any(axis=1)).sum())} rows exceed the entropy threshold {limit}")
    return ok.argmax(axis=1)


def _residue_onehot(system: DigitSystem, directions: Sequence[Direction]) -> np.ndarray:
    res = projected_values(system, directions) % system.N  # digits x directions
    onehot = np.zeros((system.size, len(directions), system.N), dtype=np.int64)
    for a in range(len(directions)):
        onehot[np.arange(system.size), a, res[:, a]] = 1
    return onehot


def _total(system: DigitSystem, cert: DirectionCertificate, n: int, slab_counts: dict[str, int]):
    tube_counts, total = {}, Fraction(0)
    for v in cert.directions:
        per_slab, contribution = slab_contribution(v, n, system.N, system.d)
        tube_counts[v.key] = per_slab * slab_counts[v.key]
        total += slab_counts[v.key] * contribution
    return tube_counts, total


def _exact(system: DigitSystem, cert: DirectionCertificate, n: int, limit: float, cap: int):
    m, k, N = system.size, len(cert.directions), system.N
    if m**n > cap:
        raise CapExceeded(f"{m}^{n} words exceed the exact-mode cap {cap}; use aggregated mode")
    vals = projected_values(system, cert.directions)
    big = int(np.abs(vals).max()) * N**n >= 2**62
    vals = vals.astype(object) if big else vals
    onehot = _residue_onehot(system, cert.directions).astype(np.int32)
    Q = np.zeros((1, k), dtype=vals.dtype)
    counts = np.zeros((1, k, N), dtype=np.int32)
    for _ in range(n):
        # rows stay in lexicographic word order, most significant symbol first
        Q = (Q[:, None, :] * N + vals[None, :, :]).reshape(-1, k)
        counts = (counts[:, None] + onehot[None]).reshape(-1, k, N)
    owner = _assign_rows(count_entropy(counts, N), limit)
    slabs, words = {}, {}
    for a, v in enumerate(cert.directions):
        mine = owner == a
        words[v.key] = int(mine.sum())
        slabs[v.key] = sorted(int(q) for q in np.unique(Q[mine, a]))
    return words, slabs


def _fiber_bound(residue_types: np.ndarray, fibers: Sequence[int]) -> int:
    total = 0
    for nu in residue_types.tolist():
        term = multinomial(nu)
        for f, c in zip(fibers, nu):
            term *= f**c
        total += term
    return total


def _aggregated(system: DigitSystem, cert: DirectionCertificate, n: int, limit: float, cap: int):
    m, N = system.size, system.N
    if type_count(n, m) > cap:
        raise CapExceeded(f"{type_count(n, m)} types exceed the aggregated-mode cap {cap}")
    T = compositions(n, m, cap)
    R = np.einsum("ti,iar->tar", T, _residue_onehot(system, cert.directions))
    owner = _assign_rows(count_entropy(R, N), limit)
    sizes = [multinomial(t) for t in T.tolist()]
    words, bounds = {}, {}
    for a, v in enumerate(cert.directions):
        rows = np.nonzero(owner == a)[0]
        words[v.key] = sum(sizes[r] for r in rows.tolist())
        alphabet = ProjectedAlphabet(system, v)
        options = [words[v.key], alphabet.position_count(n)]
        if len(rows):
            options.append(_fiber_bound(np.unique(R[rows, a], axis=0), alphabet.fibers))
        bounds[v.key] = min(options)
    return words, bounds


def build_cover(
    system: DigitSystem,
    cert: DirectionCertificate,
    n: int,
    mode: str = "exact",
    slack: float = DEFAULT_SLACK,
    cap: int | None = None,
) -> CoverCertificate:
    _require_certified(cert)
    if cert.system != system:
        raise ValueError("certificate was issued for a different digit system")
    if n < 1:
        raise ValueError("level must be >= 1")
    limit = threshold(cert, slack)
    if mode == "exact":
        words, slabs = _exact(system, cert, n, limit, cap or EXACT_WORD_CAP)
        slab_counts = {k: len(qs) for k, qs in slabs.items()}
    elif mode == "aggregated":
        words, slab_counts = _aggregated(system, cert, n, limit, cap or AGGREGATED_TYPE_CAP)
        slabs = None
    else:
        raise ValueError(f"unknown mode {mode!r}")
    assert sum(words.values()) == system.size**n
    tube_counts, total = _total(system, cert, n, slab_counts)
    log.info("n=%d mode=%s W=%.6g", n, mode, float(total))
    return CoverCertificate(cert, n, mode, words, slab_counts, tube_counts, total, slabs, slack)


def required_level(
    system: DigitSystem,
    cert: DirectionCertificate,
    epsilon: float | Fraction,
    n_max: int = 16,
) -> CoverCertificate:
    """Smallest level up to ``n_max`` whose aggregated width bound is below ``epsilon``."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    eps = Fraction(epsilon)
    scanned: list[tuple[int, Fraction]] = []
    for n in range(1, n_max + 1):
        cover = build_cover(system, cert, n, "aggregated")
        scanned.append((n, cover.total_width_bound))
        if cover.total_width_bound < eps:
            return cover
    best = min(scanned, key=lambda item: item[1])
    raise LevelNotReached(
        f"no level <= {n_max} has width bound < {float(eps)}; smallest was {float(best[1]):.4g} at n={best[0]}",
        scanned,
    )


@dataclass(frozen=True)
class DecayConstants:
    C: float
    K: int
    multiplicity: int
    tube_factor: float = field(default=1.0)

    def bound(self, n: int, N: int, delta: float) -> float:
        return self.C * (n + 1) ** self.K * N ** (-n * delta)


def decay_constants(cert: DirectionCertificate) -> DecayConstants:
    """Constants of the assertable decay inequality ``W(n) <= C (n+1)^K N^(-n delta)``.

    ``C = |V| (max |v|_1)^(d-1) mu tau`` with ``mu`` the largest number of
    projected values sharing a residue and ``tau`` the tube-subdivision
    overhead (1 in the plane); ``K`` is the largest residue alphabet.
    """
    system = cert.system
    d = system.d
    alphabets = [ProjectedAlphabet(system, v) for v in cert.directions]
    l1 = max(v.l1 for v in cert.directions)
    mu = max(a.multiplicity for a in alphabets)
    tau = 1.0 if d == 2 else 2.0 ** (d - 2) * (d - 2 + l1 * l1) ** ((d - 1) / 2)
    C = len(cert.directions) * l1 ** (d - 1) * mu * tau
    return DecayConstants(C=C, K=max(a.residue_alphabet for a in alphabets), multiplicity=mu, tube_factor=tau)


def width_table(
    system: DigitSystem, cert: DirectionCertificate, levels: Iterable[int], mode: str = "aggregated"
) -> list[tuple[int, Fraction]]:
    return [(n, build_cover(system, cert, n, mode).total_width_bound) for n in levels]
