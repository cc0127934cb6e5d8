"""Independent checks of serialized cover certificates.

Nothing here calls the cover builder: the checks read the JSON dict and
recompute assignments, positions and widths with their own code, in exact
integer or rational arithmetic wherever a yes/no answer is produced.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

CONTAINMENT_CAP = 2_000_000


@dataclass
class Check:
    name: str
    passed: bool
    details: str = ""
    skipped: bool = False


@dataclass
class VerificationReport:
    checks: list[Check] = field(default_factory=list)
    samples_tested: int = 0
    sample_failures: int = 0
    width_bound: str | None = None
    seed: int | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, details: str = "", skipped: bool = False) -> None:
        self.checks.append(Check(name, bool(passed), details, skipped))

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(
            checks=self.checks + other.checks,
            samples_tested=self.samples_tested + other.samples_tested,
            sample_failures=self.sample_failures + other.sample_failures,
            width_bound=other.width_bound or self.width_bound,
            seed=other.seed if other.seed is not None else self.seed,
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["passed"] = self.passed
        return out


class _Cover:
    """Plain view of a cover JSON dict."""

    def __init__(self, data: dict):
        sysd = data["system"]
        self.d, self.N = int(sysd["d"]), int(sysd["N"])
        self.digits = [tuple(int(c) for c in i) for i in sysd["digits"]]
        self.V = [tuple(int(c) for c in v) for v in data["V"]]
        self.keys = [",".join(map(str, v)) for v in self.V]
        self.n = int(data["n"])
        self.mode = data["mode"]
        self.limit = 1.0 - float(data["delta_star"]) + float(data["gap"]) + float(data["slack"])
        raw = data.get("slabs")
        self.slabs = None if raw is None else {k: {int(q) for q in qs} for k, qs in raw.items()}
        self.slab_counts = {k: int(c) for k, c in data["slab_counts"].items()}
        self.word_counts = {k: int(c) for k, c in data["word_counts"].items()}
        self.tube_counts = {k: int(c) for k, c in data["tube_counts"].items()}
        self.total = data["total_width_bound"]
        self.embedded_V = [tuple(v) for v in data.get("certificate", {}).get("V", data["V"])]

    @staticmethod
    def low_high(v: tuple[int, ...]) -> tuple[int, int]:
        return sum(c for c in v if c < 0), sum(c for c in v if c > 0)


def _entropy(counts: list[int], N: int) -> float:
    n = sum(counts)
    return -sum(c / n * math.log(c / n) for c in counts if c) / math.log(N)


def verify_containment(data: dict, cap: int = CONTAINMENT_CAP) -> VerificationReport:
    """Re-enumerate every level-n word and check its cube lies in a listed slab."""
    cov = _Cover(data)
    report = VerificationReport()
    report.add("direction lists agree", cov.embedded_V == cov.V, f"V={cov.V}")
    if cov.slabs is None:
        report.add("containment", True, "aggregated certificate lists no slabs", skipped=True)
        return report
    report.add("slab keys match directions", sorted(cov.slabs) == sorted(cov.keys))
    total = len(cov.digits) ** cov.n
    if total > cap:
        report.add("containment", False, f"{total} words exceed the verification cap {cap}")
        return report
    N, n = cov.N, cov.n
    offsets = list(itertools.product((0, 1), repeat=cov.d))
    uncovered, unassigned = [], []
    counts = {k: 0 for k in cov.keys}
    for w in itertools.product(cov.digits, repeat=n):
        owner = None
        for v, key in zip(cov.V, cov.keys):
            res = [0] * N
            for s in w:
                res[sum(a * b for a, b in zip(s, v)) % N] += 1
            if _entropy(res, N) <= cov.limit:
                owner = (v, key)
                break
        if owner is None:
            unassigned.append(w)
            continue
        v, key = owner
        counts[key] += 1
        corner = [0] * cov.d
        for s in w:
            corner = [N * c + a for c, a in zip(corner, s)]
        Q = sum(c * a for c, a in zip(corner, v))
        low, high = cov.low_high(v)
        listed = cov.slabs.get(key, set())
        # the cube is inside slab q iff every vertex projects into [q + low, q + high]
        ok = Q in listed and all(
            Q + low <= sum((c + o) * a for c, o, a in zip(corner, off, v)) <= Q + high for off in offsets
        )
        if not ok:
            uncovered.append(w)
    report.add(
        "every word assigned", not unassigned, f"{len(unassigned)} unassigned" + (f", first {unassigned[0]}" if unassigned else "")
    )
    report.add(
        "every cube inside a listed slab",
        not uncovered,
        f"{total} words, {len(uncovered)} uncovered" + (f", first {uncovered[0]}" if uncovered else ""),
    )
    report.add("word counts match", counts == cov.word_counts, f"recomputed {counts}")
    return report


def _tube_geometry(v: tuple[int, ...], n: int, N: int, d: int):
    """(cells per axis, tubes per slab, exact squared tube diameter, in-plane axes)."""
    b = Fraction(sum(map(abs, v)), N**n)
    if d == 2:
        return 1, 1, b * b, (0, 1)
    cells = math.ceil(1 / b)
    h = Fraction(1, cells)
    p, j = sorted(range(d), key=lambda k: (-abs(v[k]), k))[:2]
    rest = [t for t in range(d) if t not in (p, j)]
    spread = b + h * sum(abs(v[t]) for t in rest)
    diam2 = (d - 2) * h * h + spread * spread / (v[p] ** 2 + v[j] ** 2)
    return cells, cells ** (d - 2), diam2, (p, j)


def _power_bound(diam2: Fraction, e: int) -> Fraction:
    """Exact ``diam^e`` when ``e`` is even, else a rational upper bound."""
    if e % 2 == 0:
        return diam2 ** (e // 2)
    k = 64
    root = Fraction(math.isqrt(-(-diam2.numerator * 4**k // diam2.denominator)) + 1, 2**k)
    return diam2 ** (e // 2) * root


def verify_width(data: dict) -> VerificationReport:
    """Recompute the total ``sum width^(d-1)`` with independent rational code."""
    cov = _Cover(data)
    report = VerificationReport()
    total = Fraction(0)
    tubes = {}
    for v, key in zip(cov.V, cov.keys):
        slabs = len(cov.slabs[key]) if cov.slabs is not None and key in cov.slabs else cov.slab_counts.get(key, 0)
        if cov.slabs is not None:
            report.add(f"slab count {key}", slabs == cov.slab_counts.get(key), f"{slabs} listed")
        _, per_slab, diam2, _ = _tube_geometry(v, cov.n, cov.N, cov.d)
        each = Fraction(sum(map(abs, v)), cov.N**cov.n) if cov.d == 2 else _power_bound(diam2, cov.d - 1)
        tubes[key] = slabs * per_slab
        total += slabs * per_slab * each
    text = f"{total.numerator}/{total.denominator}"
    report.width_bound = text
    try:
        claimed = Fraction(cov.total)
    except (ValueError, ZeroDivisionError):
        claimed = None
    report.add("total width bound", claimed == total and cov.total == text, f"recomputed {text}, claimed {cov.total}")
    report.add("tube counts", tubes == cov.tube_counts, f"recomputed {tubes}")
    return report


def _in_tube(x: list[Fraction], v: tuple[int, ...], q: int, n: int, N: int, d: int) -> bool:
    cells, _, diam2, (p, j) = _tube_geometry(v, n, N, d)
    h = Fraction(1, cells)
    rest = [t for t in range(d) if t not in (p, j)]
    centers = {t: (min(int(x[t] * cells), cells - 1) + Fraction(1, 2)) * h for t in rest}
    low, high = _Cover.low_high(v)
    mid = Fraction(2 * q + low + high, 2 * N**n) - sum(v[t] * c for t, c in centers.items())
    beta2 = (v[p] * x[p] + v[j] * x[j] - mid) ** 2 / (v[p] ** 2 + v[j] ** 2)
    return 4 * (sum((x[t] - c) ** 2 for t, c in centers.items()) + beta2) <= diam2


def verify_sampling(
    data: dict,
    samples: int,
    depth: int,
    seed: int = 0,
    population: str = "attractor",
) -> VerificationReport:
    """Check random deep points against the union of listed slabs (tubes when d >= 3).

    ``population="cube"`` draws digits from the full grid instead; it is a
    negative control and is expected to fail.
    """
    cov = _Cover(data)
    report = VerificationReport(seed=seed)
    if samples == 0:
        report.add("sampling", True, "no samples requested")
        return report
    if cov.slabs is None:
        report.add("sampling", True, "aggregated certificate lists no slabs", skipped=True)
        return report
    if depth < cov.n + 2:
        raise ValueError(f"depth {depth} must be at least n + 2 = {cov.n + 2}")
    N, n, d = cov.N, cov.n, cov.d
    rng = np.random.Generator(np.random.Philox(seed))
    if population == "attractor":
        alphabet = np.array(cov.digits, dtype=np.int64)
    elif population == "cube":
        alphabet = np.array(list(itertools.product(range(N), repeat=d)), dtype=np.int64)
    else:
        raise ValueError(f"unknown population {population!r}")
    picks = rng.integers(0, len(alphabet), size=(samples, depth))
    exact = N**depth * N * max(map(sum, (map(abs, v) for v in cov.V))) < 2**62
    X = np.zeros((samples, d), dtype=np.int64 if exact else object)
    for k in range(depth):
        X = X * N + alphabet[picks[:, k]].astype(X.dtype)
    scale = N ** (depth - n)
    covered = np.zeros(samples, dtype=bool)
    for v, key in zip(cov.V, cov.keys):
        listed = np.array(sorted(cov.slabs[key]), dtype=X.dtype)
        if not len(listed):
            continue
        low, high = cov.low_high(v)
        P = X @ np.array(v, dtype=X.dtype)  # x.v scaled by N^depth
        # slab q holds the point iff (q + low) s <= P <= (q + high) s
        first = -((-(P - high * scale)) // scale)
        for offset in range(high - low + 1):
            q = first + offset
            hit = np.isin(q, listed) & (q * scale + low * scale <= P) & (P <= q * scale + high * scale)
            if d > 2:
                for r in np.nonzero(hit & ~covered)[0]:
                    x = [Fraction(int(c), N**depth) for c in X[r]]
                    hit[r] = _in_tube(x, v, int(q[r]), n, N, d)
            covered |= hit
    failures = int((~covered).sum())
    report.samples_tested = samples
    report.sample_failures = failures
    report.add(
        f"sampling ({population})",
        failures == 0,
        f"{samples} points at depth {depth}, {failures} outside the cover, Philox seed {seed}",
    )
    return report


def verify_all(data: dict, samples: int = 0, depth: int | None = None, seed: int = 0) -> VerificationReport:
    report = verify_containment(data).merge(verify_width(data))
    depth = depth if depth is not None else int(data["n"]) + 4
    return report.merge(verify_sampling(data, samples, depth, seed))


@dataclass(frozen=True)
class DecayRow:
    n: int
    width: Fraction
    ratio: float | None
    bound: float
    holds: bool


@dataclass(frozen=True)
class DecayReport:
    rows: tuple[DecayRow, ...]
    C: float
    K: int
    delta_star: float

    @property
    def holds(self) -> bool:
        return all(r.holds for r in self.rows)

    def decreasing_from(self) -> int | None:
        """First level from which widths strictly decrease through the end of the table."""
        start = None
        for a, b in zip(self.rows, self.rows[1:]):
            if b.width < a.width:
                start = a.n if start is None else start
            else:
                start = None
        return start

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "K": self.K,
            "delta_star": self.delta_star,
            "holds": self.holds,
            "rows": [
                {"n": r.n, "W": f"{r.width.numerator}/{r.width.denominator}", "ratio": r.ratio, "bound": r.bound, "holds": r.holds}
                for r in self.rows
            ],
        }


def decay_report(system, cert, n_range) -> DecayReport:
    """Aggregated widths over ``n_range`` against ``C (n+1)^K N^(-n delta)``."""
    from .cover import build_cover, decay_constants

    const = decay_constants(cert)
    rows, prev = [], None
    for n in n_range:
        W = build_cover(system, cert, n, "aggregated").total_width_bound
        bound = const.bound(n, system.N, cert.delta_star)
        rows.append(DecayRow(n, W, None if prev is None else float(W / prev), bound, float(W) <= bound))
        prev = W
    return DecayReport(tuple(rows), const.C, const.K, cert.delta_star)
