"""Entropy-gap certificates for finite direction sets.

For a direction set ``V`` the objective on the digit simplex is

    g(p) = min_{v in V} H_N(residues of p along v),

a concave function.  ``delta_star = 1 - max g``; a positive value means
every probability vector (and hence every empirical type of a word) has a
direction whose residue entropy is at most ``1 - delta_star``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize

from .digits import DigitSystem
from .entropy import compositions, probability_entropy, type_count
from .projection import Direction, axis_and_diagonal_directions, primitive_directions

log = logging.getLogger(__name__)

CLAMP = 1e-12


@dataclass(frozen=True)
class CertifierConfig:
    max_iters: int = 2000
    step: float = 0.5
    gap_tol: float = 1e-6
    polish: bool = True
    oracle_resolution: int = 8
    oracle_limit: int = 20000
    seed: int = 0
    run_oracle: bool = True


@dataclass(frozen=True)
class DirectionCertificate:
    system: DigitSystem
    directions: tuple[Direction, ...]
    delta_star: float
    witness: tuple[float, ...]
    gap: float
    oracle: float | None = None
    dual: tuple[float, ...] = field(default=())
    certified: bool = False

    @property
    def value(self) -> float:
        return 1.0 - self.delta_star

    def to_dict(self) -> dict:
        return {
            "system": self.system.to_dict(),
            "V": [list(v.v) for v in self.directions],
            "delta_star": self.delta_star,
            "witness": list(self.witness),
            "gap": self.gap,
            "oracle": self.oracle,
            "dual": list(self.dual),
            "certified": self.certified,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DirectionCertificate":
        system = DigitSystem.from_dict(data["system"])
        witness = tuple(float(x) for x in data["witness"])
        if len(witness) != system.size:
            raise ValueError("witness length does not match the digit count")
        delta = float(data["delta_star"])
        if not 0.0 <= delta <= 1.0:
            raise ValueError(f"delta_star={delta} outside [0, 1]")
        return cls(
            system=system,
            directions=tuple(Direction(v) for v in data["V"]),
            delta_star=delta,
            witness=witness,
            gap=float(data["gap"]),
            oracle=None if data.get("oracle") is None else float(data["oracle"]),
            dual=tuple(float(x) for x in data.get("dual", ())),
            certified=bool(data.get("certified", False)),
        )


class _Objective:
    """Vectorised residue entropies for one system and direction list."""

    def __init__(self, system: DigitSystem, directions: Sequence[Direction]):
        if not directions:
            raise ValueError("direction set is empty")
        self.N = system.N
        self.m = system.size
        V = np.array([v.v for v in directions], dtype=np.int64)
        res = (system.array @ V.T) % system.N  # digits x directions
        M = np.zeros((len(directions), system.N, system.size))
        for a in range(len(directions)):
            M[a, res[:, a], np.arange(system.size)] = 1.0
        self.M = M

    def entropies(self, p: np.ndarray) -> np.ndarray:
        """Shape (..., |V|) for p of shape (..., m)."""
        q = np.einsum("vri,...i->...vr", self.M, p)
        return probability_entropy(q, self.N)

    def value(self, p: np.ndarray) -> np.ndarray:
        return self.entropies(p).min(axis=-1)

    def gradients(self, p: np.ndarray) -> np.ndarray:
        q = np.maximum(self.M @ p, CLAMP)  # |V| x N
        g = -(np.log(q) + 1.0) / math.log(self.N)
        return np.einsum("vr,vri->vi", g, self.M)


def objective(system: DigitSystem, p: Sequence[float], directions: Sequence[Direction]) -> float:
    return float(_Objective(system, directions).value(np.asarray(p, dtype=np.float64)))


def project_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, len(y) + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


def _ascent(obj: _Objective, p0: np.ndarray, cfg: CertifierConfig) -> np.ndarray:
    p = p0.copy()
    best, best_val = p.copy(), float(obj.value(p))
    avg, weight = np.zeros_like(p), 0.0
    for t in range(cfg.max_iters):
        interior = np.maximum(p, CLAMP)
        interior /= interior.sum()
        H = obj.entropies(interior)
        active = int(np.argmin(H))  # lowest index on ties
        s = obj.gradients(interior)[active]
        s = s - s.mean()
        norm = np.linalg.norm(s)
        if norm == 0.0:
            break
        eta = cfg.step / math.sqrt(t + 1.0)
        p = project_simplex(p + eta * s / norm)
        avg += eta * p
        weight += eta
        val = float(obj.value(p))
        if val > best_val:
            best, best_val = p.copy(), val
    if weight:
        mean = avg / weight
        if float(obj.value(mean)) > best_val:
            best = mean
    return best


def _polish(obj: _Objective, p0: np.ndarray) -> np.ndarray:
    m = obj.m

    def entropies(x: np.ndarray) -> np.ndarray:
        return obj.entropies(np.clip(x[:m], 0.0, 1.0)) - x[m]

    def jac(x: np.ndarray) -> np.ndarray:
        grads = obj.gradients(np.clip(x[:m], CLAMP, 1.0))
        return np.hstack([grads, -np.ones((grads.shape[0], 1))])

    x0 = np.append(p0, obj.value(p0))
    res = minimize(
        lambda x: -x[m],
        x0,
        jac=lambda x: np.append(np.zeros(m), -1.0),
        constraints=[
            {"type": "eq", "fun": lambda x: x[:m].sum() - 1.0, "jac": lambda x: np.append(np.ones(m), 0.0)},
            {"type": "ineq", "fun": entropies, "jac": jac},
        ],
        bounds=[(0.0, 1.0)] * (m + 1),
        method="SLSQP",
        options={"ftol": 1e-15, "maxiter": 500},
    )
    p = np.clip(res.x[:m], 0.0, None)
    return p / p.sum()


def _dual_gap(obj: _Objective, p: np.ndarray) -> tuple[float, np.ndarray]:
    """Certified bound ``max g - g(p)`` from the linearisation at an interior point.

    For any weights ``lam`` on V, ``max g <= max_q sum_v lam_v H_v(q)``, and the
    concave right side is bounded by its tangent plane maximised over the
    simplex vertices.  The best ``lam`` solves a small LP.
    """
    interior = np.maximum(p, CLAMP)
    interior /= interior.sum()
    H = obj.entropies(interior)
    G = obj.gradients(interior)
    A = H[:, None] + G - (G @ interior)[:, None]  # directions x vertices
    k, m = A.shape
    res = linprog(
        c=np.append(np.zeros(k), 1.0),
        A_ub=np.hstack([A.T, -np.ones((m, 1))]),
        b_ub=np.zeros(m),
        A_eq=np.append(np.ones(k), 0.0)[None, :],
        b_eq=[1.0],
        bounds=[(0.0, None)] * k + [(None, None)],
        method="highs",
    )
    if res.status == 0:
        lam = np.clip(res.x[:k], 0.0, None)
        lam /= lam.sum()
    else:
        lam = np.full(k, 1.0 / k)
    upper = float((lam @ A).max())
    return max(upper - float(obj.value(p)), 0.0), lam


def delta_star(
    system: DigitSystem,
    directions: Sequence[Direction],
    config: CertifierConfig | None = None,
) -> DirectionCertificate:
    cfg = config or CertifierConfig()
    directions = tuple(directions)
    obj = _Objective(system, directions)
    m = system.size
    if m == 1:
        p = np.ones(1)
        gap, lam = 0.0, np.full(len(directions), 1.0 / len(directions))
    else:
        p = _ascent(obj, np.full(m, 1.0 / m), cfg)
        if cfg.polish:
            polished = _polish(obj, p)
            if obj.value(polished) >= obj.value(p):
                p = polished
        gap, lam = _dual_gap(obj, p)
    value = float(obj.value(p))
    delta = min(max(1.0 - value, 0.0), 1.0)
    oracle = None
    if cfg.run_oracle:
        oracle, _ = grid_oracle(system, directions, cfg.oracle_resolution, cfg.oracle_limit, cfg.seed)
    certified = delta - gap > cfg.gap_tol
    log.debug("V=%s delta*=%.3g gap=%.3g certified=%s", [v.v for v in directions], delta, gap, certified)
    return DirectionCertificate(
        system=system,
        directions=directions,
        delta_star=delta,
        witness=tuple(float(x) for x in p),
        gap=gap,
        oracle=oracle,
        dual=tuple(float(x) for x in lam),
        certified=certified,
    )


def _random_compositions(k: int, m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    # stars and bars: m-1 bar positions among k+m-1 slots
    slots = k + m - 1
    bars = np.sort(np.array([rng.choice(slots, size=m - 1, replace=False) for _ in range(count)]), axis=1)
    edges = np.hstack([np.full((count, 1), -1), bars, np.full((count, 1), slots)])
    return np.diff(edges, axis=1) - 1


def grid_oracle(
    system: DigitSystem,
    directions: Sequence[Direction],
    resolution: int,
    limit: int = 20000,
    seed: int = 0,
) -> tuple[float, np.ndarray]:
    """Largest objective value over simplex points with denominator ``resolution``.

    Exhaustive when the grid has at most ``limit`` points, otherwise a seeded
    uniform subsample of that size.  A lower bound on ``max g``.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    m = system.size
    obj = _Objective(system, directions)
    if type_count(resolution, m) <= limit:
        grid = compositions(resolution, m)
    else:
        grid = _random_compositions(resolution, m, limit, np.random.default_rng(seed))
    values = obj.value(grid / resolution)
    best = int(np.argmax(values))
    return float(values[best]), grid[best] / resolution


def direction_search(
    system: DigitSystem,
    r_max: int,
    config: CertifierConfig | None = None,
) -> DirectionCertificate:
    """Greedily grow a direction set until its entropy gap is certified.

    Candidates: axes and two-coordinate diagonals first, then every primitive
    vector of max-norm <= R for R = 1..r_max, smaller l1 norm first.  Each step
    adds the candidate with the lowest residue entropy at the current maximiser.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    cfg = config or CertifierConfig()
    quiet = replace(cfg, run_oracle=False)
    chosen: list[Direction] = []
    p = np.full(system.size, 1.0 / system.size)
    cert: DirectionCertificate | None = None
    for radius in range(1, r_max + 1):
        pool = list(dict.fromkeys(axis_and_diagonal_directions(system.d) + primitive_directions(system.d, radius)))
        while True:
            candidates = [v for v in pool if v not in chosen]
            if not candidates:
                break
            H = _Objective(system, candidates).entropies(p)
            chosen.append(candidates[int(np.argmin(H))])
            cert = delta_star(system, chosen, quiet)
            p = np.array(cert.witness)
            if cert.certified:
                return delta_star(system, chosen, cfg)
    assert cert is not None
    log.info("no certified direction set with max-norm <= %d", r_max)
    return delta_star(system, chosen, cfg)
