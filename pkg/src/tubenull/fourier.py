"""Fourier transforms of self-similar measures by truncated infinite products.

For weights ``p`` on digits ``i`` the self-similar measure has

    mu_hat(xi) = prod_{k >= 1} phi(xi / N^k),   phi(xi) = sum_i p_i exp(-2 pi i <i, xi>).

Diagnostic only; nothing in the cover pipeline depends on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .digits import DigitSystem
from .projection import Direction

DEFAULT_DEPTH = 40
DEFAULT_THRESHOLD = 1e-6


@dataclass(frozen=True)
class Measure:
    """Digit weights for ``x -> (x + i) / N``; the digit set is not validated, so full grids are allowed."""

    digits: np.ndarray
    weights: np.ndarray
    N: int

    @classmethod
    def build(cls, digits: Sequence[Sequence[int]], weights: Sequence[float], N: int, tol: float = 1e-9) -> "Measure":
        D = np.asarray(digits, dtype=np.float64)
        w = np.asarray(weights, dtype=np.float64)
        if D.ndim != 2 or len(D) != len(w):
            raise ValueError("need one weight per digit")
        if np.any(w < 0) or abs(w.sum() - 1.0) > tol:
            raise ValueError("weights must be non-negative and sum to 1")
        return cls(D, w, int(N))

    @classmethod
    def uniform(cls, system: DigitSystem) -> "Measure":
        return cls.build(system.digits, [1.0 / system.size] * system.size, system.N)

    @classmethod
    def on(cls, system: DigitSystem, weights: Sequence[float]) -> "Measure":
        return cls.build(system.digits, weights, system.N)

    def phi(self, xi: Sequence[float]) -> complex:
        return complex(self.weights @ np.exp(-2j * np.pi * (self.digits @ np.asarray(xi, dtype=np.float64))))

    def mean_norm(self) -> float:
        return float(self.weights @ np.linalg.norm(self.digits, axis=1))


def mu_hat(mu: Measure, xi: Sequence[float], depth: int = DEFAULT_DEPTH) -> complex:
    if depth < 1:
        raise ValueError("depth must be >= 1")
    xi = np.asarray(xi, dtype=np.float64)
    scales = float(mu.N) ** -np.arange(1, depth + 1)
    phases = np.outer(scales, mu.digits @ xi)  # depth x digits
    factors = np.exp(-2j * np.pi * phases) @ mu.weights
    return complex(np.prod(factors))


def truncation_bound(mu: Measure, xi: Sequence[float], depth: int) -> float:
    """``sum_{k > depth} 2 pi |xi| E|i| / N^k``, a bound on the dropped tail."""
    norm = float(np.linalg.norm(np.asarray(xi, dtype=np.float64)))
    return 2 * math.pi * norm * mu.mean_norm() / (mu.N**depth * (mu.N - 1))


@dataclass(frozen=True)
class InvarianceCheck:
    direction: Direction
    z: int
    at_zv: complex
    at_nzv: complex
    difference: float
    bound: float


def check_scaling_invariance(mu: Measure, v: Direction, z: int, depth: int = DEFAULT_DEPTH) -> InvarianceCheck:
    """Compare ``mu_hat(z v)`` with ``mu_hat(N z v)``; equal up to truncation since ``phi(z v) = 1``."""
    if z == 0:
        raise ValueError("z must be nonzero")
    zv = [z * c for c in v.v]
    a = mu_hat(mu, zv, depth)
    b = mu_hat(mu, [mu.N * c for c in zv], depth)
    bound = truncation_bound(mu, [mu.N * c for c in zv], depth)
    return InvarianceCheck(v, z, a, b, abs(a - b), bound)


def nonvanishing_scan(
    mu: Measure,
    directions: Sequence[Direction],
    z_max: int,
    depth: int = DEFAULT_DEPTH,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[tuple[Direction, int, float]]:
    """Entries ``(v, z, |mu_hat(z v)|)`` above ``threshold`` for ``1 <= z <= z_max``."""
    if z_max < 1:
        raise ValueError("z_max must be >= 1")
    out = []
    for v in directions:
        for z in range(1, z_max + 1):
            modulus = abs(mu_hat(mu, [z * c for c in v.v], depth))
            if modulus > threshold:
                out.append((v, z, modulus))
    return out
