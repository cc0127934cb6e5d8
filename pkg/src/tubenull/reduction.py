"""Graph-directed systems with cube symmetries, reduced to digit systems.

An edge ``e: i -> j`` carries a digit ``i_e`` in ``{0..N-1}^d`` and a cube
isometry ``A_e``; it contributes ``(A_e(K_j) + i_e) / N`` to ``K_i``.
Closing the union of the attractors under all cube symmetries makes it
invariant under ``x -> Nx mod 1``, so its occupied level-q cells form a digit
system with base ``N^q`` whose attractor contains every ``K_i``.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .digits import DigitSystem, validate_system

Cell = tuple[int, ...]


class GDSError(ValueError):
    pass


class Inconclusive(RuntimeError):
    pass


class CellCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Isometry:
    """Reflect the flagged input coordinates (``x -> 1 - x``), then permute: ``y_k = x'_perm[k]``."""

    perm: tuple[int, ...]
    reflect: tuple[bool, ...]

    @classmethod
    def identity(cls, d: int) -> "Isometry":
        return cls(tuple(range(d)), (False,) * d)

    @property
    def d(self) -> int:
        return len(self.perm)

    def apply_cell(self, c: Sequence[int], side: int) -> Cell:
        """Image of the cell with index ``c`` on a grid with ``side`` cells per axis."""
        flipped = [side - 1 - x if r else x for x, r in zip(c, self.reflect)]
        return tuple(flipped[k] for k in self.perm)

    def apply_point(self, x: Sequence) -> tuple:
        flipped = [1 - a if r else a for a, r in zip(x, self.reflect)]
        return tuple(flipped[k] for k in self.perm)

    def compose(self, inner: "Isometry") -> "Isometry":
        """``self o inner``."""
        perm = tuple(inner.perm[self.perm[k]] for k in range(self.d))
        reflect = [False] * self.d
        for k in range(self.d):
            i = perm[k]
            reflect[i] = self.reflect[self.perm[k]] ^ inner.reflect[i]
        return Isometry(perm, tuple(reflect))


def cube_group(d: int) -> list[Isometry]:
    """All ``2^d d!`` symmetries of the unit cube, identity first."""
    return [
        Isometry(perm, tuple(bool(b) for b in mask))
        for perm in itertools.permutations(range(d))
        for mask in itertools.product((0, 1), repeat=d)
    ]


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    digit: Cell
    isometry: Isometry


@dataclass(frozen=True)
class GraphDirectedSystem:
    d: int
    N: int
    vertices: int
    edges: tuple[Edge, ...]

    def outgoing(self, i: int) -> list[Edge]:
        return [e for e in self.edges if e.source == i]

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "N": self.N,
            "vertices": self.vertices,
            "edges": [
                {
                    "from": e.source,
                    "to": e.target,
                    "digit": list(e.digit),
                    "perm": list(e.isometry.perm),
                    "reflect": [int(r) for r in e.isometry.reflect],
                }
                for e in self.edges
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GraphDirectedSystem":
        try:
            d, N, q = data["d"], data["N"], data["vertices"]
            edges = [
                Edge(
                    int(e["from"]),
                    int(e["to"]),
                    tuple(e["digit"]),
                    Isometry(tuple(e.get("perm", range(d))), tuple(bool(r) for r in e.get("reflect", [0] * d))),
                )
                for e in data["edges"]
            ]
        except (KeyError, TypeError) as exc:
            raise GDSError(f"malformed graph-directed system JSON: {exc}") from None
        return make_gds(d, N, q, edges)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _reachable(start: int, succ: dict[int, set[int]]) -> set[int]:
    seen, todo = {start}, deque([start])
    while todo:
        for j in succ[todo.popleft()]:
            if j not in seen:
                seen.add(j)
                todo.append(j)
    return seen


def make_gds(d: int, N: int, vertices: int, edges: Iterable[Edge], strongly_connected: bool = True) -> GraphDirectedSystem:
    for name, val, least in (("dimension", d, 2), ("base", N, 2), ("vertex count", vertices, 1)):
        if isinstance(val, bool) or not isinstance(val, int) or val < least:
            raise GDSError(f"{name} must be an integer >= {least}, got {val!r}")
    edges = tuple(edges)
    fwd: dict[int, set[int]] = {i: set() for i in range(vertices)}
    back: dict[int, set[int]] = {i: set() for i in range(vertices)}
    for e in edges:
        if not (0 <= e.source < vertices and 0 <= e.target < vertices):
            raise GDSError(f"edge {e.source}->{e.target} names a missing vertex")
        if len(e.digit) != d or not all(isinstance(c, int) and 0 <= c < N for c in e.digit):
            raise GDSError(f"edge digit {list(e.digit)} is not in {{0..{N - 1}}}^{d}")
        if sorted(e.isometry.perm) != list(range(d)) or len(e.isometry.reflect) != d:
            raise GDSError(f"edge isometry {e.isometry} is not a signed permutation of {d} coordinates")
        fwd[e.source].add(e.target)
        back[e.target].add(e.source)
    if any(not fwd[i] for i in range(vertices)):
        raise GDSError("every vertex needs an outgoing edge")
    if strongly_connected and (len(_reachable(0, fwd)) < vertices or len(_reachable(0, back)) < vertices):
        raise GDSError("graph is not strongly connected")
    return GraphDirectedSystem(d, N, vertices, edges)


def from_digit_system(system: DigitSystem) -> GraphDirectedSystem:
    """A plain IFS as a one-vertex system with identity isometries."""
    ident = Isometry.identity(system.d)
    return make_gds(system.d, system.N, 1, [Edge(0, 0, i, ident) for i in system.digits])


def symmetrize(g: GraphDirectedSystem) -> GraphDirectedSystem:
    """Vertices ``(i, B)`` for B in the cube group, with attractor ``B(K_i)``.

    ``B((A x + i_e) / N) = ((B o A) x + B(i_e)) / N`` with ``B(i_e)`` the
    level-1 cell action, so each new edge has the identity isometry and
    targets ``(j, B o A_e)``.
    """
    group = cube_group(g.d)
    index = {B: k for k, B in enumerate(group)}
    ident = Isometry.identity(g.d)
    edges = []
    for i in range(g.vertices):
        for b, B in enumerate(group):
            for e in g.outgoing(i):
                target = e.target * len(group) + index[B.compose(e.isometry)]
                edges.append(Edge(i * len(group) + b, target, B.apply_cell(e.digit, g.N), ident))
    return make_gds(g.d, g.N, g.vertices * len(group), edges, strongly_connected=False)


@dataclass(frozen=True)
class CellSet:
    level: int
    N: int
    cells: frozenset[Cell]

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def full(self) -> bool:
        d = len(next(iter(self.cells))) if self.cells else 0
        return len(self.cells) == (self.N**self.level) ** d


def vertex_cells(g: GraphDirectedSystem, q: int, cap: int = 10**7) -> list[set[Cell]]:
    """Level-q cells of each vertex's cylinders, built by q-fold edge iteration."""
    if q < 1:
        raise ValueError("level must be >= 1")
    level = [{(0,) * g.d} for _ in range(g.vertices)]
    for k in range(1, q + 1):
        side, shift = g.N ** (k - 1), g.N ** (k - 1)
        nxt: list[set[Cell]] = [set() for _ in range(g.vertices)]
        for e in g.edges:
            out = nxt[e.source]
            for c in level[e.target]:
                moved = e.isometry.apply_cell(c, side)
                out.add(tuple(a * shift + m for a, m in zip(e.digit, moved)))
        if sum(map(len, nxt)) > cap:
            raise CellCapExceeded(f"more than {cap} occupied cells at level {k}")
        level = nxt
    return level


def occupied_cells(g: GraphDirectedSystem, q: int, cap: int = 10**7) -> CellSet:
    return CellSet(q, g.N, frozenset().union(*vertex_cells(g, q, cap)))


def reduce_to_digit_system(g: GraphDirectedSystem, q_max: int, cap: int = 10**7) -> tuple[DigitSystem, int]:
    """Digit system with base ``N^q`` for the first ``q <= q_max`` leaving a cell empty."""
    if q_max < 1:
        raise ValueError("q_max must be >= 1")
    sym = symmetrize(g)
    for q in range(1, q_max + 1):
        cells = occupied_cells(sym, q, cap)
        if not cells.full:
            return validate_system(g.d, g.N**q, [list(c) for c in cells.cells]), q
    raise Inconclusive(f"every level-q cell is occupied for q <= {q_max}")
