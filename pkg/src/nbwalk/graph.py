"""Simple d-regular graphs: construction, edge-list I/O, girth and distances."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AttemptsExhausted,
    BadVertexId,
    DuplicateEdge,
    EdgeListFormatError,
    Infeasible,
    InvalidInput,
    NotRegular,
    OddDegreeSum,
    SelfLoop,
    UnknownName,
)

INF = math.inf


@dataclass(frozen=True, eq=False)
class RegularGraph:
    """Immutable simple d-regular graph on vertices ``0..n-1``.

    ``neighbors`` is an ``(n, d)`` integer array whose rows are sorted.
    Directed edges are numbered ``u * d + j`` for the edge from ``u`` to
    ``neighbors[u, j]``; the walk and spectral code work in that numbering.
    """

    n: int
    d: int
    neighbors: np.ndarray

    def __post_init__(self):
        self.neighbors.setflags(write=False)

    @cached_property
    def adj(self) -> list[list[int]]:
        return self.neighbors.tolist()

    @cached_property
    def head(self) -> np.ndarray:
        """Head vertex of each directed edge."""
        h = self.neighbors.reshape(-1).copy()
        h.setflags(write=False)
        return h

    @cached_property
    def reverse(self) -> np.ndarray:
        """Index of the reversed directed edge, ``rev[u*d+j] = v*d+i``."""
        n, d = self.n, self.d
        tail = np.repeat(np.arange(n), d)
        head = self.head
        # position of tail inside head's sorted neighbour row
        key_fwd = tail * n + head
        key_back = head * n + tail
        order = np.argsort(key_fwd)
        rev = order[np.searchsorted(key_fwd[order], key_back)]
        rev.setflags(write=False)
        return rev

    @cached_property
    def walk_tables(self) -> tuple[list[int], list[int]]:
        """``(head, prev_slot)`` as Python lists, for the per-step samplers.

        ``prev_slot[e]`` is the slot of the tail of ``e`` in its head's row.
        """
        return self.head.tolist(), (self.reverse % self.d).tolist()

    @property
    def num_edges(self) -> int:
        return self.n * self.d // 2

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges ``(u, v)`` with ``u < v``, lexicographically sorted."""
        return [(u, v) for u, row in enumerate(self.adj) for v in row if u < v]

    def edge_key(self) -> tuple[tuple[int, int], ...]:
        return tuple(self.edges())

    def __eq__(self, other):
        if not isinstance(other, RegularGraph):
            return NotImplemented
        return (self.n, self.d) == (other.n, other.d) and np.array_equal(
            self.neighbors, other.neighbors
        )

    def __hash__(self):
        return hash((self.n, self.d, self.neighbors.tobytes()))

    def check_vertex(self, v: int) -> int:
        if not isinstance(v, (int, np.integer)) or not 0 <= v < self.n:
            raise BadVertexId(f"vertex {v!r} not in [0, {self.n})")
        return int(v)


@dataclass(frozen=True)
class GraphGenSpec:
    n: int
    d: int
    min_girth: int | None = None
    seed: int = 0
    max_attempts: int = 100_000

    def __post_init__(self):
        if self.max_attempts < 1:
            raise InvalidInput("max_attempts must be >= 1")
        if self.min_girth is not None and self.min_girth < 3:
            raise InvalidInput("min_girth must be >= 3")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")


def _from_directed(n: int, tails: np.ndarray, heads: np.ndarray, d: int) -> RegularGraph:
    order = np.lexsort((heads, tails))
    nbrs = heads[order].reshape(n, d).astype(np.int64)
    return RegularGraph(n, d, nbrs)


def build_from_edge_list(n: int, edges: Iterable[Sequence[int]]) -> RegularGraph:
    """Build a :class:`RegularGraph` from unordered vertex pairs.

    Raises BadVertexId, SelfLoop, DuplicateEdge or NotRegular.
    """
    if n < 1:
        raise InvalidInput("n must be positive")
    seen = set()
    deg = [0] * n
    us, vs = [], []
    for pair in edges:
        u, v = (int(x) for x in pair)
        for x in (u, v):
            if not 0 <= x < n:
                raise BadVertexId(f"vertex {x} not in [0, {n})")
        if u == v:
            raise SelfLoop(f"self-loop at {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {key} repeated")
        seen.add(key)
        deg[u] += 1
        deg[v] += 1
        us.append(u)
        vs.append(v)
    degrees = set(deg)
    if len(degrees) != 1:
        raise NotRegular(f"degrees differ: {sorted(degrees)}")
    d = deg[0]
    if d < 2:
        raise NotRegular(f"degree {d} < 2")
    u_arr = np.asarray(us, dtype=np.int64)
    v_arr = np.asarray(vs, dtype=np.int64)
    return _from_directed(n, np.concatenate([u_arr, v_arr]), np.concatenate([v_arr, u_arr]), d)


def _petersen_edges():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return outer + spokes + inner


_NAMED = {
    "k4": (4, lambda: [(u, v) for u in range(4) for v in range(u + 1, 4)]),
    "petersen": (10, _petersen_edges),
    "k33": (6, lambda: [(u, v) for u in range(3) for v in range(3, 6)]),
    "q3": (8, lambda: [(u, u ^ (1 << b)) for u in range(8) for b in range(3) if u < u ^ (1 << b)]),
}

NAMED_GRAPHS = tuple(_NAMED)


def named_graph(name: str) -> RegularGraph:
    """Canonical small graphs: ``k4``, ``petersen``, ``k33`` and ``q3`` (3-cube)."""
    try:
        n, edges = _NAMED[name]
    except KeyError:
        raise UnknownName(f"unknown graph {name!r}; choose from {', '.join(NAMED_GRAPHS)}") from None
    return build_from_edge_list(n, edges())


def random_regular(spec: GraphGenSpec) -> RegularGraph:
    """Configuration-model random d-regular graph with whole-graph rejection.

    Each attempt pairs a uniform permutation of the ``n*d`` stubs and is thrown
    away if it has a self-loop, a repeated edge, or (when ``min_girth`` is set)
    a cycle shorter than ``min_girth``. Deterministic in ``spec.seed``.
    """
    n, d = spec.n, spec.d
    if (n * d) % 2:
        raise OddDegreeSum(f"n*d = {n * d} is odd")
    if d < 3:
        raise InvalidInput("random_regular requires d >= 3")
    if d >= n:
        raise InvalidInput("random_regular requires d < n")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(spec.max_attempts):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        u = pairs.min(axis=1)
        v = pairs.max(axis=1)
        if np.any(u == v):
            continue
        keys = u * n + v
        if np.unique(keys).size != keys.size:
            continue
        g = _from_directed(n, np.concatenate([u, v]), np.concatenate([v, u]), d)
        if spec.min_girth is not None and not girth_at_least(g, spec.min_girth):
            continue
        return g
    raise AttemptsExhausted(
        f"no simple {d}-regular graph on {n} vertices"
        + (f" with girth >= {spec.min_girth}" if spec.min_girth else "")
        + f" in {spec.max_attempts} attempts"
    )


def _shortest_cycle(g: RegularGraph, limit: float) -> float:
    # Returns the girth if it is < limit, else `limit`.
    adj = g.adj
    best = limit
    dist = [-1] * g.n
    parent = [-1] * g.n
    for s in range(g.n):
        touched = [s]
        dist[s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if 2 * du + 1 >= best:
                break
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = du + 1
                    parent[w] = u
                    touched.append(w)
                    queue.append(w)
                elif w != parent[u]:
                    length = du + dist[w] + 1
                    if length < best:
                        best = length
        for x in touched:
            dist[x] = -1
            parent[x] = -1
        if best == 3:
            break
    return best


def girth(g: RegularGraph) -> float:
    """Length of the shortest cycle (``math.inf`` for a forest)."""
    return _shortest_cycle(g, INF)


def girth_at_least(g: RegularGraph, bound: int) -> bool:
    return _shortest_cycle(g, bound) >= bound


def bfs_distances(g: RegularGraph, source: int) -> np.ndarray:
    """Hop distances from ``source``; unreachable vertices get -1."""
    source = g.check_vertex(source)
    adj = g.adj
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    return np.asarray(dist, dtype=np.int64)


def pairwise_distance(g: RegularGraph, u: int, v: int) -> float:
    u = g.check_vertex(u)
    v = g.check_vertex(v)
    if u == v:
        return 0
    adj = g.adj
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for w in adj[x]:
            if w not in dist:
                if w == v:
                    return dist[x] + 1
                dist[w] = dist[x] + 1
                queue.append(w)
    return INF


def far_vertex_set(g: RegularGraph, r: int, min_dist: int, anchor: int = 0) -> list[int]:
    """Greedy lowest-id-first choice of ``r`` vertices with pairwise distance >= ``min_dist``.

    The first vertex is ``anchor``. Unreachable vertices count as infinitely far.
    """
    if r < 1 or min_dist < 1:
        raise InvalidInput("need r >= 1 and min_dist >= 1")
    anchor = g.check_vertex(anchor)
    chosen = [anchor]
    near = np.zeros(g.n, dtype=bool)

    def mark(v):
        dist = bfs_distances(g, v)
        near[(dist >= 0) & (dist < min_dist)] = True

    mark(anchor)
    for v in range(g.n):
        if len(chosen) == r:
            break
        if not near[v]:
            chosen.append(v)
            mark(v)
    if len(chosen) < r:
        raise Infeasible(f"only {len(chosen)} vertices with pairwise distance >= {min_dist}; asked for {r}")
    return chosen


# ---------------------------------------------------------------- edge-list I/O


def format_edge_list(g: RegularGraph) -> str:
    lines = [f"{g.n} {g.d}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> RegularGraph:
    """Strict reader for the ``n d`` / ``u v`` edge-list format."""
    if not text.endswith("\n"):
        raise EdgeListFormatError("edge list must be newline-terminated")
    lines = text[:-1].split("\n")

    def ints(i, line):
        parts = line.split(" ")
        if len(parts) != 2 or not all(p.isascii() and p.isdigit() for p in parts):
            raise EdgeListFormatError(f"line {i + 1}: expected two decimal integers, got {line!r}")
        return int(parts[0]), int(parts[1])

    n, d = ints(0, lines[0])
    edges = []
    for i, line in enumerate(lines[1:], start=1):
        u, v = ints(i, line)
        if not u < v:
            raise EdgeListFormatError(f"line {i + 1}: need u < v, got {line!r}")
        edges.append((u, v))
    if len(edges) * 2 != n * d:
        raise EdgeListFormatError(f"header promises {n * d // 2} edges, found {len(edges)}")
    g = build_from_edge_list(n, edges)
    if g.d != d:
        raise EdgeListFormatError(f"header degree {d} but graph has degree {g.d}")
    return g


def write_edge_list(g: RegularGraph, path: str | Path) -> None:
    Path(path).write_bytes(format_edge_list(g).encode("ascii"))


def read_edge_list(path: str | Path) -> RegularGraph:
    return parse_edge_list(Path(path).read_bytes().decode("ascii"))
