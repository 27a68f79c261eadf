"""Seeded samplers for non-backtracking (NBRW) and simple (SRW) random walks.

Randomness: trial ``i`` of a run with master seed ``s`` draws from
``PCG64(SeedSequence(s, spawn_key=(i,)))``. A single sample is trial 0.
A non-backtracking step draws one integer ``j`` in ``[0, d-1)`` and skips the
predecessor's slot in the sorted neighbour row, so each step costs one draw.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import BadStart, DegreeTooSmall, InvalidInput
from .graph import RegularGraph

WALK_KINDS = ("nbrw", "srw")


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for (master seed, stream index)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


@dataclass(frozen=True)
class WalkConfig:
    length: int
    start: int = 0
    kind: str = "nbrw"
    seed: int = 0
    record_trace: bool = False

    def __post_init__(self):
        if self.length < 1:
            raise InvalidInput("walk length must be >= 1")
        if self.kind not in WALK_KINDS:
            raise InvalidInput(f"walk kind must be one of {WALK_KINDS}, got {self.kind!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True, eq=False)
class VisitCounts:
    """Visits per vertex at positions ``1..length`` (the start position is not counted)."""

    counts: np.ndarray
    length: int
    start: int
    trace: np.ndarray | None = None

    @property
    def max_visits(self) -> int:
        return int(self.counts.max())

    def to_csv(self) -> str:
        return "vertex,count\n" + "".join(f"{v},{c}\n" for v, c in enumerate(self.counts.tolist()))

    def __eq__(self, other):
        if not isinstance(other, VisitCounts):
            return NotImplemented
        same_trace = (self.trace is None and other.trace is None) or (
            self.trace is not None and other.trace is not None and np.array_equal(self.trace, other.trace)
        )
        return (
            self.length == other.length
            and self.start == other.start
            and np.array_equal(self.counts, other.counts)
            and same_trace
        )


def _check(g: RegularGraph, cfg: WalkConfig, kind: str) -> int:
    if cfg.kind != kind:
        raise InvalidInput(f"config is for {cfg.kind!r}, sampler is {kind!r}")
    if not isinstance(cfg.start, (int, np.integer)) or not 0 <= cfg.start < g.n:
        raise BadStart(f"start {cfg.start!r} not in [0, {g.n})")
    return int(cfg.start)


def _nbrw(g: RegularGraph, cfg: WalkConfig, rng: np.random.Generator) -> VisitCounts:
    start = _check(g, cfg, "nbrw")
    m, d = cfg.length, g.d
    if m >= 2 and d < 3:
        raise DegreeTooSmall("non-backtracking walks longer than 1 need d >= 3")
    head, prev_slot = g.walk_tables
    first = int(rng.integers(0, d))
    draws = rng.integers(0, d - 1, size=m - 1).tolist() if m > 1 else []
    counts = [0] * g.n
    trace = [start] if cfg.record_trace else None
    e = start * d + first
    for j in draws:
        v = head[e]
        counts[v] += 1
        if trace is not None:
            trace.append(v)
        if j >= prev_slot[e]:
            j += 1
        e = v * d + j
    v = head[e]
    counts[v] += 1
    if trace is not None:
        trace.append(v)
    return VisitCounts(
        np.asarray(counts, dtype=np.int64),
        m,
        start,
        None if trace is None else np.asarray(trace, dtype=np.int64),
    )


def _srw(g: RegularGraph, cfg: WalkConfig, rng: np.random.Generator) -> VisitCounts:
    start = _check(g, cfg, "srw")
    d = g.d
    head, _ = g.walk_tables
    counts = [0] * g.n
    trace = [start] if cfg.record_trace else None
    v = start
    for j in rng.integers(0, d, size=cfg.length).tolist():
        v = head[v * d + j]
        counts[v] += 1
        if trace is not None:
            trace.append(v)
    return VisitCounts(
        np.asarray(counts, dtype=np.int64),
        cfg.length,
        start,
        None if trace is None else np.asarray(trace, dtype=np.int64),
    )


_SAMPLERS: dict[str, Callable] = {"nbrw": _nbrw, "srw": _srw}


def nbrw_sample(g: RegularGraph, cfg: WalkConfig, stream: int = 0) -> VisitCounts:
    return _nbrw(g, cfg, stream_rng(cfg.seed, stream))


def srw_sample(g: RegularGraph, cfg: WalkConfig, stream: int = 0) -> VisitCounts:
    return _srw(g, cfg, stream_rng(cfg.seed, stream))


def sample_walk(g: RegularGraph, cfg: WalkConfig, stream: int = 0) -> VisitCounts:
    return _SAMPLERS[cfg.kind](g, cfg, stream_rng(cfg.seed, stream))


def run_trials(g: RegularGraph, cfg: WalkConfig, trials: int, threads: int = 1) -> list[VisitCounts]:
    """Run ``trials`` independent walks; result ``i`` always comes from stream ``i``."""
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    if threads <= 1:
        return [sample_walk(g, cfg, i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda i: sample_walk(g, cfg, i), range(trials)))


# --------------------------------------------------- vectorised endpoint sampling


def nbrw_endpoints(g: RegularGraph, start: int, k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Endpoints of ``size`` independent k-step non-backtracking walks from ``start``."""
    start = g.check_vertex(start)
    if k == 0:
        return np.full(size, start, dtype=np.int64)
    if k >= 2 and g.d < 3:
        raise DegreeTooSmall("non-backtracking walks longer than 1 need d >= 3")
    d = g.d
    head, rev = g.head, g.reverse
    e = start * d + rng.integers(0, d, size=size)
    for _ in range(k - 1):
        v = head[e]
        p = rev[e] - v * d
        j = rng.integers(0, d - 1, size=size)
        j += j >= p
        e = v * d + j
    return head[e]


def srw_endpoints(g: RegularGraph, start: int, k: int, size: int, rng: np.random.Generator) -> np.ndarray:
    v = np.full(size, g.check_vertex(start), dtype=np.int64)
    for _ in range(k):
        v = g.neighbors[v, rng.integers(0, g.d, size=size)]
    return v
