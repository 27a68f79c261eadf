"""Spectral and mixing quantities for non-backtracking walks on regular graphs.

All k-step laws are propagated exactly (to float precision) on the directed
edge chain: the state is the last traversed edge ``u -> v`` and the next edge
``v -> w`` is uniform over the ``d - 1`` choices with ``w != u``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BipartiteOrDisconnected,
    DegreeTooSmall,
    HorizonExceeded,
    InvalidInput,
    NegativeInput,
    NoConvergence,
)
from .graph import RegularGraph

DENSE_MAX_N = 512
DEFAULT_TOL = 1e-9
MAX_POWER_ITERS = 100_000
DEFAULT_HORIZON = 100_000


@dataclass(frozen=True)
class SpectrumSummary:
    d: int
    lam: float
    tol: float
    method: str = "dense"

    @property
    def spectral_gap(self) -> float:
        return self.d - self.lam

    @property
    def has_gap(self) -> bool:
        """False when ``lam`` is within ``tol * d`` of ``d`` (bipartite or disconnected)."""
        return self.lam < self.d - self.tol * self.d


@dataclass(frozen=True)
class MixingReport:
    rho: float
    tau: int | None
    dev: np.ndarray
    n: int
    lam: float

    @property
    def cap(self) -> int:
        return len(self.dev) - 1

    @property
    def window(self) -> float:
        """The short-return window ``(log n)^2``."""
        return math.log(self.n) ** 2

    def to_json(self) -> dict:
        return {"rho": self.rho, "tau": self.tau, "dev": [float(x) for x in self.dev]}

    def dev_csv(self) -> str:
        return "k,dev\n" + "".join(f"{k},{float(x)!r}\n" for k, x in enumerate(self.dev))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def adjacency_matrix(g: RegularGraph) -> np.ndarray:
    a = np.zeros((g.n, g.n))
    rows = np.repeat(np.arange(g.n), g.d)
    a[rows, g.head] = 1.0
    return a


def _power_lambda(g: RegularGraph, tol: float, max_iter: int, seed: int = 0) -> float:
    # Power iteration on A^2 restricted to the complement of the all-ones
    # vector; A^2 is PSD there, so the Rayleigh quotient increases to lambda^2.
    nbrs = g.neighbors
    rng = np.random.Generator(np.random.PCG64(seed))
    x = rng.standard_normal(g.n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    prev = -1.0
    for _ in range(max_iter):
        y = x[nbrs].sum(axis=1)
        y = y[nbrs].sum(axis=1)
        y -= y.mean()
        est = math.sqrt(max(float(x @ y), 0.0))
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        if abs(est - prev) <= tol:
            return est
        prev = est
    raise NoConvergence(f"power iteration did not reach tol={tol} in {max_iter} steps")


def second_eigenvalue(
    g: RegularGraph,
    tol: float = DEFAULT_TOL,
    method: str = "auto",
    max_iter: int = MAX_POWER_ITERS,
) -> SpectrumSummary:
    """Largest absolute non-trivial adjacency eigenvalue.

    ``method="auto"`` uses a dense symmetric eigensolver for ``n <= 512`` and
    deflated power iteration otherwise.
    """
    if not 0 < tol < 1:
        raise InvalidInput("tol must lie in (0, 1)")
    if method == "auto":
        method = "dense" if g.n <= DENSE_MAX_N else "power"
    if method == "dense":
        ev = np.linalg.eigvalsh(adjacency_matrix(g))
        # eigvalsh sorts ascending; drop one copy of the trivial eigenvalue d
        lam = float(max(abs(ev[0]), abs(ev[-2]))) if g.n > 1 else 0.0
    elif method == "power":
        lam = _power_lambda(g, tol, max_iter)
    else:
        raise InvalidInput(f"unknown method {method!r}")
    return SpectrumSummary(g.d, min(lam, float(g.d)), tol, method)


def psi(x: float) -> float:
    if x < 0:
        raise NegativeInput(f"psi needs x >= 0, got {x}")
    if x <= 1:
        return 1.0
    return x + math.sqrt(x * x - 1)


def _check_rho_args(d: int, lam: float) -> None:
    if d < 3:
        raise DegreeTooSmall(f"non-backtracking mixing rate needs d >= 3, got {d}")
    if not 0 <= lam <= d:
        raise InvalidInput(f"lambda must lie in [0, d], got {lam}")


def mixing_rate_rho(d: int, lam: float) -> float:
    """Mixing rate of the non-backtracking walk on an (n, d, lambda) graph.

    Equal to ``psi(lam / (2 sqrt(d-1))) / sqrt(d-1)``, evaluated as
    ``(lam + sqrt(lam^2 - 4(d-1))) / (2(d-1))`` so the branch test uses the
    exact discriminant and ``lam = d`` gives exactly 1.
    """
    _check_rho_args(d, lam)
    disc = lam * lam - 4 * (d - 1)
    if disc <= 0:
        return 1 / math.sqrt(d - 1)
    return (lam + math.sqrt(disc)) / (2 * (d - 1))


def rho_upper_bound(d: int, lam: float) -> float:
    _check_rho_args(d, lam)
    return max(lam / d, 1 / math.sqrt(d - 1))


# ------------------------------------------------------------- edge chain


def _seed_edges(g: RegularGraph, starts: np.ndarray) -> np.ndarray:
    x = np.zeros((len(starts), g.n * g.d))
    cols = starts[:, None] * g.d + np.arange(g.d)
    x[np.arange(len(starts))[:, None], cols] = 1.0 / g.d
    return x


def _edge_step(g: RegularGraph, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One non-backtracking step. Returns ``(new_edge_mass, vertex_mass_before)``.

    ``vertex_mass_before[v]`` is the mass on edges entering ``v``, i.e. the
    vertex marginal of ``x``.
    """
    r = x[:, g.reverse].reshape(x.shape[0], g.n, g.d)
    into = r.sum(axis=2)
    new = (into[:, :, None] - r) / (g.d - 1)
    return new.reshape(x.shape[0], -1), into


def _vertex_marginal(g: RegularGraph, x: np.ndarray) -> np.ndarray:
    return x[:, g.reverse].reshape(x.shape[0], g.n, g.d).sum(axis=2)


def _check_steps(g: RegularGraph, k: int, horizon: int) -> None:
    if k < 0:
        raise InvalidInput("k must be non-negative")
    if k > horizon:
        raise HorizonExceeded(f"k={k} exceeds horizon {horizon}")
    if k >= 2 and g.d < 3:
        raise DegreeTooSmall("non-backtracking steps beyond the first need d >= 3")


def iter_vertex_laws(g: RegularGraph, starts: Sequence[int], kmax: int, horizon: int = DEFAULT_HORIZON):
    """Yield ``(k, P)`` for ``k = 0..kmax`` where ``P[i]`` is the k-step law from ``starts[i]``."""
    _check_steps(g, kmax, horizon)
    starts = np.asarray([g.check_vertex(int(s)) for s in starts], dtype=np.int64)
    point = np.zeros((len(starts), g.n))
    point[np.arange(len(starts)), starts] = 1.0
    yield 0, point
    if kmax == 0:
        return
    x = _seed_edges(g, starts)
    for k in range(1, kmax + 1):
        if k < kmax:
            x_next, law = _edge_step(g, x)
            yield k, law
            x = x_next
        else:
            yield k, _vertex_marginal(g, x)


def nbrw_edge_distribution(g: RegularGraph, start: int, k: int, horizon: int = DEFAULT_HORIZON) -> np.ndarray:
    """Exact law of the k-th traversed directed edge (``k >= 1``)."""
    if k < 1:
        raise InvalidInput("edge law needs k >= 1")
    _check_steps(g, k, horizon)
    x = _seed_edges(g, np.asarray([g.check_vertex(start)]))
    for _ in range(k - 1):
        x, _ = _edge_step(g, x)
    return x[0]


def nbrw_k_step_vertex_distribution(
    g: RegularGraph, start: int, k: int, horizon: int = DEFAULT_HORIZON
) -> np.ndarray:
    """Exact probability that a k-step non-backtracking walk from ``start`` ends at each vertex."""
    law = None
    for _, law in iter_vertex_laws(g, [start], k, horizon):
        pass
    return law[0]


def deviation_sequence(g: RegularGraph, cap: int, chunk: int = 256) -> np.ndarray:
    """``dev[k] = max_{u,v} |P^(k)_{uv} - 1/n|`` for ``k = 0..cap``.

    Start vertices are processed in blocks and merged with a max-reduction.
    """
    dev = np.zeros(cap + 1)
    target = 1.0 / g.n
    for lo in range(0, g.n, chunk):
        block = range(lo, min(lo + chunk, g.n))
        for k, law in iter_vertex_laws(g, block, cap, horizon=max(cap, DEFAULT_HORIZON)):
            dev[k] = max(dev[k], float(np.abs(law - target).max()))
    return dev


def tau_from_dev(dev: np.ndarray, n: int) -> int | None:
    """Least t with ``dev[k] <= 1/n^2`` for every ``t <= k <= cap``, else None."""
    ok = dev <= 1.0 / n**2
    if not ok[-1]:
        return None
    bad = np.flatnonzero(~ok)
    return int(bad[-1] + 1) if bad.size else 0


def fine_mixing_time_tau(
    g: RegularGraph, cap: int = 200, spectrum: SpectrumSummary | None = None
) -> MixingReport:
    """Exact fine mixing time up to ``cap`` steps.

    Refuses (BipartiteOrDisconnected) when the graph has no spectral gap.
    ``tau`` is None when the deviation is still above ``1/n^2`` at ``cap``.
    """
    if cap < 1:
        raise InvalidInput("cap must be positive")
    if g.d < 3:
        raise DegreeTooSmall("fine mixing time needs d >= 3")
    spectrum = spectrum or second_eigenvalue(g)
    if not spectrum.has_gap:
        raise BipartiteOrDisconnected(f"lambda={spectrum.lam:.6g} equals d={g.d}: no spectral gap")
    dev = deviation_sequence(g, cap)
    return MixingReport(
        rho=mixing_rate_rho(g.d, spectrum.lam),
        tau=tau_from_dev(dev, g.n),
        dev=dev,
        n=g.n,
        lam=spectrum.lam,
    )


def decay_slope(dev: np.ndarray, k_lo: int, k_hi: int) -> float:
    """Least-squares slope of ``log dev[k]`` over ``k_lo <= k <= k_hi`` (zeros skipped)."""
    ks = np.arange(k_lo, k_hi + 1)
    vals = dev[k_lo : k_hi + 1]
    keep = vals > 0
    if keep.sum() < 2:
        raise InvalidInput("need at least two positive deviations to fit a slope")
    return float(np.polyfit(ks[keep], np.log(vals[keep]), 1)[0])


def short_return_mass_M(g: RegularGraph, targets: Sequence[int], L: int) -> float:
    """Max over ordered target pairs of ``sum_{1 <= k < L} P^(k)_{v_i v_j}``."""
    if not targets:
        raise InvalidInput("targets must be non-empty")
    if L < 1:
        raise InvalidInput("L must be >= 1")
    if L == 1:
        return 0.0
    if g.d < 3 and L > 2:
        raise DegreeTooSmall("non-backtracking steps beyond the first need d >= 3")
    idx = np.asarray(targets, dtype=np.int64)
    total = np.zeros((len(idx), len(idx)))
    for k, law in iter_vertex_laws(g, targets, L - 1, horizon=max(L, DEFAULT_HORIZON)):
        if k >= 1:
            total += law[:, idx]
    return float(total.max())
