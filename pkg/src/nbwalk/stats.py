"""Visit-count histograms, Poisson references and the balls-and-bins baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainTooSmall, InvalidInput
from .graph import RegularGraph, bfs_distances
from .sieve import poisson_pmf
from .walk import VisitCounts


@dataclass(frozen=True, eq=False)
class VisitHistogram:
    """``N[t]`` = number of counted vertices visited exactly ``t`` times.

    With ``excluded_radius > 0`` only vertices at distance at least that
    radius from the walk's start are counted. ``N`` may hold float means
    when the histogram summarises an ensemble.
    """

    n: int
    m: int
    N: np.ndarray
    excluded_radius: int = 0

    @property
    def counted(self) -> float:
        return float(self.N.sum())

    @property
    def visits(self) -> float:
        return float(np.arange(len(self.N)) @ self.N)

    @property
    def fractions(self) -> np.ndarray:
        return self.N / self.counted

    @property
    def max_t(self) -> int:
        nz = np.flatnonzero(self.N)
        return int(nz[-1]) if nz.size else 0

    def count(self, t: int) -> float:
        return self.N[t].item() if 0 <= t < len(self.N) else 0

    def to_csv(self, mu: float = 1.0, t_max: int | None = None) -> str:
        top = self.max_t if t_max is None else t_max
        frac = self.N / self.n
        rows = ["t,count,fraction,poisson_reference"]
        for t in range(top + 1):
            c = self.count(t)
            f = float(frac[t]) if t < len(frac) else 0.0
            rows.append(f"{t},{c!r},{f!r},{poisson_pmf(mu, t)!r}")
        return "\n".join(rows) + "\n"


def histogram_from_loads(loads: np.ndarray, n: int, m: int, radius: int = 0) -> VisitHistogram:
    N = np.bincount(loads, minlength=1).astype(np.int64)
    return VisitHistogram(n=n, m=m, N=N, excluded_radius=radius)


def visit_histogram(counts: VisitCounts, g: RegularGraph, excluded_radius: int = 0) -> VisitHistogram:
    if excluded_radius < 0:
        raise InvalidInput("excluded_radius must be non-negative")
    loads = counts.counts
    if excluded_radius > 0:
        dist = bfs_distances(g, counts.start)
        far = (dist < 0) | (dist >= excluded_radius)
        loads = loads[far]
    return histogram_from_loads(loads, g.n, counts.length, excluded_radius)


def merge_histograms(hists: Sequence[VisitHistogram]) -> VisitHistogram:
    """Entrywise sum (associative, so trial order does not matter)."""
    if not hists:
        raise InvalidInput("nothing to merge")
    width = max(len(h.N) for h in hists)
    total = np.zeros(width, dtype=np.result_type(*[h.N.dtype for h in hists]))
    for h in hists:
        total[: len(h.N)] += h.N
    first = hists[0]
    return VisitHistogram(first.n, sum(h.m for h in hists), total, first.excluded_radius)


@dataclass(frozen=True)
class EnsembleSummary:
    """Mean and standard error of ``N_t / n`` over independent trials."""

    n: int
    m: int
    trials: int
    mean_count: np.ndarray
    stderr_count: np.ndarray
    max_visits: tuple[int, ...]

    @property
    def mean_fraction(self) -> np.ndarray:
        return self.mean_count / self.n

    @property
    def stderr_fraction(self) -> np.ndarray:
        return self.stderr_count / self.n

    def mean_histogram(self) -> VisitHistogram:
        return VisitHistogram(self.n, self.m, self.mean_count)

    def to_csv(self, mu: float = 1.0) -> str:
        rows = ["t,count,fraction,poisson_reference,stderr"]
        for t in range(len(self.mean_count)):
            rows.append(
                f"{t},{float(self.mean_count[t])!r},{float(self.mean_fraction[t])!r},"
                f"{poisson_pmf(mu, t)!r},{float(self.stderr_fraction[t])!r}"
            )
        return "\n".join(rows) + "\n"


def summarize(hists: Sequence[VisitHistogram]) -> EnsembleSummary:
    if not hists:
        raise InvalidInput("no histograms")
    width = max(len(h.N) for h in hists)
    mat = np.zeros((len(hists), width))
    for i, h in enumerate(hists):
        mat[i, : len(h.N)] = h.N
    mean = mat.mean(axis=0)
    err = mat.std(axis=0, ddof=1) / math.sqrt(len(hists)) if len(hists) > 1 else np.zeros(width)
    return EnsembleSummary(
        n=hists[0].n,
        m=hists[0].m,
        trials=len(hists),
        mean_count=mean,
        stderr_count=err,
        max_visits=tuple(h.max_t for h in hists),
    )


def expected_fraction(t: int, mu: float = 1.0) -> float:
    """Limiting fraction of vertices visited exactly ``t`` times, ``P[Po(mu) = t]``."""
    return poisson_pmf(mu, t)


def _loglogs(n: int) -> tuple[float, float, float]:
    if n <= math.e**math.e:
        raise DomainTooSmall(f"need n > e^e (~15.15) so that log log log n > 0, got {n}")
    ln = math.log(n)
    lln = math.log(ln)
    return ln, lln, math.log(lln)


def threshold_F(n: int, x: float) -> float:
    """``(1 + x lllog n / llog n) log n / llog n`` with natural logarithms."""
    ln, lln, llln = _loglogs(n)
    return (1 + x * llln / lln) * ln / lln


@dataclass(frozen=True)
class MaxVisitPrediction:
    center: float
    low: float
    high: float
    delta: float

    @property
    def window(self) -> float:
        return self.high - self.low

    def contains(self, value: float, slack: float = 0.0) -> bool:
        return self.low - slack <= value <= self.high + slack


def max_visit_prediction(n: int, delta: float = 0.5) -> MaxVisitPrediction:
    """Predicted maximal visit count for a length-n walk: ``F(1)`` within ``[F(1-delta), F(1+delta)]``."""
    if delta < 0:
        raise InvalidInput("delta must be non-negative")
    return MaxVisitPrediction(
        center=threshold_F(n, 1.0),
        low=threshold_F(n, 1.0 - delta),
        high=threshold_F(n, 1.0 + delta),
        delta=delta,
    )


def bin_loads(n_balls: int, n_bins: int, rng: np.random.Generator) -> np.ndarray:
    if n_balls < 0 or n_bins < 1:
        raise InvalidInput("need n_balls >= 0 and n_bins >= 1")
    return np.bincount(rng.integers(0, n_bins, size=n_balls), minlength=n_bins)


def balls_and_bins(n_balls: int, n_bins: int, seed: int | np.random.Generator = 0) -> VisitHistogram:
    """Load histogram of ``n_balls`` thrown independently and uniformly into ``n_bins``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.PCG64(seed))
    return histogram_from_loads(bin_loads(n_balls, n_bins, rng), n_bins, n_balls, 0)


def balls_bins_joint_pmf(n_balls: int, n_bins: int, r: int) -> np.ndarray:
    """Exact joint law of the loads of ``r`` fixed bins, as an ``(n_balls+1)^r`` array."""
    if not 1 <= r <= n_bins:
        raise InvalidInput("need 1 <= r <= n_bins")
    p_other = (n_bins - r) / n_bins
    out = np.zeros((n_balls + 1,) * r)
    for idx in np.ndindex(*out.shape):
        k = sum(idx)
        if k > n_balls:
            continue
        ways = math.factorial(n_balls) // (
            math.prod(math.factorial(i) for i in idx) * math.factorial(n_balls - k)
        )
        out[idx] = ways * (1 / n_bins) ** k * p_other ** (n_balls - k)
    return out


@dataclass(frozen=True)
class ComparisonReport:
    mu: float
    deviations: tuple[float, ...]
    fractions: tuple[float, ...]
    reference: tuple[float, ...]
    max_visit_observed: int
    predicted: MaxVisitPrediction | None
    tv_distance: float

    def to_json(self) -> dict:
        out = {
            "mu": self.mu,
            "t": list(range(len(self.deviations))),
            "fraction": list(self.fractions),
            "poisson_reference": list(self.reference),
            "relative_deviation": list(self.deviations),
            "max_visit_observed": self.max_visit_observed,
            "tv_distance": self.tv_distance,
            "predicted_max_visit": None,
        }
        if self.predicted is not None:
            p = self.predicted
            out["predicted_max_visit"] = {"center": p.center, "low": p.low, "high": p.high, "delta": p.delta}
        return out


def tv_to_poisson(fractions: np.ndarray, mu: float) -> float:
    """Total-variation distance between an empirical law on ``0..len-1`` and Po(mu)."""
    ref = np.array([poisson_pmf(mu, t) for t in range(len(fractions))])
    tail = max(0.0, 1.0 - math.fsum(ref))
    return 0.5 * (math.fsum(np.abs(np.asarray(fractions) - ref)) + tail)


def tv_between(p: np.ndarray, q: np.ndarray) -> float:
    width = max(len(p), len(q))
    a = np.zeros(width)
    b = np.zeros(width)
    a[: len(p)] = p
    b[: len(q)] = q
    return 0.5 * float(np.abs(a - b).sum())


def compare_to_poisson(
    hist: VisitHistogram, mu: float = 1.0, t_range: int = 6, delta: float = 0.5
) -> ComparisonReport:
    """Relative deviation of ``N_t / counted`` from ``P[Po(mu) = t]`` for ``t <= t_range``."""
    if t_range < 1:
        raise InvalidInput("t_range must be >= 1")
    frac = hist.fractions
    fractions, reference, deviations = [], [], []
    for t in range(t_range + 1):
        f = float(frac[t]) if t < len(frac) else 0.0
        ref = poisson_pmf(mu, t)
        fractions.append(f)
        reference.append(ref)
        deviations.append(f / ref - 1.0)
    try:
        predicted = max_visit_prediction(hist.n, delta)
    except DomainTooSmall:
        predicted = None
    return ComparisonReport(
        mu=mu,
        deviations=tuple(deviations),
        fractions=tuple(fractions),
        reference=tuple(reference),
        max_visit_observed=hist.max_t,
        predicted=predicted,
        tv_distance=tv_to_poisson(frac, mu),
    )
