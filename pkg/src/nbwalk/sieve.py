"""Numeric Brun's sieve: factorial-moment tables and Bonferroni partial sums.

For counting variables ``X_1..X_r`` the joint binomial moments are
``S(i_1..i_r) = E[prod_j C(X_j, i_j)]``. The partial sums

    Lambda(k) = sum_{t=M}^{M+k} (-1)^(t-M) sum_{|i|=t} prod_j C(i_j, m_j) S(i),

with ``M = sum m_j``, alternate around ``P[X = m]``: odd depths bound it from
below and even depths from above.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyEnsemble,
    InvalidInput,
    NegativeMean,
    NotAPmf,
    OutOfRange,
    OverflowRisk,
    TableTooSmall,
)

MAX_MC_VALUE = 10**6
MAX_MC_ORDER = 64
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


def poisson_pmf(mu: float, t: int) -> float:
    """``exp(-mu) mu^t / t!`` evaluated in log space."""
    if mu < 0:
        raise NegativeMean(f"Poisson mean must be non-negative, got {mu}")
    if t < 0:
        raise InvalidInput("t must be non-negative")
    if mu == 0:
        return 1.0 if t == 0 else 0.0
    return math.exp(-mu + t * math.log(mu) - math.lgamma(t + 1))


def poisson_moment(mu: float, i: int) -> float:
    """``mu^i / i!``, the i-th binomial moment of Po(mu)."""
    if i == 0:
        return 1.0
    if mu == 0:
        return 0.0
    return math.exp(i * math.log(mu) - math.lgamma(i + 1))


@dataclass(frozen=True)
class PoissonParams:
    mus: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "mus", tuple(float(m) for m in self.mus))
        if not self.mus:
            raise InvalidInput("need at least one mean")
        if any(m <= 0 for m in self.mus):
            raise NegativeMean(f"means must be positive, got {self.mus}")

    @property
    def r(self) -> int:
        return len(self.mus)

    @property
    def mu(self) -> float:
        return max(self.mus)

    @property
    def total(self) -> float:
        return sum(self.mus)


def joint_poisson_pmf(params: PoissonParams, ts: Sequence[int]) -> float:
    if len(ts) != params.r:
        raise DimensionMismatch(f"expected {params.r} coordinates, got {len(ts)}")
    return math.prod(poisson_pmf(mu, t) for mu, t in zip(params.mus, ts))


# ------------------------------------------------------------------ tables


@dataclass(frozen=True, eq=False)
class FactorialMomentTable:
    """Dense table ``values[i_1, ..., i_r] = S(i_1..i_r)`` for ``0 <= i_j <= tmax``.

    ``complete`` marks tables computed from a pmf whose support lies inside
    the box: entries past ``tmax`` are then exactly zero rather than unknown.
    """

    values: np.ndarray
    stderr: np.ndarray | None = None
    complete: bool = False

    @property
    def r(self) -> int:
        return self.values.ndim

    @property
    def tmax(self) -> int:
        return self.values.shape[0] - 1

    def __post_init__(self):
        shape = self.values.shape
        if len(set(shape)) != 1:
            raise InvalidInput(f"table must be a hypercube, got shape {shape}")
        if self.stderr is not None and self.stderr.shape != shape:
            raise InvalidInput("stderr shape must match values")

    def __getitem__(self, idx: Sequence[int]) -> float:
        idx = tuple(idx)
        if len(idx) != self.r:
            raise DimensionMismatch(f"index {idx} has wrong length for r={self.r}")
        if max(idx) > self.tmax:
            if self.complete:
                return 0.0
            raise TableTooSmall(f"entry {idx} beyond table depth {self.tmax}")
        return float(self.values[idx])

    def to_json(self) -> dict:
        entries = []
        for idx in np.ndindex(*self.values.shape):
            item = {"idx": list(idx), "value": float(self.values[idx])}
            if self.stderr is not None:
                item["stderr"] = float(self.stderr[idx])
            entries.append(item)
        return {"r": self.r, "tmax": self.tmax, "complete": self.complete, "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "FactorialMomentTable":
        r, tmax = int(obj["r"]), int(obj["tmax"])
        shape = (tmax + 1,) * r
        values = np.full(shape, np.nan)
        stderr = None
        for item in obj["entries"]:
            idx = tuple(item["idx"])
            if len(idx) != r or max(idx, default=0) > tmax or min(idx, default=0) < 0:
                raise InvalidInput(f"entry index {idx} outside the {r}-dim table of depth {tmax}")
            values[idx] = item["value"]
            if "stderr" in item:
                if stderr is None:
                    stderr = np.full(shape, np.nan)
                stderr[idx] = item["stderr"]
        if np.isnan(values).any():
            missing = tuple(int(x) for x in np.argwhere(np.isnan(values))[0])
            raise TableTooSmall(f"table is missing entry {missing}")
        return cls(values, stderr, bool(obj.get("complete", False)))

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def poisson_moment_table(params: PoissonParams, tmax: int) -> FactorialMomentTable:
    """Exact table of independent Poisson variables, ``S(i) = prod mu_j^i_j / i_j!``."""
    vals = np.ones((tmax + 1,) * params.r)
    for axis, mu in enumerate(params.mus):
        col = np.array([poisson_moment(mu, i) for i in range(tmax + 1)])
        shape = [1] * params.r
        shape[axis] = tmax + 1
        vals = vals * col.reshape(shape)
    return FactorialMomentTable(vals)


def _binom_matrix(xs: Sequence[int], tmax: int) -> np.ndarray:
    return np.array([[float(math.comb(x, i)) for i in range(tmax + 1)] for x in xs])


def factorial_moments_exact(pmf: np.ndarray, tmax: int | None = None) -> FactorialMomentTable:
    """Binomial moments of an explicit joint pmf on the grid ``{0..s_1-1} x ... x {0..s_r-1}``.

    ``pmf[x_1, ..., x_r]`` is ``P[X = x]``. The default depth is the largest
    support value, which makes the table complete.
    """
    pmf = np.asarray(pmf, dtype=float)
    if pmf.ndim < 1:
        raise NotAPmf("pmf must have at least one axis")
    if (pmf < 0).any() or not math.isclose(math.fsum(pmf.ravel()), 1.0, rel_tol=0, abs_tol=1e-9):
        raise NotAPmf("pmf entries must be non-negative and sum to 1")
    top = max(pmf.shape) - 1
    if tmax is None:
        tmax = top
    out = pmf
    for axis, size in enumerate(pmf.shape):
        b = _binom_matrix(range(size), tmax)
        out = np.moveaxis(np.tensordot(out, b, axes=([axis], [0])), -1, axis)
    return FactorialMomentTable(out, complete=tmax >= top)


def factorial_moments_mc(ensemble: np.ndarray, tmax: int) -> FactorialMomentTable:
    """Sample means (and standard errors) of ``prod_j C(x_j, i_j)`` over observed tuples.

    ``ensemble`` has one row per observation and one column per variable.
    """
    obs = np.asarray(ensemble)
    if obs.size == 0:
        raise EmptyEnsemble("ensemble is empty")
    if obs.ndim == 1:
        obs = obs[:, None]
    if (obs < 0).any():
        raise InvalidInput("counts must be non-negative")
    if obs.max() > MAX_MC_VALUE or tmax > MAX_MC_ORDER:
        raise OverflowRisk(f"counts <= {MAX_MC_VALUE} and order <= {MAX_MC_ORDER} required")
    n_obs, r = obs.shape
    rows, weights = np.unique(obs.astype(np.int64), axis=0, return_counts=True)
    weights = weights.astype(float)
    mats = []
    for j in range(r):
        vals, inverse = np.unique(rows[:, j], return_inverse=True)
        mats.append(_binom_matrix(vals.tolist(), tmax)[inverse.reshape(-1)])
    with np.errstate(divide="ignore"):
        worst = sum(np.log(m.max(axis=0)).max() for m in mats)
    if worst > _LOG_FLOAT_MAX - 1:
        raise OverflowRisk("binomial products would overflow double precision")
    shape = (tmax + 1,) * r
    means = np.zeros(shape)
    errs = np.zeros(shape)
    for idx in np.ndindex(*shape):
        y = np.ones(len(rows))
        for j, i in enumerate(idx):
            y = y * mats[j][:, i]
        scale = y.max()
        if scale == 0:
            continue
        z = y / scale
        mean_z = float(weights @ z) / n_obs
        means[idx] = scale * mean_z
        if n_obs > 1:
            var_z = max(float(weights @ (z - mean_z) ** 2) / (n_obs - 1), 0.0)
            errs[idx] = scale * math.sqrt(var_z / n_obs)
    return FactorialMomentTable(means, errs)


# ----------------------------------------------------------- Bonferroni sums


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Non-negative integer vectors of length ``parts`` summing to ``total``, lexicographic."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _layer_terms(table: FactorialMomentTable, m: tuple[int, ...], depth: int) -> list[float]:
    terms = []
    sign = -1.0 if depth % 2 else 1.0
    for excess in _compositions(depth, len(m)):
        idx = tuple(mj + ej for mj, ej in zip(m, excess))
        s = table[idx]
        if s == 0.0:
            continue
        coeff = math.prod(math.comb(i, mj) for i, mj in zip(idx, m))
        terms.append(sign * coeff * s)
    return terms


def _check_target(table: FactorialMomentTable, m: Sequence[int], k: int) -> tuple[int, ...]:
    m = tuple(int(x) for x in m)
    if len(m) != table.r:
        raise DimensionMismatch(f"target {m} has wrong length for r={table.r}")
    if min(m) < 0 or k < 0:
        raise InvalidInput("target and depth must be non-negative")
    if not table.complete and max(m) + k > table.tmax:
        raise TableTooSmall(f"Lambda({k}) at m={m} needs table depth {max(m) + k}, have {table.tmax}")
    return m


def bonferroni_lambda(table: FactorialMomentTable, m: Sequence[int], k: int) -> float:
    """Bonferroni partial sum Lambda(k) for the point ``X = m``."""
    m = _check_target(table, m, k)
    terms = []
    for depth in range(k + 1):
        terms.extend(_layer_terms(table, m, depth))
    return math.fsum(terms)


@dataclass(frozen=True)
class SieveBounds:
    m: tuple[int, ...]
    lambdas: tuple[float, ...]
    lower: float
    upper: float
    depth_used: int

    def to_json(self) -> dict:
        return {
            "m": list(self.m),
            "lambda": list(self.lambdas),
            "lower": self.lower,
            "upper": self.upper,
            "depth_used": self.depth_used,
        }


def bonferroni_bounds(table: FactorialMomentTable, m: Sequence[int], kmax: int) -> SieveBounds:
    """Best lower (odd depths) and upper (even depths) bounds up to depth ``kmax``."""
    if kmax < 1:
        raise InvalidInput("kmax must be >= 1")
    m = _check_target(table, m, kmax)
    terms: list[float] = []
    lambdas = []
    for depth in range(kmax + 1):
        terms.extend(_layer_terms(table, m, depth))
        lambdas.append(math.fsum(terms))
    return SieveBounds(
        m=m,
        lambdas=tuple(lambdas),
        lower=max(lambdas[1::2]),
        upper=min(lambdas[0::2]),
        depth_used=max(m) + kmax,
    )


# ------------------------------------------------------------ error transfer


def brun_error(epsilon: float, params: PoissonParams) -> float:
    """Point-probability error ``2 exp(2 sum mu_i) eps + sqrt(eps)`` implied by moment error ``eps``."""
    if not 0 <= epsilon < 1:
        raise OutOfRange(f"epsilon must lie in [0, 1), got {epsilon}")
    return 2 * math.exp(2 * params.total) * epsilon + math.sqrt(epsilon)


@dataclass(frozen=True)
class BrunRegime:
    """Parameters of the quantitative sieve: moment error ``epsilon``, tail index ``s``, range ``T``."""

    epsilon: float
    s: int
    T: int
    mus: PoissonParams

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise OutOfRange(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.s < 0 or self.T < 0:
            raise InvalidInput("s and T must be non-negative")

    @property
    def epsilon_prime(self) -> float:
        return brun_error(self.epsilon, self.mus)

    @property
    def depth(self) -> int:
        """Moment order ``r (T + 2s)`` the hypothesis has to cover per coordinate."""
        return self.mus.r * (self.T + 2 * self.s)

    @property
    def s_ok(self) -> bool:
        return self.s > self.mus.mu

    @property
    def tail_ok(self) -> bool:
        return 2 * poisson_moment(self.mus.mu, self.s) < self.epsilon

    @property
    def epsilon_ok(self) -> bool:
        return self.epsilon < (2 * self.mus.r * math.exp(self.mus.mu)) ** -2

    @property
    def admissible(self) -> bool:
        return self.s_ok and self.tail_ok and self.epsilon_ok

    @classmethod
    def minimal_s(cls, epsilon: float, T: int, mus: PoissonParams) -> "BrunRegime":
        """Smallest admissible ``s`` for the given ``epsilon`` (``s = floor(mu) + 1`` upward)."""
        s = math.floor(mus.mu) + 1
        while 2 * poisson_moment(mus.mu, s) >= epsilon:
            s += 1
        return cls(epsilon, s, T, mus)

    @classmethod
    def for_walk(cls, n: int, c: float, r: int, mu: float = 1.0) -> "BrunRegime":
        """Preset for a walk of length ``mu n`` on an n-vertex graph of girth ``c log_{d-1} log n``:
        ``T = s = floor(log n)`` and ``epsilon = h = (log n)^(3 - c/2)``."""
        T = math.floor(math.log(n))
        h = math.log(n) ** (3 - c / 2)
        return cls(h, T, T, PoissonParams((mu,) * r))

    @property
    def h_prime(self) -> float:
        """``2 e^(2 r mu) h + sqrt(h)``; identical to ``epsilon_prime`` for equal means."""
        return self.epsilon_prime


@dataclass(frozen=True)
class BrunCheck:
    hypothesis_ok: bool
    s_ok: bool
    tail_ok: bool
    epsilon_ok: bool
    moments_ok: bool
    max_moment_deviation: float
    worst_index: tuple[int, ...]
    epsilon_prime: float
    depth: int = field(default=0)

    def to_json(self) -> dict:
        return {
            "hypothesis_ok": self.hypothesis_ok,
            "s_ok": self.s_ok,
            "tail_ok": self.tail_ok,
            "epsilon_ok": self.epsilon_ok,
            "moments_ok": self.moments_ok,
            "max_moment_deviation": self.max_moment_deviation,
            "worst_index": list(self.worst_index),
            "epsilon_prime": self.epsilon_prime,
            "depth": self.depth,
        }


def moment_deviation(table: FactorialMomentTable, params: PoissonParams, depth: int) -> tuple[float, tuple[int, ...]]:
    """Largest ``|S(i) / prod mu_j^i_j/i_j! - 1|`` over the box ``{0..depth}^r``."""
    if table.r != params.r:
        raise DimensionMismatch(f"table has r={table.r}, means have r={params.r}")
    if not table.complete and depth > table.tmax:
        raise TableTooSmall(f"hypothesis needs moments up to order {depth}, table depth is {table.tmax}")
    worst, where = -1.0, (0,) * table.r
    targets = [[poisson_moment(mu, i) for i in range(depth + 1)] for mu in params.mus]
    for idx in itertools.product(range(depth + 1), repeat=table.r):
        target = math.prod(targets[j][i] for j, i in enumerate(idx))
        dev = abs(table[idx] / target - 1.0)
        if dev > worst:
            worst, where = dev, idx
    return worst, where


def brun_hypothesis_check(table: FactorialMomentTable, regime: BrunRegime) -> BrunCheck:
    """Check the sieve's hypothesis for ``table`` under ``regime``.

    All inequalities are strict except the moment condition, which uses
    ``<= epsilon``.
    """
    dev, where = moment_deviation(table, regime.mus, regime.depth)
    moments_ok = dev <= regime.epsilon
    return BrunCheck(
        hypothesis_ok=regime.admissible and moments_ok,
        s_ok=regime.s_ok,
        tail_ok=regime.tail_ok,
        epsilon_ok=regime.epsilon_ok,
        moments_ok=moments_ok,
        max_moment_deviation=dev,
        worst_index=where,
        epsilon_prime=regime.epsilon_prime,
        depth=regime.depth,
    )
