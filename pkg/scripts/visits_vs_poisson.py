"""Visit-count law of NBRW and SRW against Po(1) and balls-and-bins, over a range of n.

    python scripts/visits_vs_poisson.py --sizes 10000 100000 --trials 10
"""

import argparse
import csv
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from nbwalk.graph import GraphGenSpec, random_regular
from nbwalk.stats import (
    balls_and_bins,
    expected_fraction,
    max_visit_prediction,
    summarize,
    tv_between,
    visit_histogram,
)
from nbwalk.walk import WalkConfig, run_trials, stream_rng


@dataclass
class Config:
    sizes: list[int] = field(default_factory=lambda: [10**4, 10**5])
    d: int = 3
    trials: int = 10
    seed: int = 1
    threads: int = 4
    t_max: int = 6
    out: str | None = None


def run(cfg: Config):
    rows = []
    for n in cfg.sizes:
        t0 = time.perf_counter()
        g = random_regular(GraphGenSpec(n, cfg.d, seed=cfg.seed))
        laws = {}
        maxima = {}
        for kind in ("nbrw", "srw"):
            walks = run_trials(g, WalkConfig(n, 0, kind, cfg.seed), cfg.trials, threads=cfg.threads)
            s = summarize([visit_histogram(w, g) for w in walks])
            laws[kind], maxima[kind] = s.mean_fraction, s.max_visits
        s = summarize([balls_and_bins(n, n, stream_rng(cfg.seed, i)) for i in range(cfg.trials)])
        laws["balls"], maxima["balls"] = s.mean_fraction, s.max_visits
        pred = max_visit_prediction(n)
        for kind, frac in laws.items():
            frac = np.pad(frac, (0, cfg.t_max + 1))
            row = {"n": n, "source": kind}
            for t in range(cfg.t_max + 1):
                row[f"N{t}/n"] = float(frac[t])
            row["tv_to_balls"] = tv_between(laws[kind], laws["balls"])
            row["max_visit_mean"] = float(np.mean(maxima[kind]))
            row["F(1)"] = pred.center
            rows.append(row)
        print(f"n={n}: {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=Config().sizes)
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=4)
    p.add_argument("--out", help="CSV path (default: stdout table only)")
    cfg = Config(**vars(p.parse_args(argv)))
    rows = run(cfg)
    ref = "  ".join(f"{expected_fraction(t):.4f}" for t in range(cfg.t_max + 1))
    print(f"{'n':>8} {'source':>6}  N_t/n for t=0..{cfg.t_max}   (Po(1): {ref})  TV  max")
    for r in rows:
        fr = "  ".join(f"{r[f'N{t}/n']:.4f}" for t in range(cfg.t_max + 1))
        print(f"{r['n']:>8} {r['source']:>6}  {fr}  {r['tv_to_balls']:.4f}  {r['max_visit_mean']:.1f} (F(1)={r['F(1)']:.2f})")
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
