"""Command-line experiment runner: ``nbwalk {generate,mixing,visits,sieve}``.

Every output embeds the tool version, master seed and a hash of the resolved
configuration. Reruns with the same configuration are byte-identical; the
only thing that varies is the timestamped ``run.log`` sidecar.

Exit codes: 0 success, 2 invalid input/config, 3 mathematical refusal,
4 resource cap.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CapExceeded, InvalidInput, NBWalkError
from .graph import (
    NAMED_GRAPHS,
    GraphGenSpec,
    RegularGraph,
    far_vertex_set,
    format_edge_list,
    girth,
    named_graph,
    random_regular,
    read_edge_list,
)
from .sieve import (
    FactorialMomentTable,
    PoissonParams,
    bonferroni_bounds,
    factorial_moments_exact,
    factorial_moments_mc,
    joint_poisson_pmf,
    poisson_moment_table,
)
from .spectral import fine_mixing_time_tau, second_eigenvalue
from .stats import bin_loads, compare_to_poisson, histogram_from_loads, summarize, visit_histogram
from .walk import WalkConfig, run_trials, stream_rng

GLOBAL_KEYS = ("seed", "threads", "out")
UNHASHED_KEYS = ("threads", "out", "config", "command", "handler")


# ------------------------------------------------------------------ config


def read_config(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInput(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


def _config_tokens(cfg: dict[str, str]) -> tuple[list[str], list[str]]:
    head, tail = [], []
    for key, value in cfg.items():
        dest = head if key in GLOBAL_KEYS else tail
        if value.lower() in ("true", "yes", "on"):
            dest.append(f"--{key}")
        elif value.lower() in ("false", "no", "off"):
            continue
        else:
            dest.extend([f"--{key}", value])
    return head, tail


def _meta(args: argparse.Namespace) -> dict:
    resolved = {k: v for k, v in sorted(vars(args).items()) if k not in UNHASHED_KEYS}
    blob = json.dumps(resolved, sort_keys=True, default=str).encode()
    return {
        "tool": "nbwalk",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "config_hash": hashlib.sha256(blob).hexdigest()[:16],
        "config": resolved,
    }


def _csv_header(meta: dict) -> str:
    return f"# nbwalk {meta['version']} seed={meta['seed']} config={meta['config_hash']}\n"


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_bytes(text.encode("ascii"))
    return path


def _write_json(out: Path, name: str, obj: dict) -> Path:
    return _write(out, name, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _log(out: Path, meta: dict, status: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    with open(out / "run.log", "a") as fh:
        fh.write(f"{stamp} {meta['command']} seed={meta['seed']} config={meta['config_hash']} {status}\n")


# ------------------------------------------------------------------ graphs


def load_graph(args: argparse.Namespace) -> RegularGraph:
    src = args.graph
    if src in NAMED_GRAPHS:
        return named_graph(src)
    if src == "random":
        if args.n is None or args.d is None:
            raise InvalidInput("--graph random needs --n and --d")
        return random_regular(
            GraphGenSpec(args.n, args.d, args.min_girth, args.seed, args.max_attempts)
        )
    path = Path(src)
    if not path.is_file():
        raise InvalidInput(f"graph {src!r} is neither a named graph, 'random', nor an existing file")
    return read_edge_list(path)


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", default="petersen", help=f"{'|'.join(NAMED_GRAPHS)}|random|PATH")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--min-girth", type=int)
    p.add_argument("--max-attempts", type=int, default=100_000)


def _add_walk_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--walk", choices=("nbrw", "srw"), default="nbrw")
    p.add_argument("--length", type=int, help="walk length m (default: n)")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--trace", action="store_true")


# ---------------------------------------------------------------- commands


def cmd_generate(args, meta) -> int:
    g = load_graph(args)
    out = Path(args.out)
    _write(out, "graph.txt", format_edge_list(g))
    gi = girth(g)
    summary = {"n": g.n, "d": g.d, "girth": None if math.isinf(gi) else int(gi)}
    if not args.no_spectrum:
        spec = second_eigenvalue(g, tol=args.tol)
        summary.update({"lambda": spec.lam, "method": spec.method})
    _write_json(out, "graph.json", {"meta": meta, "summary": summary})
    print(" ".join(f"{k}={v}" for k, v in summary.items()))
    return 0


def cmd_mixing(args, meta) -> int:
    g = load_graph(args)
    report = fine_mixing_time_tau(g, cap=args.cap)
    out = Path(args.out)
    body = report.to_json()
    body.update({"lambda": report.lam, "n": g.n, "d": g.d, "meta": meta})
    _write_json(out, "mixing.json", body)
    _write(out, "mixing.csv", _csv_header(meta) + report.dev_csv())
    print(f"rho={report.rho:.6g} tau={report.tau} lambda={report.lam:.6g}")
    if report.tau is None:
        raise CapExceeded(f"deviation still above 1/n^2 at cap={args.cap}; report written")
    return 0


def cmd_visits(args, meta) -> int:
    g = load_graph(args)
    m = args.length if args.length is not None else g.n
    mu = args.mu if args.mu is not None else m / g.n
    if args.oracle:
        if args.trials < 1:
            raise InvalidInput("trials must be >= 1")
        hists = [histogram_from_loads(bin_loads(m, g.n, stream_rng(args.seed, i)), g.n, m) for i in range(args.trials)]
        walks = []
    else:
        cfg = WalkConfig(m, args.start, args.walk, args.seed, args.trace)
        walks = run_trials(g, cfg, args.trials, threads=args.threads)
        hists = [visit_histogram(w, g, args.radius) for w in walks]
    summary = summarize(hists)
    report = compare_to_poisson(summary.mean_histogram(), mu, args.t_range)
    conservation = None
    if args.radius == 0:
        conservation = {
            "sum_N_equals_n": all(int(h.N.sum()) == g.n for h in hists),
            "sum_tN_equals_m": all(int(h.visits) == m for h in hists),
        }
    out = Path(args.out)
    _write(out, "histogram.csv", _csv_header(meta) + summary.to_csv(mu))
    body = report.to_json()
    body.update(
        meta=meta,
        n=g.n,
        m=m,
        trials=args.trials,
        source="balls_and_bins" if args.oracle else args.walk,
        max_visits_per_trial=list(summary.max_visits),
        conservation=conservation,
    )
    _write_json(out, "report.json", body)
    if walks and args.dump_counts:
        _write(out, "counts.csv", _csv_header(meta) + walks[0].to_csv())
    if walks and args.trace:
        trace = walks[0].trace
        _write(out, "trace.csv", _csv_header(meta) + "i,vertex\n" + "".join(f"{i},{v}\n" for i, v in enumerate(trace.tolist())))
    print(
        "t  N_t/n  1/(e t!)\n"
        + "\n".join(f"{t}  {f:.6f}  {r:.6f}" for t, (f, r) in enumerate(zip(report.fractions, report.reference)))
    )
    return 0


def _parse_tuple(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from None


def _coin_table(r: int) -> FactorialMomentTable:
    one = np.array([0.25, 0.5, 0.25])
    pmf = one
    for _ in range(r - 1):
        pmf = np.multiply.outer(pmf, one)
    return factorial_moments_exact(pmf)


def cmd_sieve(args, meta) -> int:
    m = _parse_tuple(args.m)
    extra: dict = {}
    if args.table:
        table = FactorialMomentTable.from_json(json.loads(Path(args.table).read_text()))
        extra["source"] = "table"
    elif args.from_trials:
        g = load_graph(args)
        r = len(m)
        targets = far_vertex_set(g, r, args.min_dist, anchor=args.start)
        length = args.length if args.length is not None else g.n
        cfg = WalkConfig(length, args.start, args.walk, args.seed)
        walks = run_trials(g, cfg, args.trials, threads=args.threads)
        ens = np.array([[w.counts[v] for v in targets] for w in walks])
        table = factorial_moments_mc(ens, max(m) + args.kmax)
        mu = length / g.n
        extra.update(
            source="trials",
            targets=targets,
            empirical_pmf=float(np.mean(np.all(ens == np.array(m), axis=1))),
            poisson_pmf=joint_poisson_pmf(PoissonParams((mu,) * r), m),
        )
    elif args.preset == "poisson":
        params = PoissonParams((args.mu,) * len(m))
        table = poisson_moment_table(params, max(m) + args.kmax)
        extra.update(source="poisson", poisson_pmf=joint_poisson_pmf(params, m))
    elif args.preset == "coin":
        table = _coin_table(len(m))
        extra["source"] = "coin"
    else:
        raise InvalidInput("choose one of --table, --preset or --from-trials")
    bounds = bonferroni_bounds(table, m, args.kmax)
    body = bounds.to_json()
    body.update(extra, meta=meta)
    _write_json(Path(args.out), "sieve.json", body)
    print(f"m={list(m)} lower={bounds.lower!r} upper={bounds.upper!r}")
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nbwalk", description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default="out")
    p.add_argument("--config", help="key = value file mirroring the command-line options")
    p.add_argument("--version", action="version", version=f"nbwalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a graph as an edge list and summarise it")
    _add_graph_args(g)
    g.add_argument("--tol", type=float, default=1e-6)
    g.add_argument("--no-spectrum", action="store_true")
    g.set_defaults(handler=cmd_generate)

    mx = sub.add_parser("mixing", help="exact non-backtracking mixing report")
    _add_graph_args(mx)
    mx.add_argument("--cap", type=int, default=200)
    mx.set_defaults(handler=cmd_mixing)

    v = sub.add_parser("visits", help="visit-count histogram against the Poisson law")
    _add_graph_args(v)
    _add_walk_args(v)
    v.add_argument("--radius", type=int, default=0, help="exclude vertices closer than this to the start")
    v.add_argument("--t-range", type=int, default=6)
    v.add_argument("--mu", type=float, help="reference Poisson mean (default m/n)")
    v.add_argument("--oracle", action="store_true", help="balls-and-bins instead of a walk")
    v.add_argument("--dump-counts", action="store_true")
    v.set_defaults(handler=cmd_visits)

    s = sub.add_parser("sieve", help="Bonferroni bounds from a factorial-moment table")
    src = s.add_mutually_exclusive_group()
    src.add_argument("--table", help="JSON moment table")
    src.add_argument("--preset", choices=("poisson", "coin"))
    src.add_argument("--from-trials", action="store_true")
    s.add_argument("--m", default="0")
    s.add_argument("--kmax", type=int, default=8)
    s.add_argument("--mu", type=float, default=1.0)
    s.add_argument("--min-dist", type=int, default=3)
    _add_graph_args(s)
    _add_walk_args(s)
    s.set_defaults(handler=cmd_sieve)
    return p


def _expand_config(argv: list[str]) -> list[str]:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return argv
    head, tail = _config_tokens(read_config(known.config))
    commands = ("generate", "mixing", "visits", "sieve")
    pos = next((i for i, tok in enumerate(argv) if tok in commands), None)
    if pos is None:
        return head + argv
    return head + argv[: pos + 1] + tail + argv[pos + 1 :]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_expand_config(argv))
    except NBWalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    meta = _meta(args)
    out = Path(args.out)
    try:
        code = args.handler(args, meta)
    except NBWalkError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = exc.exit_code
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = 2
    _log(out, meta, f"exit={code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
