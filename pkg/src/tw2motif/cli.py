"""Command-line entry point.  Results go to stdout as JSON (or CSV / edge
lists where noted); short human summaries go to stderr."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .engine import EngineKind, OpCounter, count_colorful
from .errors import MotifError
from .estimator import estimate
from .graph import DataGraph, load_edge_list, random_coloring, serialize
from .oracle import OracleBudget, automorphism_count, brute_colorful, brute_matches
from .parallel import parallel_run
from .planner import enumerate_trees, select_plan
from .query import BUILTIN, QueryGraph, parse_query
from .theory import ChungLuSpec, measure, pathstats_csv, power_law_degrees, sample_chung_lu

log = logging.getLogger("tw2motif")


def load_query(spec: str) -> QueryGraph:
    """A query file path, or the name of a built-in query such as ``sat`` or ``c5``."""
    p = Path(spec)
    if p.exists():
        return parse_query(p.read_text())
    if spec in BUILTIN:
        return BUILTIN[spec]
    raise FileNotFoundError(f"no query file or built-in query named {spec!r}")


def load_graph(path: str, compact: bool = False) -> DataGraph:
    with open(path, "rb") as fh:
        return load_edge_list(fh.read(), compact=compact)


def _emit(args, payload):
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2 if args.pretty else None)
    if args.output:
        Path(args.output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _say(msg: str):
    print(msg, file=sys.stderr)


def _counter(workers: int):
    """Sequential engine, or the simulated parallel runtime when ``workers > 1``."""
    if workers <= 1:
        return count_colorful

    def run(g, chi, tree, engine, stats=None):
        count, rep = parallel_run(g, chi, tree, engine, p=workers)
        if stats is not None:
            stats.ops += sum(rep["per_worker_ops"])
        return count

    return run


def cmd_plan(args):
    q = load_query(args.query)
    trees = enumerate_trees(q)
    best = select_plan(trees)
    _say(f"{len(trees)} decomposition trees; chosen score {best.score()}")
    _emit(args, {
        "plan": best.to_dict(),
        "trees": [dict(t.to_dict(), canonical=t.canonical()) for t in trees],
    })


def cmd_count(args):
    g = load_graph(args.graph, args.compact)
    q = load_query(args.query)
    tree = select_plan(enumerate_trees(q))
    k = args.k or q.k
    if k < q.k:
        raise ValueError(f"--k {k} is smaller than the query size {q.k}")
    chi = random_coloring(g, k, args.seed)
    t0 = time.perf_counter()
    out = {"engine": args.engine, "seed": args.seed, "k": k, "workers": args.workers}
    if args.workers > 1:
        count, rep = parallel_run(g, chi, tree, args.engine, p=args.workers)
        out.update(count=count, ops=sum(rep["per_worker_ops"]), load=rep)
    else:
        st = OpCounter()
        count = count_colorful(g, chi, tree, args.engine, stats=st)
        out.update(count=count, ops=st.ops)
    out["wall_time"] = time.perf_counter() - t0
    _say(f"{count} colorful matches ({args.engine})")
    _emit(args, out)


def cmd_estimate(args):
    g = load_graph(args.graph, args.compact)
    q = load_query(args.query)
    tree = select_plan(enumerate_trees(q))
    rep = estimate(g, q, tree, args.engine, args.trials, args.seed, counter=_counter(args.workers))
    _say(f"mean estimate {rep.mean_estimate:.6g} over {rep.trials} trials, cv {rep.cv:.4g}")
    _emit(args, rep.to_dict())


def cmd_oracle(args):
    g = load_graph(args.graph, args.compact)
    q = load_query(args.query)
    budget = OracleBudget.from_env()
    out = {"matches": brute_matches(g, q, budget)}
    if args.seed is not None:
        chi = random_coloring(g, q.k, args.seed)
        out["colorful"] = brute_colorful(g, q, chi, budget)
        out["seed"] = args.seed
    if q.k <= 10:
        out["aut"] = automorphism_count(q)
        out["subgraphs"] = out["matches"] // out["aut"]
    out["explored"] = budget.used
    _say(f"{out['matches']} matches")
    _emit(args, out)


def cmd_gen_chunglu(args):
    rng = np.random.default_rng(args.seed)
    d = power_law_degrees(args.n, args.alpha, rng)
    g = sample_chung_lu(ChungLuSpec.from_degrees(d), rng)
    _say(f"n={g.n} m={g.m} max degree={max(g.degree)}")
    _emit(args, serialize(g))


def cmd_pathstats(args):
    rows = [measure(n, args.alpha, s, args.q) for n in args.n for s in range(args.seed, args.seed + args.seeds)]
    _say(f"{len(rows)} graphs measured")
    _emit(args, pathstats_csv(rows))


def cmd_bench(args):
    if args.graph:
        g = load_graph(args.graph, args.compact)
    else:
        rng = np.random.default_rng(args.seed)
        g = sample_chung_lu(ChungLuSpec.from_degrees(power_law_degrees(args.n, args.alpha, rng)), rng)
    q = load_query(args.query)
    tree = select_plan(enumerate_trees(q))
    chi = random_coloring(g, q.k, args.seed)
    out = {"n": g.n, "m": g.m, "query_k": q.k, "workers": args.workers}
    for engine in ("ps", "db"):
        count, rep = parallel_run(g, chi, tree, engine, p=args.workers)
        out[engine] = {"count": count, "ops": sum(rep["per_worker_ops"]), **rep}
    if out["ps"]["count"] != out["db"]["count"]:
        raise MotifError("engines disagree")
    out["improvement_factor"] = out["ps"]["wall_time"] / max(out["db"]["wall_time"], 1e-12)
    out["ops_ratio"] = out["ps"]["ops"] / max(out["db"]["ops"], 1)
    _say(f"PS/DB time {out['improvement_factor']:.2f}x, ops {out['ops_ratio']:.2f}x")
    _emit(args, out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tw2motif", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, graph=True, query=True):
        if graph:
            p.add_argument("--graph", required=True, help="edge list file")
            p.add_argument("--compact", action="store_true", help="remap sparse vertex ids to 0..n-1")
        if query:
            p.add_argument("--query", required=True, help="query file or built-in name")
        p.add_argument("--output", "-o", help="write the result here instead of stdout")
        p.add_argument("--pretty", action="store_true", help="indent JSON")

    def engine_opts(p):
        p.add_argument("--engine", choices=[e.value for e in EngineKind], default="db")
        p.add_argument("--workers", type=_positive, default=1)

    p = sub.add_parser("plan", help="decomposition trees and the chosen plan")
    common(p, graph=False)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("count", help="colorful matches under one random coloring")
    common(p)
    engine_opts(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=None, help="number of colors (default: query size)")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("estimate", help="multi-trial color-coding estimate")
    common(p)
    engine_opts(p)
    p.add_argument("--trials", type=_positive, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("oracle", help="brute-force counts (small inputs only)")
    common(p)
    p.add_argument("--seed", type=int, default=None, help="also count colorful matches under this coloring")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen-chunglu", help="sample a power-law Chung-Lu graph as an edge list")
    common(p, graph=False, query=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen_chunglu)

    p = sub.add_parser("pathstats", help="degree- vs id-topped path counts as CSV")
    common(p, graph=False, query=False)
    p.add_argument("--n", type=int, nargs="+", default=[2**10, 2**12, 2**14])
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--q", type=int, default=3)
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.add_argument("--seeds", type=_positive, default=10, help="seeds per size")
    p.set_defaults(func=cmd_pathstats)

    p = sub.add_parser("bench", help="PS vs DB wall time and join load")
    p.add_argument("--graph", help="edge list file (default: generate a Chung-Lu graph)")
    p.add_argument("--compact", action="store_true")
    p.add_argument("--query", default="c5")
    p.add_argument("--n", type=int, default=2**12)
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--output", "-o")
    p.add_argument("--pretty", action="store_true")
    p.set_defaults(func=cmd_bench)
    return ap


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except Exception as exc:  # every failure becomes an error document
        code = getattr(exc, "exit_code", 1)
        err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        for attr in ("lineno", "residual", "explored"):
            if getattr(exc, attr, None) is not None:
                err[attr] = getattr(exc, attr)
        sys.stdout.write(json.dumps(err) + "\n")
        _say(f"error: {exc}")
        if args.verbose:
            log.exception("command failed")
        return code
    return 0


if __name__ == "__main__":
    sys.exit(main())
