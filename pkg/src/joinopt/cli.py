"""Command-line front end.

Subcommands::

    joinopt generate --topology star --rels 10..12 --count 2 --seed 1 --out-dir q/
    joinopt optimize --query q/star-010-000.json --algo mpdp
    joinopt verify --max-rels 10 --trials 20
    joinopt bench --algos dpsub,mpdp --topology star --rels 10..14 --csv runs.csv
    joinopt report --csv runs.csv

Exit codes: 0 success, 1 bad input, 2 usage error, 3 timeout,
4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from .costmodel import CostKind, CostModel
from .dpexact import OPTIMIZERS, OptimizerResult, count_pairs, default_workers, level_pipeline, oracle_ccp_count, oracle_optimal
from .errors import JoinOptError
from .heuristics import DEFAULT_K, goo, idp2, uniondp
from .planmemo import check_plan, recompute_plan
from .querygraph import QueryGraph
from .workload import TOPOLOGIES, GeneratorConfig, generate, mixed_suite, read_query, write_query

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_TIMEOUT, EXIT_VERIFY = 0, 1, 2, 3, 4

ALGOS = ("dpsize", "dpsub", "mpdp", "mpdp-tree", "goo", "idp2", "uniondp")
DEFAULT_TIMEOUT_MS = 60000

CSV_FIELDS = [
    "algo", "query_id", "n_rels", "topology", "workers", "cost_kind",
    "opt_time_ms", "plan_cost", "evaluated_pairs", "ccp_pairs", "timed_out",
]


def run_algorithm(
    graph: QueryGraph,
    algo: str,
    *,
    cost: str = CostKind.HASH_JOIN.value,
    workers: int = 1,
    timeout_ms: float | None = DEFAULT_TIMEOUT_MS,
    k: int = DEFAULT_K,
) -> OptimizerResult:
    timeout = None if timeout_ms is None else timeout_ms / 1000.0
    if algo == "goo":
        return goo(graph, cost=cost)
    if algo == "idp2":
        return idp2(graph, k, cost=cost, timeout=timeout, workers=workers)
    if algo == "uniondp":
        return uniondp(graph, k, cost=cost, timeout=timeout, workers=workers)
    name = algo.replace("-", "_")
    if name not in OPTIMIZERS:
        raise JoinOptError(f"unknown algorithm {algo!r}")
    return OPTIMIZERS[name](graph, cost=cost, workers=workers, timeout=timeout)


def parse_range(text: str) -> range:
    """``"10"`` or ``"10..12"`` (inclusive)."""
    try:
        if ".." in text:
            low, high = (int(x) for x in text.split("..", 1))
        else:
            low = high = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if low < 2 or high < low:
        raise argparse.ArgumentTypeError(f"bad relation range {text!r}")
    return range(low, high + 1)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"bad list {text!r}")
    return values


def _algo_list(text: str) -> list[str]:
    algos = [a for a in text.split(",") if a]
    bad = [a for a in algos if a not in ALGOS]
    if bad or not algos:
        raise argparse.ArgumentTypeError(f"unknown algorithm(s) {bad or text!r}; choose from {', '.join(ALGOS)}")
    return algos


def query_seed(seed: int, n_rels: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, n_rels, index]).generate_state(1, np.uint64)[0])


def query_name(topology: str, n_rels: int, index: int) -> str:
    return f"{topology}-{n_rels:03d}-{index:03d}"


def workload(topology: str, rels: range, count: int, seed: int, depth: int):
    for n in rels:
        for i in range(count):
            cfg = GeneratorConfig(topology, n, seed=query_seed(seed, n, i), depth=depth)
            yield query_name(topology, n, i), generate(cfg)


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args) -> int:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = 0
    for name, g in workload(args.topology, args.rels, args.count, args.seed, args.depth):
        write_query(g, out / f"{name}.json")
        written += 1
    print(f"wrote {written} queries to {out}")
    return EXIT_OK


def result_document(graph: QueryGraph, result: OptimizerResult) -> dict:
    names = [r.name for r in graph.relations]
    plan = result.plan
    return {
        "algo": result.algorithm,
        "plan": plan.to_dict(names) if plan is not None else None,
        "plan_text": plan.to_text(names) if plan is not None else None,
        "cost": plan.cost if plan is not None else None,
        "cardinality": plan.cardinality if plan is not None else None,
        "evaluated_pairs": result.stats.evaluated_counter,
        "ccp_pairs": result.stats.ccp_counter,
        "opt_time_ms": result.stats.elapsed * 1000.0,
        "timed_out": result.stats.timed_out,
    }


def cmd_optimize(args) -> int:
    graph = read_query(args.query)
    if args.inject_fault:
        if args.algo != "mpdp":
            print("error: --inject-fault only applies to mpdp", file=sys.stderr)
            return EXIT_USAGE
        result = level_pipeline(
            graph, "mpdp", cost=args.cost, workers=args.workers,
            timeout=args.timeout_ms / 1000.0, skip_last_block=True,
        )
    else:
        result = run_algorithm(
            graph, args.algo, cost=args.cost, workers=args.workers, timeout_ms=args.timeout_ms, k=args.k
        )
    print(json.dumps(result_document(graph, result), indent=1 if args.pretty else None))
    return EXIT_TIMEOUT if result.stats.timed_out else EXIT_OK


def _open_csv(path: Path):
    fresh = not path.exists() or path.stat().st_size == 0
    handle = path.open("a", newline="", encoding="utf-8")
    writer = csv.DictWriter(handle, fieldnames=CSV_FIELDS)
    if fresh:
        writer.writeheader()
    return handle, writer


def bench_row(algo: str, query_id: str, topology: str, graph: QueryGraph, workers: int, cost: str, result) -> dict:
    return {
        "algo": algo,
        "query_id": query_id,
        "n_rels": graph.n,
        "topology": topology,
        "workers": workers,
        "cost_kind": cost,
        "opt_time_ms": f"{result.stats.elapsed * 1000.0:.3f}",
        "plan_cost": "" if result.plan is None or result.stats.timed_out else repr(result.plan.cost),
        "evaluated_pairs": result.stats.evaluated_counter,
        "ccp_pairs": result.stats.ccp_counter,
        "timed_out": int(result.stats.timed_out),
    }


def cmd_bench(args) -> int:
    path = Path(args.csv)
    try:
        handle, writer = _open_csv(path)
    except OSError as exc:
        print(f"error: cannot write {path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    with handle:
        for query_id, graph in workload(args.topology, args.rels, args.count, args.seed, args.depth):
            for algo in args.algos:
                for workers in args.workers:
                    result = run_algorithm(
                        graph, algo, cost=args.cost, workers=workers, timeout_ms=args.timeout_ms, k=args.k
                    )
                    writer.writerow(bench_row(algo, query_id, args.topology, graph, workers, args.cost, result))
                    handle.flush()
                    if not args.quiet:
                        status = "timeout" if result.stats.timed_out else f"cost={result.cost:.6g}"
                        print(f"{query_id} {algo} w={workers} {status} {result.stats.elapsed * 1000:.1f}ms")
    return EXIT_OK


def normalized_costs(rows: list[dict]) -> dict[tuple, list[float]]:
    """Per (topology, n_rels, cost_kind, algo): plan cost over the best cost
    any row found for the same query and cost kind."""
    best: dict[tuple, float] = {}
    for row in rows:
        if row["plan_cost"]:
            key = (row["query_id"], row["cost_kind"])
            best[key] = min(best.get(key, float("inf")), float(row["plan_cost"]))
    out: dict[tuple, list[float]] = defaultdict(list)
    for row in rows:
        if row["plan_cost"]:
            ratio = float(row["plan_cost"]) / best[(row["query_id"], row["cost_kind"])]
            out[(row["topology"], int(row["n_rels"]), row["cost_kind"], row["algo"])].append(ratio)
    return out


def cmd_report(args) -> int:
    try:
        with open(args.csv, newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
    except OSError as exc:
        print(f"error: cannot read {args.csv}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if rows and set(CSV_FIELDS) - set(rows[0]):
        print(f"error: {args.csv} is not a bench CSV", file=sys.stderr)
        return EXIT_INPUT
    times: dict[tuple, list[float]] = defaultdict(list)
    timeouts: dict[tuple, int] = defaultdict(int)
    for row in rows:
        key = (row["topology"], int(row["n_rels"]), row["cost_kind"], row["algo"])
        times[key].append(float(row["opt_time_ms"]))
        timeouts[key] += int(row["timed_out"])
    norm = normalized_costs(rows)
    header = f"{'topology':<11}{'rels':>5} {'cost':<10}{'algo':<10}{'runs':>5}{'timeouts':>9}{'mean_norm':>11}{'p95_norm':>10}{'mean_ms':>11}"
    print(header)
    for key in sorted(times):
        ratios = norm.get(key, [])
        mean = f"{statistics.fmean(ratios):.3f}" if ratios else "-"
        p95 = f"{np.percentile(ratios, 95):.3f}" if ratios else "-"
        topology, n, cost, algo = key
        print(
            f"{topology:<11}{n:>5} {cost:<10}{algo:<10}{len(times[key]):>5}{timeouts[key]:>9}"
            f"{mean:>11}{p95:>10}{statistics.fmean(times[key]):>11.1f}"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


class _Failure(Exception):
    def __init__(self, suite: str, message: str, graph: QueryGraph, flags: str):
        super().__init__(f"[{suite}] {message}")
        self.suite = suite
        self.graph = graph
        self.flags = flags


def _verify_one(graph: QueryGraph, topology: str, skip_last_block: bool) -> None:
    flags = "--algo mpdp" + (" --inject-fault skip-last-block" if skip_last_block else "")
    oracle_ccp = oracle_ccp_count(graph)
    mpdp_run = lambda cost, workers=1: level_pipeline(  # noqa: E731
        graph, "mpdp", cost=cost, workers=workers, skip_last_block=skip_last_block
    )
    for cost in CostKind:
        expected = oracle_optimal(graph, cost).cost
        runs = {name: OPTIMIZERS[name](graph, cost=cost) for name in ("dpsize", "dpsub")}
        runs["mpdp"] = mpdp_run(cost)
        if graph.is_tree():
            runs["mpdp_tree"] = OPTIMIZERS["mpdp_tree"](graph, cost=cost)
        for name, result in runs.items():
            if name != "mpdp_tree" and result.cost != expected:
                raise _Failure("optimality", f"{name} cost {result.cost!r} != oracle {expected!r}", graph, flags)
            if result.stats.ccp_counter != oracle_ccp:
                raise _Failure(
                    "counters", f"{name} ccp {result.stats.ccp_counter} != oracle {oracle_ccp}", graph, flags
                )
        model = CostModel(graph, cost)
        for name, result in runs.items():
            check_plan(result.plan, graph)
            if recompute_plan(result.plan, model).cost != result.cost:
                raise _Failure("invariants", f"{name} plan cost does not recompute", graph, flags)
        mp, ds = runs["mpdp"].stats, runs["dpsub"].stats
        if mp.evaluated_counter > ds.evaluated_counter:
            raise _Failure("invariants", "mpdp evaluated more pairs than dpsub", graph, flags)
        complete = len(graph.edges) == graph.n * (graph.n - 1) // 2
        if (graph.is_tree() or complete) and mp.evaluated_counter != mp.ccp_counter:
            raise _Failure("invariants", "mpdp evaluated != ccp on a tree or clique", graph, flags)
        again = mpdp_run(cost, workers=2)
        if (again.cost, again.stats.evaluated_counter, again.stats.ccp_counter) != (
            runs["mpdp"].cost, mp.evaluated_counter, mp.ccp_counter
        ):
            raise _Failure("determinism", "mpdp differs between 1 and 2 workers", graph, flags)
    counted = count_pairs(graph, "mpdp")
    if not skip_last_block and counted.ccp_counter != oracle_ccp:
        raise _Failure("counters", "counting mode disagrees with the oracle", graph, flags)


def cmd_verify(args) -> int:
    if args.max_rels > 14 or args.max_rels < 2:
        print("error: --max-rels must be in [2, 14]", file=sys.stderr)
        return EXIT_USAGE
    if args.trials == 0:
        print("warning: --trials 0, nothing verified", file=sys.stderr)
        return EXIT_OK
    skip = args.inject_fault == "skip-last-block"
    for trial, (topology, graph) in enumerate(mixed_suite(args.trials, (2, args.max_rels), args.seed)):
        try:
            _verify_one(graph, topology, skip)
        except _Failure as failure:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            query = out / f"verify-failure-{trial:03d}.json"
            write_query(graph, query)
            print(f"FAIL trial {trial} ({topology}, n={graph.n}): {failure}")
            print(f"reproduce: joinopt optimize --query {query} {failure.flags}")
            return EXIT_VERIFY
        print(f"ok   trial {trial} ({topology}, n={graph.n})")
    print(f"all suites passed on {args.trials} graphs")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="joinopt", description="Join-order optimization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write synthetic query files")
    p.add_argument("--topology", choices=TOPOLOGIES, required=True)
    p.add_argument("--rels", type=parse_range, required=True, help="N or A..B")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=4, help="snowflake depth (2..4)")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_generate)

    def common(p, many_workers=False):
        if many_workers:
            p.add_argument("--workers", type=_int_list, default=[default_workers()], help="comma-separated")
        else:
            p.add_argument("--workers", type=int, default=default_workers())
        p.add_argument("--timeout-ms", type=float, default=DEFAULT_TIMEOUT_MS)
        p.add_argument("--k", type=int, default=DEFAULT_K, help="block size for idp2 and uniondp")
        p.add_argument("--cost", choices=[c.value for c in CostKind], default=CostKind.HASH_JOIN.value)

    p = sub.add_parser("optimize", help="optimize one query file and print the plan as JSON")
    p.add_argument("--query", required=True)
    p.add_argument("--algo", choices=ALGOS, required=True)
    p.add_argument("--pretty", action="store_true")
    p.add_argument("--inject-fault", choices=["skip-last-block"], help="break mpdp on purpose")
    common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", help="check the exact optimizers against brute-force oracles")
    p.add_argument("--max-rels", type=int, default=10)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".", help="where reproducers are written")
    p.add_argument("--inject-fault", choices=["skip-last-block"], help="break mpdp on purpose")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run algorithms over a generated workload, append CSV rows")
    p.add_argument("--algos", type=_algo_list, required=True)
    p.add_argument("--topology", choices=TOPOLOGIES, required=True)
    p.add_argument("--rels", type=parse_range, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--csv", required=True)
    p.add_argument("--quiet", action="store_true")
    common(p, many_workers=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="summarise a bench CSV with normalized costs")
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "count", 1) < 0:
        parser.error("--count must be >= 0")
    workers = getattr(args, "workers", 1)
    if min(workers if isinstance(workers, list) else [workers]) < 1:
        parser.error("--workers must be >= 1")
    if getattr(args, "depth", 4) not in (2, 3, 4) and getattr(args, "topology", "") == "snowflake":
        parser.error("--depth must be 2, 3 or 4")
    try:
        return args.func(args)
    except JoinOptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
