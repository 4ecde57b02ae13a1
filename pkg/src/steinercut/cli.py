"""Command line surface: build, query, verify, gen, stats, bench.

Index files are versioned binary blobs: the magic header ``SCK1``, a
format version, then a pickled oracle.
"""

from __future__ import annotations

import argparse
import json
import pickle
import sys

from .bench import format_bench, run_bench
from .gen import gen_hard_instance, gen_random
from .graph import read_graph, write_graph
from .sensitivity import DualOracle, build_dual_oracle
from .verify import measure, verify

MAGIC = b"SCK1"
VERSION = 1


def save_index(oracle: DualOracle, path: str) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(VERSION.to_bytes(4, "little"))
        pickle.dump(oracle, fh)


def load_index(path: str) -> DualOracle:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise ValueError(f"not an index file (magic {magic!r})")
        version = int.from_bytes(fh.read(4), "little")
        if version != VERSION:
            raise ValueError(f"unsupported index version {version}")
        return pickle.load(fh)


def _load_graph(path: str):
    with open(path) as fh:
        return read_graph(fh.read())


def _emit(args, text: str, payload: dict) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def cmd_build(args) -> int:
    g = _load_graph(args.graph)
    oracle = build_dual_oracle(g)
    save_index(oracle, args.output)
    _emit(
        args,
        f"built index for n={g.vertex_count} m={g.edge_count} "
        f"lambda={oracle.lambda_s} -> {args.output}",
        {
            "n": g.vertex_count,
            "m": g.edge_count,
            "lambda": oracle.lambda_s,
            "output": args.output,
        },
    )
    return 0


def _witness_ids(cut) -> list[int]:
    return sorted(cut.side)


def cmd_query(args) -> int:
    oracle = load_index(args.index)
    if args.what == "cut":
        u, v = args.args
        decision = oracle.index.query_cut(u, v)
        label = {
            "at_lambda": "lambda",
            "at_lambda_plus_1": "lambda+1",
            "above": "above",
        }[decision]
        if decision == "above":
            _emit(args, "above", {"decision": "above"})
            return 0
        cut = oracle.index.report_witness(u, v, decision)
        ids = _witness_ids(cut)
        _emit(
            args,
            f"{label} {cut.capacity} {' '.join(map(str, ids))}",
            {"decision": label, "capacity": cut.capacity, "witness": ids},
        )
        return 0
    if args.what == "fail":
        e1, e2 = args.args
        cap = oracle.query_fail_capacity(e1, e2)
        cut = oracle.query_fail_cut(e1, e2)
        ids = _witness_ids(cut)
        _emit(
            args,
            f"{cap} {' '.join(map(str, ids))}",
            {"capacity": cap, "witness": ids},
        )
        return 0
    u1, v1, u2, v2 = args.args
    cap = oracle.query_insert_capacity((u1, v1), (u2, v2))
    cut = oracle.query_insert_cut((u1, v1), (u2, v2))
    ids = _witness_ids(cut)
    _emit(
        args,
        f"{cap} {' '.join(map(str, ids))}",
        {"capacity": cap, "witness": ids},
    )
    return 0


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    report = verify(g)
    if args.json:
        print(json.dumps(report.as_dict(), sort_keys=True))
    else:
        for c in report.checks:
            status = "pass" if c.ok else "FAIL"
            line = f"{status} {c.name}"
            if c.detail and not c.ok:
                line += f": {c.detail}"
            print(line)
        print("ok" if report.ok else "FAILED")
    return 0 if report.ok else 1


def cmd_gen(args) -> int:
    if args.kind == "random":
        g = gen_random(args.n, args.m, args.k, args.seed)
    else:
        import random

        rng = random.Random(args.seed)
        adjacency = [
            [rng.random() < 0.5 for _ in range(args.cols)]
            for _ in range(args.rows)
        ]
        g = gen_hard_instance(adjacency).undirected
    text = write_graph(g)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
        _emit(
            args,
            f"wrote n={g.vertex_count} m={g.edge_count} to {args.output}",
            {"n": g.vertex_count, "m": g.edge_count, "output": args.output},
        )
    else:
        sys.stdout.write(text)
    return 0


def cmd_stats(args) -> int:
    oracle = load_index(args.index)
    stats = oracle.carcass.stats()
    stats.update(measure(oracle))
    del stats["breakdown"]
    if not args.json:
        del stats["probe_histograms"]
    if args.json:
        print(json.dumps(stats, sort_keys=True))
    else:
        for k in (
            "units",
            "steiner_units",
            "stretched_units",
            "skeleton_nodes",
            "skeleton_cycles",
            "capacity_only_entries",
            "full_entries",
        ):
            print(f"{k} {stats[k]}")
    return 0


def cmd_bench(args) -> int:
    g = _load_graph(args.graph)
    results = run_bench(g)
    if args.json:
        print(json.dumps(results, sort_keys=True))
    else:
        print(format_bench(results))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="steinercut",
        description="Steiner mincut index and dual edge sensitivity oracle",
    )
    parser.add_argument("--json", action="store_true", help="stable JSON output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build and persist an index")
    p.add_argument("graph")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("query", help="query a persisted index")
    p.add_argument("index")
    qsub = p.add_subparsers(dest="what", required=True)
    qc = qsub.add_parser("cut")
    qc.add_argument("args", type=int, nargs=2, metavar=("u", "v"))
    qf = qsub.add_parser("fail")
    qf.add_argument("args", type=int, nargs=2, metavar=("e1", "e2"))
    qi = qsub.add_parser("insert")
    qi.add_argument("args", type=int, nargs=4, metavar=("u1", "v1", "u2", "v2"))
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("verify", help="run the full invariant suite")
    p.add_argument("graph")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gen", help="generate instances")
    gsub = p.add_subparsers(dest="kind", required=True)
    gr = gsub.add_parser("random")
    gr.add_argument("n", type=int)
    gr.add_argument("m", type=int)
    gr.add_argument("k", type=int)
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("-o", "--output")
    gh = gsub.add_parser("hard")
    gh.add_argument("rows", type=int)
    gh.add_argument("cols", type=int)
    gh.add_argument("--seed", type=int, default=0)
    gh.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("stats", help="index statistics")
    p.add_argument("index")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("bench", help="compare kernel implementations")
    p.add_argument("graph")
    p.set_defaults(fn=cmd_bench)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
