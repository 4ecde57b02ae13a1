"""Benchmark comparing the compiled and pure-python kernels."""

from __future__ import annotations

import time

from .graph import MultiGraph
from .kernels import implementations


def run_bench(g: MultiGraph, repeats: int = 3) -> dict:
    """Time enumeration, max-flow and capacity kernels on one graph."""
    eu, ev = g.edge_arrays()
    n = g.vertex_count
    smask = g.steiner_mask()
    terms = sorted(g.steiner)
    results: dict[str, dict[str, float]] = {}
    baseline = None
    for name, impl in implementations().items():
        timings = {}
        t0 = time.perf_counter()
        for _ in range(repeats):
            lam, cuts = impl.enumerate_steiner_cuts(n, eu, ev, smask, n * n)
        timings["enumerate_s"] = (time.perf_counter() - t0) / repeats
        t0 = time.perf_counter()
        for _ in range(repeats):
            for t in terms[1:]:
                impl.max_flow(n, eu, ev, 1 << terms[0], 1 << t)
        timings["max_flow_s"] = (time.perf_counter() - t0) / repeats
        t0 = time.perf_counter()
        for _ in range(repeats):
            for mask in range(1, min(1 << (n - 1), 4096)):
                impl.cut_capacity(eu, ev, mask << 1)
        timings["capacity_s"] = (time.perf_counter() - t0) / repeats
        results[name] = timings
        if baseline is None:
            baseline = (lam, len(cuts))
        else:
            check = impl.enumerate_steiner_cuts(n, eu, ev, smask, n * n)
            if (check[0], len(check[1])) != baseline:
                raise AssertionError("kernel implementations disagree")
    return results


def format_bench(results: dict) -> str:
    lines = [f"{'impl':<8} {'enumerate':>12} {'max_flow':>12} {'capacity':>12}"]
    for name, t in results.items():
        lines.append(
            f"{name:<8} {t['enumerate_s'] * 1e3:>10.2f}ms "
            f"{t['max_flow_s'] * 1e3:>10.2f}ms {t['capacity_s'] * 1e3:>10.2f}ms"
        )
    if {"python", "cython"} <= results.keys():
        sp = results["python"]["enumerate_s"] / max(
            results["cython"]["enumerate_s"], 1e-9
        )
        lines.append(f"enumerate speedup: {sp:.1f}x")
    return "\n".join(lines)
