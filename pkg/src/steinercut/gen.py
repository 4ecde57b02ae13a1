"""Instance generators: seeded random multigraphs and the lower-bound
family that encodes a bipartite adjacency into dual-failure answers."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InfeasibleParametersError
from .graph import MultiGraph

__all__ = ["gen_random", "HardInstance", "gen_hard_instance", "recover_adjacency"]


def gen_random(n: int, target_m: int, k_terminals: int, seed: int) -> MultiGraph:
    """Connected random multigraph: random spanning tree plus uniform extra
    edges (parallels allowed), with k random terminals. Bit-reproducible."""
    if n < 2 or k_terminals < 2 or k_terminals > n or target_m < n - 1:
        raise InfeasibleParametersError(
            f"n={n}, m={target_m}, k={k_terminals} infeasible"
        )
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    edges = []
    for i in range(1, n):
        edges.append((order[rng.randrange(i)], order[i]))
    while len(edges) < target_m:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u != v:
            edges.append((u, v))
    terminals = rng.sample(range(n), k_terminals)
    return MultiGraph.build(n, edges, terminals)


@dataclass(frozen=True)
class HardInstance:
    """Bipartite adjacency, its balanced dag, and the undirected version."""

    rows: int
    cols: int
    adjacency: tuple[tuple[bool, ...], ...]
    dag: MultiGraph  # arcs oriented u -> v in edge order
    undirected: MultiGraph
    s: int
    t: int
    left: tuple[int, ...]
    right: tuple[int, ...]
    source_edge: dict[int, int]  # left vertex -> one (s,u) edge id
    sink_edge: dict[int, int]  # right vertex -> one (v,t) edge id


def gen_hard_instance(adjacency) -> HardInstance:
    """Balanced-dag encoding of a bipartite adjacency.

    Vertices: s, t, the left side, the right side. Each adjacency edge
    (u,v) is an arc u->v; a left vertex with p outgoing arcs gets p extra
    s->u arcs, a right vertex with p incoming arcs gets p extra v->t arcs;
    every side vertex also gets one s->u and one u->t arc.
    """
    rows = len(adjacency)
    if rows == 0 or any(len(r) != len(adjacency[0]) for r in adjacency):
        raise InfeasibleParametersError("adjacency must be a nonempty matrix")
    cols = len(adjacency[0])
    if cols == 0:
        raise InfeasibleParametersError("adjacency must have columns")
    s = 0
    t = 1
    left = tuple(range(2, 2 + rows))
    right = tuple(range(2 + rows, 2 + rows + cols))
    edges: list[tuple[int, int]] = []
    source_edge: dict[int, int] = {}
    sink_edge: dict[int, int] = {}
    for i, u in enumerate(left):
        p = sum(1 for b in adjacency[i] if b)
        for _ in range(p):
            edges.append((s, u))
        source_edge[u] = len(edges)
        edges.append((s, u))
        edges.append((u, t))
    for j, v in enumerate(right):
        p = sum(1 for row in adjacency if row[j])
        for _ in range(p):
            edges.append((v, t))
        edges.append((s, v))
        sink_edge[v] = len(edges)
        edges.append((v, t))
    for i, u in enumerate(left):
        for j, v in enumerate(right):
            if adjacency[i][j]:
                edges.append((u, v))
    n = 2 + rows + cols
    dag = MultiGraph.build(n, edges, {s, t})
    undirected = MultiGraph.build(n, edges, {s, t})
    adj = tuple(tuple(bool(b) for b in row) for row in adjacency)
    return HardInstance(
        rows, cols, adj, dag, undirected, s, t, left, right, source_edge, sink_edge
    )


def recover_adjacency(oracle, inst: HardInstance):
    """Reconstruct the adjacency from dual-failure capacities: failing one
    (s,u) copy and one (v,t) copy drops the mincut by exactly 1 iff (u,v)
    is an edge."""
    lam = oracle.lambda_s
    out = []
    for u in inst.left:
        row = []
        for v in inst.right:
            cap = oracle.query_fail_capacity(
                inst.source_edge[u], inst.sink_edge[v]
            )
            row.append(cap == lam - 1)
        out.append(tuple(row))
    return tuple(out)
