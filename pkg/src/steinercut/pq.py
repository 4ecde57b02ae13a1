"""Residual-condensation dag for source/sink mincuts.

Built from a max-flow residual: contract strongly connected components and
keep a topological order. A source-side cut is minimum iff it crosses no
residual path twice (1-transversal), which here amounts to being closed
under residual successors.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .errors import OverlappingTerminalsError
from .graph import MultiGraph

__all__ = ["PQDag", "build_pq_dag"]


@dataclass(frozen=True)
class PQDag:
    """Condensed residual graph with node membership and topological order."""

    node_count: int
    node_of: tuple[int, ...]  # vertex -> dag node
    arcs: frozenset[tuple[int, int]]  # residual direction, between nodes
    topo_index: tuple[int, ...]  # dag node -> topological position
    source_node: int
    sink_node: int

    def members(self, node: int) -> list[int]:
        return [v for v, nd in enumerate(self.node_of) if nd == node]

    def successors_closed(self, node_set: frozenset[int]) -> bool:
        return all(b in node_set for a, b in self.arcs if a in node_set)

    def reach_from(self, nodes: set[int]) -> set[int]:
        out = set(nodes)
        frontier = list(nodes)
        succ: dict[int, list[int]] = {}
        for a, b in self.arcs:
            succ.setdefault(a, []).append(b)
        while frontier:
            x = frontier.pop()
            for y in succ.get(x, ()):
                if y not in out:
                    out.add(y)
                    frontier.append(y)
        return out

    def is_1_transversal(self, side_nodes: frozenset[int]) -> bool:
        """Literal check: no simple path crosses the node-cut boundary twice.

        Boundary arcs (in either direction) are collected; the cut fails if
        some boundary arc head can reach another boundary arc tail.
        """
        boundary = [
            (a, b)
            for a, b in self.arcs
            if (a in side_nodes) != (b in side_nodes)
        ]
        reach_cache: dict[int, set[int]] = {}
        tails = {a for a, _ in boundary}
        for _, b in boundary:
            if b not in reach_cache:
                reach_cache[b] = self.reach_from({b})
            if reach_cache[b] & tails:
                return False
        return True


def build_pq_dag(
    g: MultiGraph, sources: int, sinks: int, directed: bool = False
) -> PQDag:
    if sources & sinks:
        raise OverlappingTerminalsError("sources and sinks overlap")
    n = g.vertex_count
    eu, ev = g.edge_arrays()
    _, _, _, caps = kernels.max_flow(n, eu, ev, sources, sinks, directed)

    succ: list[list[int]] = [[] for _ in range(n)]
    for i in range(len(eu)):
        if caps[2 * i] > 0:
            succ[eu[i]].append(ev[i])
        if caps[2 * i + 1] > 0:
            succ[ev[i]].append(eu[i])

    comp = _scc(n, succ)
    ncomp = max(comp) + 1
    arcs = set()
    for x in range(n):
        for y in succ[x]:
            if comp[x] != comp[y]:
                arcs.add((comp[x], comp[y]))

    topo = _topo_order(ncomp, arcs)
    src_vertex = next(v for v in range(n) if sources >> v & 1)
    snk_vertex = next(v for v in range(n) if sinks >> v & 1)
    return PQDag(
        ncomp,
        tuple(comp),
        frozenset(arcs),
        tuple(topo),
        comp[src_vertex],
        comp[snk_vertex],
    )


def _scc(n: int, succ: list[list[int]]) -> list[int]:
    """Iterative Tarjan; components numbered in reverse topological order."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comp = [-1] * n
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] >= 0:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for j in range(pi, len(succ[v])):
                w = succ[v][j]
                if index[w] < 0:
                    work[-1] = (v, j + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def _topo_order(ncomp: int, arcs: set[tuple[int, int]]) -> list[int]:
    indeg = [0] * ncomp
    succ: list[list[int]] = [[] for _ in range(ncomp)]
    for a, b in arcs:
        succ[a].append(b)
        indeg[b] += 1
    order = [c for c in range(ncomp) if indeg[c] == 0]
    qi = 0
    while qi < len(order):
        x = order[qi]
        qi += 1
        for y in succ[x]:
            indeg[y] -= 1
            if indeg[y] == 0:
                order.append(y)
    pos = [0] * ncomp
    for i, c in enumerate(order):
        pos[c] = i
    return pos
