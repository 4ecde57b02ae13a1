"""Pure-python kernels: cut capacity, cut enumeration, unit-capacity max-flow.

Same contracts as the compiled module in ``steinercut._speedups``; the
package selects one implementation at import time (see ``kernels.__init__``).
"""

from __future__ import annotations

IMPL = "python"


def cut_capacity(edges_u: list[int], edges_v: list[int], mask: int) -> int:
    cap = 0
    for u, v in zip(edges_u, edges_v):
        cap += (mask >> u ^ mask >> v) & 1
    return cap


def enumerate_steiner_cuts(
    n: int,
    edges_u: list[int],
    edges_v: list[int],
    steiner_mask: int,
    cap_limit: int,
) -> tuple[int, list[tuple[int, int]]]:
    """Scan all canonical bipartitions (side excluding vertex 0).

    Returns ``(lambda_s, cuts)`` where ``lambda_s`` is the minimum capacity
    over all Steiner bipartitions and ``cuts`` lists ``(side_mask, cap)`` for
    every Steiner bipartition with ``cap <= cap_limit``. Gray-code order, one
    vertex flip per step.
    """
    deg = [0] * n
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in zip(edges_u, edges_v):
        deg[u] += 1
        deg[v] += 1
        adj[u].append(v)
        adj[v].append(u)

    lam = -1
    cuts: list[tuple[int, int]] = []
    mask = 0
    cap = 0
    steps = 1 << (n - 1)
    for t in range(1, steps):
        b = (t & -t).bit_length() - 1  # flip vertex b+1
        v = b + 1
        inside = sum(1 for w in adj[v] if mask >> w & 1)
        if mask >> v & 1:
            mask &= ~(1 << v)
            cap += 2 * inside - deg[v]
        else:
            cap += deg[v] - 2 * inside
            mask |= 1 << v
        if mask & steiner_mask and ~mask & steiner_mask:
            if lam < 0 or cap < lam:
                lam = cap
            if cap <= cap_limit:
                cuts.append((mask, cap))
    return lam, cuts


def max_flow(
    n: int,
    edges_u: list[int],
    edges_v: list[int],
    source_mask: int,
    sink_mask: int,
    directed: bool = False,
) -> tuple[int, int, int, list[int]]:
    """Unit-capacity max flow between vertex sets via BFS augmentation.

    Each input edge becomes a forward/backward arc pair (arcs ``2i`` and
    ``2i+1``); undirected edges start with capacity 1 on both arcs. Returns
    ``(value, min_source_side, max_source_side, residual_caps)`` where the
    side masks come from residual reachability.
    """
    m = len(edges_u)
    caps = [0] * (2 * m)
    head = [0] * (2 * m)
    adj: list[list[int]] = [[] for _ in range(n)]
    for i in range(m):
        u, v = edges_u[i], edges_v[i]
        caps[2 * i] = 1
        caps[2 * i + 1] = 0 if directed else 1
        head[2 * i] = v
        head[2 * i + 1] = u
        adj[u].append(2 * i)
        adj[v].append(2 * i + 1)

    value = 0
    parent_arc = [-1] * n
    while True:
        for i in range(n):
            parent_arc[i] = -1
        queue = [v for v in range(n) if source_mask >> v & 1]
        seen = source_mask
        hit = -1
        qi = 0
        while qi < len(queue):
            x = queue[qi]
            qi += 1
            if sink_mask >> x & 1:
                hit = x
                break
            for a in adj[x]:
                y = head[a]
                if caps[a] > 0 and not seen >> y & 1:
                    seen |= 1 << y
                    parent_arc[y] = a
                    queue.append(y)
        if hit < 0:
            break
        value += 1
        x = hit
        while not source_mask >> x & 1:
            a = parent_arc[x]
            caps[a] -= 1
            caps[a ^ 1] += 1
            x = head[a ^ 1]

    min_side = _reach(n, adj, head, caps, source_mask, forward=True)
    to_sink = _reach(n, adj, head, caps, sink_mask, forward=False)
    max_side = ((1 << n) - 1) & ~to_sink
    return value, min_side, max_side, caps


def _reach(n, adj, head, caps, start_mask, forward):
    seen = start_mask
    stack = [v for v in range(n) if start_mask >> v & 1]
    while stack:
        x = stack.pop()
        for a in adj[x]:
            y = head[a]
            cap = caps[a] if forward else caps[a ^ 1]
            if cap > 0 and not seen >> y & 1:
                seen |= 1 << y
                stack.append(y)
    return seen
