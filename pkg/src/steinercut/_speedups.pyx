# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; mirrors steinercut.kernels._py."""

from libc.stdlib cimport malloc, free

IMPL = "cython"


def cut_capacity(list edges_u, list edges_v, mask):
    cdef unsigned long long m = <unsigned long long> mask
    cdef Py_ssize_t i, ne = len(edges_u)
    cdef int cap = 0
    cdef int u, v
    for i in range(ne):
        u = edges_u[i]
        v = edges_v[i]
        cap += <int> (((m >> u) ^ (m >> v)) & 1)
    return cap


def enumerate_steiner_cuts(int n, list edges_u, list edges_v,
                           steiner_mask, int cap_limit):
    cdef unsigned long long smask = <unsigned long long> steiner_mask
    cdef unsigned long long full = (<unsigned long long> 1 << n) - 1
    cdef Py_ssize_t ne = len(edges_u)
    cdef int *deg = <int *> malloc(n * sizeof(int))
    cdef int *adj_start = <int *> malloc((n + 1) * sizeof(int))
    cdef int *adj_flat = <int *> malloc(2 * ne * sizeof(int))
    cdef int *fill = <int *> malloc(n * sizeof(int))
    cdef Py_ssize_t i
    cdef int u, v, b, inside, j
    cdef unsigned long long mask = 0, t, steps, bit
    cdef int cap = 0
    cdef long lam = -1
    cuts = []
    try:
        for i in range(n):
            deg[i] = 0
        for i in range(ne):
            u = edges_u[i]
            v = edges_v[i]
            deg[u] += 1
            deg[v] += 1
        adj_start[0] = 0
        for i in range(n):
            adj_start[i + 1] = adj_start[i] + deg[i]
            fill[i] = adj_start[i]
        for i in range(ne):
            u = edges_u[i]
            v = edges_v[i]
            adj_flat[fill[u]] = v
            fill[u] += 1
            adj_flat[fill[v]] = u
            fill[v] += 1

        steps = <unsigned long long> 1 << (n - 1)
        for t in range(1, steps):
            b = 0
            bit = t & (~t + 1)
            while not (bit >> b) & 1:
                b += 1
            v = b + 1
            inside = 0
            for j in range(adj_start[v], adj_start[v + 1]):
                inside += <int> ((mask >> adj_flat[j]) & 1)
            if (mask >> v) & 1:
                mask &= ~(<unsigned long long> 1 << v)
                cap += 2 * inside - deg[v]
            else:
                cap += deg[v] - 2 * inside
                mask |= <unsigned long long> 1 << v
            if (mask & smask) != 0 and ((~mask) & full & smask) != 0:
                if lam < 0 or cap < lam:
                    lam = cap
                if cap <= cap_limit:
                    cuts.append((mask, cap))
    finally:
        free(deg)
        free(adj_start)
        free(adj_flat)
        free(fill)
    return lam, cuts


def max_flow(int n, list edges_u, list edges_v, source_mask, sink_mask,
             bint directed=False):
    cdef unsigned long long smask = <unsigned long long> source_mask
    cdef unsigned long long tmask = <unsigned long long> sink_mask
    cdef Py_ssize_t m = len(edges_u)
    cdef int *caps = <int *> malloc(2 * m * sizeof(int))
    cdef int *head = <int *> malloc(2 * m * sizeof(int))
    cdef int *adj_start = <int *> malloc((n + 1) * sizeof(int))
    cdef int *adj_flat = <int *> malloc(2 * m * sizeof(int))
    cdef int *fill = <int *> malloc(n * sizeof(int))
    cdef int *parent_arc = <int *> malloc(n * sizeof(int))
    cdef int *queue = <int *> malloc(n * sizeof(int))
    cdef Py_ssize_t i
    cdef int u, v, x, y, a, hit, qi, qn, value = 0
    cdef unsigned long long seen, min_side, to_sink, full
    try:
        for i in range(n):
            fill[i] = 0
        for i in range(m):
            u = edges_u[i]
            v = edges_v[i]
            caps[2 * i] = 1
            caps[2 * i + 1] = 0 if directed else 1
            head[2 * i] = v
            head[2 * i + 1] = u
            fill[u] += 1
            fill[v] += 1
        adj_start[0] = 0
        for i in range(n):
            adj_start[i + 1] = adj_start[i] + fill[i]
            fill[i] = adj_start[i]
        for i in range(m):
            u = edges_u[i]
            v = edges_v[i]
            adj_flat[fill[u]] = 2 * i
            fill[u] += 1
            adj_flat[fill[v]] = 2 * i + 1
            fill[v] += 1

        while True:
            hit = -1
            qn = 0
            seen = smask
            for x in range(n):
                parent_arc[x] = -1
                if (smask >> x) & 1:
                    queue[qn] = x
                    qn += 1
            qi = 0
            while qi < qn:
                x = queue[qi]
                qi += 1
                if (tmask >> x) & 1:
                    hit = x
                    break
                for i in range(adj_start[x], adj_start[x + 1]):
                    a = adj_flat[i]
                    y = head[a]
                    if caps[a] > 0 and not (seen >> y) & 1:
                        seen |= <unsigned long long> 1 << y
                        parent_arc[y] = a
                        queue[qn] = y
                        qn += 1
            if hit < 0:
                break
            value += 1
            x = hit
            while not (smask >> x) & 1:
                a = parent_arc[x]
                caps[a] -= 1
                caps[a ^ 1] += 1
                x = head[a ^ 1]

        full = (<unsigned long long> 1 << n) - 1
        min_side = _reach(n, adj_start, adj_flat, head, caps, smask, 1, queue)
        to_sink = _reach(n, adj_start, adj_flat, head, caps, tmask, 0, queue)
        out_caps = [caps[i] for i in range(2 * m)]
        return value, min_side, full & ~to_sink, out_caps
    finally:
        free(caps)
        free(head)
        free(adj_start)
        free(adj_flat)
        free(fill)
        free(parent_arc)
        free(queue)


cdef unsigned long long _reach(int n, int *adj_start, int *adj_flat,
                               int *head, int *caps,
                               unsigned long long start_mask, bint forward,
                               int *stack):
    cdef unsigned long long seen = start_mask
    cdef int sp = 0, x, y, a, cap
    cdef Py_ssize_t i
    for x in range(n):
        if (start_mask >> x) & 1:
            stack[sp] = x
            sp += 1
    while sp > 0:
        sp -= 1
        x = stack[sp]
        for i in range(adj_start[x], adj_start[x + 1]):
            a = adj_flat[i]
            y = head[a]
            cap = caps[a] if forward else caps[a ^ 1]
            if cap > 0 and not (seen >> y) & 1:
                seen |= <unsigned long long> 1 << y
                stack[sp] = y
                sp += 1
    return seen
