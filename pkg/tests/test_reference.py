import pytest

from steinercut import reference
from steinercut.errors import (
    NotABunchError,
    OverlappingTerminalsError,
    SameVertexError,
    TooLargeError,
)
from steinercut.graph import MultiGraph, capacity
from steinercut.pq import build_pq_dag

from corpus import k4, path3, triangle, two_parallel
from steinercut.gen import gen_random


def brute_min_steiner_cut(g, pred):
    """Independent oracle: scan all bipartitions."""
    best = None
    smask = g.steiner_mask()
    for mask in range(1, g.full_mask()):
        if not (mask & smask and ~mask & smask):
            continue
        if not pred(mask):
            continue
        cap = capacity(g, mask)
        if best is None or cap < best:
            best = cap
    return best


def test_max_flow_examples():
    assert reference.max_flow_mincut(two_parallel(), {0}, {1})[0] == 2
    value, cut, _ = reference.max_flow_mincut(path3(), {0}, {2})
    assert value == 1 and cut.side == frozenset({0})
    assert reference.max_flow_mincut(k4(), {0}, {3})[0] == 3
    with pytest.raises(OverlappingTerminalsError):
        reference.max_flow_mincut(k4(), {0, 1}, {1})


def test_steiner_mincut_examples():
    assert reference.steiner_mincut(triangle())[0] == 2
    assert reference.steiner_mincut(k4())[0] == 3
    assert reference.steiner_mincut(path3())[0] == 1


def test_steiner_mincut_matches_brute_force():
    for trial in range(25):
        n = 3 + trial % 5
        g = gen_random(n, n + trial % 7, 2 + trial % (n - 1), seed=trial)
        lam, witness = reference.steiner_mincut(g)
        assert lam == brute_min_steiner_cut(g, lambda m: True)
        assert capacity(g, witness.side) == lam


def test_min_steiner_cut_separating():
    assert reference.min_steiner_cut_separating(k4(), 0, 1) == 3
    assert reference.min_steiner_cut_separating(path3(), 1, 2) == 1
    assert reference.min_steiner_cut_separating(triangle(), 0, 2) == 2
    with pytest.raises(SameVertexError):
        reference.min_steiner_cut_separating(k4(), 1, 1)


def test_min_separating_matches_brute_force():
    for trial in range(15):
        g = gen_random(4 + trial % 4, 6 + trial % 6, 2 + trial % 3, seed=50 + trial)
        for u in range(g.vertex_count):
            for v in range(u + 1, g.vertex_count):
                got = reference.min_steiner_cut_separating(g, u, v)
                want = brute_min_steiner_cut(
                    g, lambda m: bool((m >> u ^ m >> v) & 1)
                )
                assert got == want, (trial, u, v)


def test_enumerate_cuts_examples():
    fam = reference.enumerate_cuts(two_parallel(), 3)
    assert fam.lambda_s == 2
    assert len(fam.mincuts) == 1 and fam.mincuts[0].side == frozenset({1})

    fam = reference.enumerate_cuts(k4(), 4)
    assert len(fam.mincuts) == 4 and len(fam.plus1cuts) == 3

    fam = reference.enumerate_cuts(triangle(), 3)
    assert len(fam.mincuts) == 3 and len(fam.plus1cuts) == 0


def test_enumerate_guard():
    g = MultiGraph.build(21, [(i, i + 1) for i in range(20)], [0, 20])
    with pytest.raises(TooLargeError):
        reference.enumerate_cuts(g, 2)


def test_connectivity_classes_examples():
    assert sorted(map(sorted, reference.connectivity_classes(k4()))) == [
        [0], [1], [2], [3]
    ]
    assert sorted(map(sorted, reference.connectivity_classes(path3()))) == [
        [0], [1], [2]
    ]
    # two parallel s-t edges plus a doubled pendant path t-w
    g = MultiGraph.build(3, [(0, 1), (0, 1), (1, 2), (1, 2)], [0, 1])
    blocks = sorted(map(sorted, reference.connectivity_classes(g)))
    assert blocks == [[0], [1, 2]]


def test_tight_cut_examples():
    assert reference.tight_cut(two_parallel(), {0}).side == frozenset({0})
    assert reference.tight_cut(path3(), {0}).side == frozenset({0})
    assert reference.tight_cut(path3(), {2}).side == frozenset({2})
    with pytest.raises(NotABunchError):
        # {0,2} vs {1}: 0 and 2 are not jointly separable at capacity 1
        reference.tight_cut(
            MultiGraph.build(3, [(0, 1), (1, 2)], [0, 1, 2]), {0, 2}
        )


def test_tight_cut_minimality():
    for trial in range(15):
        n = 4 + trial % 5
        g = gen_random(n, n + 2 + trial % 5, 3, seed=200 + trial)
        fam = reference.enumerate_cuts(g, reference.steiner_mincut(g)[0])
        smask = g.steiner_mask()
        parts = {}
        for cut in fam.mincuts:
            m = cut.mask()
            parts.setdefault(m & smask, []).append(m)
        for pmask, cuts in parts.items():
            tight = reference.tight_cut(g, pmask).mask()
            for m in cuts:
                assert tight & ~m == 0, "tight cut not minimal"


def test_pq_dag_one_transversal_equals_mincuts():
    for trial in range(12):
        n = 4 + trial % 5
        g = gen_random(n, n + trial % 6, 2, seed=300 + trial)
        terms = sorted(g.steiner)
        s, t = 1 << terms[0], 1 << terms[1]
        dag = build_pq_dag(g, s, t)
        value, _, _ = reference.max_flow_mincut(g, s, t)
        for mask in range(1, g.full_mask()):
            if not (mask & s and ~mask & t and not mask & t):
                continue
            nodes = {dag.node_of[v] for v in range(n) if mask >> v & 1}
            rest = {dag.node_of[v] for v in range(n) if not mask >> v & 1}
            if nodes & rest:
                continue  # not a union of dag nodes
            is_min = capacity(g, mask) == value
            assert dag.is_1_transversal(frozenset(nodes)) == is_min, (
                trial, bin(mask)
            )
