import pytest

from steinercut import reference
from steinercut.carcass import build_carcass
from steinercut.errors import IntraUnitEdgeError, SameVertexError
from steinercut.graph import MultiGraph
from steinercut.pq import build_pq_dag

from corpus import canonical_graphs, cycle_graph, k4, path3, path_graph, two_parallel
from steinercut.gen import gen_random


def test_skeleton_shapes():
    c = build_carcass(path3())
    assert c.stats() == {
        "units": 3,
        "steiner_units": 2,
        "stretched_units": 1,
        "skeleton_nodes": 2,
        "skeleton_cycles": 0,
    }
    c = build_carcass(two_parallel())
    assert c.stats()["skeleton_nodes"] == 2
    assert c.stats()["skeleton_cycles"] == 0

    c = build_carcass(k4())
    s = c.stats()
    assert s["skeleton_nodes"] == 5 and s["steiner_units"] == 4
    assert s["skeleton_cycles"] == 0

    c = build_carcass(cycle_graph(4))
    s = c.stats()
    assert s["skeleton_cycles"] == 1 and s["skeleton_nodes"] == 8


def realized_partitions(g):
    lam, _ = reference.steiner_mincut(g)
    fam = reference.enumerate_cuts(g, lam)
    smask = g.steiner_mask()
    t0 = (smask & -smask).bit_length() - 1
    out = set()
    for m in fam.mincut_masks():
        p = m & smask
        out.add(p if not p >> t0 & 1 else smask & ~p)
    return out


@pytest.mark.parametrize("name,g", sorted(canonical_graphs().items()))
def test_skeleton_partition_bijection(name, g):
    c = build_carcass(g)
    built = {c._canon_part(p) for _, p in c.skeleton.minimal_cuts()}
    assert built == realized_partitions(g)


def test_skeleton_partition_bijection_random():
    for trial in range(40):
        n = 3 + trial % 7
        g = gen_random(n, n + trial % 8, 2 + trial % (n - 1), seed=400 + trial)
        c = build_carcass(g)
        built = {c._canon_part(p) for _, p in c.skeleton.minimal_cuts()}
        assert built == realized_partitions(g)


def test_unit_classification_path():
    c = build_carcass(path_graph(5))
    # middle vertices sit strictly between the tight cuts of the only bunch
    for v in (1, 2, 3):
        assert c.stretched[c.unit_of[v]]
    assert not c.stretched[c.unit_of[0]]


def test_path_intersection_cases():
    c = build_carcass(path3())
    p = c.pi[c.unit_of[1]]
    inter = c.path_intersection(p, p)
    assert inter.kind == "shared_edge"

    # disjoint subtrees of the K4 star
    ck = build_carcass(k4())
    p0 = ck.pi[ck.unit_of[0]]
    p1 = ck.pi[ck.unit_of[1]]
    assert ck.path_intersection(p0, p1).kind == "disjoint"

    # two projections entering one cycle on different edges
    cyc = build_carcass(cycle_graph(4))
    e01 = cyc.edge_projection(0)  # edge (0,1)
    e23 = cyc.edge_projection(2)  # edge (2,3)
    inter = cyc.path_intersection(e01, e23)
    assert inter.kind == "shared_cycle_pair"
    assert cyc.skeleton.edges[inter.edge].cycle == cyc.skeleton.edges[inter.edge2].cycle


def test_path_intersection_probe_budget():
    # probe count must not grow with the terminal count
    counts = []
    for n in (6, 10, 14):
        g = cycle_graph(n)
        c = build_carcass(g)
        p1 = c.edge_projection(0)
        p2 = c.edge_projection(n // 2)
        c.skeleton.probes = 0
        c.path_intersection(p1, p2)
        counts.append(c.skeleton.probes)
    assert max(counts) <= 64
    assert counts[-1] <= counts[0] + 8


def test_report_tight_cut_examples():
    c = build_carcass(path3())
    eid = c.skeleton.edges[0].eid
    node_for_0 = c.pi[c.unit_of[0]].a
    cut = c.report_tight_cut(node_for_0, (eid,))
    assert cut.side == frozenset({0}) and cut.capacity == 1

    c2 = build_carcass(two_parallel())
    nd = c2.pi[c2.unit_of[0]].a
    cut = c2.report_tight_cut(nd, (c2.skeleton.edges[0].eid,))
    assert cut.side == frozenset({0})

    ck = build_carcass(k4())
    nd = ck.pi[ck.unit_of[0]].a
    pend = next(
        e.eid for e in ck.skeleton.edges if nd in (e.a, e.b)
    )
    cut = ck.report_tight_cut(nd, (pend,))
    assert cut.side == frozenset({0})


def test_report_tight_cut_matches_reference():
    for trial in range(20):
        n = 4 + trial % 5
        g = gen_random(n, n + 1 + trial % 6, 2 + trial % 3, seed=550 + trial)
        c = build_carcass(g)
        for key, pmask in c.skeleton.minimal_cuts():
            cm = c._canon_part(pmask)
            ref = reference.tight_cut(g, cm).mask()
            for want in (True, False):
                side = c._tight_side_mask(key, want)
                if side == ref:
                    break
            else:
                raise AssertionError("projection sweep missed the tight cut")


def test_report_separating_mincut():
    c = build_carcass(path3())
    cut = c.report_separating_mincut(0, 2)
    assert cut.capacity == 1 and cut.side in (
        frozenset({0}), frozenset({0, 1}), frozenset({2}), frozenset({1, 2})
    )
    with pytest.raises(SameVertexError):
        c.report_separating_mincut(1, 1)

    ck = build_carcass(k4())
    cut = ck.report_separating_mincut(0, 1)
    assert cut.capacity == 3
    assert (0 in cut.side) != (1 in cut.side)


def test_report_separating_mincut_exhaustive():
    for trial in range(30):
        n = 3 + trial % 7
        g = gen_random(n, n + trial % 7, 2 + trial % (n - 1), seed=700 + trial)
        c = build_carcass(g)
        lam = c.lambda_s
        for u in range(n):
            for v in range(u + 1, n):
                cut = c.report_separating_mincut(u, v)
                if c.unit_of[u] == c.unit_of[v]:
                    assert cut is None
                else:
                    assert cut.capacity == lam
                    assert (u in cut.side) != (v in cut.side)


def test_edge_projection():
    c = build_carcass(two_parallel())
    p = c.edge_projection(0)
    assert len(p.edges) == 1

    c3 = build_carcass(path3())
    p = c3.edge_projection(0)
    assert p.edges == c3.pi[c3.unit_of[1]].edges

    g = MultiGraph.build(3, [(0, 1), (0, 1), (1, 2), (1, 2)], [0, 1])
    cg = build_carcass(g)
    with pytest.raises(IntraUnitEdgeError):
        cg.edge_projection(2)  # (1,2) lies inside class {1,2}


def test_edge_projection_prefix_suffix():
    for trial in range(20):
        n = 4 + trial % 6
        g = gen_random(n, n + trial % 6, 2 + trial % 3, seed=820 + trial)
        c = build_carcass(g)
        for eid, u, v in g.edges:
            if c.unit_of[u] == c.unit_of[v]:
                continue
            pe = c.edge_projection(eid)
            for w in (u, v):
                pw = c.pi[c.unit_of[w]]
                assert pw.edges <= pe.edges
                if pw.is_node():
                    assert pw.a in (pe.a, pe.b) or any(
                        pw.a in (c.skeleton.edges[e].a, c.skeleton.edges[e].b)
                        for e in pe.edges
                    )


def test_tau_ordering_is_topological():
    for g in (path_graph(5), path_graph(7), gen_random(8, 11, 2, seed=42)):
        c = build_carcass(g)
        for grp in c.tau:
            cm = c._canon_part(c.skeleton.cut_partition(grp.cut_key))
            ta, tb = c.tights[cm]
            from steinercut.graph import contract, set_of

            h, mapping = contract(g, [set_of(ta), set_of(tb)])
            s_new = mapping[(ta & -ta).bit_length() - 1]
            t_new = mapping[(tb & -tb).bit_length() - 1]
            dag = build_pq_dag(h, 1 << s_new, 1 << t_new)
            pos = []
            for ui in grp.order:
                nodes = {dag.node_of[mapping[v]] for v in set_of(c.units[ui])}
                assert len(nodes) == 1
                pos.append(dag.topo_index[nodes.pop()])
            assert pos == sorted(pos)


def test_nearest_mincut_consistency_across_shared_edges():
    # membership in the nearest side-mincut agrees for any two bunches on
    # the shared projection path
    for trial in range(15):
        g = gen_random(7 + trial % 3, 9 + trial % 5, 2, seed=910 + trial)
        c = build_carcass(g)
        from steinercut.sensitivity import BunchClosures, _bunch_key_for_edge

        closures = BunchClosures(c)
        for mu in range(len(c.units)):
            for nu in range(len(c.units)):
                if mu == nu or not (c.stretched[mu] and c.stretched[nu]):
                    continue
                shared = c.pi[mu].edges & c.pi[nu].edges
                if len(shared) < 2:
                    continue
                keys = {_bunch_key_for_edge(c, f) for f in shared}
                answers = set()
                path_nodes = c._path_from_edges(frozenset(shared))
                for key in keys:
                    side = c.skeleton.node_in_cut_side(key, path_nodes.a)
                    answers.add(closures.member(key, side, mu, nu))
                assert len(answers) == 1, (trial, mu, nu)


def test_skeleton_degree_bound():
    for name, g in canonical_graphs().items():
        c = build_carcass(g)
        total = 2 * len(c.skeleton.edges)
        assert total <= 6 * len(g.steiner), name
