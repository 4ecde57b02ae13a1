import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steinercut.errors import (
    EmptySideError,
    FullSideError,
    OverlappingGroupsError,
    SelfLoopError,
    UnknownEdgeIdError,
)
from steinercut.graph import (
    MultiGraph,
    capacity,
    classify_cut,
    contract,
    read_graph,
    surgery,
    write_graph,
)

from corpus import k4, path3, triangle, two_parallel


def test_capacity_examples():
    assert capacity(triangle(), {0}) == 2
    assert capacity(two_parallel(), {0}) == 2
    # K4, side {0,1}: edges 02,03,12,13 cross
    assert capacity(k4(), {0, 1}) == 4


def test_capacity_side_validation():
    g = triangle()
    with pytest.raises(EmptySideError):
        capacity(g, set())
    with pytest.raises(FullSideError):
        capacity(g, {0, 1, 2})


def test_classify_cut():
    info = classify_cut(triangle(), {0})
    assert info.steiner
    g = path3()
    info = classify_cut(g, {0, 2})
    assert not info.steiner
    info = classify_cut(k4(), {0, 1})
    assert info.subdivides({1, 2})
    assert info.separates(0, 2)
    assert not info.separates(0, 1)


def test_surgery():
    g = two_parallel()
    h = surgery(g, remove=[0, 1])
    assert h.edge_count == 0  # disconnection is representable

    g = path3()
    h = surgery(g, add=[(0, 2), (0, 2)])
    assert h.edge_count == 4

    g = k4()
    h = surgery(g, remove=[0, 5])  # (0,1) and (2,3)
    degs = [0] * 4
    for _, u, v in h.edges:
        degs[u] += 1
        degs[v] += 1
    assert degs == [2, 2, 2, 2]

    with pytest.raises(UnknownEdgeIdError):
        surgery(g, remove=[99])
    with pytest.raises(SelfLoopError):
        surgery(g, add=[(1, 1)])


def test_contract():
    g = path3()
    h, mapping = contract(g, [{0, 1}])
    assert h.vertex_count == 2 and h.edge_count == 1
    assert mapping[0] == mapping[1] != mapping[2]

    h, _ = contract(k4(), [{0, 1}])
    assert h.vertex_count == 3 and h.edge_count == 5

    h, mapping = contract(k4(), [])
    assert h.vertex_count == 4 and h.edge_count == 6
    assert mapping == [0, 1, 2, 3]

    with pytest.raises(OverlappingGroupsError):
        contract(k4(), [{0, 1}, {1, 2}])


def test_contract_keeps_edge_ids():
    g = k4()
    h, _ = contract(g, [{0, 1}])
    kept = {eid for eid, _, _ in h.edges}
    assert kept == {1, 2, 3, 4, 5}  # edge 0 = (0,1) became a loop


def test_text_format_roundtrip():
    g = MultiGraph.build(4, [(0, 1), (0, 1), (1, 2), (2, 3)], [0, 3])
    text = write_graph(g)
    h = read_graph(text)
    assert h.vertex_count == g.vertex_count
    assert [(u, v) for _, u, v in h.edges] == [(u, v) for _, u, v in g.edges]
    assert h.steiner == g.steiner


def test_text_format_comments_and_parallel():
    text = "# demo\n3 3 2\n0 2\n0 1\n0 1  # parallel\n1 2\n"
    g = read_graph(text)
    assert g.edge_count == 3
    assert capacity(g, {0}) == 2


@st.composite
def graphs(draw):
    n = draw(st.integers(min_value=2, max_value=7))
    m = draw(st.integers(min_value=n - 1, max_value=n + 6))
    edges = [
        (draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1)))
        for _ in range(m)
    ]
    edges = [(u, v) for u, v in edges if u != v]
    # spanning path keeps it connected
    edges += [(i, i + 1) for i in range(n - 1)]
    k = draw(st.integers(2, n))
    return MultiGraph.build(n, edges, range(k))


@given(graphs(), st.data())
@settings(max_examples=60, deadline=None)
def test_capacity_complement_symmetric(g, data):
    side = data.draw(
        st.sets(st.integers(0, g.vertex_count - 1), min_size=1,
                max_size=g.vertex_count - 1)
    )
    if len(side) == g.vertex_count:
        return
    comp = set(range(g.vertex_count)) - side
    assert capacity(g, side) == capacity(g, comp)


@given(graphs(), st.data())
@settings(max_examples=60, deadline=None)
def test_submodularity(g, data):
    n = g.vertex_count
    a = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    b = data.draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1))
    corners = [a & b, a | b, a - b, b - a]
    if any(not c or len(c) == n for c in corners):
        return
    ca, cb = capacity(g, a), capacity(g, b)
    assert ca + cb >= capacity(g, a & b) + capacity(g, a | b)
    assert ca + cb >= capacity(g, a - b) + capacity(g, b - a)


@given(graphs())
@settings(max_examples=40, deadline=None)
def test_surgery_reversal_preserves_cuts(g):
    removed = [eid for eid, _, _ in g.edges[:2]]
    pairs = [g.endpoints(e) for e in removed]
    h = surgery(surgery(g, remove=removed), add=pairs)
    for side in range(1, 1 << (g.vertex_count - 1)):
        mask = side << 1 or 1
        mask = side
        if mask == 0 or mask == g.full_mask():
            continue
        assert capacity(g, mask) == capacity(h, mask)
