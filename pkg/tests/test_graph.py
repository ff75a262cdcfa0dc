import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_

from conftest import build
from homocycle.errors import GraphFormatError, InadmissibleGraphError
from homocycle.graph import (
    MultiGraph,
    Edge,
    change_of_basis,
    fundamental_cycle,
    homology_labeling,
    oriented_double,
    parse_graph,
    require_admissible,
    validate_graph,
)
from homocycle.lengths import ExactLength
from homocycle.reference import figure_one, rose, two_loop


def doc(vertices, edges):
    return json.dumps({"vertices": vertices, "edges": edges})


def test_parse_rose2():
    g = parse_graph(doc(["v"], [{"id": "a", "ends": ["v", "v"], "length": 1},
                                {"id": "b", "ends": ["v", "v"], "length": 1}]))
    assert (g.n, g.m) == (1, 2)
    assert len(g.source_hash) == 64


def test_parse_figure1_keeps_order():
    g = parse_graph(doc(["X", "Y", "Z"], [
        {"ends": ["X", "X"], "length": 1}, {"ends": ["X", "Y"], "length": 1},
        {"ends": ["Y", "Z"], "length": 1}, {"ends": ["Z", "X"], "length": 1}]))
    assert (g.n, g.m) == (3, 4)
    assert [e.id for e in g.edges] == ["e1", "e2", "e3", "e4"]


def test_decimal_lengths_are_exact():
    g = parse_graph(doc(["v"], [{"ends": ["v", "v"], "length": 1.1}]))
    assert g.edges[0].length == ExactLength(Fraction(11, 10))


def test_symbolic_length():
    g = parse_graph(doc(["v"], [{"ends": ["v", "v"], "length": {"q0": "1/2", "q3": "1/2"}}]))
    assert abs(float(g.edges[0].length) - (1 + 5 ** 0.5) / 2) < 1e-15


@pytest.mark.parametrize(
    "edges, message",
    [
        ([{"ends": ["v", "v"], "length": 0}], "non-positive length"),
        ([{"ends": ["v", "v"], "length": -1}], "non-positive length"),
        ([{"ends": ["v", "v"]}], "missing length"),
        ([{"ends": ["v", "w"], "length": 1}], "dangling endpoint"),
        ([{"ends": ["v"], "length": 1}], "two vertices"),
        ([{"id": "x", "ends": ["v", "v"], "length": 1}, {"id": "x", "ends": ["v", "v"], "length": 1}],
         "duplicate edge id"),
    ],
)
def test_parse_errors(edges, message):
    with pytest.raises(GraphFormatError, match=message):
        parse_graph(doc(["v"], edges))


def test_parse_malformed_json():
    with pytest.raises(GraphFormatError):
        parse_graph("{not json")
    with pytest.raises(GraphFormatError):
        parse_graph('{"vertices": ["v"], "edges": [{"ends": ["v","v"], "length": NaN}]}')


def test_validate_examples():
    r = validate_graph(rose([1, 1]))
    assert (r.connected, r.bipartite, r.b) == (True, False, 2)
    two_cycle = MultiGraph(("X", "Y"), (Edge("a", ("X", "Y"), ExactLength(1)),
                                        Edge("b", ("X", "Y"), ExactLength(1))))
    assert validate_graph(two_cycle).bipartite
    split = MultiGraph(("X", "Y"), (Edge("a", ("X", "X"), ExactLength(1)),
                                    Edge("b", ("Y", "Y"), ExactLength(1))))
    assert not validate_graph(split).connected
    with pytest.raises(InadmissibleGraphError, match="bipartite"):
        require_admissible(two_cycle)
    with pytest.raises(InadmissibleGraphError, match="disconnected"):
        require_admissible(split)


def test_tree_rejected():
    path = MultiGraph(("X", "Y"), (Edge("a", ("X", "Y"), ExactLength(1)),))
    with pytest.raises(InadmissibleGraphError, match="trivial homology"):
        homology_labeling(path, oriented_double(path))


def test_oriented_double_rose():
    st = oriented_double(rose([1, 1]))
    assert st.size == 4
    assert set(st.initial) == set(st.terminal) == {0}


def test_oriented_double_figure1_out_sets():
    st = oriented_double(figure_one())
    out = {v: {s + 1 for s in st.out_symbols(v)} for v in range(3)}
    assert out == {0: {1, 2, 3, 8}, 1: {4, 5}, 2: {6, 7}}


def test_symbol_conventions(fig1):
    st = fig1.st
    assert st.reverse[2] == 3  # 1-based: reverse(3) = 4
    for s in range(st.size):
        r = st.reverse[s]
        assert st.reverse[r] == s
        assert st.lengths[s] == st.lengths[r]
        assert st.initial[s] == st.terminal[r]


def test_labeling_rose2(rose2):
    assert rose2.hl.f.tolist() == [[1, 0], [-1, 0], [0, 1], [0, -1]]
    assert rose2.hl.walk_class([0, 1]) == (0, 0)


def test_labeling_two_loop(twoloop):
    hl = twoloop.hl
    assert hl.tree == frozenset({1})
    assert hl.f.tolist() == [[1, 0], [-1, 0], [0, 0], [0, 0], [0, 1], [0, -1]]
    assert hl.walk_class([2, 4]) == (0, 1)  # e2 forward then e3 forward


def test_fundamental_cycles_are_unit_classes(fig1):
    for k in range(fig1.hl.b):
        w = fundamental_cycle(fig1.st, fig1.hl, k)
        assert fig1.st.is_closed_walk(w)
        assert fig1.hl.walk_class(w) == tuple(int(i == k) for i in range(fig1.hl.b))


def test_change_of_basis_unimodular():
    g = figure_one()
    a = build(g)
    b = build(g, tree_edges=[2, 3])  # tree {e3, e4}
    U = change_of_basis(a.st, a.hl, b.hl)
    assert round(abs(np.linalg.det(U))) == 1
    rng = np.random.default_rng(0)
    for _ in range(50):
        w = random_closed_walk(a.st, rng, 9)
        assert tuple(U @ np.array(a.hl.walk_class(w))) == b.hl.walk_class(w)


def random_closed_walk(st, rng, n):
    """``n`` random steps, then a shortest path back to the start vertex."""
    w = [int(rng.integers(st.size))]
    for _ in range(n - 1):
        choices = [t for t in range(st.size) if st.initial[t] == st.terminal[w[-1]]]
        w.append(int(rng.choice(choices)))
    home = int(st.initial[w[0]])
    prev = {int(st.terminal[w[-1]]): None}
    frontier = list(prev)
    while home not in prev:
        nxt = []
        for v in frontier:
            for t in st.out_symbols(v):
                y = int(st.terminal[t])
                if y not in prev:
                    prev[y] = t
                    nxt.append(y)
        frontier = nxt
    back = []
    v = home
    while prev[v] is not None:
        t = prev[v]
        back.append(t)
        v = int(st.initial[t])
    w += back[::-1]
    assert st.is_closed_walk(w)
    return w


@st_.composite
def connected_multigraphs(draw):
    n = draw(st_.integers(1, 5))
    edges = []
    for v in range(1, n):  # random spanning tree keeps it connected
        edges.append((draw(st_.integers(0, v - 1)), v))
    extra = draw(st_.integers(1, 5))
    for _ in range(extra):
        edges.append((draw(st_.integers(0, n - 1)), draw(st_.integers(0, n - 1))))
    order = draw(st_.permutations(range(len(edges))))
    edges = [edges[i] for i in order]
    return MultiGraph(tuple(range(n)), tuple(
        Edge(f"e{i}", e, ExactLength(draw(st_.integers(1, 3)))) for i, e in enumerate(edges)))


@settings(max_examples=60, deadline=None)
@given(connected_multigraphs(), st_.integers(0, 2**32 - 1))
def test_labeling_properties(g, seed):
    st = oriented_double(g)
    hl = homology_labeling(g, st)
    # b against the rank of the cycle space over Q
    inc = np.zeros((g.n, g.m))
    for i, e in enumerate(g.edges):
        a, c = e.ends
        inc[a, i] -= 1
        inc[c, i] += 1
    rank = np.linalg.matrix_rank(inc) if g.m else 0
    assert hl.b == g.m - g.n + 1 == g.m - rank
    for s in range(st.size):
        assert (hl.f[s] + hl.f[st.reverse[s]] == 0).all()
        if st.edge[s] in hl.tree:
            assert not hl.f[s].any()
        else:
            assert np.abs(hl.f[s]).sum() == 1
    rng = np.random.default_rng(seed)
    w = random_closed_walk(st, rng, int(rng.integers(1, 7)))
    r = int(rng.integers(len(w)))
    assert hl.walk_class(w) == hl.walk_class(w[r:] + w[:r])


def test_document_round_trip():
    g = rose([1, {"q1": 1}])
    g2 = parse_graph(json.dumps(g.to_document()))
    assert g2 == g
