import pickle
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustlink.graph import (
    Graph,
    NodePair,
    common_neighbors,
    degree,
    delete_edges,
    read_edge_list,
    read_graph,
    two_hop_affected_pairs,
    write_edge_list,
    write_id_map,
)
from robustlink.metrics import MetricKind, similarity

from conftest import random_graph, to_nx


def test_nodepair_is_canonical():
    assert NodePair(3, 1) == NodePair(1, 3) == (1, 3)
    assert NodePair(3, 1).a == 1 and NodePair(3, 1).b == 3
    assert hash(NodePair(5, 2)) == hash((2, 5))
    assert NodePair(1, 4).other(4) == 1


@pytest.mark.parametrize("u,v", [(2, 2), (-1, 3)])
def test_nodepair_rejects_bad_input(u, v):
    with pytest.raises(ValueError):
        NodePair(u, v)


def test_nodepair_pickles():
    p = NodePair(7, 2)
    assert pickle.loads(pickle.dumps(p)) == p
    assert type(pickle.loads(pickle.dumps(p))) is NodePair


def test_degree_examples(path3, k4):
    assert degree(path3, 1) == 2
    assert degree(Graph(3, [(0, 1)]), 2) == 0
    k5 = Graph(5, [(u, v) for u in range(5) for v in range(u + 1, 5)])
    assert all(degree(k5, u) == 4 for u in range(5))


def test_degree_invalid_node(path3):
    with pytest.raises(ValueError):
        degree(path3, 3)


def test_common_neighbors_examples(path3, k4):
    assert common_neighbors(path3, 0, 2) == [1]
    assert common_neighbors(Graph(4, [(0, 1), (2, 3)]), 0, 3) == []
    assert common_neighbors(k4, 0, 1) == [2, 3]


def test_common_neighbors_same_node(k4):
    with pytest.raises(ValueError):
        common_neighbors(k4, 2, 2)


def test_graph_rejects_self_loop():
    with pytest.raises(ValueError):
        Graph(3, [(1, 1)])


def test_delete_edges_examples():
    tri = Graph(3, [(0, 1), (1, 2), (0, 2)])
    assert delete_edges(tri, {NodePair(0, 2)}) == Graph(3, [(0, 1), (1, 2)])
    assert delete_edges(tri, set()) == tri
    path = Graph(3, [(0, 1), (1, 2)])
    assert delete_edges(path, {NodePair(0, 2)}) == path
    # the input is untouched
    assert tri.num_edges == 3


def test_two_hop_examples():
    # x=0, y=1 with common neighbor 2; 2 also touches 3; 4-5 is far away
    g = Graph(6, [(0, 2), (1, 2), (2, 3), (4, 5)])
    cand = [NodePair(0, 1)]
    assert two_hop_affected_pairs(g, (4, 5), cand) == []
    assert two_hop_affected_pairs(g, (0, 2), cand) == cand
    assert two_hop_affected_pairs(g, (2, 3), cand) == cand
    before = similarity(MetricKind.ADAMIC_ADAR, g, 0, 1)
    after = similarity(MetricKind.ADAMIC_ADAR, g.delete_edges([(2, 3)]), 0, 1)
    assert before != after


def test_components_and_subgraph():
    g = Graph(6, [(0, 1), (1, 2), (3, 4)])
    assert g.components() == [[0, 1, 2], [3, 4], [5]]
    sub = g.subgraph([1, 2, 4])
    assert sub.n == 3 and list(sub.edges()) == [(0, 1)]


def test_relabel_preserves_structure():
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    h = g.relabel([3, 2, 1, 0])
    assert sorted(h.degrees()) == sorted(g.degrees())
    assert h.has_edge(0, 1) and h.has_edge(2, 3)


def test_edge_list_roundtrip(tmp_path):
    src = tmp_path / "in.txt"
    src.write_text("# comment\n10 20\n20 30\n30 30\n20 10\n\n7 10\n", encoding="utf-8")
    g, ids = read_edge_list(src)
    assert ids == [7, 10, 20, 30]
    assert sorted(g.edges()) == [(0, 1), (1, 2), (2, 3)]
    out = tmp_path / "out.edges"
    write_edge_list(out, g.edges(), header=f"nodes: {g.n}")
    assert read_graph(out) == g
    write_id_map(tmp_path / "ids.txt", ids)
    assert (tmp_path / "ids.txt").read_text().splitlines()[1] == "0 7"


def test_edge_list_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 x\n")
    with pytest.raises(ValueError, match="integers"):
        read_edge_list(bad)


def test_matches_networkx_on_random_graphs():
    import networkx as nx

    rng = random.Random(3)
    for _ in range(50):
        g = random_graph(rng, 25)
        h = to_nx(g)
        for u in range(g.n):
            assert g.degree(u) == h.degree(u)
        for _ in range(10):
            u, v = rng.sample(range(g.n), 2)
            assert g.common_neighbors(u, v) == sorted(nx.common_neighbors(h, u, v))
        assert sorted(map(sorted, g.components())) == sorted(
            sorted(c) for c in nx.connected_components(h)
        )


graphs = st.integers(min_value=2, max_value=14).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.sets(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]),
            max_size=40,
        ),
    )
)


@settings(max_examples=150, deadline=None)
@given(graphs, st.data())
def test_graph_invariants(drawn, data):
    n, edges = drawn
    g = Graph(n, edges)
    u = data.draw(st.integers(0, n - 1))
    v = data.draw(st.integers(0, n - 1).filter(lambda x: x != u))
    assert g.common_neighbors(u, v) == g.common_neighbors(v, u)
    assert len(g.common_neighbors(u, v)) <= min(g.degree(u), g.degree(v))
    for a in range(n):
        for b in g.neighbors(a):
            assert a in g.neighbors(b)
    removed = data.draw(st.lists(st.sampled_from(sorted(edges)), max_size=5)) if edges else []
    h = g.delete_edges(removed)
    gone = {NodePair(*e) for e in removed}
    for a in range(n):
        lost = sum(1 for e in gone if a in e)
        assert h.degree(a) == g.degree(a) - lost


@settings(max_examples=150, deadline=None)
@given(graphs, st.data())
def test_excluded_pairs_keep_similarity(drawn, data):
    n, edges = drawn
    if not edges:
        return
    g = Graph(n, edges)
    e = data.draw(st.sampled_from(sorted(edges)))
    cands = [NodePair(a, b) for a in range(n) for b in range(a + 1, n)]
    affected = set(two_hop_affected_pairs(g, e, cands))
    h = g.delete_edges([e])
    for pair in cands:
        if pair in affected:
            continue
        for m in MetricKind:
            assert similarity(m, g, *pair) == similarity(m, h, *pair)
