import random

import networkx as nx
import pytest

from halfrandom.errors import InvalidArgument
from halfrandom.graph_core import (SimpleGraph, UnionFind, complete_graph, connected_components, cycle_graph,
                                   edge_endpoints, edge_index, endpoint_table, format_snapshot, is_connected,
                                   min_degree, num_edges, parse_snapshot, petersen_graph, random_gnm,
                                   star_graph)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.pairs())
    return h


def test_edge_index_examples():
    assert edge_index(0, 1, 5) == 0
    assert edge_index(3, 4, 5) == 9
    assert edge_index(2, 1, 5) == edge_index(1, 2, 5)


def test_edge_endpoints_examples():
    assert edge_endpoints(0, 5) == (0, 1)
    assert edge_endpoints(9, 5) == (3, 4)


def test_roundtrip_n7():
    seen = set()
    for u in range(7):
        for v in range(7):
            if u != v:
                e = edge_index(u, v, 7)
                assert edge_endpoints(e, 7) == (min(u, v), max(u, v))
                seen.add(e)
    assert seen == set(range(21))


def test_bijection_up_to_50():
    for n in range(2, 51):
        # lexicographic enumeration of pairs is the reference order
        expected = [(u, v) for u in range(n) for v in range(u + 1, n)]
        assert [edge_endpoints(e, n) for e in range(num_edges(n))] == expected
        assert [edge_index(u, v, n) for u, v in expected] == list(range(num_edges(n)))
        us, vs = endpoint_table(n)
        assert list(zip(us, vs)) == expected


@pytest.mark.parametrize("args", [(1, 1, 5), (0, 5, 5), (-1, 2, 5)])
def test_edge_index_errors(args):
    with pytest.raises(InvalidArgument):
        edge_index(*args)


@pytest.mark.parametrize("e", [-1, 10, 100])
def test_edge_endpoints_errors(e):
    with pytest.raises(InvalidArgument):
        edge_endpoints(e, 5)


def test_components_examples():
    assert connected_components(SimpleGraph(4)) == [[0], [1], [2], [3]]
    assert connected_components(complete_graph(4)) == [[0, 1, 2, 3]]
    two = SimpleGraph.from_pairs(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    assert sorted(map(len, connected_components(two))) == [3, 3]


def test_min_degree_examples():
    assert min_degree(SimpleGraph(3)) == 0
    assert min_degree(SimpleGraph(0)) == 0
    assert min_degree(cycle_graph(5)) == 2
    assert min_degree(star_graph(4)) == 1


def test_components_match_networkx():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randint(1, 30)
        g = random_gnm(n, rng.randint(0, min(num_edges(n), 40)), rng)
        ours = sorted(sorted(p) for p in connected_components(g))
        ref = sorted(sorted(c) for c in nx.connected_components(to_nx(g)))
        assert ours == ref
        assert is_connected(g) == nx.is_connected(to_nx(g))


def test_adding_edges_updates_degrees_and_components():
    rng = random.Random(2)
    n = 25
    g = SimpleGraph(n)
    parts = n
    for e in rng.sample(range(num_edges(n)), 100):
        u, v = edge_endpoints(e, n)
        du, dv = g.degree(u), g.degree(v)
        g.add_edge_id(e)
        assert (g.degree(u), g.degree(v)) == (du + 1, dv + 1)
        now = len(connected_components(g))
        assert now <= parts
        parts = now
    assert sum(g.degree(v) for v in range(n)) == 2 * g.num_edges()


def test_duplicate_edges_ignored():
    g = SimpleGraph.from_pairs(3, [(0, 1), (1, 0), (0, 1)])
    assert g.num_edges() == 1 and g.degree(0) == 1


def test_union_find():
    uf = UnionFind(5)
    assert uf.union(0, 1) and uf.union(3, 4) and not uf.union(1, 0)
    assert uf.components == 3
    assert uf.find(0) == uf.find(1) != uf.find(3)


def test_petersen_is_cubic():
    p = petersen_graph()
    assert p.num_edges() == 15 and all(p.degree(v) == 3 for v in range(10))
    assert nx.is_isomorphic(to_nx(p), nx.petersen_graph())


def test_snapshot_roundtrip(tmp_path):
    g = random_gnm(12, 20, random.Random(3))
    text = format_snapshot(g)
    assert text.splitlines()[0] == "n 12"
    assert parse_snapshot(text) == g


@pytest.mark.parametrize("text", ["", "x 3\n", "n 3\n0 1 2\n", "n 3\n0 0\n", "n 3\n0 7\n", "n a\n"])
def test_snapshot_errors(text):
    with pytest.raises(InvalidArgument):
        parse_snapshot(text)
