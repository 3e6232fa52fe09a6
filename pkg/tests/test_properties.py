import math
import random
from itertools import combinations, permutations

import networkx as nx
import pytest

from halfrandom.errors import InvalidArgument, UnsupportedSize
from halfrandom.graph_core import (SimpleGraph, complete_graph, cycle_graph, num_edges, petersen_graph,
                                   random_gnm, star_graph)
from halfrandom.properties import (CONNECTED, HAMILTONIAN, HalfExpanderParams, PropertyId, check_property,
                                   cut_edge_count, expansion_stats, hamilton_connected_backtrack,
                                   hamilton_connected_dp, hamilton_cycle, hamilton_path, hamiltonian_backtrack,
                                   hamiltonian_dp, is_half_expander, is_hamilton_cycle, is_k_connected,
                                   violates)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.pairs())
    return h


def brute_hamiltonian(g):
    n = g.n
    if n < 3:
        return False
    return any(all(g.has_edge(c[i], c[(i + 1) % n]) for i in range(n))
               for c in ((0,) + p for p in permutations(range(1, n))))


def brute_ham_path(g, s, t):
    rest = [v for v in range(g.n) if v not in (s, t)]
    for p in permutations(rest):
        seq = (s,) + p + (t,)
        if all(g.has_edge(seq[i], seq[i + 1]) for i in range(len(seq) - 1)):
            return True
    return False


def brute_nbhd(g, xs):
    return {y for x in xs for y in g.adj[x]}


def brute_half_expander(g, lam, r):
    """Literal reading of the three conditions by full enumeration."""
    n = g.n
    verts = range(n)
    for size in range(1, n + 1):
        for xs in combinations(verts, size):
            nb = len(brute_nbhd(g, xs))
            if size <= lam * n / r + 1e-9 and nb < r * size:
                return False
            if size >= n / (lam * r) - 1e-9 and nb < (0.5 - lam) * n:
                return False
    lo = max(1, math.ceil((0.5 - lam ** 0.2) * n - 1e-9))
    for sx in range(lo, n + 1):
        for xs in combinations(verts, sx):
            others = [v for v in verts if v not in xs]
            for sy in range(lo, len(others) + 1):
                for ys in combinations(others, sy):
                    ys = set(ys)
                    if sum(1 for x in xs for y in g.adj[x] if y in ys) <= 2 * n:
                        return False
    return True


def k4_minus_edge():
    return SimpleGraph.from_pairs(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])


# -- property ids --------------------------------------------------------------

def test_property_parse_roundtrip():
    for text in ["min_degree:2", "connected", "k_connected:3", "hamiltonian", "hamilton_connected"]:
        assert str(PropertyId.parse(text)) == text


@pytest.mark.parametrize("text", ["min_degree", "min_degree:0", "connected:2", "planar", "k_connected:x"])
def test_property_parse_errors(text):
    with pytest.raises(InvalidArgument):
        PropertyId.parse(text)


# -- spec examples ---------------------------------------------------------------

def test_check_property_examples():
    assert check_property(cycle_graph(5), HAMILTONIAN)
    assert not check_property(star_graph(4), HAMILTONIAN)
    assert not check_property(petersen_graph(), HAMILTONIAN)
    assert check_property(cycle_graph(6), PropertyId("k_connected", 2))
    assert not check_property(cycle_graph(6), PropertyId("k_connected", 3))
    assert not check_property(k4_minus_edge(), PropertyId("hamilton_connected"))
    assert check_property(complete_graph(5), PropertyId("hamilton_connected"))


def test_petersen_oracles_agree():
    p = petersen_graph()
    assert not brute_hamiltonian(p)
    assert not hamiltonian_backtrack(p)
    # Petersen minus a vertex is Hamiltonian-path rich but the graph is hypohamiltonian
    q = p.without_vertices([0]).induced(range(1, 10))
    assert not nx.is_empty(to_nx(q))


def test_k4_minus_edge_pairs():
    g = k4_minus_edge()
    ok = {(s, t): brute_ham_path(g, s, t) for s in range(4) for t in range(s + 1, 4)}
    assert not all(ok.values())
    assert hamilton_connected_dp(g) is False
    assert hamilton_connected_backtrack(g) is False


def test_hamiltonian_limit():
    g = complete_graph(21)
    with pytest.raises(UnsupportedSize):
        check_property(g, HAMILTONIAN)
    assert check_property(g, HAMILTONIAN, backtracking=True)


def test_dp_matches_brute_force():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(3, 8)
        g = random_gnm(n, rng.randint(n - 1, num_edges(n)), rng)
        assert hamiltonian_dp(g) == brute_hamiltonian(g)


def test_hamilton_connected_matches_brute_force():
    rng = random.Random(8)
    for _ in range(100):
        n = rng.randint(3, 7)
        g = random_gnm(n, rng.randint(n, num_edges(n)), rng)
        ref = all(brute_ham_path(g, s, t) for s in range(n) for t in range(s + 1, n))
        assert hamilton_connected_dp(g) == ref
        assert hamilton_connected_backtrack(g) == ref


def test_dp_matches_backtracking_n12():
    rng = random.Random(9)
    for _ in range(300):
        n = rng.randint(3, 12)
        g = random_gnm(n, rng.randint(n, min(num_edges(n), 3 * n)), rng)
        assert hamiltonian_dp(g) == hamiltonian_backtrack(g)


def test_found_cycles_and_paths_verify():
    rng = random.Random(10)
    for _ in range(100):
        n = rng.randint(4, 30)
        g = random_gnm(n, rng.randint(min(2 * n, num_edges(n)), min(num_edges(n), 5 * n)), rng)
        c = hamilton_cycle(g)
        if c is not None:
            assert is_hamilton_cycle(g, c)
        s, t = rng.sample(range(n), 2)
        p = hamilton_path(g, s, t)
        if p is not None:
            assert p[0] == s and p[-1] == t and sorted(p) == list(range(n))
            assert all(g.has_edge(x, y) for x, y in zip(p, p[1:]))


def test_hamilton_path_allowed_subset():
    g = cycle_graph(8)
    assert hamilton_path(g, 0, 3, allowed=[0, 1, 2, 3]) == [0, 1, 2, 3]
    assert hamilton_path(g, 0, 3, allowed=[0, 1, 3]) is None


def test_dense_backtracking_fast():
    rng = random.Random(11)
    g = random_gnm(60, 600, rng)
    c = hamilton_cycle(g, budget=10)
    assert c is not None and is_hamilton_cycle(g, c)


def test_is_hamilton_cycle_rejects():
    g = cycle_graph(5)
    assert is_hamilton_cycle(g, [0, 1, 2, 3, 4])
    assert not is_hamilton_cycle(g, [0, 2, 1, 3, 4])
    assert not is_hamilton_cycle(g, [0, 1, 2, 3])
    assert not is_hamilton_cycle(g, [0, 1, 2, 3, 3])


# -- connectivity ----------------------------------------------------------------

def test_k_connectivity_matches_networkx():
    rng = random.Random(12)
    for _ in range(200):
        n = rng.randint(2, 14)
        g = random_gnm(n, rng.randint(0, num_edges(n)), rng)
        conn = nx.node_connectivity(to_nx(g)) if n > 1 else 0
        for k in (1, 2, 3, 4):
            expected = n >= k + 1 and conn >= k
            assert is_k_connected(g, k) == expected, (g.pairs(), k)


def test_k_connected_needs_more_than_k_vertices():
    assert not is_k_connected(complete_graph(3), 3)
    assert is_k_connected(complete_graph(4), 3)


def test_implications_on_random_corpus():
    rng = random.Random(13)
    for _ in range(300):
        n = rng.randint(3, 10)
        g = random_gnm(n, rng.randint(0, num_edges(n)), rng)
        ham = check_property(g, HAMILTONIAN)
        conn = check_property(g, CONNECTED)
        assert check_property(g, PropertyId("k_connected", 1)) == conn
        if ham:
            assert conn and check_property(g, PropertyId("min_degree", 2))
        if conn:
            assert check_property(g, PropertyId("min_degree", 1))


# -- cuts and half-expanders ----------------------------------------------------

def test_cut_edge_count_examples():
    g = cycle_graph(4)
    assert cut_edge_count(g, range(4)) == 0
    assert cut_edge_count(g, [2]) == g.degree(2)
    assert cut_edge_count(g, [0, 1]) == 2


def test_half_expander_examples():
    # property 1 covers |X| <= lambda n / r, which needs n >= 20 to include singletons
    g = SimpleGraph.from_pairs(20, complete_graph(19).pairs())   # vertex 19 isolated
    v = is_half_expander(g, HalfExpanderParams(0.1, 2))
    assert not v.passed and v.violated_property == 1
    assert set(v.witness[0]) == {19}
    v = is_half_expander(SimpleGraph(20), HalfExpanderParams(0.1, 2))
    assert not v.passed and v.violated_property == 1


def test_half_expander_exact_matches_enumeration():
    rng = random.Random(14)
    for _ in range(60):
        n = rng.randint(3, 7)
        g = random_gnm(n, rng.randint(0, num_edges(n)), rng)
        lam = rng.choice([0.05, 0.2, 0.3, 0.45])
        r = rng.choice([0.5, 1.0, 1.2, 2.0])
        v = is_half_expander(g, HalfExpanderParams(lam, r))
        assert v.passed == brute_half_expander(g, lam, r), (g.pairs(), lam, r)
        if not v.passed:
            assert violates(g, HalfExpanderParams(lam, r), v)


def test_half_expander_exact_size_limit():
    with pytest.raises(UnsupportedSize):
        is_half_expander(SimpleGraph(23), HalfExpanderParams(0.1, 2))


def test_half_expander_sampler_agrees_g12_40():
    rng = random.Random(15)
    params = HalfExpanderParams(0.3, 1.2)
    for _ in range(30):
        g = random_gnm(12, 40, rng)
        exact = is_half_expander(g, params)
        sampled = is_half_expander(g, params, mode="sampled", samples=300, rng=rng)
        assert sampled.passed == exact.passed
        if not sampled.passed:
            assert violates(g, params, sampled)


def test_half_expander_monotone_under_edge_addition():
    rng = random.Random(16)
    for _ in range(40):
        n = rng.randint(4, 10)
        g = random_gnm(n, rng.randint(0, num_edges(n) - 1), rng)
        params = HalfExpanderParams(rng.choice([0.01, 0.1, 0.3]), rng.choice([0.5, 1.0, 2.0]))
        before = is_half_expander(g, params).passed
        h = g.copy()
        h.add_edge_id(rng.choice([e for e in range(num_edges(n)) if e not in g.edges]))
        if before:
            assert is_half_expander(h, params).passed


def test_expansion_stats_complete_graph(rng):
    s = expansion_stats(complete_graph(10), rng, 50)
    assert s.small_set_min_ratio >= 9 / 10


def test_expansion_stats_edgeless(rng):
    s = expansion_stats(SimpleGraph(10), rng, 50)
    assert s.small_set_min_ratio == 0


def test_expansion_stats_gnm_500_calibration():
    # The minimum sampled neighbourhood ratio should beat m/8n on at least 99%
    # of sampled graphs. At this density the graph keeps many isolated vertices,
    # so a sampled set that happens to be isolated drives the ratio to zero.
    n = 500
    m = round(0.05 * n * math.log(n) * math.log(math.log(n)))
    rng = random.Random(17)
    good = 0
    for _ in range(200):
        g = random_gnm(n, m, rng)
        s = expansion_stats(g, rng, 200)
        good += s.small_set_min_ratio > s.small_set_bound
    assert good >= 198, f"{good}/200 graphs beat m/8n"
