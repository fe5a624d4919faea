from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bccsim.cli import gen_random
from bccsim.graphcore import (
    UNREACHABLE,
    Disconnected,
    DuplicateEdge,
    KTooLarge,
    NodeOutOfRange,
    SelfLoop,
    WeightOutOfRange,
    dijkstra,
    dumps_graph,
    exact_apsp,
    exact_diameter,
    h_hop_distance,
    h_hop_distances,
    hop_diameter,
    int_dijkstra,
    k_closest,
    loads_graph,
    make_graph,
    make_int_graph,
    read_graph,
    write_graph,
)
from oracles import bfs, floyd_warshall, graph_fw, h_hop_table, simple_path_minimum


def path(n, p=1, q=1):
    return make_graph(n, p, [(i, i + 1, q) for i in range(n - 1)])


def test_smallest_graph():
    g = make_graph(2, 1, [(0, 1, 1)])
    assert g.n == 2 and g.m == 1
    assert g.edge_weight(1, 0) == 1


@pytest.mark.parametrize("n, p, edges, err", [
    (3, 1, [(0, 1, 1)], Disconnected),
    (3, 4, [(0, 1, 17), (1, 2, 1)], WeightOutOfRange),
    (2, 4, [(0, 1, 0)], WeightOutOfRange),
    (2, 1, [(0, 0, 1)], SelfLoop),
    (2, 1, [(0, 1, 1), (1, 0, 1)], DuplicateEdge),
    (2, 1, [(0, 2, 1)], NodeOutOfRange),
])
def test_make_graph_rejects(n, p, edges, err):
    with pytest.raises(err):
        make_graph(n, p, edges)


def test_unreachable_is_a_singleton():
    assert type(UNREACHABLE)() is UNREACHABLE
    assert UNREACHABLE != 0


def test_dijkstra_path_and_triangle():
    assert dijkstra(path(3), 0) == [0, 1, 2]
    tri = make_graph(3, 2, [(0, 1, 3), (1, 2, 3), (0, 2, 4)])
    assert dijkstra(tri, 0) == [0, 3, 4]


def test_star_and_single_edge_apsp():
    star = make_graph(5, 1, [(0, v, 1) for v in range(1, 5)])
    d = exact_apsp(star)
    assert all(d[0][v] == 1 for v in range(1, 5))
    assert all(d[u][v] == 2 for u in range(1, 5) for v in range(1, 5) if u != v)
    g = make_graph(2, 3, [(0, 1, 5)])
    assert exact_apsp(g) == [[0, 5], [5, 0]]
    assert exact_diameter(g) == Fraction(5, 3)


def test_cycle_diameter():
    cyc = make_graph(6, 1, [(i, (i + 1) % 6, 1) for i in range(6)])
    assert exact_diameter(cyc) == 3
    assert hop_diameter(cyc) == 3


@pytest.mark.parametrize("seed", range(5))
def test_apsp_matches_path_enumeration(seed):
    g = gen_random(8, 4, 0.4, seed)
    assert exact_apsp(g) == simple_path_minimum(g)


def test_k_closest_ties_and_errors():
    g = path(5)
    assert k_closest(g, 2, 1) == [2]
    assert k_closest(g, 2, 3) == [2, 1, 3]
    with pytest.raises(KTooLarge):
        k_closest(g, 0, 6)


@pytest.mark.parametrize("seed", range(5))
def test_k_closest_matches_sort(seed):
    g = gen_random(10, 4, 0.3, seed)
    d = graph_fw(g)
    for u in range(g.n):
        assert k_closest(g, u, 4) == sorted(range(g.n), key=lambda z: (d[u][z], z))[:4]


def test_h_hop_examples():
    assert h_hop_distance(path(3), 1, 1, 0) == 0
    assert h_hop_distance(path(3), 0, 2, 1) is UNREACHABLE
    # weights are at most p, so weights 1, 1, 3 need p >= 3
    tri = make_graph(3, 3, [(0, 1, 3), (1, 2, 3), (0, 2, 9)])
    assert tri.weight(h_hop_distance(tri, 0, 2, 1)) == 3
    assert tri.weight(h_hop_distance(tri, 0, 2, 2)) == 2


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 9), st.floats(0, 1), st.integers(0, 2**32), st.integers(1, 9))
def test_h_hop_matches_walk_dp(n, density, seed, h):
    g = gen_random(n, 3, density, seed)
    want = h_hop_table(n, g.edges, 0, h)
    got = h_hop_distances(g, 0, h)
    assert [None if x is UNREACHABLE else x for x in got] == want


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.floats(0, 1), st.integers(0, 2**32))
def test_dijkstra_matches_floyd_warshall(n, density, seed):
    g = gen_random(n, 5, density, seed)
    fw = floyd_warshall(n, g.edges)
    assert exact_apsp(g) == fw
    hops = floyd_warshall(n, [(u, v, 1) for u, v, _ in g.edges])
    assert hop_diameter(g) == max(max(row) for row in hops)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 12), st.floats(0, 1), st.integers(0, 2**32))
def test_text_round_trip(n, density, seed):
    g = gen_random(n, 7, density, seed)
    again = loads_graph(dumps_graph(g))
    assert again == g


def test_file_round_trip(tmp_path):
    g = gen_random(6, 3, 0.5, 1)
    write_graph(g, tmp_path / "g.txt")
    assert read_graph(tmp_path / "g.txt") == g


def test_int_dijkstra_cap():
    g = make_int_graph(4, [(0, 1, 2), (1, 2, 2), (2, 3, 2)])
    assert int_dijkstra(g, 0) == {0: 0, 1: 2, 2: 4, 3: 6}
    assert int_dijkstra(g, 0, cap=4) == {0: 0, 1: 2, 2: 4}
    assert bfs(4, g.edges, 0) == {0: 0, 1: 1, 2: 2, 3: 3}
