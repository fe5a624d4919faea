import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bccsim.graphcore import loads_graph
from bccsim.lowerbound import (
    DisjointnessInstance,
    IndexOutOfRange,
    InvalidParameter,
    approximation_separates,
    audit_structure,
    bandwidth_audit,
    bit_index_map,
    build_gab,
    disjointness,
    gadget_files,
    k_of_n,
    refined_diameter,
    verify_diameter_gap,
    verify_unweighted_gap,
    witness_pairs,
)
from bccsim.simulator import Mode, NodeProgram, Payload, SimConfig, run
from oracles import bfs, floyd_warshall, graph_fw


def inst(k, a, b):
    return DisjointnessInstance(k, tuple(a), tuple(b))


def instances():
    return st.integers(2, 5).flatmap(lambda k: st.tuples(
        st.just(k),
        st.lists(st.integers(0, 1), min_size=k * k, max_size=k * k),
        st.lists(st.integers(0, 1), min_size=k * k, max_size=k * k),
    )).map(lambda t: inst(*t))


def test_bit_index_map():
    assert bit_index_map(0, 2) == (0, 2)
    assert bit_index_map(3, 2) == (1, 3)
    with pytest.raises(IndexOutOfRange):
        bit_index_map(4, 2)
    assert sorted(bit_index_map(i, 3) for i in range(9)) == [(u, v) for u in range(3) for v in range(3, 6)]


def test_disjointness_examples():
    assert disjointness(inst(2, [0] * 4, [1] * 4)) == 1
    assert disjointness(inst(2, [1, 0, 0, 0], [1, 0, 0, 0])) == 0


@given(instances())
def test_disjointness_matches_bitwise_and(x):
    a = int("".join(map(str, x.a)), 2)
    b = int("".join(map(str, x.b)), 2)
    assert disjointness(x) == int(a & b == 0)


def test_hex_round_trip():
    x = DisjointnessInstance.from_hex(3, "1a5", "042")
    assert DisjointnessInstance.from_hex(3, *x.to_hex()) == x
    assert x.a[0] == 1 and x.a[1] == 0
    with pytest.raises(InvalidParameter):
        DisjointnessInstance.from_hex(2, "1f", "0")


def test_all_zero_gadget_shape():
    g = build_gab(inst(2, [0] * 4, [0] * 4))
    assert g.n == 10
    input_edges = sum(g.graph.edge_weight(f(x), f(y)) is not None
                      for f in (g.l, g.r) for x, y in (bit_index_map(i, 2) for i in range(4)))
    assert input_edges == 8
    assert len(g.cut) == 5
    assert all(g.graph.edge_weight(u, v) == 1 for u, v in g.cut)


@given(instances())
def test_structure_and_cut_separates(x):
    g = build_gab(x)
    assert audit_structure(g, x) == []
    rest = [(u, v) for u, v, _ in g.graph.edges if (u, v) not in set(g.cut)]
    reach = bfs(g.n, rest, g.c_left)
    assert set(reach) == set(g.side_nodes("A"))


def test_invalid_parameters():
    with pytest.raises(InvalidParameter):
        build_gab(inst(1, [0], [0]))
    with pytest.raises(InvalidParameter):
        build_gab(inst(2, [0] * 4, [0] * 4), p=1)
    with pytest.raises(InvalidParameter):
        inst(2, [0] * 3, [0] * 4)


def test_k2_extreme_rows():
    zero = inst(2, [0] * 4, [0] * 4)
    ones = inst(2, [1] * 4, [1] * 4)
    assert verify_diameter_gap(build_gab(zero), zero).observed == Fraction(17, 16)
    assert verify_diameter_gap(build_gab(ones), ones).observed == Fraction(33, 16)
    assert verify_unweighted_gap(build_gab(zero, weighted=False), zero).observed == 2
    assert verify_unweighted_gap(build_gab(ones, weighted=False), ones).observed == 3


def test_disjoint_with_ones_has_diameter_one_plus_two_over_p():
    # a has a single 1; the missing L-side edge forces a detour through R
    x = inst(2, [1, 0, 0, 0], [0, 0, 0, 0])
    report = verify_diameter_gap(build_gab(x), x)
    assert report.disjoint == 1
    assert report.observed == Fraction(18, 16) == report.refined
    assert not report.consistent


@settings(max_examples=60, deadline=None)
@given(instances(), st.integers(2, 40))
def test_refined_dichotomy_against_floyd_warshall(x, p):
    g = build_gab(x, p)
    fw = graph_fw(g.graph)
    D = max(max(row) for row in fw)
    assert D == refined_diameter(x, p)
    assert D <= 2 + Fraction(1, p)
    hops = floyd_warshall(g.n, [(u, v, 1) for u, v, _ in g.graph.edges])
    assert max(max(row) for row in hops) == (2 if disjointness(x) else 3)


def test_witness_pairs():
    x = DisjointnessInstance.random(4, random.Random(2), disjoint=False)
    g = build_gab(x)
    pairs = witness_pairs(g, x)
    assert pairs and any(d == Fraction(33, 16) for _, _, d in pairs)
    assert witness_pairs(build_gab(inst(2, [0] * 4, [1] * 4)), inst(2, [0] * 4, [1] * 4)) == []


@pytest.mark.parametrize("p", [2, 3, 16, 1000])
def test_separation(p):
    assert approximation_separates(p)


def test_k_of_n():
    assert [k_of_n(n) for n in (9, 10, 42, 100)] == [0, 1, 4, 10]


class Shout(NodeProgram):
    def __init__(self, node, n, loud):
        super().__init__(node, n)
        self.loud = loud

    def send(self, rnd):
        return Payload("value", (self.node,)) if self.loud else None

    def receive(self, rnd, inbox):
        self.halted = True


@pytest.mark.parametrize("loud, expect", [(False, 0), (True, 1)])
def test_bandwidth_audit_extremes(loud, expect):
    x = inst(2, [0, 1, 1, 0], [1, 0, 0, 1])
    g = build_gab(x)
    trace = run([Shout(u, g.n, loud) for u in range(g.n)], g.graph, SimConfig(Mode.BCC, 8))
    size = trace.records[0].bits if trace.records else 0
    audit = bandwidth_audit(trace, g)
    assert audit.within_budget
    assert audit.per_round[0]["cut_bits"] == expect * g.n * size
    assert audit.budget == g.n * 8
    # a "value" payload on 10 nodes is exactly 8 bits, so a loud round hits n*B
    assert audit.per_round[0]["cut_bits"] == expect * audit.budget


def test_gadget_files():
    spec = {"k": 2, "p": 16, "a": "5", "b": "a", "weighted": True}
    x, g, text, labels = gadget_files(spec)
    assert loads_graph(text) == g.graph
    doc = json.loads(labels)
    assert doc["side"].count("A") == 5 and doc["role"][4] == "c_L"
    assert x.to_hex() == ("5", "a")
