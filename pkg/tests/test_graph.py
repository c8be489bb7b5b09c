import io
import math
import random

import pytest

from cyclenum import (
    EdgeListParseError,
    TemporalGraph,
    TimeWindow,
    dump_edge_list,
    enumerate_all,
    load_edge_list,
    window_view,
)
from cyclenum.synthetic import random_graph, window_example

from oracles import oracle_simple_cycles


def triples(g):
    return [(e.src, e.dst, e.ts) for e in g.edges]


def test_load_two_edges():
    g = load_edge_list("0 1 2\n1 0 7")
    assert (g.vertex_count, g.edge_count) == (2, 2)
    assert [(d, t) for d, t, _ in g.out_adjacency(0)] == [(1, 2)]
    assert [(d, t) for d, t, _ in g.out_adjacency(1)] == [(0, 7)]


def test_edge_ids_follow_timestamps():
    g = load_edge_list("5 9 10\n9 5 3")
    assert g.edge(0).ts == 3
    assert g.labels[g.edge(0).src] == 9
    assert g.edge(1).ts == 10


def test_duplicate_triples_kept():
    g = load_edge_list("0 1 5\n0 1 5\n1 0 6")
    assert g.edge_count == 3
    assert enumerate_all(g, math.inf, "tiernan").count == 2
    assert len(oracle_simple_cycles(triples(g))) == 2


def test_empty_and_comments():
    g = load_edge_list("# header\n% konect\n\n")
    assert (g.vertex_count, g.edge_count) == (0, 0)


def test_delimiter_and_header():
    g = load_edge_list("src,dst,ts\n1,2,3\n2,1,4\n", delimiter=",", has_header=True)
    assert g.edge_count == 2


@pytest.mark.parametrize("text,line", [("0 1\n", 1), ("0 1 2\nx 1 2\n", 2), ("0 1 -1\n", 1)])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(EdgeListParseError, match=f"line {line}"):
        load_edge_list(text)


def test_adjacency_invariants():
    g = random_graph(12, 0.3, seed=3, max_ts=20, multi=3)
    outs, ins = set(), set()
    for v in range(g.vertex_count):
        adj = g.out_adjacency(v)
        assert adj == sorted(adj, key=lambda x: (x[1], x[2]))
        outs.update(eid for _, _, eid in adj)
        ins.update(eid for _, _, eid in g.in_adjacency(v))
    assert outs == ins == set(range(g.edge_count))
    keys = [(e.ts, i) for i, e in enumerate(g.edges)]
    assert keys == sorted(keys)


def test_window_view_filters_by_brute_force():
    g = random_graph(10, 0.4, seed=11, max_ts=30, multi=2)
    rng = random.Random(0)
    for _ in range(30):
        a = rng.randint(0, 30)
        w = TimeWindow(a, a + rng.randint(0, 10))
        view = window_view(g, w)
        for v in range(g.vertex_count):
            got = list(view.neighbors(v))
            want = [x for x in g.out_adjacency(v) if w.start <= x[1] <= w.end]
            assert got == want


def test_full_window_is_identity():
    g = random_graph(8, 0.3, seed=2, max_ts=9)
    view = window_view(g, TimeWindow(0, g.max_timestamp))
    assert list(view.edge_ids()) == list(range(g.edge_count))


def test_empty_window():
    g = window_example()
    view = window_view(g, TimeWindow(100, 200))
    assert len(view.edge_ids()) == 0


def test_window_start_after_end_rejected():
    with pytest.raises(ValueError):
        TimeWindow(5, 4)


def test_window_example_views():
    g = window_example()
    for (a, b), want in {(2, 7): 1, (10, 15): 2}.items():
        sub = [e for e in g.edges if a <= e.ts <= b]
        gw = TemporalGraph.from_edges([(e.src, e.dst, e.ts) for e in sub], g.vertex_count)
        assert enumerate_all(gw, math.inf, "johnson").count == want


def test_round_trip():
    g = load_edge_list("10 20 5\n20 30 1\n30 10 9\n10 20 5\n")
    h = load_edge_list(io.StringIO(dump_edge_list(g)))

    def labelled(x):
        return [(x.labels[s], x.labels[d], t) for s, d, t in triples(x)]

    assert labelled(h) == labelled(g)
    assert h.edge_count == g.edge_count == 4
