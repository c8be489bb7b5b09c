import math
import random
import warnings

import pytest

from cyclenum import (
    BlockedSet,
    CycleSink,
    SearchStats,
    TemporalGraph,
    TimeWindow,
    UnblockList,
    enumerate_all,
    johnson_from_edge,
    make_engine,
    read_tarjan_from_edge,
    recursive_unblock,
    tiernan_from_edge,
)
from cyclenum.synthetic import fig3a, fig5a, random_graph, window_example, worst_case

from oracles import oracle_simple_cycles

ALGOS = ("tiernan", "johnson", "read_tarjan")
FROM_EDGE = {"tiernan": tiernan_from_edge, "johnson": johnson_from_edge, "read_tarjan": read_tarjan_from_edge}
EVERYTHING = TimeWindow(0, math.inf)


def triples(g):
    return [(e.src, e.dst, e.ts) for e in g.edges]


def run_from_edge(algo, g, e0=0, window=EVERYTHING, track=False):
    sink, stats = CycleSink("collect"), SearchStats(track_vertices=track)
    FROM_EDGE[algo](g.window(window), e0, sink, stats)
    return sink, stats


def b_visits(g, stats, k):
    return sum(stats.vertex_visits.get(g.labels.index(f"b{i}"), 0) for i in range(1, k + 1))


K4 = TemporalGraph.from_edges([(u, v, 0) for u in range(4) for v in range(4) if u != v])
TWO_CYCLE = TemporalGraph.from_edges([(0, 1, 2), (1, 0, 7)])


@pytest.mark.parametrize("algo", ALGOS)
def test_two_cycle_from_edge(algo):
    sink, _ = run_from_edge(algo, TWO_CYCLE, 0, TimeWindow(2, 7))
    assert sink.cycles == [((0, 1), (0, 1))]


@pytest.mark.parametrize("algo", ALGOS)
def test_k4_twenty_cycles(algo):
    sink = enumerate_all(K4, 0, algo, CycleSink("collect"))
    assert sink.count == 20
    assert sink.edge_sequences() == oracle_simple_cycles(triples(K4), 0)
    lengths = sorted(len(v) for v, _ in sink.cycles)
    assert lengths.count(2) == 6 and lengths.count(3) == 8 and lengths.count(4) == 6


@pytest.mark.parametrize("m,k", [(3, 4), (8, 16)])
def test_fig3a_b_chain_visits(m, k):
    g = fig3a(m, k)
    expected = {"tiernan": 2 * m * k, "johnson": k, "read_tarjan": 2 * k}
    for algo, want in expected.items():
        sink, stats = run_from_edge(algo, g, track=True)
        assert b_visits(g, stats, k) == want, algo
        assert sink.count == 3


@pytest.mark.parametrize("m,k", [(1, 1), (2, 5), (3, 4), (5, 2), (8, 16)])
def test_read_tarjan_visits_at_least_johnson_on_fig3a(m, k):
    g = fig3a(m, k)
    _, js = run_from_edge("johnson", g)
    _, rs = run_from_edge("read_tarjan", g)
    assert rs.edge_visits >= js.edge_visits


@pytest.mark.parametrize("algo", ALGOS)
def test_dag_emits_nothing(algo):
    g = TemporalGraph.from_edges([(0, 1, 1), (1, 2, 2), (0, 2, 3)])
    sink = enumerate_all(g, math.inf, algo, CycleSink("collect"), stats := SearchStats())
    assert sink.count == 0
    assert stats.edge_visits + stats.total("preproc_visits") <= g.vertex_count + g.edge_count


@pytest.mark.parametrize("algo", ALGOS)
def test_worst_case_single_anchor(algo):
    sink, _ = run_from_edge(algo, worst_case(6), 0)
    assert sink.count == 16


def test_recursive_unblock_single():
    blk, blist = BlockedSet(3, [0]), UnblockList()
    recursive_unblock(0, blk, blist)
    assert blk.members() == set()


def test_recursive_unblock_chain():
    a, b, c = 0, 1, 2
    blk, blist = BlockedSet(3, [a, b, c]), UnblockList()
    blist.add(a, b)
    blist.add(b, c)
    assert recursive_unblock(a, blk, blist) == 3
    assert blk.members() == set()
    assert all(not s for s in blist.values())


def test_recursive_unblock_noop_and_cycles():
    blk, blist = BlockedSet(3, [1, 2]), UnblockList()
    blist.add(1, 2)
    blist.add(2, 1)
    assert recursive_unblock(0, blk, blist) == 0
    assert blk.members() == {1, 2}
    assert recursive_unblock(1, blk, blist) == 2


def test_read_tarjan_two_cycle_matches_johnson():
    r, _ = run_from_edge("read_tarjan", TWO_CYCLE)
    j, _ = run_from_edge("johnson", TWO_CYCLE)
    assert r.cycles == j.cycles == [((0, 1), (0, 1))]


@pytest.mark.parametrize("algo", ALGOS)
def test_from_edge_outside_view_rejected(algo):
    with pytest.raises(ValueError):
        run_from_edge(algo, TWO_CYCLE, 1, TimeWindow(0, 5))


@pytest.mark.parametrize("seed", range(100))
def test_random_graphs_match_oracle(seed):
    rng = random.Random(seed)
    g = random_graph(8, rng.choice([0.15, 0.25, 0.35]), seed=seed, max_ts=rng.choice([0, 10]))
    want = oracle_simple_cycles(triples(g), math.inf)
    for algo in ALGOS:
        assert enumerate_all(g, math.inf, algo, CycleSink("collect")).edge_sequences() == want


def test_two_cycle_window():
    assert enumerate_all(TWO_CYCLE, 5).count == 1
    assert enumerate_all(TWO_CYCLE, 4).count == 0


# frozen from the oracle on the window fixture
WINDOW_COUNTS = {0: 0, 4: 2, 5: 3, 8: 4, math.inf: 5}


@pytest.mark.parametrize("delta,want", WINDOW_COUNTS.items())
def test_window_fixture_counts(delta, want):
    g = window_example()
    assert len(oracle_simple_cycles(triples(g), delta)) == want
    for algo in ALGOS:
        assert enumerate_all(g, delta, algo).count == want


def test_negative_delta_rejected():
    with pytest.raises(ValueError):
        enumerate_all(TWO_CYCLE, -1)


def test_each_cycle_reported_once_across_overlapping_windows():
    g = random_graph(7, 0.4, seed=5, max_ts=6, multi=2)
    sink = enumerate_all(g, 3, "johnson", CycleSink("collect"))
    seqs = sink.edge_sequences()
    assert len(seqs) == len(set(seqs))
    for verts, eids in sink.cycles:
        keys = [(g.edge(e).ts, e) for e in eids]
        assert keys[0] == min(keys)


def test_self_loops_flag():
    g = TemporalGraph.from_edges([(0, 0, 1), (0, 1, 2), (1, 0, 3)])
    assert enumerate_all(g, math.inf).count == 1
    for algo in ALGOS:
        assert enumerate_all(g, math.inf, algo, allow_self_loops=True).count == 2


@pytest.mark.parametrize("seed", range(30))
def test_johnson_unblock_lemma(seed):
    g = random_graph(8, 0.35, seed=seed)
    for eid in range(g.edge_count):
        stats = SearchStats(track_vertices=True)
        sink = CycleSink()
        make_engine("johnson", g, math.inf, stats=stats).run_anchor(eid, stats.shard(0), sink)
        for v, k in stats.unblock_counts.items():
            assert k <= sink.count + 1


@pytest.mark.parametrize("seed", range(20))
def test_johnson_path_always_blocked(seed):
    g = random_graph(8, 0.35, seed=seed)
    eng = make_engine("johnson", g, math.inf)
    ts, sink = SearchStats().shard(0), CycleSink()
    for eid in range(g.edge_count):
        a = eng.prepare(eid, ts, sink)
        if a is None:
            continue
        st = eng.start(a, ts, sink)
        while True:
            assert all(st.blk[v] for v in st.path.vertices)
            if not eng.step(st, ts, sink):
                break


@pytest.mark.parametrize("m", range(1, 7))
def test_fig5a_maximal_paths(m):
    stats = SearchStats()
    sink = enumerate_all(fig5a(m), math.inf, "tiernan", stats=stats)
    assert sink.count == 4
    assert stats.maximal_paths == 4 * 2 ** (m - 1)


def test_maximal_paths_can_undercount_cycles():
    # a cycle can close at a vertex whose path continues further, so one
    # maximal path may carry several cycles
    g = TemporalGraph.from_edges([(0, 1, 0), (1, 0, 0), (1, 2, 0), (2, 0, 0)])
    stats = SearchStats()
    assert enumerate_all(g, math.inf, "tiernan", stats=stats).count == 2
    assert stats.maximal_paths == 1


@pytest.mark.parametrize("seed", range(20))
def test_johnson_pruning_dominance_logged(seed):
    g = random_graph(9, 0.3, seed=seed)
    js, rs = SearchStats(), SearchStats()
    enumerate_all(g, math.inf, "johnson", stats=js)
    enumerate_all(g, math.inf, "read_tarjan", stats=rs)
    if js.edge_visits > rs.edge_visits:
        warnings.warn(f"seed {seed}: Johnson {js.edge_visits} > Read-Tarjan {rs.edge_visits}")
