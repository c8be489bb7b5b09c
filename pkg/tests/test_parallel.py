import math
import os
import random
import time

import pytest

from cyclenum import (
    NATIVE_AVAILABLE,
    CycleSink,
    ParallelConfig,
    ScriptedScheduler,
    SearchStats,
    TemporalGraph,
    coarse_enumerate,
    enumerate_all,
    fine_enumerate,
    fine_johnson_enumerate,
    fine_read_tarjan_enumerate,
    make_engine,
    parallel_enumerate,
    scripted_run,
)
from cyclenum.synthetic import fig5a, random_graph, worst_case

from oracles import oracle_simple_cycles

BACKENDS = ["python"] + (["native"] if NATIVE_AVAILABLE else [])
CPUS = os.cpu_count() or 1


def triples(g):
    return [(e.src, e.dst, e.ts) for e in g.edges]


@pytest.mark.parametrize("kw", [{"threads": 0}, {"cutoff_depth": -1}, {"granularity": "x"},
                                {"algorithm": "x"}, {"backend": "gpu"}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ParallelConfig(**kw)


def test_algorithm_names_normalised():
    assert ParallelConfig(algorithm="read-tarjan").algorithm == "read_tarjan"


def test_wrong_algorithm_entry_points():
    g = worst_case(4)
    with pytest.raises(ValueError):
        fine_johnson_enumerate(g, math.inf, ParallelConfig(2, "fine", "read_tarjan"))
    with pytest.raises(ValueError):
        fine_read_tarjan_enumerate(g, math.inf, ParallelConfig(2, "fine", "johnson"))


@pytest.mark.parametrize("backend", BACKENDS)
def test_coarse_worst_case_single_thread_does_the_work(backend):
    stats = SearchStats()
    sink = coarse_enumerate(worst_case(6), math.inf, ParallelConfig(4, "coarse", backend=backend),
                            stats=stats)
    assert sink.count == 16
    visits = [t.edge_visits for t in stats.threads]
    assert max(visits) == sum(visits) > 0
    assert stats.total("anchors_searched") == 1


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("algo", ["tiernan", "johnson", "read_tarjan"])
@pytest.mark.parametrize("granularity", ["coarse", "fine"])
def test_single_thread_equals_sequential(backend, algo, granularity):
    g = random_graph(10, 0.3, seed=8, max_ts=10, multi=2)
    seq, par = SearchStats(), SearchStats()
    a = enumerate_all(g, 6, algo, CycleSink("collect"), seq)
    b = parallel_enumerate(g, 6, ParallelConfig(1, granularity, algo, backend=backend),
                           CycleSink("collect"), par)
    assert a.edge_sequences() == b.edge_sequences()
    assert par.edge_visits == seq.edge_visits


def test_disjoint_two_cycles_coarse():
    g = TemporalGraph.from_edges(
        [e for i in range(100) for e in ((2 * i, 2 * i + 1, i), (2 * i + 1, 2 * i, i))]
    )
    assert coarse_enumerate(g, math.inf, ParallelConfig(4, "coarse")).count == 100


@pytest.mark.skipif(CPUS < 4, reason="speedup needs at least 4 cores")
def test_disjoint_two_cycles_speedup():
    g = TemporalGraph.from_edges(
        [e for i in range(20000) for e in ((2 * i, 2 * i + 1, i), (2 * i + 1, 2 * i, i))]
    )
    walls = {}
    for p in (1, 4):
        t0 = time.perf_counter()
        coarse_enumerate(g, math.inf, ParallelConfig(p, "coarse"))
        walls[p] = time.perf_counter() - t0
    assert walls[1] / walls[4] >= 2


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("algo", ["johnson", "read_tarjan"])
def test_fine_worst_case_14(backend, algo):
    cfg = ParallelConfig(8, "fine", algo, backend=backend)
    assert fine_enumerate(worst_case(14), math.inf, cfg).count == 2 ** 12


@pytest.mark.skipif(CPUS < 8, reason="wall-time comparison needs 8 cores")
def test_fine_johnson_beats_coarse_at_p8():
    g = worst_case(16)
    fs, cs = SearchStats(), SearchStats()
    fine_enumerate(g, math.inf, ParallelConfig(8, "fine", "johnson"), stats=fs)
    coarse_enumerate(g, math.inf, ParallelConfig(8, "coarse", "johnson"), stats=cs)
    assert fs.wall_ns < cs.wall_ns


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_fig5a_adversarial_schedule_revisits_b_vertices(p):
    # p threads each take one route v1 -> u_i and then run without further
    # steals; their blocked sets are private, so each explores the b region
    g, m = fig5a(6), 6
    stats = SearchStats.for_threads(p, track_vertices=True)
    eng = make_engine("johnson", g, stats=stats)
    sched = ScriptedScheduler(eng, p, [0], stats)
    sched.take_anchor(0)
    v1 = g.labels.index("v1")
    sched.step_until(0, lambda st: st.path.vertices[-1] == v1)
    for thief in range(1, p):
        assert sched.steal(thief, 0).frame == 0
    for w in range(p):
        while not sched.idle(w):
            sched.step(w, 1000)
    assert sched.sink.count == 4
    for i in range(1, m + 1):
        assert stats.vertex_visits[g.labels.index(f"b{i}")] == p


@pytest.mark.parametrize("backend", BACKENDS)
def test_fine_read_tarjan_fig5a_visits_independent_of_p(backend):
    g = fig5a(6)
    visits = set()
    for p in (1, 2, 4):
        stats = SearchStats()
        sink = fine_enumerate(g, math.inf, ParallelConfig(p, "fine", "read_tarjan", backend=backend),
                              stats=stats)
        assert sink.count == 4
        visits.add(stats.edge_visits)
    assert len(visits) == 1


@pytest.mark.parametrize("seed", range(8))
def test_schedule_independence(seed):
    rng = random.Random(seed)
    g = random_graph(9, 0.3, seed=seed, max_ts=10, multi=2)
    delta = rng.choice([4, math.inf])
    want = oracle_simple_cycles(triples(g), delta)
    for algo in ("johnson", "read_tarjan"):
        for granularity in ("coarse", "fine"):
            for backend in BACKENDS:
                for p in (1, 2, 4, 8):
                    cfg = ParallelConfig(p, granularity, algo, backend=backend, seed=seed)
                    got = parallel_enumerate(g, delta, cfg, CycleSink("collect"))
                    assert got.edge_sequences() == want
        for run in range(20):
            sink = scripted_run(g, delta, algo, 4, seed * 100 + run, sink=CycleSink("collect"))
            assert sink.edge_sequences() == want


@pytest.mark.parametrize("seed", range(10))
def test_work_efficiency_split(seed):
    g = random_graph(10, 0.3, seed=seed)
    tiernan, j1, r1 = SearchStats(), SearchStats(), SearchStats()
    enumerate_all(g, math.inf, "tiernan", stats=tiernan)
    enumerate_all(g, math.inf, "johnson", stats=j1)
    enumerate_all(g, math.inf, "read_tarjan", stats=r1)
    for run in range(5):
        js, rs = SearchStats(), SearchStats()
        scripted_run(g, math.inf, "johnson", 8, run, stats=js)
        scripted_run(g, math.inf, "read_tarjan", 8, run, stats=rs)
        assert rs.edge_visits == r1.edge_visits
        assert j1.edge_visits <= js.edge_visits <= tiernan.edge_visits


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("cutoff", [1, 2, 5])
def test_cutoff_depth_preserves_output(backend, cutoff):
    g = worst_case(10)
    cfg = ParallelConfig(4, "fine", "johnson", cutoff_depth=cutoff, backend=backend)
    assert fine_enumerate(g, math.inf, cfg).count == 256


def test_sequential_granularity():
    g = worst_case(8)
    for backend in BACKENDS:
        cfg = ParallelConfig(1, "sequential", "read_tarjan", backend=backend)
        assert parallel_enumerate(g, math.inf, cfg).count == 64
