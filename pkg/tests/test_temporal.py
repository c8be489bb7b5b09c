import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from cyclenum import (
    NATIVE_AVAILABLE,
    ClosingTimes,
    CycleSink,
    ParallelConfig,
    PathBundle,
    SearchStats,
    TemporalGraph,
    TemporalOptions,
    TimeWindow,
    bundle_count,
    cycle_union,
    expand_bundle,
    temporal_enumerate,
    temporal_reachability,
)
from cyclenum.synthetic import random_graph, random_temporal, window_example
from cyclenum.temporal import scripted_temporal_run

from oracles import oracle_simple_cycles, oracle_temporal_cycles, oracle_temporal_reach

BACKENDS = ["python"] + (["native"] if NATIVE_AVAILABLE else [])
EVERYTHING = TimeWindow(0, math.inf)


def triples(g):
    return [(e.src, e.dst, e.ts) for e in g.edges]


def members(bits):
    return {v for v, b in enumerate(bits) if b}


def test_reachability_respects_order():
    g = TemporalGraph.from_edges([(0, 1, 5), (1, 2, 3)])
    assert members(temporal_reachability(g.window(EVERYTHING), 0, 0)) == {0, 1}
    g = TemporalGraph.from_edges([(0, 1, 3), (1, 2, 5)])
    assert members(temporal_reachability(g.window(EVERYTHING), 0, 0)) == {0, 1, 2}


def test_reachability_bad_direction():
    g = TemporalGraph.from_edges([(0, 1, 3)])
    with pytest.raises(ValueError):
        temporal_reachability(g.window(EVERYTHING), 0, 0, "sideways")


@pytest.mark.parametrize("seed", range(40))
@pytest.mark.parametrize("direction", ["forward", "backward"])
@pytest.mark.parametrize("strict", [True, False])
def test_reachability_matches_path_oracle(seed, direction, strict):
    g = random_temporal(7, 0.3, seed=seed, max_ts=8)
    view = g.window(EVERYTHING)
    rng = random.Random(seed)
    for source in range(g.vertex_count):
        t0 = rng.choice([-math.inf, 2, 5]) if direction == "forward" else rng.choice([-math.inf, 4, 9])
        got = members(temporal_reachability(view, source, t0, direction, strict))
        assert got == oracle_temporal_reach(triples(g), source, t0, direction, strict)


def test_cycle_union_two_cycle():
    g = TemporalGraph.from_edges([(0, 1, 2), (1, 0, 7)])
    cu = cycle_union(g, 0, 5)
    assert cu.members == {0, 1} and cu.reaches_v0


def test_cycle_union_dag_tail():
    g = TemporalGraph.from_edges([(0, 1, 1), (1, 2, 2), (2, 3, 3), (3, 1, 4)])
    cu = cycle_union(g, 0, math.inf)
    assert cu.members == {0, 1} and not cu.reaches_v0
    stats = SearchStats()
    sink = temporal_enumerate(g, math.inf, ParallelConfig(backend="python"), stats=stats, anchors=[0])
    assert sink.count == 0 and stats.edge_visits == 0


@pytest.mark.parametrize("seed", range(40))
def test_cycle_union_bounds(seed):
    g = random_temporal(8, 0.3, seed=seed)
    view = g.window(EVERYTHING)
    cycles = oracle_temporal_cycles(triples(g), 6)
    for eid in range(g.edge_count):
        e = g.edge(eid)
        cu = cycle_union(g, eid, 6)
        on_cycles = {g.edge(x).src for c in cycles if c[0] == eid for x in c}
        assert on_cycles <= cu.members
        assert {e.src, e.dst} <= cu.members
        w = TimeWindow(e.ts, e.ts + 6)
        fwd = members(temporal_reachability(g.window(w), e.dst, e.ts))
        bwd = members(temporal_reachability(g.window(w), e.src, -math.inf, "backward"))
        assert cu.members - {e.src, e.dst} <= fwd & bwd


def test_cycle_union_parallel_bit_identical():
    g = random_temporal(8, 0.4, seed=3)
    seq = [cycle_union(g, e, 5).members for e in range(g.edge_count)]
    with ThreadPoolExecutor(4) as ex:
        par = list(ex.map(lambda e: cycle_union(g, e, 5).members, range(g.edge_count)))
    assert seq == par


# frozen from the oracle on the window fixture
TEMPORAL_WINDOW_COUNTS = {0: 0, 4: 2, 5: 3, 8: 4, math.inf: 4}


@pytest.mark.parametrize("delta,want", TEMPORAL_WINDOW_COUNTS.items())
def test_window_fixture_temporal_counts(delta, want):
    g = window_example()
    assert len(oracle_temporal_cycles(triples(g), delta)) == want
    for backend in BACKENDS:
        assert temporal_enumerate(g, delta, ParallelConfig(backend=backend)).count == want


def test_window_fixture_first_window():
    g = window_example()
    sub = TemporalGraph.from_edges([(e.src, e.dst, e.ts) for e in g.edges if 2 <= e.ts <= 7])
    assert temporal_enumerate(sub, math.inf).count == 1


def test_triangle_order():
    bad = TemporalGraph.from_edges([(0, 1, 3), (1, 2, 5), (2, 0, 4)])
    good = TemporalGraph.from_edges([(0, 1, 3), (1, 2, 4), (2, 0, 5)])
    assert temporal_enumerate(bad, math.inf).count == 0
    assert temporal_enumerate(good, math.inf).count == 1


def test_negative_delta_rejected():
    with pytest.raises(ValueError):
        temporal_enumerate(window_example(), -1)


def test_bundle_examples():
    assert bundle_count(PathBundle((0, 1, 2), ({1, 2}, {3}))) == 2
    assert len(expand_bundle(PathBundle((0, 1, 2), ({1, 2}, {3})))) == 2
    bad = PathBundle((0, 1, 2), ({3}, {1}))
    assert bundle_count(bad) == 0 and expand_bundle(bad) == [] and not bad.is_valid()


@pytest.mark.parametrize("seed", range(50))
@pytest.mark.parametrize("strict", [True, False])
def test_random_bundles_match_product_filter(seed, strict):
    rng = random.Random(seed)
    hops = tuple(
        frozenset(rng.sample(range(10), rng.randint(1, 4))) for _ in range(rng.randint(1, 5))
    )
    b = PathBundle(tuple(range(len(hops) + 1)), hops, strict)
    brute = [
        c for c in itertools.product(*(sorted(h) for h in hops))
        if all((x < y) if strict else (x <= y) for x, y in zip(c, c[1:]))
    ]
    assert bundle_count(b) == len(brute)
    assert sorted(expand_bundle(b)) == sorted(brute)


def test_closing_times_propagation():
    ct = ClosingTimes(4)
    ct.ct[1] = ct.ct[2] = 0
    ct.register(2, 1, 5)  # 1 waits on an edge to 2 departing at 5
    ct.register(3, 2, 7)
    on_path = bytearray(4)
    assert ct.blocked(1, 3) and not ct.blocked(0, 100)
    raised = ct.raise_to(3, 10, on_path, lambda d: d)
    assert ct.ct[2] == 7 and ct.ct[1] == 5 and raised == 2
    assert ct.waiters == {}
    assert ct.copy().ct == ct.ct


@pytest.mark.parametrize("seed", range(40))
def test_toggles_and_backends_match_oracle(seed):
    rng = random.Random(seed)
    g = random_temporal(7, rng.choice([0.2, 0.35]), seed=seed)
    delta = rng.choice([3, 6, math.inf])
    want = oracle_temporal_cycles(triples(g), delta)
    for ctimes, bundles, union in itertools.product([True, False], repeat=3):
        opts = TemporalOptions(closing_times=ctimes, bundles=bundles, cycle_union=union)
        for backend in BACKENDS:
            for cfg in (None, ParallelConfig(1, "coarse", backend=backend),
                        ParallelConfig(3, "fine", backend=backend, seed=seed)):
                if cfg is None and backend == "native":
                    continue
                sink = temporal_enumerate(g, delta, cfg, CycleSink("collect"), options=opts)
                assert sink.edge_sequences() == want


@pytest.mark.parametrize("seed", range(30))
def test_non_strict_mode_matches_oracle(seed):
    g = random_temporal(6, 0.35, seed=seed, max_ts=4)
    want = oracle_temporal_cycles(triples(g), math.inf, strict=False)
    for backend in BACKENDS:
        cfg = ParallelConfig(2, "fine", backend=backend)
        sink = temporal_enumerate(g, math.inf, cfg, CycleSink("collect"), strict=False)
        assert sink.edge_sequences() == want


@pytest.mark.parametrize("seed", range(30))
def test_closing_times_only_save_work(seed):
    g = random_temporal(8, 0.35, seed=seed)
    on, off = SearchStats(), SearchStats()
    a = temporal_enumerate(g, math.inf, None, CycleSink("collect"), on)
    b = temporal_enumerate(g, math.inf, None, CycleSink("collect"), off, closing_times=False)
    assert a.edge_sequences() == b.edge_sequences()
    assert off.edge_visits >= on.edge_visits


@pytest.mark.parametrize("seed", range(30))
def test_weighted_bundles_count(seed):
    g = random_temporal(7, 0.35, seed=seed, multi=3)
    plain = temporal_enumerate(g, math.inf, bundles=False).count
    for backend in BACKENDS:
        weighted = temporal_enumerate(g, math.inf, ParallelConfig(backend=backend), weighted=True)
        assert weighted.count == plain


@pytest.mark.parametrize("seed", range(20))
def test_temporal_cycles_are_simple_cycles(seed):
    g = random_temporal(7, 0.35, seed=seed)
    simple = set(oracle_simple_cycles(triples(g), 5))
    sink = temporal_enumerate(g, 5, None, CycleSink("collect"))
    for verts, eids in sink.cycles:
        assert eids in simple
        assert len(set(verts)) == len(verts)
        stamps = [g.edge(e).ts for e in eids]
        assert stamps == sorted(set(stamps))


@pytest.mark.parametrize("seed", range(20))
def test_scripted_temporal_schedules(seed):
    g = random_temporal(7, 0.35, seed=seed)
    want = oracle_temporal_cycles(triples(g), math.inf)
    sink = scripted_temporal_run(g, math.inf, 3, seed, 0.7, CycleSink("collect"))
    assert sink.edge_sequences() == want
