# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False
"""Thin wrapper over the C++ kernels in native/core.hpp."""

from libc.stdint cimport int64_t, uint64_t
from libcpp cimport bool as cbool
from libcpp.vector cimport vector

import numpy as np

cdef extern from "native/core.hpp" namespace "cn":
    cdef cppclass Graph:
        int64_t n
        int64_t m
        const int64_t* src
        const int64_t* dst
        const int64_t* ts
        const int64_t* off
        const int64_t* aeid
        const int64_t* adst
        const int64_t* ats

    cdef cppclass Options:
        int algo
        int64_t delta
        cbool allow_self_loops
        int64_t cutoff
        cbool strict
        cbool closing_times
        cbool bundles
        cbool cycle_union
        cbool weighted
        cbool collect

    cdef cppclass Stats:
        int64_t edge_visits, preproc_visits, tasks_executed, tasks_stolen
        int64_t copy_ops, copied_words, max_copied_words, busy_ns
        int64_t unblock_propagations, maximal_paths, anchors_searched, anchors_skipped

    cdef cppclass Result:
        int64_t count
        vector[int64_t] cycles
        vector[Stats] stats
        int64_t wall_ns

    Result c_run "cn::run"(const Graph& g, const Options& o, const int64_t* anchors, int64_t na,
                           int threads, cbool fine, uint64_t seed) nogil

    int64_t INF

ALGOS = {"tiernan": 0, "johnson": 1, "read_tarjan": 2, "temporal": 3}
UNBOUNDED = INF

cdef int64_t _dummy = 0

cdef inline const int64_t* _ptr(const int64_t[::1] a):
    return &a[0] if a.shape[0] else &_dummy


def run(
    int64_t n,
    const int64_t[::1] src, const int64_t[::1] dst, const int64_t[::1] ts,
    const int64_t[::1] off, const int64_t[::1] aeid, const int64_t[::1] adst,
    const int64_t[::1] ats, const int64_t[::1] anchors,
    str algo, int64_t delta, int threads=1, cbool fine=False, uint64_t seed=0,
    cbool collect=False, cbool allow_self_loops=False, int64_t cutoff=0,
    cbool strict=True, cbool closing_times=True, cbool bundles=True,
    cbool cycle_union=True, cbool weighted=False,
):
    """Run one enumeration; returns ``(count, flat_cycles, stats, wall_ns)``."""
    cdef Graph g
    cdef Options o
    cdef Result res
    cdef int64_t na = anchors.shape[0]
    cdef const int64_t* ap = _ptr(anchors)
    g.n = n
    g.m = src.shape[0]
    g.src = _ptr(src)
    g.dst = _ptr(dst)
    g.ts = _ptr(ts)
    g.off = _ptr(off)
    g.aeid = _ptr(aeid)
    g.adst = _ptr(adst)
    g.ats = _ptr(ats)
    o.algo = ALGOS[algo]
    o.delta = delta
    o.allow_self_loops = allow_self_loops
    o.cutoff = cutoff
    o.strict = strict
    o.closing_times = closing_times
    o.bundles = bundles
    o.cycle_union = cycle_union
    o.weighted = weighted
    o.collect = collect
    with nogil:
        res = c_run(g, o, ap, na, threads, fine, seed)
    flat = np.empty(res.cycles.size(), dtype=np.int64)
    cdef int64_t[::1] fv = flat
    cdef size_t i
    for i in range(res.cycles.size()):
        fv[i] = res.cycles[i]
    stats = []
    cdef Stats s
    for s in res.stats:
        stats.append({
            "edge_visits": s.edge_visits, "preproc_visits": s.preproc_visits,
            "tasks_executed": s.tasks_executed, "tasks_stolen": s.tasks_stolen,
            "copy_on_steal_ops": s.copy_ops, "copied_words": s.copied_words,
            "max_copied_words": s.max_copied_words, "busy_ns": s.busy_ns,
            "unblock_propagations": s.unblock_propagations,
            "maximal_paths": s.maximal_paths, "anchors_searched": s.anchors_searched,
            "anchors_skipped": s.anchors_skipped,
        })
    return res.count, flat, stats, res.wall_ns
