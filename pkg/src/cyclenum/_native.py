"""Adapters between the Python-facing API and the compiled core."""

from __future__ import annotations

import math

import numpy as np

from . import _core

_FIELDS = (
    "edge_visits", "preproc_visits", "tasks_executed", "tasks_stolen", "copy_on_steal_ops",
    "copied_words", "busy_ns", "unblock_propagations", "maximal_paths", "anchors_searched",
    "anchors_skipped",
)


def _arrays(g):
    arrs = getattr(g, "_native_arrays", None)
    if arrs is None:
        aeid = np.ascontiguousarray(g.out_eids, dtype=np.int64)
        arrs = (
            np.ascontiguousarray(g.src, dtype=np.int64),
            np.ascontiguousarray(g.dst, dtype=np.int64),
            np.ascontiguousarray(g.ts, dtype=np.int64),
            np.ascontiguousarray(g.out_offsets, dtype=np.int64),
            aeid,
            np.ascontiguousarray(g.dst[aeid], dtype=np.int64),
            np.ascontiguousarray(g.ts[aeid], dtype=np.int64),
        )
        g._native_arrays = arrs
    return arrs


def _delta(delta) -> int:
    return _core.UNBOUNDED if math.isinf(delta) else int(delta)


def _finish(result, sink, stats, threads):
    count, flat, shard_stats, wall_ns = result
    stats.resize(threads)
    for mine, theirs in zip(stats.threads, shard_stats):
        for name in _FIELDS:
            setattr(mine, name, getattr(mine, name) + theirs[name])
        mine.max_copied_words = max(mine.max_copied_words, theirs["max_copied_words"])
    stats.wall_ns += wall_ns
    if sink.mode == "count":
        sink.add_count(count)
        return
    flat = flat.tolist()
    i = 0
    emitted = 0
    while i < len(flat):
        k = flat[i]
        sink.emit(flat[i + 1:i + 1 + k], flat[i + 1 + k:i + 1 + 2 * k])
        i += 1 + 2 * k
        emitted += 1
    sink.add_count(count - emitted)  # bundle-weighted counts carry no records


def _anchor_array(g, anchors):
    if anchors is None:
        return np.arange(g.edge_count, dtype=np.int64)
    if isinstance(anchors, range):
        return np.arange(anchors.start, anchors.stop, anchors.step, dtype=np.int64)
    return np.ascontiguousarray(np.fromiter(anchors, dtype=np.int64))


def run_simple(g, delta, algo, granularity, threads, sink, stats, anchors, allow_self_loops, cutoff,
               seed=0):
    res = _core.run(
        g.vertex_count, *_arrays(g), _anchor_array(g, anchors), algo, _delta(delta),
        threads=threads, fine=granularity == "fine", seed=seed or 0,
        collect=sink.mode != "count", allow_self_loops=allow_self_loops, cutoff=cutoff,
    )
    _finish(res, sink, stats, threads)


def run_temporal(g, delta, opts, granularity, threads, sink, stats, anchors, allow_self_loops, cutoff,
                 seed=0):
    res = _core.run(
        g.vertex_count, *_arrays(g), _anchor_array(g, anchors), "temporal", _delta(delta),
        threads=threads, fine=granularity == "fine", seed=seed or 0,
        collect=sink.mode != "count" and not opts.weighted, allow_self_loops=allow_self_loops,
        cutoff=cutoff, strict=opts.strict, closing_times=opts.closing_times, bundles=opts.bundles,
        cycle_union=opts.cycle_union, weighted=opts.weighted,
    )
    _finish(res, sink, stats, threads)
