"""Coarse- and fine-grained parallel simple-cycle enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _backend
from .graph import TemporalGraph
from .runtime import ScriptedScheduler, WorkStealingPool
from .sequential import check_delta, make_engine, normalize_algo
from .stats import CycleSink, SearchStats

__all__ = [
    "ParallelConfig",
    "coarse_enumerate",
    "fine_enumerate",
    "fine_johnson_enumerate",
    "fine_read_tarjan_enumerate",
    "parallel_enumerate",
]

GRANULARITIES = ("sequential", "coarse", "fine")


@dataclass(frozen=True)
class ParallelConfig:
    """Thread count, task granularity, algorithm and inlining cutoff.

    ``cutoff_depth`` = 0 exposes every pending call to thieves; a positive
    value hides calls deeper than that many hops below the anchor.
    ``backend`` is ``"auto"``, ``"native"`` or ``"python"``.
    """

    threads: int = 1
    granularity: str = "fine"
    algorithm: str = "johnson"
    cutoff_depth: int = 0
    backend: str = "auto"
    seed: int | None = None

    def __post_init__(self):
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.cutoff_depth < 0:
            raise ValueError("cutoff_depth must be >= 0")
        if self.granularity not in GRANULARITIES:
            raise ValueError(f"unknown granularity {self.granularity!r}")
        object.__setattr__(self, "algorithm", normalize_algo(self.algorithm))
        if self.backend not in ("auto", "native", "python"):
            raise ValueError(f"unknown backend {self.backend!r}")


def _run(g, delta, cfg: ParallelConfig, granularity, sink, stats, anchors, allow_self_loops):
    check_delta(delta)
    sink = sink if sink is not None else CycleSink()
    stats = stats if stats is not None else SearchStats()
    anchors = range(g.edge_count) if anchors is None else anchors
    if _backend.use_native(cfg.backend, stats):
        _backend.native_simple(
            g, delta, cfg.algorithm, granularity, cfg.threads, sink, stats, anchors,
            allow_self_loops, cfg.cutoff_depth,
        )
        return sink
    engine = make_engine(
        cfg.algorithm, g, delta, stats=stats, allow_self_loops=allow_self_loops,
        cutoff_depth=cfg.cutoff_depth,
    )
    pool = WorkStealingPool(
        engine, cfg.threads, anchors, granularity=granularity, stats=stats, sink=sink, seed=cfg.seed
    )
    pool.run()
    return sink


def coarse_enumerate(
    g: TemporalGraph, delta, cfg: ParallelConfig, sink=None, stats=None, anchors=None,
    allow_self_loops: bool = False,
) -> CycleSink:
    """One task per anchor edge, each running the full sequential search."""
    return _run(g, delta, cfg, "coarse", sink, stats, anchors, allow_self_loops)


def fine_enumerate(
    g: TemporalGraph, delta, cfg: ParallelConfig, sink=None, stats=None, anchors=None,
    allow_self_loops: bool = False,
) -> CycleSink:
    """Anchors are tasks and so is every pending recursive call."""
    return _run(g, delta, cfg, "fine", sink, stats, anchors, allow_self_loops)


def fine_johnson_enumerate(g, delta, cfg: ParallelConfig, sink=None, stats=None, **kw) -> CycleSink:
    if cfg.algorithm != "johnson":
        raise ValueError("fine_johnson_enumerate needs algorithm='johnson'")
    return fine_enumerate(g, delta, cfg, sink, stats, **kw)


def fine_read_tarjan_enumerate(g, delta, cfg: ParallelConfig, sink=None, stats=None, **kw) -> CycleSink:
    if cfg.algorithm != "read_tarjan":
        raise ValueError("fine_read_tarjan_enumerate needs algorithm='read_tarjan'")
    return fine_enumerate(g, delta, cfg, sink, stats, **kw)


def parallel_enumerate(g, delta, cfg: ParallelConfig, sink=None, stats=None, **kw) -> CycleSink:
    """Dispatch on ``cfg.granularity``; ``"sequential"`` runs on one thread
    without a pool."""
    if cfg.granularity == "sequential":
        from .sequential import enumerate_all

        if _backend.use_native(cfg.backend, stats):
            return _run(g, delta, ParallelConfig(1, "coarse", cfg.algorithm, backend=cfg.backend),
                        "coarse", sink, stats, kw.get("anchors"), kw.get("allow_self_loops", False))
        return enumerate_all(g, delta, cfg.algorithm, sink, stats, **kw)
    if cfg.granularity == "coarse":
        return coarse_enumerate(g, delta, cfg, sink, stats, **kw)
    return fine_enumerate(g, delta, cfg, sink, stats, **kw)


def scripted_run(
    g: TemporalGraph, delta, algorithm: str, threads: int, seed: int, steal_prob: float = 0.5,
    sink=None, stats=None,
) -> CycleSink:
    """Deterministic fine-grained run under a seeded random schedule."""
    check_delta(delta)
    sink = sink if sink is not None else CycleSink()
    engine = make_engine(algorithm, g, delta, stats=stats)
    sched = ScriptedScheduler(engine, threads, range(g.edge_count), stats=stats, sink=sink)
    sched.run_random(seed, steal_prob)
    return sink
