"""Cycle sinks and per-thread search instrumentation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, TextIO

__all__ = ["CycleSink", "SearchStats", "ThreadStats"]


class CycleSink:
    """Receives emitted cycles.

    ``mode`` is ``"count"``, ``"collect"`` or ``"stream"``.  A cycle is the
    pair ``(vertices, edge_ids)``; vertices start at the anchor edge's source
    and do not repeat it at the end.  In stream mode each cycle is written as
    one line of space-separated vertex labels.
    """

    def __init__(self, mode: str = "count", writer: TextIO | None = None, labels=None):
        if mode not in ("count", "collect", "stream"):
            raise ValueError(f"unknown sink mode {mode!r}")
        if mode == "stream" and writer is None:
            raise ValueError("stream mode needs a writer")
        self.mode = mode
        self.count = 0
        self.cycles: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        self.writer = writer
        self.labels = labels

    def emit(self, vertices, edge_ids) -> None:
        self.count += 1
        if self.mode == "collect":
            self.cycles.append((tuple(vertices), tuple(edge_ids)))
        elif self.mode == "stream":
            lab = self.labels
            verts = vertices if lab is None else [lab[v] for v in vertices]
            self.writer.write(" ".join(map(str, verts)) + "\n")

    def add_count(self, k: int) -> None:
        """Account for ``k`` cycles without materialising them."""
        self.count += k

    def fork(self) -> "CycleSink":
        """Per-thread buffer; streams are buffered and written on merge."""
        return CycleSink("collect" if self.mode != "count" else "count")

    def merge(self, other: "CycleSink") -> None:
        if self.mode == "count":
            self.count += other.count
            return
        for verts, eids in other.cycles:
            self.emit(verts, eids)
        # counts may include add_count contributions that carry no records
        self.count += other.count - len(other.cycles)

    def edge_sequences(self) -> list[tuple[int, ...]]:
        """Sorted edge-id tuples; the canonical multiset used for comparisons."""
        return sorted(e for _, e in self.cycles)


@dataclass
class ThreadStats:
    edge_visits: int = 0
    preproc_visits: int = 0
    tasks_executed: int = 0
    tasks_stolen: int = 0
    copy_on_steal_ops: int = 0
    copied_words: int = 0
    max_copied_words: int = 0
    busy_ns: int = 0
    unblock_propagations: int = 0
    maximal_paths: int = 0
    anchors_searched: int = 0
    anchors_skipped: int = 0

    def record_copy(self, words: int) -> None:
        self.copy_on_steal_ops += 1
        self.copied_words += words
        if words > self.max_copied_words:
            self.max_copied_words = words


_COUNTERS = [f for f in ThreadStats.__dataclass_fields__ if f != "max_copied_words"]


@dataclass
class SearchStats:
    """Per-thread counter shards plus aggregate views.

    ``work_ns`` is the sum of per-thread busy times (W_p) and ``wall_ns`` the
    elapsed wall time of the whole run (T_p).  When ``track_vertices`` is set,
    ``vertex_visits[v]`` counts how many times a search entered ``v``.
    """

    threads: list[ThreadStats] = field(default_factory=lambda: [ThreadStats()])
    wall_ns: int = 0
    track_vertices: bool = False
    vertex_visits: dict = field(default_factory=dict)
    unblock_counts: dict = field(default_factory=dict)

    @classmethod
    def for_threads(cls, p: int, **kw) -> "SearchStats":
        return cls(threads=[ThreadStats() for _ in range(p)], **kw)

    def shard(self, i: int = 0) -> ThreadStats:
        return self.threads[i]

    def resize(self, p: int) -> None:
        while len(self.threads) < p:
            self.threads.append(ThreadStats())

    def visit_vertex(self, v: int) -> None:
        self.vertex_visits[v] = self.vertex_visits.get(v, 0) + 1

    def total(self, name: str) -> int:
        if name == "max_copied_words":
            return max(t.max_copied_words for t in self.threads)
        return sum(getattr(t, name) for t in self.threads)

    @property
    def edge_visits(self) -> int:
        return self.total("edge_visits")

    @property
    def maximal_paths(self) -> int:
        return self.total("maximal_paths")

    @property
    def busy_ns(self) -> list[int]:
        return [t.busy_ns for t in self.threads]

    @property
    def work_ns(self) -> int:
        return sum(self.busy_ns)

    def merge(self, other: "SearchStats") -> None:
        """Add another run's counters shard-by-shard."""
        self.resize(len(other.threads))
        for mine, theirs in zip(self.threads, other.threads):
            for name in _COUNTERS:
                setattr(mine, name, getattr(mine, name) + getattr(theirs, name))
            mine.max_copied_words = max(mine.max_copied_words, theirs.max_copied_words)
        self.wall_ns += other.wall_ns
        for v, k in other.vertex_visits.items():
            self.vertex_visits[v] = self.vertex_visits.get(v, 0) + k

    def summary(self) -> dict:
        out = {name: self.total(name) for name in _COUNTERS if name != "busy_ns"}
        out["max_copied_words"] = self.total("max_copied_words")
        out["wall_ns"] = self.wall_ns
        out["busy_ns"] = self.busy_ns
        out["work_ns"] = self.work_ns
        return out


class Stopwatch:
    """Accumulates nanoseconds into an attribute of a target object."""

    def __init__(self, target, attr: str = "busy_ns", clock: Callable[[], int] = time.perf_counter_ns):
        self.target, self.attr, self.clock = target, attr, clock

    def __enter__(self):
        self._t0 = self.clock()
        return self

    def __exit__(self, *exc):
        setattr(self.target, self.attr, getattr(self.target, self.attr) + self.clock() - self._t0)
        return False
