"""Directed temporal multigraphs with timestamp-sorted CSR adjacency.

Edge ids are assigned in ascending ``(timestamp, input position)`` order, so
every per-vertex adjacency list sorted by edge id is also sorted by
``(timestamp, edge id)``.  A time window therefore maps to one contiguous
range of edge ids, and windowed neighbour iteration is a bisection followed
by a slice.
"""

from __future__ import annotations

import io
import math
import re
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator, TextIO

import numpy as np

__all__ = [
    "EdgeRecord",
    "TimeWindow",
    "TemporalGraph",
    "GraphView",
    "EdgeListParseError",
    "load_edge_list",
    "dump_edge_list",
    "window_view",
]


class EdgeListParseError(ValueError):
    """Raised for malformed edge-list lines; carries the 1-based line number."""

    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line.strip()!r}")
        self.lineno = lineno


@dataclass(frozen=True)
class EdgeRecord:
    src: int
    dst: int
    ts: int


@dataclass(frozen=True)
class TimeWindow:
    """Closed interval ``[start, end]`` of timestamps."""

    start: int
    end: float  # int, or math.inf for an unbounded window

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError(f"window start {self.start} exceeds end {self.end}")

    @property
    def size(self):
        return self.end - self.start

    def __contains__(self, ts) -> bool:
        return self.start <= ts <= self.end


class TemporalGraph:
    """Immutable directed temporal multigraph.

    Parameters
    ----------
    vertex_count : int
        Number of (dense) vertices.
    src, dst, ts : sequences of int
        Edge endpoints and timestamps in input order.  They are re-sorted so
        that edge ids follow ``(ts, input position)``.
    labels : sequence, optional
        Original vertex identifiers, indexed by dense vertex id.
    """

    def __init__(self, vertex_count: int, src, dst, ts, labels=None):
        src = np.asarray(src, dtype=np.int64).reshape(-1)
        dst = np.asarray(dst, dtype=np.int64).reshape(-1)
        ts = np.asarray(ts, dtype=np.int64).reshape(-1)
        if not (len(src) == len(dst) == len(ts)):
            raise ValueError("src, dst and ts must have equal length")
        if len(src) and (src.min() < 0 or dst.min() < 0):
            raise ValueError("vertex ids must be non-negative")
        if len(src) and max(src.max(), dst.max()) >= vertex_count:
            raise ValueError("edge endpoint out of range")
        if len(ts) and ts.min() < 0:
            raise ValueError("timestamps must be non-negative")
        order = np.lexsort((np.arange(len(ts)), ts))
        self.vertex_count = int(vertex_count)
        self.src = src[order]
        self.dst = dst[order]
        self.ts = ts[order]
        self.input_position = order
        self.labels = list(labels) if labels is not None else list(range(vertex_count))

        n = self.vertex_count
        self.out_offsets, self.out_eids = _csr(self.src, n)
        self.in_offsets, self.in_eids = _csr(self.dst, n)

        # Python-list mirrors; the pure-Python kernels index these directly.
        src_l, dst_l, ts_l = self.src.tolist(), self.dst.tolist(), self.ts.tolist()
        self._src, self._dst, self._ts = src_l, dst_l, ts_l
        self.out_eid: list[list[int]] = []
        self.out_dst: list[list[int]] = []
        self.out_ts: list[list[int]] = []
        self.in_eid: list[list[int]] = []
        self.in_src: list[list[int]] = []
        self.in_ts: list[list[int]] = []
        oo, oe = self.out_offsets.tolist(), self.out_eids.tolist()
        io_, ie = self.in_offsets.tolist(), self.in_eids.tolist()
        for v in range(n):
            eids = oe[oo[v]:oo[v + 1]]
            self.out_eid.append(eids)
            self.out_dst.append([dst_l[e] for e in eids])
            self.out_ts.append([ts_l[e] for e in eids])
            eids = ie[io_[v]:io_[v + 1]]
            self.in_eid.append(eids)
            self.in_src.append([src_l[e] for e in eids])
            self.in_ts.append([ts_l[e] for e in eids])

    @classmethod
    def from_edges(cls, edges: Iterable, vertex_count: int | None = None, labels=None):
        """Build from ``(src, dst, ts)`` triples over dense vertex ids."""
        triples = [tuple(int(x) for x in e) for e in edges]
        if vertex_count is None:
            vertex_count = 1 + max((max(s, d) for s, d, _ in triples), default=-1)
        cols = list(zip(*triples)) if triples else [(), (), ()]
        return cls(vertex_count, cols[0], cols[1], cols[2], labels=labels)

    @property
    def edge_count(self) -> int:
        return len(self._src)

    @property
    def edges(self) -> list[EdgeRecord]:
        return [EdgeRecord(s, d, t) for s, d, t in zip(self._src, self._dst, self._ts)]

    def edge(self, eid: int) -> EdgeRecord:
        return EdgeRecord(self._src[eid], self._dst[eid], self._ts[eid])

    @property
    def max_timestamp(self) -> int:
        return self._ts[-1] if self._ts else 0

    def out_adjacency(self, v: int) -> list[tuple[int, int, int]]:
        """``(neighbour, ts, edge id)`` triples of ``v`` in edge-id order."""
        return list(zip(self.out_dst[v], self.out_ts[v], self.out_eid[v]))

    def in_adjacency(self, v: int) -> list[tuple[int, int, int]]:
        return list(zip(self.in_src[v], self.in_ts[v], self.in_eid[v]))

    def eid_range(self, window: TimeWindow) -> tuple[int, int]:
        """Half-open edge-id range ``[lo, hi)`` of edges inside ``window``."""
        lo = bisect_left(self._ts, window.start)
        if math.isinf(window.end):
            return lo, self.edge_count
        return lo, bisect_right(self._ts, int(window.end))

    def last_eid_at_or_before(self, t) -> int:
        """Exclusive upper edge-id bound for timestamps ``<= t``."""
        if math.isinf(t):
            return self.edge_count
        return bisect_right(self._ts, int(t))

    def window(self, window: TimeWindow) -> "GraphView":
        return GraphView(self, window)

    def __eq__(self, other):
        if not isinstance(other, TemporalGraph):
            return NotImplemented
        return (
            self.vertex_count == other.vertex_count
            and self._src == other._src
            and self._dst == other._dst
            and self._ts == other._ts
        )

    def __repr__(self):
        return f"TemporalGraph(n={self.vertex_count}, e={self.edge_count})"


def _csr(keys: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    # stable sort keeps edge ids ascending inside each bucket
    order = np.argsort(keys, kind="stable")
    counts = np.bincount(keys, minlength=n) if len(keys) else np.zeros(n, dtype=np.int64)
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return offsets, order.astype(np.int64)


class GraphView:
    """Read-only restriction of a graph to edges inside a time window."""

    def __init__(self, graph: TemporalGraph, window: TimeWindow):
        self.graph = graph
        self.window = window
        self.lo, self.hi = graph.eid_range(window)

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    def contains_edge(self, eid: int) -> bool:
        return self.lo <= eid < self.hi

    def slice(self, v: int, lo: int | None = None, hi: int | None = None) -> tuple[int, int]:
        """Index range into ``graph.out_eid[v]`` for edge ids in ``[lo, hi)``."""
        eids = self.graph.out_eid[v]
        lo = self.lo if lo is None else max(lo, self.lo)
        hi = self.hi if hi is None else min(hi, self.hi)
        return bisect_left(eids, lo), bisect_left(eids, hi)

    def neighbors(self, v: int) -> Iterator[tuple[int, int, int]]:
        g = self.graph
        i, j = self.slice(v)
        return zip(g.out_dst[v][i:j], g.out_ts[v][i:j], g.out_eid[v][i:j])

    def edge_ids(self) -> range:
        return range(self.lo, self.hi)


def window_view(g: TemporalGraph, w: TimeWindow) -> GraphView:
    return GraphView(g, w)


_SPLIT_WS = re.compile(r"\s+")


def load_edge_list(
    stream: TextIO | str, delimiter: str | None = None, has_header: bool = False
) -> TemporalGraph:
    """Parse ``src dst ts`` lines into a graph with densely remapped vertices.

    Lines starting with ``#`` or ``%`` and blank lines are skipped.  Vertex
    ids may be arbitrary integers; ``graph.labels`` maps dense ids back.
    Extra columns after the timestamp are ignored (Konect files carry a
    weight column).
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    remap: dict[int, int] = {}
    src, dst, ts = [], [], []
    header_pending = has_header
    for lineno, line in enumerate(stream, start=1):
        text = line.strip()
        if not text or text[0] in "#%":
            continue
        if header_pending:
            header_pending = False
            continue
        fields = text.split(delimiter) if delimiter else _SPLIT_WS.split(text)
        fields = [f.strip() for f in fields]
        if len(fields) < 3:
            raise EdgeListParseError(lineno, line, "expected 'src dst ts'")
        try:
            u, v, t = int(fields[0]), int(fields[1]), int(fields[2])
        except ValueError:
            raise EdgeListParseError(lineno, line, "non-integer field") from None
        if t < 0:
            raise EdgeListParseError(lineno, line, "negative timestamp")
        src.append(remap.setdefault(u, len(remap)))
        dst.append(remap.setdefault(v, len(remap)))
        ts.append(t)
    labels = sorted(remap, key=remap.__getitem__)
    return TemporalGraph(len(remap), src, dst, ts, labels=labels)


def dump_edge_list(g: TemporalGraph, stream: TextIO | None = None, delimiter: str = " ") -> str:
    """Serialise in edge-id order using the original vertex labels."""
    lab = g.labels
    lines = [
        f"{lab[s]}{delimiter}{lab[d]}{delimiter}{t}\n" for s, d, t in zip(g._src, g._dst, g._ts)
    ]
    text = "".join(lines)
    if stream is not None:
        stream.write(text)
    return text
