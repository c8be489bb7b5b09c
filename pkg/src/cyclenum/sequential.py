"""Sequential simple-cycle enumeration under time-window constraints.

Three engines share one anchored-search protocol.  For an anchor edge
``e0 = (v0 -> v1, t0)`` the admissible edges are those with an id strictly
greater than ``e0`` and a timestamp at most ``t0 + delta``; because edge ids
follow ``(timestamp, input order)``, that is the contiguous id range
``[e0 + 1, hi)``.  Every simple cycle is therefore reported exactly once,
from its minimum-``(ts, id)`` edge.

The engines keep their recursion in an explicit frame stack and advance one
adjacency edge per :meth:`step`.  The sequential drivers simply step until the
stack empties; the parallel drivers in :mod:`cyclenum.parallel` interleave
steps with steals through :meth:`find_task` and :meth:`steal`.
"""

from __future__ import annotations

import math
import time
from bisect import bisect_left
from typing import NamedTuple

from .graph import GraphView, TemporalGraph, TimeWindow
from .runtime import SearchState, Task, copy_on_steal_johnson, copy_on_steal_rt
from .stats import CycleSink, SearchStats
from .structures import BlockedSet, Path, UnblockList, recursive_unblock

__all__ = [
    "Anchor",
    "Path",
    "BlockedSet",
    "UnblockList",
    "CycleSink",
    "recursive_unblock",
    "TiernanEngine",
    "JohnsonEngine",
    "ReadTarjanEngine",
    "make_engine",
    "tiernan_from_edge",
    "johnson_from_edge",
    "read_tarjan_from_edge",
    "enumerate_all",
    "ALGORITHMS",
]

ALGORITHMS = ("tiernan", "johnson", "read_tarjan")


class Anchor(NamedTuple):
    eid: int
    v0: int
    v1: int
    lo: int  # first admissible edge id
    hi: int  # exclusive bound


def normalize_algo(name: str) -> str:
    key = name.replace("-", "_").lower()
    if key not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {name!r}")
    return key


def check_delta(delta) -> None:
    if delta is None or delta < 0 or (isinstance(delta, float) and math.isnan(delta)):
        raise ValueError(f"window size must be >= 0, got {delta!r}")


class _Engine:
    """Shared anchor handling: admissible range, self-loops, precheck."""

    kind = "call"

    def __init__(
        self,
        g: TemporalGraph,
        delta=math.inf,
        stats: SearchStats | None = None,
        allow_self_loops: bool = False,
        window: TimeWindow | None = None,
        precheck: bool = True,
        cutoff_depth: int = 0,
    ):
        self.g = g
        self.delta = delta
        self.od = g.out_dst
        self.oe = g.out_eid
        self.n = g.vertex_count
        self.allow_self_loops = allow_self_loops
        self.precheck = precheck
        self.cutoff_depth = cutoff_depth
        self.stats = stats
        self.track = bool(stats is not None and stats.track_vertices)
        if window is None:
            self.view_lo, self.view_hi = 0, g.edge_count
        else:
            self.view_lo, self.view_hi = g.eid_range(window)

    # -- anchor preparation -------------------------------------------------
    def anchor_for(self, eid: int) -> Anchor:
        g = self.g
        hi = self.view_hi
        if not math.isinf(self.delta):
            hi = min(hi, g.last_eid_at_or_before(g._ts[eid] + self.delta))
        return Anchor(eid, g._src[eid], g._dst[eid], eid + 1, hi)

    def prepare(self, eid: int, ts, sink: CycleSink) -> Anchor | None:
        """Anchor record for ``eid``, or ``None`` when no cycle can start there.

        Self-loops are reported here (when enabled) as length-one cycles.
        Otherwise a breadth-first search from ``v1`` over admissible edges,
        not expanding ``v0``, decides whether ``v0`` is reachable at all.
        """
        if not (self.view_lo <= eid < self.view_hi):
            return None
        a = self.anchor_for(eid)
        if a.v0 == a.v1:
            if self.allow_self_loops:
                sink.emit((a.v0,), (eid,))
            return None
        if self.precheck and not self._reaches(a, ts):
            return None
        return a

    def _reaches(self, a: Anchor, ts) -> bool:
        od, oe = self.od, self.oe
        v0, lo, hi = a.v0, a.lo, a.hi
        seen = {a.v1}
        queue = [a.v1]
        visits = 0
        found = False
        for u in queue:
            eids = oe[u]
            i, j = bisect_left(eids, lo), bisect_left(eids, hi)
            dsts = od[u]
            for k in range(i, j):
                visits += 1
                w = dsts[k]
                if w == v0:
                    found = True
                    break
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
            if found:
                break
        ts.preproc_visits += visits
        return found

    def _slice(self, v: int, a: Anchor) -> tuple[int, int]:
        eids = self.oe[v]
        return bisect_left(eids, a.lo), bisect_left(eids, a.hi)

    def _emit(self, sink, path: Path, last_eid: int) -> None:
        if sink.mode == "count":
            sink.count += 1
        else:
            sink.emit(path.vertices, path.edge_ids + [last_eid])

    def _visit(self, v: int) -> None:
        self.stats.visit_vertex(v)

    # -- whole-anchor driver ------------------------------------------------
    def run_anchor(self, eid: int, ts, sink) -> None:
        ts.tasks_executed += 1
        a = self.prepare(eid, ts, sink)
        if a is None:
            ts.anchors_skipped += 1
            return
        ts.anchors_searched += 1
        st = self.start(a, ts, sink)
        step = self.step
        if st.frames:
            while step(st, ts, sink):
                pass


class TiernanEngine(_Engine):
    """Brute-force path extension; also counts maximal simple paths (s).

    Frame layout: ``[v, cursor, end, extended, depth]``.
    """

    kind = "tiernan_call"

    def start(self, a: Anchor, ts, sink) -> SearchState:
        st = SearchState(self.n, a)
        st.path.push(a.v0)
        if self.track:
            self._visit(a.v0)
        self._push(st, a.v1, a.eid, ts)
        return st

    def _push(self, st, w, via, ts):
        st.path.push(w, via)
        ts.tasks_executed += 1
        if self.track:
            self._visit(w)
        i, j = self._slice(w, st.anchor)
        st.frames.append([w, i, j, False, len(st.path)])

    def step(self, st: SearchState, ts, sink) -> bool:
        frames = st.frames
        f = frames[-1]
        i = f[1]
        if i < f[2]:
            f[1] = i + 1
            ts.edge_visits += 1
            v = f[0]
            w = self.od[v][i]
            if w == st.anchor.v0:
                self._emit(sink, st.path, self.oe[v][i])
                st.cycles_found += 1
            elif not st.path.member[w]:
                f[3] = True
                self._push(st, w, self.oe[v][i], ts)
            return True
        frames.pop()
        if not f[3]:
            ts.maximal_paths += 1
        st.path.pop()
        return bool(frames)

    def find_task(self, st: SearchState) -> Task | None:
        cut = self.cutoff_depth
        for k, f in enumerate(st.frames):
            if cut and f[4] > cut + 1:
                break
            if f[1] < f[2]:
                return Task(self.kind, st.anchor.eid, k, f[4], st, st.generation, payload=f[1])
        return None

    def steal(self, victim: SearchState, task: Task, ts, sink) -> SearchState:
        f = victim.frames[task.frame]
        i = f[1]
        f[1] = i + 1
        victim.generation += 1
        st = SearchState(victim.n, victim.anchor)
        st.path = victim.path.copy(task.path_snapshot_len)
        ts.tasks_stolen += 1
        ts.record_copy(task.path_snapshot_len)
        ts.edge_visits += 1
        v = f[0]
        w = self.od[v][i]
        if w == st.anchor.v0:
            self._emit(sink, st.path, self.oe[v][i])
        elif not st.path.member[w]:
            f[3] = True
            self._push(st, w, self.oe[v][i], ts)
        return st


class JohnsonEngine(_Engine):
    """Johnson's blocked-set search.

    Frame layout: ``[v, cursor, end, found, stolen, depth, start]`` where
    ``depth`` is the path length with ``v`` on it.  A frame that lost
    neighbours to a thief does not know whether the thief found cycles, so
    on return it treats itself as productive whenever one of its neighbours
    is still usable in the owner's state; otherwise the classic rule applies.
    """

    kind = "johnson_call"

    def start(self, a: Anchor, ts, sink) -> SearchState:
        st = SearchState(self.n, a)
        if self.track:
            st.unblocks = self.stats.unblock_counts
        st.path.push(a.v0)
        st.blk[a.v0] = 1
        if self.track:
            self._visit(a.v0)
        self._push(st, a.v1, a.eid, ts)
        return st

    def _push(self, st, w, via, ts):
        st.path.push(w, via)
        st.blk[w] = 1
        ts.tasks_executed += 1
        if self.track:
            self._visit(w)
        i, j = self._slice(w, st.anchor)
        st.frames.append([w, i, j, False, False, len(st.path), i])

    def step(self, st: SearchState, ts, sink) -> bool:
        frames = st.frames
        f = frames[-1]
        i = f[1]
        if i < f[2]:
            f[1] = i + 1
            ts.edge_visits += 1
            v = f[0]
            w = self.od[v][i]
            if w == st.anchor.v0:
                f[3] = True
                self._emit(sink, st.path, self.oe[v][i])
                st.cycles_found += 1
            elif not st.blk[w]:
                self._push(st, w, self.oe[v][i], ts)
            return True
        self._pop(st, ts)
        return bool(frames)

    def _pop(self, st: SearchState, ts) -> None:
        f = st.frames.pop()
        v, found = f[0], f[3]
        blk = st.blk
        v0 = st.anchor.v0
        nbrs = self.od[v][f[6]:f[2]]
        if not found and f[4]:
            for w in nbrs:
                if w == v0 or not blk[w]:
                    found = True
                    break
        if found:
            ts.unblock_propagations += recursive_unblock(v, blk, st.blist, st.unblocks)
        else:
            blist = st.blist
            for w in nbrs:
                if w != v0:
                    blist.add(w, v)
        st.path.pop()
        if found and st.frames:
            st.frames[-1][3] = True

    def find_task(self, st: SearchState) -> Task | None:
        cut = self.cutoff_depth
        for k, f in enumerate(st.frames):
            if cut and f[5] > cut + 1:
                break
            if f[1] < f[2]:
                return Task(self.kind, st.anchor.eid, k, f[5], st, st.generation, payload=f[1])
        return None

    def steal(self, victim: SearchState, task: Task, ts, sink) -> SearchState:
        """Claim one neighbour of the task's frame and restore the victim's
        state to that frame's creation point."""
        st = copy_on_steal_johnson(victim, task)
        f = victim.frames[task.frame]
        i = f[1]
        f[1] = i + 1
        f[4] = True
        victim.generation += 1
        if self.track:
            st.unblocks = self.stats.unblock_counts
        ts.tasks_stolen += 1
        ts.record_copy(st.words())
        ts.edge_visits += 1
        v = f[0]
        w = self.od[v][i]
        if w == st.anchor.v0:
            self._emit(sink, st.path, self.oe[v][i])
        elif not st.blk[w]:
            self._push(st, w, self.oe[v][i], ts)
        return st


class ReadTarjanEngine(_Engine):
    """Read-Tarjan path-extension search.

    Frame layout: ``[cursor, end, skip, ext, pos, base_len, log_mark, x]``.
    A frame first tries the alternate edges at ``x`` (all but ``skip``, the
    edge its extension takes next), spawning a child for each alternate that
    has an extension back to ``v0``; it then advances ``x`` one hop along
    ``ext``.  Blocked vertices discovered by a frame are recorded in
    ``blk_log`` and rolled back when the frame returns, so a child's
    discoveries never reach its parent.
    """

    kind = "rt_call"

    def start(self, a: Anchor, ts, sink) -> SearchState:
        st = SearchState(self.n, a)
        st.path.push(a.v0)
        ts.tasks_executed += 1
        ext = self._extend(st, a.v1, a.eid, ts)
        if ext is not None:
            st.frames.append([0, 0, None, ext, 0, 1, 0, a.v0])
        return st

    def _extend(self, st: SearchState, y: int, via: int, ts):
        """DFS for a path from ``y`` to ``v0`` avoiding the path and blocked
        vertices.  Strongly connected regions that finish without reaching
        ``v0`` are blocked (and logged).  Returns ``[(eid, vertex), ...]``
        starting with ``(via, y)`` and ending at ``v0``, or ``None``."""
        a = st.anchor
        v0, lo, hi = a.v0, a.lo, a.hi
        od, oe = self.od, self.oe
        member, blk, log = st.path.member, st.blk, st.blk_log
        track = self.track
        pre = {y: 0}
        low = {y: 0}
        tent = [y]
        on_tent = {y}
        eids = oe[y]
        stack = [[y, bisect_left(eids, lo), bisect_left(eids, hi)]]
        via_stack = [via]
        visits = 0
        if track:
            self._visit(y)
        try:
            while stack:
                fr = stack[-1]
                u = fr[0]
                k = fr[1]
                if k < fr[2]:
                    fr[1] = k + 1
                    visits += 1
                    w = od[u][k]
                    if w == v0:
                        ext = [(via_stack[d], stack[d][0]) for d in range(len(stack))]
                        ext.append((oe[u][k], v0))
                        return ext
                    if member[w] or blk[w]:
                        continue
                    p = pre.get(w)
                    if p is not None:
                        if w in on_tent and p < low[u]:
                            low[u] = p
                        continue
                    pre[w] = low[w] = len(pre)
                    tent.append(w)
                    on_tent.add(w)
                    if track:
                        self._visit(w)
                    weids = oe[w]
                    stack.append([w, bisect_left(weids, lo), bisect_left(weids, hi)])
                    via_stack.append(oe[u][k])
                else:
                    stack.pop()
                    via_stack.pop()
                    lu = low[u]
                    if lu == pre[u]:
                        while True:
                            z = tent.pop()
                            on_tent.discard(z)
                            blk[z] = 1
                            log.append(z)
                            if z == u:
                                break
                    elif stack:
                        par = stack[-1][0]
                        if lu < low[par]:
                            low[par] = lu
            return None
        finally:
            ts.edge_visits += visits

    def step(self, st: SearchState, ts, sink) -> bool:
        frames = st.frames
        f = frames[-1]
        c = f[0]
        if c < f[1]:
            f[0] = c + 1
            x = f[7]
            eid = self.oe[x][c]
            if eid == f[2]:
                return True
            ts.edge_visits += 1
            y = self.od[x][c]
            if y == st.anchor.v0:
                ext = [(eid, y)]
            elif st.path.member[y] or st.blk[y]:
                return True
            else:
                ext = self._extend(st, y, eid, ts)
                if ext is None:
                    return True
            ts.tasks_executed += 1
            frames.append([0, 0, None, ext, 0, len(st.path), len(st.blk_log), x])
            return True
        ext, pos = f[3], f[4]
        if pos < len(ext):
            f[4] = pos + 1
            eid, y = ext[pos]
            if y == st.anchor.v0:
                self._emit(sink, st.path, eid)
                st.cycles_found += 1
            else:
                st.path.push(y, eid)
                f[7] = y
                i, j = self._slice(y, st.anchor)
                f[0], f[1] = i, j
                f[2] = ext[pos + 1][0]
            return True
        frames.pop()
        st.path.truncate(f[5])
        log, blk = st.blk_log, st.blk
        for z in log[f[6]:]:
            blk[z] = 0
        del log[f[6]:]
        return bool(frames)

    def find_task(self, st: SearchState) -> Task | None:
        frames = st.frames
        cut = self.cutoff_depth
        for k, f in enumerate(frames):
            if cut and k > cut:
                break
            if f[0] < f[1] or f[4] < len(f[3]):
                if k + 1 < len(frames):
                    nxt = frames[k + 1]
                    plen, mark = nxt[5], nxt[6]
                else:
                    plen, mark = len(st.path), len(st.blk_log)
                return Task(self.kind, st.anchor.eid, k, plen, st, st.generation, log_mark=mark)
        return None

    def steal(self, victim: SearchState, task: Task, ts, sink) -> SearchState:
        """Take over the whole remaining continuation of one frame."""
        st = copy_on_steal_rt(victim, task)
        f = victim.frames[task.frame]
        st.frames.append([f[0], f[1], f[2], f[3], f[4], f[5], 0, f[7]])
        f[0] = f[1]
        f[4] = len(f[3])
        victim.generation += 1
        ts.tasks_stolen += 1
        ts.record_copy(task.path_snapshot_len + victim.n)
        return st


_ENGINES = {"tiernan": TiernanEngine, "johnson": JohnsonEngine, "read_tarjan": ReadTarjanEngine}


def make_engine(algo: str, g: TemporalGraph, delta=math.inf, **kw) -> _Engine:
    return _ENGINES[normalize_algo(algo)](g, delta, **kw)


def _from_edge(algo, view: GraphView, e0: int, sink, stats, **kw) -> None:
    if not view.contains_edge(e0):
        raise ValueError(f"edge {e0} is outside the view's window")
    stats = stats if stats is not None else SearchStats()
    engine = make_engine(algo, view.graph, math.inf, stats=stats, window=view.window, **kw)
    engine.run_anchor(e0, stats.shard(0), sink)


def tiernan_from_edge(view: GraphView, e0: int, sink: CycleSink, stats: SearchStats | None = None, **kw):
    """All simple cycles of ``view`` anchored at ``e0``, by brute force."""
    _from_edge("tiernan", view, e0, sink, stats, **kw)


def johnson_from_edge(view: GraphView, e0: int, sink: CycleSink, stats: SearchStats | None = None, **kw):
    """All simple cycles of ``view`` anchored at ``e0``, Johnson pruning."""
    _from_edge("johnson", view, e0, sink, stats, **kw)


def read_tarjan_from_edge(view: GraphView, e0: int, sink: CycleSink, stats: SearchStats | None = None, **kw):
    """All simple cycles of ``view`` anchored at ``e0``, via path extensions."""
    _from_edge("read_tarjan", view, e0, sink, stats, **kw)


def enumerate_all(
    g: TemporalGraph,
    delta,
    algo: str = "johnson",
    sink: CycleSink | None = None,
    stats: SearchStats | None = None,
    allow_self_loops: bool = False,
    anchors=None,
) -> CycleSink:
    """Every simple cycle whose timestamps fit in some ``[t, t + delta]``,
    reported once from its minimum ``(ts, id)`` edge."""
    check_delta(delta)
    sink = sink if sink is not None else CycleSink()
    stats = stats if stats is not None else SearchStats()
    engine = make_engine(algo, g, delta, stats=stats, allow_self_loops=allow_self_loops)
    ts = stats.shard(0)
    t0 = time.perf_counter_ns()
    for eid in range(g.edge_count) if anchors is None else anchors:
        engine.run_anchor(eid, ts, sink)
    dt = time.perf_counter_ns() - t0
    ts.busy_ns += dt
    stats.wall_ns += dt
    return sink
