"""Temporal cycles: simple cycles whose timestamps ascend from the anchor.

The search is the Johnson-style engine of :mod:`cyclenum.sequential` with
the blocked set replaced by per-vertex closing times: ``ct[v]`` is the
smallest arrival time at ``v`` that is known not to lead back to ``v0``
(arrivals ``t >= ct[v]`` are pruned).  A vertex whose search came back empty
registers, on each out-neighbour ``w`` it could not use, the departure time of
that edge; once ``ct[w]`` rises above it the registration fires and raises
the closing time of the registering vertex in turn.

Path bundles group the parallel edges from the current vertex by
destination, so a single branch of the search covers every timestamp choice
along one vertex sequence.  Cycle-unions restrict each anchored search to
vertices that are both reachable from the anchor's head after its timestamp
and able to reach the anchor's tail before the window closes.

With ``strict=False`` equal timestamps may follow each other.  A cycle is
still reported from its minimum ``(ts, id)`` edge, so a cycle is found only
when its timestamps do not decrease along the rotation that starts there.
"""

from __future__ import annotations

import math
import time
from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple, Sequence

from . import _backend
from .graph import GraphView, TemporalGraph
from .runtime import ScriptedScheduler, SearchState, Task, WorkStealingPool
from .sequential import _Engine, check_delta
from .stats import CycleSink, SearchStats

__all__ = [
    "ClosingTimes",
    "PathBundle",
    "CycleUnion",
    "TemporalOptions",
    "TemporalEngine",
    "temporal_reachability",
    "cycle_union",
    "expand_bundle",
    "bundle_count",
    "temporal_enumerate",
    "copy_on_steal_temporal",
]

INF = math.inf


@dataclass(frozen=True)
class TemporalOptions:
    closing_times: bool = True
    bundles: bool = True
    cycle_union: bool = True
    strict: bool = True
    weighted: bool = False  # count bundles without expanding them


class ClosingTimes:
    """Closing times plus the delayed-raise registrations ``waiters[w]``."""

    __slots__ = ("ct", "waiters")

    def __init__(self, n: int):
        self.ct = [INF] * n
        self.waiters: dict[int, list[tuple[int, int]]] = {}

    def blocked(self, w: int, t) -> bool:
        return t >= self.ct[w]

    def register(self, w: int, u: int, d: int) -> None:
        lst = self.waiters.get(w)
        if lst is None:
            self.waiters[w] = [(u, d)]
        else:
            lst.append((u, d))

    def raise_to(self, v: int, value, on_path, key) -> int:
        """Set ``ct[v] = value`` and fire every registration this frees.
        Returns how many closing times were raised by propagation."""
        ct, waiters = self.ct, self.waiters
        ct[v] = value
        stack = [v]
        raised = 0
        while stack:
            w = stack.pop()
            lst = waiters.get(w)
            if not lst:
                continue
            limit = ct[w]
            keep = []
            for u, d in lst:
                if d < limit:
                    if on_path[u]:
                        continue
                    k = key(d)
                    if k > ct[u]:
                        ct[u] = k
                        raised += 1
                        stack.append(u)
                else:
                    keep.append((u, d))
            if keep:
                waiters[w] = keep
            else:
                del waiters[w]
        return raised

    def copy(self) -> "ClosingTimes":
        c = ClosingTimes(0)
        c.ct = list(self.ct)
        c.waiters = {w: list(lst) for w, lst in self.waiters.items()}
        return c

    def words(self) -> int:
        return len(self.ct) + 2 * sum(len(v) for v in self.waiters.values())


@dataclass(frozen=True)
class PathBundle:
    """A vertex sequence with one set of candidate timestamps per hop.

    Hop entries are timestamps or ``(timestamp, edge id)`` pairs.  Each
    concrete path picks one entry per hop with ascending timestamps
    (strictly, unless ``strict`` is false).
    """

    vertices: tuple
    hops: tuple
    strict: bool = True

    @staticmethod
    def _ts(h):
        return h[0] if isinstance(h, tuple) else h

    def is_valid(self) -> bool:
        return bundle_count(self) > 0


def _sorted_hops(b: PathBundle):
    return [sorted(h, key=PathBundle._ts) for h in b.hops]


def bundle_count(b: PathBundle) -> int:
    """Number of concrete ascending paths, by dynamic programming."""
    ts = PathBundle._ts
    hops = _sorted_hops(b)
    if not hops:
        return 1
    prev_t = [ts(h) for h in hops[0]]
    prev_c = [1] * len(prev_t)
    for hop in hops[1:]:
        prefix = [0]
        for c in prev_c:
            prefix.append(prefix[-1] + c)
        cur_t, cur_c = [], []
        for h in hop:
            t = ts(h)
            k = bisect_left(prev_t, t) if b.strict else bisect_right(prev_t, t)
            cur_t.append(t)
            cur_c.append(prefix[k])
        prev_t, prev_c = cur_t, cur_c
    return sum(prev_c)


def expand_bundle(b: PathBundle) -> list[tuple]:
    """Every concrete ascending choice of one entry per hop."""
    ts = PathBundle._ts
    hops = _sorted_hops(b)
    out: list[tuple] = []

    def rec(i, last, acc):
        if i == len(hops):
            out.append(tuple(acc))
            return
        for h in hops[i]:
            t = ts(h)
            if last is None or (t > last if b.strict else t >= last):
                acc.append(h)
                rec(i + 1, t, acc)
                acc.pop()

    rec(0, None, [])
    return out


@dataclass
class CycleUnion:
    """Vertices that may lie on a temporal cycle through one anchor edge."""

    anchor: int
    members: set = field(default_factory=set)
    reaches_v0: bool = False

    def __contains__(self, v) -> bool:
        return v in self.members

    def __len__(self):
        return len(self.members)


def _forward(g: TemporalGraph, source, t0, lo, hi, strict, stop=None):
    """Earliest arrival times from ``source`` (departing after ``t0``) using
    edge ids in ``[lo, hi)``; ``stop`` is neither expanded nor re-entered.
    Returns ``(earliest, visits, reached_stop)``."""
    src, dst, tss = g._src, g._dst, g._ts
    earliest = {source: t0}
    reached = False
    visits = 0
    i = lo
    while i < hi:
        t = tss[i]
        j = i
        while j < hi and tss[j] == t:
            j += 1
        again = True
        while again:  # equal timestamps chain only in non-strict mode
            again = False
            for e in range(i, j):
                visits += 1
                u = src[e]
                a = earliest.get(u)
                if a is None or u == stop or (a >= t if strict else a > t):
                    continue
                w = dst[e]
                if w == stop:
                    reached = True
                    continue
                if w not in earliest:
                    earliest[w] = t
                    again = not strict
        i = j
    return earliest, visits, reached


def _backward(g: TemporalGraph, target, t_end, lo, hi, strict, stop=None):
    """Latest departure times towards ``target`` (arriving before ``t_end``)
    using edge ids in ``[lo, hi)``."""
    src, dst, tss = g._src, g._dst, g._ts
    latest = {target: t_end}
    visits = 0
    j = hi
    while j > lo:
        t = tss[j - 1]
        i = j
        while i > lo and tss[i - 1] == t:
            i -= 1
        again = True
        while again:
            again = False
            for e in range(j - 1, i - 1, -1):
                visits += 1
                w = dst[e]
                b = latest.get(w)
                u = src[e]
                if b is None or u == target or w == stop or (t >= b if strict else t > b):
                    continue
                if u not in latest:
                    latest[u] = t
                    again = not strict
        j = i
    return latest, visits


def temporal_reachability(
    view: GraphView, source: int, t0=-INF, direction: str = "forward", strict: bool = True
) -> bytearray:
    """Bitmap of vertices joined to ``source`` by time-respecting paths inside
    ``view``.  Forward paths leave ``source`` after ``t0``; backward paths
    reach ``source`` before ``t0`` (``t0`` defaults to no bound)."""
    g = view.graph
    bits = bytearray(g.vertex_count)
    if direction == "forward":
        reach, _, _ = _forward(g, source, t0, view.lo, view.hi, strict)
    elif direction == "backward":
        bound = INF if t0 == -INF else t0
        reach, _ = _backward(g, source, bound, view.lo, view.hi, strict)
    else:
        raise ValueError(f"direction must be 'forward' or 'backward', not {direction!r}")
    for v in reach:
        bits[v] = 1
    return bits


def _union(g: TemporalGraph, eid: int, lo: int, hi: int, strict: bool):
    v0, v1, t0 = g._src[eid], g._dst[eid], g._ts[eid]
    earliest, fv, reached = _forward(g, v1, t0, lo, hi, strict, stop=v0)
    members = {v0, v1}
    bv = 0
    if reached:
        latest, bv = _backward(g, v0, INF, lo, hi, strict, stop=v1)
        for v, a in earliest.items():
            b = latest.get(v)
            # a cycle enters v no earlier than a and leaves no later than b
            if b is not None and (a < b if strict else a <= b):
                members.add(v)
    return CycleUnion(eid, members, reached), fv + bv


def cycle_union(g: TemporalGraph, anchor: int, delta, strict: bool = True) -> CycleUnion:
    """Cycle-union of ``anchor`` for windows of size ``delta``."""
    check_delta(delta)
    t0 = g._ts[anchor]
    hi = g.last_eid_at_or_before(t0 + delta)
    return _union(g, anchor, anchor + 1, hi, strict)[0]


class TAnchor(NamedTuple):
    eid: int
    v0: int
    v1: int
    lo: int
    hi: int
    t0: int
    union: object  # set of admissible vertices, or None


class TemporalEngine(_Engine):
    """Anchored temporal-cycle search.

    Frame layout: ``[x, groups, gi, found, stolen, depth, arrival, lastp,
    i0, i1]``.  ``groups`` lists ``(w, hop)`` pairs, one per out-edge or, with
    bundles, one per destination; ``[i0, i1)`` is the slice of ``x``'s
    adjacency the frame may depart along.  ``st.extra`` holds the closing
    times and the hop set of every path edge.
    """

    kind = "temporal_call"

    def __init__(self, g, delta=math.inf, options: TemporalOptions = TemporalOptions(), **kw):
        super().__init__(g, delta, **kw)
        self.opt = options
        self.ot = g.out_ts
        self.strict = options.strict
        self.key = (lambda d: d) if options.strict else (lambda d: d + 1)

    def prepare(self, eid, ts, sink):
        if not (self.view_lo <= eid < self.view_hi):
            return None
        a = self.anchor_for(eid)
        if a.v0 == a.v1:
            if self.allow_self_loops:
                sink.emit((a.v0,), (eid,))
            return None
        union = None
        if self.opt.cycle_union:
            cu, visits = _union(self.g, eid, a.lo, a.hi, self.strict)
            ts.preproc_visits += visits
            if not cu.reaches_v0:
                return None
            union = cu.members
        elif self.precheck and not self._reaches(a, ts):
            return None
        return TAnchor(eid, a.v0, a.v1, a.lo, a.hi, self.g._ts[eid], union)

    def start(self, a: TAnchor, ts, sink) -> SearchState:
        st = SearchState(self.n, a)
        st.extra = _TExtra(ClosingTimes(self.n) if self.opt.closing_times else None, [])
        st.path.push(a.v0)
        if self.track:
            self._visit(a.v0)
        self._push(st, a.v1, [(a.t0, a.eid)], ts)
        return st

    def _push(self, st: SearchState, w: int, hop, ts) -> None:
        a = st.anchor
        arrival = hop[0][0]
        st.path.push(w, hop[0][1])
        st.extra.hops.append(hop)
        ts.tasks_executed += 1
        if self.track:
            self._visit(w)
        eids, stamps = self.oe[w], self.ot[w]
        i0 = bisect_left(eids, a.lo)
        i1 = bisect_left(eids, a.hi)
        k = bisect_right(stamps, arrival, i0, i1) if self.strict else bisect_left(stamps, arrival, i0, i1)
        if k > i0:
            i0 = k
        ts.edge_visits += i1 - i0
        od = self.od[w]
        if self.opt.bundles:
            idx: dict[int, int] = {}
            groups: list = []
            for i in range(i0, i1):
                d = od[i]
                g = idx.get(d)
                if g is None:
                    idx[d] = len(groups)
                    groups.append((d, [(stamps[i], eids[i])]))
                else:
                    groups[g][1].append((stamps[i], eids[i]))
        else:
            groups = [(od[i], [(stamps[i], eids[i])]) for i in range(i0, i1)]
        st.frames.append([w, groups, 0, False, False, len(st.path), arrival, -INF, i0, i1])

    def _take(self, st: SearchState, f, gi: int, ts, sink) -> None:
        """Handle group ``gi`` of frame ``f``: close a cycle or descend."""
        a = st.anchor
        w, hop = f[1][gi]
        if w == a.v0:
            f[3] = True
            last = hop[-1][0]
            if last > f[7]:
                f[7] = last
            self._emit_bundle(st, hop, sink)
            return
        if st.path.member[w] or (a.union is not None and w not in a.union):
            return
        cts = st.extra.ct
        if cts is not None:
            limit = cts.ct[w]
            if hop[0][0] >= limit:
                return
            if hop[-1][0] >= limit:
                hop = [h for h in hop if h[0] < limit]
        self._push(st, w, hop, ts)

    def _emit_bundle(self, st: SearchState, closing, sink) -> None:
        hops = st.extra.hops + [closing]
        if len(closing) == 1 and all(len(h) == 1 for h in st.extra.hops):
            st.cycles_found += 1
            if sink.mode == "count":
                sink.count += 1
            else:
                sink.emit(st.path.vertices, [h[0][1] for h in hops])
            return
        b = PathBundle(tuple(st.path.vertices), tuple(hops), self.strict)
        if sink.mode == "count" or self.opt.weighted:
            k = bundle_count(b)
            st.cycles_found += k
            sink.add_count(k)
            return
        for choice in expand_bundle(b):
            st.cycles_found += 1
            sink.emit(st.path.vertices, [h[1] for h in choice])

    def step(self, st: SearchState, ts, sink) -> bool:
        frames = st.frames
        f = frames[-1]
        gi = f[2]
        if gi < len(f[1]):
            f[2] = gi + 1
            self._take(st, f, gi, ts, sink)
            return True
        self._pop(st, ts)
        return bool(frames)

    def _pop(self, st: SearchState, ts) -> None:
        f = st.frames.pop()
        x = f[0]
        ex = st.extra
        cts = ex.ct
        hop = ex.hops.pop()
        st.path.pop()
        if cts is not None:
            a = st.anchor
            key = self.key
            base = key(f[7]) if f[3] else f[6]
            member = st.path.member
            union = a.union
            ct = cts.ct
            od, ot = self.od[x], self.ot[x]
            pending = []
            for i in range(f[8], f[9]):
                d = ot[i]
                k = key(d)
                if k <= base:
                    continue
                w = od[i]
                if w == a.v0:
                    base = k
                elif union is not None and w not in union:
                    continue
                elif member[w] or d >= ct[w]:
                    pending.append((w, d, k))
                else:
                    base = k
            for w, d, k in pending:
                if k > base:
                    cts.register(w, x, d)
            ts.unblock_propagations += cts.raise_to(x, base, member, key)
        if f[3] and st.frames:
            p = st.frames[-1]
            p[3] = True
            dep = hop[-1][0]
            if dep > p[7]:
                p[7] = dep

    def find_task(self, st: SearchState) -> Task | None:
        cut = self.cutoff_depth
        for k, f in enumerate(st.frames):
            if cut and f[5] > cut + 1:
                break
            if f[2] < len(f[1]):
                return Task(self.kind, st.anchor.eid, k, f[5], st, st.generation, payload=f[2])
        return None

    def steal(self, victim: SearchState, task: Task, ts, sink) -> SearchState:
        st = copy_on_steal_temporal(victim, task, self.key)
        f = victim.frames[task.frame]
        gi = f[2]
        f[2] = gi + 1
        f[4] = True
        victim.generation += 1
        ts.tasks_stolen += 1
        cts = st.extra.ct
        ts.record_copy(task.path_snapshot_len + (cts.words() if cts is not None else 0))
        holder = [f[0], f[1], gi, False, True, f[5], f[6], -INF, f[8], f[9]]
        self._take(st, holder, gi, ts, sink)
        return st


class _TExtra:
    __slots__ = ("ct", "hops")

    def __init__(self, ct, hops):
        self.ct = ct
        self.hops = hops


def copy_on_steal_temporal(victim: SearchState, task: Task, key=lambda d: d) -> SearchState:
    """Thief state for a temporal search: the path cut back to the task's
    snapshot and closing times in which every vertex dropped from the path is
    fully reopened (``ct = inf``), along with everything registered on it."""
    plen = task.path_snapshot_len
    st = SearchState(victim.n, victim.anchor)
    st.path = victim.path.copy(plen)
    vex = victim.extra
    cts = vex.ct.copy() if vex.ct is not None else None
    st.extra = _TExtra(cts, list(vex.hops[: plen - 1]))
    if cts is not None:
        member = st.path.member
        for v in reversed(victim.path.vertices[plen:]):
            cts.raise_to(v, INF, member, key)
    return st


def temporal_enumerate(
    g: TemporalGraph,
    delta,
    cfg=None,
    sink: CycleSink | None = None,
    stats: SearchStats | None = None,
    options: TemporalOptions | None = None,
    anchors: Sequence[int] | None = None,
    allow_self_loops: bool = False,
    **option_overrides,
) -> CycleSink:
    """Every temporal cycle of every window ``[t, t + delta]``, once each,
    reported from its first edge.  ``cfg`` is a
    :class:`~cyclenum.parallel.ParallelConfig` or ``None`` for a plain
    sequential run; its algorithm field is ignored."""
    check_delta(delta)
    opts = options or TemporalOptions()
    if option_overrides:
        opts = TemporalOptions(**{**opts.__dict__, **option_overrides})
    sink = sink if sink is not None else CycleSink()
    stats = stats if stats is not None else SearchStats()
    anchor_ids = range(g.edge_count) if anchors is None else anchors
    backend = getattr(cfg, "backend", "auto")
    if _backend.use_native(backend, stats):
        granularity = "coarse" if cfg is None else cfg.granularity
        threads = 1 if cfg is None else cfg.threads
        if granularity == "sequential":
            granularity, threads = "coarse", 1
        _backend.native_temporal(
            g, delta, opts, granularity, threads, sink, stats, anchor_ids, allow_self_loops,
            0 if cfg is None else cfg.cutoff_depth,
        )
        return sink
    engine = TemporalEngine(
        g, delta, opts, stats=stats, allow_self_loops=allow_self_loops,
        cutoff_depth=0 if cfg is None else cfg.cutoff_depth,
    )
    if cfg is None or cfg.granularity == "sequential":
        ts = stats.shard(0)
        t0 = time.perf_counter_ns()
        for eid in anchor_ids:
            engine.run_anchor(eid, ts, sink)
        dt = time.perf_counter_ns() - t0
        ts.busy_ns += dt
        stats.wall_ns += dt
        return sink
    pool = WorkStealingPool(
        engine, cfg.threads, anchor_ids, granularity=cfg.granularity, stats=stats, sink=sink,
        seed=cfg.seed,
    )
    pool.run()
    return sink


def scripted_temporal_run(g, delta, threads, seed, steal_prob=0.5, sink=None, stats=None, **opts):
    """Deterministic fine-grained temporal run under a seeded schedule."""
    check_delta(delta)
    sink = sink if sink is not None else CycleSink()
    engine = TemporalEngine(g, delta, TemporalOptions(**opts), stats=stats)
    sched = ScriptedScheduler(engine, threads, range(g.edge_count), stats=stats, sink=sink)
    sched.run_random(seed, steal_prob)
    return sink
