"""Work-stealing execution of anchored cycle searches.

Each worker owns at most one :class:`SearchState` at a time and advances it
one step at a time through its engine.  Outstanding recursive calls live in
the state's frame stack; the remaining neighbours of a frame are the tasks
it has spawned.  The owner consumes the deepest frame first (LIFO) while a
thief takes work from the shallowest frame that still has some (FIFO), and
receives a private copy of the victim's state restored to the moment that
frame was created (copy-on-steal).

Locking follows one rule: a thread holds at most one guard at a time.  A
worker holds its own guard while it mutates its state and yields it between
steps whenever a thief has announced itself, so a thief always copies a
consistent state.
"""

from __future__ import annotations

import os
import random
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .stats import CycleSink, SearchStats, Stopwatch
from .structures import BlockedSet, Path, UnblockList, recursive_unblock

__all__ = [
    "Task",
    "SearchState",
    "copy_on_steal_johnson",
    "copy_on_steal_rt",
    "WorkStealingPool",
    "ScriptedScheduler",
    "default_thread_count",
]

TASK_KINDS = ("johnson_call", "rt_call", "rt_extension", "preproc", "tiernan_call", "temporal_call")


def default_thread_count() -> int:
    """Thread count from ``CYCLENUM_THREADS``, else the CPU count."""
    env = os.environ.get("CYCLENUM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class Task:
    """A unit of work taken from a victim's frame stack.

    ``path_snapshot_len`` is the length of the path when the task was
    created, ``log_mark`` the length of the blocking log at that time
    (Read-Tarjan only), ``frame`` the index of the creating frame and
    ``payload`` the claimed continuation (an adjacency index for
    Johnson-style calls, a frame copy for Read-Tarjan).
    """

    kind: str
    anchor: int
    frame: int
    path_snapshot_len: int
    owner_state: "SearchState" = field(repr=False, compare=False)
    generation: int = 0
    log_mark: int = 0
    payload: Any = None


class SearchState:
    """Mutable search state owned by one worker: path, blocked set, unblock
    lists, pending frames, and a guard taken by thieves while copying."""

    def __init__(self, n: int, anchor=None):
        self.anchor = anchor
        self.n = n
        self.path = Path(n)
        self.blk = BlockedSet(n)
        self.blist = UnblockList()
        self.blk_log: list[int] = []
        self.frames: list = []
        self.generation = 0
        self.guard = threading.Lock()
        self.extra: Any = None
        self.cycles_found = 0
        self.unblocks: dict | None = None

    @property
    def pi(self) -> list[int]:
        return self.path.vertices

    def blocked_off_path(self) -> set[int]:
        member = self.path.member
        return {v for v, b in enumerate(self.blk) if b and not member[v]}

    def words(self) -> int:
        return len(self.path) + self.n + self.blist.size()


def copy_on_steal_johnson(victim: SearchState, task: Task) -> SearchState:
    """Fresh state for a thief: the victim's path truncated to the task's
    snapshot, deep copies of the blocked set and unblock lists, then a
    recursive unblock of every vertex the victim pushed after the snapshot,
    latest first.  The victim is not modified.  Caller holds the victim's
    guard."""
    assert task.owner_state is victim and task.generation == victim.generation
    st = SearchState(victim.n, victim.anchor)
    st.path = victim.path.copy(task.path_snapshot_len)
    st.blk = victim.blk.copy()
    st.blist = victim.blist.deep_copy()
    for v in reversed(victim.path.vertices[task.path_snapshot_len:]):
        recursive_unblock(v, st.blk, st.blist)
    return st


def copy_on_steal_rt(victim: SearchState, task: Task) -> SearchState:
    """Fresh Read-Tarjan state: path truncated to the snapshot and the
    blocked set rolled back to the task's log mark.  No unblock lists are
    involved and nothing is unblocked recursively."""
    assert task.owner_state is victim
    st = SearchState(victim.n, victim.anchor)
    st.path = victim.path.copy(task.path_snapshot_len)
    st.blk = victim.blk.copy()
    for v in victim.blk_log[task.log_mark:]:
        st.blk[v] = 0
    return st


class _Worker:
    __slots__ = ("wid", "state", "guard", "requests", "stats", "sink")

    def __init__(self, wid, stats, sink):
        self.wid = wid
        self.state = None
        self.guard = threading.Lock()
        self.requests: list = []
        self.stats = stats
        self.sink = sink


class _AnchorFeed:
    """Hands out anchor edges in order; counts searches still in flight."""

    def __init__(self, anchors: Iterable[int]):
        self._it = iter(anchors)
        self._lock = threading.Lock()
        self.exhausted = False
        self.active = 0

    def take(self):
        with self._lock:
            if self.exhausted:
                return None
            eid = next(self._it, None)
            if eid is None:
                self.exhausted = True
                return None
            self.active += 1
            return eid

    def adjust(self, delta: int) -> None:
        with self._lock:
            self.active += delta

    def finished(self) -> bool:
        with self._lock:
            return self.exhausted and self.active == 0


def _start_anchor(engine, eid, ts, sink):
    ts.tasks_executed += 1  # the preprocessing task
    anchor = engine.prepare(eid, ts, sink)
    if anchor is None:
        ts.anchors_skipped += 1
        return None
    ts.anchors_searched += 1
    st = engine.start(anchor, ts, sink)
    return st if st.frames else None


class WorkStealingPool:
    """Threaded scheduler.

    ``granularity="coarse"`` hands whole anchored searches to threads;
    ``"fine"`` additionally lets idle threads steal pending calls from busy
    ones.  Per-thread sinks and stats shards are merged by the caller.
    """

    def __init__(
        self,
        engine,
        threads: int,
        anchors: Iterable[int],
        granularity: str = "fine",
        stats: SearchStats | None = None,
        sink: CycleSink | None = None,
        seed: int | None = None,
    ):
        if threads < 1:
            raise ValueError("threads must be >= 1")
        self.engine = engine
        self.p = threads
        self.feed = _AnchorFeed(anchors)
        self.fine = granularity == "fine"
        self.stats = stats if stats is not None else SearchStats()
        self.stats.resize(threads)
        self.sink = sink if sink is not None else CycleSink()
        self.workers = [
            _Worker(i, self.stats.shard(i), self.sink.fork()) for i in range(threads)
        ]
        self._rng = random.Random(seed)

    def run(self) -> None:
        t0 = time.perf_counter_ns()
        if self.p == 1:
            self._loop(self.workers[0])
        else:
            threads = [
                threading.Thread(target=self._loop, args=(w,), daemon=True) for w in self.workers
            ]
            for t in threads:
                t.start()
            for t in threads:
                t.join()
        self.stats.wall_ns += time.perf_counter_ns() - t0
        for w in self.workers:
            self.sink.merge(w.sink)

    def _loop(self, w: _Worker) -> None:
        engine, feed = self.engine, self.feed
        rng = random.Random(self._rng.random())
        idle_spins = 0
        while True:
            st = None
            eid = feed.take()
            if eid is not None:
                with Stopwatch(w.stats):
                    st = _start_anchor(engine, eid, w.stats, w.sink)
                if st is None:
                    feed.adjust(-1)
                    continue
            elif self.fine:
                st = self._steal(w, rng)
            if st is None:
                if feed.finished():
                    return
                idle_spins += 1
                time.sleep(0 if idle_spins < 64 else 0.0005)
                continue
            idle_spins = 0
            self._execute(w, st)
            feed.adjust(-1)

    def _execute(self, w: _Worker, st: SearchState) -> None:
        step = self.engine.step
        ts, sink, requests, guard = w.stats, w.sink, w.requests, w.guard
        with Stopwatch(ts):
            guard.acquire()
            w.state = st
            try:
                while True:
                    if requests:
                        guard.release()
                        while requests:
                            time.sleep(0)
                        guard.acquire()
                    if not step(st, ts, sink):
                        break
            finally:
                w.state = None
                guard.release()

    def _steal(self, thief: _Worker, rng: random.Random):
        victims = [v for v in self.workers if v is not thief and v.state is not None]
        rng.shuffle(victims)
        for victim in victims:
            victim.requests.append(thief.wid)
            try:
                with victim.guard:
                    st = victim.state
                    if st is None:
                        continue
                    task = self.engine.find_task(st)
                    if task is None:
                        continue
                    with Stopwatch(thief.stats):
                        new = self.engine.steal(st, task, thief.stats, thief.sink)
                    # counted while the victim's search is still in flight
                    self.feed.adjust(1)
            finally:
                victim.requests.pop()
            if new.frames:
                return new
            self.feed.adjust(-1)
        return None


class ScriptedScheduler:
    """Deterministic single-threaded simulation of ``threads`` workers.

    Drive it explicitly with :meth:`take_anchor`, :meth:`step` and
    :meth:`steal`, or let :meth:`run_random` interleave workers and inject
    steals from a seeded RNG.  Uses the same engine entry points as the
    threaded pool, so any schedule it produces is one the pool could produce.
    """

    def __init__(self, engine, threads: int, anchors: Sequence[int], stats=None, sink=None):
        self.engine = engine
        self.p = threads
        self.anchors = list(anchors)
        self._next = 0
        self.stats = stats if stats is not None else SearchStats()
        self.stats.resize(threads)
        self.sink = sink if sink is not None else CycleSink()
        self.states: list[SearchState | None] = [None] * threads
        self.trace: list[tuple] = []

    def take_anchor(self, w: int) -> bool:
        """Give worker ``w`` the next anchor that survives preprocessing."""
        assert self.states[w] is None
        while self._next < len(self.anchors):
            eid = self.anchors[self._next]
            self._next += 1
            st = _start_anchor(self.engine, eid, self.stats.shard(w), self.sink)
            self.trace.append(("anchor", w, eid))
            if st is not None:
                self.states[w] = st
                return True
        return False

    def step(self, w: int, k: int = 1) -> int:
        """Advance worker ``w`` by up to ``k`` steps; returns steps taken."""
        done = 0
        st = self.states[w]
        while st is not None and done < k:
            done += 1
            if not self.engine.step(st, self.stats.shard(w), self.sink):
                self.states[w] = st = None
        self.trace.append(("step", w, done))
        return done

    def step_until(self, w: int, predicate, limit: int = 1_000_000) -> None:
        for _ in range(limit):
            st = self.states[w]
            if st is None or predicate(st):
                return
            self.step(w)
        raise RuntimeError("predicate not reached")

    def steal(self, thief: int, victim: int) -> Task | None:
        """Worker ``thief`` (idle) steals from ``victim``'s frame stack."""
        assert self.states[thief] is None
        st = self.states[victim]
        if st is None:
            return None
        task = self.engine.find_task(st)
        if task is None:
            return None
        new = self.engine.steal(st, task, self.stats.shard(thief), self.sink)
        self.trace.append(("steal", thief, victim, task.frame))
        self.states[thief] = new if new.frames else None
        return task

    def idle(self, w: int) -> bool:
        return self.states[w] is None

    def run_to_completion(self) -> None:
        """Finish everything round-robin without further steals."""
        while True:
            progressed = False
            for w in range(self.p):
                if self.states[w] is None and self.take_anchor(w):
                    progressed = True
                if self.states[w] is not None:
                    self.step(w, 64)
                    progressed = True
            if not progressed:
                return

    def run_random(self, seed: int, steal_prob: float = 0.5, burst: int = 4) -> None:
        rng = random.Random(seed)
        while True:
            busy = [w for w in range(self.p) if self.states[w] is not None]
            w = rng.randrange(self.p)
            if self.states[w] is None:
                if busy and rng.random() < steal_prob:
                    if self.steal(w, rng.choice(busy)) is not None:
                        continue
                if self.take_anchor(w):
                    continue
                if not busy:
                    return
                victims = [v for v in busy if v != w]
                if victims:
                    self.steal(w, rng.choice(victims))
                continue
            self.step(w, rng.randint(1, burst))
