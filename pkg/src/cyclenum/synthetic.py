"""Generators for adversarial and random test graphs.

The figure-derived graphs keep their named vertices in ``graph.labels`` (for
example ``"v0"``, ``"b3"``) so tests and reports can refer to them.  Edge
order inside each adjacency list matters for the pruning counts, and all
timestamps are 0 unless stated otherwise, so input order is edge-id order.
"""

from __future__ import annotations

import random

from .graph import TemporalGraph

__all__ = [
    "worst_case",
    "fig3a",
    "fig5a",
    "fig6",
    "window_example",
    "random_graph",
    "random_temporal",
    "generate_synthetic",
    "SYNTHETIC_KINDS",
]


class _Builder:
    def __init__(self):
        self.ids: dict[str, int] = {}
        self.edges: list[tuple[int, int, int]] = []

    def v(self, name: str) -> int:
        return self.ids.setdefault(name, len(self.ids))

    def e(self, a: str, b: str, ts: int = 0) -> None:
        self.edges.append((self.v(a), self.v(b), ts))

    def build(self) -> TemporalGraph:
        labels = sorted(self.ids, key=self.ids.__getitem__)
        return TemporalGraph.from_edges(self.edges, len(labels), labels=labels)


def worst_case(n: int) -> TemporalGraph:
    """``v0 -> v1``; every ``v_i`` (i >= 1) points to ``v0`` and to each
    ``v_j`` with ``j > i``.  Every subset of ``v2..v_{n-1}`` closes one
    cycle through ``v0 -> v1``, so there are ``2**(n-2)`` cycles."""
    if n < 3:
        raise ValueError("worst-case graph needs n >= 3")
    b = _Builder()
    for i in range(n):
        b.v(f"v{i}")
    b.e("v0", "v1")
    for i in range(1, n):
        b.e(f"v{i}", "v0")
        for j in range(i + 1, n):
            b.e(f"v{i}", f"v{j}")
    return b.build()


def fig3a(m: int, k: int) -> TemporalGraph:
    """Two chains ``w1..wm`` and ``u1..um`` from ``v2`` back to ``v0``, every
    chain vertex also feeding the dead-end chain ``b1..bk``."""
    if m < 1 or k < 1:
        raise ValueError("fig3a needs m >= 1 and k >= 1")
    b = _Builder()
    b.e("v0", "v1")
    b.e("v1", "v0")
    b.e("v1", "v2")
    b.e("v2", "w1")
    b.e("v2", "u1")
    for c in "wu":
        for i in range(1, m + 1):
            nxt = f"{c}{i + 1}" if i < m else "v0"
            b.e(f"{c}{i}", nxt)
            b.e(f"{c}{i}", "b1")
    for i in range(1, k):
        b.e(f"b{i}", f"b{i + 1}")
    return b.build()


def fig5a(m: int) -> TemporalGraph:
    """Four parallel routes ``v1 -> u_i -> v2`` closing through ``v2 -> v0``,
    with ``v2`` also leading into a transitive tournament on ``b1..bm``.
    Four cycles; ``4 * 2**(m-1)`` maximal simple paths from ``v0``."""
    if m < 1:
        raise ValueError("fig5a needs m >= 1")
    b = _Builder()
    b.e("v0", "v1")
    for i in range(1, 5):
        b.e("v1", f"u{i}")
    for i in range(1, 5):
        b.e(f"u{i}", "v2")
    b.e("v2", "v0")
    for i in range(1, m + 1):
        b.e("v2", f"b{i}")
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            b.e(f"b{i}", f"b{j}")
    return b.build()


def fig6() -> TemporalGraph:
    """Copy-on-steal scenario: a search from ``v0 -> v1`` that reaches
    ``w3`` has blocked ``b1, b2`` (parked on ``w1``) and ``b3, b4`` (parked
    on ``v1``), while ``v1 -> u1`` is still pending."""
    b = _Builder()
    b.e("v0", "v1")
    b.e("v1", "w1")
    b.e("v1", "u1")
    b.e("w1", "b1")
    b.e("w1", "w2")
    b.e("b1", "b2")
    b.e("b2", "w1")
    b.e("w2", "b3")
    b.e("w2", "w3")
    b.e("b3", "b4")
    b.e("b4", "v1")
    b.e("w3", "v0")
    b.e("u1", "b1")
    return b.build()


def window_example() -> TemporalGraph:
    """Small timestamped graph: one (temporal) cycle inside ``[2:7]`` and two
    simple cycles inside ``[10:15]``."""
    b = _Builder()
    b.e("a", "b", 2)
    b.e("b", "c", 4)
    b.e("c", "a", 7)
    b.e("b", "d", 10)
    b.e("c", "d", 11)
    b.e("d", "b", 12)
    b.e("d", "c", 15)
    return b.build()


def random_graph(
    n: int, p_edge: float, seed: int | None = None, max_ts: int = 0, multi: int = 1
) -> TemporalGraph:
    """G(n, p) digraph without self-loops.  Timestamps are uniform on
    ``[0, max_ts]``; ``multi > 1`` draws up to that many parallel edges per
    selected pair."""
    if n < 0 or not (0.0 <= p_edge <= 1.0):
        raise ValueError("need n >= 0 and 0 <= p_edge <= 1")
    rng = random.Random(seed)
    edges = []
    for u in range(n):
        for v in range(n):
            if u != v and rng.random() < p_edge:
                for _ in range(rng.randint(1, multi) if multi > 1 else 1):
                    edges.append((u, v, rng.randint(0, max_ts) if max_ts else 0))
    return TemporalGraph.from_edges(edges, n)


def random_temporal(n: int, p_edge: float, seed: int | None = None, max_ts: int = 12, multi: int = 2):
    return random_graph(n, p_edge, seed=seed, max_ts=max_ts, multi=multi)


SYNTHETIC_KINDS = ("worst-case", "fig3a", "fig5a", "fig6", "window-example", "random", "random-temporal")


def generate_synthetic(kind: str, **params) -> TemporalGraph:
    """Dispatch by kind name.  Recognised params: ``n``, ``m``, ``k``,
    ``p_edge``, ``seed``, ``max_ts``; missing or ``None`` values take the
    defaults below."""

    def get(name, default):
        value = params.get(name)
        return default if value is None else value

    if kind == "worst-case":
        return worst_case(get("n", 6))
    if kind == "fig3a":
        return fig3a(get("m", 3), get("k", 4))
    if kind == "fig5a":
        return fig5a(get("m", 6))
    if kind == "fig6":
        return fig6()
    if kind == "window-example":
        return window_example()
    if kind == "random":
        return random_graph(get("n", 10), get("p_edge", 0.3), get("seed", None), get("max_ts", 0))
    if kind == "random-temporal":
        return random_temporal(get("n", 8), get("p_edge", 0.3), get("seed", None), get("max_ts", 12))
    raise ValueError(f"unknown synthetic kind {kind!r}")
