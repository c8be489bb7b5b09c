"""Search-state building blocks shared by the sequential and parallel searches."""

from __future__ import annotations

__all__ = ["Path", "BlockedSet", "UnblockList", "recursive_unblock"]


class Path:
    """The current simple path: vertices, the edges joining them, and a
    membership bitmap for O(1) "is v on the path" tests."""

    __slots__ = ("vertices", "edge_ids", "member")

    def __init__(self, n: int):
        self.vertices: list[int] = []
        self.edge_ids: list[int] = []
        self.member = bytearray(n)

    def push(self, v: int, via: int | None = None) -> None:
        if via is not None:
            self.edge_ids.append(via)
        self.vertices.append(v)
        self.member[v] = 1

    def pop(self) -> int:
        v = self.vertices.pop()
        self.member[v] = 0
        if self.edge_ids:
            self.edge_ids.pop()
        return v

    def truncate(self, length: int) -> list[int]:
        """Drop vertices beyond ``length``; returns them in path order."""
        removed = self.vertices[length:]
        for v in removed:
            self.member[v] = 0
        del self.vertices[length:]
        del self.edge_ids[max(length - 1, 0):]
        return removed

    def copy(self, length: int | None = None) -> "Path":
        length = len(self.vertices) if length is None else length
        p = Path(len(self.member))
        p.vertices = self.vertices[:length]
        p.edge_ids = self.edge_ids[: max(length - 1, 0)]
        for v in p.vertices:
            p.member[v] = 1
        return p

    def __len__(self):
        return len(self.vertices)

    def __contains__(self, v):
        return bool(self.member[v])

    def __iter__(self):
        return iter(self.vertices)


class BlockedSet(bytearray):
    """Bitmap over vertex ids."""

    def __new__(cls, n: int = 0, members=()):
        return super().__new__(cls, n)

    def __init__(self, n: int = 0, members=()):
        super().__init__(n)
        for v in members:
            self[v] = 1

    def members(self) -> set[int]:
        return {v for v, b in enumerate(self) if b}

    def copy(self) -> "BlockedSet":
        b = BlockedSet(0)
        b.extend(self)
        return b


class UnblockList(dict):
    """``Blist[w]``: vertices to unblock once ``w`` is unblocked."""

    def add(self, w: int, v: int) -> None:
        s = self.get(w)
        if s is None:
            self[w] = {v}
        else:
            s.add(v)

    def deep_copy(self) -> "UnblockList":
        out = UnblockList()
        for k, s in self.items():
            out[k] = set(s)
        return out

    def size(self) -> int:
        return sum(len(s) for s in self.values())


def recursive_unblock(v: int, blk, blist, counts: dict | None = None) -> int:
    """Unblock ``v`` and, transitively, everything parked on its unblock list.

    Returns the number of vertices unblocked.  A vertex that is not blocked
    is left alone.
    """
    if not blk[v]:
        return 0
    blk[v] = 0
    stack = [v]
    unblocked = 1
    while stack:
        u = stack.pop()
        if counts is not None:
            counts[u] = counts.get(u, 0) + 1
        parked = blist.pop(u, None)
        if parked:
            for w in parked:
                if blk[w]:
                    blk[w] = 0
                    stack.append(w)
                    unblocked += 1
    return unblocked
