"""Disjoint-set forest used as the independent component oracle."""

from __future__ import annotations

import numpy as np


class UnionFind:
    """Union by size with path halving on the integers ``0..n-1``.

    >>> uf = UnionFind(4)
    >>> uf.union(0, 1); uf.union(2, 3)
    >>> uf.find(1) == uf.find(0), uf.find(1) == uf.find(2)
    (True, False)
    """

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[frozenset]:
        out: dict[int, set] = {}
        for x in range(len(self.parent)):
            out.setdefault(self.find(x), set()).add(x)
        return [frozenset(g) for g in out.values()]


def union_find_components(n: int, u, v) -> list[frozenset]:
    """Vertex sets of the connected components of the edge list ``(u, v)``."""
    uf = UnionFind(n)
    for a, b in zip(np.asarray(u).tolist(), np.asarray(v).tolist()):
        uf.union(a, b)
    return uf.groups()
