"""Edge indexing on K_n and small graph utilities.

Vertices are ``0..n-1``. The edge ``{u, v}`` with ``u < v`` gets the rank of
``(u, v)`` in lexicographic order, so ``(0, 1) -> 0`` and
``(n-2, n-1) -> n(n-1)/2 - 1``.
"""

from __future__ import annotations

import math
from typing import Iterable

from .errors import InvalidArgument


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def _row_start(u: int, n: int) -> int:
    # number of pairs (x, y) with x < u
    return u * n - u * (u + 1) // 2


def edge_index(u: int, v: int, n: int) -> int:
    if not (0 <= u < n and 0 <= v < n):
        raise InvalidArgument(f"vertex out of range for n={n}: ({u}, {v})")
    if u == v:
        raise InvalidArgument(f"self-loop ({u}, {v}) is not an edge")
    if u > v:
        u, v = v, u
    return _row_start(u, n) + (v - u - 1)


def edge_endpoints(e: int, n: int) -> tuple[int, int]:
    m = num_edges(n)
    if not 0 <= e < m:
        raise InvalidArgument(f"edge id {e} out of range [0, {m})")
    # largest u with row_start(u) <= e; solve the quadratic, then fix rounding
    b = 2 * n - 1
    u = int((b - math.sqrt(b * b - 8 * e)) // 2)
    u = max(0, min(u, n - 2))
    while _row_start(u, n) > e:
        u -= 1
    while u + 1 <= n - 2 and _row_start(u + 1, n) <= e:
        u += 1
    v = e - _row_start(u, n) + u + 1
    return u, v


def endpoint_table(n: int) -> tuple[list[int], list[int]]:
    """Return lists ``(us, vs)`` with the endpoints of every edge id."""
    us: list[int] = []
    vs: list[int] = []
    for u in range(n - 1):
        k = n - 1 - u
        us.extend([u] * k)
        vs.extend(range(u + 1, n))
    return us, vs


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size
        self.components = size

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


class SimpleGraph:
    """Undirected simple graph on vertices ``0..n-1`` keyed by canonical edge ids.

    Build it once and treat it as a value afterwards; analysis code makes
    throwaway snapshots freely.
    """

    __slots__ = ("n", "edges", "adj")

    def __init__(self, n: int, edges: Iterable[int] = ()):
        if n < 0:
            raise InvalidArgument("n must be non-negative")
        self.n = n
        self.edges: set[int] = set()
        self.adj: list[set[int]] = [set() for _ in range(n)]
        for e in edges:
            self.add_edge_id(e)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "SimpleGraph":
        g = cls(n)
        for u, v in pairs:
            g.add_edge(u, v)
        return g

    def add_edge(self, u: int, v: int) -> None:
        e = edge_index(u, v, self.n)
        if e in self.edges:
            return
        self.edges.add(e)
        self.adj[u].add(v)
        self.adj[v].add(u)

    def add_edge_id(self, e: int) -> None:
        if e in self.edges:
            return
        u, v = edge_endpoints(e, self.n)
        self.edges.add(e)
        self.adj[u].add(v)
        self.adj[v].add(u)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(edge_endpoints(e, self.n) for e in self.edges)

    def num_edges(self) -> int:
        return len(self.edges)

    def induced(self, keep: Iterable[int]) -> "SimpleGraph":
        """Same vertex set, only edges with both ends in ``keep``."""
        keep = set(keep)
        g = SimpleGraph(self.n)
        for u in keep:
            for v in self.adj[u]:
                if v > u and v in keep:
                    g.add_edge(u, v)
        return g

    def without_vertices(self, drop: Iterable[int]) -> "SimpleGraph":
        drop = set(drop)
        return self.induced(v for v in range(self.n) if v not in drop)

    def adjacency_masks(self) -> list[int]:
        masks = []
        for v in range(self.n):
            m = 0
            for w in self.adj[v]:
                m |= 1 << w
            masks.append(m)
        return masks

    def copy(self) -> "SimpleGraph":
        return SimpleGraph(self.n, self.edges)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SimpleGraph) and self.n == other.n and self.edges == other.edges

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, m={len(self.edges)})"


def connected_components(g: SimpleGraph) -> list[list[int]]:
    uf = UnionFind(g.n)
    for u in range(g.n):
        for v in g.adj[u]:
            if u < v:
                uf.union(u, v)
    parts: dict[int, list[int]] = {}
    for v in range(g.n):
        parts.setdefault(uf.find(v), []).append(v)
    return sorted(parts.values(), key=lambda p: p[0])


def is_connected(g: SimpleGraph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def min_degree(g: SimpleGraph) -> int:
    if g.n == 0:
        return 0
    return min(len(a) for a in g.adj)


# -- common graphs, mostly for tests and the CLI -------------------------------

def cycle_graph(n: int) -> SimpleGraph:
    return SimpleGraph.from_pairs(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> SimpleGraph:
    return SimpleGraph(n, range(num_edges(n)))


def star_graph(leaves: int) -> SimpleGraph:
    return SimpleGraph.from_pairs(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen_graph() -> SimpleGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return SimpleGraph.from_pairs(10, outer + spokes + inner)


def random_gnm(n: int, m: int, rng) -> SimpleGraph:
    """Uniform G(n, m): the first ``m`` edges of a uniformly random edge ordering."""
    total = num_edges(n)
    if not 0 <= m <= total:
        raise InvalidArgument(f"m={m} outside [0, {total}]")
    return SimpleGraph(n, rng.sample(range(total), m))


# -- snapshot file format ------------------------------------------------------

def format_snapshot(g: SimpleGraph) -> str:
    lines = [f"n {g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.pairs())
    return "\n".join(lines) + "\n"


def parse_snapshot(text: str) -> SimpleGraph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2 or rows[0][0] != "n":
        raise InvalidArgument("snapshot must start with a line 'n <count>'")
    try:
        n = int(rows[0][1])
        g = SimpleGraph(n)
        for row in rows[1:]:
            if len(row) != 2:
                raise InvalidArgument(f"malformed edge line: {' '.join(row)!r}")
            g.add_edge(int(row[0]), int(row[1]))
    except ValueError as exc:
        if isinstance(exc, InvalidArgument):
            raise
        raise InvalidArgument(f"malformed snapshot: {exc}") from exc
    return g


def read_snapshot(path) -> SimpleGraph:
    with open(path) as fh:
        return parse_snapshot(fh.read())


def write_snapshot(g: SimpleGraph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_snapshot(g))
