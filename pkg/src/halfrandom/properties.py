"""Exact deciders for the target graph properties and the half-expander check."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import InvalidArgument, UnsupportedSize
from .graph_core import SimpleGraph, connected_components, min_degree

HAMILTON_EXACT_LIMIT = 20
HALF_EXPANDER_EXACT_LIMIT = 22
DEFAULT_BACKTRACK_BUDGET = 10.0


@dataclass(frozen=True)
class PropertyId:
    kind: str
    k: int | None = None

    KINDS = ("min_degree", "connected", "k_connected", "hamiltonian", "hamilton_connected")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise InvalidArgument(f"unknown property {self.kind!r}")
        needs_k = self.kind in ("min_degree", "k_connected")
        if needs_k and (self.k is None or self.k < 1):
            raise InvalidArgument(f"{self.kind} needs k >= 1")
        if not needs_k and self.k is not None:
            raise InvalidArgument(f"{self.kind} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "PropertyId":
        name, _, arg = text.strip().partition(":")
        name = name.replace("-", "_").lower()
        try:
            return cls(name, int(arg) if arg else None)
        except ValueError as exc:
            if isinstance(exc, InvalidArgument):
                raise
            raise InvalidArgument(f"bad property spec {text!r}") from exc

    def __str__(self) -> str:
        return self.kind if self.k is None else f"{self.kind}:{self.k}"


MIN_DEGREE_1 = PropertyId("min_degree", 1)
CONNECTED = PropertyId("connected")
HAMILTONIAN = PropertyId("hamiltonian")


def check_property(g: SimpleGraph, p: PropertyId, *, backtracking: bool = False,
                   budget: float = DEFAULT_BACKTRACK_BUDGET) -> bool:
    """Decide ``p`` on ``g`` exactly.

    Hamiltonicity uses subset DP up to ``HAMILTON_EXACT_LIMIT`` vertices; beyond
    that it raises ``UnsupportedSize`` unless ``backtracking`` is set, in which
    case a pruned search runs under a wall-clock ``budget`` (seconds).
    """
    if p.kind == "min_degree":
        return g.n > 0 and min_degree(g) >= p.k
    if p.kind == "connected":
        return g.n >= 1 and len(connected_components(g)) == 1
    if p.kind == "k_connected":
        return is_k_connected(g, p.k)
    if p.kind == "hamiltonian":
        if g.n <= HAMILTON_EXACT_LIMIT:
            return hamiltonian_dp(g)
        if not backtracking:
            raise UnsupportedSize(f"Hamiltonicity DP limited to n <= {HAMILTON_EXACT_LIMIT}")
        return hamiltonian_backtrack(g, budget=budget)
    if p.kind == "hamilton_connected":
        if g.n <= HAMILTON_EXACT_LIMIT:
            return hamilton_connected_dp(g)
        if not backtracking:
            raise UnsupportedSize(f"Hamilton connectivity DP limited to n <= {HAMILTON_EXACT_LIMIT}")
        return hamilton_connected_backtrack(g, budget=budget)
    raise InvalidArgument(str(p))


# -- Hamiltonicity: subset DP ---------------------------------------------------

@njit(cache=True)
def _path_end_sets(adj, n, start):
    # ends[mask] = bitmask of vertices w such that some path from start visits
    # exactly mask and stops at w
    full = (1 << n) - 1
    ends = np.zeros(1 << n, dtype=np.int64)
    ends[1 << start] = 1 << start
    for mask in range(1 << n):
        cur = ends[mask]
        if cur == 0:
            continue
        nxt = 0
        for v in range(n):
            if (cur >> v) & 1:
                nxt |= adj[v]
        nxt &= ~mask & full
        for w in range(n):
            if (nxt >> w) & 1:
                ends[mask | (1 << w)] |= 1 << w
    return ends[full]


def _adj_array(g: SimpleGraph) -> np.ndarray:
    return np.array(g.adjacency_masks(), dtype=np.int64)


def hamiltonian_dp(g: SimpleGraph) -> bool:
    n = g.n
    if n > HAMILTON_EXACT_LIMIT:
        raise UnsupportedSize(f"n={n} exceeds DP limit {HAMILTON_EXACT_LIMIT}")
    if n < 3 or min_degree(g) < 2:
        return False
    adj = _adj_array(g)
    return bool(_path_end_sets(adj, n, 0) & adj[0])


def hamilton_path_ends_dp(g: SimpleGraph, start: int) -> int:
    """Bitmask of all ``t`` such that ``g`` has a Hamilton path from ``start`` to ``t``."""
    if g.n > HAMILTON_EXACT_LIMIT:
        raise UnsupportedSize(f"n={g.n} exceeds DP limit {HAMILTON_EXACT_LIMIT}")
    return int(_path_end_sets(_adj_array(g), g.n, start))


def hamilton_connected_dp(g: SimpleGraph) -> bool:
    n = g.n
    if n <= 1:
        return True
    if n > 2 and min_degree(g) < 2:
        return False
    full = (1 << n) - 1
    adj = _adj_array(g)
    for s in range(n):
        others = full & ~(1 << s)
        if _path_end_sets(adj, n, s) & others != others:
            return False
    return True


# -- Hamiltonicity: pruned backtracking ----------------------------------------

def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _reachable(adj: list[int], src: int, pool: int) -> int:
    seen = 1 << src
    frontier = seen
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= adj[v]
        nxt &= pool & ~seen
        seen |= nxt
        frontier = nxt
    return seen


class _Search:
    """Depth-first Hamilton path search over a vertex subset, Warnsdorff order.

    Pruning: every unvisited vertex must keep enough usable neighbours, vertices
    whose only remaining options include the head are forced next, and the
    unvisited part must stay connected to the head.
    """

    def __init__(self, adj: list[int], allowed: int, start: int, end: int | None,
                 close_to: int | None, deadline: float | None):
        self.adj = adj
        self.allowed = allowed
        self.start = start
        self.end = end
        # cycle mode: last vertex must be adjacent to close_to
        self.close_to = close_to
        self.close_mask = adj[close_to] if close_to is not None else 0
        self.deadline = deadline
        self.nodes = 0

    def run(self) -> list[int] | None:
        self.path = [self.start]
        visited = 1 << self.start
        if self._dfs(self.start, visited):
            return list(self.path)
        return None

    def _done(self, head: int) -> bool:
        if self.end is not None and head != self.end:
            return False
        if self.close_to is not None and not (self.close_mask >> head) & 1:
            return False
        return True

    def _dfs(self, head: int, visited: int) -> bool:
        adj = self.adj
        unvisited = self.allowed & ~visited
        if not unvisited:
            return self._done(head)
        self.nodes += 1
        if self.deadline is not None and not (self.nodes & 255) and time.monotonic() > self.deadline:
            raise UnsupportedSize("Hamilton search exceeded its time budget")
        headbit = 1 << head
        pool = unvisited | headbit
        end = self.end
        remaining = unvisited.bit_count()
        if self.close_to is not None and not self.close_mask & unvisited:
            return False
        forced = []
        for v in _bits(unvisited):
            if v == end:
                avail = adj[v] & pool
                if not avail or (avail == headbit and remaining > 1):
                    return False
                continue
            extra = (1 << self.close_to) if (self.close_mask >> v) & 1 else 0
            avail = adj[v] & (pool | extra)
            c = avail.bit_count()
            if c < 2:
                return False
            # at the first step of a cycle search the head is also the closing
            # vertex, so a degree-2 neighbour may be visited last instead of next
            if c == 2 and avail & headbit and head != self.close_to:
                forced.append(v)
        if len(forced) > 1:
            return False
        if _reachable(adj, head, pool) != pool:
            return False
        cand = adj[head] & unvisited
        if end is not None and remaining > 1:
            cand &= ~(1 << end)
        if forced:
            v = forced[0]
            cand &= 1 << v
        order = sorted(_bits(cand), key=lambda w: (adj[w] & unvisited).bit_count())
        for w in order:
            self.path.append(w)
            if self._dfs(w, visited | (1 << w)):
                return True
            self.path.pop()
        return False


def _has_cut_vertex(adj: list[int], allowed: int) -> bool:
    for v in _bits(allowed):
        rest = allowed & ~(1 << v)
        if not rest:
            continue
        src = (rest & -rest).bit_length() - 1
        if _reachable(adj, src, rest) != rest:
            return True
    return False


def hamilton_path(g: SimpleGraph, start: int, end: int, *, allowed=None,
                  budget: float | None = DEFAULT_BACKTRACK_BUDGET) -> list[int] | None:
    """Backtracking search for a ``start``-``end`` path visiting exactly the
    vertices in ``allowed`` (default: all). Raises ``UnsupportedSize`` when the
    budget (seconds) runs out."""
    adj = g.adjacency_masks()
    mask = (1 << g.n) - 1 if allowed is None else sum(1 << v for v in set(allowed))
    if not (mask >> start) & 1 or not (mask >> end) & 1:
        raise InvalidArgument("path endpoints must be allowed vertices")
    adj = [a & mask for a in adj]
    if end == start:
        return [start] if mask == 1 << start else None
    if _reachable(adj, start, mask) != mask:
        return None
    deadline = None if budget is None else time.monotonic() + budget
    return _Search(adj, mask, start, end, None, deadline).run()


def hamilton_cycle(g: SimpleGraph, *, budget: float | None = DEFAULT_BACKTRACK_BUDGET) -> list[int] | None:
    n = g.n
    if n < 3 or min_degree(g) < 2:
        return None
    adj = g.adjacency_masks()
    full = (1 << n) - 1
    if _reachable(adj, 0, full) != full or _has_cut_vertex(adj, full):
        return None
    start = min(range(n), key=lambda v: (len(g.adj[v]), v))
    deadline = None if budget is None else time.monotonic() + budget
    return _Search(adj, full, start, None, start, deadline).run()


def hamiltonian_backtrack(g: SimpleGraph, *, budget: float | None = DEFAULT_BACKTRACK_BUDGET) -> bool:
    return hamilton_cycle(g, budget=budget) is not None


def hamilton_connected_backtrack(g: SimpleGraph, *, budget: float | None = DEFAULT_BACKTRACK_BUDGET) -> bool:
    n = g.n
    if n <= 1:
        return True
    if n > 2 and min_degree(g) < 2:
        return False
    deadline = None if budget is None else time.monotonic() + budget
    for s in range(n):
        for t in range(s + 1, n):
            left = None if deadline is None else max(0.0, deadline - time.monotonic())
            if hamilton_path(g, s, t, budget=left) is None:
                return False
    return True


def is_hamilton_cycle(g: SimpleGraph, cycle: list[int]) -> bool:
    """Independent verifier: every vertex exactly once, consecutive pairs are edges."""
    n = g.n
    if n < 3 or len(cycle) != n or sorted(cycle) != list(range(n)):
        return False
    return all(g.has_edge(cycle[i], cycle[(i + 1) % n]) for i in range(n))


# -- vertex connectivity ---------------------------------------------------------

def local_vertex_connectivity(g: SimpleGraph, s: int, t: int, limit: int | None = None) -> int:
    """Maximum number of internally vertex-disjoint s-t paths (s, t non-adjacent),
    capped at ``limit``. Unit-capacity max-flow on the split graph."""
    if s == t or g.has_edge(s, t):
        raise InvalidArgument("s and t must be distinct and non-adjacent")
    n = g.n
    # node 2v = v_in, 2v+1 = v_out
    cap: dict[tuple[int, int], int] = {}
    nbrs: list[list[int]] = [[] for _ in range(2 * n)]

    def arc(x, y, c):
        if (x, y) not in cap:
            nbrs[x].append(y)
            nbrs[y].append(x)
            cap.setdefault((y, x), 0)
        cap[(x, y)] = cap.get((x, y), 0) + c

    for v in range(n):
        arc(2 * v, 2 * v + 1, 1)
    for u in range(n):
        for v in g.adj[u]:
            arc(2 * u + 1, 2 * v, 1)
    source, sink = 2 * s + 1, 2 * t
    flow = 0
    limit = n if limit is None else limit
    while flow < limit:
        prev = {source: None}
        queue = [source]
        found = False
        for x in queue:
            for y in nbrs[x]:
                if y not in prev and cap[(x, y)] > 0:
                    prev[y] = x
                    if y == sink:
                        found = True
                        break
                    queue.append(y)
            if found:
                break
        if not found:
            break
        y = sink
        while prev[y] is not None:
            x = prev[y]
            cap[(x, y)] -= 1
            cap[(y, x)] += 1
            y = x
        flow += 1
    return flow


def is_k_connected(g: SimpleGraph, k: int) -> bool:
    """True iff ``g`` has more than ``k`` vertices and no separator of size < k.

    A separator S with |S| < k misses one of any k fixed vertices, so it
    suffices to test pairs (v_i, w) for the first k vertices v_i and every w
    not adjacent to v_i.
    """
    n = g.n
    if k < 1:
        raise InvalidArgument("k must be >= 1")
    if n < k + 1:
        return False
    if min_degree(g) < k:
        return False
    for i in range(k):
        for w in range(n):
            if w == i or g.has_edge(i, w):
                continue
            if local_vertex_connectivity(g, i, w, limit=k) < k:
                return False
    return True


# -- cuts and expansion ----------------------------------------------------------

def cut_edge_count(g: SimpleGraph, xs) -> int:
    xs = set(xs)
    if any(not 0 <= v < g.n for v in xs):
        raise InvalidArgument("X must be a subset of V(G)")
    return sum(1 for u in xs for v in g.adj[u] if v not in xs)


def neighbourhood(g: SimpleGraph, xs) -> set[int]:
    """N(X): vertices with at least one neighbour in X (members of X included)."""
    out: set[int] = set()
    for u in xs:
        out |= g.adj[u]
    return out


@dataclass(frozen=True)
class HalfExpanderParams:
    lam: float
    r: float

    def __post_init__(self):
        if not (self.lam > 0 and self.r > 0):
            raise InvalidArgument("half-expander parameters must be positive")

    def small_limit(self, n: int) -> int:
        # property 1 applies to |X| <= lam*n/r
        return math.floor(self.lam * n / self.r + 1e-9)

    def large_threshold(self, n: int) -> int:
        # property 2 applies to |X| >= n/(lam*r)
        return max(1, math.ceil(n / (self.lam * self.r) - 1e-9))

    def pair_threshold(self, n: int) -> int:
        # property 3 applies to |X|,|Y| >= (1/2 - lam^(1/5)) n, clamped to nonempty sets
        return max(1, math.ceil((0.5 - self.lam ** 0.2) * n - 1e-9))


@dataclass
class HalfExpanderVerdict:
    passed: bool
    violated_property: int | None = None
    witness: tuple | None = None
    mode: str = "exact"
    samples: int | None = None

    def __post_init__(self):
        if self.passed == (self.violated_property is not None):
            raise InvalidArgument("verdict must be a pass or carry a violated property")


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a)


def _all_neighbourhoods(adj: list[int], n: int) -> np.ndarray:
    nb = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        half = 1 << i
        nb[half:2 * half] = nb[:half] | adj[i]
    return nb


def _mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(_bits(int(mask)))


def _best_partner(adj: list[int], n: int, xmask: int, size: int) -> tuple[int, int]:
    """Among Y disjoint from X with |Y| = size, the minimum e(X, Y) and a minimiser."""
    scores = sorted(((adj[y] & xmask).bit_count(), y) for y in range(n) if not (xmask >> y) & 1)
    chosen = scores[:size]
    return sum(s for s, _ in chosen), sum(1 << y for _, y in chosen)


def is_half_expander(g: SimpleGraph, params: HalfExpanderParams, mode: str = "exact",
                     samples: int = 1000, rng=None) -> HalfExpanderVerdict:
    """Check the three half-expander conditions.

    N(X) and e(X, Y) are monotone under enlarging X (and Y), so conditions 2 and
    3 are checked at their smallest admissible set sizes, and for a fixed X the
    worst Y in condition 3 is the ``size`` outside vertices with fewest
    neighbours in X. Both modes use these reductions; ``exact`` enumerates all
    X, ``sampled`` draws ``samples`` random X per condition.
    """
    n = g.n
    adj = g.adjacency_masks()
    s1 = min(params.small_limit(n), n)
    s2 = params.large_threshold(n)
    s3 = params.pair_threshold(n)
    if mode == "exact":
        if n > HALF_EXPANDER_EXACT_LIMIT:
            raise UnsupportedSize(f"exact half-expander check limited to n <= {HALF_EXPANDER_EXACT_LIMIT}")
        nb = _all_neighbourhoods(adj, n)
        masks = np.arange(1 << n, dtype=np.int64)
        size = _popcount(masks)
        nsize = _popcount(nb)
        bad = (size >= 1) & (size <= s1) & (nsize < params.r * size)
        if bad.any():
            return HalfExpanderVerdict(False, 1, (_mask_to_set(np.flatnonzero(bad)[0]),))
        if s2 <= n:
            bad = (size == s2) & (nsize < (0.5 - params.lam) * n)
            if bad.any():
                return HalfExpanderVerdict(False, 2, (_mask_to_set(np.flatnonzero(bad)[0]),))
        if 2 * s3 <= n:
            for xmask in np.flatnonzero(size == s3):
                e, ymask = _best_partner(adj, n, int(xmask), s3)
                if e <= 2 * n:
                    return HalfExpanderVerdict(False, 3, (_mask_to_set(xmask), _mask_to_set(ymask)))
        return HalfExpanderVerdict(True)
    if mode != "sampled":
        raise InvalidArgument(f"unknown mode {mode!r}")
    if rng is None:
        raise InvalidArgument("sampled mode needs an rng")
    verts = list(range(n))

    def nsize_of(xs):
        m = 0
        for x in xs:
            m |= adj[x]
        return m.bit_count()

    if s1 >= 1:
        for _ in range(samples):
            xs = rng.sample(verts, rng.randint(1, s1))
            if nsize_of(xs) < params.r * len(xs):
                return HalfExpanderVerdict(False, 1, (frozenset(xs),), "sampled", samples)
    if s2 <= n:
        for _ in range(samples):
            xs = rng.sample(verts, s2)
            if nsize_of(xs) < (0.5 - params.lam) * n:
                return HalfExpanderVerdict(False, 2, (frozenset(xs),), "sampled", samples)
    if 2 * s3 <= n:
        for _ in range(samples):
            xs = rng.sample(verts, s3)
            xmask = sum(1 << x for x in xs)
            e, ymask = _best_partner(adj, n, xmask, s3)
            if e <= 2 * n:
                return HalfExpanderVerdict(False, 3, (frozenset(xs), _mask_to_set(ymask)), "sampled", samples)
    return HalfExpanderVerdict(True, mode="sampled", samples=samples)


def violates(g: SimpleGraph, params: HalfExpanderParams, verdict: HalfExpanderVerdict) -> bool:
    """Re-check a failing verdict's witness directly against the definition."""
    n = g.n
    if verdict.passed:
        return False
    if verdict.violated_property == 1:
        (xs,) = verdict.witness
        return 1 <= len(xs) <= params.lam * n / params.r + 1e-9 and len(neighbourhood(g, xs)) < params.r * len(xs)
    if verdict.violated_property == 2:
        (xs,) = verdict.witness
        return len(xs) >= n / (params.lam * params.r) - 1e-9 and len(neighbourhood(g, xs)) < (0.5 - params.lam) * n
    xs, ys = verdict.witness
    lo = params.pair_threshold(n)
    if xs & ys or len(xs) < lo or len(ys) < lo:
        return False
    return sum(1 for x in xs for y in g.adj[x] if y in ys) <= 2 * n


@dataclass
class ExpansionStats:
    """Sampled minima for the three random-graph expansion regimes.

    ``None`` marks a regime whose size range is empty for this n and m.
    """
    n: int
    m: int
    samples: int
    small_set_min_ratio: float | None       # min |N(X)| / |X|, |X| <= n^2/m
    small_set_bound: float                  # m / 8n
    escape_min_ratio: float | None          # min e(X, V - X - N) / |X| over worst N, |N| <= n/2
    escape_bound: float                     # m / 8n
    pair_min_edges: int | None              # min e(X, Y), |X| = |Y| = ceil(n/4)
    pair_bound: float                       # m |X| / 8n
    sizes: dict = field(default_factory=dict)


def expansion_stats(g: SimpleGraph, rng, samples: int = 200) -> ExpansionStats:
    n, m = g.n, g.num_edges()
    adj = g.adjacency_masks()
    verts = list(range(n))
    bound = m / (8 * n) if n else 0.0
    a_hi = min(n, math.floor(n * n / m)) if m else n
    small = None
    if a_hi >= 1:
        small = math.inf
        for _ in range(samples):
            xs = rng.sample(verts, rng.randint(1, a_hi))
            nm = 0
            for x in xs:
                nm |= adj[x]
            small = min(small, nm.bit_count() / len(xs))
    b_lo = math.ceil(64 * n * n / m) if m else n + 1
    b_hi = n // 4
    escape = None
    if b_lo <= b_hi:
        escape = math.inf
        for _ in range(samples):
            size = rng.randint(b_lo, b_hi)
            xs = rng.sample(verts, size)
            xmask = sum(1 << x for x in xs)
            outside = sorted(((adj[y] & xmask).bit_count() for y in verts if not (xmask >> y) & 1), reverse=True)
            # adversarial N takes the n/2 outside vertices with most edges into X
            escape = min(escape, sum(outside[n // 2:]) / size)
    c = math.ceil(n / 4)
    pair = None
    if n >= 2 and 2 * c <= n:
        pair = None
        for _ in range(samples):
            xs = rng.sample(verts, c)
            e, _ = _best_partner(adj, n, sum(1 << x for x in xs), c)
            pair = e if pair is None else min(pair, e)
    return ExpansionStats(n, m, samples, small, bound, escape, bound, pair, m * c / (8 * n) if n else 0.0,
                          {"small_max": a_hi, "escape_range": (b_lo, b_hi), "pair_size": c})
