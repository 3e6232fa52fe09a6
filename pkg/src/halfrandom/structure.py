"""Structural analysis of recorded games.

Everything here is a pure function of a :class:`GameRecord` and an
:class:`AnalysisParams`. The horizon ``t`` is the number of rounds analysed;
rounds are 1-based, so round ``s`` covers play-sequence positions
``(s-1)*R .. s*R-1`` where ``R`` is the round size.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import InvalidArgument, InvalidParams, UnsupportedRecord, UnsupportedSize
from .game import BREAKER, MAKER, GameRecord, state_at_round
from .graph_core import SimpleGraph, UnionFind, edge_endpoints
from .properties import HalfExpanderParams, hamilton_cycle, hamilton_path, is_hamilton_cycle

ASSEMBLY_LIMIT = 80
ASSEMBLY_BUDGET = 30.0


@dataclass(frozen=True)
class AnalysisParams:
    alpha: float
    n: int
    k: int = 2
    eps: float | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 0.5:
            raise InvalidParams("alpha must lie in (0, 1/2)")
        if self.k < 1:
            raise InvalidParams("k must be at least 1")
        if self.n < 2:
            raise InvalidParams("n must be at least 2")
        if self.eps is not None and not admissible(self.alpha, self.eps):
            raise InvalidParams(
                f"alpha={self.alpha} violates (1+eps)(1-3 alpha)^2 > 1+eps/2 for eps={self.eps}")

    @property
    def t(self) -> int:
        return max(1, math.ceil(self.alpha / 2 * self.n * math.log(self.n)))

    @property
    def bad_threshold(self) -> int:
        """Smallest Breaker degree that makes a vertex bad (degree >= 3 alpha n)."""
        return math.ceil(3 * self.alpha * self.n - 1e-9)

    @property
    def early_rank(self) -> int:
        return math.ceil(self.alpha * self.n - 1e-9)

    @property
    def late_rank(self) -> int:
        return math.ceil(2 * self.alpha * self.n - 1e-9)

    def early_cutoff(self, t: int) -> float:
        return t - (1 - self.alpha) * self.n

    def late_cutoff(self, t: int) -> float:
        return t - self.alpha * self.n


def admissible(alpha: float, eps: float) -> bool:
    return (1 + eps) * (1 - 3 * alpha) ** 2 > 1 + eps / 2


def _horizon(record: GameRecord, params: AnalysisParams) -> tuple[int, bool]:
    if record.config.n != params.n:
        raise InvalidArgument(f"record has n={record.config.n}, params have n={params.n}")
    t = params.t
    if record.stop_round < t:
        return record.stop_round, True
    return t, False


def _move_round(i: int, round_size: int) -> int:
    return i // round_size + 1


# -- classification ---------------------------------------------------------------

@dataclass
class CandidateEvent:
    kind: str      # "early" or "late"
    round: int
    move: int      # play-sequence position of the Breaker edge that triggered it


@dataclass
class VertexClassification:
    t: int
    clamped: bool
    breaker_rounds: list[list[int]]
    bad: set[int]
    candidates: dict[int, CandidateEvent]

    def breaker_degree(self, v: int) -> int:
        return len(self.breaker_rounds[v])

    @property
    def early(self) -> set[int]:
        return {v for v, ev in self.candidates.items() if ev.kind == "early"}

    @property
    def late(self) -> set[int]:
        return {v for v, ev in self.candidates.items() if ev.kind == "late"}

    def bad_not_candidates(self) -> set[int]:
        return self.bad - set(self.candidates)


def classify_vertices(record: GameRecord, params: AnalysisParams) -> VertexClassification:
    t, clamped = _horizon(record, params)
    n = params.n
    size = record.round_size
    upto = record.prefix_length(t)
    rounds: list[list[int]] = [[] for _ in range(n)]
    moves_at: list[list[int]] = [[] for _ in range(n)]
    for i in range(upto):
        if record.owners[i] != BREAKER:
            continue
        r = _move_round(i, size)
        u, v = edge_endpoints(record.moves[i], n)
        for x in (u, v):
            rounds[x].append(r)
            moves_at[x].append(i)
    bad = {v for v in range(n) if len(rounds[v]) >= params.bad_threshold}
    early_cut = params.early_cutoff(t)
    late_cut = params.late_cutoff(t)
    er, lr = params.early_rank, params.late_rank
    candidates: dict[int, CandidateEvent] = {}
    for v in range(n):
        rs = rounds[v]
        if er >= 1 and len(rs) >= er and rs[er - 1] < early_cut:
            candidates[v] = CandidateEvent("early", rs[er - 1], moves_at[v][er - 1])
        elif lr >= 1 and len(rs) >= lr and early_cut <= rs[lr - 1] <= late_cut:
            candidates[v] = CandidateEvent("late", rs[lr - 1], moves_at[v][lr - 1])
    return VertexClassification(t, clamped, rounds, bad, candidates)


def bad_count_bound(params: AnalysisParams, t: int | None = None, b: int = 1) -> float:
    """Breaker's total degree after ``t`` rounds is at most ``2bt``, which bounds
    the number of bad vertices."""
    t = params.t if t is None else t
    return 2 * b * t / (3 * params.alpha * params.n)


# -- saviour digraph --------------------------------------------------------------

@dataclass
class SaviourDigraph:
    n: int
    k: int
    arcs: list[tuple[int, int]] = field(default_factory=list)
    rules: list[int] = field(default_factory=list)   # 1 or 2, parallel to arcs

    def out_neighbours(self, u: int) -> list[int]:
        return sorted(v for x, v in self.arcs if x == u)

    def out_degree(self, u: int) -> int:
        return sum(1 for x, _ in self.arcs if x == u)

    def in_degree(self, v: int) -> int:
        return sum(1 for _, y in self.arcs if y == v)

    def add(self, u: int, v: int, rule: int = 0) -> None:
        self.arcs.append((u, v))
        self.rules.append(rule)


def build_saviour_digraph(record: GameRecord, params: AnalysisParams,
                          cls: VertexClassification | None = None) -> SaviourDigraph:
    """Replay the first ``t`` rounds move by move, applying the two arc rules.

    Rule (1) fires when a Breaker move turns a vertex into a candidate: it gets
    up to ``k`` arcs to current Maker neighbours that are non-candidates with
    in-degree 0, smallest index first. Rule (2) fires on every Maker edge at a
    candidate.
    """
    cls = cls or classify_vertices(record, params)
    n, k = params.n, params.k
    trigger: dict[int, list[int]] = {}
    for v, ev in cls.candidates.items():
        trigger.setdefault(ev.move, []).append(v)
    is_cand = [False] * n
    indeg = [0] * n
    outdeg = [0] * n
    maker_adj: list[set[int]] = [set() for _ in range(n)]
    d = SaviourDigraph(n, k)
    for i in range(record.prefix_length(cls.t)):
        u, v = edge_endpoints(record.moves[i], n)
        if record.owners[i] == MAKER:
            maker_adj[u].add(v)
            maker_adj[v].add(u)
            for x, y in ((u, v), (v, u)):
                if is_cand[x] and not is_cand[y] and outdeg[x] < k and indeg[y] == 0:
                    d.add(x, y, 2)
                    outdeg[x] += 1
                    indeg[y] += 1
            continue
        for x in sorted(trigger.get(i, ())):
            is_cand[x] = True
            for y in sorted(maker_adj[x]):
                if outdeg[x] >= k:
                    break
                if not is_cand[y] and indeg[y] == 0:
                    d.add(x, y, 1)
                    outdeg[x] += 1
                    indeg[y] += 1
    return d


@dataclass
class InvariantReport:
    passed: bool
    violated: str | None = None
    witness: object = None


def verify_digraph_invariants(d: SaviourDigraph, maker_graph: SimpleGraph) -> InvariantReport:
    """Re-check, from the arc list alone, in-degree <= 1, out-degree <= k,
    that every arc is a Maker edge, and that the underlying graph is a forest."""
    indeg: dict[int, int] = {}
    outdeg: dict[int, int] = {}
    for u, v in d.arcs:
        indeg[v] = indeg.get(v, 0) + 1
        outdeg[u] = outdeg.get(u, 0) + 1
        if indeg[v] > 1:
            return InvariantReport(False, "in-degree", v)
        if outdeg[u] > d.k:
            return InvariantReport(False, "out-degree", u)
    for u, v in d.arcs:
        if u == v or not maker_graph.has_edge(u, v):
            return InvariantReport(False, "maker-subgraph", (u, v))
    uf = UnionFind(d.n)
    forest: list[list[int]] = [[] for _ in range(d.n)]
    for u, v in d.arcs:
        if not uf.union(u, v):
            return InvariantReport(False, "acyclic", _forest_path(forest, v, u))
        forest[u].append(v)
        forest[v].append(u)
    return InvariantReport(True)


def _forest_path(adj: list[list[int]], src: int, dst: int) -> list[int]:
    prev = {src: src}
    queue = deque([src])
    while queue:
        x = queue.popleft()
        if x == dst:
            break
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                queue.append(y)
    path = [dst]
    while path[-1] != src:
        path.append(prev[path[-1]])
    return path   # dst ... src; together with the arc (dst, src) this closes a cycle


# -- path cover -------------------------------------------------------------------

@dataclass
class PathCover:
    paths: list[list[int]]
    ok: bool = True
    deficient: int | None = None

    def check(self, bad: set[int], d: SaviourDigraph | None = None) -> str | None:
        """Return a description of the first violated invariant, or None."""
        seen: set[int] = set()
        interiors: set[int] = set()
        arcs = set(d.arcs) if d is not None else None
        for p in self.paths:
            if len(p) < 3:
                return f"path {p} has no interior"
            if seen.intersection(p) or len(set(p)) != len(p):
                return f"path {p} is not disjoint from earlier paths"
            seen.update(p)
            if p[0] in bad or p[-1] in bad:
                return f"path {p} has a bad endpoint"
            inner = p[1:-1]
            if any(x not in bad for x in inner):
                return f"path {p} has a good interior vertex"
            interiors.update(inner)
            if arcs is not None:
                for x, y in zip(p, p[1:]):
                    if (x, y) not in arcs and (y, x) not in arcs:
                        return f"path step {x}-{y} is not a digraph arc"
        if not bad <= interiors:
            return f"bad vertices {sorted(bad - interiors)} are uncovered"
        return None


def extract_path_cover(d: SaviourDigraph, cls: VertexClassification) -> PathCover:
    """Cover the bad vertices by paths with good endpoints and bad interiors.

    Requires out-degree exactly 2 at every bad vertex. A root is a bad vertex
    without an in-arc from a remaining bad vertex; its two out-arcs are followed
    (always through the smaller child) until good vertices are reached.
    """
    if d.k != 2:
        raise InvalidArgument("path cover extraction needs the digraph with k = 2")
    bad = cls.bad
    children: dict[int, list[int]] = {}
    parent: dict[int, int] = {}
    for u, v in d.arcs:
        children.setdefault(u, []).append(v)
        parent[v] = u
    for b in sorted(bad):
        if len(children.get(b, ())) != 2:
            return PathCover([], ok=False, deficient=b)
    remaining = set(range(d.n))
    left = set(bad)
    paths = []
    while left:
        root = next(b for b in sorted(left)
                    if not (b in parent and parent[b] in remaining and parent[b] in bad))
        branches = []
        for c in sorted(children[root]):
            walk = [c]
            while walk[-1] in bad:
                walk.append(min(children[walk[-1]]))
            branches.append(walk)
        path = branches[0][::-1] + [root] + branches[1]
        paths.append(path)
        remaining.difference_update(path)
        left.difference_update(path)
    return PathCover(paths)


# -- blocked graph and containment ------------------------------------------------

def record_sigma(record: GameRecord) -> tuple[list[int], str]:
    """The edge order used as sigma, and where it came from.

    Permutation records carry their permutation. For the uniform Maker the
    order in which Maker picked his edges stands in for sigma's prefix.
    """
    maker = record.meta.get("maker", "")
    if maker == "permutation" and record.sigma is not None:
        return record.sigma, "permutation"
    if maker == "uniform":
        return record.maker_edges(), "uniform pick order"
    raise UnsupportedRecord(f"cannot recover sigma for a record with maker={maker!r}")


@dataclass
class BlockedGraph:
    n: int
    edges: set[int]
    coordinates: frozenset[int]
    sigma_source: str

    def graph(self) -> SimpleGraph:
        return SimpleGraph(self.n, self.edges)

    def max_degree(self) -> int:
        g = self.graph()
        return max((g.degree(v) for v in range(self.n)), default=0)


def _check_coordinates(M, limit: int) -> frozenset[int]:
    M = frozenset(M)
    if any(not 0 <= m < limit for m in M):
        raise InvalidArgument(f"coordinates must lie in [0, {limit})")
    return M


def _breaker_ranks(record: GameRecord, t: int) -> dict[int, tuple[int, int]]:
    """For each Breaker edge of rounds 1..t, its rank among Breaker's edges at
    each endpoint (1-based, in claim order)."""
    n = record.config.n
    count = [0] * n
    ranks = {}
    for i in range(record.prefix_length(t)):
        if record.owners[i] != BREAKER:
            continue
        e = record.moves[i]
        u, v = edge_endpoints(e, n)
        count[u] += 1
        count[v] += 1
        ranks[e] = (count[u], count[v])
    return ranks


def blocked_graph(record: GameRecord, M, params: AnalysisParams) -> BlockedGraph:
    """Edges at coordinates ``M`` of sigma (0-based, below ``a*t``) that Breaker
    claimed within the horizon as one of his first 3 alpha n edges at both ends."""
    sigma, source = record_sigma(record)
    t, _ = _horizon(record, params)
    M = _check_coordinates(M, record.config.a * t)
    cap = 3 * params.alpha * params.n
    ranks = _breaker_ranks(record, t)
    edges = set()
    for m in M:
        if m >= len(sigma):
            continue
        e = sigma[m]
        rk = ranks.get(e)
        if rk is not None and rk[0] <= cap and rk[1] <= cap:
            edges.add(e)
    return BlockedGraph(params.n, edges, M, source)


@dataclass
class ContainmentResult:
    holds: bool
    witness: tuple[int, int] | None = None
    checked: int = 0


def maker_containment_check(record: GameRecord, M, params: AnalysisParams,
                            cls: VertexClassification | None = None) -> ContainmentResult:
    """Check that G(M) minus E(H) minus the bad vertices lies in Maker's graph
    at the horizon."""
    sigma, _ = record_sigma(record)
    cls = cls or classify_vertices(record, params)
    H = blocked_graph(record, M, params)
    state = state_at_round(record, cls.t)
    n = params.n
    checked = 0
    for m in sorted(H.coordinates):
        if m >= len(sigma):
            continue
        e = sigma[m]
        u, v = edge_endpoints(e, n)
        if e in H.edges or u in cls.bad or v in cls.bad:
            continue
        checked += 1
        if state.owner[e] != MAKER:
            return ContainmentResult(False, (u, v), checked)
    return ContainmentResult(True, None, checked)


def blocked_cut_count(H: BlockedGraph, X) -> int:
    X = set(X)
    n = H.n
    count = 0
    for e in H.edges:
        u, v = edge_endpoints(e, n)
        count += (u in X) != (v in X)
    return count


def blocked_degree_bound(record: GameRecord, params: AnalysisParams) -> float:
    """The singleton-cut bound 8 e alpha a t / n on the maximum degree of H."""
    return 8 * math.e * params.alpha * record.config.a * params.t / params.n


# -- short disjoint paths ---------------------------------------------------------

@dataclass
class ShortPathResult:
    paths: list[list[int]] | None
    fallback: bool = False
    failed_pair: int | None = None
    failed_layer: int | None = None
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.paths is not None


def path_length_bound(n: int) -> float:
    return math.log(n) + 3


def layer_schedule(n: int, params: HalfExpanderParams) -> tuple[float, int, list[int]]:
    """Return ``(q, j0, sizes)`` where ``sizes[j]`` is the target size of layer ``j``
    for ``j = 0..j0+1``. Raises InvalidParams when ``q <= 1``."""
    q = params.r / (8 * math.log(n))
    if q <= 1:
        raise InvalidParams(f"q = r/(8 ln n) = {q:.4g} <= 1; layers would not grow")
    small = params.lam * n / params.r
    if small < 1:
        raise InvalidParams(f"lambda n / r = {small:.4g} < 1")
    j0 = max(1, math.ceil(math.log(small) / math.log(q)))
    sizes = [1] + [math.ceil(q ** j) for j in range(1, j0)]
    sizes.append(math.ceil(small))
    sizes.append(math.ceil(n / (params.lam * params.r)))
    return q, j0, sizes


def find_short_disjoint_paths(g: SimpleGraph, pairs, forbidden=(), params: HalfExpanderParams | None = None,
                              *, fallback: bool = True) -> ShortPathResult:
    """Vertex-disjoint ``a_i``-``b_i`` paths avoiding ``forbidden``, each of
    length at most ``ln n + 3``.

    Uses the layered construction: layers of prescribed sizes grow from both
    ends of every pair, and each pair is joined through the neighbourhoods of
    its last layers. If the parameters make the layers non-growing and
    ``fallback`` is set, greedy shortest paths are used instead and the result
    is flagged.
    """
    pairs = [tuple(p) for p in pairs]
    forbidden = set(forbidden)
    ends = [x for p in pairs for x in p]
    if len(set(ends)) != len(ends):
        raise InvalidArgument("pair endpoints must be pairwise distinct")
    if forbidden.intersection(ends):
        raise InvalidArgument("pair endpoints must avoid the forbidden set")
    if any(not 0 <= x < g.n for x in ends):
        raise InvalidArgument("pair endpoint out of range")
    if len(pairs) > max(1.0, math.log(max(g.n, 2))):
        raise InvalidArgument("at most ln n pairs are supported")
    try:
        if params is None:
            raise InvalidParams("no half-expander parameters given")
        schedule = layer_schedule(g.n, params)
    except InvalidParams:
        if not fallback:
            raise
        return _greedy_paths(g, pairs, forbidden)
    return _layered_paths(g, pairs, forbidden, schedule)


def _trace(parent: dict[int, int], x: int) -> list[int]:
    out = [x]
    while out[-1] in parent:
        out.append(parent[out[-1]])
    return out


def _layered_paths(g, pairs, forbidden, schedule) -> ShortPathResult:
    _, j0, sizes = schedule
    limit = path_length_bound(g.n)
    used = set(forbidden)
    for p in pairs:
        used.update(p)
    direct = {i for i, (a, b) in enumerate(pairs) if g.has_edge(a, b)}
    layers = {}    # (i, sign, j) -> list of vertices
    parent = {}    # vertex -> predecessor in its layer tree
    for i, (a, b) in enumerate(pairs):
        layers[i, 0, 0] = [a]
        layers[i, 1, 0] = [b]
    for j in range(1, j0 + 2):
        for i in range(len(pairs)):
            if i in direct:
                continue
            for sign in (0, 1):
                prev = layers[i, sign, j - 1]
                chosen = []
                for x in prev:
                    for y in sorted(g.adj[x]):
                        if y not in used:
                            used.add(y)
                            parent[y] = x
                            chosen.append(y)
                            if len(chosen) == sizes[j]:
                                break
                    if len(chosen) == sizes[j]:
                        break
                if len(chosen) < sizes[j]:
                    return ShortPathResult(None, failed_pair=i, failed_layer=j,
                                           reason=f"layer {j} starved ({len(chosen)} < {sizes[j]})")
                layers[i, sign, j] = chosen
    paths = []
    on_paths: set[int] = set()
    for i, (a, b) in enumerate(pairs):
        if i in direct:
            paths.append([a, b])
            continue
        grown = {}
        for sign in (0, 1):
            reach = {}
            for x in layers[i, sign, j0 + 1]:
                for y in g.adj[x]:
                    if y not in used and y not in on_paths and y not in reach:
                        reach[y] = x
            grown[sign] = reach
        plus, minus = grown[0], grown[1]
        path = None
        meet = sorted(set(plus) & set(minus))
        if meet:
            z = meet[0]
            path = _trace(parent, plus[z])[::-1] + [z] + _trace(parent, minus[z])
        else:
            for x in sorted(plus):
                hit = next((y for y in sorted(g.adj[x]) if y in minus), None)
                if hit is not None:
                    path = (_trace(parent, plus[x])[::-1] + [x, hit] + _trace(parent, minus[hit]))
                    break
        if path is None:
            return ShortPathResult(None, failed_pair=i, failed_layer=j0 + 2,
                                   reason="final layers are not joined")
        if len(path) - 1 > limit:
            return ShortPathResult(None, failed_pair=i, failed_layer=j0 + 2,
                                   reason=f"path length {len(path) - 1} exceeds {limit:.3f}")
        on_paths.update(path)
        paths.append(path)
    return ShortPathResult(paths)


def _greedy_paths(g, pairs, forbidden) -> ShortPathResult:
    limit = path_length_bound(g.n)
    blocked = set(forbidden)
    for p in pairs:
        blocked.update(p)
    paths = []
    for i, (a, b) in enumerate(pairs):
        prev = {a: a}
        queue = deque([a])
        while queue and b not in prev:
            x = queue.popleft()
            for y in sorted(g.adj[x]):
                if y not in prev and (y == b or y not in blocked):
                    prev[y] = x
                    queue.append(y)
        if b not in prev:
            return ShortPathResult(None, fallback=True, failed_pair=i,
                                   reason=f"no path between {a} and {b}")
        path = [b]
        while path[-1] != a:
            path.append(prev[path[-1]])
        path.reverse()
        if len(path) - 1 > limit:
            return ShortPathResult(None, fallback=True, failed_pair=i,
                                   reason=f"shortest path has length {len(path) - 1} > {limit:.3f}")
        blocked.update(path)
        paths.append(path)
    return ShortPathResult(paths, fallback=True)


# -- Hamilton cycle assembly ------------------------------------------------------

@dataclass
class AssemblyResult:
    cycle: list[int] | None
    stage: str | None = None
    reason: str = ""
    trace: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.cycle is not None


def default_expander_params(g: SimpleGraph) -> HalfExpanderParams:
    """lambda just below 2^-11 and r = m/(16 n) for a graph with m edges."""
    return HalfExpanderParams(2.0 ** -12, max(g.num_edges(), 1) / (16 * g.n))


def assemble_hamilton_cycle(record: GameRecord, params: AnalysisParams,
                            expander: HalfExpanderParams | None = None,
                            budget: float = ASSEMBLY_BUDGET) -> AssemblyResult:
    """Build a Hamilton cycle in Maker's graph at the horizon in four stages:
    ``cover`` (path cover of the bad vertices), ``connect`` (short paths joining
    consecutive cover paths through good vertices), ``hamilton-path`` (a path
    through everything else between the two loose ends) and ``verify``."""
    n = params.n
    if n > ASSEMBLY_LIMIT:
        raise UnsupportedSize(f"Hamilton cycle assembly is limited to n <= {ASSEMBLY_LIMIT}")
    cls = classify_vertices(record, params)
    d = build_saviour_digraph(record, AnalysisParams(params.alpha, n, 2), cls)
    cover = extract_path_cover(d, cls)
    trace = {"t": cls.t, "bad": sorted(cls.bad), "cover": cover.paths}
    if not cover.ok:
        return AssemblyResult(None, "cover", f"bad vertex {cover.deficient} has out-degree below 2", trace)
    g = record.maker_graph(cls.t)
    try:
        if not cover.paths:
            cycle = hamilton_cycle(g, budget=budget)
            if cycle is None:
                return AssemblyResult(None, "hamilton-path", "Maker's graph has no Hamilton cycle", trace)
        else:
            qs = cover.paths
            pairs = [(qs[i][-1], qs[i + 1][0]) for i in range(len(qs) - 1)]
            interior = {x for q in qs for x in q[1:-1]}
            forbidden = set(cls.bad) | interior | {qs[0][0], qs[-1][-1]}
            good = g.without_vertices(cls.bad)
            links = ShortPathResult([])
            if pairs:
                try:
                    links = find_short_disjoint_paths(good, pairs, forbidden,
                                                      expander or default_expander_params(good))
                except InvalidArgument as exc:
                    return AssemblyResult(None, "connect", str(exc), trace)
                trace["fallback"] = links.fallback
                if not links.ok:
                    return AssemblyResult(None, "connect", links.reason, trace)
            p = list(qs[0])
            for link, q in zip(links.paths, qs[1:]):
                p.extend(link[1:-1])
                p.extend(q)
            trace["joined"] = p
            a1, bk = p[0], p[-1]
            allowed = set(range(n)) - set(p[1:-1])
            rest = hamilton_path(g, a1, bk, allowed=allowed, budget=budget)
            if rest is None:
                return AssemblyResult(None, "hamilton-path", f"no Hamilton path from {a1} to {bk}", trace)
            cycle = rest + p[-2:0:-1]
    except UnsupportedSize as exc:
        return AssemblyResult(None, "hamilton-path", f"search budget exhausted: {exc}", trace)
    if not is_hamilton_cycle(g, cycle):
        return AssemblyResult(None, "verify", "assembled cycle failed verification", trace)
    return AssemblyResult(cycle, trace=trace)
