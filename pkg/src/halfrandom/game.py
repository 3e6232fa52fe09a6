"""(a:b) Maker-Breaker games on the edges of K_n.

Maker moves first. A round is Maker's turn (a moves) followed by Breaker's
turn (b moves); the play-sequence lists every claimed edge in claim order,
each player's moves within a turn in succession.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import InvalidArgument, StrategyError
from .graph_core import SimpleGraph, UnionFind, edge_endpoints, endpoint_table, num_edges
from .properties import PropertyId, check_property

FREE, MAKER, BREAKER = 0, 1, 2
OWNER_CHAR = {MAKER: "M", BREAKER: "B"}
CHAR_OWNER = {"M": MAKER, "B": BREAKER}

STOP_EXHAUSTED = "exhausted"
STOP_PROPERTY = "property"
STOP_ROUND_CAP = "round-cap"


@dataclass(frozen=True)
class GameConfig:
    n: int
    a: int = 1
    b: int = 1
    max_rounds: int | None = None
    stop: str = STOP_EXHAUSTED
    prop: PropertyId | None = None

    def __post_init__(self):
        if self.n < 2:
            raise InvalidArgument("n must be at least 2")
        if self.a < 1 or self.b < 1:
            raise InvalidArgument("biases must be at least 1")
        if self.a > num_edges(self.n):
            # a + b may exceed the board: on K_2 and K_3 the game ends inside
            # Maker's first turn, which is a legitimate game
            raise InvalidArgument("a exceeds the number of edges of K_n")
        if self.stop not in (STOP_EXHAUSTED, STOP_PROPERTY, STOP_ROUND_CAP):
            raise InvalidArgument(f"unknown stop rule {self.stop!r}")
        if self.stop == STOP_PROPERTY and self.prop is None:
            raise InvalidArgument("property stop rule needs a property")
        if self.stop == STOP_ROUND_CAP and self.max_rounds is None:
            raise InvalidArgument("round-cap stop rule needs max_rounds")
        if self.max_rounds is not None and self.max_rounds < 0:
            raise InvalidArgument("max_rounds must be non-negative")

    @property
    def total_edges(self) -> int:
        return num_edges(self.n)


@lru_cache(maxsize=8)
def _endpoints(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    us, vs = endpoint_table(n)
    return tuple(us), tuple(vs)


class GameState:
    """Mutable board. ``round`` counts completed rounds.

    Free edges sit in an array with a position index so a uniform free edge
    can be drawn in O(1).
    """

    def __init__(self, n: int):
        self.n = n
        self.total = num_edges(n)
        self.us, self.vs = _endpoints(n)
        self.owner = bytearray(self.total)
        self.free = list(range(self.total))
        self.pos = list(range(self.total))
        self.maker_deg = [0] * n
        self.breaker_deg = [0] * n
        self.round = 0
        self._low = 0

    @property
    def free_count(self) -> int:
        return len(self.free)

    def is_free(self, e: int) -> bool:
        return 0 <= e < self.total and self.owner[e] == FREE

    def free_degree(self, v: int) -> int:
        return self.n - 1 - self.maker_deg[v] - self.breaker_deg[v]

    def claim(self, e: int, who: int) -> None:
        if self.owner[e] != FREE:
            raise InvalidArgument(f"edge {e} is already owned")
        self.owner[e] = who
        i = self.pos[e]
        last = self.free.pop()
        if last != e:
            self.free[i] = last
            self.pos[last] = i
        self.pos[e] = -1
        deg = self.maker_deg if who == MAKER else self.breaker_deg
        deg[self.us[e]] += 1
        deg[self.vs[e]] += 1

    def smallest_free(self, count: int = 1) -> list[int]:
        out = []
        e = self._low
        owner = self.owner
        while e < self.total and owner[e] != FREE:
            e += 1
        self._low = e
        while e < self.total and len(out) < count:
            if owner[e] == FREE:
                out.append(e)
            e += 1
        return out

    def edges_of(self, who: int) -> list[int]:
        return [e for e in range(self.total) if self.owner[e] == who]

    def maker_graph(self) -> SimpleGraph:
        return SimpleGraph(self.n, self.edges_of(MAKER))

    def breaker_graph(self) -> SimpleGraph:
        return SimpleGraph(self.n, self.edges_of(BREAKER))


@dataclass
class GameRecord:
    config: GameConfig
    seed: int
    moves: list[int]
    owners: bytearray
    stop_round: int
    substitutions: list[int] = field(default_factory=list)
    meta: dict = field(default_factory=dict)
    sigma: list[int] | None = None
    winner: str | None = None

    @property
    def play_sequence(self) -> list[tuple[int, str]]:
        return [(e, OWNER_CHAR[o]) for e, o in zip(self.moves, self.owners)]

    @property
    def breaker_active(self) -> bool:
        return self.meta.get("breaker", "") != "none"

    @property
    def round_size(self) -> int:
        return self.config.a + (self.config.b if self.breaker_active else 0)

    def prefix_length(self, r: int) -> int:
        """Number of play-sequence entries after ``r`` complete rounds."""
        return min(len(self.moves), r * self.round_size)

    def maker_edges(self, r: int | None = None) -> list[int]:
        upto = len(self.moves) if r is None else self.prefix_length(r)
        return [e for e, o in zip(self.moves[:upto], self.owners[:upto]) if o == MAKER]

    def maker_graph(self, r: int | None = None) -> SimpleGraph:
        return SimpleGraph(self.config.n, self.maker_edges(r))

    def to_text(self) -> str:
        c = self.config
        lines = [f"game {c.n} {c.a} {c.b} {self.seed} {self.stop_round}"]
        for key in sorted(self.meta):
            lines.append(f"# {key}={self.meta[key]}")
        us, vs = _endpoints(c.n)
        for i, (e, o) in enumerate(zip(self.moves, self.owners), 1):
            lines.append(f"{i} {us[e]} {vs[e]} {OWNER_CHAR[o]}")
        return "\n".join(lines) + "\n"


def parse_record(text: str) -> GameRecord:
    from .graph_core import edge_index

    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InvalidArgument("empty record")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "game":
        raise InvalidArgument("record must start with 'game n a b seed stop_round'")
    try:
        n, a, b, seed, stop_round = (int(x) for x in head[1:])
    except ValueError as exc:
        raise InvalidArgument(f"malformed record header: {lines[0]!r}") from exc
    config = GameConfig(n, a, b)
    meta: dict[str, str] = {}
    moves: list[int] = []
    owners = bytearray()
    for ln in lines[1:]:
        if ln.startswith("#"):
            key, _, value = ln[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
            continue
        parts = ln.split()
        if len(parts) != 4 or parts[3] not in CHAR_OWNER:
            raise InvalidArgument(f"malformed move line: {ln!r}")
        try:
            moves.append(edge_index(int(parts[1]), int(parts[2]), n))
        except ValueError as exc:
            raise InvalidArgument(f"malformed move line: {ln!r}") from exc
        owners.append(CHAR_OWNER[parts[3]])
    record = GameRecord(config, seed, moves, owners, stop_round, meta=meta)
    if meta.get("maker") == "permutation":
        from .strategies import regenerate_sigma
        record.sigma = regenerate_sigma(n, seed)
    return record


def read_record(path) -> GameRecord:
    with open(path) as fh:
        return parse_record(fh.read())


def write_record(record: GameRecord, path) -> None:
    with open(path, "w") as fh:
        fh.write(record.to_text())


class _PropertyTracker:
    """Incremental test of whether Maker's graph has reached, or can no longer
    reach, a monotone property. Doom is detected only through vertex stars:
    a vertex whose Breaker degree exceeds ``n - 1 - k`` can never reach
    Maker degree ``k``."""

    def __init__(self, n: int, prop: PropertyId):
        self.n = n
        self.prop = prop
        kind = prop.kind
        if kind in ("min_degree", "k_connected"):
            self.need = prop.k
        elif kind == "connected":
            self.need = 1
        else:
            self.need = 2 if n >= 3 else 1
        self.deficient = n
        self.uf = UnionFind(n)
        self.doomed = False
        self.achieved = False

    def on_claim(self, state: GameState, e: int, who: int) -> None:
        u, v = state.us[e], state.vs[e]
        if who == MAKER:
            self.uf.union(u, v)
            need = self.need
            if state.maker_deg[u] == need:
                self.deficient -= 1
            if state.maker_deg[v] == need:
                self.deficient -= 1
        else:
            cap = self.n - 1 - self.need
            if state.breaker_deg[u] > cap or state.breaker_deg[v] > cap:
                self.doomed = True

    def decided(self, state: GameState) -> bool:
        if self.achieved or self.doomed:
            return True
        if self.deficient > 0:
            return False
        kind = self.prop.kind
        if kind == "min_degree":
            self.achieved = True
        elif self.uf.components == 1:
            if kind == "connected":
                self.achieved = True
            else:
                self.achieved = check_property(state.maker_graph(), self.prop, backtracking=True)
        return self.achieved


def _take_turn(state, strategy, who, count, rng, moves, owners, subs, tracker):
    count = min(count, state.free_count)
    if count == 0:
        return
    picks = strategy.next_moves(state, count, rng) or []
    for i in range(count):
        e = picks[i] if i < len(picks) else None
        if e is None or not state.is_free(e):
            e = state.smallest_free()[0]
            subs.append(len(moves))
        state.claim(e, who)
        moves.append(e)
        owners.append(who)
        if tracker is not None:
            tracker.on_claim(state, e, who)


def play_game(config: GameConfig, maker, breaker, seed: int) -> GameRecord:
    """Play one game and return its record.

    ``breaker=None`` plays Maker alone (Breaker is never scheduled). Moves that
    are missing or not free are replaced by the smallest free edge and their
    play-sequence positions are listed in ``record.substitutions``.
    """
    rng = random.Random(seed)
    state = GameState(config.n)
    maker.start(state, config, rng)
    if breaker is not None:
        breaker.start(state, config, rng)
    tracker = _PropertyTracker(config.n, config.prop) if config.stop == STOP_PROPERTY else None
    moves: list[int] = []
    owners = bytearray()
    subs: list[int] = []
    cap = config.max_rounds
    while state.free_count and (cap is None or state.round < cap):
        try:
            _take_turn(state, maker, MAKER, config.a, rng, moves, owners, subs, tracker)
            if breaker is not None:
                _take_turn(state, breaker, BREAKER, config.b, rng, moves, owners, subs, tracker)
        except InvalidArgument:
            raise
        except Exception as exc:
            raise StrategyError(state.round + 1, exc) from exc
        state.round += 1
        if tracker is not None and tracker.decided(state):
            break
    meta = {"maker": maker.name, "breaker": breaker.name if breaker is not None else "none"}
    record = GameRecord(config, seed, moves, owners, state.round, subs, meta)
    record.sigma = getattr(maker, "sigma", None)
    return record


def replay(record: GameRecord, r: int) -> GameState:
    state = GameState(record.config.n)
    upto = record.prefix_length(r)
    for e, o in zip(record.moves[:upto], record.owners[:upto]):
        state.claim(e, o)
    state.round = r
    return state


def state_at_round(record: GameRecord, r: int) -> GameState:
    if not 0 <= r <= record.stop_round:
        raise InvalidArgument(f"round {r} outside [0, {record.stop_round}]")
    return replay(record, r)


@dataclass
class ValidationReport:
    valid: bool
    index: int | None = None
    reason: str = ""


def validate_record(record: GameRecord) -> ValidationReport:
    """Check play-sequence invariants; ``index`` is the 0-based position of the
    first offending entry."""
    c = record.config
    total = c.total_edges
    a = c.a
    size = record.round_size
    seen: set[int] = set()
    for i, (e, o) in enumerate(zip(record.moves, record.owners)):
        if not 0 <= e < total:
            return ValidationReport(False, i, f"edge id {e} out of range")
        if e in seen:
            return ValidationReport(False, i, f"edge {edge_endpoints(e, c.n)} occupied twice")
        seen.add(e)
        expected = MAKER if i % size < a else BREAKER
        if o != expected:
            return ValidationReport(False, i, f"turn order: expected {OWNER_CHAR[expected]}, got {OWNER_CHAR.get(o, o)}")
    k = len(record.moves)
    if k % size and k != total:
        return ValidationReport(False, k - 1, "partial final round without board exhaustion")
    rounds = -(-k // size)
    if rounds != record.stop_round:
        return ValidationReport(False, None, f"stop_round {record.stop_round} but sequence spans {rounds} rounds")
    return ValidationReport(True)
