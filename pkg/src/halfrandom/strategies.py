"""Player strategies.

A strategy is bound to a single game: the engine calls ``start`` once before
the first move and then ``next_moves`` on every turn of its player.
"""

from __future__ import annotations

import math
import random

from .errors import InvalidArgument
from .game import FREE, GameState
from .graph_core import edge_index, num_edges


class Strategy:
    name = "strategy"

    def start(self, state: GameState, config, rng) -> None:
        pass

    def next_moves(self, state: GameState, count: int, rng) -> list[int]:
        raise NotImplementedError


class UniformRandomMaker(Strategy):
    """Each move is a uniformly random free edge."""

    name = "uniform"

    def next_moves(self, state, count, rng):
        free = state.free
        if count == 1:
            return [free[rng.randrange(len(free))]]
        return rng.sample(free, min(count, len(free)))


class RandomBreaker(UniformRandomMaker):
    name = "random"


class SmallestFreeEdge(Strategy):
    name = "smallest"

    def next_moves(self, state, count, rng):
        return state.smallest_free(count)


class EdgePermutation:
    """A fixed ordering of all edges together with a scan cursor."""

    def __init__(self, order):
        self.order = list(order)
        self.cursor = 0

    def __len__(self):
        return len(self.order)

    def next_free(self, owner, count: int) -> list[int]:
        out = []
        order = self.order
        i = self.cursor
        while i < len(order) and len(out) < count:
            e = order[i]
            i += 1
            if owner[e] == FREE:
                out.append(e)
        self.cursor = i
        return out


def sample_edge_permutation(n: int, rng) -> EdgePermutation:
    if n < 2:
        raise InvalidArgument("n must be at least 2")
    order = list(range(num_edges(n)))
    rng.shuffle(order)
    return EdgePermutation(order)


def regenerate_sigma(n: int, seed: int) -> list[int]:
    """The permutation a :class:`PermutationMaker` draws in a game seeded with ``seed``.

    The permutation is the first thing drawn from the game's generator, so the
    seed alone determines it.
    """
    return sample_edge_permutation(n, random.Random(seed)).order


class PermutationMaker(Strategy):
    """Claims the next still-free edge of a permutation drawn at the start.

    Passing ``order`` fixes the permutation instead of sampling it.
    """

    name = "permutation"

    def __init__(self, order=None):
        self._fixed = order
        self.perm: EdgePermutation | None = None

    @property
    def sigma(self) -> list[int] | None:
        return self.perm.order if self.perm is not None else None

    def start(self, state, config, rng):
        if self._fixed is not None:
            self.perm = EdgePermutation(self._fixed)
        else:
            self.perm = sample_edge_permutation(state.n, rng)
        if len(self.perm) != state.total:
            raise InvalidArgument("permutation length does not match the board")

    def next_moves(self, state, count, rng):
        return self.perm.next_free(state.owner, count)


def fail_cap(n: int, eps: float) -> int:
    """Number of failed isolation attempts after which the isolation breaker forfeits."""
    if n < 3:
        return 1
    lnln = math.log(math.log(n))
    if lnln <= 0:
        return 1
    return max(1, math.floor((1 - eps) * math.log(n) / (4 * lnln)))


class IsolationBreaker(Strategy):
    """Tries to claim the whole star of a vertex Maker has not touched yet.

    The target is the smallest vertex with Maker-degree 0 that still has a free
    incident edge; its edges are claimed in increasing order of the other
    endpoint. When Maker touches the target the attempt has failed, which is
    noticed at the start of Breaker's next turn. After ``fail_cap`` failures, or
    when no target is left, the breaker plays the smallest free edge.
    """

    def __init__(self, eps: float):
        if not 0 < eps < 1:
            raise InvalidArgument("eps must lie in (0, 1)")
        self.eps = eps
        self.name = f"isolation:eps={eps!r}"
        self.fail_cap = 1
        self.target: int | None = None
        self.failures = 0
        self.forfeited = False
        self.attempts: list[int] = []
        self._scan = 0   # vertices below this can never become targets again
        self._next = 0   # next other endpoint to try for the current target

    def start(self, state, config, rng):
        if config.b != 1:
            raise InvalidArgument("the isolation breaker requires Breaker bias 1")
        self.fail_cap = fail_cap(state.n, self.eps)

    def _pick_target(self, state: GameState) -> int | None:
        v = self._scan
        while v < state.n and not (state.maker_deg[v] == 0 and state.free_degree(v) > 0):
            v += 1
        self._scan = v
        return v if v < state.n else None

    def next_moves(self, state, count, rng):
        if state.free_count == 0:
            return []
        if not self.forfeited:
            t = self.target
            if t is not None and state.maker_deg[t] > 0:
                self.failures += 1
                self.target = t = None
                if self.failures >= self.fail_cap:
                    self.forfeited = True
            elif t is not None and state.free_degree(t) == 0:
                self.target = t = None
            if not self.forfeited and t is None:
                t = self.target = self._pick_target(state)
                if t is not None:
                    self.attempts.append(t)
                    self._next = 0
            if not self.forfeited and t is not None:
                n = state.n
                w = self._next
                owner = state.owner
                while w < n and (w == t or owner[edge_index(t, w, n)] != FREE):
                    w += 1
                self._next = w + 1
                return [edge_index(t, w, n)]
        return state.smallest_free(count)


MAKERS = ("uniform", "permutation")
BREAKERS = ("isolation:eps=<x>", "random", "smallest", "none")


def make_maker(spec: str) -> Strategy:
    if spec == "uniform":
        return UniformRandomMaker()
    if spec == "permutation":
        return PermutationMaker()
    raise InvalidArgument(f"unknown maker {spec!r}; expected one of {', '.join(MAKERS)}")


def make_breaker(spec: str) -> Strategy | None:
    if spec == "random":
        return RandomBreaker()
    if spec == "smallest":
        return SmallestFreeEdge()
    if spec == "none":
        return None
    if spec.startswith("isolation"):
        _, _, rest = spec.partition(":")
        key, _, value = rest.partition("=")
        if key != "eps":
            raise InvalidArgument(f"isolation breaker needs 'isolation:eps=<x>', got {spec!r}")
        try:
            return IsolationBreaker(float(value))
        except ValueError as exc:
            raise InvalidArgument(f"bad eps in {spec!r}") from exc
    raise InvalidArgument(f"unknown breaker {spec!r}; expected one of {', '.join(BREAKERS)}")
