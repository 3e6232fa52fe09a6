"""Monte Carlo harness: win probabilities, bias sweeps and the play-sequence
equivalence test between the uniform and the permutation Maker."""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from scipy import stats

from .errors import InvalidArgument, UnsupportedSize
from .game import BREAKER, MAKER, STOP_PROPERTY, GameConfig, GameState, play_game
from .properties import PropertyId, check_property
from .strategies import PermutationMaker, UniformRandomMaker, make_breaker, make_maker
from .structure import AnalysisParams

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def _finalize(x: int) -> int:
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def derive_trial_seed(base: int, index: int) -> int:
    """Seed of trial ``index``: the 64-bit avalanche of ``base ^ (index+1)*gamma``."""
    return _finalize((base & MASK64) ^ (((index + 1) * GOLDEN_GAMMA) & MASK64))


def wilson_interval(wins: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    if trials <= 0:
        raise InvalidArgument("trials must be positive")
    p = wins / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, min(p, centre - half)), min(1.0, max(p, centre + half))


@dataclass(frozen=True)
class TrialSpec:
    config: GameConfig
    maker: str = "uniform"
    breaker: str = "isolation:eps=0.3"
    prop: PropertyId = PropertyId("min_degree", 1)
    trials: int = 100
    base_seed: int = 0
    horizon: int | None = None
    paper_alpha: float | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidArgument("trials must be at least 1")
        make_maker(self.maker)
        make_breaker(self.breaker)

    def round_cap(self) -> int | None:
        """Rounds after which the win is evaluated; None means board exhaustion."""
        if self.paper_alpha is not None:
            return AnalysisParams(self.paper_alpha, self.config.n).t
        return self.horizon

    def game_config(self) -> GameConfig:
        # Properties are monotone, so stopping as soon as the outcome is decided
        # gives the same win as playing on to the horizon.
        return replace(self.config, stop=STOP_PROPERTY, prop=self.prop, max_rounds=self.round_cap())


@dataclass(frozen=True)
class TrialResult:
    trial: int
    seed: int
    win: bool
    stop_round: int


def run_trial(spec: TrialSpec, index: int) -> TrialResult:
    seed = derive_trial_seed(spec.base_seed, index)
    record = play_game(spec.game_config(), make_maker(spec.maker), make_breaker(spec.breaker), seed)
    win = check_property(record.maker_graph(), spec.prop, backtracking=True)
    return TrialResult(index, seed, win, record.stop_round)


def _run_chunk(args) -> list[TrialResult]:
    spec, indices = args
    return [run_trial(spec, i) for i in indices]


@dataclass
class MonteCarloReport:
    wins: int
    trials: int
    p_hat: float
    wilson_ci: tuple[float, float]
    mean_stop_round: float
    base_seed: int
    results: list[TrialResult] = field(default_factory=list, repr=False)

    @property
    def half_width(self) -> float:
        return (self.wilson_ci[1] - self.wilson_ci[0]) / 2

    def summary(self) -> dict:
        return {
            "wins": self.wins,
            "trials": self.trials,
            "p_hat": self.p_hat,
            "wilson_low": self.wilson_ci[0],
            "wilson_high": self.wilson_ci[1],
            "mean_stop_round": self.mean_stop_round,
            "base_seed": self.base_seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"

    def csv_rows(self) -> list[str]:
        return [f"{r.trial},{r.seed},{int(r.win)},{r.stop_round}" for r in self.results]

    def to_csv(self) -> str:
        return "\n".join(["trial,seed,win,stop_round"] + self.csv_rows()) + "\n"


def report_from_results(results: list[TrialResult], base_seed: int) -> MonteCarloReport:
    results = sorted(results, key=lambda r: r.trial)
    wins = sum(r.win for r in results)
    n = len(results)
    return MonteCarloReport(wins, n, wins / n, wilson_interval(wins, n),
                            sum(r.stop_round for r in results) / n, base_seed, results)


def run_trials(spec: TrialSpec, jobs: int = 1) -> MonteCarloReport:
    """Play ``spec.trials`` independent games and estimate Maker's win probability.

    Trial ``i`` is seeded with ``derive_trial_seed(base_seed, i)``, so the result
    does not depend on ``jobs``.
    """
    indices = list(range(spec.trials))
    if jobs <= 1:
        results = _run_chunk((spec, indices))
    else:
        chunks = [indices[i::jobs] for i in range(jobs)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = [r for part in pool.map(_run_chunk, [(spec, c) for c in chunks]) for r in part]
    return report_from_results(results, spec.base_seed)


# -- bias sweeps ------------------------------------------------------------------

@dataclass
class SweepReport:
    n: int
    points: list[tuple[int, MonteCarloReport]]
    crossover_a: float | None
    normalized: float | None

    def summary(self) -> dict:
        return {
            "n": self.n,
            "points": [{"a": a, **rep.summary()} for a, rep in self.points],
            "crossover_a": self.crossover_a,
            "normalized": self.normalized,
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        lines = ["a,trial,seed,win,stop_round"]
        for a, rep in self.points:
            lines.extend(f"{a},{row}" for row in rep.csv_rows())
        return "\n".join(lines) + "\n"


def crossover(points: list[tuple[float, float]]) -> float | None:
    """First grid interval where ``p_hat`` passes 1/2, by linear interpolation."""
    for (a0, p0), (a1, p1) in zip(points, points[1:]):
        if p0 == 0.5:
            return float(a0)
        if min(p0, p1) <= 0.5 <= max(p0, p1):
            return a0 + (0.5 - p0) * (a1 - a0) / (p1 - p0)
    if points and points[-1][1] == 0.5:
        return float(points[-1][0])
    return None


def normalized_crossover(a: float | None, n: int) -> float | None:
    if a is None or n < 16:   # ln ln n must be clearly positive
        return None
    return a / math.log(math.log(n))


def bias_sweep(spec: TrialSpec, a_grid, jobs: int = 1) -> SweepReport:
    """Run ``spec`` once per Maker bias in ``a_grid``; every grid point reuses the
    same trial seeds."""
    a_grid = list(a_grid)
    if not a_grid or any(x >= y for x, y in zip(a_grid, a_grid[1:])):
        raise InvalidArgument("a_grid must be non-empty and strictly increasing")
    points = []
    for a in a_grid:
        sub = replace(spec, config=replace(spec.config, a=a))
        points.append((a, run_trials(sub, jobs)))
    cx = crossover([(a, rep.p_hat) for a, rep in points])
    return SweepReport(spec.config.n, points, cx, normalized_crossover(cx, spec.config.n))


# -- play-sequence distribution equivalence -------------------------------------

EQUIV_LIMIT = 4


def _replay_breaker(n: int, config: GameConfig, breaker_spec: str, history: list[int], count: int):
    """Breaker's next moves after ``history`` (a list of edges in play order),
    recomputed from scratch so strategy state is reproduced exactly."""
    breaker = make_breaker(breaker_spec)
    state = GameState(n)
    breaker.start(state, config, None)
    size = config.a + config.b
    for i, e in enumerate(history):
        who = MAKER if i % size < config.a else BREAKER
        if who == BREAKER and i % size == config.a:
            breaker.next_moves(state, config.b, None)   # advance internal state
        state.claim(e, who)
    moves = breaker.next_moves(state, count, None) or []
    out = []
    for i in range(count):
        e = moves[i] if i < len(moves) else None
        if e is None or not state.is_free(e) or e in out:
            free = [x for x in range(state.total) if state.is_free(x) and x not in out]
            e = free[0]
        out.append(e)
    return out


def exact_prefix_distribution(n: int, breaker_spec: str, prefix_len: int,
                              a: int = 1, b: int = 1) -> dict[tuple, float]:
    """Exact law of the first ``prefix_len`` play-sequence entries when Maker
    picks uniformly among free edges and Breaker is deterministic."""
    if n > EQUIV_LIMIT:
        raise UnsupportedSize(f"exact enumeration is limited to n <= {EQUIV_LIMIT}")
    config = GameConfig(n, a, b)
    total = config.total_edges
    prefix_len = min(prefix_len, total)
    size = a + b
    dist: dict[tuple, float] = {}

    def walk(history: list[int], prob: float):
        i = len(history)
        if i == prefix_len:
            key = tuple((e, "M" if j % size < a else "B") for j, e in enumerate(history))
            dist[key] = dist.get(key, 0.0) + prob
            return
        if i % size < a:
            free = [e for e in range(total) if e not in history]
            for e in free:
                walk(history + [e], prob / len(free))
        else:
            # the whole Breaker turn is one deterministic block
            turn_left = size - i % size
            block = _replay_breaker(n, config, breaker_spec, history, min(turn_left, total - i))
            walk((history + block)[:prefix_len], prob)

    walk([], 1.0)
    return dist


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


@dataclass
class EquivalenceReport:
    n: int
    games: int
    prefix_len: int
    exact: dict
    uniform_counts: Counter
    permutation_counts: Counter
    tv_modes: float
    tv_uniform_exact: float
    tv_permutation_exact: float
    chi2_uniform: float
    p_uniform: float
    chi2_permutation: float
    p_permutation: float

    def summary(self) -> dict:
        return {
            "n": self.n, "games": self.games, "prefix_len": self.prefix_len,
            "support": len(self.exact),
            "tv_modes": self.tv_modes,
            "tv_uniform_exact": self.tv_uniform_exact,
            "tv_permutation_exact": self.tv_permutation_exact,
            "chi2_uniform": self.chi2_uniform, "p_uniform": self.p_uniform,
            "chi2_permutation": self.chi2_permutation, "p_permutation": self.p_permutation,
        }


def _empirical(counts: Counter, games: int) -> dict:
    return {k: c / games for k, c in counts.items()}


def _chi2(counts: Counter, exact: dict, games: int) -> tuple[float, float]:
    keys = sorted(exact)
    observed = [counts.get(k, 0) for k in keys]
    extra = games - sum(observed)
    expected = [exact[k] * games for k in keys]
    if extra:
        return math.inf, 0.0
    if len(keys) < 2:
        return 0.0, 1.0
    res = stats.chisquare(observed, expected)
    return float(res.statistic), float(res.pvalue)


def distribution_equivalence_test(n: int, breaker: str, games: int, prefix_len: int,
                                  base_seed: int = 0, a: int = 1, b: int = 1) -> EquivalenceReport:
    """Compare play-sequence prefixes under the uniform and the permutation Maker
    against a deterministic Breaker, both with each other and with the exact law."""
    if n > EQUIV_LIMIT:
        raise UnsupportedSize(f"exact enumeration is limited to n <= {EQUIV_LIMIT}")
    if breaker in ("random", "none"):
        raise InvalidArgument("the equivalence test needs a deterministic Breaker")
    exact = exact_prefix_distribution(n, breaker, prefix_len, a, b)
    config = GameConfig(n, a, b, max_rounds=-(-prefix_len // (a + b)), stop="round-cap")
    counts = {}
    for mode, factory, offset in (("uniform", UniformRandomMaker, 0), ("permutation", PermutationMaker, games)):
        c = Counter()
        for i in range(games):
            rec = play_game(config, factory(), make_breaker(breaker), derive_trial_seed(base_seed, offset + i))
            c[tuple(rec.play_sequence[:prefix_len])] += 1
        counts[mode] = c
    pu, pp = _empirical(counts["uniform"], games), _empirical(counts["permutation"], games)
    cu = _chi2(counts["uniform"], exact, games)
    cp = _chi2(counts["permutation"], exact, games)
    return EquivalenceReport(n, games, prefix_len, exact, counts["uniform"], counts["permutation"],
                             total_variation(pu, pp), total_variation(pu, exact), total_variation(pp, exact),
                             cu[0], cu[1], cp[0], cp[1])
