import random

import pytest

from halfrandom.errors import InvalidArgument, StrategyError
from halfrandom.game import (BREAKER, FREE, MAKER, GameConfig, GameRecord, parse_record, play_game, read_record,
                             state_at_round, validate_record, write_record)
from halfrandom.graph_core import SimpleGraph, num_edges
from halfrandom.properties import PropertyId, check_property
from halfrandom.strategies import (IsolationBreaker, PermutationMaker, RandomBreaker, SmallestFreeEdge, Strategy,
                                   UniformRandomMaker, regenerate_sigma)


def test_n2_maker_takes_single_edge():
    rec = play_game(GameConfig(2, 1, 1), UniformRandomMaker(), RandomBreaker(), 5)
    assert rec.play_sequence == [(0, "M")]
    assert rec.stop_round == 1
    assert validate_record(rec).valid


def test_n3_bias_three_takes_triangle():
    rec = play_game(GameConfig(3, 3, 1), UniformRandomMaker(), RandomBreaker(), 5)
    assert sorted(e for e, o in rec.play_sequence) == [0, 1, 2]
    assert all(o == "M" for _, o in rec.play_sequence)
    assert rec.maker_graph().num_edges() == 3


def test_identity_permutation_vs_smallest_hand_trace():
    rec = play_game(GameConfig(4, 1, 1), PermutationMaker(list(range(6))), SmallestFreeEdge(), 0)
    assert rec.play_sequence == [(0, "M"), (1, "B"), (2, "M"), (3, "B"), (4, "M"), (5, "B")]
    assert rec.substitutions == []


@pytest.mark.parametrize("kwargs", [dict(n=1), dict(n=4, a=0), dict(n=4, b=0), dict(n=3, a=4),
                                    dict(n=4, stop="property"), dict(n=4, stop="round-cap"),
                                    dict(n=4, stop="sometimes")])
def test_config_errors(kwargs):
    with pytest.raises(InvalidArgument):
        GameConfig(**kwargs)


def test_determinism():
    cfg = GameConfig(20, 2, 1)
    r1 = play_game(cfg, UniformRandomMaker(), IsolationBreaker(0.3), 99)
    r2 = play_game(cfg, UniformRandomMaker(), IsolationBreaker(0.3), 99)
    assert r1.to_text() == r2.to_text()
    r3 = play_game(cfg, UniformRandomMaker(), IsolationBreaker(0.3), 100)
    assert r1.to_text() != r3.to_text()


class Recorder(Strategy):
    """Wraps a strategy and checks conservation and monotonicity on each call."""

    def __init__(self, inner, log):
        self.inner, self.log = inner, log
        self.name = inner.name

    def start(self, state, config, rng):
        self.inner.start(state, config, rng)

    def next_moves(self, state, count, rng):
        owned = sum(1 for o in state.owner if o != FREE)
        assert owned + state.free_count == state.total
        assert sorted(state.free) == [e for e in range(state.total) if state.owner[e] == FREE]
        for v in range(state.n):
            inc = [e for e in range(state.total) if state.us[e] == v or state.vs[e] == v]
            assert state.maker_deg[v] == sum(state.owner[e] == MAKER for e in inc)
            assert state.breaker_deg[v] == sum(state.owner[e] == BREAKER for e in inc)
        snapshot = bytes(state.owner)
        if self.log:
            prev = self.log[-1]
            assert all(p == FREE or p == s for p, s in zip(prev, snapshot))
        self.log.append(snapshot)
        return self.inner.next_moves(state, count, rng)


def test_conservation_turn_shape_monotonicity():
    rng = random.Random(3)
    for _ in range(20):
        n, b = rng.randint(2, 9), rng.randint(1, 3)
        a = rng.randint(1, min(4, num_edges(n)))
        log = []
        rec = play_game(GameConfig(n, a, b), Recorder(UniformRandomMaker(), log), Recorder(RandomBreaker(), log),
                        rng.getrandbits(64))
        assert len(rec.moves) == num_edges(n)
        assert validate_record(rec).valid
        size = a + b
        for r in range(rec.stop_round + 1):
            assert len(rec.maker_edges(r)) == min(r * a, sum(o == MAKER for o in rec.owners))
        for r in range(rec.stop_round - 1):
            chunk = rec.owners[r * size:(r + 1) * size]
            assert list(chunk) == [MAKER] * a + [BREAKER] * b


class Lazy(Strategy):
    name = "lazy"

    def next_moves(self, state, count, rng):
        return []


class Stubborn(Strategy):
    name = "stubborn"

    def next_moves(self, state, count, rng):
        return [0] * count


def test_substitution_of_missing_and_occupied_moves():
    rec = play_game(GameConfig(5, 1, 1), Stubborn(), Lazy(), 1)
    # Maker claims edge 0 first; afterwards both players are substituted by
    # the smallest free edge
    assert [e for e, _ in rec.play_sequence] == list(range(10))
    assert rec.substitutions == list(range(1, 10))


class Boom(Strategy):
    name = "boom"

    def next_moves(self, state, count, rng):
        if state.free_count < 5:
            raise RuntimeError("boom")
        return state.smallest_free(count)


def test_strategy_failure_carries_round():
    with pytest.raises(StrategyError) as info:
        play_game(GameConfig(4, 1, 1), Boom(), SmallestFreeEdge(), 0)
    assert info.value.round == 1 + 1   # 6 edges, fails once fewer than 5 are free
    assert isinstance(info.value.__cause__, RuntimeError)


def test_exhaustion_mid_turn():
    rec = play_game(GameConfig(4, 4, 3), UniformRandomMaker(), RandomBreaker(), 2)
    assert [o for _, o in rec.play_sequence] == ["M"] * 4 + ["B"] * 2
    assert rec.stop_round == 1 and validate_record(rec).valid


def test_round_cap():
    rec = play_game(GameConfig(10, 2, 1, max_rounds=5, stop="round-cap"), UniformRandomMaker(), RandomBreaker(), 1)
    assert rec.stop_round == 5 and len(rec.moves) == 15


def test_property_stop_is_first_achieving_round():
    rng = random.Random(4)
    prop = PropertyId("min_degree", 1)
    for _ in range(30):
        n = rng.randint(4, 20)
        cfg = GameConfig(n, rng.randint(1, 4), 1, stop="property", prop=prop)
        rec = play_game(cfg, UniformRandomMaker(), RandomBreaker(), rng.getrandbits(32))
        full = play_game(GameConfig(n, cfg.a, 1), UniformRandomMaker(), RandomBreaker(), rec.seed)
        assert full.moves[:len(rec.moves)] == rec.moves
        first = next((r for r in range(full.stop_round + 1)
                      if check_property(full.maker_graph(r), prop)), None)
        if first is not None and rec.maker_graph().n and check_property(rec.maker_graph(), prop):
            assert rec.stop_round == first
        else:
            # stopped early only because some vertex lost all its edges to Breaker
            assert not check_property(full.maker_graph(), prop)


def test_property_stop_connectivity_and_hamiltonicity():
    for prop in (PropertyId("connected"), PropertyId("hamiltonian"), PropertyId("k_connected", 2)):
        rec = play_game(GameConfig(12, 3, 1, stop="property", prop=prop), UniformRandomMaker(), RandomBreaker(), 8)
        g = rec.maker_graph()
        if check_property(g, prop):
            assert not check_property(rec.maker_graph(rec.stop_round - 1), prop)


def test_state_at_round_examples():
    rec = play_game(GameConfig(8, 2, 1), UniformRandomMaker(), RandomBreaker(), 11)
    s0 = state_at_round(rec, 0)
    assert s0.free_count == s0.total and all(o == FREE for o in s0.owner)
    last = state_at_round(rec, rec.stop_round)
    assert last.free_count == 0
    with pytest.raises(InvalidArgument):
        state_at_round(rec, rec.stop_round + 1)
    with pytest.raises(InvalidArgument):
        state_at_round(rec, -1)


def test_replay_prefix_oracle():
    rng = random.Random(5)
    for _ in range(100):
        rec = play_game(GameConfig(10, rng.randint(1, 3), rng.randint(1, 2)), UniformRandomMaker(), RandomBreaker(),
                        rng.getrandbits(64))
        r = rng.randrange(rec.stop_round)
        s = state_at_round(rec, r)
        size = rec.round_size
        for i in range(r * size, min((r + 1) * size, len(rec.moves))):
            s.claim(rec.moves[i], rec.owners[i])
        direct = state_at_round(rec, r + 1)
        assert bytes(s.owner) == bytes(direct.owner)
        assert s.maker_deg == direct.maker_deg and s.breaker_deg == direct.breaker_deg


def _record(moves, owners, n=4, a=1, b=1):
    return GameRecord(GameConfig(n, a, b), 0, list(moves), bytearray(owners), -(-len(moves) // (a + b)),
                      meta={"maker": "uniform", "breaker": "smallest"})


def test_validate_duplicate_edge():
    rep = validate_record(_record([0, 1, 0, 2], [MAKER, BREAKER, MAKER, BREAKER]))
    assert not rep.valid and rep.index == 2 and "twice" in rep.reason


def test_validate_turn_order():
    rep = validate_record(_record([0, 1], [BREAKER, MAKER]))
    assert not rep.valid and rep.index == 0 and "turn order" in rep.reason


def test_validate_partial_round_and_stop_round():
    assert not validate_record(_record([0, 1, 2], [MAKER, BREAKER, MAKER])).valid
    rec = _record([0, 1], [MAKER, BREAKER])
    rec.stop_round = 3
    assert not validate_record(rec).valid


def test_record_file_roundtrip(tmp_path):
    rec = play_game(GameConfig(9, 2, 1), PermutationMaker(), IsolationBreaker(0.3), 21)
    path = tmp_path / "game.txt"
    write_record(rec, path)
    text = path.read_text()
    assert text.splitlines()[0] == f"game 9 2 1 21 {rec.stop_round}"
    move_lines = [ln for ln in text.splitlines()[1:] if not ln.startswith("#")]
    assert len(move_lines) == len(rec.moves) and move_lines[0].split()[0] == "1"
    assert move_lines[0].split()[3] == "M" and move_lines[2].split()[3] == "B"
    back = read_record(path)
    assert back.moves == rec.moves and bytes(back.owners) == bytes(rec.owners)
    assert back.stop_round == rec.stop_round and back.seed == 21
    assert back.meta == rec.meta
    assert back.sigma == rec.sigma == regenerate_sigma(9, 21)
    assert validate_record(back).valid


@pytest.mark.parametrize("text", ["", "game 4 1 1 0\n", "game 4 1 1 0 1\n1 0 1 X\n", "game 4 1 1 0 1\n1 0 0 M\n",
                                  "gam 4 1 1 0 1\n"])
def test_record_parse_errors(text):
    with pytest.raises(InvalidArgument):
        parse_record(text)


def test_maker_only_game():
    rec = play_game(GameConfig(6, 1, 1), PermutationMaker(), None, 3)
    assert all(o == "M" for _, o in rec.play_sequence)
    assert rec.moves == rec.sigma
    assert validate_record(rec).valid
    assert SimpleGraph(6, rec.sigma[:7]) == rec.maker_graph(7)
