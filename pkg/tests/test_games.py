import random

import pytest

from pushdown_games.games import (
    Bounds,
    GameStructure,
    PlayOutcome,
    StrategyUndefinedError,
    arena_to_dot,
    attractor,
    check_strategy,
    explore,
    play,
    solution_to_json,
    solve,
)
from pushdown_games.stores import Pop, Push1, SKIP, make_store
from pushdown_games.systems import Config, Hpds, Rule
from reference_solver import reference_classify
from util import random_game


def lv1(*symbols):
    return make_store(1, symbols)


def game_of(rules, owner, goal, init_state="p", init_store=None, states=None, level=1):
    if init_store is None:
        init_store = lv1()
    if states is None:
        states = sorted({r.src for r in rules} | {r.dst for r in rules} | set(owner))
    h = Hpds(level, tuple(states), ("a", "b"), tuple(rules))
    return GameStructure(h, owner, Config(init_state, init_store), frozenset(goal))


class TestExplore:
    def test_initial_in_goal_is_terminal(self):
        g = game_of([Rule("p", "_1", "p", Push1("a"))], {"p": 0}, {"p"})
        arena = explore(g, Bounds())
        assert arena.explored == 1 and arena.edges[0] == []

    def test_skip_self_loop(self):
        g = game_of([Rule("p", "_1", "p", SKIP)], {"p": 0}, set())
        arena = explore(g, Bounds())
        assert arena.explored == 1
        assert [tid for _, tid in arena.edges[0]] == [0]

    def test_push_loop_cut_by_bounds(self):
        g = game_of([Rule("p", "_1", "p", Push1("a")), Rule("p", "a", "p", Push1("a"))],
                    {"p": 0}, set())
        arena = explore(g, Bounds(max_len={1: 3}))
        # stores of length 0..3 plus the out-of-bounds frontier vertex
        assert arena.explored == 4
        assert arena.oob >= 0 and arena.oob in arena.unresolved

    def test_truncation_flag(self):
        g = game_of([Rule("p", "_1", "p", Push1("a")), Rule("p", "a", "p", Push1("a"))],
                    {"p": 0}, set())
        arena = explore(g, Bounds(max_len={1: 50}, max_configs=5))
        assert arena.truncated


class TestAttractor:
    def test_goal_vertex_base(self):
        g = game_of([], {"p": 0}, {"p"}, states=["p"])
        arena = explore(g, Bounds())
        assert attractor(arena, 0) == {0}

    def test_mover_loses_dead_end(self):
        g = game_of([], {"p": 0}, set(), states=["p"])
        arena = explore(g, Bounds())
        assert attractor(arena, 1) == {0}
        assert attractor(arena, 0) == set()

    def test_cycle_without_goal_attracts_nobody(self):
        rules = [Rule("p", "_1", "q", SKIP), Rule("q", "_1", "p", SKIP)]
        g = game_of(rules, {"p": 0, "q": 1}, set())
        arena = explore(g, Bounds())
        assert attractor(arena, 0) == set()


class TestSolve:
    def test_initial_in_goal(self):
        g = game_of([], {"p": 0}, {"p"}, states=["p"])
        assert solve(g, Bounds()).winner == "W0"

    def test_player0_dead_end(self):
        g = game_of([], {"p": 0}, set(), states=["p"])
        assert solve(g, Bounds()).winner == "W1"

    def test_cycle_is_won_by_player1(self):
        rules = [Rule("p", "_1", "q", SKIP), Rule("q", "_1", "p", SKIP)]
        g = game_of(rules, {"p": 0, "q": 1}, set())
        assert solve(g, Bounds()).winner == "W1"

    def test_unknown_when_bounds_hide_the_goal(self):
        rules = [
            Rule("p", "_1", "p", Push1("a")),
            Rule("p", "a", "p", Push1("a")),
        ]
        g = game_of(rules, {"p": 0, "win": 0}, {"win"}, states=["p", "win"])
        sol = solve(g, Bounds(max_len={1: 2}))
        assert sol.winner == "UNKNOWN"

    def test_choice_matters_by_owner(self):
        # from p one move reaches the goal, the other a losing sink
        rules = [Rule("p", "_1", "g", SKIP), Rule("p", "_1", "s", SKIP),
                 Rule("s", "_1", "s", SKIP)]
        g0 = game_of(rules, {"p": 0, "g": 0, "s": 0}, {"g"})
        g1 = game_of(rules, {"p": 1, "g": 0, "s": 0}, {"g"})
        assert solve(g0, Bounds()).winner == "W0"
        assert solve(g1, Bounds()).winner == "W1"

    def test_determinacy_without_oob(self):
        rng = random.Random(7)
        for _ in range(30):
            g, _ = random_game(rng)
            sol = solve(g, Bounds(max_len={1: 6}, max_configs=5000))
            if not sol.truncated and sol.arena.oob < 0:
                assert sol.counts()["UNKNOWN"] == 0


class TestReferenceEquivalence:
    def test_solver_matches_backward_induction(self):
        rng = random.Random(42)
        for i in range(60):
            g, bounds = random_game(rng, level=1 if i % 2 == 0 else 2)
            sol = solve(g, bounds)
            ref = reference_classify(g, bounds)
            assert sol.classification == ref, f"divergence on generated game {i}"

    def test_monotonicity_under_doubled_bounds(self):
        rng = random.Random(43)
        for _ in range(30):
            g, bounds = random_game(rng)
            sol1 = solve(g, bounds)
            doubled = Bounds(
                max_len={lv: 2 * ln for lv, ln in bounds.max_len.items()},
                max_configs=bounds.max_configs * 4,
            )
            sol2 = solve(g, doubled)
            for config, verdict in sol1.classification.items():
                if verdict in ("W0", "W1"):
                    assert sol2.classification[config] == verdict


class TestStrategies:
    def one_step_game(self):
        rules = [Rule("p", "_1", "g", SKIP), Rule("p", "_1", "s", SKIP)]
        return game_of(rules, {"p": 0, "g": 0, "s": 0}, {"g"})

    def test_one_step_win(self):
        g = self.one_step_game()
        sol = solve(g, Bounds())
        rule = sol.strategy0[g.initial]
        assert rule.dst == "g"

    def test_tie_break_declaration_order(self):
        rules = [Rule("p", "_1", "g2", SKIP), Rule("p", "_1", "g1", SKIP)]
        g = game_of(rules, {"p": 0, "g1": 0, "g2": 0}, {"g1", "g2"})
        sol = solve(g, Bounds())
        assert sol.strategy0[g.initial].dst == "g2"

    def test_losing_vertex_has_no_entry(self):
        g = game_of([Rule("p", "_1", "s", SKIP), Rule("s", "_1", "s", SKIP)],
                    {"p": 0, "s": 0}, set())
        sol = solve(g, Bounds())
        assert g.initial not in sol.strategy0

    def test_play_reaches_goal_with_certified_strategies(self):
        g = self.one_step_game()
        sol = solve(g, Bounds())
        outcome = play(g, sol.strategy0, sol.strategy1, 10)
        assert outcome.kind == "reached"

    def test_play_dead_end(self):
        g = game_of([Rule("p", "_1", "s", SKIP)], {"p": 0, "s": 1}, set())
        sol = solve(g, Bounds())
        # player 1 is stuck at s; with empty strategies the playout records it
        outcome = play(g, {g.initial: g.hpds.rules[0]}, {}, 10)
        assert outcome == PlayOutcome("deadend", 1, 1)

    def test_play_cutoff(self):
        rules = [Rule("p", "_1", "q", SKIP), Rule("q", "_1", "p", SKIP)]
        g = game_of(rules, {"p": 0, "q": 0}, set())
        s = {Config("p", lv1()): rules[0], Config("q", lv1()): rules[1]}
        assert play(g, s, {}, 10).kind == "cutoff"

    def test_play_strategy_undefined(self):
        g = self.one_step_game()
        with pytest.raises(StrategyUndefinedError):
            play(g, {}, {}, 10)

    def test_check_strategy_accepts_solver_strategy(self):
        rng = random.Random(44)
        checked = 0
        for _ in range(40):
            g, bounds = random_game(rng)
            sol = solve(g, bounds)
            if sol.winner == "W0":
                assert check_strategy(g, sol.strategy0, bounds)
                checked += 1
        assert checked > 3

    def test_check_strategy_rejects_empty_strategy(self):
        g = self.one_step_game()
        assert not check_strategy(g, {}, Bounds())

    def test_check_strategy_rejects_lasso(self):
        rules = [Rule("p", "_1", "p", SKIP), Rule("p", "_1", "g", SKIP)]
        g = game_of(rules, {"p": 0, "g": 0}, {"g"})
        bad = {g.initial: rules[0]}
        assert not check_strategy(g, bad, Bounds())
        good = {g.initial: rules[1]}
        assert check_strategy(g, good, Bounds())


class TestExports:
    def test_json_shape(self):
        g = game_of([], {"p": 0}, {"p"}, states=["p"])
        info = solution_to_json(solve(g, Bounds()), emit_strategy=True)
        assert info["winner"] == "P0"
        assert info["explored"] == 1
        assert info["truncated"] is False
        assert info["strategy"] == []

    def test_dot_goal_double_circled(self):
        g = game_of([], {"p": 0}, {"p"}, states=["p"])
        dot = arena_to_dot(explore(g, Bounds()))
        assert "peripheries=2" in dot and dot.startswith("digraph")
