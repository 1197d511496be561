import pytest

from pushdown_games.games import Bounds, solve
from pushdown_games.reductions import (
    ACCEPT,
    REJECT,
    UNKNOWN_VERDICT,
    AlphabetMismatchError,
    reduce_ahpda,
    simulate_ahpda,
)
from pushdown_games.stores import SKIP, make_store
from pushdown_games.systems import AHpda, Hpds, Rule
from ahpda_suite import all_words, exact_ab, suite, universal_both

BOUNDS = Bounds(max_len={1: 9, 2: 5}, max_configs=60_000)


def tiny(states, rules, existential, accepting, initial="q0"):
    hpds = Hpds(1, tuple(states), ("s",), tuple(rules))
    return AHpda(hpds, ("a", "b"), frozenset(existential), initial,
                 make_store(1), frozenset(accepting))


class TestReduce:
    def test_empty_word_keeps_only_epsilon_rules(self):
        a = exact_ab()
        game = reduce_ahpda(a, [])
        assert len(game.hpds.states) == len(a.hpds.states)
        assert all(s.endswith("@0") for s in game.hpds.states)
        assert all(r.src.endswith("@0") and r.dst.endswith("@0") for r in game.hpds.rules)
        # only the epsilon rule of exact_ab survives
        assert len(game.hpds.rules) == 1

    def test_state_count_exact(self):
        for name, a in suite():
            for word in (tuple(), ("a",), ("a", "b", "a")):
                game = reduce_ahpda(a, word)
                assert len(game.hpds.states) == len(a.hpds.states) * (len(word) + 1), name
                assert len(game.hpds.rules) <= len(a.hpds.rules) * (len(word) + 1), name

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatchError):
            reduce_ahpda(exact_ab(), ["a", "c"])

    def test_exact_ab_accepts_ab_not_ba(self):
        a = exact_ab()
        assert solve(reduce_ahpda(a, ["a", "b"]), BOUNDS).winner == "W0"
        assert solve(reduce_ahpda(a, ["b", "a"]), BOUNDS).winner == "W1"
        assert simulate_ahpda(a, ["a", "b"], BOUNDS) == ACCEPT
        assert simulate_ahpda(a, ["b", "a"], BOUNDS) == REJECT

    def test_universal_with_rejecting_branch_loses(self):
        rules = [
            Rule("q0", "_1", "good", SKIP, None),
            Rule("q0", "_1", "dead", SKIP, None),
            Rule("good", "_1", "good", SKIP, None),
        ]
        # the dead end is existential: a stuck mover loses in the game and a
        # stuck non-accepting node rejects in the tree, so both agree
        a = tiny(["q0", "good", "dead"], rules, existential={"good", "dead"},
                 accepting={"good"})
        assert solve(reduce_ahpda(a, []), BOUNDS).winner == "W1"
        assert simulate_ahpda(a, [], BOUNDS) == REJECT


class TestSimulate:
    def test_initial_accepting_empty_word(self):
        a = tiny(["q0"], [], existential={"q0"}, accepting={"q0"})
        assert simulate_ahpda(a, [], BOUNDS) == ACCEPT

    def test_stuck_universal_nonaccepting_rejects(self):
        a = tiny(["q0"], [], existential=set(), accepting=set())
        assert simulate_ahpda(a, [], BOUNDS) == REJECT

    def test_stuck_existential_nonaccepting_rejects(self):
        a = tiny(["q0"], [], existential={"q0"}, accepting=set())
        assert simulate_ahpda(a, [], BOUNDS) == REJECT

    def test_epsilon_cycle_rejects(self):
        rules = [Rule("q0", "_1", "q0", SKIP, None)]
        a = tiny(["q0"], rules, existential={"q0"}, accepting=set())
        assert simulate_ahpda(a, [], BOUNDS) == REJECT

    def test_unknown_when_bounds_too_tight(self):
        from pushdown_games.stores import Push1

        rules = [Rule("q0", "_1", "q0", Push1("s"), None),
                 Rule("q0", "s", "q0", Push1("s"), None)]
        a = tiny(["q0", "far"], rules, existential={"q0", "far"}, accepting={"far"})
        assert simulate_ahpda(a, [], Bounds(max_len={1: 2})) == UNKNOWN_VERDICT


class TestSuiteAgreement:
    def test_solve_matches_simulate_on_definite_verdicts(self):
        machines = suite()
        assert len(machines) >= 20
        checked = definite = 0
        for name, a in machines:
            for word in all_words(a.input_alphabet, 4):
                verdict = simulate_ahpda(a, word, BOUNDS)
                checked += 1
                if verdict == UNKNOWN_VERDICT:
                    continue
                definite += 1
                winner = solve(reduce_ahpda(a, word), BOUNDS).winner
                expected = "W0" if verdict == ACCEPT else "W1"
                assert winner == expected, f"{name} on {word}: {winner} vs {verdict}"
        assert definite > checked * 0.9
