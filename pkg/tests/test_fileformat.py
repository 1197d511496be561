import pytest

from pushdown_games.fileformat import (
    FormatError,
    format_ahpda,
    format_game,
    literal_level,
    parse_ahpda,
    parse_game,
    parse_system,
)
from pushdown_games.games import Bounds, GameStructure, solve
from pushdown_games.stores import Pop, Push1, SKIP, make_store, render_store
from pushdown_games.systems import AHpda, Config, Hpds, Rule

GAME_TEXT = """\
# a tiny game
hpds level=1
alphabet: a b
state p owner=0
state q owner=1 accepting
rule p b -> q pop 1
rule p _1 -> p push1 a
init: p a b
goal: q
"""


class TestParse:
    def test_game_round_trip(self):
        game = parse_game(GAME_TEXT)
        assert game.hpds.level == 1
        assert game.owner == {"p": 0, "q": 1}
        assert game.goal == {"q"}
        assert game.initial == Config("p", make_store(1, ["a", "b"]))
        text2 = format_game(game, header_comments=["regenerated"])
        game2 = parse_game(text2)
        assert game2.hpds.rules == game.hpds.rules
        assert game2.initial == game.initial
        assert game2.goal == game.goal
        assert game2.owner == game.owner

    def test_literal_level_inference(self):
        assert literal_level("a b") == 1
        assert literal_level("[a][b]") == 2
        assert literal_level("[[a]]") == 3
        assert literal_level("") == 1

    def test_init_with_explicit_level(self):
        text = "hpds level=2\nalphabet: a\nstate p owner=0\ninit: p level=2\ngoal:\n"
        game = parse_game(text)
        assert game.initial.store.level == 2 and game.initial.store.is_empty()

    def test_missing_header(self):
        with pytest.raises(FormatError):
            parse_system("alphabet: a\n")

    def test_unknown_declaration(self):
        with pytest.raises(FormatError):
            parse_system("hpds level=1\nfrobnicate: yes\n")

    def test_rule_labels(self):
        text = (
            "hpds level=1\nalphabet: a\ninput_alphabet: x\n"
            "state p owner=0 accepting initial\n"
            "rule p _1 -> p push1 a label=x\n"
            "rule p a -> p skip label=eps\n"
            "init: p\n"
        )
        ahpda = parse_ahpda(text)
        assert ahpda.hpds.rules[0].label == "x"
        assert ahpda.hpds.rules[1].label is None
        assert ahpda.accepting == frozenset({"p"})
        assert ahpda.existential == frozenset({"p"})

    def test_ahpda_round_trip(self):
        h = Hpds(1, ("p", "q"), ("a",), (Rule("p", "_1", "q", Push1("a"), "x"),))
        a = AHpda(h, ("x",), frozenset({"p"}), "p", make_store(1), frozenset({"q"}))
        a2 = parse_ahpda(format_ahpda(a))
        assert a2.hpds.rules == a.hpds.rules
        assert a2.existential == a.existential
        assert a2.accepting == a.accepting
        assert a2.initial_state == a.initial_state
        assert a2.initial_store == a.initial_store
        assert a2.input_alphabet == a.input_alphabet

    def test_parsed_game_solves(self):
        game = parse_game(GAME_TEXT)
        assert solve(game, Bounds()).winner == "W0"
