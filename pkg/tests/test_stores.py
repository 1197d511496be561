import pytest

from pushdown_games.stores import (
    LevelMismatchError,
    Pop,
    Push,
    Push1,
    SKIP,
    StoreSyntaxError,
    UndefinedOperation,
    apply,
    bottom,
    is_bottom,
    make_store,
    op_defined,
    parse_store,
    render_store,
    top,
    wrap_store,
)
from util import all_ops, enumerate_stores


def lv1(*symbols):
    return make_store(1, symbols)


class TestTop:
    def test_level1_rightmost(self):
        assert top(lv1("a", "b")) == "b"

    def test_level2_descends(self):
        s = make_store(2, [lv1("a"), lv1("b", "c")])
        assert top(s) == "c"

    def test_empty_level1_exposes_bottom(self):
        assert top(lv1()) == "_1"

    def test_empty_inner_store_exposes_level1_bottom(self):
        s = make_store(2, [lv1("a"), lv1()])
        assert top(s) == "_1"

    def test_empty_level2_exposes_level2_bottom(self):
        assert top(make_store(2)) == "_2"

    def test_empty_middle_level_inside_level3(self):
        s = make_store(3, [make_store(2)])
        assert top(s) == "_2"


class TestApply:
    def test_push1_appends_right(self):
        assert apply(lv1("a"), Push1("b")) == lv1("a", "b")

    def test_push2_duplicates_topmost(self):
        s = make_store(2, [lv1("a", "b")])
        assert apply(s, Push(2)) == make_store(2, [lv1("a", "b"), lv1("a", "b")])

    def test_pop1_on_empty_is_undefined(self):
        with pytest.raises(UndefinedOperation):
            apply(lv1(), Pop(1))

    def test_pop2_removes_topmost(self):
        s = make_store(2, [lv1("a"), lv1("b")])
        assert apply(s, Pop(2)) == make_store(2, [lv1("a")])

    def test_push1_rejects_bottom_symbols(self):
        with pytest.raises(UndefinedOperation):
            apply(lv1("a"), Push1("_1"))

    def test_skip_is_identity(self):
        s = make_store(2, [lv1("a")])
        assert apply(s, SKIP) is s

    def test_push_out_of_range(self):
        with pytest.raises(UndefinedOperation):
            apply(lv1("a"), Push(2))

    def test_push1_on_empty_level2_is_undefined(self):
        with pytest.raises(UndefinedOperation):
            apply(make_store(2), Push1("a"))

    def test_no_mutation(self):
        s = make_store(2, [lv1("a")])
        apply(s, Push1("b"))
        apply(s, Push(2))
        assert s == make_store(2, [lv1("a")])


class TestAlgebraExhaustive:
    """Push/pop inverses, top/push interplay, and parse/render round trips
    over every store of level <= 3 with structural size <= 4 (the acceptance
    suite re-runs this at size 6)."""

    def all_stores(self, max_size=4):
        for level in (1, 2, 3):
            yield from enumerate_stores(level, max_size)

    def test_push_then_pop_is_identity(self):
        for s in self.all_stores():
            for op in all_ops(s.level):
                if isinstance(op, Push) and op_defined(s, op):
                    assert apply(apply(s, op), Pop(op.level)) == s
                if isinstance(op, Push1) and op_defined(s, op):
                    assert apply(apply(s, op), Pop(1)) == s

    def test_top_after_push1(self):
        for s in self.all_stores():
            for sym in ("a", "b"):
                if op_defined(s, Push1(sym)):
                    assert top(apply(s, Push1(sym))) == sym

    def test_parse_render_round_trip(self):
        for s in self.all_stores():
            assert parse_store(render_store(s), s.level) == s

    def test_apply_preserves_levels(self):
        def well_formed(s):
            if s.level == 1:
                return all(isinstance(x, str) for x in s.items_topdown())
            return all(x.level == s.level - 1 and well_formed(x) for x in s.items_topdown())

        for s in self.all_stores(3):
            for op in all_ops(s.level):
                if op_defined(s, op):
                    t = apply(s, op)
                    assert t.level == s.level and well_formed(t)


class TestParse:
    def test_level1(self):
        assert parse_store("a b", 1) == lv1("a", "b")

    def test_level2(self):
        assert parse_store("[a][b c]", 2) == make_store(2, [lv1("a"), lv1("b", "c")])

    def test_depth_mismatch(self):
        with pytest.raises(LevelMismatchError):
            parse_store("[a]", 1)

    def test_bare_symbol_at_level2(self):
        with pytest.raises(LevelMismatchError):
            parse_store("a b", 2)

    def test_unbalanced(self):
        with pytest.raises(StoreSyntaxError):
            parse_store("[a", 2)
        with pytest.raises(StoreSyntaxError):
            parse_store("a]", 1)

    def test_bottom_rejected_inside_literal(self):
        with pytest.raises(StoreSyntaxError):
            parse_store("a _1", 1)

    def test_empty_literals(self):
        assert parse_store("", 1) == make_store(1)
        assert parse_store("", 3) == make_store(3)
        assert parse_store("[][a]", 2) == make_store(2, [lv1(), lv1("a")])


class TestRender:
    def test_level1(self):
        assert render_store(lv1("a", "b")) == "a b"

    def test_level2_with_empty(self):
        assert render_store(make_store(2, [lv1(), lv1("a")])) == "[][a]"

    def test_empty_level3(self):
        assert render_store(make_store(3)) == ""


class TestMisc:
    def test_bottom_helpers(self):
        assert bottom(2) == "_2"
        assert is_bottom("_13")
        assert not is_bottom("a1")

    def test_wrap_store(self):
        s = wrap_store(lv1("a"), 2)
        assert s.level == 3
        assert top(s) == "a"

    def test_structural_equality_and_hash(self):
        a = make_store(2, [lv1("a", "b")])
        b = apply(apply(make_store(2, [lv1("a")]), Push1("b")), SKIP)
        assert a == b and hash(a) == hash(b)
