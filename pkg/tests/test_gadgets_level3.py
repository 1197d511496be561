"""Level-3 test games at n = 1: the counter words interleave 2-counters as
position indices, and the value comparisons recurse through two copy
levels (push_2 then push_3)."""

import pytest

from pushdown_games.counters import (
    COUNTER,
    CounterSpec,
    EQUAL,
    FIRST,
    LAST,
    SUCC,
    corrupt_innermost,
    same,
    seed_store,
)
from util import assert_matches_oracle

SPEC = CounterSpec(3, 1)  # 4-bit values 0..15, 20-letter words


class TestCounter3:
    def test_all_valid_values(self):
        stores = [seed_store(COUNTER, SPEC, v) for v in range(16)]
        assert_matches_oracle(COUNTER, SPEC, stores)

    def test_all_corruptions_of_two_values(self):
        stores = []
        for value in (0, 9):
            seed = seed_store(COUNTER, SPEC, value)
            for idx in range(SPEC.word_length() + 2):
                stores.append(corrupt_innermost(seed, idx))
        assert_matches_oracle(COUNTER, SPEC, stores)

    @pytest.mark.parametrize("kind,value,expected_oracle", [
        (FIRST, 0, True),
        (FIRST, 1, False),
        (LAST, 15, True),
        (LAST, 14, False),
    ])
    def test_first_last_smoke(self, kind, value, expected_oracle):
        from pushdown_games.counters import oracle

        store = seed_store(kind, SPEC, value)
        assert oracle(kind, SPEC, store) == expected_oracle
        assert_matches_oracle(kind, SPEC, [store])


class TestEqualSucc3:
    def test_equal_diagonal_and_near_misses(self):
        pairs = [(v, v) for v in range(16)] + [(0, 1), (1, 0), (7, 8), (15, 0), (5, 13)]
        stores = [seed_store(EQUAL, SPEC, p) for p in pairs]
        assert_matches_oracle(EQUAL, SPEC, stores)

    def test_succ_pairs(self):
        pairs = [(v + 1, v) for v in range(15)] + [(0, 15), (0, 0), (5, 5), (7, 5), (15, 14)]
        stores = [seed_store(SUCC, SPEC, p) for p in pairs]
        assert_matches_oracle(SUCC, SPEC, stores)

    def test_equal_corruptions(self):
        seed = seed_store(EQUAL, SPEC, (9, 9))
        stores = [corrupt_innermost(seed, idx) for idx in range(2 * SPEC.word_length() + 3)]
        assert_matches_oracle(EQUAL, SPEC, stores)


class TestSameLevel3:
    def test_same1_at_level3(self):
        kind = same(1)
        stores = []
        for v in range(2):
            for w in range(2):
                stores.append(seed_store(kind, SPEC, (v, w, True)))
        stores.append(seed_store(kind, SPEC, (1, 1, False)))
        assert_matches_oracle(kind, SPEC, stores)

    def test_same2_at_level3(self):
        kind = same(2)
        stores = []
        for v in (0, 1, 2, 3):
            for w in (0, 1, 2, 3):
                stores.append(seed_store(kind, SPEC, (v, w, True)))
        stores.append(seed_store(kind, SPEC, (2, 2, False)))
        assert_matches_oracle(kind, SPEC, stores)

    def test_same2_corruptions(self):
        kind = same(2)
        seed = seed_store(kind, SPEC, (3, 3, True))
        word_len = CounterSpec(2, 1).word_length() + 2
        stores = [corrupt_innermost(seed, idx) for idx in range(word_len)]
        assert_matches_oracle(kind, SPEC, stores)
