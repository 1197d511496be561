"""Level-1 test games checked exhaustively against the oracle."""

import itertools

import pytest

from pushdown_games.counters import (
    COUNTER,
    CounterSpec,
    EQUAL,
    FIRST,
    LAST,
    SUCC,
    corrupt_innermost,
    seed_store,
)
from pushdown_games.gadgets import build_test
from pushdown_games.stores import make_store
from util import assert_matches_oracle, solve_gadget


def all_words(alphabet, max_len):
    for length in range(max_len + 1):
        for word in itertools.product(alphabet, repeat=length):
            yield make_store(1, word)


class TestCounter1:
    def test_exhaustive_small_words(self):
        # every store of length <= n+4 over the two relevant alphabets
        spec = CounterSpec(1, 2)
        stores = list(all_words(("a1", "b1", "a2", "b2"), spec.n + 4))
        assert len(stores) == 5461
        assert_matches_oracle(COUNTER, spec, stores, check_certificate=False)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_valid_and_corrupted_seeds(self, n):
        spec = CounterSpec(1, n)
        stores = []
        for value in range(spec.max_value() + 1):
            seed = seed_store(COUNTER, spec, value)
            stores.append(seed)
            for idx in range(n + 2):
                stores.append(corrupt_innermost(seed, idx))
        assert_matches_oracle(COUNTER, spec, stores)


class TestFirstLast1:
    @pytest.mark.parametrize("kind", [FIRST, LAST])
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_all_values_and_corruptions(self, kind, n):
        spec = CounterSpec(1, n)
        stores = []
        for value in range(spec.max_value() + 1):
            seed = seed_store(kind, spec, value)
            stores.append(seed)
            for idx in range(n + 2):
                stores.append(corrupt_innermost(seed, idx))
        assert_matches_oracle(kind, spec, stores)


class TestEqualSucc1:
    @pytest.mark.parametrize("kind", [EQUAL, SUCC])
    @pytest.mark.parametrize("n", [1, 2])
    def test_all_value_pairs(self, kind, n):
        spec = CounterSpec(1, n)
        stores = [
            seed_store(kind, spec, (v, w))
            for v in range(spec.max_value() + 1)
            for w in range(spec.max_value() + 1)
        ]
        assert_matches_oracle(kind, spec, stores)

    def test_corrupted_pairs(self):
        spec = CounterSpec(1, 2)
        stores = []
        for kind in (EQUAL, SUCC):
            for v in range(4):
                seed = seed_store(kind, spec, (v, v))
                for idx in range(2 * spec.n + 3):
                    stores.append(corrupt_innermost(seed, idx))
            assert_matches_oracle(kind, spec, stores)

    def test_succ_wraparound_is_lost_by_player0(self):
        # deeper 0, top max: the mod-2^n increment matches but the true
        # successor does not exist
        spec = CounterSpec(1, 2)
        gadget = build_test(SUCC, spec)
        assert solve_gadget(gadget, seed_store(SUCC, spec, (0, 3))) == "W1"
        assert solve_gadget(gadget, seed_store(SUCC, spec, (3, 2))) == "W0"


class TestGadgetShape:
    def test_level1_state_count_linear(self):
        for n in (1, 2, 3, 4):
            g = build_test(COUNTER, CounterSpec(1, n))
            assert len(g.hpds.states) <= 4 * n + 10

    def test_gadget_validates(self):
        from pushdown_games.systems import validate

        for kind in (COUNTER, FIRST, LAST, EQUAL, SUCC):
            g = build_test(kind, CounterSpec(1, 2))
            assert validate(g.hpds) == []
