"""Shared helpers for the test suite: bounded store enumeration and a
seeded generator of small random game structures."""

from __future__ import annotations

import random

from pushdown_games.games import Bounds, GameStructure
from pushdown_games.stores import Pop, Push, Push1, SKIP, Store, make_store
from pushdown_games.systems import Config, Hpds, Rule


def enumerate_stores(level: int, max_size: int, alphabet=("a", "b")):
    """All stores of exactly `level` whose structural size (symbols plus
    nested sub-stores) is at most `max_size`.  Counting sub-stores keeps the
    family finite even though empty sub-stores carry no symbols."""
    if level == 1:
        def words(budget):
            yield ()
            if budget >= 1:
                for rest in words(budget - 1):
                    for sym in alphabet:
                        yield (sym,) + rest
        for items in words(max_size):
            yield make_store(1, items)
        return

    inners = list(enumerate_stores(level - 1, max_size - 1, alphabet))

    def seqs(budget):
        yield ()
        for inner in inners:
            cost = 1 + store_cost(inner)
            if cost <= budget:
                for rest in seqs(budget - cost):
                    yield (inner,) + rest

    for items in seqs(max_size):
        yield make_store(level, items)


def store_cost(store: Store) -> int:
    if store.level == 1:
        return len(store)
    return sum(1 + store_cost(item) for item in store.items_topdown())


def all_ops(level: int, alphabet=("a", "b")):
    ops = [SKIP]
    ops.extend(Push1(sym) for sym in alphabet)
    ops.extend(Pop(j) for j in range(1, level + 1))
    ops.extend(Push(j) for j in range(2, level + 1))
    return ops


def random_game(rng: random.Random, level: int = 1) -> tuple:
    """A small random game structure plus bounds keeping its arena finite."""
    n_states = rng.randint(2, 5)
    states = tuple(f"p{i}" for i in range(n_states))
    alphabet = ("a", "b")
    ops = all_ops(level, alphabet)
    guards = list(alphabet) + [f"_{j}" for j in range(1, level + 1)]
    rules = []
    for _ in range(rng.randint(2, 10)):
        rules.append(
            Rule(
                src=rng.choice(states),
                guard=rng.choice(guards),
                dst=rng.choice(states),
                op=rng.choice(ops),
            )
        )
    hpds = Hpds(level, states, alphabet, tuple(rules))
    owner = {s: rng.randint(0, 1) for s in states}
    goal = frozenset(s for s in states if rng.random() < 0.3)
    if level == 1:
        store = make_store(1, [rng.choice(alphabet) for _ in range(rng.randint(0, 2))])
    else:
        inner = make_store(1, [rng.choice(alphabet) for _ in range(rng.randint(0, 2))])
        store = make_store(2, [inner])
    game = GameStructure(hpds, owner, Config(states[0], store), goal)
    bounds = Bounds(max_len={1: 4, 2: 3, 3: 2}, max_configs=2000)
    return game, bounds


def gadget_bounds(store, slack=3, max_configs=500_000):
    """Bounds comfortably containing a gadget play on the given seed store:
    gadget games only pop within the word and clone bounded store parts."""
    from pushdown_games.stores import sequence_lengths

    lens = {lv: ln + slack for lv, ln in sequence_lengths(store).items()}
    lens[1] = max(lens.get(1, 0), 4)
    return Bounds(max_len=lens, max_configs=max_configs)


def solve_gadget(gadget, store, check_certificate=True):
    """Solve a gadget game on a seed store; returns the winner after
    asserting the verdict is definite and certified."""
    from pushdown_games.games import check_strategy, solve

    game = gadget.to_game(store)
    bounds = gadget_bounds(store)
    sol = solve(game, bounds)
    assert sol.winner in ("W0", "W1"), f"indefinite verdict on {store!r}"
    if check_certificate and sol.winner == "W0":
        assert check_strategy(game, sol.strategy0, bounds), f"bad certificate on {store!r}"
    return sol.winner


def assert_matches_oracle(kind, spec, stores, check_certificate=True):
    from pushdown_games.counters import oracle
    from pushdown_games.gadgets import build_test

    gadget = build_test(kind, spec)
    for store in stores:
        expected = "W0" if oracle(kind, spec, store) else "W1"
        got = solve_gadget(gadget, store, check_certificate)
        assert got == expected, (
            f"{kind} at {spec}: game says {got}, oracle says {expected} on {store!r}"
        )
