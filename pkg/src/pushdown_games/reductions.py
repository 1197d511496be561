"""The word problem for alternating HPDA as a reachability game.

Given an alternating one-way HPDA and an input word, the reduction encodes
the reading position in the control states: state (p, i) means the machine
is in p having consumed i letters.  Letter-labeled transitions advance the
position when the label matches the next input letter; epsilon transitions
keep it.  Existential states belong to player 0, universal ones to player
1, and the goal set is the accepting states at every position.

simulate_ahpda is the independent acceptance oracle: a direct least-fixpoint
evaluation of the computation-tree semantics over (state, store, position)
triples.  A node with an accepting state is an accepting leaf; an
existential node otherwise needs some child to accept, a universal node all
of them (so a stuck non-accepting node rejects regardless of polarity).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .games import Bounds, GameStructure, store_within
from .stores import UndefinedOperation, apply, top
from .systems import AHpda, Config, Hpds, Rule

ACCEPT = "Accept"
REJECT = "Reject"
UNKNOWN_VERDICT = "Unknown"


class AlphabetMismatchError(Exception):
    """The input word uses letters outside the automaton's input alphabet."""


def _game_state(state: str, position: int) -> str:
    return f"{state}@{position}"


def reduce_ahpda(ahpda: AHpda, word) -> GameStructure:
    """Build the game structure whose winner decides acceptance of `word`.
    State count is exactly |P| * (|word| + 1)."""
    word = list(word)
    letters = set(ahpda.input_alphabet)
    for a in word:
        if a not in letters:
            raise AlphabetMismatchError(f"letter {a!r} outside input alphabet")

    base = ahpda.hpds
    positions = range(len(word) + 1)
    states = tuple(_game_state(p, i) for p in base.states for i in positions)
    rules = []
    for rule in base.rules:
        if rule.label is None:
            for i in positions:
                rules.append(
                    Rule(_game_state(rule.src, i), rule.guard, _game_state(rule.dst, i), rule.op)
                )
        else:
            for i in range(len(word)):
                if word[i] == rule.label:
                    rules.append(
                        Rule(
                            _game_state(rule.src, i),
                            rule.guard,
                            _game_state(rule.dst, i + 1),
                            rule.op,
                        )
                    )
    hpds = Hpds(base.level, states, base.alphabet, tuple(rules))
    owner = {
        _game_state(p, i): 0 if p in ahpda.existential else 1
        for p in base.states
        for i in positions
    }
    goal = frozenset(_game_state(p, i) for p in ahpda.accepting for i in positions)
    initial = Config(_game_state(ahpda.initial_state, 0), ahpda.initial_store)
    return GameStructure(hpds, owner, initial, goal)


def _children(ahpda: AHpda, state: str, store, position: int, word):
    """Successor triples per the computation-tree semantics."""
    guard = top(store)
    out = []
    for rule in ahpda.hpds.rules_for(state, guard):
        if rule.label is not None and (position >= len(word) or word[position] != rule.label):
            continue
        try:
            next_store = apply(store, rule.op)
        except UndefinedOperation:
            continue
        next_pos = position + (0 if rule.label is None else 1)
        out.append((rule.dst, next_store, next_pos))
    return out


def simulate_ahpda(ahpda: AHpda, word, bounds: Bounds) -> str:
    """Acceptance verdict by memoized least-fixpoint search over (state,
    store, position) triples within bounds; Unknown when the verdict
    depends on out-of-bounds triples."""
    word = list(word)
    root = (ahpda.initial_state, ahpda.initial_store, 0)

    triples = []
    index = {}
    kids: list = []
    oob_flag: list = []
    queue = deque()

    def visit(triple):
        tid = index.get(triple)
        if tid is None:
            tid = len(triples)
            index[triple] = tid
            triples.append(triple)
            kids.append(None)
            oob_flag.append(not store_within(triple[1], bounds.max_len))
            queue.append(tid)
        return tid

    visit(root)
    truncated = False
    while queue:
        tid = queue.popleft()
        state, store, position = triples[tid]
        if oob_flag[tid] or state in ahpda.accepting:
            kids[tid] = []
            continue
        if len(triples) >= bounds.max_configs:
            truncated = True
            oob_flag[tid] = True
            kids[tid] = []
            continue
        kids[tid] = [visit(child) for child in _children(ahpda, state, store, position, word)]

    def fixpoint(optimistic: bool) -> list:
        accept = [False] * len(triples)
        for tid, (state, _, _) in enumerate(triples):
            if oob_flag[tid]:
                accept[tid] = optimistic
            elif state in ahpda.accepting:
                accept[tid] = True
        changed = True
        while changed:
            changed = False
            for tid, (state, _, _) in enumerate(triples):
                if accept[tid] or oob_flag[tid] or state in ahpda.accepting:
                    continue
                child_accepts = [accept[k] for k in kids[tid]]
                if state in ahpda.existential:
                    value = any(child_accepts)
                else:
                    value = bool(child_accepts) and all(child_accepts)
                if value:
                    accept[tid] = True
                    changed = True
        return accept

    pessimistic = fixpoint(optimistic=False)
    optimistic = fixpoint(optimistic=True)
    root_id = index[root]
    if pessimistic[root_id]:
        return ACCEPT
    if not optimistic[root_id]:
        return REJECT
    return UNKNOWN_VERDICT
