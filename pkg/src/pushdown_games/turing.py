"""Alternating space-bounded Turing machines, their encoding as reachability
games on higher-order stores, and the exact acceptance oracle.

A machine configuration is a word of exactly 2^n letters over the cell
alphabet {a, b, endmarkers, control states}, with exactly one state letter.
Steps rewrite a three-letter window around the state letter.  On the store,
a configuration becomes a separator-framed word interleaving each cell with
the position counter of its index, position 0 topmost, exactly like the
counter encodings one level down.

The encoding game writes a computation bottom-up.  Player 0 drives the run:
he picks the claimed transition window (the owner of the written state
letter picks the applied rule) and freely writes the interior cell letters
of each next configuration; the index plumbing, the endmarkers, the
separators, and the initial configuration are forced pushes.  After every
configuration player 1 either passes or fires one check:

  * configuration form: the counter-structure machinery with the cell
    alphabet in place of the top-layer bits,
  * the state-letter count over the topmost configuration,
  * legality of the written window against the rule set,
  * a cell near the new configuration's state letter against the written
    window or the previous configuration,
  * the written window's old half against the previous configuration,
  * a frame cell (far from the state letter) against the same-index cell
    of the previous configuration: the store is copied with push_2,
    player 0 aligns the copy across exactly two separators, and finite
    probes compare the anchored cells and their position counters.

When player 0 claims acceptance, player 1 may concede or challenge; the
challenge makes player 0 expose an accepting state letter inside the
topmost configuration.  A step budget bounds how long player 0 may keep
writing; verdicts equal the machine's whenever the budget covers its
acceptance depth, which the default budget does.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .counters import CounterSpec, ambient_alphabet, encode_counter, sigma
from .games import GameStructure
from .gadgets import P0WIN, P1WIN, _Builder, _check_counter, _index_probes
from .stores import Pop, Push, Push1, SKIP, make_store, wrap_store
from .systems import Config

LEFT_MARK = "<"
RIGHT_MARK = ">"
WORK_LETTERS = ("a", "b")
BLANK = "a"

# documented bound: encode_atm generates at most C_STATE * (n^2 + |rules| + |Q|)
# control states at level 2 (measured over the test suite, with the default
# step budget)
C_STATE = 400

ACCEPT = "Accept"
REJECT = "Reject"


class MalformedConfigurationError(Exception):
    pass


class UnsupportedLevelError(Exception):
    pass


class ResourceExceededError(Exception):
    pass


@dataclass(frozen=True)
class WindowRule:
    """One machine step: rewrite a three-letter window containing the state
    letter.  Endmarkers are never created, destroyed, or moved."""

    before: tuple
    after: tuple

    def __post_init__(self):
        object.__setattr__(self, "before", tuple(self.before))
        object.__setattr__(self, "after", tuple(self.after))


@dataclass(eq=False)
class Atm:
    """An alternating Turing machine with tape length 2^space_exponent."""

    states: tuple
    existential: frozenset
    accepting: frozenset
    initial_state: str
    space_exponent: int
    rules: tuple

    def __post_init__(self):
        self.states = tuple(self.states)
        self.existential = frozenset(self.existential)
        self.accepting = frozenset(self.accepting)
        self.rules = tuple(self.rules)

    @property
    def universal(self) -> frozenset:
        return frozenset(self.states) - self.existential

    def cells(self) -> int:
        return 2**self.space_exponent


def _window_problem(atm: Atm, window) -> Optional[str]:
    states = set(atm.states)
    q_count = sum(1 for x in window if x in states)
    if q_count != 1:
        return f"window {window} must contain exactly one state letter"
    for x in window:
        if x not in states and x not in WORK_LETTERS and x not in (LEFT_MARK, RIGHT_MARK):
            return f"unknown letter {x!r} in window"
    return None


def validate_atm(atm: Atm) -> list:
    out = []
    if atm.space_exponent < 1:
        out.append("space exponent must be >= 1")
    for name in atm.states:
        if name in WORK_LETTERS or name in (LEFT_MARK, RIGHT_MARK):
            out.append(f"state name {name!r} collides with a tape letter")
        if len(name) >= 2 and name[0] in "ab" and name[1:].isdigit():
            out.append(f"state name {name!r} collides with a counter letter")
    if atm.initial_state not in atm.states:
        out.append(f"initial state {atm.initial_state!r} not declared")
    for rule in atm.rules:
        if len(rule.before) != 3 or len(rule.after) != 3:
            out.append(f"{rule} windows must have three letters")
            continue
        for window in (rule.before, rule.after):
            problem = _window_problem(atm, window)
            if problem:
                out.append(problem)
        for pos in range(3):
            b_mark = rule.before[pos] in (LEFT_MARK, RIGHT_MARK)
            a_mark = rule.after[pos] in (LEFT_MARK, RIGHT_MARK)
            if b_mark != a_mark or (b_mark and rule.before[pos] != rule.after[pos]):
                out.append(f"{rule} moves an endmarker")
    return out


def initial_tape(atm: Atm, input_word) -> tuple:
    """<, the initial state, the input, blank padding, > (a 2-cell tape is
    just < q: no room for the right endmarker)."""
    cells = atm.cells()
    input_word = tuple(input_word)
    capacity = max(0, cells - 3)
    if len(input_word) > capacity:
        raise MalformedConfigurationError(
            f"input of length {len(input_word)} does not fit {cells} cells"
        )
    for letter in input_word:
        if letter not in WORK_LETTERS:
            raise MalformedConfigurationError(f"input letter {letter!r} outside work alphabet")
    if cells == 2:
        return (LEFT_MARK, atm.initial_state)
    pad = (BLANK,) * (capacity - len(input_word))
    return (LEFT_MARK, atm.initial_state) + input_word + pad + (RIGHT_MARK,)


def check_tape(atm: Atm, tape) -> Optional[str]:
    tape = tuple(tape)
    states = set(atm.states)
    if len(tape) != atm.cells():
        return f"configuration must have {atm.cells()} cells"
    if tape[0] != LEFT_MARK:
        return "cell 0 must be the left endmarker"
    if len(tape) > 2 and tape[-1] != RIGHT_MARK:
        return "the last cell must be the right endmarker"
    q_positions = [i for i, x in enumerate(tape) if x in states]
    if len(q_positions) != 1:
        return "configuration must contain exactly one state letter"
    interior = tape[1:-1] if len(tape) > 2 else tape[1:]
    for offset, x in enumerate(interior, start=1):
        if x not in states and x not in WORK_LETTERS:
            return f"cell {offset} holds {x!r}"
    return None


def tape_state(atm: Atm, tape) -> str:
    states = set(atm.states)
    for x in tape:
        if x in states:
            return x
    raise MalformedConfigurationError("no state letter")


def tm_successors(atm: Atm, tape) -> list:
    """Configurations reachable in one step, in rule declaration order."""
    tape = tuple(tape)
    states = set(atm.states)
    head = next(i for i, x in enumerate(tape) if x in states)
    out = []
    for rule in atm.rules:
        qpos = next(i for i, x in enumerate(rule.before) if x in states)
        start = head - qpos
        if start < 0 or start + 3 > len(tape):
            continue
        if tuple(tape[start:start + 3]) != rule.before:
            continue
        succ = tape[:start] + rule.after + tape[start + 3:]
        if succ not in out:
            out.append(succ)
    return out


def acceptance_depth(atm: Atm, input_word, max_configs: int = 200_000):
    """(verdict, depth): the alternating acceptance depth is the number of
    steps player 0 needs against worst-case universal choices, or None when
    the machine rejects."""
    root = initial_tape(atm, input_word)
    order = [root]
    index = {root: 0}
    succs = []
    pos = 0
    while pos < len(order):
        tape = order[pos]
        pos += 1
        if tape_state(atm, tape) in atm.accepting:
            succs.append([])
            continue
        row = []
        for nxt in tm_successors(atm, tape):
            tid = index.get(nxt)
            if tid is None:
                if len(order) >= max_configs:
                    raise ResourceExceededError(f"more than {max_configs} configurations")
                tid = len(order)
                index[nxt] = tid
                order.append(nxt)
            row.append(tid)
        succs.append(row)

    INF = float("inf")
    depth = [INF] * len(order)
    for tid, tape in enumerate(order):
        if tape_state(atm, tape) in atm.accepting:
            depth[tid] = 0
    changed = True
    while changed:
        changed = False
        for tid, tape in enumerate(order):
            if depth[tid] == 0:
                continue
            children = succs[tid]
            state = tape_state(atm, tape)
            if state in atm.existential:
                value = 1 + min((depth[k] for k in children), default=INF)
            elif children:
                value = 1 + max(depth[k] for k in children)
            else:
                value = INF
            if value < depth[tid]:
                depth[tid] = value
                changed = True
    if depth[0] == INF:
        return REJECT, None
    return ACCEPT, int(depth[0])


def simulate_atm(atm: Atm, input_word, max_configs: int = 200_000) -> str:
    """Exact acceptance by backward fixpoint over the reachable part of the
    finite configuration graph: accepting-state configurations are the
    base, existential configurations need one accepting successor,
    universal ones all of them (a stuck non-accepting one rejects)."""
    verdict, _ = acceptance_depth(atm, input_word, max_configs)
    return verdict


# ---------------------------------------------------------------------------
# store encoding
# ---------------------------------------------------------------------------


def cell_letter(letter: str, level: int) -> str:
    """Tape work letters map to the counter letters one level above the
    position indices; markers and state names are store symbols as-is."""
    if letter in WORK_LETTERS:
        al = sigma(level)
        return al.zero if letter == "a" else al.one
    return letter


def cell_unletter(symbol: str, level: int) -> str:
    al = sigma(level)
    if symbol == al.zero:
        return "a"
    if symbol == al.one:
        return "b"
    return symbol


def delta_alphabet(atm: Atm, level: int) -> list:
    al = sigma(level)
    return [al.zero, al.one] + list(atm.states) + [LEFT_MARK, RIGHT_MARK]


def encode_config(atm: Atm, tape, level: int = 2) -> list:
    """The separator-framed interleaved word, bottom-to-top: cell 0 and its
    position counter end up topmost."""
    problem = check_tape(atm, tape)
    if problem:
        raise MalformedConfigurationError(problem)
    idx_spec = CounterSpec(level - 1, atm.space_exponent)
    xi = sigma(level + 1).zero
    word = [xi]
    for i in range(atm.cells() - 1, -1, -1):
        word.append(cell_letter(tape[i], level))
        word.extend(encode_counter(idx_spec, i))
    word.append(xi)
    return word


def decode_config(atm: Atm, word, level: int = 2) -> tuple:
    """Inverse of encode_config (round-trip helper)."""
    from .counters import decode_counter

    idx_spec = CounterSpec(level - 1, atm.space_exponent)
    idx_len = idx_spec.word_length()
    word = list(word)
    xi_al = sigma(level + 1)
    if len(word) < 2 or not xi_al.contains(word[0]) or not xi_al.contains(word[-1]):
        raise MalformedConfigurationError("missing separators")
    body = word[1:-1]
    cells = atm.cells()
    if len(body) != cells * (idx_len + 1):
        raise MalformedConfigurationError("wrong encoded length")
    tape = []
    pos = len(body)
    for i in range(cells):
        idx = decode_counter(body[pos - idx_len:pos], idx_spec)
        if idx != i:
            raise MalformedConfigurationError(f"cell {i} carries index {idx}")
        pos -= idx_len
        tape.append(cell_unletter(body[pos - 1], level))
        pos -= 1
    return tuple(tape)


# ---------------------------------------------------------------------------
# the encoding game
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class _Enc:
    atm: Atm
    level: int
    n: int
    b: _Builder
    delta: list        # cell letters as store symbols
    q_letters: list
    acc_letters: list
    idx_letters: list  # everything inside the position counters
    xi_set: list       # both separator letters are accepted by the checks
    idx_words: list    # per cell i: encode_counter(level-1 spec, i)

    def material(self) -> list:
        return self.idx_letters + self.delta


def _claim_q_count(enc: _Enc) -> str:
    """Player 1 claims the topmost configuration region does not hold
    exactly one state letter."""
    b = enc.b
    material = enc.material()
    non_q = [g for g in material if g not in enc.q_letters]
    states = [b.fresh(f"qcount.{k}") for k in (0, 1, 2)]
    entry = b.fresh("qcount.entry")
    b.rules_on(entry, enc.xi_set, states[0], Pop(1))
    b.rules_on(entry, b.complement(enc.xi_set), P1WIN, SKIP)
    for count, state in enumerate(states):
        b.rules_on(state, non_q, state, Pop(1))
        if count < 2:
            b.rules_on(state, enc.q_letters, states[count + 1], Pop(1))
        else:
            b.rules_on(state, enc.q_letters, state, Pop(1))
        b.rules_on(state, enc.xi_set, P0WIN if count == 1 else P1WIN, SKIP)
        b.rules_on(state, b.complement(material, enc.xi_set), P1WIN, SKIP)
    return entry


def _claim_form(enc: _Enc) -> str:
    """Counter-structure check on the topmost configuration, with the cell
    alphabet as the top-layer bits."""
    return _check_counter(
        enc.b, enc.level, enc.n, "any",
        f_below=enc.xi_set, f_top=enc.xi_set, bits_override=enc.delta,
    )


def _claim_legal(enc: _Enc) -> str:
    """Walk down to the window block below the topmost configuration and
    test the six written letters against the rule set (a trie over the
    legal window words; player 1 wins iff the word is not one of them)."""
    b = enc.b
    material = enc.material()
    words = set()
    for rule in enc.atm.rules:
        before = tuple(cell_letter(x, enc.level) for x in rule.before)
        after = tuple(cell_letter(x, enc.level) for x in rule.after)
        words.add(tuple(reversed(after)) + tuple(reversed(before)))

    memo = {}

    def node(suffixes) -> str:
        key = frozenset(suffixes)
        if key in memo:
            return memo[key]
        if not key:
            memo[key] = P1WIN
            return P1WIN
        if () in key:
            memo[key] = P0WIN  # a full window word matched
            return P0WIN
        state = b.fresh("legal.trie")
        memo[key] = state
        heads = {}
        for word in key:
            heads.setdefault(word[0], set()).add(word[1:])
        for letter in sorted(heads):
            target = node(frozenset(heads[letter]))
            op = SKIP if target in (P0WIN, P1WIN) else Pop(1)
            b.rule(state, letter, target, op)
        b.rules_on(state, b.complement(sorted(heads)), P1WIN, SKIP)
        return state

    trie_entry = node(frozenset(words))
    walk = b.fresh("legal.walk")
    b.rules_on(walk, material, walk, Pop(1))
    op = SKIP if trie_entry in (P0WIN, P1WIN) else Pop(1)
    b.rules_on(walk, enc.xi_set, trie_entry, op)
    b.rules_on(walk, b.complement(material, enc.xi_set), P1WIN, SKIP)
    entry = b.fresh("legal.entry")
    b.rules_on(entry, enc.xi_set, walk, Pop(1))
    b.rules_on(entry, b.complement(enc.xi_set), P1WIN, SKIP)
    return entry


def _qrel_read(enc: _Enc, cache: dict, delta_off: int, x: str) -> str:
    """Entry of a walk over the configuration region below (the caller just
    popped its opening separator) that compares the cell at (state-letter
    position + delta_off) with the letter x: p0win when equal or when no
    such cell exists, p1win when different."""
    key = (delta_off, x)
    if key in cache:
        return cache[key]
    b = enc.b
    material = enc.material()
    non_q = [g for g in enc.delta if g not in enc.q_letters]
    label = f"qrel.{delta_off}.{x}"

    if delta_off >= 0:
        seek = b.fresh(f"{label}.seek")
        b.rules_on(seek, enc.idx_letters, seek, Pop(1))
        b.rules_on(seek, non_q, seek, Pop(1))
        if delta_off == 0:
            for q in enc.q_letters:
                b.rule(seek, q, P0WIN if q == x else P1WIN, SKIP)
        else:
            cur = b.fresh(f"{label}.0")
            b.rules_on(seek, enc.q_letters, cur, Pop(1))
            for k in range(1, delta_off + 1):
                nxt = b.fresh(f"{label}.{k}")
                b.rules_on(cur, enc.idx_letters, cur, Pop(1))
                for cell in enc.delta:
                    if k < delta_off:
                        b.rule(cur, cell, nxt, Pop(1))
                    else:
                        b.rule(cur, cell, P0WIN if cell == x else P1WIN, SKIP)
                b.rules_on(cur, b.complement(enc.idx_letters, enc.delta), P0WIN, SKIP)
                cur = nxt
        b.rules_on(seek, enc.xi_set, P0WIN, SKIP)
        b.rules_on(seek, b.complement(material, enc.xi_set), P0WIN, SKIP)
        cache[key] = seek
        return seek

    # target above the state letter: shift register of ==x booleans
    depth = -delta_off
    combos = {}

    def walk_state(bits) -> str:
        if bits in combos:
            return combos[bits]
        state = b.fresh(f"{label}.w" + "".join("1" if v else "0" for v in bits))
        combos[bits] = state
        b.rules_on(state, enc.idx_letters, state, Pop(1))
        for cell in enc.delta:
            if cell in enc.q_letters:
                b.rule(state, cell, P0WIN if bits[-1] else P1WIN, SKIP)
            else:
                new_bits = ((cell == x),) + bits[:-1]
                b.rule(state, cell, walk_state(new_bits), Pop(1))
        b.rules_on(state, enc.xi_set, P0WIN, SKIP)
        b.rules_on(state, b.complement(material, enc.xi_set), P0WIN, SKIP)
        return state

    entry = walk_state((False,) * depth)
    cache[key] = entry
    return entry


def _after_reader(enc: _Enc, delta_off: int, x: str, finish_out) -> str:
    """Pop the six window letters (the after half reversed, then the before
    half reversed).  The claimed cell sits at offset delta_off from the new
    configuration's state letter; once the after half resolves its state
    position q_a, the window offset o = delta_off + q_a is known.  Inside
    the window the verdict is whether after[o] equalled x; outside, reading
    continues for the old half's state position and `finish_out(q_b, q_a)`
    takes over.  Malformed halves resolve to p0win (the legality claim owns
    them)."""
    b = enc.b
    memo = {}

    def build(depth, q_a, q_b, bits) -> str:
        # bits maps already-read after positions to (letter == x)
        if depth == 3 and q_a is None:
            return P0WIN
        if depth == 6:
            if q_b is None:
                return P0WIN
            return finish_out(q_b, q_a)
        key = (depth, q_a, q_b, tuple(sorted(bits.items())))
        if key in memo:
            return memo[key]
        state = b.fresh(f"wread.{delta_off}.{x}.{depth}")
        memo[key] = state
        for letter in enc.delta:
            is_q = letter in enc.q_letters
            q_a2, q_b2 = q_a, q_b
            bits2 = bits
            if depth < 3:
                pos = 2 - depth  # after[pos]
                if is_q:
                    if q_a is not None:
                        b.rule(state, letter, P0WIN, SKIP)
                        continue
                    q_a2 = pos
                bits2 = dict(bits)
                bits2[pos] = letter == x
                if q_a2 is not None:
                    o = delta_off + q_a2
                    if 0 <= o <= 2:
                        if o in bits2:
                            b.rule(state, letter, P0WIN if bits2[o] else P1WIN, SKIP)
                            continue
                        # o not read yet: wait for it, drop the other bits
                        target = _await_pos(enc, delta_off, x, depth + 1, o)
                        b.rule(state, letter, target, Pop(1))
                        continue
                    bits2 = {}
            else:
                pos = 5 - depth  # before[pos]
                if is_q:
                    if q_b is not None:
                        b.rule(state, letter, P0WIN, SKIP)
                        continue
                    q_b2 = pos
            target = build(depth + 1, q_a2, q_b2, bits2)
            op = SKIP if target in (P0WIN, P1WIN) else Pop(1)
            b.rule(state, letter, target, op)
        b.rules_on(state, b.complement(enc.delta), P0WIN, SKIP)
        return state

    await_memo = {}

    def _await_pos(enc_, delta_off_, x_, depth, o) -> str:
        key = (depth, o)
        if key in await_memo:
            return await_memo[key]
        state = b.fresh(f"wread.{delta_off}.{x}.await{depth}")
        await_memo[key] = state
        pos = 2 - depth
        for letter in enc.delta:
            if letter in enc.q_letters:
                b.rule(state, letter, P0WIN, SKIP)  # second state letter
                continue
            if pos == o:
                b.rule(state, letter, P0WIN if letter == x else P1WIN, SKIP)
            else:
                b.rule(state, letter, _await_pos(enc_, delta_off_, x_, depth + 1, o), Pop(1))
        b.rules_on(state, b.complement(enc.delta), P0WIN, SKIP)
        return state

    return build(0, None, None, {})


def _claim_window_new(enc: _Enc, qrel_cache: dict) -> str:
    """Player 1 anchors a cell of the topmost configuration at a declared
    offset from its state letter and claims it disagrees with the written
    window (offset inside it) or with the previous configuration."""
    b = enc.b
    material = enc.material()
    non_q = [g for g in enc.delta if g not in enc.q_letters]

    dig = {}
    for since in ("none", 0, 1, "far"):
        dig[since] = b.fresh(f"wnew.dig.{since}")
    for since, state in dig.items():
        nxt = {"none": "none", 0: 1, 1: "far", "far": "far"}[since]
        b.rules_on(state, enc.idx_letters, state, Pop(1))
        b.rules_on(state, non_q, dig[nxt], Pop(1))
        b.rules_on(state, enc.q_letters, dig[0], Pop(1))

    entry = b.fresh("wnew.entry")
    b.rules_on(entry, enc.xi_set, dig["none"], Pop(1))
    b.rules_on(entry, b.complement(enc.xi_set), P1WIN, SKIP)

    for delta_off in (-2, -1, 0, 1, 2):
        for x in enc.delta:
            if (delta_off == 0) != (x in enc.q_letters):
                continue  # offset 0 is the state letter itself
            post = _wnew_verify(enc, qrel_cache, delta_off, x)
            if delta_off <= 0:
                b.rule(dig["none"], x, post, SKIP)
            else:
                b.rule(dig[delta_off - 1], x, post, SKIP)
    return entry


def _wnew_verify(enc: _Enc, qrel_cache: dict, delta_off: int, x: str) -> str:
    """Verify a wnew anchor: confirm the distance to the state letter when
    the anchor sits above it, walk to the region's end, read the window,
    and resolve against the after half or the previous configuration."""
    b = enc.b
    material = enc.material()

    def finish_out(q_b, q_a):
        dprime = delta_off + q_a - q_b
        walk = _qrel_read(enc, qrel_cache, dprime, x)
        xi_pop = b.fresh(f"wnew.xipop.{delta_off}.{x}.{dprime}")
        b.rules_on(xi_pop, enc.xi_set, walk, Pop(1))
        b.rules_on(xi_pop, b.complement(enc.xi_set), P0WIN, SKIP)
        return xi_pop

    reader = _after_reader(enc, delta_off, x, finish_out)

    to_block = b.fresh(f"wnew.toend.{delta_off}.{x}")
    b.rules_on(to_block, material, to_block, Pop(1))
    b.rules_on(to_block, enc.xi_set, reader, Pop(1))
    b.rules_on(to_block, b.complement(material, enc.xi_set), P0WIN, SKIP)

    if delta_off >= 0:
        start = b.fresh(f"wnew.pop.{delta_off}.{x}")
        b.rules_on(start, b.full_guards, to_block, Pop(1))
        return start

    # the anchor sits above the state letter: after popping it, exactly
    # |delta_off| cells down the state letter must appear
    start = b.fresh(f"wnew.pop.{delta_off}.{x}")
    cur = b.fresh(f"wnew.chk.{delta_off}.{x}.0")
    b.rules_on(start, b.full_guards, cur, Pop(1))
    for k in range(1, -delta_off + 1):
        nxt = b.fresh(f"wnew.chk.{delta_off}.{x}.{k}")
        b.rules_on(cur, enc.idx_letters, cur, Pop(1))
        for cell in enc.delta:
            is_q = cell in enc.q_letters
            if k < -delta_off:
                target = P0WIN if is_q else nxt
                b.rule(cur, cell, target, SKIP if is_q else Pop(1))
            else:
                target = to_block if is_q else P0WIN
                b.rule(cur, cell, target, SKIP)
        b.rules_on(cur, b.complement(enc.idx_letters, enc.delta), P0WIN, SKIP)
        cur = nxt
    return start


def _claim_window_old(enc: _Enc, qrel_cache: dict) -> str:
    """Player 1 claims one letter of the written window's old half does not
    match the previous configuration around its state letter."""
    b = enc.b
    material = enc.material()
    top = b.fresh("wold.pick")
    for o in (0, 1, 2):
        # capture before[o] while reading: encode it into the reader by
        # branching on the letter at that position
        def finish(q_b, x, o=o):
            if x is None:
                return P0WIN
            dprime = o - q_b
            walk = _qrel_read(enc, qrel_cache, dprime, x)
            xi_pop = b.fresh(f"wold.xipop.{o}.{x}.{dprime}")
            b.rules_on(xi_pop, enc.xi_set, walk, Pop(1))
            b.rules_on(xi_pop, b.complement(enc.xi_set), P0WIN, SKIP)
            return xi_pop

        reader = _before_capture_reader(enc, o, finish)
        walk = b.fresh(f"wold.walk.{o}")
        b.rules_on(walk, material, walk, Pop(1))
        b.rules_on(walk, enc.xi_set, reader, Pop(1))
        b.rules_on(walk, b.complement(material, enc.xi_set), P0WIN, SKIP)
        entry = b.fresh(f"wold.entry.{o}")
        b.rules_on(entry, enc.xi_set, walk, Pop(1))
        b.rules_on(entry, b.complement(enc.xi_set), P1WIN, SKIP)
        b.rules_on(top, b.full_guards, entry, SKIP)
    return top


def _before_capture_reader(enc: _Enc, o: int, finish) -> str:
    """Like _window_reader but captures the letter at before[o]."""
    b = enc.b
    memo = {}

    def build(depth, q_b, captured) -> str:
        if depth == 6:
            if q_b is None or captured is None:
                return P0WIN
            return finish(q_b, captured)
        key = (depth, q_b, captured)
        if key in memo:
            return memo[key]
        state = b.fresh(f"wold.rd.{o}.{depth}")
        memo[key] = state
        for letter in enc.delta:
            q_b2, cap2 = q_b, captured
            if depth >= 3:
                pos = 5 - depth
                if letter in enc.q_letters:
                    if q_b is not None:
                        b.rule(state, letter, P0WIN, SKIP)
                        continue
                    q_b2 = pos
                if pos == o:
                    cap2 = letter
            target = build(depth + 1, q_b2, cap2)
            op = SKIP if target in (P0WIN, P1WIN) else Pop(1)
            b.rule(state, letter, target, op)
        b.rules_on(state, b.complement(enc.delta), P0WIN, SKIP)
        return state

    return build(0, None, None)


def _claim_frame(enc: _Enc) -> str:
    """A far cell of the new configuration must copy the previous one.
    Player 1 anchors a cell with no state letter within two cells on either
    side, the 1-store is cloned, player 0 aligns the clone across exactly
    two separators onto a cell of the previous configuration, and probes
    compare the anchored cells and the position counters below them."""
    b = enc.b
    material = enc.material()
    non_q = [g for g in enc.delta if g not in enc.q_letters]

    dig = {}
    for since in ("none", 0, 1, "far"):
        dig[since] = b.fresh(f"frame.dig.{since}")
    for since, state in dig.items():
        nxt = {"none": "none", 0: 1, 1: "far", "far": "far"}[since]
        b.rules_on(state, enc.idx_letters, state, Pop(1))
        b.rules_on(state, non_q, dig[nxt], Pop(1))
        b.rules_on(state, enc.q_letters, dig[0], Pop(1))

    entry = b.fresh("frame.entry")
    b.rules_on(entry, enc.xi_set, dig["none"], Pop(1))
    b.rules_on(entry, b.complement(enc.xi_set), P1WIN, SKIP)

    probes = _index_probes(b, enc.level - 1, enc.n, drop_level=2)
    for x in non_q:
        pushed = b.fresh(f"frame.pushed.{x}", owner=0)
        b.rule(dig["none"], x, pushed, Push(2))
        b.rule(dig["far"], x, pushed, Push(2))

        align1 = b.fresh(f"frame.align1.{x}", owner=0)
        align2 = b.fresh(f"frame.align2.{x}", owner=0)
        align3 = b.fresh(f"frame.align3.{x}", owner=0)

        # in the clone: pop the anchor, then no state letter within the next
        # two cells (reaching a separator early is fine: no cells there)
        cur = b.fresh(f"frame.noq.{x}.0", owner=0)
        b.rules_on(pushed, b.full_guards, cur, Pop(1))
        for k in (1, 2):
            nxt = align1 if k == 2 else b.fresh(f"frame.noq.{x}.{k}", owner=0)
            b.rules_on(cur, enc.idx_letters, cur, Pop(1))
            for cell in enc.delta:
                if cell in enc.q_letters:
                    b.rule(cur, cell, P0WIN, SKIP)  # too close to the window
                else:
                    b.rule(cur, cell, nxt, Pop(1))
            b.rules_on(cur, enc.xi_set, align1, SKIP)
            b.rules_on(cur, b.complement(material, enc.xi_set), P0WIN, SKIP)
            cur = nxt

        b.rules_on(align1, material, align1, Pop(1))
        b.rules_on(align1, enc.xi_set, align2, Pop(1))
        b.rules_on(align2, material, align2, Pop(1))
        b.rules_on(align2, enc.xi_set, align3, Pop(1))
        b.rules_on(align3, enc.idx_letters, align3, Pop(1))
        for y in enc.delta:
            b.rule(align3, y, align3, Pop(1))
            menu = b.fresh(f"frame.menu.{x}.{y}")
            b.rule(align3, y, menu, SKIP)
            b.rules_on(menu, b.full_guards, P0WIN if y == x else P1WIN, SKIP)
            b.rules_on(menu, b.full_guards, probes, SKIP)
    return entry


def _claim_accept(enc: _Enc) -> str:
    """Player 0 claims acceptance; player 1 concedes or makes him expose an
    accepting state letter inside the topmost configuration."""
    b = enc.b
    material = enc.material()
    non_acc = [g for g in material if g not in enc.acc_letters]
    digger = b.fresh("accept.dig", owner=0)
    b.rules_on(digger, non_acc, digger, Pop(1))
    b.rules_on(digger, enc.acc_letters, P0WIN, SKIP)
    pop_xi = b.fresh("accept.popxi", owner=0)
    b.rules_on(pop_xi, enc.xi_set, digger, Pop(1))
    b.rules_on(pop_xi, b.complement(enc.xi_set), digger, SKIP)
    claim = b.fresh("accept.claim", owner=1)
    b.rules_on(claim, b.full_guards, P0WIN, SKIP)   # concede
    b.rules_on(claim, b.full_guards, pop_xi, SKIP)  # challenge
    return claim


def default_step_budget(atm: Atm, input_word) -> int:
    """A budget covering the machine's acceptance depth when it accepts,
    with a small floor for rejecting runs."""
    verdict, depth = acceptance_depth(atm, input_word)
    if verdict == ACCEPT:
        return max(1, depth)
    return 2


def encode_atm(atm: Atm, input_word, level: int = 2,
               max_steps: Optional[int] = None) -> GameStructure:
    """The reachability game deciding acceptance of `input_word` on the
    2^n-cell tape.  Player 0 wins iff the machine accepts, provided the
    writing budget `max_steps` covers the acceptance depth (the default
    budget does)."""
    if level < 2:
        raise UnsupportedLevelError("the encoding needs stores of level 2 or higher")
    problems = validate_atm(atm)
    if problems:
        raise MalformedConfigurationError("; ".join(problems))
    n = atm.space_exponent
    cells = atm.cells()
    idx_spec = CounterSpec(level - 1, n)
    budget = default_step_budget(atm, input_word) if max_steps is None else max_steps

    extra = list(atm.states) + [LEFT_MARK, RIGHT_MARK]
    b = _Builder(level, level + 1, extra_letters=extra)
    enc = _Enc(
        atm=atm,
        level=level,
        n=n,
        b=b,
        delta=delta_alphabet(atm, level),
        q_letters=list(atm.states),
        acc_letters=[q for q in atm.states if q in atm.accepting],
        idx_letters=list(ambient_alphabet(level - 1)),
        xi_set=[sigma(level + 1).zero, sigma(level + 1).one],
        idx_words=[encode_counter(idx_spec, i) for i in range(cells)],
    )

    qrel_cache: dict = {}
    claims = [
        _claim_form(enc),
        _claim_q_count(enc),
        _claim_legal(enc),
        _claim_window_new(enc, qrel_cache),
        _claim_window_old(enc, qrel_cache),
        _claim_frame(enc),
    ]
    accept_claim = _claim_accept(enc)

    def chain_pushes(label: str, cur: str, letters) -> str:
        for letter in letters:
            nxt = b.fresh(label, owner=0)
            b.rules_on(cur, b.full_guards, nxt, Push1(letter))
            cur = nxt
        return cur

    al = sigma(level)
    free_letters = [al.zero, al.one] + list(atm.states)
    groups = {}
    for rule in atm.rules:
        groups.setdefault(rule.before, []).append(rule)

    turn = {}
    for f in range(budget + 1):
        turn[f] = b.fresh(f"turn.{f}", owner=0)

    for f in range(budget + 1):
        b.rules_on(turn[f], b.full_guards, accept_claim, SKIP)
        if f == 0:
            continue
        ck = b.fresh(f"ck.{f}")
        b.rules_on(ck, b.full_guards, turn[f - 1], SKIP)  # pass
        for claim in claims:
            b.rules_on(ck, b.full_guards, claim, SKIP)

        # the configuration writer for this round
        cw_entry = b.fresh(f"cw.{f}", owner=0)
        cur = cw_entry
        for i in range(cells - 1, -1, -1):
            after_cell = b.fresh(f"cw.{f}.c{i}", owner=0)
            if i == 0:
                b.rules_on(cur, b.full_guards, after_cell, Push1(LEFT_MARK))
            elif i == cells - 1 and cells > 2:
                b.rules_on(cur, b.full_guards, after_cell, Push1(RIGHT_MARK))
            else:
                for letter in free_letters:
                    b.rules_on(cur, b.full_guards, after_cell, Push1(letter))
            cur = chain_pushes(f"cw.{f}.i{i}", after_cell, enc.idx_words[i])
        cur = chain_pushes(f"cw.{f}.xi", cur, [enc.xi_set[0]])
        b.rules_on(cur, b.full_guards, ck, SKIP)

        # window writing: player 0 picks the old half, the owner of its
        # state letter picks the rule (hence the new half)
        for before, rules in groups.items():
            before_store = [cell_letter(x, level) for x in before]
            q = next(x for x in before if x in atm.states)
            writer_owner = 0 if q in atm.existential else 1
            pick_after = b.fresh(f"wpick.{f}", owner=writer_owner)
            entry = b.fresh(f"wwrite.{f}", owner=0)
            tail = chain_pushes(f"wwrite.{f}", entry, before_store)
            b.rules_on(tail, b.full_guards, pick_after, SKIP)
            b.rules_on(turn[f], b.full_guards, entry, SKIP)
            for rule in rules:
                after_store = [cell_letter(x, level) for x in rule.after]
                r_entry = b.fresh(f"wafter.{f}", owner=0)
                r_tail = chain_pushes(f"wafter.{f}", r_entry, after_store)
                r_tail = chain_pushes(f"wafter.{f}.xi", r_tail, [enc.xi_set[0]])
                b.rules_on(r_tail, b.full_guards, cw_entry, SKIP)
                b.rules_on(pick_after, b.full_guards, r_entry, SKIP)

    # forced initial configuration
    init_word = encode_config(atm, initial_tape(atm, input_word), level)
    init_entry = b.fresh("init", owner=0)
    init_tail = chain_pushes("init", init_entry, init_word)
    b.rules_on(init_tail, b.full_guards, turn[budget], SKIP)

    seed = wrap_store(make_store(1), level - 1)
    hpds_game = b.finish(None, None, level, init_entry)
    return GameStructure(
        hpds_game.hpds, dict(hpds_game.owner), Config(init_entry, seed),
        frozenset({P0WIN}),
    )


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


class AtmFormatError(Exception):
    def __init__(self, message, line_no=None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


def _split_window(tokens, known, line_no):
    """Three space-separated letters, or one 3-character token when every
    character is a single-letter symbol."""
    if len(tokens) == 3:
        return tuple(tokens)
    if len(tokens) == 1 and len(tokens[0]) == 3 and all(c in known for c in tokens[0]):
        return tuple(tokens[0])
    raise AtmFormatError(f"expected a three-letter window, got {tokens}", line_no)


def parse_atm(text: str):
    """Parse the machine format; returns (Atm, input word or None)."""
    n = None
    states = []
    existential = set()
    accepting = set()
    initial = None
    rule_lines = []
    input_word = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        pos = raw.find("#")
        line = (raw if pos < 0 else raw[:pos]).strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "atm":
            if len(tokens) != 2 or not tokens[1].startswith("n="):
                raise AtmFormatError("expected: atm n=N", line_no)
            n = int(tokens[1].split("=", 1)[1])
        elif head == "state":
            if len(tokens) < 2:
                raise AtmFormatError("state line needs a name", line_no)
            name = tokens[1]
            states.append(name)
            flags = tokens[2:]
            if "universal" not in flags:
                existential.add(name)
            if "accepting" in flags:
                accepting.add(name)
            if "initial" in flags:
                initial = name
            for flag in flags:
                if flag not in ("universal", "accepting", "initial"):
                    raise AtmFormatError(f"unknown state flag {flag!r}", line_no)
        elif head == "rule":
            if "->" not in tokens:
                raise AtmFormatError("rule line needs '->'", line_no)
            arrow = tokens.index("->")
            rule_lines.append((tokens[1:arrow], tokens[arrow + 1:], line_no))
        elif head == "input:":
            input_word = tuple(tokens[1:])
        else:
            raise AtmFormatError(f"unknown declaration {head!r}", line_no)
    if n is None:
        raise AtmFormatError("missing atm n=N header")
    if initial is None:
        if not states:
            raise AtmFormatError("no states declared")
        initial = states[0]
    known = set("ab<>") | {s for s in states if len(s) == 1}
    rules = []
    for lhs, rhs, line_no in rule_lines:
        before = _split_window(lhs, known, line_no)
        after = _split_window(rhs, known, line_no)
        rules.append(WindowRule(before, after))
    atm = Atm(
        states=tuple(states),
        existential=frozenset(existential),
        accepting=frozenset(accepting),
        initial_state=initial,
        space_exponent=n,
        rules=tuple(rules),
    )
    problems = validate_atm(atm)
    if problems:
        raise AtmFormatError("; ".join(problems))
    return atm, input_word


def format_atm(atm: Atm, input_word=None, header_comments=()) -> str:
    lines = [f"# {c}" for c in header_comments]
    lines.append(f"atm n={atm.space_exponent}")
    for state in atm.states:
        flags = []
        if state not in atm.existential:
            flags.append("universal")
        if state in atm.accepting:
            flags.append("accepting")
        if state == atm.initial_state:
            flags.append("initial")
        lines.append(("state " + state + " " + " ".join(flags)).rstrip())
    for rule in atm.rules:
        lines.append("rule " + " ".join(rule.before) + " -> " + " ".join(rule.after))
    if input_word is not None:
        lines.append("input: " + " ".join(input_word))
    return "\n".join(lines) + "\n"
