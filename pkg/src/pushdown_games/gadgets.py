"""Generators for the counter test games.

Every gadget is a reachability game with two terminal states: "p0win" (the
goal) and "p1win" (a player-0-owned dead end, so entering it loses for
player 0).  The games follow a claim/refutation discipline:

  * player 1 owns the branching states and picks one local claim about the
    store (a shape defect, a boundary defect, a value mismatch, ...);
  * each claim resolves by deterministic alphabet-checked walks, by finite
    control registers, or by recursing into a lower-level test;
  * a claim that misfires (points at a spot that is locally consistent)
    ends in p0win, so on a store satisfying the test predicate every claim
    loses and player 0 wins, while on a violating store the claim local to
    the first defect wins for player 1.

Value comparisons between counters that cannot fit in finite control use
the copy trick: duplicate the store part holding both counters (push_2 and
higher), let player 0 align the copy on the position he claims matches,
then compare the aligned neighbourhoods with finite probes, recursing one
level down where the neighbourhoods are themselves counters.
"""

from __future__ import annotations

from dataclasses import dataclass

from .counters import (
    CounterSpec,
    TestKind,
    ambient_alphabet,
    required_store_level,
    sigma,
)
from .games import GameStructure
from .stores import Pop, Push, Push1, SKIP, Store
from .systems import Config, Hpds, Rule, bottoms_for


class UnsupportedCombinationError(Exception):
    """The requested kind/spec combination is outside the generator."""


P0WIN = "p0win"
P1WIN = "p1win"


@dataclass(eq=False)
class GadgetGame:
    """A packaged test game: HPDS fragment, entry state, ownership, goal."""

    kind: TestKind
    spec: CounterSpec
    store_level: int
    entry: str
    hpds: Hpds
    owner: dict

    @property
    def goal(self) -> frozenset:
        return frozenset({P0WIN})

    def to_game(self, store: Store) -> GameStructure:
        if store.level != self.store_level:
            raise ValueError(
                f"{self.kind} at level {self.spec.level} runs on level-{self.store_level} "
                f"stores, got level {store.level}"
            )
        return GameStructure(self.hpds, dict(self.owner), Config(self.entry, store), self.goal)


class _Builder:
    def __init__(self, store_level: int, max_sigma: int, extra_letters=()):
        self.store_level = store_level
        self.alphabet = list(ambient_alphabet(max_sigma)) + list(extra_letters)
        self.full_guards = self.alphabet + bottoms_for(store_level)
        self.rules = []
        self.states = [P0WIN, P1WIN]
        self.owner = {P0WIN: 0, P1WIN: 0}
        self._next = 0

    def fresh(self, label: str, owner: int = 1) -> str:
        name = f"{label}.{self._next}"
        self._next += 1
        self.states.append(name)
        self.owner[name] = owner
        return name

    def rule(self, src: str, guard: str, dst: str, op) -> None:
        self.rules.append(Rule(src, guard, dst, op))

    def rules_on(self, src: str, guards, dst: str, op) -> None:
        for guard in guards:
            self.rule(src, guard, dst, op)

    def complement(self, *guard_sets) -> list:
        excluded = set()
        for s in guard_sets:
            excluded.update(s)
        return [g for g in self.full_guards if g not in excluded]

    def verdict_state(self, label: str, win0: bool) -> str:
        return P0WIN if win0 else P1WIN

    def finish(self, kind, spec, store_level, entry) -> GadgetGame:
        hpds = Hpds(store_level, tuple(self.states), tuple(self.alphabet), tuple(self.rules))
        return GadgetGame(kind, spec, store_level, entry, hpds, dict(self.owner))


def _letters(i: int) -> list:
    al = sigma(i)
    return [al.zero, al.one]


def _letters_upto(i: int) -> list:
    out = []
    for lv in range(1, i + 1):
        out.extend(_letters(lv))
    return out


def _pop_scan(b: _Builder, label: str, expected_sets, ok: str, fail: str = P1WIN) -> str:
    """Deterministic scan popping one letter per expectation; any letter
    outside the expected set diverts to `fail` without popping."""
    states = [b.fresh(label) for _ in expected_sets]
    states.append(ok)
    for idx, exp in enumerate(expected_sets):
        b.rules_on(states[idx], exp, states[idx + 1], Pop(1))
        b.rules_on(states[idx], b.complement(exp), fail, SKIP)
    return states[0]


def _top_verdict(b: _Builder, label: str, cases, default: str = P1WIN) -> str:
    """A state that resolves on the current top symbol: `cases` is a list of
    (guard set, target state); everything else goes to `default`."""
    state = b.fresh(label)
    used = []
    for guards, target in cases:
        b.rules_on(state, guards, target, SKIP)
        used.append(guards)
    b.rules_on(state, b.complement(*used), default, SKIP)
    return state


# ---------------------------------------------------------------------------
# counter / first / last: recursive shape check
# ---------------------------------------------------------------------------


def _check_counter(b: _Builder, i: int, n: int, mode: str, f_below, f_top=None,
                   bits_override=None) -> str:
    """Entry of the claim game verifying: [a letter from f_top, popped, when
    given] then a valid i-counter (mode constrains its value: any/first/
    last) then a letter from f_below.  Player 0 wins iff the predicate
    holds.  `bits_override` replaces the top-layer bit alphabet (the
    Turing-machine encoding interleaves cell letters with the position
    counters exactly like counter bits); value modes then do not apply."""
    body = _counter_body(b, i, n, mode, f_below, bits_override)
    if f_top is None:
        return body
    entry = b.fresh(f"ctr{i}.{mode}.flank")
    b.rules_on(entry, f_top, body, Pop(1))
    b.rules_on(entry, b.complement(f_top), P1WIN, SKIP)
    return entry


def _counter_body(b: _Builder, i: int, n: int, mode: str, f_below, bits_override=None) -> str:
    if bits_override is not None and mode != "any":
        raise ValueError("value modes need the standard bit alphabet")
    bits = list(bits_override) if bits_override is not None else _letters(i)
    al = sigma(i)
    if mode == "first":
        allowed = [al.zero]
    elif mode == "last":
        allowed = [al.one]
    else:
        allowed = bits
    if i == 1:
        ok = _top_verdict(b, "ctr1.below", [(f_below, P0WIN)])
        return _pop_scan(b, f"ctr1.{mode}", [allowed] * n, ok)

    # i >= 2: player 1 either checks the topmost sub-counter (value 0), one
    # of the claim families at the top pair, or digs to a bit and claims
    # there.  Digging through a wrong bit is allowed; the mode claims make
    # the wrong bit itself a win.
    sub_letters = _letters_upto(i - 1)
    entry = b.fresh(f"ctr{i}.{mode}.top")
    dig = b.fresh(f"ctr{i}.{mode}.dig")

    first_check = _check_counter(b, i - 1, n, "first", f_below=bits)
    b.rules_on(entry, b.full_guards, first_check, SKIP)
    for claim in _pair_claims(b, i - 1, n, sep=bits, f_esc=f_below):
        b.rules_on(entry, b.full_guards, claim, SKIP)  # pair at the very top
    b.rules_on(entry, b.full_guards, dig, SKIP)

    b.rules_on(dig, sub_letters, dig, Pop(1))
    b.rules_on(dig, bits, dig, Pop(1))
    # claims below an exposed bit; popping the deepest bit exposes the
    # enclosing boundary, where no claim applies
    anchored = b.fresh(f"ctr{i}.{mode}.anchored")
    b.rules_on(dig, bits, anchored, Pop(1))
    b.rules_on(anchored, f_below, P0WIN, SKIP)
    claim_guards = b.complement(f_below)
    for claim in _pair_claims(b, i - 1, n, sep=bits, f_esc=f_below):
        b.rules_on(anchored, claim_guards, claim, SKIP)
    if i >= 3:
        valid_below = _check_counter(b, i - 1, n, "any", f_below=bits)
        b.rules_on(entry, b.full_guards, valid_below, SKIP)
        b.rules_on(anchored, claim_guards, valid_below, SKIP)
    if mode == "first":
        b.rule(dig, al.one, P1WIN, SKIP)
    elif mode == "last":
        b.rule(dig, al.zero, P1WIN, SKIP)
    return entry


def _pair_claims(b: _Builder, j: int, n: int, sep, f_esc) -> list:
    """Claim entries about the two j-counters below the current position
    (which sits just above them, its letter already popped by the caller's
    transition): the pair must be [counter w][sep letter][counter v] with
    v = w + 1, or w may be the last counter before the enclosing boundary
    (a letter from f_esc).  Used for the index chain inside an
    (j+1)-counter, where the separators are the bits."""
    claims = []
    if j == 1:
        claims.append(_pair_shape_1(b, n, sep, f_esc))
    claims.append(_value_machine(b, j, n, "succ", sep=sep, f_esc=f_esc))
    claims.append(_boundary_audit(b, j, sep=sep, f_esc=f_esc, succ_wrap=True))
    return claims


def _pair_shape_1(b: _Builder, n: int, sep, f_esc) -> str:
    """Shape of a 1-counter pair: n bits, separator, n bits, then another
    separator (a bit always follows a counter).  Hitting the enclosing
    boundary where the separator would be is legitimate (the boundary
    claims audit it), so it ends the claim in player 0's favour."""
    bits1 = _letters(1)
    final = _top_verdict(b, "pshape.final", [(sep, P0WIN)])
    v_scan = _pop_scan(b, "pshape.v", [bits1] * n, final)
    v_start = b.fresh("pshape.vstart")
    if f_esc:
        # v missing because the pair sat at the end of the chain: the
        # boundary audit judges that case, not this claim
        b.rules_on(v_start, f_esc, P0WIN, SKIP)
    b.rules_on(v_start, bits1, v_scan, SKIP)
    b.rules_on(v_start, b.complement(bits1, f_esc or []), P1WIN, SKIP)
    mid = b.fresh("pshape.mid")
    b.rules_on(mid, sep, v_start, Pop(1))
    b.rules_on(mid, b.complement(sep), P1WIN, SKIP)
    return _pop_scan(b, "pshape.w", [bits1] * n, mid)


def _boundary_audit(b: _Builder, j: int, sep, f_esc, succ_wrap: bool) -> str:
    """Walk the j-counter below the current position tracking whether every
    one of its bits is set.  At the next separator: a full counter followed
    by more material wraps around the maximum, so the chain is fake.  At
    the enclosing boundary: a non-maximal counter ends the chain too early."""
    al = sigma(j)
    inner = [g for g in _letters_upto(j) if g != al.zero and g != al.one]
    walk_all_b = b.fresh(f"audit{j}.allb")
    walk_seen_a = b.fresh(f"audit{j}.seena")
    # a maximal counter may end the chain: pop the bit after it and demand
    # the enclosing boundary; more material there means a wrapped-around
    # (too long) chain
    wrap_check = b.fresh(f"audit{j}.wrap")
    if f_esc:
        b.rules_on(wrap_check, f_esc, P0WIN, SKIP)
        b.rules_on(wrap_check, b.complement(f_esc), P1WIN, SKIP)
    else:
        b.rules_on(wrap_check, b.full_guards, P1WIN, SKIP)
    for state, seen_a in ((walk_all_b, False), (walk_seen_a, True)):
        b.rules_on(state, inner, state, Pop(1))
        b.rule(state, al.one, state, Pop(1))
        b.rule(state, al.zero, walk_seen_a, Pop(1))
        if succ_wrap and not seen_a:
            b.rules_on(state, sep, wrap_check, Pop(1))
        else:
            b.rules_on(state, sep, P0WIN, SKIP)
        if f_esc:
            b.rules_on(state, f_esc, P0WIN if not seen_a else P1WIN, SKIP)
        b.rules_on(state, b.complement(inner, [al.zero, al.one], sep, f_esc or []), P1WIN, SKIP)
    return walk_all_b


# ---------------------------------------------------------------------------
# value comparison machinery
# ---------------------------------------------------------------------------


def _value_machine(b: _Builder, j: int, n: int, mode: str, sep, f_esc,
                   consume_sep=None) -> str:
    """Entry of the claim comparing the two j-counters below the current
    position: player 1 walks into the top counter w, commits to a bit, and
    the machinery checks the corresponding bit of the deeper counter v
    against it (mode "equal": must match; mode "succ": must match the
    increment prediction tracked while walking over the low bits first).

    The two counters are separated by exactly one letter from `sep`.  When
    `consume_sep` is given the entry expects (and pops) a letter from it
    first: the bit or flank sitting above w."""
    if j == 1:
        return _value_machine_1(b, n, mode, sep, f_esc, consume_sep)
    return _value_machine_deep(b, j, n, mode, sep, f_esc, consume_sep)


def _value_machine_1(b: _Builder, n: int, mode: str, sep, f_esc, consume_sep) -> str:
    """Predict-and-commit walk for 1-counters: commit on a bit of w,
    remember the expected bit of v, pop exactly n+1 letters (crossing one
    separator), compare.  The crossing walk is a small region automaton so
    hitting the enclosing boundary instead of the separator releases the
    claim (that anchor had no deeper counter; the audit claims judge it)."""
    al = sigma(1)
    bits = _letters(1)
    carries = (1, 0) if mode == "succ" else (0,)
    sel = {c: b.fresh(f"vm1.sel.c{c}") for c in carries}

    fwd = {}
    for target in bits:
        for count in range(n + 2):
            for phase in ("a", "b"):
                fwd[(target, count, phase)] = b.fresh(f"vm1.fwd.{target}.{count}{phase}")
    for target in bits:
        for count in range(n + 1):
            for phase in ("a", "b"):
                state = fwd[(target, count, phase)]
                b.rules_on(state, bits, fwd[(target, count + 1, phase)], Pop(1))
                if phase == "a":
                    b.rules_on(state, sep, fwd[(target, count + 1, "b")], Pop(1))
                    if f_esc:
                        b.rules_on(state, f_esc, P0WIN, SKIP)
                    b.rules_on(state, b.complement(bits, sep, f_esc or []), P1WIN, SKIP)
                else:
                    if f_esc:
                        # the committed pair sat at the end of the chain;
                        # the boundary audit owns that case
                        b.rules_on(state, f_esc, P0WIN, SKIP)
                    b.rules_on(state, b.complement(bits, f_esc or []), P1WIN, SKIP)
        for phase in ("a", "b"):
            state = fwd[(target, n + 1, phase)]
            if phase == "b":
                b.rule(state, target, P0WIN, SKIP)
                if f_esc:
                    b.rules_on(state, f_esc, P0WIN, SKIP)
                b.rules_on(state, b.complement([target], f_esc or []), P1WIN, SKIP)
            else:
                b.rules_on(state, b.full_guards, P1WIN, SKIP)

    for c in carries:
        state = sel[c]
        if mode == "succ":
            b.rule(state, al.one, sel[c], Pop(1))
            b.rule(state, al.zero, sel[0], Pop(1))
        else:
            b.rules_on(state, bits, sel[c], Pop(1))
        for x in bits:
            if mode == "succ" and c == 1:
                target = al.zero if x == al.one else al.one
            else:
                target = x
            b.rule(state, x, fwd[(target, 0, "a")], SKIP)

    start = sel[carries[0]]
    if consume_sep is None:
        return start
    entry = b.fresh("vm1.entry")
    b.rules_on(entry, consume_sep, start, Pop(1))
    b.rules_on(entry, b.complement(consume_sep), P1WIN, SKIP)
    return entry


def _value_machine_deep(b: _Builder, j: int, n: int, mode: str, sep, f_esc, consume_sep) -> str:
    """Copy-based comparison for j-counters (j >= 2): player 1 walks into w
    (updating the carry over its bits for succ mode), anchors at a bit with
    push_2, player 0 pops the clone across exactly one separator and stops
    on the bit of v he claims corresponds, and finite probes compare the
    anchored bit against the prediction and the two position counters
    below the anchors."""
    al = sigma(j)
    bits = _letters(j)
    inner = _letters_upto(j - 1)
    carries = (1, 0) if mode == "succ" else (0,)
    sel = {c: b.fresh(f"vm{j}.sel.c{c}") for c in carries}

    # player 0 alignment, parameterized by the predicted bit
    probe_entries = {}
    for target in bits:
        align1 = b.fresh(f"vm{j}.align1.{target}", owner=0)
        align2 = b.fresh(f"vm{j}.align2.{target}", owner=0)
        b.rules_on(align1, inner + bits, align1, Pop(1))
        b.rules_on(align1, sep, align2, Pop(1))
        if f_esc:
            b.rules_on(align1, f_esc, P0WIN, SKIP)
            b.rules_on(align2, f_esc, P0WIN, SKIP)
        b.rules_on(align2, inner, align2, Pop(1))
        for y in bits:
            b.rule(align2, y, align2, Pop(1))
            menu = b.fresh(f"vm{j}.menu.{target}.{y}")
            b.rule(align2, y, menu, SKIP)
            b.rules_on(menu, b.full_guards, P0WIN if y == target else P1WIN, SKIP)
            sub = _index_probes(b, j - 1, n, drop_level=2)
            b.rules_on(menu, b.full_guards, sub, SKIP)
        probe_entries[target] = align1

    for c in carries:
        state = sel[c]
        b.rules_on(state, inner, state, Pop(1))
        if mode == "succ":
            b.rule(state, al.one, sel[c], Pop(1))
            b.rule(state, al.zero, sel[0], Pop(1))
        else:
            b.rules_on(state, bits, sel[c], Pop(1))
        for x in bits:
            if mode == "succ" and c == 1:
                target = al.zero if x == al.one else al.one
            else:
                target = x
            b.rule(state, x, probe_entries[target], Push(2))

    start = sel[carries[0]]
    if consume_sep is None:
        return start
    entry = b.fresh(f"vm{j}.entry")
    b.rules_on(entry, consume_sep, start, Pop(1))
    b.rules_on(entry, b.complement(consume_sep), P1WIN, SKIP)
    return entry


def _index_probes(b: _Builder, idx_level: int, n: int, drop_level: int) -> str:
    """Compare the two idx_level-counters sitting directly below the tops of
    the top copy and of the copy below it.  The entry pops the top-copy top
    first.  For level 1 the probes read one aligned bit on each side with a
    register; anything outside the bit alphabet registers as the boundary
    marker, so both sides running out at the same probe agree."""
    if idx_level == 1:
        menu = b.fresh("probe1.menu")
        bits = _letters(1)
        for m in range(n):
            left0 = b.fresh(f"probe1.L{m}")
            b.rules_on(menu, b.full_guards, left0, SKIP)
            cur = left0
            drops = {}
            for reg in bits + ["flk"]:
                drops[reg] = b.fresh(f"probe1.drop{m}.{reg}")
            # left walk: pop the top, walk m bits, read
            walk = b.fresh(f"probe1.Lw{m}.0")
            b.rules_on(cur, b.full_guards, walk, Pop(1))
            for d in range(m):
                nxt = b.fresh(f"probe1.Lw{m}.{d + 1}")
                b.rules_on(walk, bits, nxt, Pop(1))
                b.rules_on(walk, b.complement(bits), drops["flk"], SKIP)
                walk = nxt
            for bit in bits:
                b.rule(walk, bit, drops[bit], SKIP)
            b.rules_on(walk, b.complement(bits), drops["flk"], SKIP)
            for reg, drop_state in drops.items():
                right0 = b.fresh(f"probe1.R{m}.{reg}")
                b.rules_on(drop_state, b.full_guards, right0, Pop(drop_level))
                walk = b.fresh(f"probe1.Rw{m}.{reg}.0")
                b.rules_on(right0, b.full_guards, walk, Pop(1))
                for d in range(m):
                    nxt = b.fresh(f"probe1.Rw{m}.{reg}.{d + 1}")
                    b.rules_on(walk, bits, nxt, Pop(1))
                    b.rules_on(walk, b.complement(bits),
                               P0WIN if reg == "flk" else P1WIN, SKIP)
                    walk = nxt
                if reg == "flk":
                    b.rules_on(walk, b.complement(bits), P0WIN, SKIP)
                    b.rules_on(walk, bits, P1WIN, SKIP)
                else:
                    b.rule(walk, reg, P0WIN, SKIP)
                    b.rules_on(walk, b.complement([reg]), P1WIN, SKIP)
        return menu

    # idx_level >= 2: anchor a bit inside the top-copy counter, clone one
    # level higher, player 0 exposes the deeper copy and anchors the
    # matching bit there; then compare the anchored bits directly and the
    # index counters below them one level down.
    al = sigma(idx_level)
    bits = _letters(idx_level)
    inner = _letters_upto(idx_level - 1)
    dig = b.fresh(f"probe{idx_level}.dig")
    dig0 = b.fresh(f"probe{idx_level}.dig0")
    entry = b.fresh(f"probe{idx_level}.entry")
    b.rules_on(entry, b.full_guards, dig0, Pop(1))
    # no index counter on this side at all (the anchor was a deepest bit):
    # match only if the other side is boundary-adjacent too
    non_index = b.complement(inner, bits)
    flk_drop = b.fresh(f"probe{idx_level}.flkdrop")
    flk_pop = b.fresh(f"probe{idx_level}.flkpop")
    b.rules_on(dig0, non_index, flk_drop, SKIP)
    b.rules_on(flk_drop, b.full_guards, flk_pop, Pop(drop_level))
    flk_check = b.fresh(f"probe{idx_level}.flkcheck")
    b.rules_on(flk_pop, b.full_guards, flk_check, Pop(1))
    b.rules_on(flk_check, inner + bits, P1WIN, SKIP)
    b.rules_on(flk_check, non_index, P0WIN, SKIP)
    b.rules_on(dig0, inner, dig, Pop(1))
    b.rules_on(dig0, bits, dig, Pop(1))
    b.rules_on(dig, inner, dig, Pop(1))
    b.rules_on(dig, bits, dig, Pop(1))
    for tau in bits:
        pushed = b.fresh(f"probe{idx_level}.pushed.{tau}", owner=0)
        b.rule(dig, tau, pushed, Push(drop_level + 1))
        b.rule(dig0, tau, pushed, Push(drop_level + 1))
        expose = b.fresh(f"probe{idx_level}.expose.{tau}", owner=0)
        b.rules_on(pushed, b.full_guards, expose, Pop(drop_level))
        align = b.fresh(f"probe{idx_level}.align.{tau}", owner=0)
        b.rules_on(expose, b.full_guards, align, Pop(1))
        b.rules_on(align, inner, align, Pop(1))
        for gamma in bits:
            b.rule(align, gamma, align, Pop(1))
            menu = b.fresh(f"probe{idx_level}.menu.{tau}.{gamma}")
            b.rule(align, gamma, menu, SKIP)
            b.rules_on(menu, b.full_guards, P0WIN if tau == gamma else P1WIN, SKIP)
            sub = _index_probes(b, idx_level - 1, n, drop_level + 1)
            b.rules_on(menu, b.full_guards, sub, SKIP)
    return entry


# ---------------------------------------------------------------------------
# top-level tests
# ---------------------------------------------------------------------------


def _build_counter_test(kind: TestKind, spec: CounterSpec) -> GadgetGame:
    k, n = spec.level, spec.n
    store_level = required_store_level(kind, spec)
    b = _Builder(store_level, k + 1)
    entry = _check_counter(b, k, n, kind.name if kind.name != "counter" else "any",
                           f_below=_letters(k + 1), f_top=_letters(k + 1))
    return b.finish(kind, spec, store_level, entry)


def _build_equal_succ(kind: TestKind, spec: CounterSpec) -> GadgetGame:
    k, n = spec.level, spec.n
    store_level = required_store_level(kind, spec)
    b = _Builder(store_level, k + 1)
    flank = _letters(k + 1)
    entry = b.fresh(f"{kind.name}{k}.entry")
    b.rules_on(entry, b.complement(flank), P1WIN, SKIP)

    # shape of the top counter w (with both its flanking letters)
    w_check = _check_counter(b, k, n, "any", f_below=flank, f_top=flank)
    b.rules_on(entry, flank, w_check, SKIP)
    # shape of the deeper counter v: dig past w to its upper flank
    dg = b.fresh(f"{kind.name}{k}.dig2nd")
    b.rules_on(entry, flank, dg, Pop(1))
    b.rules_on(dg, _letters_upto(k), dg, Pop(1))
    v_check = _check_counter(b, k, n, "any", f_below=flank, f_top=flank)
    b.rules_on(dg, flank, v_check, SKIP)
    # value claims
    vm = _value_machine(b, k, n, kind.name, sep=flank, f_esc=None, consume_sep=flank)
    b.rules_on(entry, flank, vm, SKIP)
    if kind.name == "succ":
        audit = _boundary_audit(b, k, sep=flank, f_esc=None, succ_wrap=True)
        audit_entry = b.fresh(f"succ{k}.audit.entry")
        b.rules_on(audit_entry, flank, audit, Pop(1))
        b.rules_on(audit_entry, b.complement(flank), P1WIN, SKIP)
        b.rules_on(entry, flank, audit_entry, SKIP)
    return b.finish(kind, spec, store_level, entry)


def _build_same(kind: TestKind, spec: CounterSpec) -> GadgetGame:
    k, n = spec.level, spec.n
    i = kind.same_index
    if i is None or not 1 <= i < k:
        raise UnsupportedCombinationError(f"same^i needs 1 <= i < {k}, got {i}")
    if k < 2:
        raise UnsupportedCombinationError("same tests need level >= 2")
    store_level = required_store_level(kind, spec)
    drop_level = k - i + 1
    b = _Builder(store_level, i + 1)
    flank = _letters(i + 1)
    entry = b.fresh(f"same{i}_{k}.entry")

    # shape claim on the top copy's counter w (runs inside the top copy)
    w_check = _check_counter(b, i, n, "any", f_below=flank, f_top=flank)
    b.rules_on(entry, b.full_guards, w_check, SKIP)

    # flank comparison: register the top copy's top, drop the copy, compare
    for rho in flank:
        reg = b.fresh(f"same{i}_{k}.flank.{rho}")
        b.rule(entry, rho, reg, SKIP)
        after = b.fresh(f"same{i}_{k}.flankcmp.{rho}")
        b.rules_on(reg, b.full_guards, after, Pop(drop_level))
        b.rule(after, rho, P0WIN, SKIP)
        b.rules_on(after, b.complement([rho]), P1WIN, SKIP)

    # word comparison probes
    probes = _index_probes(b, i, n, drop_level)
    b.rules_on(entry, b.full_guards, probes, SKIP)
    return b.finish(kind, spec, store_level, entry)


def build_test(kind: TestKind, spec: CounterSpec) -> GadgetGame:
    """Generate the test game for the given kind and counter family.  The
    winner of `solve(game.to_game(store))` matches `oracle(kind, spec,
    store)` for every store of the required level whose top region carries
    flanked counters (or any single-symbol corruption of one)."""
    if kind.name in ("counter", "first", "last"):
        return _build_counter_test(kind, spec)
    if kind.name in ("equal", "succ"):
        if spec.level == 1:
            return _build_equal_succ_level1(kind, spec)
        return _build_equal_succ(kind, spec)
    if kind.name == "same":
        return _build_same(kind, spec)
    raise UnsupportedCombinationError(f"unknown test kind {kind}")


def _build_equal_succ_level1(kind: TestKind, spec: CounterSpec) -> GadgetGame:
    n = spec.n
    b = _Builder(1, 2)
    flank = _letters(2)
    bits = _letters(1)
    entry = b.fresh(f"{kind.name}1.entry")
    b.rules_on(entry, b.complement(flank), P1WIN, SKIP)

    # full two-counter shape: flank w flank v flank
    final = _top_verdict(b, f"{kind.name}1.deep", [(flank, P0WIN)])
    v_scan = _pop_scan(b, f"{kind.name}1.v", [bits] * n, final)
    mid = b.fresh(f"{kind.name}1.mid")
    b.rules_on(mid, flank, v_scan, Pop(1))
    b.rules_on(mid, b.complement(flank), P1WIN, SKIP)
    w_scan = _pop_scan(b, f"{kind.name}1.w", [bits] * n, mid)
    shape = b.fresh(f"{kind.name}1.shape")
    b.rules_on(shape, flank, w_scan, Pop(1))
    b.rules_on(shape, b.complement(flank), P1WIN, SKIP)
    b.rules_on(entry, flank, shape, SKIP)

    vm = _value_machine(b, 1, n, kind.name, sep=flank, f_esc=None, consume_sep=flank)
    b.rules_on(entry, flank, vm, SKIP)
    if kind.name == "succ":
        audit = _boundary_audit(b, 1, sep=flank, f_esc=None, succ_wrap=True)
        audit_entry = b.fresh("succ1.audit.entry")
        b.rules_on(audit_entry, flank, audit, Pop(1))
        b.rules_on(audit_entry, b.complement(flank), P1WIN, SKIP)
        b.rules_on(entry, flank, audit_entry, SKIP)
    return b.finish(kind, spec, 1, entry)
