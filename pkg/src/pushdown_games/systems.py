"""Higher-order pushdown systems and their configuration graphs.

An HPDS is an unlabeled transition system (P, Gamma, Delta) over level-k
stores.  A rule fires when its source state matches, its guard equals the
store's top symbol (bottom symbols included, so rules can fire on empty
stores), and its operation is defined on the store.  The labeled alternating
variant (AHPDA) adds an input alphabet, a state polarity partition, and
accepting states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .stores import (
    Pop,
    Push,
    Push1,
    Skip,
    Store,
    StoreOp,
    UndefinedOperation,
    apply,
    bottom,
    is_bottom,
    is_valid_symbol,
    top,
)


class NotEnabledError(Exception):
    """A rule was stepped from a configuration where it does not fire."""


@dataclass(frozen=True)
class Rule:
    """A transition rule (src, guard) -> (dst, op), optionally labeled with
    an input letter (None means epsilon / unlabeled)."""

    src: str
    guard: str
    dst: str
    op: StoreOp
    label: Optional[str] = None


@dataclass(frozen=True)
class Config:
    """A configuration: control state plus store."""

    state: str
    store: Store


@dataclass(eq=False)
class Hpds:
    """A level-k higher-order pushdown system."""

    level: int
    states: tuple
    alphabet: tuple
    rules: tuple

    def __post_init__(self):
        self.states = tuple(self.states)
        self.alphabet = tuple(self.alphabet)
        self.rules = tuple(self.rules)
        self._state_set = frozenset(self.states)
        index: dict = {}
        for rule in self.rules:
            index.setdefault((rule.src, rule.guard), []).append(rule)
        self._index = index

    def rules_for(self, state: str, guard: str) -> list:
        return self._index.get((state, guard), [])


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def enabled(hpds: Hpds, config: Config) -> list:
    """All rules that fire at the configuration, in declaration order."""
    out = []
    guard = top(config.store)
    for rule in hpds.rules_for(config.state, guard):
        try:
            apply(config.store, rule.op)
        except UndefinedOperation:
            continue
        out.append(rule)
    return out


def step(hpds: Hpds, config: Config, rule: Rule) -> Config:
    """Apply one enabled rule.  Raises NotEnabledError otherwise."""
    if rule.src != config.state or rule.guard != top(config.store):
        raise NotEnabledError(f"rule {rule} does not match {config.state}")
    try:
        store = apply(config.store, rule.op)
    except UndefinedOperation as exc:
        raise NotEnabledError(str(exc)) from exc
    return Config(rule.dst, store)


def successor_edges(hpds: Hpds, config: Config) -> list:
    """(rule, successor) pairs in declaration order, one per distinct
    successor configuration (the first rule producing it wins)."""
    seen = {}
    guard = top(config.store)
    for rule in hpds.rules_for(config.state, guard):
        try:
            store = apply(config.store, rule.op)
        except UndefinedOperation:
            continue
        succ = Config(rule.dst, store)
        if succ not in seen:
            seen[succ] = rule
    return [(rule, succ) for succ, rule in seen.items()]


def successors(hpds: Hpds, config: Config) -> list:
    """Successor configurations in declaration order, duplicates removed."""
    return [succ for _, succ in successor_edges(hpds, config)]


def _valid_guard(hpds: Hpds, guard: str) -> bool:
    if is_bottom(guard):
        level = int(guard[1:])
        return 1 <= level <= hpds.level
    return guard in hpds.alphabet


def validate(hpds: Hpds) -> list:
    """Well-formedness diagnostics; empty iff the system is well-formed."""
    out = []
    if hpds.level < 1:
        out.append(Diagnostic("level", f"system level must be >= 1, got {hpds.level}"))
    seen_states = set()
    for state in hpds.states:
        if state in seen_states:
            out.append(Diagnostic("state", f"state {state!r} declared twice"))
        seen_states.add(state)
    for sym in hpds.alphabet:
        if not is_valid_symbol(sym):
            out.append(Diagnostic("alphabet", f"invalid alphabet symbol {sym!r}"))
    alpha = set(hpds.alphabet)
    for rule in hpds.rules:
        if rule.src not in seen_states:
            out.append(Diagnostic("rule", f"unknown source state {rule.src!r} in {rule}"))
        if rule.dst not in seen_states:
            out.append(Diagnostic("rule", f"unknown target state {rule.dst!r} in {rule}"))
        if not _valid_guard(hpds, rule.guard):
            out.append(Diagnostic("rule", f"guard {rule.guard!r} outside alphabet and bottoms"))
        op = rule.op
        if isinstance(op, Push1):
            if op.symbol not in alpha:
                out.append(Diagnostic("rule", f"pushed symbol {op.symbol!r} outside alphabet"))
        elif isinstance(op, Push):
            if op.level < 2 or op.level > hpds.level:
                out.append(Diagnostic("rule", f"push {op.level} out of range for level {hpds.level}"))
        elif isinstance(op, Pop):
            if op.level < 1 or op.level > hpds.level:
                out.append(Diagnostic("rule", f"pop {op.level} out of range for level {hpds.level}"))
        elif not isinstance(op, Skip):
            out.append(Diagnostic("rule", f"unknown operation {op!r}"))
    return out


@dataclass(eq=False)
class AHpda:
    """An alternating one-way HPDA: a labeled HPDS plus input alphabet,
    polarity partition, initial configuration, and accepting states."""

    hpds: Hpds
    input_alphabet: tuple
    existential: frozenset
    initial_state: str
    initial_store: Store
    accepting: frozenset

    def __post_init__(self):
        self.input_alphabet = tuple(self.input_alphabet)
        self.existential = frozenset(self.existential)
        self.accepting = frozenset(self.accepting)

    @property
    def universal(self) -> frozenset:
        return frozenset(self.hpds.states) - self.existential


def validate_ahpda(ahpda: AHpda) -> list:
    out = validate(ahpda.hpds)
    states = set(ahpda.hpds.states)
    for st in ahpda.existential:
        if st not in states:
            out.append(Diagnostic("ahpda", f"existential state {st!r} not declared"))
    for st in ahpda.accepting:
        if st not in states:
            out.append(Diagnostic("ahpda", f"accepting state {st!r} not declared"))
    if ahpda.initial_state not in states:
        out.append(Diagnostic("ahpda", f"initial state {ahpda.initial_state!r} not declared"))
    letters = set(ahpda.input_alphabet)
    for rule in ahpda.hpds.rules:
        if rule.label is not None and rule.label not in letters:
            out.append(Diagnostic("ahpda", f"rule label {rule.label!r} outside input alphabet"))
    if ahpda.initial_store.level > ahpda.hpds.level:
        out.append(
            Diagnostic("ahpda", f"initial store level {ahpda.initial_store.level} exceeds system level")
        )
    return out


def bottoms_for(level: int) -> list:
    """All bottom symbols usable as guards in a level-k system."""
    return [bottom(j) for j in range(1, level + 1)]
