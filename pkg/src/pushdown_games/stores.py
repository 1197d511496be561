"""Immutable level-k stores and their operation algebra.

A level-1 store is a sequence of symbols; a level-k store (k > 1) is a
sequence of level-(k-1) stores.  The rightmost element is the top.  Stores
are persistent values: every operation returns a new store that shares
structure with its input, so duplicating a sub-store (push_j) is O(1).

Symbols are plain strings.  The reserved bottom symbols "_1", "_2", ... are
the implicit tops of empty stores; they can be used as rule guards but never
occur inside store content.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union


class StoreError(Exception):
    """Base class for store-related errors."""


class UndefinedOperation(StoreError):
    """The requested operation is not defined on this store."""


class StoreSyntaxError(StoreError):
    """A store literal could not be parsed.  Carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class LevelMismatchError(StoreError):
    """A store literal's nesting depth disagrees with the declared level."""


_BOTTOM_RE = re.compile(r"^_[0-9]+$")
_TOKEN_RE = re.compile(r"[^\s\[\]]+")


def bottom(level: int) -> str:
    """The reserved bottom symbol for the given level."""
    return f"_{level}"


def is_bottom(symbol: str) -> bool:
    return _BOTTOM_RE.match(symbol) is not None


def is_valid_symbol(symbol: str) -> bool:
    """True for a plain alphabet symbol: nonempty, no whitespace or brackets,
    not a reserved bottom token."""
    return bool(symbol) and _TOKEN_RE.fullmatch(symbol) is not None and not is_bottom(symbol)


class _Node:
    """Persistent list node; head is the top of the sequence."""

    __slots__ = ("item", "rest", "size", "hashv")

    def __init__(self, item, rest):
        self.item = item
        self.rest = rest
        if rest is None:
            self.size = 1
            self.hashv = hash((item, 0x9E3779B9))
        else:
            self.size = rest.size + 1
            self.hashv = hash((item, rest.hashv))


def _chain_eq(a, b) -> bool:
    while a is not b:
        if a is None or b is None:
            return False
        if a.hashv != b.hashv or a.size != b.size:
            return False
        if a.item != b.item:
            return False
        a, b = a.rest, b.rest
    return True


class Store:
    """An immutable store of a fixed level.  Use :func:`make_store` or
    :func:`parse_store` to build one."""

    __slots__ = ("level", "chain", "hashv")

    def __init__(self, level: int, chain=None):
        if level < 1:
            raise ValueError(f"store level must be >= 1, got {level}")
        self.level = level
        self.chain = chain
        self.hashv = hash((level, chain.hashv if chain is not None else 0))

    def __hash__(self) -> int:
        return self.hashv

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Store):
            return NotImplemented
        if self.level != other.level or self.hashv != other.hashv:
            return False
        return _chain_eq(self.chain, other.chain)

    def __ne__(self, other) -> bool:
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __len__(self) -> int:
        """Length of the outer sequence."""
        return self.chain.size if self.chain is not None else 0

    def is_empty(self) -> bool:
        return self.chain is None

    def items_topdown(self) -> Iterator:
        """Elements from the top of the sequence to the bottom."""
        node = self.chain
        while node is not None:
            yield node.item
            node = node.rest

    def items_bottomup(self) -> list:
        """Elements in literal order (bottom first, top last)."""
        out = list(self.items_topdown())
        out.reverse()
        return out

    def top_item(self):
        if self.chain is None:
            raise UndefinedOperation(f"empty level-{self.level} store has no top element")
        return self.chain.item

    def __repr__(self) -> str:
        return f"Store({self.level}, {render_store(self)!r})"


def make_store(level: int, items=()) -> Store:
    """Build a store from elements listed bottom-to-top.  At level 1 the
    elements are symbols; at level k > 1 they are stores of level k-1."""
    chain = None
    for item in items:
        if level == 1:
            if not isinstance(item, str) or not is_valid_symbol(item):
                raise StoreError(f"invalid symbol in level-1 store: {item!r}")
        else:
            if not isinstance(item, Store) or item.level != level - 1:
                raise StoreError(
                    f"level-{level} store element must be a level-{level - 1} store, got {item!r}"
                )
        chain = _Node(item, chain)
    return Store(level, chain)


def wrap_store(inner: Store, levels: int = 1) -> Store:
    """Nest a store inside `levels` singleton outer sequences."""
    s = inner
    for _ in range(levels):
        s = Store(s.level + 1, _Node(s, None))
    return s


@dataclass(frozen=True)
class Push1:
    """Append a symbol to the topmost 1-store."""

    symbol: str


@dataclass(frozen=True)
class Push:
    """Duplicate the topmost element of the topmost level-j store."""

    level: int


@dataclass(frozen=True)
class Pop:
    """Remove the topmost element of the topmost level-j store."""

    level: int


@dataclass(frozen=True)
class Skip:
    """Leave the store unchanged."""


StoreOp = Union[Push1, Push, Pop, Skip]

SKIP = Skip()


def format_op(op: StoreOp) -> str:
    if isinstance(op, Push1):
        return f"push1 {op.symbol}"
    if isinstance(op, Push):
        return f"push {op.level}"
    if isinstance(op, Pop):
        return f"pop {op.level}"
    if isinstance(op, Skip):
        return "skip"
    raise TypeError(f"not a store operation: {op!r}")


def top(store: Store) -> str:
    """Top symbol of a store.  Total: an empty store encountered while
    descending along topmost elements exposes its bottom symbol."""
    s = store
    while s.level > 1:
        if s.chain is None:
            return bottom(s.level)
        s = s.chain.item
    return s.chain.item if s.chain is not None else bottom(1)


def _push1(s: Store, symbol: str) -> Store:
    if s.level == 1:
        return Store(1, _Node(symbol, s.chain))
    if s.chain is None:
        raise UndefinedOperation(f"push1 needs a topmost 1-store; level-{s.level} store is empty")
    return Store(s.level, _Node(_push1(s.chain.item, symbol), s.chain.rest))


def _push(s: Store, j: int) -> Store:
    if s.chain is None:
        raise UndefinedOperation(f"push {j} on a store whose topmost level-{s.level} store is empty")
    if s.level == j:
        return Store(s.level, _Node(s.chain.item, s.chain))
    return Store(s.level, _Node(_push(s.chain.item, j), s.chain.rest))


def _pop(s: Store, j: int) -> Store:
    if s.chain is None:
        raise UndefinedOperation(f"pop {j} on a store whose topmost level-{j} store is empty"
                                 if s.level == j else
                                 f"pop {j} cannot reach a level-{j} store: level-{s.level} store is empty")
    if s.level == j:
        return Store(s.level, s.chain.rest)
    return Store(s.level, _Node(_pop(s.chain.item, j), s.chain.rest))


def apply(store: Store, op: StoreOp) -> Store:
    """Apply a store operation.  Raises UndefinedOperation where the
    operation is not defined (popping an empty store, pushing a bottom
    symbol, or an op level out of range for this store)."""
    if isinstance(op, Skip):
        return store
    if isinstance(op, Push1):
        if is_bottom(op.symbol):
            raise UndefinedOperation(f"bottom symbol {op.symbol} cannot be pushed")
        return _push1(store, op.symbol)
    if isinstance(op, Push):
        if op.level < 2 or op.level > store.level:
            raise UndefinedOperation(f"push {op.level} undefined on a level-{store.level} store")
        return _push(store, op.level)
    if isinstance(op, Pop):
        if op.level < 1 or op.level > store.level:
            raise UndefinedOperation(f"pop {op.level} undefined on a level-{store.level} store")
        return _pop(store, op.level)
    raise TypeError(f"not a store operation: {op!r}")


def op_defined(store: Store, op: StoreOp) -> bool:
    try:
        apply(store, op)
    except UndefinedOperation:
        return False
    return True


def render_store(store: Store) -> str:
    """Canonical literal: level-1 stores are space-separated symbols, higher
    levels bracket each element; bottom of the sequence is leftmost."""
    items = store.items_bottomup()
    if store.level == 1:
        return " ".join(items)
    return "".join("[" + render_store(item) + "]" for item in items)


def _scan_tokens(text: str):
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "[]":
            tokens.append((c, i))
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        tokens.append((m.group(0), i))
        i = m.end()
    return tokens


def parse_store(text: str, level: int) -> Store:
    """Parse a store literal at the declared level.  Raises StoreSyntaxError
    on malformed input and LevelMismatchError when the literal's nesting
    depth disagrees with the level."""
    if level < 1:
        raise LevelMismatchError(f"store level must be >= 1, got {level}")
    tokens = _scan_tokens(text)
    pos = 0

    def parse_level(lv: int, closing: bool):
        nonlocal pos
        items = []
        while pos < len(tokens):
            tok, at = tokens[pos]
            if tok == "]":
                if not closing:
                    raise StoreSyntaxError("unbalanced ']'", at)
                break
            if tok == "[":
                if lv == 1:
                    raise LevelMismatchError(
                        f"nested literal at position {at} is too deep for a level-1 store"
                    )
                pos += 1
                inner = parse_level(lv - 1, True)
                if pos >= len(tokens) or tokens[pos][0] != "]":
                    raise StoreSyntaxError("missing ']'", at)
                pos += 1
                items.append(inner)
            else:
                if lv > 1:
                    raise LevelMismatchError(
                        f"bare symbol {tok!r} at position {at}: a level-{lv} literal "
                        f"must consist of bracketed level-{lv - 1} literals"
                    )
                if is_bottom(tok):
                    raise StoreSyntaxError(f"bottom symbol {tok} not allowed inside a literal", at)
                pos += 1
                items.append(tok)
        return make_store(lv, items)

    result = parse_level(level, False)
    if pos < len(tokens):
        raise StoreSyntaxError(f"unexpected token {tokens[pos][0]!r}", tokens[pos][1])
    return result


def store_size(store: Store) -> int:
    """Total number of symbols in the store."""
    if store.level == 1:
        return len(store)
    return sum(store_size(item) for item in store.items_topdown())


def sequence_lengths(store: Store) -> dict:
    """Maximum sequence length occurring at each level of the store."""
    out: dict = {store.level: len(store)}
    if store.level > 1:
        for item in store.items_topdown():
            for lv, ln in sequence_lengths(item).items():
                if ln > out.get(lv, 0):
                    out[lv] = ln
    return out


def innermost_top(store: Store) -> Store:
    """The 1-store reached by descending along topmost elements; raises
    UndefinedOperation if an empty higher-level store blocks the descent."""
    s = store
    while s.level > 1:
        s = s.top_item()
    return s
