"""Counter word encodings and the reference predicates used to validate the
generated test games.

A 1-counter of width n is an n-letter word over {a1, b1} (a = 0, b = 1)
whose least significant bit is topmost.  A k-counter is a sequence of
(k-1)-counters: bit sigma_i over {ak, bk} sits directly below the
(k-1)-counter encoding the position i, positions descend as 0, 1, ... from
the top, and there are exactly Tower(k-1, n) of them.  Counters on a stack
are delimited by letters from the alphabet one level up.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .stores import Store, innermost_top, make_store, UndefinedOperation


class CounterError(Exception):
    pass


class OutOfRangeError(CounterError):
    """Value not representable by the requested counter."""


class MalformedCounterError(CounterError):
    """A word violates the counter structure; the message names the first
    violated constraint."""


class ResourceExceededError(CounterError):
    """A tower value exceeded the configured magnitude cap."""


@dataclass(frozen=True)
class CounterAlphabet:
    """The two-letter alphabet of one level: `zero` is a_i, `one` is b_i."""

    level: int
    zero: str
    one: str

    def contains(self, symbol: str) -> bool:
        return symbol == self.zero or symbol == self.one

    def bit(self, symbol: str) -> int:
        if symbol == self.zero:
            return 0
        if symbol == self.one:
            return 1
        raise ValueError(f"{symbol!r} not in level-{self.level} alphabet")

    def letter(self, bit: int) -> str:
        return self.one if bit else self.zero

    def toggle(self, symbol: str) -> str:
        return self.zero if symbol == self.one else self.one


def sigma(level: int) -> CounterAlphabet:
    return CounterAlphabet(level, f"a{level}", f"b{level}")


def symbol_level(symbol: str) -> Optional[int]:
    """Level i when the symbol is a_i or b_i, else None."""
    if len(symbol) >= 2 and symbol[0] in "ab" and symbol[1:].isdigit():
        return int(symbol[1:])
    return None


def ambient_alphabet(max_level: int) -> tuple:
    """All counter letters up to (and including) the given level."""
    out = []
    for i in range(1, max_level + 1):
        al = sigma(i)
        out.extend((al.zero, al.one))
    return tuple(out)


def tower(k: int, n: int, max_magnitude: int = 10**6) -> int:
    """Tower(0, n) = n and Tower(k+1, n) = 2^Tower(k, n)."""
    if k < 0 or n < 0:
        raise ValueError("tower arguments must be non-negative")
    value = n
    for _ in range(k):
        if value > 64 or 2**value > max_magnitude:
            raise ResourceExceededError(f"tower({k}, {n}) exceeds cap {max_magnitude}")
        value = 2**value
    if value > max_magnitude:
        raise ResourceExceededError(f"tower({k}, {n}) exceeds cap {max_magnitude}")
    return value


@dataclass(frozen=True)
class CounterSpec:
    """A counter family: level k and bit-width parameter n."""

    level: int
    n: int

    def __post_init__(self):
        if self.level < 1 or self.n < 1:
            raise ValueError("counter level and width must be >= 1")

    def bit_length(self) -> int:
        return self.n if self.level == 1 else tower(self.level - 1, self.n)

    def max_value(self) -> int:
        return 2 ** self.bit_length() - 1

    def word_length(self) -> int:
        if self.level == 1:
            return self.n
        sub = CounterSpec(self.level - 1, self.n).word_length()
        return self.bit_length() * (1 + sub)

    def down(self) -> "CounterSpec":
        if self.level == 1:
            raise ValueError("no level below 1")
        return CounterSpec(self.level - 1, self.n)


def encode_counter(spec: CounterSpec, value: int) -> list:
    """The counter word as symbols listed bottom-to-top (store literal
    order); the top of the word is the last list element."""
    if value < 0 or value > spec.max_value():
        raise OutOfRangeError(
            f"value {value} outside [0, {spec.max_value()}] for level-{spec.level} counters"
        )
    alpha = sigma(spec.level)
    if spec.level == 1:
        return [alpha.letter((value >> i) & 1) for i in range(spec.n - 1, -1, -1)]
    sub = spec.down()
    word = []
    for i in range(spec.bit_length() - 1, -1, -1):
        word.append(alpha.letter((value >> i) & 1))
        word.extend(encode_counter(sub, i))
    return word


def decode_counter(word, spec: CounterSpec) -> int:
    """Inverse of encode_counter; raises MalformedCounterError describing
    the first violated structural constraint."""
    word = list(word)
    alpha = sigma(spec.level)
    if spec.level == 1:
        if len(word) != spec.n:
            raise MalformedCounterError(f"1-counter must have {spec.n} letters, got {len(word)}")
        value = 0
        for offset, symbol in enumerate(word):
            if not alpha.contains(symbol):
                raise MalformedCounterError(f"letter {symbol!r} outside {alpha.zero}/{alpha.one}")
            value = (value << 1) | alpha.bit(symbol)
        return value
    sub = spec.down()
    sub_len = sub.word_length()
    count = spec.bit_length()
    if len(word) != spec.word_length():
        raise MalformedCounterError(
            f"level-{spec.level} counter must have {spec.word_length()} letters, got {len(word)}"
        )
    value = 0
    pos = len(word)
    for i in range(count):
        sub_word = word[pos - sub_len:pos]
        index = decode_counter(sub_word, sub)
        if index != i:
            raise MalformedCounterError(f"index sub-counter for position {i} reads {index}")
        pos -= sub_len
        bit_symbol = word[pos - 1]
        if not alpha.contains(bit_symbol):
            raise MalformedCounterError(f"bit letter {bit_symbol!r} outside {alpha.zero}/{alpha.one}")
        value |= alpha.bit(bit_symbol) << i
        pos -= 1
    return value


@dataclass(frozen=True)
class TestKind:
    """One of the named stack tests; `same_index` is set for Same(i)."""

    name: str  # counter | first | last | equal | succ | same
    same_index: Optional[int] = None

    def __str__(self) -> str:
        if self.name == "same":
            return f"same^{self.same_index}"
        return self.name


COUNTER = TestKind("counter")
FIRST = TestKind("first")
LAST = TestKind("last")
EQUAL = TestKind("equal")
SUCC = TestKind("succ")


def same(i: int) -> TestKind:
    return TestKind("same", i)


def required_store_level(kind: TestKind, spec: CounterSpec) -> int:
    """Store level a test runs on.  Level-1 tests run on 1-stores; equal and
    succ at level k need k-stores for the copy steps; counter-family tests
    at level k >= 3 inherit the requirement of their succ sub-tests; same^i
    needs the store the copies live in (plus one for its own push when
    i >= 2)."""
    k = spec.level
    if kind.name in ("counter", "first", "last"):
        if k <= 2:
            return 1
        return required_store_level(SUCC, CounterSpec(k - 1, spec.n))
    if kind.name in ("equal", "succ"):
        return 1 if k == 1 else k
    if kind.name == "same":
        i = kind.same_index
        if i is None or not 1 <= i < k:
            raise ValueError(f"same index must satisfy 1 <= i < {k}")
        return k if i == 1 else k - i + 2
    raise ValueError(f"unknown test kind {kind}")


def _try_decode(word, spec: CounterSpec) -> Optional[int]:
    try:
        return decode_counter(word, spec)
    except MalformedCounterError:
        return None


def _word_of(store: Store) -> Optional[list]:
    try:
        return innermost_top(store).items_bottomup()
    except UndefinedOperation:
        return None


def _suffix_counters(letters, spec: CounterSpec, count: int):
    """Parse, from the top of the word, `count` spec-counters separated and
    flanked by letters from the level above; returns the counter values
    (topmost first) or None."""
    flank = sigma(spec.level + 1)
    length = spec.word_length()
    pos = len(letters)
    if pos < 1 or not flank.contains(letters[pos - 1]):
        return None
    pos -= 1
    values = []
    for _ in range(count):
        if pos < length + 1:
            return None
        value = _try_decode(letters[pos - length:pos], spec)
        if value is None:
            return None
        pos -= length
        if not flank.contains(letters[pos - 1]):
            return None
        pos -= 1
        values.append(value)
    return values


def oracle(kind: TestKind, spec: CounterSpec, store: Store) -> bool:
    """Direct structural truth of a test predicate on a store, used as the
    reference the generated games are checked against.  Returns False on
    malformed stores."""
    if kind.name == "same":
        return _same_oracle(kind.same_index, spec, store)
    letters = _word_of(store)
    if letters is None:
        return False
    if kind.name in ("counter", "first", "last"):
        values = _suffix_counters(letters, spec, 1)
        if values is None:
            return False
        if kind.name == "first":
            return values[0] == 0
        if kind.name == "last":
            return values[0] == spec.max_value()
        return True
    if kind.name in ("equal", "succ"):
        values = _suffix_counters(letters, spec, 2)
        if values is None:
            return False
        w, v = values  # topmost first, then the deeper counter
        if kind.name == "equal":
            return v == w
        return v == w + 1  # the deeper counter is the successor of the top
    raise ValueError(f"unknown test kind {kind}")


def _split_copies(store: Store, copies_level: int):
    """Descend to the level holding the two copies and return (deep, top)."""
    s = store
    while s.level > copies_level:
        if s.is_empty():
            return None
        s = s.top_item()
    if len(s) < 2:
        return None
    items = s.items_bottomup()
    return items[-2], items[-1]


def _parse_flanked(store_or_letters, spec: CounterSpec):
    """Top of a copy: sigma' in the level-(i+1) alphabet, then an i-counter.
    Returns (flank, counter word) or None."""
    if isinstance(store_or_letters, Store):
        letters = _word_of(store_or_letters)
        if letters is None:
            return None
    else:
        letters = list(store_or_letters)
    flank = sigma(spec.level + 1)
    length = spec.word_length()
    if len(letters) < length + 1 or not flank.contains(letters[-1]):
        return None
    word = letters[-1 - length:-1]
    if _try_decode(word, spec) is None:
        return None
    return letters[-1], word


def _same_oracle(i: int, spec: CounterSpec, store: Store) -> bool:
    k = spec.level
    if i is None or not 1 <= i < k:
        return False
    copies = _split_copies(store, k - i + 1)
    if copies is None:
        return False
    deep, top_copy = copies
    sub = CounterSpec(i, spec.n)
    left = _parse_flanked(deep, sub)
    right = _parse_flanked(top_copy, sub)
    if left is None or right is None:
        return False
    return left[0] == right[0] and left[1] == right[1]


DEFAULT_PADDING = ("a1", "a1")


def seed_store(kind: TestKind, spec: CounterSpec, payload) -> Store:
    """A store of the level the test expects, whose top region carries the
    requested counters.  Payloads: a value for counter/first/last; a pair
    (deeper, top) for equal/succ; (deeper, top, flanks_equal) for same."""
    k = spec.level
    flank = sigma(k + 1)
    if kind.name in ("counter", "first", "last"):
        value = payload
        word = list(DEFAULT_PADDING) + [flank.zero] + encode_counter(spec, value) + [flank.one]
        return _wrap_word(word, required_store_level(kind, spec))
    if kind.name in ("equal", "succ"):
        v, w = payload  # v is the deeper counter, w the topmost
        word = (
            list(DEFAULT_PADDING)
            + [flank.zero]
            + encode_counter(spec, v)
            + [flank.zero]
            + encode_counter(spec, w)
            + [flank.one]
        )
        return _wrap_word(word, required_store_level(kind, spec))
    if kind.name == "same":
        i = kind.same_index
        if i is None or not 1 <= i < k:
            raise OutOfRangeError(f"same index must satisfy 1 <= i < {k}")
        v, w, flanks_equal = payload
        sub = CounterSpec(i, spec.n)
        sub_flank = sigma(i + 1)
        left_word = list(DEFAULT_PADDING) + [sub_flank.zero] + encode_counter(sub, v) + [sub_flank.zero]
        right_top = sub_flank.zero if flanks_equal else sub_flank.one
        right_word = list(DEFAULT_PADDING) + [sub_flank.zero] + encode_counter(sub, w) + [right_top]
        copy_level = k - i  # each copy is a (k-i)-store
        deep = _wrap_word(left_word, copy_level)
        top_copy = _wrap_word(right_word, copy_level)
        holder = make_store(copy_level + 1, [deep, top_copy])
        ambient = required_store_level(kind, spec)
        while holder.level < ambient:
            holder = make_store(holder.level + 1, [holder])
        return holder
    raise ValueError(f"unknown test kind {kind}")


def _wrap_word(word: list, level: int) -> Store:
    store = make_store(1, word)
    while store.level < level:
        store = make_store(store.level + 1, [store])
    return store


def corrupt_innermost(store: Store, index_from_top: int) -> Store:
    """Toggle one symbol of the innermost top 1-store within its two-letter
    alphabet (index 0 is the topmost symbol)."""
    def rebuild(s: Store) -> Store:
        if s.level == 1:
            items = s.items_bottomup()
            pos = len(items) - 1 - index_from_top
            if pos < 0:
                raise OutOfRangeError(f"no symbol at index {index_from_top}")
            level = symbol_level(items[pos])
            if level is None:
                raise OutOfRangeError(f"symbol {items[pos]!r} has no counter alphabet")
            items[pos] = sigma(level).toggle(items[pos])
            return make_store(1, items)
        items = s.items_bottomup()
        if not items:
            raise OutOfRangeError("empty store has no symbols")
        items[-1] = rebuild(items[-1])
        return make_store(s.level, items)

    return rebuild(store)
