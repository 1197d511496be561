"""Line-oriented text format for systems, games, and alternating HPDA.

One declaration per line, '#' starts a comment:

    hpds level=K
    alphabet: g1 g2 ...
    state p [owner=0|1] [accepting]
    rule p g -> q push1 g' | push J | pop J | skip [label=a|eps]
    init: p <store literal>
    goal: q1 q2 ...
    input_alphabet: a b ...

Owner and goal lines are consumed by the game solver; label and
input_alphabet lines by the reductions.  A store literal declares its own
level through its bracket depth ("a b" is a 1-store, "[a][b c]" a 2-store);
an explicit "level=N" token before the literal overrides the inference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .games import GameStructure
from .stores import (
    Pop,
    Push,
    Push1,
    SKIP,
    Store,
    StoreOp,
    format_op,
    parse_store,
    render_store,
)
from .systems import AHpda, Config, Hpds, Rule


class FormatError(Exception):
    def __init__(self, message: str, line_no: Optional[int] = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass
class SystemFile:
    """Parsed declarations; build concrete objects with the to_* helpers."""

    level: int = 0
    alphabet: list = field(default_factory=list)
    states: list = field(default_factory=list)
    owner: dict = field(default_factory=dict)
    accepting: list = field(default_factory=list)
    initial_flag: list = field(default_factory=list)
    rules: list = field(default_factory=list)
    init: Optional[tuple] = None  # (state, Store)
    goal: list = field(default_factory=list)
    input_alphabet: Optional[list] = None

    def to_hpds(self) -> Hpds:
        return Hpds(self.level, tuple(self.states), tuple(self.alphabet), tuple(self.rules))

    def to_game(self) -> GameStructure:
        if self.init is None:
            raise FormatError("game file needs an init: line")
        missing = [s for s in self.states if s not in self.owner]
        if missing:
            raise FormatError(f"states missing owner=: {missing[:5]}")
        state, store = self.init
        return GameStructure(
            hpds=self.to_hpds(),
            owner=dict(self.owner),
            initial=Config(state, store),
            goal=frozenset(self.goal),
        )

    def to_ahpda(self) -> AHpda:
        if self.input_alphabet is None:
            raise FormatError("AHPDA file needs an input_alphabet: line")
        if self.init is None:
            raise FormatError("AHPDA file needs an init: line")
        state, store = self.init
        existential = {s for s in self.states if self.owner.get(s, 0) == 0}
        return AHpda(
            hpds=self.to_hpds(),
            input_alphabet=tuple(self.input_alphabet),
            existential=frozenset(existential),
            initial_state=state,
            initial_store=store,
            accepting=frozenset(self.accepting),
        )


def parse_op_tokens(tokens: list, line_no: Optional[int] = None) -> StoreOp:
    if not tokens:
        raise FormatError("missing store operation", line_no)
    kind = tokens[0]
    if kind == "skip":
        if len(tokens) != 1:
            raise FormatError("skip takes no argument", line_no)
        return SKIP
    if kind == "push1":
        if len(tokens) != 2:
            raise FormatError("push1 needs a symbol", line_no)
        return Push1(tokens[1])
    if kind in ("push", "pop"):
        if len(tokens) != 2 or not tokens[1].isdigit():
            raise FormatError(f"{kind} needs a numeric level", line_no)
        level = int(tokens[1])
        return Push(level) if kind == "push" else Pop(level)
    raise FormatError(f"unknown operation {kind!r}", line_no)


def literal_level(text: str) -> int:
    """Store level implied by a literal's bracket depth."""
    depth = 0
    best = 0
    for c in text:
        if c == "[":
            depth += 1
            best = max(best, depth)
        elif c == "]":
            depth -= 1
    return best + 1


def _strip_comment(line: str) -> str:
    pos = line.find("#")
    return line if pos < 0 else line[:pos]


def parse_system(text: str) -> SystemFile:
    sf = SystemFile()
    seen_header = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "hpds":
            if seen_header:
                raise FormatError("duplicate hpds header", line_no)
            seen_header = True
            if len(tokens) != 2 or not tokens[1].startswith("level="):
                raise FormatError("expected: hpds level=K", line_no)
            try:
                sf.level = int(tokens[1].split("=", 1)[1])
            except ValueError:
                raise FormatError("level must be an integer", line_no) from None
            continue
        if not seen_header:
            raise FormatError("file must start with an hpds level=K line", line_no)
        if head == "alphabet:":
            sf.alphabet.extend(tokens[1:])
        elif head == "state":
            if len(tokens) < 2:
                raise FormatError("state line needs a name", line_no)
            name = tokens[1]
            sf.states.append(name)
            for flag in tokens[2:]:
                if flag in ("owner=0", "owner=1"):
                    sf.owner[name] = int(flag[-1])
                elif flag == "accepting":
                    sf.accepting.append(name)
                elif flag == "initial":
                    sf.initial_flag.append(name)
                else:
                    raise FormatError(f"unknown state flag {flag!r}", line_no)
        elif head == "rule":
            if "->" not in tokens:
                raise FormatError("rule line needs '->'", line_no)
            arrow = tokens.index("->")
            lhs = tokens[1:arrow]
            rhs = tokens[arrow + 1:]
            if len(lhs) != 2 or not rhs:
                raise FormatError("expected: rule p g -> q <op> [label=a]", line_no)
            label = None
            if rhs and rhs[-1].startswith("label="):
                value = rhs[-1].split("=", 1)[1]
                label = None if value == "eps" else value
                rhs = rhs[:-1]
                if value != "eps" and not value:
                    raise FormatError("empty label", line_no)
            if len(rhs) < 2:
                raise FormatError("rule line needs a target state and an op", line_no)
            op = parse_op_tokens(rhs[1:], line_no)
            sf.rules.append(Rule(lhs[0], lhs[1], rhs[0], op, label))
        elif head == "init:":
            if len(tokens) < 2:
                raise FormatError("init: needs a state", line_no)
            state = tokens[1]
            rest = tokens[2:]
            level = None
            if rest and rest[0].startswith("level="):
                level = int(rest[0].split("=", 1)[1])
                rest = rest[1:]
            literal = " ".join(rest)
            if level is None:
                level = literal_level(literal)
            store = parse_store(literal, level)
            sf.init = (state, store)
        elif head == "goal:":
            sf.goal.extend(tokens[1:])
        elif head == "input_alphabet:":
            if sf.input_alphabet is None:
                sf.input_alphabet = []
            sf.input_alphabet.extend(tokens[1:])
        else:
            raise FormatError(f"unknown declaration {head!r}", line_no)
    if not seen_header:
        raise FormatError("empty file: missing hpds header")
    return sf


def _format_rule(rule: Rule) -> str:
    text = f"rule {rule.src} {rule.guard} -> {rule.dst} {format_op(rule.op)}"
    if rule.label is not None:
        text += f" label={rule.label}"
    return text


def format_game(game: GameStructure, header_comments=()) -> str:
    """Serialize a game structure; parse_system + to_game round-trips it."""
    lines = [f"# {c}" for c in header_comments]
    hpds = game.hpds
    lines.append(f"hpds level={hpds.level}")
    if hpds.alphabet:
        lines.append("alphabet: " + " ".join(hpds.alphabet))
    for state in hpds.states:
        flags = [f"owner={game.owner[state]}"]
        if state in game.goal:
            flags.append("accepting")
        lines.append(f"state {state} " + " ".join(flags))
    for rule in hpds.rules:
        lines.append(_format_rule(rule))
    store = game.initial.store
    level_part = f"level={store.level} " if store.is_empty() and store.level > 1 else ""
    lines.append(f"init: {game.initial.state} {level_part}{render_store(store)}".rstrip())
    if game.goal:
        lines.append("goal: " + " ".join(sorted(game.goal)))
    return "\n".join(lines) + "\n"


def parse_game(text: str) -> GameStructure:
    sf = parse_system(text)
    if not sf.goal and sf.accepting:
        sf.goal = list(sf.accepting)
    return sf.to_game()


def format_ahpda(ahpda: AHpda, header_comments=()) -> str:
    lines = [f"# {c}" for c in header_comments]
    hpds = ahpda.hpds
    lines.append(f"hpds level={hpds.level}")
    if hpds.alphabet:
        lines.append("alphabet: " + " ".join(hpds.alphabet))
    lines.append("input_alphabet: " + " ".join(ahpda.input_alphabet))
    for state in hpds.states:
        flags = [f"owner={0 if state in ahpda.existential else 1}"]
        if state in ahpda.accepting:
            flags.append("accepting")
        if state == ahpda.initial_state:
            flags.append("initial")
        lines.append(f"state {state} " + " ".join(flags))
    for rule in hpds.rules:
        text = f"rule {rule.src} {rule.guard} -> {rule.dst} {format_op(rule.op)}"
        text += f" label={rule.label if rule.label is not None else 'eps'}"
        lines.append(text)
    store = ahpda.initial_store
    level_part = f"level={store.level} " if store.is_empty() and store.level > 1 else ""
    lines.append(f"init: {ahpda.initial_state} {level_part}{render_store(store)}".rstrip())
    return "\n".join(lines) + "\n"


def parse_ahpda(text: str) -> AHpda:
    sf = parse_system(text)
    if sf.init is None and sf.initial_flag:
        from .stores import make_store

        sf.init = (sf.initial_flag[0], make_store(1))
    return sf.to_ahpda()
