"""Reachability games on HPDS configuration graphs.

The arena is the bounded breadth-first closure of the configuration graph
from the initial configuration.  Goal vertices are terminal: the play stops
as soon as the goal set is reached.  A player who must move from a dead end
loses.  Successor stores that violate the exploration bounds are summarized
by a single out-of-bounds vertex; solving then runs two attractor analyses
(out-of-bounds pessimistically lost / optimistically won for player 0) so
every definite verdict is sound for the unbounded game.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .stores import Store, render_store
from .systems import Config, Hpds, enabled, step, successor_edges

W0 = "W0"
W1 = "W1"
UNKNOWN = "UNKNOWN"


class StrategyUndefinedError(Exception):
    """A playout consulted a strategy at a vertex it does not cover."""


@dataclass(eq=False)
class GameStructure:
    """An HPDS with a state ownership partition, an initial configuration,
    and a goal set given by control states."""

    hpds: Hpds
    owner: dict
    initial: Config
    goal: frozenset

    def __post_init__(self):
        self.goal = frozenset(self.goal)
        missing = [s for s in self.hpds.states if s not in self.owner]
        if missing:
            raise ValueError(f"owner map not total; missing {missing[:5]}")
        unknown = [s for s in self.goal if s not in self.hpds._state_set]
        if unknown:
            raise ValueError(f"goal states not declared: {unknown[:5]}")


@dataclass(frozen=True)
class Bounds:
    """Cutoffs that finitize the arena.  `max_len` limits the sequence
    length at each store level (missing level = unlimited)."""

    max_len: dict = field(default_factory=dict)
    max_configs: int = 200_000
    max_depth: Optional[int] = None

    def __post_init__(self):
        for lv, ln in self.max_len.items():
            if ln < 1:
                raise ValueError(f"max_len[{lv}] must be positive")
        if self.max_configs < 1:
            raise ValueError("max_configs must be positive")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be positive")


def store_within(store: Store, max_len: dict) -> bool:
    lim = max_len.get(store.level)
    if lim is not None and len(store) > lim:
        return False
    if store.level > 1:
        for item in store.items_topdown():
            if not store_within(item, max_len):
                return False
    return True


@dataclass(eq=False)
class Arena:
    """Explicit bounded arena.  Vertex 0 is the initial configuration.
    `oob` is the id of the out-of-bounds summary vertex (-1 if absent);
    `unresolved` contains `oob` plus any truncation-frontier vertices."""

    game: GameStructure
    configs: list
    index: dict
    edges: list
    owner: list
    is_goal: list
    oob: int
    unresolved: set
    truncated: bool

    @property
    def explored(self) -> int:
        return len(self.configs) - (1 if self.oob >= 0 else 0)


_OOB_CONFIG = None  # placeholder config object for the out-of-bounds vertex


def explore(game: GameStructure, bounds: Bounds) -> Arena:
    """Bounded BFS closure of the configuration graph from the initial
    configuration.  Deterministic: successors in rule declaration order."""
    hpds = game.hpds
    configs = [game.initial]
    index = {game.initial: 0}
    edges: list = [None]
    owner = [game.owner[game.initial.state]]
    is_goal = [game.initial.state in game.goal]
    depth = [0]
    oob = -1
    unresolved: set = set()
    truncated = False

    if not store_within(game.initial.store, bounds.max_len):
        unresolved.add(0)
        edges[0] = []
        return Arena(game, configs, index, edges, owner, is_goal, oob, unresolved, truncated)

    queue = deque([0])
    while queue:
        vid = queue.popleft()
        config = configs[vid]
        if is_goal[vid]:
            edges[vid] = []
            continue
        if bounds.max_depth is not None and depth[vid] >= bounds.max_depth:
            unresolved.add(vid)
            edges[vid] = []
            truncated = True
            continue
        out = []
        for rule, succ in successor_edges(hpds, config):
            if not store_within(succ.store, bounds.max_len):
                if oob < 0:
                    oob = len(configs)
                    configs.append(_OOB_CONFIG)
                    edges.append([])
                    owner.append(0)
                    is_goal.append(False)
                    depth.append(depth[vid] + 1)
                    unresolved.add(oob)
                out.append((rule, oob))
                continue
            tid = index.get(succ)
            if tid is None:
                if len(index) >= bounds.max_configs:
                    truncated = True
                    if oob < 0:
                        oob = len(configs)
                        configs.append(_OOB_CONFIG)
                        edges.append([])
                        owner.append(0)
                        is_goal.append(False)
                        depth.append(depth[vid] + 1)
                        unresolved.add(oob)
                    out.append((rule, oob))
                    continue
                tid = len(configs)
                index[succ] = tid
                configs.append(succ)
                edges.append(None)
                owner.append(game.owner[succ.state])
                is_goal.append(succ.state in game.goal)
                depth.append(depth[vid] + 1)
                queue.append(tid)
            out.append((rule, tid))
        edges[vid] = out

    for vid, out in enumerate(edges):
        if out is None:  # queued but never expanded (should not happen with this loop)
            edges[vid] = []
            unresolved.add(vid)
    return Arena(game, configs, index, edges, owner, is_goal, oob, unresolved, truncated)


def _attract(arena: Arena, player: int, extra_base=()):
    """Least fixpoint of the forced-reachability operator for `player`.
    Base: for player 0 the goal vertices, for player 1 nothing, plus
    opponent-owned dead ends, plus `extra_base`.  Returns (in_set, rank)."""
    n = len(arena.configs)
    preds: list = [[] for _ in range(n)]
    out_count = [0] * n
    for vid, out in enumerate(arena.edges):
        out_count[vid] = len(out)
        for _, tid in out:
            preds[tid].append(vid)

    in_set = [False] * n
    rank = [-1] * n
    queue = deque()

    def add(vid, r):
        if not in_set[vid]:
            in_set[vid] = True
            rank[vid] = r
            queue.append(vid)

    for vid in extra_base:
        add(vid, 0)
    for vid in range(n):
        if vid in arena.unresolved:
            continue
        if player == 0 and arena.is_goal[vid]:
            add(vid, 0)
        elif not arena.edges[vid] and not arena.is_goal[vid] and arena.owner[vid] != player:
            add(vid, 0)

    remaining = out_count[:]
    while queue:
        vid = queue.popleft()
        for pred in preds[vid]:
            if in_set[pred] or pred in arena.unresolved or arena.is_goal[pred]:
                # goal vertices are terminal; they never attract through edges
                # (they have none) and are classified by the base only.
                continue
            if arena.owner[pred] == player:
                add(pred, rank[vid] + 1)
            else:
                remaining[pred] -= 1
                if remaining[pred] == 0:
                    add(pred, rank[vid] + 1)
    return in_set, rank


def attractor(arena: Arena, player: int) -> set:
    """The set of vertices from which `player` can force reaching his base:
    the goal set for player 0, opponent dead ends for either player.
    Unresolved (out-of-bounds) vertices never join the attractor."""
    in_set, _ = _attract(arena, player)
    return {vid for vid in range(len(arena.configs)) if in_set[vid]}


@dataclass(eq=False)
class Solution:
    """Three-valued bounded solution with positional strategy certificates."""

    arena: Arena
    classification: dict
    strategy0: dict
    strategy1: dict
    explored: int
    iterations: int
    truncated: bool

    @property
    def winner(self) -> str:
        return self.classification[self.arena.game.initial]

    def counts(self) -> dict:
        out = {W0: 0, W1: 0, UNKNOWN: 0}
        for verdict in self.classification.values():
            out[verdict] += 1
        return out


def solve(game: GameStructure, bounds: Bounds) -> Solution:
    """Explore, then classify every explored configuration as W0 (player 0
    forces the goal even if everything beyond the bounds favours player 1),
    W1 (player 1 wins even if everything beyond favours player 0), or
    UNKNOWN.  Definite answers are sound for the unbounded game."""
    arena = explore(game, bounds)
    pess, pess_rank = _attract(arena, 0)
    opt, _ = _attract(arena, 0, extra_base=sorted(arena.unresolved))

    classification = {}
    for vid, config in enumerate(arena.configs):
        if vid == arena.oob:
            continue
        if vid in arena.unresolved:
            classification[config] = UNKNOWN
            continue
        if pess[vid]:
            classification[config] = W0
        elif not opt[vid]:
            classification[config] = W1
        else:
            classification[config] = UNKNOWN

    strategy0 = {}
    strategy1 = {}
    for vid, config in enumerate(arena.configs):
        if vid in arena.unresolved or arena.is_goal[vid]:
            continue
        if arena.owner[vid] == 0 and pess[vid]:
            best = None
            for decl, (rule, tid) in enumerate(arena.edges[vid]):
                if tid in arena.unresolved or not pess[tid]:
                    continue
                if pess_rank[tid] < pess_rank[vid]:
                    key = (pess_rank[tid], decl)
                    if best is None or key < best[0]:
                        best = (key, rule)
            if best is not None:
                strategy0[config] = best[1]
        elif arena.owner[vid] == 1 and not opt[vid]:
            for rule, tid in arena.edges[vid]:
                if tid not in arena.unresolved and not opt[tid]:
                    strategy1[config] = rule
                    break

    iterations = max((r for r in pess_rank if r >= 0), default=0) + 1
    return Solution(
        arena=arena,
        classification=classification,
        strategy0=strategy0,
        strategy1=strategy1,
        explored=arena.explored,
        iterations=iterations,
        truncated=arena.truncated,
    )


def extract_strategy(solution: Solution, player: int) -> dict:
    """The positional strategy computed by solve for the given player."""
    return solution.strategy0 if player == 0 else solution.strategy1


@dataclass(frozen=True)
class PlayOutcome:
    kind: str  # "reached" | "deadend" | "cutoff"
    loser: Optional[int] = None
    steps: int = 0


def play(game: GameStructure, strategy0: dict, strategy1: dict, max_steps: int) -> PlayOutcome:
    """Deterministic playout of two positional strategies."""
    config = game.initial
    for n in range(max_steps):
        if config.state in game.goal:
            return PlayOutcome("reached", None, n)
        mover = game.owner[config.state]
        strategy = strategy0 if mover == 0 else strategy1
        rule = strategy.get(config)
        if rule is None:
            if not enabled(game.hpds, config):
                return PlayOutcome("deadend", mover, n)
            raise StrategyUndefinedError(
                f"player {mover} strategy undefined at {config.state} / "
                f"{render_store(config.store)!r}"
            )
        config = step(game.hpds, config, rule)
    if config.state in game.goal:
        return PlayOutcome("reached", None, max_steps)
    return PlayOutcome("cutoff", None, max_steps)


def check_strategy(game: GameStructure, strategy: dict, bounds: Bounds) -> bool:
    """True iff every player-1 counterplay against `strategy` (player 0)
    stays within bounds and reaches the goal set: no lassos, no player-0
    dead ends, no out-of-bounds escapes."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict = {}

    def succs(config: Config):
        if game.owner[config.state] == 0:
            rule = strategy.get(config)
            if rule is None:
                return None  # player 0 stuck or strategy missing: not winning
            return [step(game.hpds, config, rule)]
        return [succ for _, succ in successor_edges(game.hpds, config)]

    stack = [(game.initial, None)]
    while stack:
        config, it = stack[-1]
        if it is None:
            if len(color) > bounds.max_configs:
                return False
            if color.get(config) == BLACK:
                stack.pop()
                continue
            if color.get(config) == GRAY:
                return False  # lasso: the goal is never reached on this loop
            if not store_within(config.store, bounds.max_len):
                return False
            if config.state in game.goal:
                color[config] = BLACK
                stack.pop()
                continue
            nxt = succs(config)
            if nxt is None:
                return False
            if not nxt:
                if game.owner[config.state] == 0:
                    return False  # player 0 dead end
                color[config] = BLACK  # player 1 stuck: he loses, fine
                stack.pop()
                continue
            color[config] = GRAY
            stack[-1] = (config, iter(nxt))
        else:
            nxt = next(it, None)
            if nxt is None:
                color[config] = BLACK
                stack.pop()
            else:
                if color.get(nxt) == GRAY:
                    return False
                if color.get(nxt) != BLACK:
                    stack.append((nxt, None))
    return True


def solution_to_json(solution: Solution, emit_strategy: bool = False) -> dict:
    """JSON-ready summary: winner, classification counts, exploration stats,
    optionally the player-0 strategy."""
    winner = solution.winner
    out = {
        "winner": {"W0": "P0", "W1": "P1", "UNKNOWN": "unknown"}[winner],
        "classification_counts": solution.counts(),
        "explored": solution.explored,
        "truncated": solution.truncated,
    }
    if emit_strategy:
        moves = []
        for config, rule in sorted(
            solution.strategy0.items(), key=lambda kv: (kv[0].state, render_store(kv[0].store))
        ):
            from .stores import format_op

            moves.append(
                {
                    "state": config.state,
                    "store": render_store(config.store),
                    "rule": f"{rule.src} {rule.guard} -> {rule.dst} {format_op(rule.op)}",
                }
            )
        out["strategy"] = moves
    return out


def arena_to_dot(arena: Arena) -> str:
    """Deterministic DOT dump: vertex label = state plus rendered store,
    shape by owner (player 0 ellipse, player 1 box), goals double-circled."""
    lines = ["digraph arena {"]
    for vid, config in enumerate(arena.configs):
        if vid == arena.oob:
            lines.append(f'  v{vid} [label="out-of-bounds", shape=octagon, style=dashed];')
            continue
        label = f"{config.state}\\n{render_store(config.store)}"
        shape = "ellipse" if arena.owner[vid] == 0 else "box"
        extra = ", peripheries=2" if arena.is_goal[vid] else ""
        lines.append(f'  v{vid} [label="{label}", shape={shape}{extra}];')
    from .stores import format_op

    for vid, out in enumerate(arena.edges):
        for rule, tid in out:
            lines.append(f'  v{vid} -> v{tid} [label="{format_op(rule.op)}"];')
    lines.append("}")
    return "\n".join(lines)
