"""Higher-order pushdown systems, reachability games on their configuration
graphs, counter gadget games, and hardness-reduction generators."""

from .stores import (
    Pop,
    Push,
    Push1,
    SKIP,
    Skip,
    Store,
    StoreOp,
    apply,
    make_store,
    parse_store,
    render_store,
    top,
)
from .systems import AHpda, Config, Hpds, Rule, enabled, step, successors, validate
from .games import (
    Arena,
    Bounds,
    GameStructure,
    Solution,
    attractor,
    check_strategy,
    explore,
    play,
    solve,
)

__all__ = [
    "AHpda",
    "Arena",
    "Bounds",
    "Config",
    "GameStructure",
    "Hpds",
    "Pop",
    "Push",
    "Push1",
    "Rule",
    "SKIP",
    "Skip",
    "Solution",
    "Store",
    "StoreOp",
    "apply",
    "attractor",
    "check_strategy",
    "enabled",
    "explore",
    "make_store",
    "parse_store",
    "play",
    "render_store",
    "solve",
    "step",
    "successors",
    "top",
    "validate",
]
