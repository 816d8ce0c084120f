"""Site-addressed rewriting: the axiom library, scripted derivations,
soundness verification, and replayable traces."""

from .derive import (
    apply_equality,
    derive_hl_from_eu,
    derive_hl_from_triangle_pivot,
    derive_pivot,
    derive_pivot_no_common,
    eliminate_color,
    expand_bialgebra_pair,
    fuse_single_color,
    generalized_bialgebra,
    get_equality,
    h_loop_diagram,
    pi_rotation_diagram,
    read_graph_state_diagram,
    register_equality,
    replay_trace,
    to_simple_bipartite,
    triangle_pivot_equality,
)
from .rules import (
    Direction,
    MatchSite,
    RuleId,
    TheoryLevel,
    apply_rule,
    find_matches,
    insert_identity_spider,
    rule_available,
    split_spider,
)
from .trace import RewriteTrace, Tracer, TraceStep
from .verify import RuleReport, rule_instances, verify_axioms, verify_rule

__all__ = [
    "Direction",
    "MatchSite",
    "RuleId",
    "TheoryLevel",
    "RewriteTrace",
    "Tracer",
    "TraceStep",
    "RuleReport",
    "apply_rule",
    "apply_equality",
    "find_matches",
    "rule_available",
    "rule_instances",
    "verify_axioms",
    "verify_rule",
    "generalized_bialgebra",
    "expand_bialgebra_pair",
    "split_spider",
    "insert_identity_spider",
    "derive_pivot",
    "derive_pivot_no_common",
    "derive_hl_from_eu",
    "derive_hl_from_triangle_pivot",
    "register_equality",
    "get_equality",
    "replay_trace",
    "read_graph_state_diagram",
    "h_loop_diagram",
    "pi_rotation_diagram",
    "triangle_pivot_equality",
    "fuse_single_color",
    "to_simple_bipartite",
    "eliminate_color",
]
