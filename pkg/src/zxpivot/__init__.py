"""zxpivot: a ZX-calculus rewriting engine with graph-state pivoting.

The package provides exact-phase diagrams, a dense semantic oracle with two
counter-model interpretations, a site-addressed rewrite rule library with
scripted derivations, graph-state operator identities, and an angle-free
normal form that decides equality of real stabilizer diagram states.
"""

from .diagram import Diagram, VertexKind, are_isomorphic
from .errors import (
    ArityMismatchError,
    CheckFailedError,
    MalformedDiagramError,
    PatternError,
    RuleNotInTheoryError,
    StaleSiteError,
    ZeroStateError,
    ZXError,
)
from .graphlike import GraphLikeView, to_graph_like
from .graphstate import (
    LocalOpWord,
    SimpleGraph,
    apply_local_ops,
    check_pivot_property,
    check_stabilizer,
    check_vdn,
    graph_state_diagram,
    local_complement,
    pivot,
)
from .normalform import (
    Decision,
    GsRlcDiagram,
    RealCliffordOp,
    decide_equal,
    decode_angle_free,
    encode_angle_free,
    is_angle_free,
    is_real,
    reduce,
    simplify_pair,
    to_gs_rlc,
)
from .phase import Phase
from .semantics import (
    EqMode,
    EqResult,
    diagrams_equal,
    eq_up_to,
    flatten,
    interpret,
    interpret_zero,
)

__all__ = [
    "Diagram",
    "VertexKind",
    "Phase",
    "EqMode",
    "EqResult",
    "interpret",
    "interpret_zero",
    "flatten",
    "eq_up_to",
    "diagrams_equal",
    "are_isomorphic",
    "GraphLikeView",
    "to_graph_like",
    "SimpleGraph",
    "LocalOpWord",
    "graph_state_diagram",
    "apply_local_ops",
    "local_complement",
    "pivot",
    "check_stabilizer",
    "check_vdn",
    "check_pivot_property",
    "GsRlcDiagram",
    "RealCliffordOp",
    "Decision",
    "decide_equal",
    "to_gs_rlc",
    "reduce",
    "simplify_pair",
    "is_real",
    "is_angle_free",
    "encode_angle_free",
    "decode_angle_free",
    "ZXError",
    "MalformedDiagramError",
    "ArityMismatchError",
    "StaleSiteError",
    "RuleNotInTheoryError",
    "PatternError",
    "ZeroStateError",
    "CheckFailedError",
]

__version__ = "0.1.0"
