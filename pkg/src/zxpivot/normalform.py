"""The angle-free normal form for real stabilizer diagram states.

Any diagram state whose phases live in {0, pi} reduces to a graph state
with one real local Clifford per output.  Reduction restricts the ops to
{I, Z, H, HZ} with no two adjacent H-carriers; a pair of reduced forms is
then aligned so that structural identity decides semantic equality.  Every
stage preserves the interpretation up to a nonzero scalar (oracle-checked
in checked mode).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .diagram import Diagram
from .errors import CheckFailedError, ZeroStateError, ZXError
from .graphlike import to_graph_like
from .graphstate import LocalOpWord, SimpleGraph, apply_local_ops, graph_state_diagram
from .phase import Phase
from .semantics import DEFAULT_TOL, EqMode, eq_up_to, interpret

_SQ2 = np.sqrt(2.0)
_H_MAT = np.array([[1, 1], [1, -1]], dtype=complex) / _SQ2
_Z_MAT = np.diag([1.0, -1.0]).astype(complex)
_X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class RealCliffordOp:
    """A single-qubit real Clifford up to sign, as H^h Z^z X^x."""

    x: int = 0
    z: int = 0
    h: int = 0

    def matrix(self) -> np.ndarray:
        m = np.eye(2, dtype=complex)
        if self.x:
            m = _X_MAT @ m
        if self.z:
            m = _Z_MAT @ m
        if self.h:
            m = _H_MAT @ m
        return m

    def then(self, later: "RealCliffordOp") -> "RealCliffordOp":
        """The op followed by ``later`` (i.e. later.matrix() @ self.matrix())."""
        return RealCliffordOp.from_matrix(later.matrix() @ self.matrix())

    def times_z_inner(self) -> "RealCliffordOp":
        """Right-multiply by Z (Z applied first)."""
        return RealCliffordOp.from_matrix(self.matrix() @ _Z_MAT)

    def times_h_inner(self) -> "RealCliffordOp":
        return RealCliffordOp.from_matrix(self.matrix() @ _H_MAT)

    @property
    def name(self) -> str:
        body = ("H" if self.h else "") + ("Z" if self.z else "") + ("X" if self.x else "")
        return body or "I"

    @staticmethod
    def from_name(name: str) -> "RealCliffordOp":
        """Parse product notation: leftmost factor applied last."""
        if name == "I":
            return RealCliffordOp()
        if not name or set(name) - set("HZX"):
            raise ZXError(f"unknown real Clifford name {name!r}")
        op = RealCliffordOp()
        for ch in reversed(name):
            gen = {"H": RealCliffordOp(h=1), "Z": RealCliffordOp(z=1), "X": RealCliffordOp(x=1)}[ch]
            op = op.then(gen)
        return op

    @staticmethod
    def from_matrix(m: np.ndarray) -> "RealCliffordOp":
        for x in (0, 1):
            for z in (0, 1):
                for h in (0, 1):
                    cand = RealCliffordOp(x, z, h).matrix()
                    if np.allclose(m, cand, atol=1e-9) or np.allclose(m, -cand, atol=1e-9):
                        return RealCliffordOp(x, z, h)
        raise ZXError("matrix is not a real Clifford up to sign")

    def word(self) -> tuple[str, ...]:
        """Generator sequence in application order (first applied first)."""
        out: list[str] = []
        if self.x:
            out.append("X")
        if self.z:
            out.append("Z")
        if self.h:
            out.append("H")
        return tuple(out)


IDENTITY_OP = RealCliffordOp()


@dataclass
class GsRlcDiagram:
    """A graph state with one real local Clifford per output qubit."""

    graph: SimpleGraph
    ops: dict[str, RealCliffordOp] = field(default_factory=dict)

    def __post_init__(self):
        for v in self.graph.sorted_vertices():
            self.ops.setdefault(v, IDENTITY_OP)
        extra = set(self.ops) - self.graph.vertices
        if extra:
            raise ZXError(f"ops on unknown vertices {sorted(extra)}")

    @property
    def reduced(self) -> bool:
        if any(op.x for op in self.ops.values()):
            return False
        for e in self.graph.edges:
            a, b = sorted(e)
            if self.ops[a].h and self.ops[b].h:
                return False
        return True

    def h_carriers(self) -> set[str]:
        return {v for v, op in self.ops.items() if op.h}

    def z_carriers(self) -> set[str]:
        return {v for v, op in self.ops.items() if op.z}

    def to_diagram(self) -> Diagram:
        labels = self.graph.sorted_vertices()
        word = LocalOpWord({v: op.word() for v, op in self.ops.items() if op.word()})
        return apply_local_ops(graph_state_diagram(self.graph), word, labels)

    def to_dict(self) -> dict:
        return {
            "graph": self.graph.to_dict(),
            "ops": {v: op.name for v, op in sorted(self.ops.items())},
            "reduced": self.reduced,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @staticmethod
    def from_dict(data: dict) -> "GsRlcDiagram":
        graph = SimpleGraph.from_dict(data["graph"])
        ops = {
            v: RealCliffordOp.from_name(name) for v, name in data.get("ops", {}).items()
        }
        return GsRlcDiagram(graph, ops)

    @staticmethod
    def from_json(text: str) -> "GsRlcDiagram":
        return GsRlcDiagram.from_dict(json.loads(text))

    def same_as(self, other: "GsRlcDiagram") -> bool:
        return self.graph == other.graph and self.ops == other.ops


# -- angle-free predicates and the pi <-> loop encoding -----------------------


def is_angle_free(d: Diagram) -> bool:
    """True when every spider phase is zero (pi content must be carried by
    H self-loops)."""
    return all(
        k.phase.is_zero() for k in d.vertices.values() if k.is_spider()
    )


def is_real(d: Diagram) -> bool:
    """True when every spider phase is 0 or pi."""
    return all(k.phase.is_real() for k in d.vertices.values() if k.is_spider())


def encode_angle_free(d: Diagram) -> Diagram:
    """Replace every pi phase by an H self-loop on the same spider."""
    if not is_real(d):
        raise ZXError("encoding requires phases in {0, pi}")
    ed = d.edit()
    for v, k in sorted(d.vertices.items()):
        if k.is_spider() and k.phase.is_pi():
            ed.set_phase(v, Phase(0))
            h = ed.add_vertex(_h_kind())
            ed.add_edge(v, h)
            ed.add_edge(v, h)
    return ed.finish()


def decode_angle_free(d: Diagram) -> Diagram:
    """Absorb every H self-loop as a pi phase increment."""
    if not is_angle_free(d):
        raise ZXError("decoding requires an angle-free diagram")
    ed = d.edit()
    for h, k in sorted(d.vertices.items()):
        if k.kind != "H":
            continue
        nbs = [x for e in d.incident(h) for x in e if x != h]
        if len(set(nbs)) == 1 and d.edges_between(h, nbs[0]) == 2:
            ed.remove_vertex(h)
            ed.add_phase(nbs[0], Phase(1))
    return ed.finish()


def _h_kind():
    from .diagram import H, VertexKind

    return VertexKind(H)


# -- the reduction pipeline ---------------------------------------------------


def _pivot_adj(adj: dict[int, set[int]], u: int, v: int) -> None:
    """In-place pivot on an adjacency structure: toggle pairs across the
    three neighbour classes, then swap the labels of u and v."""
    if v not in adj[u]:
        raise ZXError("pivot requires the edge")
    common = (adj[u] & adj[v]) - {u, v}
    only_u = adj[u] - adj[v] - {u, v}
    only_v = adj[v] - adj[u] - {u, v}
    for a in only_u:
        for b in only_v | common:
            _toggle(adj, a, b)
    for b in only_v:
        for c in common:
            _toggle(adj, b, c)
    swap = lambda x: v if x == u else (u if x == v else x)
    new_u = {swap(x) for x in adj[v]}
    new_v = {swap(x) for x in adj[u]}
    for x in set(adj) - {u, v}:
        had_u, had_v = u in adj[x], v in adj[x]
        adj[x].discard(u)
        adj[x].discard(v)
        if had_u:
            adj[x].add(v)
        if had_v:
            adj[x].add(u)
    adj[u], adj[v] = new_u, new_v


def _toggle(adj: dict[int, set[int]], a: int, b: int) -> None:
    if b in adj[a]:
        adj[a].discard(b)
        adj[b].discard(a)
    else:
        adj[a].add(b)
        adj[b].add(a)


def to_gs_rlc(d: Diagram, checked: bool = False, tol: float = DEFAULT_TOL) -> GsRlcDiagram:
    """Bring an angle-free (or real-phased) diagram state to GS-RLC form.

    Interior spiders are eliminated lowest-degree-first by pivoting with
    their smallest-labelled neighbour; closed scalar components are dropped
    after a zero check.  Raises ZeroStateError if the state is zero.
    """
    if d.n_inputs:
        raise ZXError("GS-RLC form is defined on diagram states; bend inputs first")
    if not is_real(d):
        raise ZXError("GS-RLC form requires phases in {0, pi}")
    view = to_graph_like(d)

    adj: dict[int, set[int]] = {v: set() for v in view.phases}
    for e in view.h_edges:
        a, b = sorted(e)
        adj[a].add(b)
        adj[b].add(a)

    out_spiders = list(view.output_spider)
    out_pos = {s: i for i, s in enumerate(out_spiders)}
    ops: dict[int, RealCliffordOp] = {
        s: (RealCliffordOp(z=1) if view.phases[s].is_pi() else IDENTITY_OP)
        for s in out_spiders
    }
    bras: dict[int, str] = {}
    for s in view.phases:
        if s in out_pos:
            continue
        if not view.phases[s].is_real():
            raise ZXError("GS-RLC form requires phases in {0, pi}")
        bras[s] = "-" if view.phases[s].is_pi() else "+"

    def apply_z(vertex: int) -> None:
        if vertex in out_pos:
            ops[vertex] = ops[vertex].times_z_inner()
        else:
            bras[vertex] = {"+": "-", "-": "+", "0": "0", "1": "1"}[bras[vertex]]

    def apply_h(vertex: int) -> None:
        if vertex in out_pos:
            ops[vertex] = ops[vertex].times_h_inner()
        else:
            bras[vertex] = {"+": "0", "0": "+", "-": "1", "1": "-"}[bras[vertex]]

    while bras:
        # free removals first: computational-basis bras delete directly
        comp = sorted(w for w, b in bras.items() if b in "01")
        if comp:
            w = comp[0]
            if bras[w] == "1":
                for n in sorted(adj[w]):
                    apply_z(n)
            for n in adj[w]:
                adj[n].discard(w)
            del adj[w]
            del bras[w]
            continue
        isolated = sorted(w for w in bras if not adj[w])
        if isolated:
            w = isolated[0]
            if bras[w] == "-":
                raise ZeroStateError("state has a vanishing scalar component")
            del adj[w]
            del bras[w]
            continue
        # pivot a lowest-degree interior vertex with its smallest neighbour
        w = min(bras, key=lambda v: (len(adj[v]), v))
        s = min(adj[w])
        common = (adj[w] & adj[s]) - {w, s}
        _pivot_adj(adj, w, s)
        apply_h(w)
        apply_h(s)
        for c in sorted(common):
            apply_z(c)

    graph = SimpleGraph(
        [str(out_pos[s]) for s in out_spiders],
        [
            (str(out_pos[a]), str(out_pos[b]))
            for a in adj
            for b in adj[a]
            if a < b
        ],
    )
    result = GsRlcDiagram(graph, {str(out_pos[s]): ops[s] for s in out_spiders})
    if checked:
        _check_stage(d, result, "to_gs_rlc", tol)
    return result


def reduce(g: GsRlcDiagram, checked: bool = False, tol: float = DEFAULT_TOL) -> GsRlcDiagram:
    """Restrict the vertex operators to {I, Z, H, HZ} with no two adjacent
    H-carriers.

    X factors push onto neighbours as Z's via the vertex stabilizer; an
    adjacent pair of H-carriers is repaired by pivoting along their edge,
    which consumes both H's and puts Z on the common neighbours.
    """
    labels = g.graph.sorted_vertices()
    idx = {v: i for i, v in enumerate(labels)}
    adj: dict[int, set[int]] = {i: set() for i in range(len(labels))}
    for e in g.graph.edges:
        a, b = sorted(e)
        adj[idx[a]].add(idx[b])
        adj[idx[b]].add(idx[a])
    ops: dict[int, RealCliffordOp] = {idx[v]: op for v, op in g.ops.items()}

    def strip_x() -> None:
        for v in sorted(ops):
            if ops[v].x:
                ops[v] = RealCliffordOp(0, ops[v].z, ops[v].h)
                for n in sorted(adj[v]):
                    ops[n] = ops[n].times_z_inner()

    strip_x()
    while True:
        offending = sorted(
            (min(a, b), max(a, b))
            for a in adj
            for b in adj[a]
            if a < b and ops[a].h and ops[b].h
        )
        if not offending:
            break
        u, v = offending[0]
        common = (adj[u] & adj[v]) - {u, v}
        _pivot_adj(adj, u, v)
        ops[u] = RealCliffordOp(x=ops[u].z, z=0, h=0)
        ops[v] = RealCliffordOp(x=ops[v].z, z=0, h=0)
        for c in sorted(common):
            ops[c] = ops[c].times_z_inner()
        strip_x()

    graph = SimpleGraph(
        labels, [(labels[a], labels[b]) for a in adj for b in adj[a] if a < b]
    )
    result = GsRlcDiagram(graph, {labels[v]: op for v, op in ops.items()})
    if not result.reduced:
        raise CheckFailedError("reduction postcondition failed")
    if checked:
        _check_stage(g.to_diagram(), result, "reduce", tol)
    return result


def simplify_pair(
    d1: GsRlcDiagram,
    d2: GsRlcDiagram,
    checked: bool = False,
    tol: float = DEFAULT_TOL,
) -> tuple[GsRlcDiagram, GsRlcDiagram]:
    """Align a pair of reduced forms: afterwards no two qubits are adjacent
    in either graph with an H on one side's first qubit only and the other
    side's second qubit only.

    Each repair pivots in the diagram where it consumes the offending H,
    moving it across the edge; the symmetric difference of the two
    H-carrier sets strictly decreases, which bounds the loop.
    """
    if d1.graph.vertices != d2.graph.vertices:
        raise ZXError("the two diagrams must share their output set")
    if not d1.reduced or not d2.reduced:
        raise ZXError("simplify_pair expects reduced forms")
    a, b = d1, d2
    measure = len(a.h_carriers() ^ b.h_carriers())
    while True:
        off = _find_offender(a, b)
        if off is None:
            break
        u, v, which = off
        if which == 0:
            a = _single_h_pivot(a, u, v)
        else:
            b = _single_h_pivot(b, v, u)
        new_measure = len(a.h_carriers() ^ b.h_carriers())
        if new_measure >= measure:
            raise CheckFailedError(
                "pair simplification measure failed to decrease "
                f"({measure} -> {new_measure}); aborting"
            )
        measure = new_measure
    if checked:
        _check_stage(d1.to_diagram(), a, "simplify_pair[left]", tol)
        _check_stage(d2.to_diagram(), b, "simplify_pair[right]", tol)
    return a, b


def _find_offender(a: GsRlcDiagram, b: GsRlcDiagram) -> tuple[str, str, int] | None:
    """An ordered pair (u, v) with H on u-but-not-v in ``a`` and on
    v-but-not-u in ``b``, adjacent in at least one graph.  The last entry
    says which diagram can host the repair pivot (0 for a, 1 for b)."""
    ha, hb = a.h_carriers(), b.h_carriers()
    for u in sorted(a.graph.vertices):
        for v in sorted(a.graph.vertices):
            if u == v:
                continue
            if u in ha and v not in ha and v in hb and u not in hb:
                if a.graph.has_edge(u, v):
                    return (u, v, 0)
                if b.graph.has_edge(u, v):
                    return (u, v, 1)
    return None


def _single_h_pivot(g: GsRlcDiagram, u: str, v: str) -> GsRlcDiagram:
    """Pivot along uv where only u carries H: consumes the H on u and puts
    one on v, leaving all other H's unchanged."""
    if not g.graph.has_edge(u, v):
        raise ZXError(f"({u},{v}) is not an edge")
    if not g.ops[u].h or g.ops[v].h:
        raise ZXError("single-H pivot needs H on exactly the first vertex")
    common = (g.graph.neighbors(u) & g.graph.neighbors(v)) - {u, v}
    from .graphstate import pivot as graph_pivot

    new_graph = graph_pivot(g.graph, u, v)
    ops = dict(g.ops)
    a_bit, b_bit = g.ops[u].z, g.ops[v].z
    ops[u] = RealCliffordOp(x=a_bit, z=0, h=0)
    ops[v] = RealCliffordOp(x=b_bit, z=0, h=1)
    for c in common:
        ops[c] = ops[c].times_z_inner()
    out = GsRlcDiagram(new_graph, ops)
    # clear the X factors introduced on u and v
    return _strip_x_only(out)


def _strip_x_only(g: GsRlcDiagram) -> GsRlcDiagram:
    ops = dict(g.ops)
    for v in sorted(ops):
        if ops[v].x:
            ops[v] = RealCliffordOp(0, ops[v].z, ops[v].h)
            for n in sorted(g.graph.neighbors(v)):
                ops[n] = ops[n].times_z_inner()
    return GsRlcDiagram(g.graph, ops)


@dataclass
class Decision:
    equal: bool
    reason: str
    witness: tuple[GsRlcDiagram, GsRlcDiagram] | None = None

    def to_dict(self) -> dict:
        out = {"equal": self.equal, "reason": self.reason}
        if self.witness:
            out["witness"] = [w.to_dict() for w in self.witness]
        return out


def decide_equal(
    d1: Diagram,
    d2: Diagram,
    checked: bool = False,
    tol: float = DEFAULT_TOL,
) -> Decision:
    """Decide semantic equality (up to a nonzero scalar) of two real
    diagram states by normal-form comparison.

    Maps are bent to states first.  Zero states compare equal to each
    other and unequal to everything else; 0-qubit (scalar) states compare
    equal whenever both are nonzero.
    """
    d1, d2 = d1.bend_inputs(), d2.bend_inputs()
    if not is_real(d1) or not is_real(d2):
        raise ZXError("equality decision requires phases in {0, pi}")
    if d1.n_outputs != d2.n_outputs:
        return Decision(False, "arity mismatch")
    zero1 = zero2 = False
    n1 = n2 = None
    try:
        n1 = reduce(to_gs_rlc(d1, checked=checked, tol=tol), checked=checked, tol=tol)
    except ZeroStateError:
        zero1 = True
    try:
        n2 = reduce(to_gs_rlc(d2, checked=checked, tol=tol), checked=checked, tol=tol)
    except ZeroStateError:
        zero2 = True
    if zero1 or zero2:
        if zero1 and zero2:
            return Decision(True, "both states are zero")
        return Decision(False, "exactly one state is zero")
    if d1.n_outputs == 0:
        return Decision(True, "both scalars are nonzero", (n1, n2))
    n1, n2 = simplify_pair(n1, n2, checked=checked, tol=tol)
    if n1.same_as(n2):
        return Decision(True, "identical normal forms", (n1, n2))
    return Decision(False, "normal forms differ", (n1, n2))


def _check_stage(reference: Diagram | GsRlcDiagram, result: GsRlcDiagram, stage: str, tol: float) -> None:
    ref_d = reference if isinstance(reference, Diagram) else reference.to_diagram()
    r = eq_up_to(interpret(ref_d), interpret(result.to_diagram()), EqMode.UP_TO_SCALAR, tol)
    if not r.equal:
        raise CheckFailedError(f"{stage} changed the semantics")
