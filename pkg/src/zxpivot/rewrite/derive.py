"""Scripted derivations: generalized bialgebra, pivoting, and the two
chains relating the pi-rotation to its Hadamard-self-loop form.

The macros mirror written proofs step by step; every atomic step is a rule
application (or a registered whole-diagram equality) and is oracle-checked
in checked mode.  Traces are replayable from their JSON form.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..diagram import BOUNDARY, H, X, Z, Diagram, VertexKind, are_isomorphic
from ..errors import CheckFailedError, PatternError, ZXError
from ..phase import Phase
from ..semantics import DEFAULT_TOL, EqMode, diagrams_equal
from .rules import (
    THEORY_RULES,
    Direction,
    MatchSite,
    RuleId,
    TheoryLevel,
    apply_rule,
    bialgebra_block_ok,
    find_matches,
    insert_identity_spider,
    split_spider,
)
from .trace import RewriteTrace, Tracer, TraceStep

# ---------------------------------------------------------------------------
# generalized bialgebra
# ---------------------------------------------------------------------------


def apply_generalized_bialgebra(d: Diagram, x_set: list[int], z_set: list[int]) -> Diagram:
    """Collapse a complete bipartite X/Z block into one Z-X pair.

    The replacement Z spider inherits the X spiders' external legs, and the
    replacement X spider the Z spiders' external legs.
    """
    if not bialgebra_block_ok(d, list(x_set), list(z_set)):
        raise PatternError("not a complete bipartite phase-free block")
    block = set(x_set) | set(z_set)
    ed = d.edit()
    zz = ed.add_vertex(VertexKind(Z, Phase(0)))
    xx = ed.add_vertex(VertexKind(X, Phase(0)))
    for members, collector in ((x_set, zz), (z_set, xx)):
        for v in members:
            for a, b in d.incident(v):
                other = b if a == v else a
                if other in block:
                    continue
                ed.add_edge(collector, other)
    for v in block:
        ed.remove_vertex(v)
    ed.add_edge(zz, xx)
    return ed.finish()


def expand_bialgebra_pair(
    d: Diagram, x_vertex: int, z_vertex: int
) -> tuple[Diagram, list[int], list[int]]:
    """The bialgebra read backwards: a singly-joined phase-free X-Z pair
    becomes a complete bipartite block, one fresh spider per external leg.

    Returns (diagram, fresh Z spiders from the X legs, fresh X spiders from
    the Z legs), in deterministic leg order.
    """
    xv, zv = x_vertex, z_vertex
    for v, col in ((xv, X), (zv, Z)):
        if v not in d or d.kind(v).kind != col or not d.phase(v).is_zero():
            raise PatternError("expansion needs a phase-free X-Z pair")
    if d.edges_between(xv, zv) != 1 or d.edges_between(xv, xv) or d.edges_between(zv, zv):
        raise PatternError("expansion needs exactly one joining edge")
    ed = d.edit()
    new_zs: list[int] = []
    new_xs: list[int] = []
    for v, bucket, kind in ((xv, new_zs, Z), (zv, new_xs, X)):
        for a, b in d.incident(v):
            other = b if a == v else a
            if {a, b} == {xv, zv}:
                continue
            w = ed.add_vertex(VertexKind(kind, Phase(0)))
            ed.add_edge(w, other)
            bucket.append(w)
    ed.remove_vertex(xv)
    ed.remove_vertex(zv)
    for wz in new_zs:
        for wx in new_xs:
            ed.add_edge(wz, wx)
    return ed.finish(), new_zs, new_xs


def generalized_bialgebra(d: Diagram, x_set: list[int], z_set: list[int]) -> Diagram:
    """Public forward form; see ``apply_generalized_bialgebra``."""
    return apply_generalized_bialgebra(d, x_set, z_set)


def remove_rotation_loop(d: Diagram, spider: int, rot: int) -> Diagram:
    """Remove a degree-2 opposite-colour rotation both of whose legs attach
    to ``spider``.  This is the Hopf law on the doubled connection followed
    by dropping the disconnected scalar remainder."""
    if (
        spider not in d
        or rot not in d
        or not d.kind(rot).is_spider()
        or not d.kind(spider).is_spider()
        or d.kind(rot).kind == d.kind(spider).kind
        or d.edges_between(spider, rot) != 2
        or d.degree(rot) != 2
    ):
        raise PatternError("not a doubled rotation loop")
    ed = d.edit()
    ed.remove_vertex(rot)
    return ed.finish()


# ---------------------------------------------------------------------------
# registered whole-diagram equalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EqualityRewrite:
    """A named equality usable as a rewrite on whole diagrams."""

    name: str
    lhs: Diagram
    rhs: Diagram


_EQUALITIES: dict[str, EqualityRewrite] = {}


def register_equality(
    name: str,
    lhs: Diagram,
    rhs: Diagram,
    check: bool = True,
    tol: float = DEFAULT_TOL,
) -> EqualityRewrite:
    if check and not diagrams_equal(lhs, rhs, EqMode.UP_TO_SCALAR, tol).equal:
        raise CheckFailedError(f"equality {name!r} is not semantically sound")
    eq = EqualityRewrite(name, lhs, rhs)
    _EQUALITIES[name] = eq
    return eq


def get_equality(name: str) -> EqualityRewrite:
    if name not in _EQUALITIES:
        raise ZXError(f"no registered equality named {name!r}")
    return _EQUALITIES[name]


def apply_equality(d: Diagram, name: str, direction: Direction) -> Diagram:
    eq = get_equality(name)
    src, dst = (eq.lhs, eq.rhs) if direction is Direction.FORWARD else (eq.rhs, eq.lhs)
    if not are_isomorphic(d, src):
        raise PatternError(f"diagram does not match the {direction.value} side of {name!r}")
    return Diagram(dst.vertices, dst.edges, dst.inputs, dst.outputs)


# ---------------------------------------------------------------------------
# structure readers for graph-state diagrams
# ---------------------------------------------------------------------------


def output_wire(d: Diagram, boundary: int) -> tuple[int, list[int]]:
    """Follow an output wire through its chain of H boxes.

    Returns (terminal vertex, H boxes crossed, boundary first).
    """
    prev = boundary
    (edge,) = d.incident(boundary)
    cur = edge[0] if edge[1] == boundary else edge[1]
    boxes = []
    while cur in d.vertex_ids() and d.kind(cur).kind == H:
        boxes.append(cur)
        nxts = []
        for a, b in d.incident(cur):
            t = b if a == cur else a
            nxts.append(t)
        nxts.remove(prev)
        prev, cur = cur, nxts[0]
    return cur, boxes


def spider_adjacency(d: Diagram) -> dict[int, set[int]]:
    """Adjacency between spiders joined by a single H box (graph edges of a
    graph-state-like diagram)."""
    adj: dict[int, set[int]] = {v: set() for v in d.spider_ids()}
    for h in d.vertex_ids():
        if d.kind(h).kind != H:
            continue
        ends = []
        for a, b in d.incident(h):
            ends.append(b if a == h else a)
        if len(ends) == 2 and all(e in adj for e in ends) and ends[0] != ends[1]:
            adj[ends[0]].add(ends[1])
            adj[ends[1]].add(ends[0])
    return adj


def read_graph_state_diagram(d: Diagram) -> set[frozenset[int]]:
    """Verify that ``d`` is exactly a graph-state diagram and return its
    edge set over output positions."""
    if d.n_inputs:
        raise PatternError("graph states have no inputs")
    spider_at: dict[int, int] = {}
    for idx, b in enumerate(d.outputs):
        s, boxes = output_wire(d, b)
        if boxes or not d.kind(s).is_spider() or d.kind(s).kind != Z:
            raise PatternError(f"output {idx} is not plainly wired to a Z spider")
        if not d.phase(s).is_zero():
            raise PatternError(f"output spider of {idx} carries a phase")
        if s in spider_at.values():
            raise PatternError("two outputs share a spider")
        spider_at[idx] = s
    spiders = set(spider_at.values())
    edges: set[frozenset[int]] = set()
    seen_h = set()
    for v in d.vertex_ids():
        k = d.kind(v)
        if k.kind == BOUNDARY or v in spiders:
            continue
        if k.kind != H:
            raise PatternError(f"unexpected interior vertex {v}")
        seen_h.add(v)
        ends = []
        for a, b in d.incident(v):
            ends.append(b if a == v else a)
        if len(ends) != 2 or any(e not in spiders for e in ends) or ends[0] == ends[1]:
            raise PatternError(f"H box {v} is not a graph edge")
        pos = {idx for idx, s in spider_at.items() if s in ends}
        e = frozenset(pos)
        if e in edges:
            raise PatternError("parallel graph edges")
        edges.add(e)
    by_pos = {s: idx for idx, s in spider_at.items()}
    for a, b in d.edges:
        if a in spiders and b in spiders:
            raise PatternError("plain edge between graph spiders")
    return edges


# ---------------------------------------------------------------------------
# pivot derivations
# ---------------------------------------------------------------------------


def _h2_cleanup_at(t: Tracer, around: int) -> None:
    """Cancel adjacent H-box pairs touching ``around`` until none remain."""
    while True:
        d = t.current
        found = None
        for h in sorted(d.neighbors(around)):
            if h == around or h not in d or d.kind(h).kind != H:
                continue
            for h2 in sorted(d.neighbors(h)):
                if h2 != h and h2 != around and d.kind(h2).kind == H:
                    found = (h, h2)
                    break
            if found:
                break
        if not found:
            return
        t.apply_site(
            MatchSite(RuleId.H2, Direction.FORWARD, {"h1": found[0], "h2": found[1]}, hash(d))
        )


def _color_flip(t: Tracer, v: int) -> None:
    """Colour-change one spider and cancel the HH pairs this creates."""
    d = t.current
    direction = Direction.FORWARD if d.kind(v).kind == X else Direction.BACKWARD
    t.apply_site(MatchSite(RuleId.H1, direction, {"v": v}, hash(d)))
    _h2_cleanup_at(t, v)


def _h_boxes_between(d: Diagram, u: int, v: int) -> int:
    count = 0
    for h in d.vertex_ids():
        if d.kind(h).kind == H and d.edges_between(u, h) == 1 and d.edges_between(v, h) == 1:
            count += 1
    return count


def _cleanup_fuse_and_hopf(t: Tracer) -> None:
    """Fixpoint cleanup: cancel parallel H edges, fuse plainly joined
    spiders, drop plain self-loops.

    A plainly joined pair is only fused once no H box joins it, so that
    Hopf cancellation runs first and fusion never creates an H self-loop.
    Any loop that arises regardless is absorbed as a pi phase (requires the
    loop rule to be in the active theory).
    """
    while True:
        d = t.current
        hpf = [
            s
            for s in find_matches(d, RuleId.HPF, Direction.FORWARD, t.theory)
            if s.binding.get("through_h")
        ]
        if hpf:
            best = min(hpf, key=lambda s: (s.binding["u"], s.binding["v"], s.binding["h1"]))
            t.apply_site(best)
            continue
        s1 = [
            s
            for s in find_matches(d, RuleId.S1, Direction.FORWARD, t.theory)
            if not _h_boxes_between(d, s.binding["u"], s.binding["v"])
        ]
        if s1:
            best = min(s1, key=lambda s: tuple(sorted((s.binding["u"], s.binding["v"]))))
            u, v = sorted((best.binding["u"], best.binding["v"]))
            t.apply_site(MatchSite(RuleId.S1, Direction.FORWARD, {"u": u, "v": v}, hash(d)))
            continue
        s2 = find_matches(d, RuleId.S2, Direction.FORWARD, t.theory)
        if s2:
            t.apply_site(min(s2, key=lambda s: s.binding["v"]))
            continue
        if RuleId.HL in THEORY_RULES[t.theory]:
            hl = find_matches(d, RuleId.HL, Direction.BACKWARD, t.theory)
            if hl:
                t.apply_site(min(hl, key=lambda s: (s.binding["v"], s.binding["loop"])))
                continue
        return


def _pivot_no_common_steps(t: Tracer, u_idx: int, v_idx: int) -> None:
    """The body of the no-common-neighbour pivot derivation."""
    d = t.current
    bu, bv = d.outputs[u_idx], d.outputs[v_idx]
    su, boxes_u = output_wire(d, bu)
    sv, boxes_v = output_wire(d, bv)
    if len(boxes_u) != 1 or len(boxes_v) != 1:
        raise PatternError("expected exactly one H on each pivot output wire")
    adj = spider_adjacency(d)
    if sv not in adj[su]:
        raise PatternError("pivot endpoints are not adjacent")
    if (adj[su] & adj[sv]) - {su, sv}:
        raise PatternError("pivot endpoints share a neighbour")

    # turn u's spider red; its H-edges and output H all cancel
    _color_flip(t, su)
    # expand the resulting plainly-joined X-Z pair into a bipartite block
    d = t.current
    new_d, new_zs, new_xs = expand_bialgebra_pair(d, su, sv)
    t.apply_custom(
        "GB",
        {"x": su, "z": sv, "direction": Direction.BACKWARD.value},
        new_d,
        rule_for_theory=RuleId.BI,
    )
    # turn the fresh X spiders green; this recreates graph edges as H boxes
    for w in new_xs:
        _color_flip(t, w)
    # fuse the fresh spiders into the original graph spiders; parallel
    # H edges from pre-existing connections cancel pairwise
    _cleanup_fuse_and_hopf(t)


def derive_pivot_no_common(
    d: Diagram,
    u_idx: int,
    v_idx: int,
    checked: bool = True,
    tol: float = DEFAULT_TOL,
) -> RewriteTrace:
    """Derivation of the pivot property when the two vertices share no
    neighbour; every step is a plain-calculus rule.

    ``d`` must be a graph-state diagram with one extra H on the output
    wires of the pivot pair (positions ``u_idx`` and ``v_idx``).
    """
    t = Tracer(d, checked=checked, tol=tol, theory=TheoryLevel.PLAIN_ZX)
    _pivot_no_common_steps(t, u_idx, v_idx)
    return t.finish()


def derive_pivot(
    d: Diagram,
    u_idx: int,
    v_idx: int,
    checked: bool = True,
    tol: float = DEFAULT_TOL,
) -> RewriteTrace:
    """Derivation of the pivot property for arbitrary graphs.

    ``d`` must be a graph-state diagram with H appended on the pivot pair's
    output wires and a pi Z-rotation on every common neighbour's wire.  The
    common neighbours are split through the H-self-loop rule, after which
    the no-common-neighbour derivation applies; spider fusion and Hopf
    cleanup close the gap.
    """
    t = Tracer(d, checked=checked, tol=tol, theory=TheoryLevel.ZX_PLUS_HL)
    bu, bv = d.outputs[u_idx], d.outputs[v_idx]
    su, boxes_u = output_wire(d, bu)
    sv, boxes_v = output_wire(d, bv)
    if len(boxes_u) != 1 or len(boxes_v) != 1:
        raise PatternError("expected exactly one H on each pivot output wire")

    # fuse the pi rotations sitting on common-neighbour wires into their
    # graph spiders
    commons = []
    for idx, b in enumerate(d.outputs):
        if idx in (u_idx, v_idx):
            continue
        s, boxes = output_wire(d, b)
        if boxes:
            raise PatternError(f"unexpected H on output {idx}")
        if d.kind(s).is_spider() and d.phase(s).is_pi() and d.degree(s) == 2:
            inner = [n for n in d.neighbors(s) if n != b]
            if not inner or not d.kind(inner[0]).is_spider():
                raise PatternError(f"dangling rotation on output {idx}")
            t.apply_site(
                MatchSite(
                    RuleId.S1,
                    Direction.FORWARD,
                    {"u": inner[0], "v": s},
                    hash(t.current),
                )
            )
            commons.append(inner[0])

    adj = spider_adjacency(t.current)
    expected_commons = sorted((adj[su] & adj[sv]) - {su, sv})
    if sorted(commons) != expected_commons:
        raise PatternError(
            "pi rotations must sit exactly on the common neighbours "
            f"(found {sorted(commons)}, expected {expected_commons})"
        )

    # split every common neighbour through its H self-loop
    for c in sorted(commons):
        t.begin_segment("split-common", {"vertex": c})
        d0 = t.current
        t.apply_site(MatchSite(RuleId.HL, Direction.FORWARD, {"v": c}, hash(d0)))
        d0 = t.current
        # keep on c every leg except the v-side H edge and one loop leg
        loop_h = [
            h
            for h in d0.neighbors(c)
            if d0.kind(h).kind == H and d0.edges_between(c, h) == 2
        ]
        v_box = [
            h
            for h in d0.neighbors(c)
            if d0.kind(h).kind == H
            and d0.edges_between(c, h) == 1
            and sv in d0.neighbors(h)
        ]
        if len(loop_h) != 1 or len(v_box) != 1:
            raise PatternError("unexpected structure at a common neighbour")
        move = []
        loop_seen = False
        for idx, (a, b) in enumerate(d0.edges):
            for end, vv in ((0, a), (1, b)):
                if vv != c:
                    continue
                other = b if end == 0 else a
                if other == v_box[0]:
                    move.append((idx, end))
                elif other == loop_h[0] and not loop_seen:
                    move.append((idx, end))
                    loop_seen = True
        keep = []
        for idx, (a, b) in enumerate(d0.edges):
            for end, vv in ((0, a), (1, b)):
                if vv == c and (idx, end) not in move:
                    keep.append((idx, end))
        new_d, c2 = split_spider(d0, c, keep)
        t.apply_custom(
            "S1:split",
            {"v": c, "keep": [list(k) for k in keep]},
            new_d,
            rule_for_theory=RuleId.S1,
        )
        t.end_segment()

    t.begin_segment("pivot-no-common", {"u": u_idx, "v": v_idx})
    _pivot_no_common_steps(t, u_idx, v_idx)
    t.end_segment()
    return t.finish()


# ---------------------------------------------------------------------------
# the pi-rotation vs H-loop chains
# ---------------------------------------------------------------------------


def h_loop_diagram() -> Diagram:
    """A phase-free Z spider on a wire carrying one H self-loop."""
    b = VertexKind(BOUNDARY)
    return Diagram(
        {0: VertexKind(Z, Phase(0)), 1: VertexKind(H), 2: b, 3: b},
        [(0, 1), (0, 1), (0, 2), (0, 3)],
        [2],
        [3],
    )


def split_loop_diagram() -> Diagram:
    """The split form of the H-loop: two phase-free spiders joined by a
    plain edge and an H edge (the official right-hand side of the loop
    axiom)."""
    b = VertexKind(BOUNDARY)
    zk = VertexKind(Z, Phase(0))
    return Diagram(
        {0: zk, 1: zk, 2: VertexKind(H), 3: b, 4: b},
        [(0, 1), (0, 2), (1, 2), (0, 3), (1, 4)],
        [3],
        [4],
    )


def pi_rotation_diagram() -> Diagram:
    return Diagram.spider(Z, 1, 1, Phase(1))


def triangle_pivot_equality(check: bool = True, tol: float = DEFAULT_TOL) -> EqualityRewrite:
    """The pivot property specialized to the triangle, in plugged 1 -> 1
    form: two of the three qubits are capped by the uniform-superposition
    effect, the third keeps an input and an output.

    lhs: the ops side (H on both capped wires, pi on the open wire).
    rhs: the bare triangle state, similarly plugged.
    """
    b = VertexKind(BOUNDARY)
    zk = VertexKind(Z, Phase(0))
    hk = VertexKind(H)
    # rhs: w on the wire (phase 0); u, v interior; triangle of H edges
    rhs = Diagram(
        {
            0: zk,  # u
            1: zk,  # v
            2: zk,  # w
            3: hk,  # uv
            4: hk,  # uw
            5: hk,  # vw
            6: b,
            7: b,
        },
        [(0, 3), (1, 3), (0, 4), (2, 4), (1, 5), (2, 5), (2, 6), (2, 7)],
        [6],
        [7],
    )
    # lhs: w carries pi; the caps on u and v sit behind an H box
    lhs = Diagram(
        {
            0: zk,  # u
            1: zk,  # v
            2: VertexKind(Z, Phase(1)),  # w
            3: hk,  # uv
            4: hk,  # uw
            5: hk,  # vw
            6: b,
            7: b,
            8: zk,  # cap dot on u
            9: hk,  # H op on u
            10: zk,  # cap dot on v
            11: hk,  # H op on v
        },
        [
            (0, 3),
            (1, 3),
            (0, 4),
            (2, 4),
            (1, 5),
            (2, 5),
            (2, 6),
            (2, 7),
            (0, 9),
            (8, 9),
            (1, 11),
            (10, 11),
        ],
        [6],
        [7],
    )
    return register_equality("triangle-pivot", lhs, rhs, check=check, tol=tol)


def _eliminate_capped_plug(t: Tracer, dot: int, spider: int) -> None:
    """Remove a ``dot -H- spider`` cap gadget: flip the dot, cancel the H,
    and copy it through the spider."""
    _color_flip(t, dot)
    d = t.current
    t.apply_site(
        MatchSite(RuleId.C, Direction.FORWARD, {"dot": dot, "spider": spider}, hash(d))
    )


def _absorb_copied_dot(t: Tracer, dot: int, target: int) -> None:
    """Flip a copied X dot sitting behind an H box and fuse it into the
    spider on the other side."""
    _color_flip(t, dot)
    d = t.current
    t.apply_site(
        MatchSite(
            RuleId.S1, Direction.FORWARD, {"u": target, "v": dot}, hash(d)
        )
    )


def derive_hl_from_triangle_pivot(
    checked: bool = True, tol: float = DEFAULT_TOL
) -> RewriteTrace:
    """Replay the implication from the triangle pivot to the loop axiom:
    a seven-segment chain from the H-loop diagram to the pi-rotation, using
    the registered triangle-pivot equality exactly once (segment four)."""
    if "triangle-pivot" not in _EQUALITIES:
        triangle_pivot_equality(check=checked, tol=tol)
    d0 = h_loop_diagram()
    t = Tracer(d0, checked=checked, tol=tol, theory=TheoryLevel.PLAIN_ZX)

    # 1. open the loop: split the spider into the plain-plus-H pair
    t.begin_segment("open-loop", {})
    d = t.current
    # keep the input leg and one loop leg on the original spider
    keep = [(2, 0), (0, 0)]
    new_d, w2 = split_spider(d, 0, keep)
    t.apply_custom(
        "S1:split", {"v": 0, "keep": [list(k) for k in keep]}, new_d,
        rule_for_theory=RuleId.S1,
    )
    t.end_segment()

    # 2. detach the H edge from the output spider
    t.begin_segment("detach-h", {})
    d = t.current
    h_end = None
    for idx, (a, b) in enumerate(d.edges):
        if d.kind(a).kind == H or d.kind(b).kind == H:
            box, sp = (a, b) if d.kind(a).kind == H else (b, a)
            if sp == w2:
                h_end = (idx, 0 if d.edges[idx][0] == w2 else 1)
    keep = []
    for idx, (a, b) in enumerate(d.edges):
        for end, vv in ((0, a), (1, b)):
            if vv == w2 and (idx, end) != h_end:
                keep.append((idx, end))
    new_d, v_hat = split_spider(d, w2, keep)
    t.apply_custom(
        "S1:split", {"v": w2, "keep": [list(k) for k in keep]}, new_d,
        rule_for_theory=RuleId.S1,
    )
    t.end_segment()

    # 3. grow the loop into a triangle of H edges
    t.begin_segment("grow-triangle", {})
    d = t.current
    t.apply_site(
        MatchSite(RuleId.H2, Direction.BACKWARD, {"edge": (v_hat, w2)}, hash(d))
    )
    d = t.current
    # the two fresh H boxes sit in series between v_hat and w2
    chain = [h for h in d.neighbors(v_hat) if d.kind(h).kind == H and any(
        d.kind(x).kind == H for x in d.neighbors(h))]
    h1 = chain[0]
    h2 = [x for x in d.neighbors(h1) if d.kind(x).kind == H][0]
    new_d, u_hat = insert_identity_spider(d, h1, h2)
    t.apply_custom(
        "S3:insert", {"a": h1, "b": h2}, new_d, rule_for_theory=RuleId.S3
    )
    d = t.current
    t.apply_site(
        MatchSite(RuleId.S1, Direction.FORWARD, {"u": 0, "v": w2}, hash(d))
    )
    t.end_segment()

    # 4. the registered premise, read from the bare to the ops side
    t.begin_segment("triangle-pivot", {})
    new_d = apply_equality(t.current, "triangle-pivot", Direction.BACKWARD)
    t.apply_custom("EQ:triangle-pivot", {"direction": "backward"}, new_d)
    t.end_segment()

    # the equality replaced the whole diagram by the lhs as constructed in
    # triangle_pivot_equality, so its vertex ids are known
    u_sp, v_sp = 0, 1
    cap_u, cap_v = 8, 10

    # 5. eliminate the cap gadget on u
    t.begin_segment("uncap-u", {})
    _eliminate_capped_plug(t, cap_u, u_sp)
    d = t.current
    # the copy landed one X dot on each former leg of u; absorb them
    for dot in sorted(v for v in d.spider_ids() if d.kind(v).kind == X):
        box = next(iter(t.current.neighbors(dot)))
        (tgt,) = [x for x in t.current.neighbors(box) if x != dot]
        _absorb_copied_dot(t, dot, tgt)
    t.end_segment()

    # 6. eliminate the cap gadget on v
    t.begin_segment("uncap-v", {})
    _eliminate_capped_plug(t, cap_v, v_sp)
    t.end_segment()

    # 7. absorb the last copied dot into the open-wire spider
    t.begin_segment("close", {})
    d = t.current
    for dot in sorted(v for v in d.spider_ids() if d.kind(v).kind == X):
        box = next(iter(t.current.neighbors(dot)))
        (tgt,) = [x for x in t.current.neighbors(box) if x != dot]
        _absorb_copied_dot(t, dot, tgt)
    t.end_segment()

    trace = t.finish()
    if not are_isomorphic(trace.final, pi_rotation_diagram()):
        raise CheckFailedError("chain did not terminate at the pi-rotation")
    return trace


def derive_hl_from_eu(checked: bool = True, tol: float = DEFAULT_TOL) -> RewriteTrace:
    """Replay the four-step derivation of the loop axiom from the Euler
    decomposition: decompose the loop's H, fuse the two Z quarter turns,
    and eliminate the remaining X quarter-turn loop by the Hopf law."""
    d0 = h_loop_diagram()
    t = Tracer(d0, checked=checked, tol=tol, theory=TheoryLevel.ZX_PLUS_EU)
    d = t.current
    t.apply_site(MatchSite(RuleId.EU, Direction.FORWARD, {"h": 1}, hash(d)))
    d = t.current
    z_rots = sorted(
        v for v in d.spider_ids() if d.kind(v).kind == Z and v != 0
    )
    for zr in z_rots:
        d = t.current
        t.apply_site(MatchSite(RuleId.S1, Direction.FORWARD, {"u": 0, "v": zr}, hash(d)))
    d = t.current
    (x_rot,) = [v for v in d.spider_ids() if d.kind(v).kind == X]
    new_d = remove_rotation_loop(d, 0, x_rot)
    t.apply_custom(
        "ROT_LOOP", {"spider": 0, "rot": x_rot}, new_d, rule_for_theory=RuleId.HPF
    )
    trace = t.finish()
    if not are_isomorphic(trace.final, pi_rotation_diagram()):
        raise CheckFailedError("chain did not terminate at the pi-rotation")
    return trace


# ---------------------------------------------------------------------------
# trace replay
# ---------------------------------------------------------------------------


def _replay_step(t: Tracer, step: TraceStep) -> None:
    name = step.rule
    rule_names = {r.value for r in RuleId}
    if name in rule_names:
        binding = {
            k: tuple(v) if isinstance(v, list) else v for k, v in step.binding.items()
        }
        t.apply_site(
            MatchSite(
                RuleId(name),
                Direction(step.direction),
                binding,
                hash(t.current),
                step.color_swapped,
            )
        )
    elif name == "GB":
        if step.binding.get("direction") == Direction.BACKWARD.value:
            new_d, _, _ = expand_bialgebra_pair(
                t.current, step.binding["x"], step.binding["z"]
            )
        else:
            new_d = apply_generalized_bialgebra(
                t.current, list(step.binding["x_set"]), list(step.binding["z_set"])
            )
        t.apply_custom("GB", step.binding, new_d, rule_for_theory=RuleId.BI)
    elif name == "S1:split":
        keep = [tuple(k) for k in step.binding["keep"]]
        new_d, _ = split_spider(t.current, step.binding["v"], keep)
        t.apply_custom(name, step.binding, new_d, rule_for_theory=RuleId.S1)
    elif name == "S3:insert":
        new_d, _ = insert_identity_spider(t.current, step.binding["a"], step.binding["b"])
        t.apply_custom(name, step.binding, new_d, rule_for_theory=RuleId.S3)
    elif name == "ROT_LOOP":
        new_d = remove_rotation_loop(t.current, step.binding["spider"], step.binding["rot"])
        t.apply_custom(name, step.binding, new_d, rule_for_theory=RuleId.HPF)
    elif name.startswith("EQ:"):
        eq_name = name[3:]
        direction = Direction(step.binding.get("direction", "forward"))
        new_d = apply_equality(t.current, eq_name, direction)
        t.apply_custom(name, step.binding, new_d)
    else:
        raise ZXError(f"unknown trace step {name!r}")


def replay_trace(
    initial: Diagram,
    steps: list[TraceStep],
    checked: bool = True,
    tol: float = DEFAULT_TOL,
    theory: TheoryLevel = TheoryLevel.ZX_PLUS_EU,
) -> RewriteTrace:
    """Re-apply a recorded trace, oracle-checking each step in checked mode."""
    t = Tracer(initial, checked=checked, tol=tol, theory=theory)

    def run(items: list[TraceStep]) -> None:
        for s in items:
            if s.steps:
                t.begin_segment(s.rule, s.binding)
                run(s.steps)
                t.end_segment()
            else:
                _replay_step(t, s)

    run(steps)
    return t.finish()


# ---------------------------------------------------------------------------
# single-colour / bipartite reductions
# ---------------------------------------------------------------------------


def _apply_sorted_s1(cur: Diagram, s: MatchSite) -> Diagram:
    u, v = sorted((s.binding["u"], s.binding["v"]))
    return apply_rule(
        cur, MatchSite(RuleId.S1, Direction.FORWARD, {"u": u, "v": v}, hash(cur))
    )


def fuse_single_color(d: Diagram, theory: TheoryLevel = TheoryLevel.PLAIN_ZX) -> Diagram:
    """Reduce a connected one-colour diagram to a single spider with the
    fusion and antiloop rules."""
    cur = d
    while True:
        sites = find_matches(cur, RuleId.S1, Direction.FORWARD, theory)
        if not sites:
            break
        s = min(sites, key=lambda s: tuple(sorted((s.binding["u"], s.binding["v"]))))
        cur = _apply_sorted_s1(cur, s)
    while True:
        sites = find_matches(cur, RuleId.S2, Direction.FORWARD, theory)
        if not sites:
            break
        cur = apply_rule(cur, sites[0])
    return cur


def to_simple_bipartite(d: Diagram, theory: TheoryLevel = TheoryLevel.PLAIN_ZX) -> Diagram:
    """Reduce an H-free diagram to a simple bipartite Z/X form by fusion,
    antiloop, and the Hopf law."""
    cur = d
    while True:
        sites = find_matches(cur, RuleId.S1, Direction.FORWARD, theory)
        if sites:
            cur = _apply_sorted_s1(cur, min(
                sites, key=lambda s: tuple(sorted((s.binding["u"], s.binding["v"])))
            ))
            continue
        sites = find_matches(cur, RuleId.S2, Direction.FORWARD, theory)
        if sites:
            cur = apply_rule(cur, sites[0])
            continue
        sites = [
            s
            for s in find_matches(cur, RuleId.HPF, Direction.FORWARD, theory)
            if not s.binding.get("through_h")
        ]
        if sites:
            cur = apply_rule(cur, min(
                sites, key=lambda s: tuple(sorted((s.binding["u"], s.binding["v"])))
            ))
            continue
        return cur


def eliminate_color(d: Diagram, color: str = X) -> Diagram:
    """Colour-change every spider of one colour away (possible for either
    colour in any diagram)."""
    cur = d
    while True:
        targets = [v for v in cur.spider_ids() if cur.kind(v).kind == color]
        if not targets:
            return cur
        direction = Direction.FORWARD if color == X else Direction.BACKWARD
        cur = apply_rule(
            cur, MatchSite(RuleId.H1, direction, {"v": targets[0]}, hash(cur))
        )
