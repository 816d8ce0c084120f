"""A canonical graph-like view of diagram states.

Every interior vertex becomes a phased Z spider, every connection between
spiders an H-labelled simple edge, and every output is wired plainly to its
own dedicated spider.  H self-loops are absorbed as pi phase increments and
plain self-loops dropped, so the view lives in the loop-extended theory and
preserves semantics up to a nonzero scalar.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagram import BOUNDARY, H, X, Z, Diagram, VertexKind
from .errors import MalformedDiagramError, ZeroStateError
from .phase import Phase


@dataclass
class GraphLikeView:
    """Phased spiders joined by simple H edges, plus plain output wiring."""

    phases: dict[int, Phase] = field(default_factory=dict)
    h_edges: set[frozenset[int]] = field(default_factory=set)
    output_spider: list[int] = field(default_factory=list)

    def interior_spiders(self) -> list[int]:
        outs = set(self.output_spider)
        return sorted(v for v in self.phases if v not in outs)

    def neighbors(self, v: int) -> set[int]:
        return {next(iter(e - {v})) for e in self.h_edges if v in e}

    def validate(self) -> list[str]:
        problems = []
        for e in self.h_edges:
            if len(e) != 2:
                problems.append(f"self-loop {set(e)} in view")
            for v in e:
                if v not in self.phases:
                    problems.append(f"edge {set(e)} references unknown spider {v}")
        if len(set(self.output_spider)) != len(self.output_spider):
            problems.append("two outputs share a spider")
        for v in self.output_spider:
            if v not in self.phases:
                problems.append(f"output spider {v} unknown")
        return problems

    def to_diagram(self) -> Diagram:
        """Re-expand into a plain diagram (H boxes for the edges)."""
        vertices: dict[int, VertexKind] = {}
        edges: list[tuple[int, int]] = []
        for v, p in self.phases.items():
            vertices[v] = VertexKind(Z, p)
        nxt = max(vertices, default=-1) + 1
        outputs = []
        for v in self.output_spider:
            vertices[nxt] = VertexKind(BOUNDARY)
            edges.append((v, nxt))
            outputs.append(nxt)
            nxt += 1
        for e in sorted(self.h_edges, key=sorted):
            a, b = sorted(e)
            vertices[nxt] = VertexKind(H)
            edges.append((a, nxt))
            edges.append((b, nxt))
            nxt += 1
        return Diagram(vertices, edges, [], outputs)


def to_graph_like(d: Diagram) -> GraphLikeView:
    """Convert a diagram state to its graph-like view.

    The diagram must have no inputs.  All connections through chains of H
    boxes are collapsed to a parity; X spiders are colour-changed; plainly
    joined spiders fuse; parallel H edges cancel pairwise; H self-loops add
    pi to their spider.  A cycle of H boxes with no spider on it has value
    zero when odd and is dropped when even.
    """
    problems = d.validate()
    if problems:
        raise MalformedDiagramError("; ".join(problems))
    if d.n_inputs:
        raise MalformedDiagramError("graph-like view is defined on states")

    kinds = d.vertices
    edges = list(d.edges)

    # collapse H chains into parity-labelled connections between anchors
    # (spiders and boundaries); detect pure-H cycles
    h_ends: dict[int, list[tuple[int, int]]] = {}
    for idx, (a, b) in enumerate(edges):
        if kinds[a].kind == H:
            h_ends.setdefault(a, []).append((idx, 0))
        if kinds[b].kind == H:
            h_ends.setdefault(b, []).append((idx, 1))

    def endpoint(eidx: int, end: int) -> int:
        return edges[eidx][end]

    connections: list[tuple[int, int, int]] = []  # (anchor, anchor, parity)
    visited: set[tuple[int, int]] = set()
    for eidx, (a, b) in enumerate(edges):
        for end, v in ((0, a), (1, b)):
            if kinds[v].kind == H or (eidx, end) in visited:
                continue
            visited.add((eidx, end))
            parity = 0
            cur_e, cur_end = eidx, end
            while True:
                other = 1 - cur_end
                p = endpoint(cur_e, other)
                if kinds[p].kind != H:
                    visited.add((cur_e, other))
                    connections.append((v, p, parity))
                    break
                visited.add((cur_e, other))
                parity ^= 1
                ends = h_ends[p]
                cur_e, cur_end = ends[1] if ends[0] == (cur_e, other) else ends[0]
                visited.add((cur_e, cur_end))

    # pure-H cycles: no anchor ever reached
    cyc_seen: set[tuple[int, int]] = set()
    for eidx, (a, b) in enumerate(edges):
        for end, v in ((0, a), (1, b)):
            if kinds[v].kind != H or (eidx, end) in visited or (eidx, end) in cyc_seen:
                continue
            length = 0
            cur_e, cur_end = eidx, end
            while True:
                cyc_seen.add((cur_e, cur_end))
                other = 1 - cur_end
                cyc_seen.add((cur_e, other))
                p = endpoint(cur_e, other)
                length += 1
                ends = h_ends[p]
                cur_e, cur_end = ends[1] if ends[0] == (cur_e, other) else ends[0]
                if (cur_e, cur_end) in cyc_seen:
                    break
            if length % 2:
                raise ZeroStateError("odd cycle of H boxes has value zero")
            # even cycles are the nonzero scalar 2: dropped

    # union-find over spiders for plain fusion; X spiders flip, toggling
    # the parity of each incident connection
    parent: dict[int, int] = {}

    def find(v: int) -> int:
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            parent[rb] = ra

    spiders = {v for v, k in kinds.items() if k.is_spider()}
    phase_acc: dict[int, Phase] = {}
    for v in spiders:
        parent.setdefault(v, v)
        phase_acc[v] = kinds[v].phase

    adjusted: list[tuple[int, int, int]] = []
    for a, b, parity in connections:
        for t in (a, b):
            if t in spiders and kinds[t].kind == X:
                parity ^= 1
        adjusted.append((a, b, parity))

    # fuse along plain spider-spider connections
    for a, b, parity in adjusted:
        if parity == 0 and a in spiders and b in spiders and a != b:
            ra, rb = find(a), find(b)
            if ra != rb:
                keep, gone = min(ra, rb), max(ra, rb)
                union(ra, rb)
                phase_acc[keep] = phase_acc[keep] + phase_acc[gone]

    # re-walk connections over fused representatives
    pair_count: dict[frozenset[int], int] = {}
    loops: dict[int, int] = {}
    boundary_conns: dict[int, tuple[int | None, int]] = {}
    for a, b, parity in adjusted:
        a_is_b = kinds[a].kind == BOUNDARY
        b_is_b = kinds[b].kind == BOUNDARY
        if a_is_b and b_is_b:
            boundary_conns[a] = (b, parity)
            boundary_conns[b] = (a, parity)
            continue
        if a_is_b or b_is_b:
            bnd, sp = (a, b) if a_is_b else (b, a)
            boundary_conns[bnd] = (find(sp), parity)
            continue
        ra, rb = find(a), find(b)
        if ra == rb:
            if parity:
                loops[ra] = loops.get(ra, 0) + 1
            # plain self-connections vanish exactly
            continue
        if parity:
            pair_count[frozenset((ra, rb))] = pair_count.get(frozenset((ra, rb)), 0) + 1
        # parity-0 connections between distinct reps were fused above

    view = GraphLikeView()
    for v in spiders:
        if find(v) == v:
            view.phases[v] = phase_acc[v] + Phase(loops.get(v, 0))
    for e, count in pair_count.items():
        if count % 2:
            view.h_edges.add(e)

    # plain output wiring: one dedicated spider per output
    nxt = max(list(kinds) + [0]) + 1
    claimed: set[int] = set()
    handled: set[int] = set()
    for b in d.outputs:
        if b in handled:
            continue
        target, parity = boundary_conns[b]
        if kinds[target].kind == BOUNDARY:
            # a bare wire between two outputs
            other = target
            handled.add(other)
            p1 = nxt
            view.phases[p1] = Phase(0)
            nxt += 1
            p2 = nxt
            view.phases[p2] = Phase(0)
            nxt += 1
            if parity == 0:
                mid = nxt
                view.phases[mid] = Phase(0)
                nxt += 1
                view.h_edges.add(frozenset((p1, mid)))
                view.h_edges.add(frozenset((mid, p2)))
            else:
                view.h_edges.add(frozenset((p1, p2)))
            _assign_output(view, d, b, p1)
            _assign_output(view, d, other, p2)
            claimed.update((p1, p2))
            handled.add(b)
            continue
        s = target
        if parity == 0 and s not in claimed:
            _assign_output(view, d, b, s)
            claimed.add(s)
        elif parity == 1:
            p = nxt
            view.phases[p] = Phase(0)
            nxt += 1
            view.h_edges.add(frozenset((p, s)))
            _assign_output(view, d, b, p)
            claimed.add(p)
        else:
            # plain connection to an already-claimed spider: splice an
            # identity-valued pair of H hops
            p = nxt
            view.phases[p] = Phase(0)
            nxt += 1
            mid = nxt
            view.phases[mid] = Phase(0)
            nxt += 1
            view.h_edges.add(frozenset((p, mid)))
            view.h_edges.add(frozenset((mid, s)))
            _assign_output(view, d, b, p)
            claimed.add(p)
        handled.add(b)
    return view


def _assign_output(view: GraphLikeView, d: Diagram, boundary: int, spider: int) -> None:
    idx = d.outputs.index(boundary)
    while len(view.output_spider) <= idx:
        view.output_spider.append(-1)
    view.output_spider[idx] = spider
