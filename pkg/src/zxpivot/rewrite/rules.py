"""The axiom library as site-addressed rewrites.

Every rule is implemented by three functions sharing a naming scheme:

- a matcher, producing ``MatchSite`` objects whose binding names the
  concrete vertices (and where needed edges or leg partitions) of the site;
- an applier, consuming one site and producing the rewritten diagram;
- an instance builder, producing concrete (lhs, rhs) diagram pairs used by
  ``verify_rule`` and the soundness tests.

Spider rules are arity-parametric, so matching is per-rule structural search
rather than one generic subgraph isomorphism.  Rules never mutate their
input; vertex ids outside the rewrite site are preserved.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable

from ..diagram import H, X, Z, Diagram, VertexKind
from ..errors import PatternError, RuleNotInTheoryError, StaleSiteError
from ..phase import Phase


class RuleId(Enum):
    S1 = "S1"  # fuse same-colour spiders along an edge
    S2 = "S2"  # remove a plain self-loop
    S3 = "S3"  # remove a phase-free degree-2 spider
    PI = "PI"  # pi-rotation commutes through a spider, negating its phase
    C = "C"  # a phase-free opposite dot copies through a spider
    H1 = "H1"  # colour change: X equals Z conjugated by H on every leg
    HPF = "HPF"  # a parallel Z-X edge pair cancels
    BI = "BI"  # bialgebra: complete bipartite block vs a single pair
    H2 = "H2"  # two H boxes in series cancel
    EU = "EU"  # H as three alternating quarter rotations
    HL = "HL"  # pi-rotation vs a spider carrying an H self-loop
    C1 = "C1"  # a pi dot of the opposite colour copies through a spider
    C2 = "C2"  # pi-rotation commutes through a phase-free spider
    L = "L"  # C2 with the pi carried as an H self-loop


class Direction(Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


class TheoryLevel(Enum):
    PLAIN_ZX = "plain"
    ZX_PLUS_HL = "hl"
    ZX_PLUS_EU = "eu"
    ANGLE_FREE = "angle-free"


_FIG_RULES = (
    RuleId.S1,
    RuleId.S2,
    RuleId.S3,
    RuleId.PI,
    RuleId.C,
    RuleId.H1,
    RuleId.HPF,
    RuleId.BI,
    RuleId.H2,
)

THEORY_RULES: dict[TheoryLevel, frozenset[RuleId]] = {
    TheoryLevel.PLAIN_ZX: frozenset(_FIG_RULES),
    TheoryLevel.ZX_PLUS_HL: frozenset(_FIG_RULES) | {RuleId.HL},
    TheoryLevel.ZX_PLUS_EU: frozenset(_FIG_RULES) | {RuleId.HL, RuleId.EU},
    TheoryLevel.ANGLE_FREE: frozenset(
        set(_FIG_RULES) - {RuleId.PI, RuleId.C} | {RuleId.C1, RuleId.L, RuleId.HL}
    ),
}


def rule_available(rule: RuleId, theory: TheoryLevel) -> bool:
    return rule in THEORY_RULES[theory]


def require_rule(rule: RuleId, theory: TheoryLevel) -> None:
    if not rule_available(rule, theory):
        raise RuleNotInTheoryError(f"rule {rule.value} is not part of {theory.value}")


@dataclass(frozen=True)
class MatchSite:
    """A concrete place where a rule applies.

    ``binding`` maps pattern roles to vertex ids (or small tuples for leg
    partitions and vertex groups).  ``stamp`` pins the diagram the site was
    found in; applying a stale site raises.
    """

    rule: RuleId
    direction: Direction
    binding: dict
    stamp: int
    color_swapped: bool = False

    def _frozen_binding(self):
        return tuple(sorted((k, _freeze(v)) for k, v in self.binding.items()))


def _freeze(v):
    if isinstance(v, (list, tuple)):
        return tuple(_freeze(x) for x in v)
    return v


def site(rule: RuleId, direction: Direction, d: Diagram, swapped: bool = False, **binding) -> MatchSite:
    return MatchSite(rule, direction, binding, hash(d), swapped)


def _spider_color(d: Diagram, v: int) -> str | None:
    k = d.kind(v)
    return k.kind if k.is_spider() else None


# ---------------------------------------------------------------------------
# matchers
# ---------------------------------------------------------------------------


def _match_s1(d: Diagram, direction: Direction) -> list[MatchSite]:
    """Forward: one site per plain edge joining two distinct same-colour
    spiders.  Splits (backward) are parametric and built programmatically."""
    if direction is Direction.BACKWARD:
        return []
    out = []
    for a, b in set(d.edges):
        if a == b:
            continue
        ca, cb = _spider_color(d, a), _spider_color(d, b)
        if ca is not None and ca == cb:
            for k in range(d.edges_between(a, b)):
                out.append(site(RuleId.S1, direction, d, u=a, v=b, occurrence=k))
    return out


def _match_s2(d: Diagram, direction: Direction) -> list[MatchSite]:
    if direction is Direction.BACKWARD:
        return []
    out = []
    for v in d.spider_ids():
        for _ in range(d.edges_between(v, v)):
            out.append(site(RuleId.S2, direction, d, v=v))
    return out


def _match_s3(d: Diagram, direction: Direction) -> list[MatchSite]:
    if direction is Direction.BACKWARD:
        return []
    out = []
    for v in d.spider_ids():
        if d.phase(v).is_zero() and d.degree(v) == 2 and d.edges_between(v, v) == 0:
            out.append(site(RuleId.S3, direction, d, v=v))
    return out


def _match_h2(d: Diagram, direction: Direction) -> list[MatchSite]:
    out = []
    if direction is Direction.FORWARD:
        for a, b in set(d.edges):
            if a != b and d.kind(a).kind == H and d.kind(b).kind == H:
                out.append(site(RuleId.H2, direction, d, h1=a, h2=b))
    else:
        for a, b in set(d.edges):
            out.append(site(RuleId.H2, direction, d, edge=(a, b)))
    return out


def _match_h1(d: Diagram, direction: Direction) -> list[MatchSite]:
    """Forward rewrites an X spider into H-conjugated Z; backward a Z."""
    want = X if direction is Direction.FORWARD else Z
    return [
        site(RuleId.H1, direction, d, v=v)
        for v in d.spider_ids()
        if d.kind(v).kind == want
    ]


def _match_hpf(d: Diagram, direction: Direction) -> list[MatchSite]:
    """Plain variant: two parallel edges between a Z and an X spider.
    H variant (binding through_h=True): two parallel H boxes joining two
    same-colour spiders; this is the derived Hopf-through-H cleanup."""
    if direction is Direction.BACKWARD:
        return []
    out = []
    for a, b in set(d.edges):
        if a == b:
            continue
        ca, cb = _spider_color(d, a), _spider_color(d, b)
        if ca and cb and ca != cb and d.edges_between(a, b) >= 2:
            out.append(site(RuleId.HPF, direction, d, u=a, v=b))
    # two H boxes in parallel between the same pair of same-colour spiders
    h_pairs: dict[tuple[int, int], list[int]] = {}
    for h in d.vertex_ids():
        if d.kind(h).kind != H:
            continue
        nb = d.incident(h)
        if len(nb) != 2:
            continue
        ends = []
        for e in nb:
            ends.append(e[0] if e[1] == h else e[1])
        u, v = sorted(ends)
        if u == v or u == h or v == h:
            continue
        cu, cv = _spider_color(d, u), _spider_color(d, v)
        if cu and cu == cv:
            h_pairs.setdefault((u, v), []).append(h)
    for (u, v), hs in h_pairs.items():
        for h1, h2 in itertools.combinations(sorted(hs), 2):
            out.append(site(RuleId.HPF, direction, d, u=u, v=v, h1=h1, h2=h2, through_h=True))
    return out


def _match_pi(d: Diagram, direction: Direction) -> list[MatchSite]:
    """A pi-rotation spider sitting on one leg of an opposite-colour spider."""
    if direction is Direction.BACKWARD:
        return []
    out = []
    for p in d.spider_ids():
        if not d.phase(p).is_pi() or d.degree(p) != 2 or d.edges_between(p, p):
            continue
        cp = _spider_color(d, p)
        for s in d.neighbors(p):
            cs = _spider_color(d, s)
            if (
                cs is not None
                and cs != cp
                and s != p
                and d.edges_between(p, s) == 1
                and d.edges_between(s, s) == 0
            ):
                out.append(site(RuleId.PI, direction, d, pi=p, spider=s))
    return out


def _match_c(d: Diagram, direction: Direction) -> list[MatchSite]:
    """A phase-free degree-1 dot attached to an opposite-colour spider."""
    if direction is Direction.BACKWARD:
        return []
    out = []
    for dot in d.spider_ids():
        if not d.phase(dot).is_zero() or d.degree(dot) != 1:
            continue
        cdot = _spider_color(d, dot)
        s = next(iter(d.neighbors(dot)))
        cs = _spider_color(d, s)
        if cs is not None and cs != cdot and d.edges_between(s, s) == 0:
            out.append(site(RuleId.C, direction, d, dot=dot, spider=s))
    return out


def _match_c1(d: Diagram, direction: Direction) -> list[MatchSite]:
    """Like C but the dot carries phase pi."""
    if direction is Direction.BACKWARD:
        return []
    out = []
    for dot in d.spider_ids():
        if not d.phase(dot).is_pi() or d.degree(dot) != 1:
            continue
        cdot = _spider_color(d, dot)
        s = next(iter(d.neighbors(dot)))
        cs = _spider_color(d, s)
        if cs is not None and cs != cdot and d.edges_between(s, s) == 0:
            out.append(site(RuleId.C1, direction, d, dot=dot, spider=s))
    return out


def _match_c2(d: Diagram, direction: Direction) -> list[MatchSite]:
    """PI restricted to phase-free carriers (the weak-calculus form)."""
    if direction is Direction.BACKWARD:
        return []
    return [
        s
        for s in _match_pi(d, direction)
        if d.phase(s.binding["spider"]).is_zero()
    ]


def _loop_h_boxes(d: Diagram, v: int) -> list[int]:
    """H vertices both of whose edges go to v."""
    out = []
    for h in d.neighbors(v):
        if h != v and d.kind(h).kind == H and d.edges_between(v, h) == 2:
            out.append(h)
    return sorted(out)


def _match_l(d: Diagram, direction: Direction) -> list[MatchSite]:
    """C2 with the pi carried as an H self-loop on the travelling dot."""
    if direction is Direction.BACKWARD:
        return []
    out = []
    for p in d.spider_ids():
        if not d.phase(p).is_zero() or d.edges_between(p, p):
            continue
        loops = _loop_h_boxes(d, p)
        if len(loops) != 1:
            continue
        plain = [n for n in d.neighbors(p) if n not in loops and n != p]
        if len(plain) != 2 or d.degree(p) != 4:
            continue
        cp = _spider_color(d, p)
        for s in plain:
            cs = _spider_color(d, s)
            if cs is not None and cs != cp and d.phase(s).is_zero():
                out.append(site(RuleId.L, direction, d, pi=p, spider=s, loop=loops[0]))
    return out


def _match_hl(d: Diagram, direction: Direction) -> list[MatchSite]:
    """Forward: spider with phase pi -> phase 0 plus an H self-loop.
    Backward: spider carrying an H self-loop -> loop removed, phase + pi."""
    out = []
    if direction is Direction.FORWARD:
        for v in d.spider_ids():
            if d.phase(v).is_pi():
                out.append(site(RuleId.HL, direction, d, v=v))
    else:
        for v in d.spider_ids():
            for h in _loop_h_boxes(d, v):
                out.append(site(RuleId.HL, direction, d, v=v, loop=h))
    return out


def _match_eu(d: Diagram, direction: Direction) -> list[MatchSite]:
    """Forward: an H box -> three alternating quarter turns.  Backward:
    a Z(1/2)-X(1/2)-Z(1/2) chain on a wire -> an H box."""
    out = []
    if direction is Direction.FORWARD:
        for v in d.vertex_ids():
            if d.kind(v).kind == H and d.edges_between(v, v) == 0:
                out.append(site(RuleId.EU, direction, d, h=v))
        return out
    half = Phase(1, 2)
    for mid in d.spider_ids():
        if d.kind(mid).kind != X or d.phase(mid) != half or d.degree(mid) != 2:
            continue
        nbs = sorted(d.neighbors(mid))
        if len(nbs) != 2:
            continue
        a, b = nbs
        ok = all(
            _spider_color(d, t) == Z
            and d.phase(t) == half
            and d.degree(t) == 2
            and d.edges_between(t, t) == 0
            for t in (a, b)
        )
        if ok and a != mid and b != mid:
            out.append(site(RuleId.EU, direction, d, first=a, mid=mid, last=b))
    return out


def bialgebra_block_ok(d: Diagram, x_set: list[int], z_set: list[int]) -> bool:
    """Phase-free complete bipartite X/Z block, single edges, and exactly
    one external leg on every block spider."""
    if not x_set or not z_set:
        return False
    for v, col in [(v, X) for v in x_set] + [(v, Z) for v in z_set]:
        if v not in d or _spider_color(d, v) != col or not d.phase(v).is_zero():
            return False
        if d.edges_between(v, v):
            return False
    for a in x_set:
        for b in z_set:
            if d.edges_between(a, b) != 1:
                return False
    for group in (x_set, z_set):
        for a, b in itertools.combinations(group, 2):
            if d.edges_between(a, b):
                return False
    for v, inside in [(v, z_set) for v in x_set] + [(v, x_set) for v in z_set]:
        external = d.degree(v) - len(inside)
        if external != 1:
            return False
    return True


def _match_bi(d: Diagram, direction: Direction) -> list[MatchSite]:
    """Forward: the 2x2 complete bipartite block; larger blocks are applied
    through ``generalized_bialgebra`` in the derivation module."""
    if direction is Direction.BACKWARD:
        return []
    out = []
    spiders = d.spider_ids()
    xs = sorted(v for v in spiders if _spider_color(d, v) == X)
    zs = sorted(v for v in spiders if _spider_color(d, v) == Z)
    for group_x in itertools.combinations(xs, 2):
        for group_z in itertools.combinations(zs, 2):
            if bialgebra_block_ok(d, list(group_x), list(group_z)):
                out.append(
                    site(RuleId.BI, direction, d, x_set=group_x, z_set=group_z)
                )
    return out


# ---------------------------------------------------------------------------
# appliers
# ---------------------------------------------------------------------------


def _apply_s1(d: Diagram, s: MatchSite) -> Diagram:
    u, v = s.binding["u"], s.binding["v"]
    if (
        u not in d
        or v not in d
        or _spider_color(d, u) is None
        or _spider_color(d, u) != _spider_color(d, v)
        or not d.edges_between(u, v)
    ):
        raise PatternError("S1 site does not match")
    ed = d.edit()
    ed.remove_edge(u, v)
    # remaining edges at v repoint to u; other u-v parallels become loops
    for a, b in list(ed.edges):
        if v in (a, b):
            ed.remove_edge(a, b)
            na = u if a == v else a
            nb = u if b == v else b
            ed.add_edge(na, nb)
    ed.add_phase(u, d.phase(v))
    del ed.vertices[v]
    return ed.finish()


def split_spider(
    d: Diagram,
    v: int,
    keep_slots: Iterable[int],
    new_phase_on_new: Phase | None = None,
) -> tuple[Diagram, int]:
    """S1 read backwards: split ``v`` into two spiders joined by a plain edge.

    ``keep_slots`` indexes into the incident edge-end list of ``v`` (loops
    occupy two slots); the indexed ends stay on ``v``, all others move to the
    fresh spider.  The moved spider gets phase ``new_phase_on_new`` (default
    zero) and that amount is subtracted from ``v``.
    """
    ends = []
    for idx, (a, b) in enumerate(d.edges):
        if a == v:
            ends.append((idx, 0))
        if b == v:
            ends.append((idx, 1))
    keep = set(keep_slots)
    color = _spider_color(d, v)
    if color is None:
        raise PatternError("can only split spiders")
    moved_phase = new_phase_on_new if new_phase_on_new is not None else Phase(0)
    ed = d.edit()
    w = ed.add_vertex(VertexKind(color, moved_phase))
    ed.add_phase(v, -moved_phase)
    edges = list(d.edges)
    new_edges = []
    for idx, (a, b) in enumerate(edges):
        na, nb = a, b
        if a == v and (idx, 0) not in keep:
            na = w
        if b == v and (idx, 1) not in keep:
            nb = w
        new_edges.append((na, nb))
    ed.edges = [tuple(sorted(e)) for e in new_edges]
    ed.add_edge(v, w)
    return ed.finish(), w


def _apply_s2(d: Diagram, s: MatchSite) -> Diagram:
    v = s.binding["v"]
    if v not in d or not d.edges_between(v, v):
        raise PatternError("S2 site does not match")
    ed = d.edit()
    ed.remove_edge(v, v)
    return ed.finish()


def _apply_s3(d: Diagram, s: MatchSite) -> Diagram:
    v = s.binding["v"]
    if (
        v not in d
        or _spider_color(d, v) is None
        or not d.phase(v).is_zero()
        or d.degree(v) != 2
        or d.edges_between(v, v)
    ):
        raise PatternError("S3 site does not match")
    ends = []
    for a, b in d.incident(v):
        ends.append(b if a == v else a)
    ed = d.edit()
    ed.remove_vertex(v)
    ed.add_edge(ends[0], ends[1])
    return ed.finish()


def insert_identity_spider(d: Diagram, a: int, b: int, color: str = Z) -> tuple[Diagram, int]:
    """S3 read backwards: subdivide an edge with a phase-free spider."""
    if not d.edges_between(a, b):
        raise PatternError("no such edge to subdivide")
    ed = d.edit()
    w = ed.add_vertex(VertexKind(color, Phase(0)))
    ed.remove_edge(a, b)
    ed.add_edge(a, w)
    ed.add_edge(w, b)
    return ed.finish(), w


def _apply_h2(d: Diagram, s: MatchSite) -> Diagram:
    if s.direction is Direction.FORWARD:
        h1, h2 = s.binding["h1"], s.binding["h2"]
        if (
            h1 not in d
            or h2 not in d
            or d.kind(h1).kind != H
            or d.kind(h2).kind != H
            or not d.edges_between(h1, h2)
        ):
            raise PatternError("H2 site does not match")
        ed = d.edit()
        if d.edges_between(h1, h2) == 2:
            # a closed HH loop is the scalar 2; keep it as an isolated dot
            ed.remove_vertex(h1)
            ed.remove_vertex(h2)
            ed.add_vertex(VertexKind(Z, Phase(0)))
            return ed.finish()
        outer = []
        for h, other in ((h1, h2), (h2, h1)):
            remaining = []
            for a, b in d.incident(h):
                remaining.append(b if a == h else a)
            remaining.remove(other)
            outer.append(remaining[0])
        ed.remove_vertex(h1)
        ed.remove_vertex(h2)
        ed.add_edge(outer[0], outer[1])
        return ed.finish()
    a, b = s.binding["edge"]
    if not d.edges_between(a, b):
        raise PatternError("H2 insertion edge missing")
    ed = d.edit()
    h1 = ed.add_vertex(VertexKind(H))
    h2 = ed.add_vertex(VertexKind(H))
    ed.remove_edge(a, b)
    ed.add_edge(a, h1)
    ed.add_edge(h1, h2)
    ed.add_edge(h2, b)
    return ed.finish()


def _apply_h1(d: Diagram, s: MatchSite) -> Diagram:
    v = s.binding["v"]
    want = X if s.direction is Direction.FORWARD else Z
    if v not in d or d.kind(v).kind != want:
        raise PatternError("H1 site does not match")
    ed = d.edit()
    ed.set_kind(v, d.kind(v).swapped())
    for idx, (a, b) in enumerate(list(ed.edges)):
        if v not in (a, b):
            continue
        if a == b == v:
            # a self-loop gets an H box on each traversal end
            ed.remove_edge(a, b)
            ha = ed.add_vertex(VertexKind(H))
            hb = ed.add_vertex(VertexKind(H))
            ed.add_edge(v, ha)
            ed.add_edge(ha, hb)
            ed.add_edge(hb, v)
        else:
            other = b if a == v else a
            ed.remove_edge(a, b)
            h = ed.add_vertex(VertexKind(H))
            ed.add_edge(v, h)
            ed.add_edge(h, other)
    return ed.finish()


def _apply_hpf(d: Diagram, s: MatchSite) -> Diagram:
    u, v = s.binding["u"], s.binding["v"]
    if s.binding.get("through_h"):
        h1, h2 = s.binding["h1"], s.binding["h2"]
        for h in (h1, h2):
            if h not in d or d.kind(h).kind != H:
                raise PatternError("HPF site does not match")
            if not (d.edges_between(u, h) and d.edges_between(v, h)):
                raise PatternError("HPF site does not match")
        ed = d.edit()
        ed.remove_vertex(h1)
        ed.remove_vertex(h2)
        return ed.finish()
    if u not in d or v not in d or d.edges_between(u, v) < 2:
        raise PatternError("HPF site does not match")
    ed = d.edit()
    ed.remove_edge(u, v)
    ed.remove_edge(u, v)
    return ed.finish()


def _apply_pi_family(d: Diagram, s: MatchSite, require_zero: bool) -> Diagram:
    p, v = s.binding["pi"], s.binding["spider"]
    if p not in d or v not in d:
        raise PatternError("site vertices missing")
    cp, cv = _spider_color(d, p), _spider_color(d, v)
    if (
        cp is None
        or cv is None
        or cp == cv
        or not d.phase(p).is_pi()
        or d.degree(p) != 2
        or not d.edges_between(p, v)
    ):
        raise PatternError("pi-commutation site does not match")
    if require_zero and not d.phase(v).is_zero():
        raise PatternError("carrier spider must be phase-free")
    # the other leg of the pi dot
    others = [n for n in d.neighbors(p) if n != v]
    ed = d.edit()
    ed.set_phase(v, -d.phase(v))
    # remove the pi dot, reconnecting its far leg directly to the spider
    far = others[0] if others else None
    ed.remove_vertex(p)
    if far is not None:
        ed.add_edge(far, v)
    # put a fresh pi dot of colour cp on every other leg of v
    for idx, (a, b) in enumerate(list(ed.edges)):
        if v not in (a, b):
            continue
        if far is not None and tuple(sorted((a, b))) == tuple(sorted((far, v))):
            far = None  # the incoming leg itself carries no new dot
            continue
        other = b if a == v else a
        if a == b == v:
            continue  # self-loops commute with the rotation
        ed.remove_edge(a, b)
        dot = ed.add_vertex(VertexKind(cp, Phase(1)))
        ed.add_edge(v, dot)
        ed.add_edge(dot, other)
    return ed.finish()


def _apply_pi(d: Diagram, s: MatchSite) -> Diagram:
    return _apply_pi_family(d, s, require_zero=False)


def _apply_c2(d: Diagram, s: MatchSite) -> Diagram:
    return _apply_pi_family(d, s, require_zero=True)


def _apply_copy_family(d: Diagram, s: MatchSite, dot_phase: Phase) -> Diagram:
    dot, v = s.binding["dot"], s.binding["spider"]
    if dot not in d or v not in d:
        raise PatternError("site vertices missing")
    cdot, cv = _spider_color(d, dot), _spider_color(d, v)
    if (
        cdot is None
        or cv is None
        or cdot == cv
        or d.phase(dot) != dot_phase
        or d.degree(dot) != 1
        or not d.phase(v).is_zero()
    ):
        raise PatternError("copy site does not match")
    ed = d.edit()
    ed.remove_vertex(dot)
    ed.remove_vertex(v)
    for a, b in d.edges:
        if v in (a, b) and dot not in (a, b):
            if a == b:
                continue
            other = b if a == v else a
            nd = ed.add_vertex(VertexKind(cdot, dot_phase))
            ed.add_edge(nd, other)
    return ed.finish()


def _apply_c(d: Diagram, s: MatchSite) -> Diagram:
    return _apply_copy_family(d, s, Phase(0))


def _apply_c1(d: Diagram, s: MatchSite) -> Diagram:
    return _apply_copy_family(d, s, Phase(1))


def _apply_l(d: Diagram, s: MatchSite) -> Diagram:
    p, v, loop = s.binding["pi"], s.binding["spider"], s.binding["loop"]
    if p not in d or v not in d or loop not in d:
        raise PatternError("site vertices missing")
    cp, cv = _spider_color(d, p), _spider_color(d, v)
    if (
        cp is None
        or cv is None
        or cp == cv
        or not d.phase(p).is_zero()
        or not d.phase(v).is_zero()
        or d.kind(loop).kind != H
        or d.edges_between(p, loop) != 2
        or not d.edges_between(p, v)
    ):
        raise PatternError("loop-copy site does not match")
    others = [n for n in d.neighbors(p) if n not in (v, loop)]
    ed = d.edit()
    ed.set_phase(v, -d.phase(v))
    far = others[0] if others else None
    ed.remove_vertex(loop)
    ed.remove_vertex(p)
    if far is not None:
        ed.add_edge(far, v)
    for a, b in list(ed.edges):
        if v not in (a, b) or a == b:
            continue
        if far is not None and tuple(sorted((a, b))) == tuple(sorted((far, v))):
            far = None
            continue
        other = b if a == v else a
        ed.remove_edge(a, b)
        nd = ed.add_vertex(VertexKind(cp, Phase(0)))
        nh = ed.add_vertex(VertexKind(H))
        ed.add_edge(v, nd)
        ed.add_edge(nd, other)
        ed.add_edge(nd, nh)
        ed.add_edge(nd, nh)
    return ed.finish()


def _apply_hl(d: Diagram, s: MatchSite) -> Diagram:
    v = s.binding["v"]
    if v not in d or _spider_color(d, v) is None:
        raise PatternError("HL site does not match")
    if s.direction is Direction.FORWARD:
        if not d.phase(v).is_pi():
            raise PatternError("HL forward needs phase pi")
        ed = d.edit()
        ed.set_phase(v, Phase(0))
        h = ed.add_vertex(VertexKind(H))
        ed.add_edge(v, h)
        ed.add_edge(v, h)
        return ed.finish()
    loop = s.binding["loop"]
    if loop not in d or d.kind(loop).kind != H or d.edges_between(v, loop) != 2:
        raise PatternError("HL backward needs an H self-loop")
    ed = d.edit()
    ed.remove_vertex(loop)
    ed.add_phase(v, Phase(1))
    return ed.finish()


def _apply_eu(d: Diagram, s: MatchSite) -> Diagram:
    half = Phase(1, 2)
    if s.direction is Direction.FORWARD:
        h = s.binding["h"]
        if h not in d or d.kind(h).kind != H:
            raise PatternError("EU site does not match")
        ends = []
        for a, b in d.incident(h):
            ends.append(b if a == h else a)
        if len(ends) != 2:
            raise PatternError("EU needs a 2-legged H box")
        ed = d.edit()
        ed.remove_vertex(h)
        z1 = ed.add_vertex(VertexKind(Z, half))
        xm = ed.add_vertex(VertexKind(X, half))
        z2 = ed.add_vertex(VertexKind(Z, half))
        ed.add_edge(ends[0], z1)
        ed.add_edge(z1, xm)
        ed.add_edge(xm, z2)
        ed.add_edge(z2, ends[1])
        return ed.finish()
    a, mid, b = s.binding["first"], s.binding["mid"], s.binding["last"]
    for v, col in ((a, Z), (mid, X), (b, Z)):
        if v not in d or _spider_color(d, v) != col or d.phase(v) != half or d.degree(v) != 2:
            raise PatternError("EU backward chain does not match")
    outer_a = [n for n in d.neighbors(a) if n != mid]
    outer_b = [n for n in d.neighbors(b) if n != mid]
    if len(outer_a) != 1 or len(outer_b) != 1:
        raise PatternError("EU backward chain does not match")
    ed = d.edit()
    ed.remove_vertex(a)
    ed.remove_vertex(mid)
    ed.remove_vertex(b)
    h = ed.add_vertex(VertexKind(H))
    ed.add_edge(outer_a[0], h)
    ed.add_edge(h, outer_b[0])
    return ed.finish()


def _apply_bi(d: Diagram, s: MatchSite) -> Diagram:
    from .derive import apply_generalized_bialgebra

    return apply_generalized_bialgebra(
        d, list(s.binding["x_set"]), list(s.binding["z_set"])
    )


_MATCHERS: dict[RuleId, Callable] = {
    RuleId.S1: _match_s1,
    RuleId.S2: _match_s2,
    RuleId.S3: _match_s3,
    RuleId.PI: _match_pi,
    RuleId.C: _match_c,
    RuleId.H1: _match_h1,
    RuleId.HPF: _match_hpf,
    RuleId.BI: _match_bi,
    RuleId.H2: _match_h2,
    RuleId.EU: _match_eu,
    RuleId.HL: _match_hl,
    RuleId.C1: _match_c1,
    RuleId.C2: _match_c2,
    RuleId.L: _match_l,
}

_APPLIERS: dict[RuleId, Callable] = {
    RuleId.S1: _apply_s1,
    RuleId.S2: _apply_s2,
    RuleId.S3: _apply_s3,
    RuleId.PI: _apply_pi,
    RuleId.C: _apply_c,
    RuleId.H1: _apply_h1,
    RuleId.HPF: _apply_hpf,
    RuleId.BI: _apply_bi,
    RuleId.H2: _apply_h2,
    RuleId.EU: _apply_eu,
    RuleId.HL: _apply_hl,
    RuleId.C1: _apply_c1,
    RuleId.C2: _apply_c2,
    RuleId.L: _apply_l,
}


# matchers already insensitive to the colour exchange; the rest gain their
# swapped variants through a second pass on the colour-swapped diagram
_COLOR_SYMMETRIC = frozenset(
    {
        RuleId.S1,
        RuleId.S2,
        RuleId.S3,
        RuleId.PI,
        RuleId.C,
        RuleId.H1,
        RuleId.HPF,
        RuleId.H2,
        RuleId.HL,
        RuleId.C1,
        RuleId.C2,
        RuleId.L,
    }
)


def find_matches(
    d: Diagram,
    rule: RuleId,
    direction: Direction = Direction.FORWARD,
    theory: TheoryLevel = TheoryLevel.ZX_PLUS_EU,
) -> list[MatchSite]:
    require_rule(rule, theory)
    sites = _MATCHERS[rule](d, direction)
    if rule not in _COLOR_SYMMETRIC:
        for s in _MATCHERS[rule](d.color_swap(), direction):
            sites.append(
                MatchSite(s.rule, s.direction, s.binding, hash(d), color_swapped=True)
            )
    seen = set()
    uniq = []
    for s in sites:
        key = (s.rule, s.direction, s.color_swapped, s._frozen_binding())
        if key not in seen:
            seen.add(key)
            uniq.append(s)
    return uniq


def apply_rule(d: Diagram, s: MatchSite, check_stamp: bool = True) -> Diagram:
    """Apply a matched rule at its site, returning the rewritten diagram."""
    if check_stamp and s.stamp != hash(d):
        raise StaleSiteError("site was matched against a different diagram")
    if s.color_swapped:
        res = _APPLIERS[s.rule](d.color_swap(), s)
        return res.color_swap()
    return _APPLIERS[s.rule](d, s)
