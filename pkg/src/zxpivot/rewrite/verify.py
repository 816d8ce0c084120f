"""Soundness verification of the rule library under all three
interpretations: the standard one, the phase-erasing one, and the
diagram-doubling one.

Instances are concrete lhs diagrams with a matched site; the rhs is the
implemented rewrite's output, so verification covers exactly what
``apply_rule`` does.  The three-way report is the separation table: the
plain axioms hold everywhere, the Euler rule only under the standard
interpretation, and the loop rule everywhere except the phase-erasing one.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from ..diagram import BOUNDARY, H, X, Z, Diagram, VertexKind
from ..phase import Phase
from ..semantics import (
    DEFAULT_TOL,
    EqMode,
    EqResult,
    eq_up_to,
    flatten,
    interpret,
    interpret_zero,
)
from .rules import Direction, MatchSite, RuleId, apply_rule

STABILIZER_PHASES = (Phase(0), Phase(1, 2), Phase(1), Phase(3, 2))


def _attach_boundaries(
    vertices: dict[int, VertexKind],
    edges: list[tuple[int, int]],
    in_of: list[int],
    out_of: list[int],
) -> Diagram:
    """Add one boundary per requested leg, in the given vertex order."""
    nxt = max(vertices, default=-1) + 1
    inputs, outputs = [], []
    for v in in_of:
        vertices[nxt] = VertexKind(BOUNDARY)
        edges.append((v, nxt))
        inputs.append(nxt)
        nxt += 1
    for v in out_of:
        vertices[nxt] = VertexKind(BOUNDARY)
        edges.append((v, nxt))
        outputs.append(nxt)
        nxt += 1
    return Diagram(vertices, edges, inputs, outputs)


Instance = tuple[str, Diagram, MatchSite]


def _s1_instances(phases) -> list[Instance]:
    out = []
    shapes = [(1, 1, 1, 1), (2, 1, 1, 2), (0, 2, 2, 0), (2, 2, 1, 1)]
    for (n1, m1, n2, m2), a, b in [
        (s, a, b) for s in shapes for a in phases[:2] for b in phases[1:3]
    ]:
        vertices = {0: VertexKind(Z, a), 1: VertexKind(Z, b)}
        edges = [(0, 1)]
        d = _attach_boundaries(vertices, edges, [0] * n1 + [1] * n2, [0] * m1 + [1] * m2)
        s = MatchSite(RuleId.S1, Direction.FORWARD, {"u": 0, "v": 1}, hash(d))
        out.append((f"S1 {n1}{m1}+{n2}{m2} {a},{b}", d, s))
    # a doubly-connected pair: the spare edge must become a self-loop
    vertices = {0: VertexKind(Z, phases[1]), 1: VertexKind(Z, phases[2])}
    edges = [(0, 1), (0, 1)]
    d = _attach_boundaries(vertices, edges, [0], [1])
    out.append(
        ("S1 parallel pair", d, MatchSite(RuleId.S1, Direction.FORWARD, {"u": 0, "v": 1}, hash(d)))
    )
    return out


def _s2_instances(phases) -> list[Instance]:
    out = []
    for n, m in [(1, 1), (2, 1), (0, 2)]:
        for a in phases[:3]:
            vertices = {0: VertexKind(Z, a)}
            edges = [(0, 0)]
            d = _attach_boundaries(vertices, edges, [0] * n, [0] * m)
            out.append(
                (f"S2 {n}->{m} {a}", d, MatchSite(RuleId.S2, Direction.FORWARD, {"v": 0}, hash(d)))
            )
    return out


def _s3_instances(phases) -> list[Instance]:
    d = Diagram.spider(Z, 1, 1, Phase(0))
    return [("S3 wire", d, MatchSite(RuleId.S3, Direction.FORWARD, {"v": 0}, hash(d)))]


def _pi_like_instances(rule: RuleId, phases, carrier_phases) -> list[Instance]:
    out = []
    for n, m in [(1, 1), (1, 2), (2, 1), (1, 3)]:
        for a in carrier_phases:
            vertices = {0: VertexKind(Z, a), 1: VertexKind(X, Phase(1))}
            edges = [(0, 1)]
            d = _attach_boundaries(vertices, edges, [1] + [0] * (n - 1), [0] * m)
            s = MatchSite(rule, Direction.FORWARD, {"pi": 1, "spider": 0}, hash(d))
            out.append((f"{rule.value} {n}->{m} carrier {a}", d, s))
    return out


def _pi_instances(phases) -> list[Instance]:
    return _pi_like_instances(RuleId.PI, phases, phases)


def _c2_instances(phases) -> list[Instance]:
    return _pi_like_instances(RuleId.C2, phases, [Phase(0)])


def _copy_like_instances(rule: RuleId, dot_phase: Phase) -> list[Instance]:
    out = []
    for n, m in [(0, 1), (0, 2), (1, 2), (0, 3)]:
        vertices = {0: VertexKind(Z, Phase(0)), 1: VertexKind(X, dot_phase)}
        edges = [(0, 1)]
        d = _attach_boundaries(vertices, edges, [0] * n, [0] * m)
        s = MatchSite(rule, Direction.FORWARD, {"dot": 1, "spider": 0}, hash(d))
        out.append((f"{rule.value} {n}->{m}", d, s))
    return out


def _c_instances(phases) -> list[Instance]:
    return _copy_like_instances(RuleId.C, Phase(0))


def _c1_instances(phases) -> list[Instance]:
    return _copy_like_instances(RuleId.C1, Phase(1))


def _h1_instances(phases) -> list[Instance]:
    out = []
    for n, m in [(1, 1), (0, 1), (2, 1), (2, 2)]:
        for b in phases:
            d = Diagram.spider(X, n, m, b)
            s = MatchSite(RuleId.H1, Direction.FORWARD, {"v": 0}, hash(d))
            out.append((f"H1 {n}->{m} {b}", d, s))
    return out


def _hpf_instances(phases) -> list[Instance]:
    out = []
    for a in phases[:2]:
        for b in phases[:2]:
            vertices = {0: VertexKind(Z, a), 1: VertexKind(X, b)}
            edges = [(0, 1), (0, 1)]
            d = _attach_boundaries(vertices, edges, [0], [1])
            s = MatchSite(RuleId.HPF, Direction.FORWARD, {"u": 0, "v": 1}, hash(d))
            out.append((f"HPF {a},{b}", d, s))
    # the derived through-H variant on a same-colour pair
    vertices = {
        0: VertexKind(Z, phases[1]),
        1: VertexKind(Z, phases[2]),
        2: VertexKind(H),
        3: VertexKind(H),
    }
    edges = [(0, 2), (1, 2), (0, 3), (1, 3)]
    d = _attach_boundaries(vertices, edges, [0], [1])
    s = MatchSite(
        RuleId.HPF,
        Direction.FORWARD,
        {"u": 0, "v": 1, "h1": 2, "h2": 3, "through_h": True},
        hash(d),
    )
    out.append(("HPF through H", d, s))
    return out


def _bi_instances(phases) -> list[Instance]:
    vertices = {
        0: VertexKind(X, Phase(0)),
        1: VertexKind(X, Phase(0)),
        2: VertexKind(Z, Phase(0)),
        3: VertexKind(Z, Phase(0)),
    }
    edges = [(0, 2), (0, 3), (1, 2), (1, 3)]
    d = _attach_boundaries(vertices, edges, [2, 3], [0, 1])
    s = MatchSite(
        RuleId.BI, Direction.FORWARD, {"x_set": (0, 1), "z_set": (2, 3)}, hash(d)
    )
    return [("BI 2x2", d, s)]


def _h2_instances(phases) -> list[Instance]:
    b = VertexKind(BOUNDARY)
    d = Diagram(
        {0: VertexKind(H), 1: VertexKind(H), 2: b, 3: b},
        [(0, 1), (0, 2), (1, 3)],
        [2],
        [3],
    )
    s = MatchSite(RuleId.H2, Direction.FORWARD, {"h1": 0, "h2": 1}, hash(d))
    wire = Diagram.wire()
    s2 = MatchSite(RuleId.H2, Direction.BACKWARD, {"edge": (0, 1)}, hash(wire))
    return [("H2 cancel", d, s), ("H2 insert", wire, s2)]


def _eu_instances(phases) -> list[Instance]:
    d = Diagram.h_box()
    s = MatchSite(RuleId.EU, Direction.FORWARD, {"h": 0}, hash(d))
    half = Phase(1, 2)
    b = VertexKind(BOUNDARY)
    chain = Diagram(
        {
            0: VertexKind(Z, half),
            1: VertexKind(X, half),
            2: VertexKind(Z, half),
            3: b,
            4: b,
        },
        [(0, 1), (1, 2), (0, 3), (2, 4)],
        [3],
        [4],
    )
    s2 = MatchSite(
        RuleId.EU, Direction.BACKWARD, {"first": 0, "mid": 1, "last": 2}, hash(chain)
    )
    return [("EU decompose", d, s), ("EU recompose", chain, s2)]


def _hl_instances(phases) -> list[Instance]:
    out = []
    for n, m in [(1, 1), (0, 1), (2, 1), (2, 2)]:
        d = Diagram.spider(Z, n, m, Phase(1))
        s = MatchSite(RuleId.HL, Direction.FORWARD, {"v": 0}, hash(d))
        out.append((f"HL {n}->{m} to loop", d, s))
    # backward: loop absorbed into a pi phase
    vertices = {0: VertexKind(Z, Phase(0)), 1: VertexKind(H)}
    edges = [(0, 1), (0, 1)]
    d = _attach_boundaries(vertices, edges, [0], [0])
    s = MatchSite(RuleId.HL, Direction.BACKWARD, {"v": 0, "loop": 1}, hash(d))
    out.append(("HL loop to pi", d, s))
    return out


def _l_instances(phases) -> list[Instance]:
    out = []
    for n, m in [(1, 1), (1, 2), (1, 3)]:
        vertices = {
            0: VertexKind(Z, Phase(0)),
            1: VertexKind(X, Phase(0)),
            2: VertexKind(H),
        }
        edges = [(0, 1), (1, 2), (1, 2)]
        d = _attach_boundaries(vertices, edges, [1] + [0] * (n - 1), [0] * m)
        s = MatchSite(
            RuleId.L, Direction.FORWARD, {"pi": 1, "spider": 0, "loop": 2}, hash(d)
        )
        out.append((f"L {n}->{m}", d, s))
    return out


_BUILDERS = {
    RuleId.S1: _s1_instances,
    RuleId.S2: _s2_instances,
    RuleId.S3: _s3_instances,
    RuleId.PI: _pi_instances,
    RuleId.C: _c_instances,
    RuleId.H1: _h1_instances,
    RuleId.HPF: _hpf_instances,
    RuleId.BI: _bi_instances,
    RuleId.H2: _h2_instances,
    RuleId.EU: _eu_instances,
    RuleId.HL: _hl_instances,
    RuleId.C1: _c1_instances,
    RuleId.C2: _c2_instances,
    RuleId.L: _l_instances,
}


def rule_instances(
    rule: RuleId, phases=STABILIZER_PHASES, include_swapped: bool = True
) -> list[tuple[str, Diagram, Diagram]]:
    """Concrete (label, lhs, rhs) pairs with rhs produced by the implemented
    rewrite; colour-swapped twins included."""
    pairs = []
    for label, lhs, site in _BUILDERS[rule](list(phases)):
        rhs = apply_rule(lhs, site)
        pairs.append((label, lhs, rhs))
        if include_swapped:
            pairs.append((label + " (swapped)", lhs.color_swap(), rhs.color_swap()))
    return pairs


@dataclass
class InstanceReport:
    label: str
    standard: EqResult
    zero: EqResult
    flat: EqResult


@dataclass
class RuleReport:
    rule: RuleId
    instances: list[InstanceReport] = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return all(i.standard.equal for i in self.instances)

    @property
    def sound_zero(self) -> bool:
        return all(i.zero.equal for i in self.instances)

    @property
    def sound_flat(self) -> bool:
        return all(i.flat.equal for i in self.instances)

    def row(self) -> dict:
        return {
            "rule": self.rule.value,
            "standard": self.sound,
            "zero": self.sound_zero,
            "flat": self.sound_flat,
        }


def _check_instance(item: tuple[str, Diagram, Diagram], tol: float) -> InstanceReport:
    label, lhs, rhs = item
    standard = eq_up_to(interpret(lhs), interpret(rhs), EqMode.UP_TO_SCALAR, tol)
    zero = eq_up_to(interpret_zero(lhs), interpret_zero(rhs), EqMode.UP_TO_SCALAR, tol)
    flat = eq_up_to(
        interpret(flatten(lhs)), interpret(flatten(rhs)), EqMode.UP_TO_SCALAR, tol
    )
    return InstanceReport(label, standard, zero, flat)


def verify_rule(
    rule: RuleId,
    phases=STABILIZER_PHASES,
    tol: float = DEFAULT_TOL,
    workers: int = 0,
) -> RuleReport:
    """Check every sampled instance of a rule under all three
    interpretations."""
    items = rule_instances(rule, phases)
    report = RuleReport(rule)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            report.instances = list(pool.map(lambda it: _check_instance(it, tol), items))
    else:
        report.instances = [_check_instance(it, tol) for it in items]
    return report


def verify_axioms(
    rules: list[RuleId] | None = None,
    phases=STABILIZER_PHASES,
    tol: float = DEFAULT_TOL,
    workers: int = 0,
) -> dict[RuleId, RuleReport]:
    """The full separation table over the rule registry."""
    rules = rules or list(RuleId)
    return {r: verify_rule(r, phases, tol, workers) for r in rules}
