"""Open-multigraph diagrams over Z/X spiders, Hadamard boxes and boundaries.

A diagram is a finite undirected multigraph (self-loops allowed on spiders)
whose degree-one ``B`` vertices are split into an ordered input list and an
ordered output list.  Diagrams are immutable values: every operation returns
a new diagram, so they can be shared freely across threads.

Parallel edges and self-loops are first-class: the Hopf and antiloop rules
consume them, so the edge carrier is a multiset rather than a set.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ArityMismatchError, MalformedDiagramError
from .phase import Phase

Z = "Z"
X = "X"
H = "H"
BOUNDARY = "B"

_SPIDERS = (Z, X)


@dataclass(frozen=True)
class VertexKind:
    """What a vertex is: a phased spider, a Hadamard box, or a boundary."""

    kind: str
    phase: Phase | None = None

    def __post_init__(self):
        if self.kind in _SPIDERS:
            if self.phase is None:
                object.__setattr__(self, "phase", Phase(0))
        elif self.kind in (H, BOUNDARY):
            if self.phase is not None:
                raise MalformedDiagramError(f"{self.kind} vertices carry no phase")
        else:
            raise MalformedDiagramError(f"unknown vertex kind {self.kind!r}")

    def is_spider(self) -> bool:
        return self.kind in _SPIDERS

    def swapped(self) -> "VertexKind":
        """Z <-> X with the phase kept; H and B unchanged."""
        if self.kind == Z:
            return VertexKind(X, self.phase)
        if self.kind == X:
            return VertexKind(Z, self.phase)
        return self


def _norm_edge(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


class Diagram:
    """An open graph with ordered boundaries.  Immutable."""

    __slots__ = ("_vertices", "_edges", "_inputs", "_outputs", "_adj", "_hash")

    def __init__(
        self,
        vertices: Mapping[int, VertexKind],
        edges: Iterable[tuple[int, int]],
        inputs: Sequence[int] = (),
        outputs: Sequence[int] = (),
    ):
        self._vertices: dict[int, VertexKind] = dict(vertices)
        self._edges: tuple[tuple[int, int], ...] = tuple(
            sorted(_norm_edge(a, b) for a, b in edges)
        )
        self._inputs: tuple[int, ...] = tuple(inputs)
        self._outputs: tuple[int, ...] = tuple(outputs)
        self._adj: dict[int, list[int]] | None = None
        self._hash: int | None = None

    # -- basic queries ----------------------------------------------------

    @property
    def vertices(self) -> dict[int, VertexKind]:
        return dict(self._vertices)

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return self._edges

    @property
    def inputs(self) -> tuple[int, ...]:
        return self._inputs

    @property
    def outputs(self) -> tuple[int, ...]:
        return self._outputs

    @property
    def n_inputs(self) -> int:
        return len(self._inputs)

    @property
    def n_outputs(self) -> int:
        return len(self._outputs)

    def kind(self, v: int) -> VertexKind:
        return self._vertices[v]

    def phase(self, v: int) -> Phase:
        p = self._vertices[v].phase
        if p is None:
            raise MalformedDiagramError(f"vertex {v} carries no phase")
        return p

    def __contains__(self, v: int) -> bool:
        return v in self._vertices

    def vertex_ids(self) -> Iterator[int]:
        return iter(self._vertices)

    def _adjacency(self) -> dict[int, list[int]]:
        if self._adj is None:
            adj: dict[int, list[int]] = {v: [] for v in self._vertices}
            for a, b in self._edges:
                adj[a].append(b)
                if a != b:
                    adj[b].append(a)
                else:
                    adj[a].append(a)
            self._adj = adj
        return self._adj

    def degree(self, v: int) -> int:
        """Total degree; a self-loop contributes 2."""
        return len(self._adjacency()[v])

    def neighbors(self, v: int) -> set[int]:
        return set(self._adjacency()[v])

    def edges_between(self, a: int, b: int) -> int:
        """Multiplicity of the edge {a, b} (self-loop count when a == b)."""
        e = _norm_edge(a, b)
        return sum(1 for f in self._edges if f == e)

    def incident(self, v: int) -> list[tuple[int, int]]:
        return [e for e in self._edges if v in e]

    def interior_ids(self) -> list[int]:
        return [v for v, k in self._vertices.items() if k.kind != BOUNDARY]

    def spider_ids(self) -> list[int]:
        return [v for v, k in self._vertices.items() if k.is_spider()]

    def fresh_id(self) -> int:
        return max(self._vertices, default=-1) + 1

    # -- equality and hashing ---------------------------------------------

    def _key(self):
        return (
            tuple(sorted((v, k.kind, k.phase) for v, k in self._vertices.items())),
            self._edges,
            self._inputs,
            self._outputs,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Diagram):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self) -> str:
        return (
            f"Diagram({len(self._vertices)} vertices, {len(self._edges)} edges, "
            f"{self.n_inputs}->{self.n_outputs})"
        )

    # -- validation ---------------------------------------------------------

    def validate(self) -> list[str]:
        """Return a list of invariant violations (empty when well-formed)."""
        problems: list[str] = []
        boundary = {v for v, k in self._vertices.items() if k.kind == BOUNDARY}
        declared = set(self._inputs) | set(self._outputs)
        if len(set(self._inputs)) != len(self._inputs):
            problems.append("duplicate vertex in inputs")
        if len(set(self._outputs)) != len(self._outputs):
            problems.append("duplicate vertex in outputs")
        overlap = set(self._inputs) & set(self._outputs)
        for v in sorted(overlap):
            problems.append(f"vertex {v} listed as both input and output")
        for v in sorted(declared - boundary):
            problems.append(f"declared boundary {v} is not a B vertex")
        for v in sorted(boundary - declared):
            problems.append(f"B vertex {v} is neither input nor output")
        for a, b in self._edges:
            for v in (a, b):
                if v not in self._vertices:
                    problems.append(f"edge ({a},{b}) references unknown vertex {v}")
        for v, k in self._vertices.items():
            deg = sum(2 if (a == b == v) else 1 for a, b in self._edges if v in (a, b))
            if k.kind == BOUNDARY and deg != 1:
                problems.append(f"boundary vertex {v} has degree {deg}, expected 1")
            if k.kind == H and deg != 2:
                problems.append(f"H vertex {v} has degree {deg}, expected 2")
        return problems

    def check(self) -> "Diagram":
        problems = self.validate()
        if problems:
            raise MalformedDiagramError("; ".join(problems))
        return self

    # -- editing -------------------------------------------------------------

    def edit(self) -> "DiagramEditor":
        return DiagramEditor(self)

    def relabeled(self, mapping: Mapping[int, int]) -> "Diagram":
        """Rename vertex ids; ids absent from the mapping are kept."""
        m = lambda v: mapping.get(v, v)
        return Diagram(
            {m(v): k for v, k in self._vertices.items()},
            [(m(a), m(b)) for a, b in self._edges],
            [m(v) for v in self._inputs],
            [m(v) for v in self._outputs],
        )

    # -- categorical structure ------------------------------------------------

    def compose(self, other: "Diagram") -> "Diagram":
        """Plug this diagram's outputs into ``other``'s inputs, in order."""
        if self.n_outputs != other.n_inputs:
            raise ArityMismatchError(
                f"cannot compose {self.n_outputs} outputs with {other.n_inputs} inputs"
            )
        shift = self.fresh_id()
        g = other.relabeled({v: v + shift for v in other._vertices})
        vertices = {**self._vertices, **g._vertices}
        edges = list(self._edges) + list(g._edges)
        connectors = set()
        for bf, bg in zip(self._outputs, g._inputs):
            edges.append(_norm_edge(bf, bg))
            connectors.update((bf, bg))
        vertices, edges = _eliminate_connectors(vertices, edges, connectors)
        return Diagram(vertices, edges, self._inputs, g._outputs)

    def tensor(self, other: "Diagram") -> "Diagram":
        """Disjoint juxtaposition; boundary lists concatenated, self first."""
        shift = self.fresh_id()
        g = other.relabeled({v: v + shift for v in other._vertices})
        return Diagram(
            {**self._vertices, **g._vertices},
            list(self._edges) + list(g._edges),
            list(self._inputs) + list(g._inputs),
            list(self._outputs) + list(g._outputs),
        )

    def bend_inputs(self) -> "Diagram":
        """Turn every input into a trailing output (Choi-style bending).

        The i-th input becomes output ``n_outputs + i``; the resulting state
        vector is the row-major flattening of the original matrix.
        """
        return Diagram(
            self._vertices,
            self._edges,
            (),
            list(self._outputs) + list(self._inputs),
        )

    def color_swap(self) -> "Diagram":
        """Exchange the two spider colours everywhere."""
        return Diagram(
            {v: k.swapped() for v, k in self._vertices.items()},
            self._edges,
            self._inputs,
            self._outputs,
        )

    def erase_phases(self) -> "Diagram":
        """Set every spider phase to zero (H and boundaries untouched)."""
        return Diagram(
            {
                v: VertexKind(k.kind, Phase(0)) if k.is_spider() else k
                for v, k in self._vertices.items()
            },
            self._edges,
            self._inputs,
            self._outputs,
        )

    # -- constructors ----------------------------------------------------------

    @staticmethod
    def empty() -> "Diagram":
        return Diagram({}, [])

    @staticmethod
    def wire() -> "Diagram":
        b = VertexKind(BOUNDARY)
        return Diagram({0: b, 1: b}, [(0, 1)], [0], [1])

    @staticmethod
    def identity(n: int) -> "Diagram":
        d = Diagram.empty()
        for _ in range(n):
            d = d.tensor(Diagram.wire())
        return d

    @staticmethod
    def spider(color: str, n_in: int, n_out: int, phase: Phase | int | str = 0) -> "Diagram":
        """The prime graph: one spider wired to n_in inputs and n_out outputs."""
        if color not in _SPIDERS:
            raise MalformedDiagramError(f"spider colour must be Z or X, got {color!r}")
        vertices = {0: VertexKind(color, Phase(phase))}
        edges = []
        ins, outs = [], []
        nxt = 1
        for _ in range(n_in):
            vertices[nxt] = VertexKind(BOUNDARY)
            edges.append((0, nxt))
            ins.append(nxt)
            nxt += 1
        for _ in range(n_out):
            vertices[nxt] = VertexKind(BOUNDARY)
            edges.append((0, nxt))
            outs.append(nxt)
            nxt += 1
        return Diagram(vertices, edges, ins, outs)

    @staticmethod
    def h_box() -> "Diagram":
        b = VertexKind(BOUNDARY)
        return Diagram({0: VertexKind(H), 1: b, 2: b}, [(0, 1), (0, 2)], [1], [2])

    @staticmethod
    def cup() -> "Diagram":
        """The 0 -> 2 empty prime graph, |00> + |11> up to scalar."""
        b = VertexKind(BOUNDARY)
        return Diagram({0: b, 1: b}, [(0, 1)], [], [0, 1])

    @staticmethod
    def cap() -> "Diagram":
        b = VertexKind(BOUNDARY)
        return Diagram({0: b, 1: b}, [(0, 1)], [0, 1], [])

    @staticmethod
    def cz() -> "Diagram":
        """Controlled-Z: two phase-free Z spiders joined through an H box."""
        b = VertexKind(BOUNDARY)
        zk = VertexKind(Z, Phase(0))
        return Diagram(
            {0: zk, 1: zk, 2: VertexKind(H), 3: b, 4: b, 5: b, 6: b},
            [(0, 2), (1, 2), (0, 3), (0, 5), (1, 4), (1, 6)],
            [3, 4],
            [5, 6],
        )

    # -- JSON interchange -------------------------------------------------------

    def to_dict(self) -> dict:
        verts: dict[str, dict] = {}
        for v, k in sorted(self._vertices.items()):
            entry: dict = {"kind": k.kind}
            if k.is_spider():
                entry["phase"] = str(k.phase)
            verts[str(v)] = entry
        return {
            "vertices": verts,
            "edges": [[str(a), str(b)] for a, b in self._edges],
            "inputs": [str(v) for v in self._inputs],
            "outputs": [str(v) for v in self._outputs],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @staticmethod
    def from_dict(data: dict) -> "Diagram":
        raw_ids = list(data.get("vertices", {}))
        try:
            ids = {s: int(s) for s in raw_ids}
        except ValueError:
            ids = {s: i for i, s in enumerate(sorted(raw_ids))}
        vertices = {}
        for s, entry in data.get("vertices", {}).items():
            kind = entry["kind"]
            phase = Phase.parse(entry["phase"]) if "phase" in entry else None
            if kind in _SPIDERS and phase is None:
                phase = Phase(0)
            vertices[ids[s]] = VertexKind(kind, phase)
        try:
            edges = [(ids[a], ids[b]) for a, b in data.get("edges", [])]
            inputs = [ids[s] for s in data.get("inputs", [])]
            outputs = [ids[s] for s in data.get("outputs", [])]
        except KeyError as exc:
            raise MalformedDiagramError(f"edge or boundary references unknown id {exc}")
        return Diagram(vertices, edges, inputs, outputs)

    @staticmethod
    def from_json(text: str) -> "Diagram":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedDiagramError(f"invalid JSON: {exc}")
        return Diagram.from_dict(data)


def _eliminate_connectors(
    vertices: dict[int, VertexKind],
    edges: list[tuple[int, int]],
    connectors: set[int],
) -> tuple[dict[int, VertexKind], list[tuple[int, int]]]:
    """Erase degree-2 pass-through vertices, joining their two edges.

    A cycle made entirely of connectors denotes the scalar 2 (a closed plain
    loop); it is replaced by an isolated phase-free Z spider of equal value.
    """
    vertices = dict(vertices)
    edges = list(edges)
    pending = set(connectors)
    while pending:
        v = pending.pop()
        loop = _norm_edge(v, v)
        if loop in edges:
            edges.remove(loop)
            del vertices[v]
            fresh = max(vertices, default=-1) + 1
            vertices[fresh] = VertexKind(Z, Phase(0))
            continue
        slots = [e for e in edges if v in e]
        if len(slots) != 2:  # pragma: no cover - guarded by arity checks
            raise MalformedDiagramError(f"connector {v} has degree {len(slots)}")
        e1, e2 = slots
        a = e1[0] if e1[1] == v else e1[1]
        b = e2[0] if e2[1] == v else e2[1]
        edges.remove(e1)
        edges.remove(e2)
        edges.append(_norm_edge(a, b))
        del vertices[v]
    return vertices, edges


class DiagramEditor:
    """Mutable scratchpad for building a new diagram from an existing one."""

    def __init__(self, base: Diagram):
        self.vertices = base.vertices
        self.edges = list(base.edges)
        self.inputs = list(base.inputs)
        self.outputs = list(base.outputs)
        self._next = base.fresh_id()

    def add_vertex(self, kind: VertexKind) -> int:
        v = self._next
        self._next += 1
        self.vertices[v] = kind
        return v

    def remove_vertex(self, v: int) -> None:
        del self.vertices[v]
        self.edges = [e for e in self.edges if v not in e]

    def set_kind(self, v: int, kind: VertexKind) -> None:
        self.vertices[v] = kind

    def set_phase(self, v: int, phase: Phase) -> None:
        k = self.vertices[v]
        self.vertices[v] = VertexKind(k.kind, phase)

    def add_phase(self, v: int, phase: Phase) -> None:
        self.set_phase(v, self.vertices[v].phase + phase)

    def add_edge(self, a: int, b: int) -> None:
        self.edges.append(_norm_edge(a, b))

    def remove_edge(self, a: int, b: int) -> None:
        self.edges.remove(_norm_edge(a, b))

    def move_edge(self, a: int, b: int, new_a: int, new_b: int) -> None:
        self.remove_edge(a, b)
        self.add_edge(new_a, new_b)

    def finish(self) -> Diagram:
        return Diagram(self.vertices, self.edges, self.inputs, self.outputs)


def are_isomorphic(d1: Diagram, d2: Diagram) -> bool:
    """Exact isomorphism respecting kinds, phases, edge multiplicities and
    boundary order.  Backtracking search; intended for small diagrams."""
    if d1.n_inputs != d2.n_inputs or d1.n_outputs != d2.n_outputs:
        return False
    v1, v2 = d1.vertices, d2.vertices
    if len(v1) != len(v2) or len(d1.edges) != len(d2.edges):
        return False

    def sig(d: Diagram, v: int):
        k = d.kind(v)
        return (k.kind, k.phase, d.degree(v))

    by_sig: dict = {}
    for v in v2:
        by_sig.setdefault(sig(d2, v), []).append(v)

    mapping: dict[int, int] = {}
    used: set[int] = set()
    for a, b in zip(d1.inputs + d1.outputs, d2.inputs + d2.outputs):
        if sig(d1, a) != sig(d2, b):
            return False
        if a in mapping:
            if mapping[a] != b:
                return False
        elif b in used:
            return False
        else:
            mapping[a] = b
            used.add(b)

    rest = [v for v in sorted(v1, key=lambda v: -d1.degree(v)) if v not in mapping]

    def consistent(a: int, b: int) -> bool:
        for c, d in mapping.items():
            if d1.edges_between(a, c) != d2.edges_between(b, d):
                return False
        return d1.edges_between(a, a) == d2.edges_between(b, b)

    def back(i: int) -> bool:
        if i == len(rest):
            return True
        a = rest[i]
        for b in by_sig.get(sig(d1, a), []):
            if b in used or not consistent(a, b):
                continue
            mapping[a] = b
            used.add(b)
            if back(i + 1):
                return True
            del mapping[a]
            used.discard(b)
        return False

    if not back(0):
        return False
    for a, b in d1.edges:
        if d1.edges_between(a, b) != d2.edges_between(mapping[a], mapping[b]):
            return False
    return True


def compose(f: Diagram, g: Diagram) -> Diagram:
    return f.compose(g)


def tensor(f: Diagram, g: Diagram) -> Diagram:
    return f.tensor(g)


def bend_inputs(d: Diagram) -> Diagram:
    return d.bend_inputs()


def color_swap(d: Diagram) -> Diagram:
    return d.color_swap()


def validate(d: Diagram) -> list[str]:
    return d.validate()
