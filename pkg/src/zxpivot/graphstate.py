"""Simple graphs, graph-state diagrams, and their operator identities.

A graph state puts one phase-free Z spider per vertex (each wired to its own
output, in sorted label order) and one H box per edge.  Local complementation
and pivoting act on the plain graphs; the corresponding single-qubit operator
words act on the diagrams, and the semantic identities relating the two are
checked against the dense oracle.
"""

from __future__ import annotations

import json
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import numpy as np

from .diagram import BOUNDARY, H as H_KIND, X, Z, Diagram, VertexKind
from .errors import MalformedDiagramError, ZXError
from .phase import Phase
from .semantics import DEFAULT_TOL, EqMode, eq_up_to, interpret


class SimpleGraph:
    """Finite undirected simple graph with opaque string labels."""

    __slots__ = ("_vertices", "_edges")

    def __init__(self, vertices: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        self._vertices = frozenset(str(v) for v in vertices)
        es = set()
        for a, b in edges:
            a, b = str(a), str(b)
            if a == b:
                raise ZXError(f"self-loop {a} not allowed in a simple graph")
            if a not in self._vertices or b not in self._vertices:
                raise ZXError(f"edge ({a},{b}) references an unknown vertex")
            es.add(frozenset((a, b)))
        self._edges = frozenset(es)

    @property
    def vertices(self) -> frozenset[str]:
        return self._vertices

    @property
    def edges(self) -> frozenset[frozenset[str]]:
        return self._edges

    def sorted_vertices(self) -> list[str]:
        return sorted(self._vertices)

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(tuple(sorted(e)) for e in self._edges)

    def has_edge(self, a: str, b: str) -> bool:
        return frozenset((str(a), str(b))) in self._edges

    def neighbors(self, v: str) -> set[str]:
        v = str(v)
        if v not in self._vertices:
            raise ZXError(f"unknown vertex {v}")
        return {next(iter(e - {v})) for e in self._edges if v in e}

    def with_edges_toggled(self, pairs: Iterable[tuple[str, str]]) -> "SimpleGraph":
        es = set(self._edges)
        for a, b in pairs:
            e = frozenset((str(a), str(b)))
            if len(e) != 2:
                continue
            if e in es:
                es.remove(e)
            else:
                es.add(e)
        return SimpleGraph(self._vertices, [tuple(e) for e in es])

    def relabeled(self, mapping: Mapping[str, str]) -> "SimpleGraph":
        m = lambda v: mapping.get(v, v)
        return SimpleGraph(
            [m(v) for v in self._vertices],
            [(m(a), m(b)) for a, b in self.sorted_edges()],
        )

    def is_connected(self) -> bool:
        if not self._vertices:
            return True
        seen = set()
        stack = [next(iter(self._vertices))]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(self.neighbors(v) - seen)
        return seen == self._vertices

    def is_bipartite(self) -> bool:
        color: dict[str, int] = {}
        for start in self._vertices:
            if start in color:
                continue
            color[start] = 0
            stack = [start]
            while stack:
                v = stack.pop()
                for w in self.neighbors(v):
                    if w not in color:
                        color[w] = 1 - color[v]
                        stack.append(w)
                    elif color[w] == color[v]:
                        return False
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        return f"SimpleGraph({sorted(self._vertices)}, {self.sorted_edges()})"

    def to_dict(self) -> dict:
        return {"vertices": self.sorted_vertices(), "edges": [list(e) for e in self.sorted_edges()]}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @staticmethod
    def from_dict(data: dict) -> "SimpleGraph":
        return SimpleGraph(data.get("vertices", []), [tuple(e) for e in data.get("edges", [])])

    @staticmethod
    def from_json(text: str) -> "SimpleGraph":
        return SimpleGraph.from_dict(json.loads(text))


# -- local operator words ------------------------------------------------------

#: op name -> (vertex kind, phase) of the spider/box appended on an output
_OP_TABLE: dict[str, tuple[str, Phase | None]] = {
    "Z": (Z, Phase(1)),
    "X": (X, Phase(1)),
    "H": (H_KIND, None),
    "Z+": (Z, Phase(1, 2)),
    "Z-": (Z, Phase(-1, 2)),
    "X+": (X, Phase(1, 2)),
    "X-": (X, Phase(-1, 2)),
}

_OP_MATRICES = {
    "Z": np.diag([1, -1]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "Z+": np.diag([1, 1j]).astype(complex),
    "Z-": np.diag([1, -1j]).astype(complex),
    "X+": np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2,
    "X-": np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=complex) / 2,
}


class LocalOpWord:
    """Per-vertex sequences of single-qubit ops, first entry applied first."""

    def __init__(self, ops: Mapping[str, Sequence[str]] | None = None):
        self._ops: dict[str, tuple[str, ...]] = {}
        for v, word in (ops or {}).items():
            for op in word:
                if op not in _OP_TABLE:
                    raise ZXError(f"unknown local op {op!r}")
            if word:
                self._ops[str(v)] = tuple(word)

    @property
    def ops(self) -> dict[str, tuple[str, ...]]:
        return dict(self._ops)

    def matrix_for(self, v: str) -> np.ndarray:
        m = np.eye(2, dtype=complex)
        for op in self._ops.get(str(v), ()):
            m = _OP_MATRICES[op] @ m
        return m

    @staticmethod
    def stabilizer_generator(g: SimpleGraph, v: str) -> "LocalOpWord":
        """X on v, Z on each neighbour."""
        ops = {u: ("Z",) for u in g.neighbors(v)}
        ops[str(v)] = ("X",)
        return LocalOpWord(ops)

    @staticmethod
    def local_complement_op(g: SimpleGraph, v: str) -> "LocalOpWord":
        """Quarter X turn on v, opposite quarter Z turns on its neighbours."""
        ops = {u: ("Z-",) for u in g.neighbors(v)}
        ops[str(v)] = ("X+",)
        return LocalOpWord(ops)

    @staticmethod
    def pivot_op(g: SimpleGraph, u: str, v: str) -> "LocalOpWord":
        """H on u and v, Z on every common neighbour."""
        ops: dict[str, tuple[str, ...]] = {str(u): ("H",), str(v): ("H",)}
        for c in g.neighbors(u) & g.neighbors(v):
            ops[c] = ("Z",)
        return LocalOpWord(ops)


# -- graph-state diagrams ---------------------------------------------------


def graph_state_diagram(g: SimpleGraph) -> Diagram:
    """One phase-free Z spider per vertex wired to its own output (sorted
    label order), one H box per edge."""
    labels = g.sorted_vertices()
    spider_of = {v: i for i, v in enumerate(labels)}
    n = len(labels)
    vertices: dict[int, VertexKind] = {}
    edges: list[tuple[int, int]] = []
    for v in labels:
        vertices[spider_of[v]] = VertexKind(Z, Phase(0))
    outputs = []
    for i, v in enumerate(labels):
        b = n + i
        vertices[b] = VertexKind(BOUNDARY)
        edges.append((spider_of[v], b))
        outputs.append(b)
    nxt = 2 * n
    for a, b in g.sorted_edges():
        vertices[nxt] = VertexKind(H_KIND)
        edges.append((spider_of[a], nxt))
        edges.append((spider_of[b], nxt))
        nxt += 1
    return Diagram(vertices, edges, [], outputs)


def output_index(g: SimpleGraph, v: str) -> int:
    return g.sorted_vertices().index(str(v))


def apply_local_ops(d: Diagram, word: LocalOpWord, labels: Sequence[str]) -> Diagram:
    """Append the word's ops on the outputs named by ``labels`` (one label
    per output, in output order)."""
    if len(labels) != d.n_outputs:
        raise MalformedDiagramError("one label per output expected")
    index_of = {str(v): i for i, v in enumerate(labels)}
    ed = d.edit()
    outputs = list(d.outputs)
    for v, ops in sorted(word.ops.items()):
        if v not in index_of:
            raise ZXError(f"unknown output vertex {v}")
        b = outputs[index_of[v]]
        for op in ops:
            kind, phase = _OP_TABLE[op]
            # splice the new vertex between the wire end and the boundary
            (edge,) = [e for e in ed.edges if b in e]
            prev = edge[0] if edge[1] == b else edge[1]
            w = ed.add_vertex(VertexKind(kind, phase))
            ed.remove_edge(prev, b)
            ed.add_edge(prev, w)
            ed.add_edge(w, b)
    return ed.finish()


def word_matrix(word: LocalOpWord, labels: Sequence[str]) -> np.ndarray:
    """The word as a matrix on the qubits named by ``labels`` (first label
    is the most significant qubit)."""
    m = np.ones((1, 1), dtype=complex)
    for v in labels:
        m = np.kron(m, word.matrix_for(str(v)))
    return m


def graph_state_vector(g: SimpleGraph) -> np.ndarray:
    """|G> built directly from its definition: CZ along every edge applied
    to the uniform superposition.  Used as an independent oracle."""
    labels = g.sorted_vertices()
    n = len(labels)
    idx = {v: i for i, v in enumerate(labels)}
    amps = np.ones(1 << n, dtype=complex) / (2 ** (n / 2))
    for e in g.edges:
        a, b = sorted(e)
        ia, ib = idx[a], idx[b]
        for bits in range(1 << n):
            if (bits >> (n - 1 - ia)) & 1 and (bits >> (n - 1 - ib)) & 1:
                amps[bits] = -amps[bits]
    return amps.reshape(-1, 1)


# -- graph transformations -----------------------------------------------------


def local_complement(g: SimpleGraph, v: str) -> SimpleGraph:
    """Toggle every edge between neighbours of v."""
    nb = sorted(g.neighbors(v))
    return g.with_edges_toggled(combinations(nb, 2))


def pivot(g: SimpleGraph, u: str, v: str) -> SimpleGraph:
    """Edge-local complementation along uv: swap the labels of u and v and
    toggle all pairs across the three neighbour classes."""
    u, v = str(u), str(v)
    if not g.has_edge(u, v):
        raise ZXError(f"({u},{v}) is not an edge")
    nu, nv = g.neighbors(u), g.neighbors(v)
    common = (nu & nv) - {u, v}
    only_u = nu - common - {u, v}
    only_v = nv - common - {u, v}
    pairs = (
        [(a, b) for a in only_u for b in only_v]
        + [(a, c) for a in only_u for c in common]
        + [(b, c) for b in only_v for c in common]
    )
    toggled = g.with_edges_toggled(pairs)
    return toggled.relabeled({u: v, v: u})


# -- semantic checks ------------------------------------------------------------


def _state_eq(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """Phase-only equality of the states the two matrices represent.

    Diagram interpretations carry positive combinatorial scalars (one
    1/sqrt(2) per H box), and the operator identities compare states over
    different graphs, so both sides are unit-normalized first; a sign
    difference still fails.
    """
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return bool(na == nb)
    return eq_up_to(a / na, b / nb, EqMode.UP_TO_PHASE, tol).equal


def check_stabilizer(g: SimpleGraph, v: str, tol: float = DEFAULT_TOL) -> bool:
    """The vertex stabilizer (X on v, Z on neighbours) fixes |G>."""
    labels = g.sorted_vertices()
    d = graph_state_diagram(g)
    word = LocalOpWord.stabilizer_generator(g, v)
    lhs = interpret(apply_local_ops(d, word, labels))
    rhs = interpret(d)
    return _state_eq(lhs, rhs, tol)


def check_vdn(g: SimpleGraph, v: str, tol: float = DEFAULT_TOL) -> bool:
    """Local complementation is realized by quarter turns on the state."""
    labels = g.sorted_vertices()
    word = LocalOpWord.local_complement_op(g, v)
    lhs = interpret(apply_local_ops(graph_state_diagram(g), word, labels))
    rhs = interpret(graph_state_diagram(local_complement(g, v)))
    return _state_eq(lhs, rhs, tol)


def check_pivot_property(g: SimpleGraph, u: str, v: str, tol: float = DEFAULT_TOL) -> bool:
    """Pivoting is realized by H on u, v and Z on common neighbours."""
    if not g.has_edge(u, v):
        raise ZXError(f"({u},{v}) is not an edge")
    labels = g.sorted_vertices()
    word = LocalOpWord.pivot_op(g, u, v)
    lhs = interpret(apply_local_ops(graph_state_diagram(g), word, labels))
    rhs = interpret(graph_state_diagram(pivot(g, u, v)))
    return _state_eq(lhs, rhs, tol)
