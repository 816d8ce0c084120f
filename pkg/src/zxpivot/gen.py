"""Seeded random real stabilizer diagram states.

States are built as circuits over {Z, H, CZ} applied to a row of
uniform-superposition preparations, optionally followed by
computational-basis projections on some qubits; this generates exactly the
real stabilizer fragment.
"""

from __future__ import annotations

import random

from .diagram import BOUNDARY, H, X, Z, Diagram, VertexKind
from .phase import Phase


def random_real_stabilizer_state(
    qubits: int,
    depth: int,
    seed: int | None = None,
    projections: int = 0,
    rng: random.Random | None = None,
) -> Diagram:
    """A random diagram state on ``qubits - projections`` open outputs.

    Each layer applies one uniformly chosen gate: a pi Z-rotation, an H box,
    or a CZ between a random qubit pair.  ``projections`` qubits end in a
    <0| effect instead of an output.
    """
    rng = rng or random.Random(seed)
    if projections > qubits:
        raise ValueError("cannot project more qubits than exist")
    vertices: dict[int, VertexKind] = {}
    edges: list[tuple[int, int]] = []
    nxt = 0

    def fresh(kind: VertexKind) -> int:
        nonlocal nxt
        vertices[nxt] = kind
        nxt += 1
        return nxt - 1

    # |+> preparations: phase-free Z dots
    wire_end = [fresh(VertexKind(Z, Phase(0))) for _ in range(qubits)]

    for _ in range(depth):
        kind = rng.choice(["Z", "H", "CZ"] if qubits >= 2 else ["Z", "H"])
        if kind == "Z":
            q = rng.randrange(qubits)
            v = fresh(VertexKind(Z, Phase(1)))
            edges.append((wire_end[q], v))
            wire_end[q] = v
        elif kind == "H":
            q = rng.randrange(qubits)
            v = fresh(VertexKind(H))
            edges.append((wire_end[q], v))
            wire_end[q] = v
        else:
            p, q = rng.sample(range(qubits), 2)
            sp = fresh(VertexKind(Z, Phase(0)))
            sq = fresh(VertexKind(Z, Phase(0)))
            hb = fresh(VertexKind(H))
            edges.extend([(wire_end[p], sp), (wire_end[q], sq), (sp, hb), (sq, hb)])
            wire_end[p], wire_end[q] = sp, sq

    projected = rng.sample(range(qubits), projections)
    outputs = []
    for q in range(qubits):
        if q in projected:
            # <0| effect: a phase-free X dot
            v = fresh(VertexKind(X, Phase(0)))
            edges.append((wire_end[q], v))
        else:
            b = fresh(VertexKind(BOUNDARY))
            edges.append((wire_end[q], b))
            outputs.append(b)
    return Diagram(vertices, edges, [], outputs)


def random_equal_variant(d: Diagram, seed: int | None = None, rng: random.Random | None = None) -> Diagram:
    """A diagram with the same interpretation up to scalar, obtained by
    padding random output wires with identity-valued gadgets (HH pairs and
    doubled pi rotations)."""
    rng = rng or random.Random(seed)
    ed = d.edit()
    outputs = list(d.outputs)
    for b in outputs:
        style = rng.randrange(3)
        if style == 0:
            continue
        (edge,) = [e for e in ed.edges if b in e]
        prev = edge[0] if edge[1] == b else edge[1]
        ed.remove_edge(prev, b)
        if style == 1:
            h1 = ed.add_vertex(VertexKind(H))
            h2 = ed.add_vertex(VertexKind(H))
            ed.add_edge(prev, h1)
            ed.add_edge(h1, h2)
            ed.add_edge(h2, b)
        else:
            z1 = ed.add_vertex(VertexKind(Z, Phase(1)))
            z2 = ed.add_vertex(VertexKind(Z, Phase(1)))
            ed.add_edge(prev, z1)
            ed.add_edge(z1, z2)
            ed.add_edge(z2, b)
    return ed.finish()
