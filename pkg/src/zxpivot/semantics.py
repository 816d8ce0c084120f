"""Dense-matrix interpretation of diagrams and the two counter-model functors.

``interpret`` maps an n -> m diagram to a 2**m x 2**n complex matrix by
tensor-network contraction (every wire is a qubit leg, H is a 2-tensor).
``interpret_zero`` is the phase-erasing variant; ``flatten`` is the
diagram-doubling functor that sends H to a wire swap.  Equality of matrices
is decided exactly, up to global phase, or up to any nonzero scalar.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._contract import contract_network
from .diagram import BOUNDARY, H, X, Z, Diagram, VertexKind
from .errors import ArityMismatchError, MalformedDiagramError
from .phase import Phase

#: Dense matrices are plain complex ndarrays of shape (2**m, 2**n); a 1x1
#: matrix carries the value of a closed diagram.
DenseMatrix = np.ndarray

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)

DEFAULT_TOL = 1e-9

#: Soft cap on open legs for the dense oracle (matrices up to 4096 x 4096).
MAX_OPEN_LEGS = 12


class EqMode(Enum):
    EXACT = "exact"
    UP_TO_PHASE = "phase"
    UP_TO_SCALAR = "scalar"


@dataclass(frozen=True)
class EqResult:
    equal: bool
    scalar: complex | None = None

    def __bool__(self) -> bool:
        return self.equal


def spider_tensor(color: str, degree: int, phase: Phase) -> np.ndarray:
    """Flat tensor of a spider with the given total degree."""
    if degree == 0:
        return np.array([1 + phase.to_complex()], dtype=np.complex128)
    t = np.zeros(1 << degree, dtype=np.complex128)
    t[0] = 1.0
    t[-1] = phase.to_complex()
    if color == X:
        shaped = t.reshape([2] * degree)
        for axis in range(degree):
            shaped = np.moveaxis(
                np.tensordot(shaped, HADAMARD, axes=([axis], [0])), -1, axis
            )
        t = np.ascontiguousarray(shaped).reshape(-1)
    return t


def _tensorize(d: Diagram, zero_phases: bool) -> tuple[list, list[int]]:
    """Build the tensor list and the open-leg order (outputs then inputs)."""
    problems = d.validate()
    if problems:
        raise MalformedDiagramError("; ".join(problems))

    # A boundary-boundary edge has no interior tensor to anchor it: subdivide
    # it with a phase-free Z spider, which is exactly the identity wire.
    edges = list(d.edges)
    vertices = d.vertices
    nxt = d.fresh_id()
    changed = True
    while changed:
        changed = False
        for idx, (a, b) in enumerate(edges):
            if vertices[a].kind == BOUNDARY and vertices[b].kind == BOUNDARY:
                vertices[nxt] = VertexKind(Z, Phase(0))
                edges[idx : idx + 1] = [(a, nxt), (nxt, b)]
                nxt += 1
                changed = True
                break

    legs: dict[int, list[int]] = {v: [] for v in vertices}
    for eid, (a, b) in enumerate(edges):
        legs[a].append(eid)
        legs[b].append(eid)

    tensors = []
    for v, k in vertices.items():
        if k.kind == BOUNDARY:
            continue
        deg = len(legs[v])
        if k.kind == H:
            if deg != 2:
                raise MalformedDiagramError(f"H vertex {v} has degree {deg}")
            tensors.append((HADAMARD.reshape(-1), legs[v]))
        else:
            phase = Phase(0) if zero_phases else k.phase
            tensors.append((spider_tensor(k.kind, deg, phase), legs[v]))

    open_legs = [legs[b][0] for b in d.outputs] + [legs[b][0] for b in d.inputs]
    return tensors, open_legs


def interpret(d: Diagram, zero_phases: bool = False) -> np.ndarray:
    """The matrix of a diagram: shape (2**n_outputs, 2**n_inputs)."""
    if d.n_inputs + d.n_outputs > MAX_OPEN_LEGS:
        raise ArityMismatchError(
            f"{d.n_inputs + d.n_outputs} open legs exceed the dense cap "
            f"of {MAX_OPEN_LEGS}"
        )
    tensors, open_legs = _tensorize(d, zero_phases)
    flat = contract_network(tensors, open_legs)
    return flat.reshape(1 << d.n_outputs, 1 << d.n_inputs)


def interpret_zero(d: Diagram) -> np.ndarray:
    """Interpretation with every spider phase read as zero (H unchanged)."""
    return interpret(d, zero_phases=True)


def flatten(d: Diagram) -> Diagram:
    """Double every wire; H becomes a swap of the two copies.

    Spiders split into a phase-free spider on copy 1 and its colour-swap on
    copy 2; boundaries double in place, so an n -> m diagram becomes
    2n -> 2m with the two copies of each boundary adjacent.
    """
    problems = d.validate()
    if problems:
        raise MalformedDiagramError("; ".join(problems))
    edges = list(d.edges)
    kinds = d.vertices

    h_ends: dict[int, list[tuple[int, int]]] = {}
    for idx, (a, b) in enumerate(edges):
        if kinds[a].kind == H:
            h_ends.setdefault(a, []).append((idx, 0))
        if kinds[b].kind == H:
            h_ends.setdefault(b, []).append((idx, 1))

    copy_of: dict[tuple[int, int], int] = {}
    new_vertices: dict[int, VertexKind] = {}
    nxt = 0
    for v in sorted(kinds):
        k = kinds[v]
        if k.kind == H:
            continue
        for copy in (1, 2):
            if k.kind == BOUNDARY:
                nk = k
            elif copy == 1:
                nk = VertexKind(k.kind, Phase(0))
            else:
                nk = VertexKind(k.kind, Phase(0)).swapped()
            copy_of[(v, copy)] = nxt
            new_vertices[nxt] = nk
            nxt += 1

    def endpoint(eidx: int, end: int) -> int:
        return edges[eidx][end]

    def walk(eidx: int, start_end: int, copy: int) -> tuple[int, int, int]:
        """Follow a wire copy from one attachment through any H chain.

        Returns (edge index, end, copy) of the terminal attachment reached.
        """
        cur_e, cur_end, cur_copy = eidx, start_end, copy
        other = 1 - cur_end
        p = endpoint(cur_e, other)
        while kinds[p].kind == H:
            ends = h_ends[p]
            nxt_e, nxt_end = ends[1] if ends[0] == (cur_e, other) else ends[0]
            cur_copy = 3 - cur_copy
            cur_e, cur_end = nxt_e, nxt_end
            other = 1 - cur_end
            p = endpoint(cur_e, other)
        return cur_e, other, cur_copy

    new_edges: list[tuple[int, int]] = []
    visited: set[tuple[int, int, int]] = set()
    for eidx, (a, b) in enumerate(edges):
        for end, v in ((0, a), (1, b)):
            if kinds[v].kind == H:
                continue
            for copy in (1, 2):
                if (eidx, end, copy) in visited:
                    continue
                visited.add((eidx, end, copy))
                t_e, t_end, t_copy = walk(eidx, end, copy)
                visited.add((t_e, t_end, t_copy))
                u = copy_of[(v, copy)]
                w = copy_of[(endpoint(t_e, t_end), t_copy)]
                new_edges.append((u, w))

    # Wire copies that never touch a non-H vertex are closed plain loops,
    # each worth the scalar 2; an isolated phase-free Z spider matches it.
    loop_slots = [
        (eidx, end, copy)
        for eidx, (a, b) in enumerate(edges)
        for end, v in ((0, a), (1, b))
        if kinds[v].kind == H and kinds[endpoint(eidx, 1 - end)].kind == H
        for copy in (1, 2)
    ]
    seen: set[tuple[int, int, int]] = set()
    for slot in loop_slots:
        if slot in seen:
            continue
        eidx, end, copy = slot
        cur = (eidx, end, copy)
        cycle = False
        while True:
            e, s_end, c = cur
            seen.add((e, s_end, c))
            seen.add((e, 1 - s_end, c))
            other = 1 - s_end
            p = endpoint(e, other)
            if kinds[p].kind != H:
                break
            ends = h_ends[p]
            nxt_e, nxt_end = ends[1] if ends[0] == (e, other) else ends[0]
            cur = (nxt_e, nxt_end, 3 - c)
            if cur == (eidx, end, copy):
                cycle = True
                break
        if cycle:
            new_vertices[nxt] = VertexKind(Z, Phase(0))
            nxt += 1

    new_inputs = [copy_of[(b, c)] for b in d.inputs for c in (1, 2)]
    new_outputs = [copy_of[(b, c)] for b in d.outputs for c in (1, 2)]
    return Diagram(new_vertices, new_edges, new_inputs, new_outputs)


def eq_up_to(
    a: np.ndarray,
    b: np.ndarray,
    mode: EqMode = EqMode.UP_TO_SCALAR,
    tol: float = DEFAULT_TOL,
) -> EqResult:
    """Compare two matrices exactly, up to phase, or up to nonzero scalar."""
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ArityMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    na = float(np.max(np.abs(a))) if a.size else 0.0
    nb = float(np.max(np.abs(b))) if b.size else 0.0
    if na <= tol and nb <= tol:
        return EqResult(True, 1.0 + 0.0j if mode is not EqMode.EXACT else None)
    if na <= tol * max(nb, 1.0) or nb <= tol * max(na, 1.0):
        if mode is EqMode.EXACT and np.max(np.abs(a - b)) <= tol * max(na, nb):
            return EqResult(True, None)
        return EqResult(False, None)

    if mode is EqMode.EXACT:
        ok = bool(np.max(np.abs(a - b)) <= tol * max(na, nb))
        return EqResult(ok, None)

    # The reported scalar satisfies b = scalar * a.
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    c = complex(b[idx] / a[idx])
    if mode is EqMode.UP_TO_PHASE and abs(abs(c) - 1.0) > tol:
        return EqResult(False, None)
    if abs(c) <= tol:
        return EqResult(False, None)
    diff = float(np.max(np.abs(b - c * a)))
    ok = diff <= tol * max(nb, abs(c) * na)
    return EqResult(ok, c if ok else None)


def diagrams_equal(
    d1: Diagram,
    d2: Diagram,
    mode: EqMode = EqMode.UP_TO_SCALAR,
    tol: float = DEFAULT_TOL,
    zero_phases: bool = False,
) -> EqResult:
    """Interpret both diagrams and compare; arity mismatch compares unequal."""
    if d1.n_inputs != d2.n_inputs or d1.n_outputs != d2.n_outputs:
        return EqResult(False, None)
    return eq_up_to(
        interpret(d1, zero_phases=zero_phases),
        interpret(d2, zero_phases=zero_phases),
        mode,
        tol,
    )


def matrix_to_lists(m: np.ndarray) -> list:
    """JSON-friendly nested lists of [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def matrix_from_lists(data: list) -> np.ndarray:
    return np.array(
        [[complex(re, im) for re, im in row] for row in data], dtype=np.complex128
    )
