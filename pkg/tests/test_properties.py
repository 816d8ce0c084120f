"""Hypothesis property tests over randomly generated structures."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from zxpivot import Diagram, Phase, eq_up_to, interpret
from zxpivot.diagram import X, Z, are_isomorphic
from zxpivot.graphstate import SimpleGraph, local_complement, pivot
from zxpivot.semantics import EqMode

phases = st.builds(Phase, st.integers(-8, 8), st.integers(1, 4))
colors = st.sampled_from([Z, X])


@st.composite
def small_maps(draw, max_legs=3, width=None):
    """A composable chain of small generators as one diagram (n -> n)."""
    n = width if width is not None else draw(st.integers(1, max_legs))
    d = Diagram.identity(n)
    for _ in range(draw(st.integers(0, 4))):
        kind = draw(st.integers(0, 2))
        wire = draw(st.integers(0, n - 1))
        if kind == 0:
            gate = Diagram.spider(draw(colors), 1, 1, draw(phases))
        elif kind == 1:
            gate = Diagram.h_box()
        else:
            if n < 2:
                continue
            wire = draw(st.integers(0, n - 2))
            gate = Diagram.cz()
        layer = Diagram.identity(wire)
        layer = layer.tensor(gate)
        layer = layer.tensor(Diagram.identity(n - wire - gate.n_inputs))
        d = d.compose(layer)
    return d


@st.composite
def graphs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    labels = [chr(ord("a") + i) for i in range(n)]
    pairs = [
        (labels[i], labels[j]) for i in range(n) for j in range(i + 1, n)
    ]
    edges = [p for p in pairs if draw(st.booleans())]
    return SimpleGraph(labels, edges)


@st.composite
def composable_pairs(draw):
    n = draw(st.integers(1, 3))
    return draw(small_maps(width=n)), draw(small_maps(width=n))


@given(composable_pairs())
@settings(max_examples=40, deadline=None)
def test_compose_is_matrix_product(pair):
    f, g = pair
    assert np.allclose(interpret(f.compose(g)), interpret(g) @ interpret(f))


@given(small_maps(max_legs=2), small_maps(max_legs=2))
@settings(max_examples=40, deadline=None)
def test_tensor_is_kronecker_product(f, g):
    assert np.allclose(
        interpret(f.tensor(g)), np.kron(interpret(f), interpret(g))
    )


@given(small_maps())
@settings(max_examples=40, deadline=None)
def test_bend_inputs_is_row_major_flattening(d):
    assert np.allclose(
        interpret(d.bend_inputs()).reshape(-1), interpret(d).reshape(-1)
    )


@given(small_maps())
@settings(max_examples=30, deadline=None)
def test_identity_laws(d):
    left = Diagram.identity(d.n_inputs).compose(d)
    right = d.compose(Diagram.identity(d.n_outputs))
    assert are_isomorphic(left, d)
    assert are_isomorphic(right, d)
    assert d.validate() == []


@given(small_maps())
@settings(max_examples=30, deadline=None)
def test_color_swap_involution_property(d):
    assert d.color_swap().color_swap() == d


@given(graphs())
@settings(max_examples=60, deadline=None)
def test_local_complement_involutive(g):
    for v in g.sorted_vertices():
        assert local_complement(local_complement(g, v), v) == g


@given(graphs())
@settings(max_examples=60, deadline=None)
def test_pivot_involutive_and_triple(g):
    for a, b in g.sorted_edges():
        p = pivot(g, a, b)
        assert pivot(p, a, b) == g
        triple = local_complement(local_complement(local_complement(g, a), b), a)
        assert p == triple


@given(small_maps(), st.sampled_from(list(EqMode)))
@settings(max_examples=30, deadline=None)
def test_eq_up_to_is_reflexive(d, mode):
    m = interpret(d)
    assert eq_up_to(m, m, mode).equal


@given(small_maps())
@settings(max_examples=30, deadline=None)
def test_scalar_modes_are_nested(d):
    # exact implies up-to-phase implies up-to-scalar
    m = interpret(d)
    c = np.exp(0.321j)
    if np.max(np.abs(m)) == 0:
        return
    assert eq_up_to(m, c * m, EqMode.UP_TO_PHASE).equal
    assert eq_up_to(m, c * m, EqMode.UP_TO_SCALAR).equal
    assert eq_up_to(m, 3.7 * c * m, EqMode.UP_TO_SCALAR).equal
