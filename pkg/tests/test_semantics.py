import numpy as np
import pytest

from zxpivot import Diagram, Phase, eq_up_to, interpret
from zxpivot.diagram import X, Z
from zxpivot.errors import ArityMismatchError
from zxpivot.semantics import (
    EqMode,
    HADAMARD,
    diagrams_equal,
    matrix_from_lists,
    matrix_to_lists,
    spider_tensor,
)


def test_h_matrix():
    assert np.allclose(interpret(Diagram.h_box()), HADAMARD)


def test_phase_free_spider_on_wire_is_identity():
    assert np.allclose(interpret(Diagram.spider(Z, 1, 1, Phase(0))), np.eye(2))


def test_z_spider_map():
    m = interpret(Diagram.spider(Z, 2, 1, Phase(1, 2)))
    want = np.zeros((2, 4), dtype=complex)
    want[0, 0] = 1
    want[1, 3] = 1j
    assert np.allclose(m, want)


def test_x_spider_is_h_conjugated_z():
    for n, m_ in [(1, 1), (2, 1), (1, 2)]:
        alpha = Phase(1, 2)
        x = interpret(Diagram.spider(X, n, m_, alpha))
        z = interpret(Diagram.spider(Z, n, m_, alpha))
        h_out = np.eye(1)
        for _ in range(m_):
            h_out = np.kron(h_out, HADAMARD)
        h_in = np.eye(1)
        for _ in range(n):
            h_in = np.kron(h_in, HADAMARD)
        assert np.allclose(x, h_out @ z @ h_in)


def test_cz_diagram():
    m = interpret(Diagram.cz())
    assert eq_up_to(m, np.diag([1, 1, 1, -1]).astype(complex), EqMode.UP_TO_SCALAR).equal


def test_functoriality_compose():
    f = Diagram.cz()
    g = Diagram.h_box().tensor(Diagram.spider(Z, 1, 1, Phase(1, 2)))
    assert np.allclose(interpret(f.compose(g)), interpret(g) @ interpret(f))


def test_functoriality_tensor():
    f = Diagram.spider(X, 1, 2, Phase(1))
    g = Diagram.h_box()
    assert np.allclose(interpret(f.tensor(g)), np.kron(interpret(f), interpret(g)))


def test_closed_components_multiply_as_scalars():
    circle = Diagram.cup().compose(Diagram.cap())
    d = Diagram.wire().tensor(circle)
    assert np.allclose(interpret(d), 2 * np.eye(2))


def test_spider_tensor_zero_legs():
    assert spider_tensor(Z, 0, Phase(1)) == pytest.approx(np.array([0.0 + 0j]))
    assert spider_tensor(Z, 0, Phase(0)) == pytest.approx(np.array([2.0 + 0j]))


def test_eq_up_to_phase_and_scalar():
    m = interpret(Diagram.h_box())
    r = eq_up_to(m, np.exp(1j * np.pi / 3) * m, EqMode.UP_TO_PHASE)
    assert r.equal and r.scalar == pytest.approx(np.exp(1j * np.pi / 3))
    assert not eq_up_to(m, 2 * m, EqMode.UP_TO_PHASE).equal
    r2 = eq_up_to(m, 2 * m, EqMode.UP_TO_SCALAR)
    assert r2.equal and r2.scalar == pytest.approx(2.0 + 0j)


def test_eq_up_to_zero_handling():
    z = np.zeros((2, 2))
    m = np.eye(2)
    assert eq_up_to(z, z, EqMode.UP_TO_SCALAR).equal
    assert not eq_up_to(z, m, EqMode.UP_TO_SCALAR).equal
    assert not eq_up_to(m, z, EqMode.UP_TO_SCALAR).equal


def test_eq_up_to_shape_mismatch():
    with pytest.raises(ArityMismatchError):
        eq_up_to(np.eye(2), np.eye(4), EqMode.EXACT)


def test_eq_exact_mode():
    m = np.eye(2).astype(complex)
    assert eq_up_to(m, m + 1e-12, EqMode.EXACT).equal
    assert not eq_up_to(m, 1.001 * m, EqMode.EXACT).equal


def test_diagrams_equal_arity_guard():
    assert not diagrams_equal(Diagram.wire(), Diagram.cz()).equal


def test_matrix_json_round_trip():
    m = interpret(Diagram.cz())
    assert np.allclose(matrix_from_lists(matrix_to_lists(m)), m)


def test_interpret_rejects_malformed():
    from zxpivot.diagram import BOUNDARY, VertexKind
    from zxpivot.errors import MalformedDiagramError

    bad = Diagram({0: VertexKind(BOUNDARY)}, [], [0], [0])
    with pytest.raises(MalformedDiagramError):
        interpret(bad)
