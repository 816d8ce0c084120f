import numpy as np
import pytest

from zxpivot import (
    Diagram,
    GsRlcDiagram,
    Phase,
    RealCliffordOp,
    VertexKind,
    decide_equal,
    decode_angle_free,
    encode_angle_free,
    eq_up_to,
    interpret,
    is_angle_free,
    is_real,
    reduce,
    simplify_pair,
    to_gs_rlc,
)
from zxpivot.diagram import X, Z
from zxpivot.errors import ZeroStateError, ZXError
from zxpivot.gen import random_real_stabilizer_state
from zxpivot.graphstate import (
    LocalOpWord,
    SimpleGraph,
    apply_local_ops,
    graph_state_diagram,
    pivot,
)
from zxpivot.semantics import EqMode

from conftest import random_connected_graph

TRIANGLE = SimpleGraph("abc", [("a", "b"), ("b", "c"), ("a", "c")])


# -- predicates and the encoding ----------------------------------------------


def test_angle_free_predicates():
    assert is_angle_free(graph_state_diagram(TRIANGLE))
    z_pi = Diagram.spider(Z, 1, 1, Phase(1))
    assert not is_angle_free(z_pi)
    assert is_real(z_pi)
    assert is_angle_free(encode_angle_free(z_pi))
    quarter = Diagram.spider(Z, 1, 1, Phase(1, 2))
    assert not is_angle_free(quarter)
    assert not is_real(quarter)


def test_encode_decode_round_trip():
    d = Diagram.spider(Z, 1, 2, Phase(1)).compose(
        Diagram.spider(X, 2, 1, Phase(1)).tensor(Diagram.identity(0))
    )
    enc = encode_angle_free(d)
    assert is_angle_free(enc)
    assert decode_angle_free(enc) == d


def test_encode_leaves_phase_free_untouched():
    d = graph_state_diagram(TRIANGLE)
    assert encode_angle_free(d) == d


def test_encode_scalar_per_loop():
    d = Diagram.spider(Z, 1, 1, Phase(1)).tensor(Diagram.spider(X, 1, 1, Phase(1)))
    enc = encode_angle_free(d)
    r = eq_up_to(interpret(d), interpret(enc), EqMode.UP_TO_SCALAR)
    # one factor of 1/sqrt(2) per introduced loop
    assert r.equal and abs(r.scalar) == pytest.approx(0.5)


def test_encode_requires_real():
    with pytest.raises(ZXError):
        encode_angle_free(Diagram.spider(Z, 1, 1, Phase(1, 2)))


def test_decode_requires_angle_free():
    with pytest.raises(ZXError):
        decode_angle_free(Diagram.spider(Z, 1, 1, Phase(1)))


# -- RealCliffordOp ------------------------------------------------------------


def test_real_clifford_names_round_trip():
    for name in ("I", "Z", "H", "HZ", "X", "ZX", "HX", "HZX"):
        op = RealCliffordOp.from_name(name)
        assert op.name == name
        again = RealCliffordOp.from_matrix(op.matrix())
        assert again == op


def test_real_clifford_group_closure():
    ops = [RealCliffordOp(x, z, h) for x in (0, 1) for z in (0, 1) for h in (0, 1)]
    for a in ops:
        for b in ops:
            assert a.then(b) in ops


# -- GS-RLC form ----------------------------------------------------------------


def test_graph_state_maps_to_itself():
    n = to_gs_rlc(graph_state_diagram(TRIANGLE), checked=True)
    assert n.graph == SimpleGraph("012", [("0", "1"), ("1", "2"), ("0", "2")])
    assert all(op.name == "I" for op in n.ops.values())


def test_x_op_pushes_to_neighbours():
    d = apply_local_ops(
        graph_state_diagram(TRIANGLE), LocalOpWord({"a": ("X",)}), ["a", "b", "c"]
    )
    n = reduce(to_gs_rlc(d, checked=True), checked=True)
    assert n.ops["0"].name == "I"
    assert n.ops["1"].name == "Z" and n.ops["2"].name == "Z"


def test_interior_spider_eliminated():
    zk = VertexKind(Z, Phase(0))
    hk = VertexKind("H")
    b = VertexKind("B")
    d = Diagram(
        {0: zk, 1: zk, 2: zk, 3: hk, 4: hk, 5: b, 6: b},
        [(0, 3), (1, 3), (1, 4), (2, 4), (0, 5), (2, 6)],
        [],
        [5, 6],
    )
    n = to_gs_rlc(d, checked=True)
    assert set(n.graph.vertices) == {"0", "1"}


def test_gs_rlc_json_round_trip():
    n = GsRlcDiagram(
        SimpleGraph("01", [("0", "1")]),
        {"0": RealCliffordOp(h=1), "1": RealCliffordOp(z=1)},
    )
    again = GsRlcDiagram.from_json(n.to_json())
    assert again.same_as(n)
    assert n.to_dict()["ops"] == {"0": "H", "1": "Z"}
    assert n.to_dict()["reduced"] is True


def test_zero_state_detected():
    # <0| applied to |1>: a closed component of value zero
    d = Diagram(
        {0: VertexKind(X, Phase(1)), 1: VertexKind(X, Phase(0))},
        [(0, 1)],
        [],
        [],
    )
    assert interpret(d) == pytest.approx(np.zeros((1, 1)))
    with pytest.raises(ZeroStateError):
        to_gs_rlc(d, checked=False)


# -- reduce ---------------------------------------------------------------------


def test_reduce_leaves_reduced_input_unchanged():
    n = GsRlcDiagram(
        SimpleGraph("01", [("0", "1")]),
        {"0": RealCliffordOp(h=1), "1": RealCliffordOp(z=1)},
    )
    r = reduce(n, checked=True)
    assert r.same_as(n)


def test_reduce_consumes_adjacent_h_pair_on_k2():
    g = SimpleGraph("ab", [("a", "b")])
    n = GsRlcDiagram(g, {"a": RealCliffordOp(h=1), "b": RealCliffordOp(h=1)})
    r = reduce(n, checked=True)
    assert r.reduced
    assert not r.h_carriers()
    assert r.graph == g


def test_reduce_h_pair_on_triangle_adds_z_on_common():
    n = GsRlcDiagram(
        TRIANGLE, {"a": RealCliffordOp(h=1), "b": RealCliffordOp(h=1)}
    )
    r = reduce(n, checked=True)
    assert r.reduced
    assert r.ops["c"].name == "Z"


def test_reduce_randomized_is_sound_and_reduced(rng):
    for _ in range(20):
        g = random_connected_graph(rng.randint(2, 5), rng)
        ops = {
            v: RealCliffordOp(rng.randint(0, 1), rng.randint(0, 1), rng.randint(0, 1))
            for v in g.sorted_vertices()
        }
        n = GsRlcDiagram(g, ops)
        r = reduce(n, checked=True)
        assert r.reduced


# -- simplify_pair ----------------------------------------------------------------


def test_simplify_identical_pair_unchanged():
    n = reduce(to_gs_rlc(graph_state_diagram(TRIANGLE)))
    a, b = simplify_pair(n, n, checked=True)
    assert a.same_as(n) and b.same_as(n)


def test_simplify_pair_without_h_is_vacuous():
    g = SimpleGraph("01", [("0", "1")])
    n1 = GsRlcDiagram(g, {"0": RealCliffordOp(z=1)})
    n2 = GsRlcDiagram(g, {"1": RealCliffordOp(z=1)})
    a, b = simplify_pair(n1, n2, checked=True)
    assert a.same_as(n1) and b.same_as(n2)


def test_simplify_pair_repairs_crossed_h():
    g = SimpleGraph("01", [("0", "1")])
    n1 = GsRlcDiagram(g, {"0": RealCliffordOp(h=1)})
    n2 = GsRlcDiagram(g, {"1": RealCliffordOp(h=1)})
    a, b = simplify_pair(n1, n2, checked=True)
    ha, hb = a.h_carriers(), b.h_carriers()
    assert not _offends(a, b)


def _offends(a, b):
    ha, hb = a.h_carriers(), b.h_carriers()
    for u in a.graph.vertices:
        for v in a.graph.vertices:
            if u == v:
                continue
            if (
                u in ha
                and v not in ha
                and v in hb
                and u not in hb
                and (a.graph.has_edge(u, v) or b.graph.has_edge(u, v))
            ):
                return True
    return False


def test_simplify_pair_requires_same_outputs():
    n1 = GsRlcDiagram(SimpleGraph("01"), {})
    n2 = GsRlcDiagram(SimpleGraph("02"), {})
    with pytest.raises(ZXError):
        simplify_pair(n1, n2)


# -- decide_equal -----------------------------------------------------------------


def test_decide_equal_reflexive():
    d = graph_state_diagram(TRIANGLE)
    dec = decide_equal(d, d)
    assert dec.equal and dec.witness is not None


def test_decide_equal_on_pivot_property_pairs(rng):
    for _ in range(6):
        g = random_connected_graph(rng.randint(2, 5), rng)
        edges = g.sorted_edges()
        if not edges:
            continue
        u, v = edges[rng.randrange(len(edges))]
        labels = g.sorted_vertices()
        d1 = graph_state_diagram(pivot(g, u, v))
        d2 = apply_local_ops(
            graph_state_diagram(g), LocalOpWord.pivot_op(g, u, v), labels
        )
        dec = decide_equal(d1, d2, checked=True)
        assert dec.equal, (g, u, v)


def test_decide_distinguishes_entangled_from_product():
    d1 = graph_state_diagram(SimpleGraph("ab", [("a", "b")]))
    d2 = graph_state_diagram(SimpleGraph("ab"))
    dec = decide_equal(d1, d2)
    assert not dec.equal


def test_decide_arity_mismatch_is_unequal():
    d1 = graph_state_diagram(SimpleGraph("ab"))
    d2 = graph_state_diagram(SimpleGraph("a"))
    dec = decide_equal(d1, d2)
    assert not dec.equal and "arity" in dec.reason


def test_decide_rejects_non_real():
    with pytest.raises(ZXError):
        decide_equal(
            Diagram.spider(Z, 0, 1, Phase(1, 2)), Diagram.spider(Z, 0, 1, Phase(0))
        )


def test_decide_zero_states():
    # a vanishing closed component (<0| of |1>) times a live qubit
    zero = Diagram(
        {
            0: VertexKind(X, Phase(1)),
            1: VertexKind(X, Phase(0)),
            2: VertexKind(Z, Phase(0)),
            3: VertexKind("B"),
        },
        [(0, 1), (2, 3)],
        [],
        [3],
    )
    assert np.allclose(interpret(zero), 0)
    live = graph_state_diagram(SimpleGraph("a"))
    assert decide_equal(zero, zero).equal
    assert not decide_equal(zero, live).equal
    assert not decide_equal(live, zero).equal


def test_decide_scalar_states():
    s1 = Diagram.spider(Z, 0, 0, Phase(0))  # scalar 2
    s2 = Diagram.cup().compose(Diagram.cap())  # also scalar 2
    assert decide_equal(s1, s2).equal


def test_decide_maps_are_bent_first():
    cz = Diagram.cz()
    zz = Diagram.cz().compose(Diagram.cz()).compose(Diagram.cz())
    assert decide_equal(cz, zz).equal
    assert not decide_equal(cz, Diagram.identity(2)).equal


def test_decide_agrees_with_oracle_randomized(rng):
    disagreements = 0
    for trial in range(60):
        q = rng.randint(1, 4)
        d1 = random_real_stabilizer_state(q, rng.randint(2, 14), rng=rng)
        d2 = random_real_stabilizer_state(q, rng.randint(2, 14), rng=rng)
        dec = decide_equal(d1, d2)
        oracle = eq_up_to(interpret(d1), interpret(d2), EqMode.UP_TO_SCALAR)
        if dec.equal != oracle.equal:
            disagreements += 1
    assert disagreements == 0


def test_pipeline_output_invariants(rng):
    for _ in range(15):
        d = random_real_stabilizer_state(rng.randint(1, 4), rng.randint(2, 12), rng=rng)
        try:
            n = reduce(to_gs_rlc(d, checked=True), checked=True)
        except ZeroStateError:
            continue
        assert n.reduced
        assert all(op.name in ("I", "Z", "H", "HZ") for op in n.ops.values())
