import pytest

from zxpivot import Diagram, Phase, VertexKind, eq_up_to, interpret, to_graph_like
from zxpivot.diagram import BOUNDARY, H, X, Z
from zxpivot.errors import MalformedDiagramError, ZeroStateError
from zxpivot.gen import random_real_stabilizer_state
from zxpivot.graphstate import SimpleGraph, graph_state_diagram
from zxpivot.semantics import EqMode

ZK = VertexKind(Z, Phase(0))
B = VertexKind(BOUNDARY)


def assert_view_sound(d, label=""):
    view = to_graph_like(d)
    assert view.validate() == []
    r = eq_up_to(interpret(d), interpret(view.to_diagram()), EqMode.UP_TO_SCALAR)
    assert r.equal, label
    return view


def test_triangle_state_view():
    g = SimpleGraph("abc", [("a", "b"), ("b", "c"), ("a", "c")])
    view = assert_view_sound(graph_state_diagram(g))
    assert len(view.phases) == 3
    assert len(view.h_edges) == 3
    assert all(p.is_zero() for p in view.phases.values())


def test_parallel_h_edges_cancel_mod_two():
    d = Diagram(
        {0: ZK, 1: ZK, 2: VertexKind(H), 3: VertexKind(H), 4: B, 5: B},
        [(0, 2), (1, 2), (0, 3), (1, 3), (0, 4), (1, 5)],
        [],
        [4, 5],
    )
    view = assert_view_sound(d)
    assert view.h_edges == set()


def test_h_self_loop_becomes_pi():
    d = Diagram({0: ZK, 1: VertexKind(H), 2: B}, [(0, 1), (0, 1), (0, 2)], [], [2])
    view = assert_view_sound(d)
    (spider,) = view.output_spider
    assert view.phases[spider].is_pi()


def test_plain_self_loop_dropped():
    d = Diagram({0: ZK, 1: B}, [(0, 0), (0, 1)], [], [1])
    view = assert_view_sound(d)
    assert all(p.is_zero() for p in view.phases.values())


def test_requires_state():
    with pytest.raises(MalformedDiagramError):
        to_graph_like(Diagram.wire())


def test_odd_h_cycle_is_zero():
    d = Diagram({0: VertexKind(H)}, [(0, 0)])
    with pytest.raises(ZeroStateError):
        to_graph_like(d)


def test_bare_wire_between_outputs():
    assert_view_sound(Diagram.cup(), "cup")
    assert_view_sound(Diagram.h_box().bend_inputs(), "bent H")


def test_spider_fusion_and_color_change():
    d = (
        Diagram.spider(X, 0, 2, Phase(1))
        .compose(Diagram.cz())
        .compose(Diagram.h_box().tensor(Diagram.wire()))
    )
    view = assert_view_sound(d)
    # interior content collapses to one spider per output after fusion
    assert all(p.is_real() for p in view.phases.values())


def test_shared_output_spider_is_split():
    view = assert_view_sound(Diagram.spider(Z, 0, 3, Phase(0)), "ghz")
    assert len(set(view.output_spider)) == 3


def test_random_states_re_expand_soundly(rng):
    for trial in range(30):
        d = random_real_stabilizer_state(
            rng.randint(1, 5), rng.randint(2, 15), rng=rng
        )
        assert_view_sound(d, f"trial {trial}")


def test_random_bent_maps_re_expand_soundly(rng):
    # views of bent maps with up to 6 open legs
    for trial in range(15):
        d = random_real_stabilizer_state(rng.randint(2, 6), rng.randint(2, 12), rng=rng)
        assert_view_sound(d.bend_inputs(), f"bent {trial}")


def test_general_phases_permitted():
    d = Diagram.spider(Z, 0, 1, Phase(1, 4))
    view = assert_view_sound(d)
    assert any(p == Phase(1, 4) for p in view.phases.values())
