import math
from fractions import Fraction

import pytest

from hypervol.catalog import (
    DODECAHEDRON_MOVES,
    PLEATED_ALTERNATE_MOVES,
    PRISM_ALTERNATE_MOVES,
    build_dodecahedron,
    build_pentagonal_prism,
    build_pleated_prism,
    build_tetrahedron,
    catalog,
    catalog_entry,
)
from hypervol.graph import (
    GraphValidationError,
    Move,
    MoveError,
    PlanarTrivalentGraph,
    ReductionStuckError,
    graph_to_dot,
    plan_from_trace,
    reduce_graph,
    trace_to_dot,
)


def counts(g):
    return len(g.vertices()), len(g.edge_ids), len(g.faces())


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def test_builders_validate_and_count():
    for g, expect in (
        (build_tetrahedron(), (4, 6, 4)),
        (build_pentagonal_prism(), (10, 15, 7)),
        (build_pleated_prism(), (12, 18, 8)),
        (build_dodecahedron(), (20, 30, 12)),
    ):
        g.validate()
        assert counts(g) == expect
        nv, ne, nf = counts(g)
        assert nv - ne + nf == 2


def test_face_sizes():
    sizes = sorted(len(o) for o in build_pentagonal_prism().faces().values())
    assert sizes == [4, 4, 4, 4, 4, 5, 5]
    sizes = sorted(len(o) for o in build_pleated_prism().faces().values())
    assert sizes == [4, 4, 4, 4, 5, 5, 5, 5]
    sizes = sorted(len(o) for o in build_dodecahedron().faces().values())
    assert sizes == [5] * 12


def test_validate_rejects_nontrivalent_vertex():
    g = build_pentagonal_prism()
    sigma = dict(g._sigma)
    v1, v2 = sorted(g.vertices())[:2]
    # splice dart v2[0] out of its vertex and into v1's rotation
    d = v2[0]
    prev = next(x for x in v2 if sigma[x] == d)
    sigma[prev] = sigma[d]
    sigma[d] = sigma[v1[0]]
    sigma[v1[0]] = d
    bad = PlanarTrivalentGraph(sigma, dict(g._face_of), dict(g._angles))
    with pytest.raises(GraphValidationError, match="trivalent"):
        bad.validate()


def test_validate_rejects_inconsistent_face_label():
    g = build_pentagonal_prism()
    face_of = dict(g._face_of)
    d = next(iter(face_of))
    face_of[d] = 7 if face_of[d] != 7 else 6
    bad = PlanarTrivalentGraph(dict(g._sigma), face_of, dict(g._angles))
    with pytest.raises(GraphValidationError):
        bad.validate()


def test_validate_rejects_out_of_range_angle():
    with pytest.raises(GraphValidationError, match="angle"):
        build_pentagonal_prism(vertical=Fraction(3, 2))


def test_validate_rejects_missing_twin():
    g = build_tetrahedron()
    sigma = dict(g._sigma)
    face_of = dict(g._face_of)
    gone = max(sigma)
    del sigma[gone]
    del face_of[gone]
    for d in sigma:
        if sigma[d] == gone:
            sigma[d] = gone  # keep mapping, now dangling
    bad = PlanarTrivalentGraph(sigma, face_of, dict(g._angles))
    with pytest.raises(GraphValidationError):
        bad.validate()


# ---------------------------------------------------------------------------
# moves
# ---------------------------------------------------------------------------

def test_ih_preserves_counts_and_shifts_face_sizes():
    g = build_pentagonal_prism()
    s1, s2, e1, e2 = g.ih_faces(0)
    before = {l: len(o) for l, o in g.faces().items()}
    h = g.apply_ih(0)
    h.validate()
    assert counts(h) == counts(g)
    after = {l: len(o) for l, o in h.faces().items()}
    assert after[s1] == before[s1] - 1
    assert after[s2] == before[s2] - 1
    assert after[e1] == before[e1] + 1
    assert after[e2] == before[e2] + 1
    assert h.angle(0) is None  # rewired edge loses its dihedral


def test_ih_twice_restores_up_to_isomorphism():
    g = build_pentagonal_prism()
    for e in g.edge_ids:
        s1, s2, e1, e2 = g.ih_faces(e)
        if e1 == e2:
            continue
        h = g.apply_ih(e)
        try:
            back = h.apply_ih(e)
        except MoveError:
            continue  # second application blocked by a triangle side
        assert back.is_isomorphic(g)


def test_ih_refuses_collapsing_a_triangle_side():
    g = build_pentagonal_prism().apply_ih(0)
    tri = next(l for l, o in g.faces().items() if len(o) == 3)
    darts = g.faces()[tri]
    with pytest.raises(MoveError, match="collapse"):
        g.apply_ih(darts[0] >> 1)


def test_ih_refuses_on_tetrahedron():
    g = build_tetrahedron()
    for e in g.edge_ids:
        with pytest.raises(MoveError):
            g.apply_ih(e)


def test_cap_euler_deltas():
    g = build_pentagonal_prism().apply_ih(0)
    tri = next(l for l, o in g.faces().items() if len(o) == 3)
    nv, ne, nf = counts(g)
    h = g.apply_cap(tri)
    h.validate()
    assert counts(h) == (nv - 2, ne - 3, nf - 1)
    assert tri not in h.faces()


def test_cap_refuses_nontriangle_and_terminal():
    g = build_pentagonal_prism()
    with pytest.raises(MoveError, match="not a triangle"):
        g.apply_cap(1)
    with pytest.raises(MoveError, match="no face"):
        g.apply_cap("ghost")
    terminal = reduce_graph(g).terminal
    tri = next(iter(terminal.faces()))
    with pytest.raises(MoveError, match="fewer than 4"):
        terminal.apply_cap(tri)


# ---------------------------------------------------------------------------
# reduction and planning
# ---------------------------------------------------------------------------

def test_prism_default_reduction_and_plan():
    g = build_pentagonal_prism()
    trace = reduce_graph(g)
    assert len(trace.moves) == 4
    assert len(trace.terminal.faces()) == 4
    plan = plan_from_trace(g, trace)
    assert len(plan.tetrahedra) == len(trace.moves) + 1
    assert plan.type_counts() == {"P4": 5}
    assert plan.variables == ((6, 7),)
    quads = sorted(t.faces for t in plan.tetrahedra)
    assert quads == [(1, 2, 6, 7), (1, 5, 6, 7), (2, 3, 6, 7),
                     (3, 4, 6, 7), (4, 5, 6, 7)]


def test_prism_alternate_script_plan():
    g = build_pentagonal_prism()
    trace = reduce_graph(g, PRISM_ALTERNATE_MOVES)
    plan = plan_from_trace(g, trace)
    assert plan.type_counts() == {"P4": 5, "P14": 1}
    assert plan.variables == ((1, 3), (6, 7))
    assert len(plan.tetrahedra) == 6


def test_pleated_default_plan():
    g = build_pleated_prism()
    trace = reduce_graph(g)
    plan = plan_from_trace(g, trace)
    assert len(plan.tetrahedra) == 7
    assert plan.type_counts() == {"P4": 6, "P14": 1}
    assert plan.variables == ((3, 5), (6, 7))
    p14 = next(t for t in plan.tetrahedra if t.ttype.tag == "P14")
    assert p14.length_pairs == ((3, 5), (6, 7))


def test_pleated_alternate_plan():
    g = build_pleated_prism()
    trace = reduce_graph(g, PLEATED_ALTERNATE_MOVES)
    plan = plan_from_trace(g, trace)
    assert len(plan.tetrahedra) == 7
    assert plan.type_counts() == {"P4": 5, "P56": 2}
    assert plan.variables == ((4, 7), (6, 7))


def test_dodecahedron_pinned_plan():
    g = build_dodecahedron()
    trace = reduce_graph(g, DODECAHEDRON_MOVES)
    plan = plan_from_trace(g, trace)
    assert len(plan.tetrahedra) == 16
    assert plan.type_counts() == {"P4": 6, "P56": 6, "P456": 2, "P2356": 2}
    assert len(plan.variables) == 7


def test_every_original_edge_is_an_angle_edge_somewhere():
    for g in (build_pentagonal_prism(), build_dodecahedron()):
        trace = reduce_graph(g, DODECAHEDRON_MOVES
                             if len(g.faces()) == 12 else None)
        plan = plan_from_trace(g, trace)
        used = set()
        for tet in plan.tetrahedra:
            for pos, (kind, _) in enumerate(tet.entries):
                if kind == "angle":
                    used.add(tet.position_pair(pos))
        assert used == set(g.adjacency())


def test_angle_payloads_come_from_original_edges():
    g = build_pentagonal_prism()
    plan = plan_from_trace(g, reduce_graph(g))
    by_pair = {g.edge_face_pair(e): g.angle(e) for e in g.edge_ids}
    for tet in plan.tetrahedra:
        for pos, (kind, payload) in enumerate(tet.entries):
            if kind == "angle":
                assert payload == by_pair[tet.position_pair(pos)]


def test_variables_are_nonadjacent_pairs():
    g = build_dodecahedron()
    plan = plan_from_trace(g, reduce_graph(g, DODECAHEDRON_MOVES))
    adjacency = set(g.adjacency())
    for pair in plan.variables:
        assert pair not in adjacency


def test_reduce_rejects_short_script():
    g = build_pentagonal_prism()
    with pytest.raises(ReductionStuckError, match="ends with"):
        reduce_graph(g, (Move.ih(0),))


def test_reduce_tetrahedron_is_trivial():
    g = build_tetrahedron()
    trace = reduce_graph(g)
    assert trace.moves == ()
    plan = plan_from_trace(g, trace)
    assert len(plan.tetrahedra) == 1
    assert plan.variables == ()


def test_template_plan_refuses_shape_without_angles():
    g = build_pleated_prism()
    plan = plan_from_trace(g, reduce_graph(g))
    assert not plan.angles_complete()
    tet = plan.tetrahedra[0]
    with pytest.raises(ValueError, match="angles required"):
        tet.shape({pair: 1.0 for pair in tet.length_pairs})


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_json_round_trip_all_catalog_entries():
    for entry in catalog().values():
        g = entry.graph()
        back = PlanarTrivalentGraph.from_json(g.to_json())
        assert back.is_isomorphic(g)
        assert sorted(back.faces(), key=str) == sorted(g.faces(), key=str)
        pairs = {g.edge_face_pair(e): g.angle(e) for e in g.edge_ids}
        pairs_back = {back.edge_face_pair(e): back.angle(e)
                      for e in back.edge_ids}
        assert pairs == pairs_back


def test_from_json_rejects_duplicate_labels():
    doc = build_tetrahedron().to_json_dict()
    doc["faces"][1]["label"] = doc["faces"][0]["label"]
    with pytest.raises(GraphValidationError, match="unique"):
        PlanarTrivalentGraph.from_json_dict(doc)


def test_canonicalization_separates_catalogue_skeletons():
    g1 = build_pentagonal_prism()
    g2 = build_pleated_prism()
    assert g1.is_isomorphic(g1)
    assert not g1.is_isomorphic(g2)


def test_dot_export_mentions_faces_and_moves():
    g = build_pentagonal_prism()
    dot = graph_to_dot(g)
    assert "graph" in dot and "6" in dot and "7" in dot
    trace = reduce_graph(g)
    tdot = trace_to_dot(trace)
    assert "ih" in tdot and "cap" in tdot


def test_catalog_entry_unknown_name():
    with pytest.raises(KeyError, match="prism-235"):
        catalog_entry("no-such-solid")
