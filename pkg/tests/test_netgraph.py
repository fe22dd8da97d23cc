import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netbotany.netgraph import (
    NetworkGraph,
    canonical_code,
    check_rules,
    count_geodesics,
    d_value,
    face_count,
    graph_from_json,
    graph_to_dot,
    graph_to_json,
    is_dense_class,
    is_planar,
    transpose,
)

from catalog_reference import REFERENCE, reference_expectations, reference_graph


def G(edges, **kw):
    return NetworkGraph.build(edges, **kw)


single_edge = G([(0, 1)])
double_edge = G([(0, 1), (0, 1)])
triple_edge = G([(0, 1), (0, 1), (0, 1)])
quad_edge = G([(0, 1)] * 4)


class TestConstruction:
    def test_loop_rejected(self):
        with pytest.raises(ValueError, match="loop"):
            NetworkGraph((0, 1, 2), 0, 2, ((0, 1), (1, 1), (1, 2)))

    def test_source_must_have_indegree_zero(self):
        with pytest.raises(ValueError, match="source"):
            NetworkGraph((0, 1, 2), 0, 2, ((1, 0), (0, 2)))

    def test_sink_must_have_outdegree_zero(self):
        with pytest.raises(ValueError, match="sink"):
            NetworkGraph((0, 1, 2), 0, 2, ((0, 2), (2, 1)))

    def test_edge_order_normalized(self):
        a = NetworkGraph((0, 1, 2), 0, 2, ((1, 2), (0, 1)))
        b = NetworkGraph((0, 1, 2), 0, 2, ((0, 1), (1, 2)))
        assert a == b


class TestRules:
    def test_single_edge_passes_all(self):
        assert check_rules(single_edge).all

    def test_degree4_interior_fails_rule4(self):
        # the (1,2) network with an extra p->v edge: v has degree 4
        g = G([(0, 1), (0, 1), (1, 2), (1, 2)])
        rep = check_rules(g)
        assert not rep.rule4_interior_degree3
        assert not rep.all

    def test_k33_completion_fails_rule1(self):
        # bad completion of the interior star: underlying graph is K_{3,3}
        # with parts {p, q, v1} and {v2, v3, v4}
        p, a, b, c, d, q = range(6)
        g = G([(d, a), (a, b), (a, c), (p, d), (p, b), (p, c),
               (b, q), (c, q), (d, q)], source=p, sink=q)
        rep = check_rules(g)
        assert not rep.rule1_planar_loopfree
        assert rep.rule3_interior_forest
        assert rep.rule4_interior_degree3

    def test_interior_two_cycle_fails_rule3(self):
        p, a, b, q = range(4)
        g = G([(p, a), (p, b), (a, b), (b, a), (a, q), (b, q)],
              source=p, sink=q)
        assert not check_rules(g).rule3_interior_forest

    def test_extra_source_fails_rule2(self):
        p, a, b, q = range(4)
        # b has no incoming edge: a second source
        g = G([(p, a), (a, q), (b, q)], source=p, sink=q)
        assert not check_rules(g).rule2_unique_source_sink

    def test_degree4_endpoint_fails_rule5(self):
        assert not check_rules(quad_edge).rule5_endpoint_degree_le3

    def test_rules_transpose_invariant(self):
        for name in REFERENCE:
            g = reference_graph(name)
            assert check_rules(g).all
            assert check_rules(transpose(g)).all


class TestTranspose:
    def test_single_edge_isomorphic_to_transpose(self):
        t = transpose(single_edge)
        assert t.source == single_edge.sink
        assert canonical_code(t) == canonical_code(single_edge)

    def test_involution(self):
        for name in REFERENCE:
            g = reference_graph(name)
            assert transpose(transpose(g)) == g

    def test_g12_transpose_swaps_degrees(self):
        g = reference_graph("g12")
        t = transpose(g)
        assert (g.source_degree, g.sink_degree) == (1, 2)
        assert (t.source_degree, t.sink_degree) == (2, 1)


class TestCanonicalCode:
    def test_code_equal_for_transpose(self):
        for name in REFERENCE:
            g = reference_graph(name)
            assert canonical_code(g) == canonical_code(transpose(g))

    def test_relabeling_invariance(self):
        rng = random.Random(7)
        for name in REFERENCE:
            g = reference_graph(name)
            ids = list(g.vertices)
            shuffled = ids[:]
            rng.shuffle(shuffled)
            relabel = dict(zip(ids, shuffled))
            h = NetworkGraph(
                tuple(sorted(relabel.values())),
                relabel[g.source],
                relabel[g.sink],
                tuple((relabel[t], relabel[hh]) for t, hh in g.edges),
            )
            assert canonical_code(h) == canonical_code(g)

    def test_path1_transpose_pair_equal_codes(self):
        # two chain extensions that are transposes of each other:
        # p-edges to the chain ends vs p-edges to the chain middle
        p, a, b, c, d, q = range(6)
        chain = [(a, b), (b, c), (c, d)]
        g1 = G([(p, a), (p, a), (p, d), (b, q), (c, q), (d, q)] + chain,
               source=p, sink=q)
        g2 = G([(p, a), (p, b), (p, c), (a, q), (d, q), (d, q)] + chain,
               source=p, sink=q)
        assert canonical_code(g1) == canonical_code(g2)

    def test_g22_members_distinct(self):
        codes = {
            canonical_code(reference_graph(n)).code
            for n in ("g22_double", "g22_bridge", "g22_diamond")
        }
        assert len(codes) == 3

    def test_all_reference_codes_distinct(self):
        codes = {canonical_code(reference_graph(n)).code for n in REFERENCE}
        assert len(codes) == 27


class TestPlanarity:
    def test_forest_planar(self):
        g = G([(0, 1), (1, 2), (1, 3)], sink=3)
        assert is_planar(g)

    def test_quadruple_edge_planar(self):
        assert is_planar(quad_edge)

    def test_k33_subdivision_nonplanar(self):
        p, a, b, c, d, q = range(6)
        g = G([(d, a), (a, b), (a, c), (p, d), (p, b), (p, c),
               (b, q), (c, q), (d, q)], source=p, sink=q)
        assert not is_planar(g)


class TestFaceCount:
    def test_single_edge(self):
        assert face_count(single_edge) == 1

    def test_double_edge(self):
        # 2|F| = k + l + |V| - 2 = 2 + 2 + 2 - 2
        assert face_count(double_edge) == 2

    def test_g23_five_vertices(self):
        g = reference_graph("g23_c")
        assert g.num_vertices == 5 and g.num_edges == 7
        assert face_count(g) == 4

    def test_euler_identity_all_reference(self):
        for name in REFERENCE:
            g = reference_graph(name)
            k, l = g.source_degree, g.sink_degree
            assert 2 * face_count(g) == k + l + g.num_vertices - 2

    def test_disconnected_rejected(self):
        g = NetworkGraph((0, 1, 2, 3), 0, 1, ((0, 1), (2, 3)))
        with pytest.raises(ValueError, match="connected"):
            face_count(g)


class TestGeodesicCount:
    def test_examples(self):
        assert count_geodesics(single_edge) == 1
        assert count_geodesics(double_edge) == 2

    def test_dense_33_member_has_nine(self):
        assert count_geodesics(reference_graph("g33_p1_e")) == 9

    def test_reference_counts(self):
        for name, g, t, _, _ in reference_expectations():
            assert count_geodesics(g) == t, name

    def test_transpose_preserves_count(self):
        for name in REFERENCE:
            g = reference_graph(name)
            assert count_geodesics(g) == count_geodesics(transpose(g))


class TestDimensionValue:
    def test_edge_multiples(self):
        assert d_value(single_edge) == 10
        assert d_value(double_edge) == 7
        assert d_value(triple_edge) == 2

    def test_reference_values(self):
        for name, g, _, d, _ in reference_expectations():
            assert d_value(g) == d, name

    def test_range_and_vertex_bounds(self):
        for name, g, _, _, _ in reference_expectations():
            k, l = g.source_degree, g.sink_degree
            assert 0 <= d_value(g) <= 10
            assert 2 + abs(k - l) <= g.num_vertices <= k + l

    def test_rejects_non_catalog(self):
        with pytest.raises(ValueError):
            d_value(quad_edge)


class TestDensity:
    def test_reference_flags(self):
        for name, g, _, _, dense in reference_expectations():
            assert is_dense_class(g) == dense, name

    def test_four_geodesic_22_member_is_dense(self):
        assert is_dense_class(reference_graph("g22_bridge"))

    def test_three_geodesic_22_member_is_not(self):
        assert not is_dense_class(reference_graph("g22_diamond"))


class TestSerialization:
    def test_json_round_trip(self):
        for name in REFERENCE:
            g = reference_graph(name)
            assert graph_from_json(graph_to_json(g)) == g

    def test_dot_contains_all_edges(self):
        g = reference_graph("g23_c")
        dot = graph_to_dot(g)
        assert dot.count("->") == g.num_edges


@st.composite
def small_graphs(draw):
    n_interior = draw(st.integers(min_value=0, max_value=3))
    vertices = list(range(n_interior + 2))
    source, sink = 0, n_interior + 1
    possible = [
        (t, h)
        for t in vertices
        for h in vertices
        if t != h and h != source and t != sink
    ]
    n_edges = draw(st.integers(min_value=1, max_value=6))
    edges = tuple(
        draw(st.sampled_from(possible)) for _ in range(n_edges)
    )
    return NetworkGraph(tuple(vertices), source, sink, edges)


@given(small_graphs())
@settings(max_examples=150, deadline=None)
def test_transpose_involution_property(g):
    assert transpose(transpose(g)) == g


@given(small_graphs())
@settings(max_examples=150, deadline=None)
def test_code_transpose_property(g):
    assert canonical_code(g) == canonical_code(transpose(g))


@given(small_graphs(), st.randoms(use_true_random=False))
@settings(max_examples=100, deadline=None)
def test_code_relabel_property(g, rnd):
    ids = list(g.vertices)
    shuffled = ids[:]
    rnd.shuffle(shuffled)
    relabel = dict(zip(ids, shuffled))
    h = NetworkGraph(
        tuple(sorted(relabel.values())),
        relabel[g.source],
        relabel[g.sink],
        tuple((relabel[t], relabel[hh]) for t, hh in g.edges),
    )
    assert canonical_code(h) == canonical_code(g)


@given(small_graphs())
@settings(max_examples=100, deadline=None)
def test_rules_transpose_property(g):
    assert check_rules(g).all == check_rules(transpose(g)).all
