import pytest
from hypothesis import given, settings, strategies as st

from blowfish_privacy import (
    DiffTriple,
    InputError,
    complete_policy,
    custom_policy,
    distance_threshold_policy,
    embed_graph_as_policy,
    enumerate_permissible,
    induce_adjacency_graph,
    is_adjacent,
    secret_difference,
    total_difference,
)
from blowfish_privacy.adjacency import (
    AdjacencyAsymmetryWarning,
    adjacency_from_json,
    adjacency_to_json,
)
from blowfish_privacy.graphcore import components_and_diameters

from helpers import graphs, oracle_adjacency_edges, small_policies


@pytest.fixture(scope="module")
def path_policy():
    return distance_threshold_policy([1, 2, 3, 4], 1, n=2)


def test_total_difference_single_position():
    assert total_difference(("1", "2"), ("1", "3")) == {DiffTriple(1, "2", "3")}


def test_total_difference_identity_empty():
    assert total_difference(("1", "2"), ("1", "2")) == frozenset()


def test_total_difference_both_positions():
    assert total_difference(("1", "1"), ("2", "2")) == {
        DiffTriple(0, "1", "2"),
        DiffTriple(1, "1", "2"),
    }


def test_total_difference_length_mismatch():
    with pytest.raises(InputError):
        total_difference(("1",), ("1", "2"))


def test_secret_difference_keeps_secret_pairs(path_policy):
    g = path_policy.secret_graph
    assert secret_difference(("1", "2"), ("1", "3"), g) == {DiffTriple(1, "2", "3")}
    assert secret_difference(("1", "1"), ("1", "3"), g) == frozenset()


def test_secret_difference_complete_equals_total():
    g = complete_policy(4, n=2).secret_graph
    for d1, d2 in [(("1", "1"), ("2", "3")), (("1", "4"), ("4", "1"))]:
        assert secret_difference(d1, d2, g) == total_difference(d1, d2)


def test_is_adjacent_cases(path_policy):
    dbs = enumerate_permissible(path_policy)
    assert is_adjacent(("1", "1"), ("1", "2"), path_policy, dbs)
    assert not is_adjacent(("1", "1"), ("1", "3"), path_policy, dbs)
    # two positions differ and ("2","1") realises a strictly smaller difference
    assert not is_adjacent(("1", "1"), ("2", "2"), path_policy, dbs)


def test_is_adjacent_requires_membership(path_policy):
    dbs = enumerate_permissible(path_policy)
    with pytest.raises(InputError):
        is_adjacent(("1", "5"), ("1", "1"), path_policy, dbs)


def test_induced_graph_matches_both_paths_and_oracle(path_policy):
    fast = induce_adjacency_graph(path_policy, method="fast")
    definition = induce_adjacency_graph(path_policy, method="definition")
    assert fast.vertices == definition.vertices
    assert fast.edges == definition.edges
    assert definition.asymmetric_pairs == ()

    expected = oracle_adjacency_edges(
        path_policy.secret_graph.edges, list(fast.vertices)
    )
    assert set(fast.edges) == expected

    comps = components_and_diameters(fast.to_graph())
    assert len(fast.vertices) == 16
    assert comps.count == 1
    assert comps.diameters == (6,)

    index = {db: k for k, db in enumerate(fast.vertices)}
    assert (index[("1", "1")], index[("1", "2")]) in fast.edges
    assert (index[("1", "1")], index[("2", "1")]) in fast.edges
    assert (index[("1", "1")], index[("2", "2")]) not in fast.edges


def test_complete_secrets_give_hamming_adjacency():
    pol = complete_policy(4, n=2)
    ag = induce_adjacency_graph(pol)
    hamming = {
        (i, j)
        for i, a in enumerate(ag.vertices)
        for j, b in enumerate(ag.vertices)
        if i < j and sum(x != y for x, y in zip(a, b)) == 1
    }
    assert set(ag.edges) == hamming


def test_single_database_graph():
    pol = complete_policy(3, n=2, permissible=[("1", "1")])
    ag = induce_adjacency_graph(pol)
    assert len(ag.vertices) == 1
    assert ag.edges == frozenset()


def test_fast_method_rejects_constrained():
    pol = complete_policy(2, n=1, permissible=[("1",), ("2",)])
    with pytest.raises(InputError):
        induce_adjacency_graph(pol, method="fast")


def test_directional_asymmetry_detected_and_reported():
    # Path secrets 1-2-3 with permissible {(1,1), (2,2), (3,2)}: going from
    # (1,1), the database (3,2) realises a strictly smaller secret
    # difference towards (2,2), but from (2,2) no database blocks, so the
    # relation disagrees by direction and the edge is kept.
    pol = custom_policy(
        ["1", "2", "3"],
        [("1", "2"), ("2", "3")],
        n=2,
        permissible=[("1", "1"), ("2", "2"), ("3", "2")],
    )
    dbs = enumerate_permissible(pol)
    assert not is_adjacent(("1", "1"), ("2", "2"), pol, dbs)
    assert is_adjacent(("2", "2"), ("1", "1"), pol, dbs)

    with pytest.warns(AdjacencyAsymmetryWarning):
        ag = induce_adjacency_graph(pol)
    i, j = dbs.index(("1", "1")), dbs.index(("2", "2"))
    assert (i, j) in ag.asymmetric_pairs
    assert (i, j) in ag.edges


@settings(max_examples=60)
@given(small_policies(max_tuples=4, max_n=2, allow_constrained=False))
def test_fast_path_equals_definition_on_unconstrained(pol):
    fast = induce_adjacency_graph(pol, method="fast")
    definition = induce_adjacency_graph(pol, method="definition")
    assert fast.edges == definition.edges
    assert definition.asymmetric_pairs == ()


@settings(max_examples=40)
@given(small_policies(max_tuples=3, max_n=2, allow_constrained=True))
def test_definition_path_matches_oracle(pol):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AdjacencyAsymmetryWarning)
        ag = induce_adjacency_graph(pol, method="definition")
    expected = oracle_adjacency_edges(pol.secret_graph.edges, list(ag.vertices))
    assert set(ag.edges) == expected


def test_fast_equals_definition_three_records():
    pol = distance_threshold_policy([1, 2, 3], 1, n=3)
    fast = induce_adjacency_graph(pol, method="fast")
    definition = induce_adjacency_graph(pol, method="definition")
    assert fast.edges == definition.edges


def test_embedding_triangle():
    from blowfish_privacy import Graph

    triangle = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    pol = embed_graph_as_policy(triangle)
    assert len(pol.universe) == 3
    assert pol.secret_graph.edge_count == 3
    assert pol.n == 1
    assert induce_adjacency_graph(pol).to_graph().edges == triangle.edges


def test_embedding_clique_plus_matching_graph():
    from blowfish_privacy import sharpness_graph

    graph = sharpness_graph(3)
    pol = embed_graph_as_policy(graph)
    assert induce_adjacency_graph(pol).to_graph().edges == graph.edges


@settings(max_examples=60)
@given(graphs(max_vertices=8))
def test_embedding_round_trip(graph):
    pol = embed_graph_as_policy(graph)
    assert pol.n == 1
    induced = induce_adjacency_graph(pol)
    assert induced.to_graph().edges == graph.edges
    assert len(induced.vertices) == graph.vertex_count


@given(m=st.integers(2, 4), n=st.integers(1, 2))
def test_dp_special_case_differ_in_one_record(m, n):
    ag = induce_adjacency_graph(complete_policy(m, n=n))
    for i, j in ag.edges:
        assert sum(x != y for x, y in zip(ag.vertices[i], ag.vertices[j])) == 1
    for i, a in enumerate(ag.vertices):
        for j in range(i + 1, len(ag.vertices)):
            if sum(x != y for x, y in zip(a, ag.vertices[j])) == 1:
                assert (i, j) in ag.edges


def test_graph_document_round_trip(path_policy):
    ag = induce_adjacency_graph(path_policy)
    text = adjacency_to_json(ag)
    again = adjacency_from_json(text)
    assert again.vertices == ag.vertices
    assert again.edges == ag.edges
