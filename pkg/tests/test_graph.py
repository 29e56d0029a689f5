import pytest
from hypothesis import given, strategies as st

from smale_homology import Graph, adjacency_matrix, higher_block, validate_graph
from smale_homology._linalg import rows_of
from smale_homology.graph import (GraphHom, block_words, check_resolving, closed_paths,
                                  compose, count_periodic, graph_from_json, graph_to_json,
                                  is_irreducible, prune, resolving_delay)

from corpus import FIB, graphs, loops


def test_fibonacci_adjacency():
    assert rows_of(adjacency_matrix(FIB)) == [[1, 1], [1, 0]]


def test_fibonacci_periodic_counts_are_lucas():
    assert [count_periodic(FIB, p) for p in range(1, 7)] == [1, 3, 4, 7, 11, 18]


def test_loops_count():
    assert [count_periodic(loops(3), p) for p in (1, 2, 3)] == [3, 9, 27]


def test_adjacency_counts_parallel_edges():
    g = Graph(["a", "b"], [("p", "a", "b"), ("q", "a", "b"), ("r", "b", "a")])
    assert rows_of(adjacency_matrix(g)) == [[0, 2], [1, 0]]


def test_validate_reports_dangling_endpoint():
    rep = validate_graph(Graph(["a"], [("x", "a", "c")]))
    assert not rep.ok
    assert rep.violations[0]["kind"] == "dangling endpoint"
    assert rep.violations[0]["witness"] == "x"


def test_validate_reports_empty_and_duplicates():
    assert validate_graph(Graph([], [])).violations[0]["kind"] == "empty graph"
    kinds = {v["kind"] for v in
             validate_graph(Graph(["a", "a"], [("x", "a", "a"), ("x", "a", "a")])).violations}
    assert {"duplicate vertex", "duplicate edge"} <= kinds


def test_validate_reports_sink_and_prunes():
    g = Graph(["a", "b"], [("x", "a", "a"), ("y", "a", "b")])
    kinds = [v["kind"] for v in validate_graph(g).violations]
    assert "no outgoing edge" in kinds
    rep, pg = validate_graph(g, prune_graph=True)
    assert rep.ok and pg.vertices == ("a",) and [e for e, _, _ in pg.edges] == ["x"]


def test_higher_block_rejects_zero():
    with pytest.raises(ValueError):
        higher_block(FIB, 0)


def test_two_block_projection_resolves_on_the_left_only():
    h, proj = higher_block(FIB, 2)
    assert not proj.violations()
    assert check_resolving(proj, "left")
    res = check_resolving(proj, "right")
    assert not res and res.witness is not None


def test_collapse_is_not_resolving():
    dom = Graph(["u", "w"], [("a", "u", "u"), ("b", "w", "u"), ("c", "u", "w")])
    cod = Graph(["v"], [("x", "v", "v")])
    h = GraphHom(dom, cod, {"u": "v", "w": "v"}, {"a": "x", "b": "x", "c": "x"})
    assert not check_resolving(h, "left")
    assert resolving_delay(h, "left", 6)[0] is None


def test_delayed_resolving_detects_the_needed_delay():
    # two paths into w agree on the edge at w only once we look one step further back
    dom = Graph(["p", "q", "w"], [("a", "p", "w"), ("b", "q", "w"), ("c", "w", "p"),
                                  ("d", "w", "q")])
    cod = Graph(["s", "t"], [("x", "s", "t"), ("y", "t", "s"), ("z", "t", "s")])
    h = GraphHom(dom, cod, {"p": "s", "q": "s", "w": "t"},
                 {"a": "x", "b": "x", "c": "y", "d": "z"})
    assert not h.violations()
    assert not check_resolving(h, "left", 0)
    assert check_resolving(h, "left", 1)
    assert resolving_delay(h, "left")[0] == 1


def test_compose_of_block_maps():
    h2, p2 = higher_block(FIB, 2)
    h3, p3 = higher_block(h2, 2)
    c = compose(p2, p3)
    assert not c.violations()
    assert c.codomain == FIB


def test_block_words():
    words = block_words(FIB, 2)
    assert sorted(words.values()) == [("x", "x"), ("x", "y"), ("y", "z"), ("z", "x"),
                                      ("z", "y")]


def test_json_round_trip():
    assert graph_from_json(graph_to_json(FIB)) == FIB


def test_irreducible():
    assert is_irreducible(FIB)
    assert not is_irreducible(Graph(["a", "b"], [("x", "a", "a"), ("y", "b", "b")]))


@given(graphs(), st.integers(1, 5))
def test_trace_identity(g, p):
    assert count_periodic(g, p) == closed_paths(g, p)


@given(graphs(max_edges=6), st.integers(2, 3), st.integers(1, 4))
def test_periodic_counts_survive_recoding(g, k, p):
    g = prune(g)
    if not g.edges:
        return
    h, proj = higher_block(g, k)
    assert not proj.violations()
    assert count_periodic(h, p) == count_periodic(g, p)


@given(graphs())
def test_pruning_is_idempotent_and_essential(g):
    pg = prune(g)
    assert prune(pg) == pg
    if pg.edges:
        assert validate_graph(pg).ok
