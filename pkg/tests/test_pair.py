import json

import pytest
from hypothesis import given, strategies as st

from smale_homology import Graph, dump_pair, gen_example, load_pair, validate_pair
from smale_homology.pair import (ExampleFamily, PairFormatError, PairPresentation,
                                 RegularizeError, pair_to_json, recode, regularize,
                                 structural_report)

from corpus import EXAMPLES, FIB, example

ONE = Graph(["v"], [("p", "v", "v"), ("q", "v", "v"), ("r", "v", "v")])


def test_sft_presentation_is_valid():
    pp = gen_example("sft", graph=FIB)
    assert pp.sameY == () and pp.sameZ == ()
    assert validate_pair(pp).ok


@pytest.mark.parametrize("name", EXAMPLES)
def test_generated_examples_are_valid(name):
    rep = validate_pair(example(name))
    assert rep.ok, rep.violations


def test_torus_needs_delay_two():
    rep = validate_pair(example("torus_fib"))
    assert {"max_delay": 2} in rep.notes


def test_solenoid_window_lengths():
    assert example("solenoid2").meta["sync"] == [1, 2]
    assert example("solenoid2").meta["block"] == 3
    assert example("solenoid3").meta["block"] == 2
    assert len(example("torus_fib").graph.edges) == 8


@pytest.mark.parametrize("family, m", [("solenoid", 2), ("solenoid", 3), ("torus_fib", 0)])
def test_raw_presentations_need_one_recoding(family, m):
    raw = gen_example(family, m=m, raw=True)
    assert not validate_pair(raw).ok
    fixed = regularize(raw)
    assert fixed.meta["recoded"] == 2
    assert validate_pair(fixed).ok


def test_regularize_returns_valid_input_unchanged():
    pp = example("solenoid3")
    assert regularize(pp) is pp


def test_regularize_gives_up_with_cap_message():
    pp = PairPresentation(ONE, [["p", "q", "r"]], [["p", "q", "r"]])
    with pytest.raises(RegularizeError, match="cap exceeded"):
        regularize(pp, cap=2)


def test_vertex_compatibility_violation():
    g = Graph(["a", "b"], [("x", "a", "a"), ("y", "b", "a"), ("z", "a", "b")])
    rep = structural_report(PairPresentation(g, [["x", "y"]], []))
    assert [v["kind"] for v in rep.violations] == ["vertex compatibility"]


def test_square_filling_violation_in_partition_mode():
    rep = structural_report(PairPresentation(ONE, [["p", "q"]], [["p", "r"]]))
    assert rep.violations[0]["kind"] == "square filling"
    assert rep.violations[0]["witness"] == ("p", "q", "r")


def test_cliques_mode_accepts_overlapping_blocks():
    obj = {"graph": {"vertices": ["v"],
                     "edges": [{"id": i, "src": "v", "dst": "v"} for i in "pqr"]},
           "sameY": [], "sameZ": [["p", "q"], ["q", "r"]], "relation": "cliques"}
    pp = load_pair(obj)
    assert pp.related("Z", "p", "q") and not pp.related("Z", "p", "r")
    obj.pop("relation")
    with pytest.raises(PairFormatError, match="overlapping partition"):
        load_pair(obj)


def _obj(**over):
    base = {"graph": {"vertices": ["v"], "edges": [{"id": "p", "src": "v", "dst": "v"},
                                                   {"id": "q", "src": "v", "dst": "v"}]},
            "sameY": [["p", "q"]], "sameZ": []}
    base.update(over)
    return base


def test_load_errors():
    with pytest.raises(PairFormatError, match="dangling edge id"):
        load_pair(_obj(sameZ=[["p", "nope"]]))
    with pytest.raises(PairFormatError, match=r"parse error at line 1 column \d+"):
        load_pair('{"graph": [')
    with pytest.raises(FileNotFoundError, match="file not found"):
        load_pair("/nonexistent/pair.json")
    bad = _obj()
    bad["graph"]["edges"].append({"id": "r", "src": "v", "dst": "w"})
    with pytest.raises(PairFormatError, match="invalid graph"):
        load_pair(bad)
    with pytest.raises(PairFormatError, match="relation"):
        load_pair(_obj(relation="fuzzy"))


def test_load_from_file(tmp_path):
    path = tmp_path / "pp.json"
    path.write_text(dump_pair(example("solenoid2")))
    assert load_pair(str(path)) == example("solenoid2")
    assert load_pair(path) == example("solenoid2")


def test_gen_example_errors():
    with pytest.raises(ValueError):
        gen_example("solenoid", m=1)
    with pytest.raises(ValueError):
        gen_example("sft")
    with pytest.raises(ValueError):
        gen_example(ExampleFamily("klein_bottle"))


def test_symbolwise_recoding_of_a_partition():
    pp = PairPresentation(ONE, [["p", "q"]], [])
    r = recode(pp, 2, symbolwise=True)
    assert r.mode == "partition"
    assert len(r.graph.edges) == 9
    # blocks are products of the symbol classes {p, q} and {r}
    assert r.sameY == (("p.p", "p.q", "q.p", "q.q"), ("p.r", "q.r"), ("r.p", "r.q"))


def test_recoding_keeps_validity():
    for name in EXAMPLES:
        assert validate_pair(recode(example(name), 2)).ok


@st.composite
def presentations(draw):
    n = draw(st.integers(1, 6))
    ids = [f"e{i}" for i in range(n)]
    g = Graph(["v"], [(e, "v", "v") for e in ids])
    labels_y = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    labels_z = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    blocks = lambda lab: [[e for e, x in zip(ids, lab) if x == c] for c in set(lab)]
    return PairPresentation(g, blocks(labels_y), blocks(labels_z))


@given(presentations())
def test_dump_load_round_trip(pp):
    text = dump_pair(pp)
    back = load_pair(text)
    assert back == pp
    assert dump_pair(back) == text
    assert json.loads(text) == pair_to_json(pp)
