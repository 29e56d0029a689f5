"""Shared example presentations and a seeded corpus of small digit systems."""
from __future__ import annotations

import random
from functools import lru_cache

from hypothesis import strategies as st

from smale_homology import Graph, gen_example
from smale_homology.generators import carry_pair
from smale_homology.graph import prune
from smale_homology.pair import RegularizeError, validate_pair

FIB = Graph(["a", "b"], [("x", "a", "a"), ("y", "a", "b"), ("z", "b", "a")])


def loops(m: int) -> Graph:
    return Graph(["v"], [(f"l{i}", "v", "v") for i in range(m)])


@lru_cache(maxsize=None)
def example(name: str):
    if name == "sft":
        return gen_example("sft", graph=FIB)
    if name == "solenoid2":
        return gen_example("solenoid", m=2)
    if name == "solenoid3":
        return gen_example("solenoid", m=3)
    if name == "torus_fib":
        return gen_example("torus_fib")
    raise KeyError(name)


EXAMPLES = ("sft", "solenoid2", "solenoid3", "torus_fib")


def random_labelled(rng: random.Random, max_vertices: int = 4):
    """A graph whose out-edges at each vertex carry distinct digits mod m."""
    m = rng.choice([2, 3])
    vs = [f"v{i}" for i in range(rng.randint(1, max_vertices))]
    edges, digits = [], {}
    for v in vs:
        for d in rng.sample(range(m), rng.randint(1, m)):
            e = f"e{len(edges)}"
            edges.append((e, v, rng.choice(vs)))
            digits[e] = d
    g = prune(Graph(vs, edges))
    return g, {e: digits[e] for e in g.edge_ids}, m


def random_sft(rng: random.Random, max_vertices: int = 4) -> Graph:
    vs = [f"v{i}" for i in range(rng.randint(1, max_vertices))]
    edges = [(f"e{i}", rng.choice(vs), rng.choice(vs))
             for i in range(rng.randint(len(vs), 2 * len(vs) + 2))]
    return prune(Graph(vs, edges))


@lru_cache(maxsize=None)
def fuzz_corpus(seed: int = 7, want: int = 100, sft_share: int = 20):
    """At least ``want`` valid presentations over graphs with at most 4 vertices."""
    rng = random.Random(seed)
    out = []
    while sum(1 for p in out if p.meta.get("family") == "sft") < sft_share:
        g = random_sft(rng)
        if g.edges:
            out.append(gen_example("sft", graph=g))
    tries = 0
    while len(out) < want:
        tries += 1
        if tries > 20 * want:
            raise RuntimeError("fuzz corpus: too few valid presentations")
        g, digits, m = random_labelled(rng)
        if not g.edges or len(set(digits.values())) < 2:
            continue
        pp = carry_pair(g, digits, m)
        if validate_pair(pp).ok:
            out.append(pp)
    return tuple(out)


@st.composite
def graphs(draw, max_vertices=4, max_edges=9):
    n = draw(st.integers(1, max_vertices))
    vs = [f"v{i}" for i in range(n)]
    k = draw(st.integers(1, max_edges))
    ends = draw(st.lists(st.tuples(st.sampled_from(vs), st.sampled_from(vs)),
                         min_size=k, max_size=k))
    return Graph(vs, [(f"e{i}", s, t) for i, (s, t) in enumerate(ends)])
