"""Acceptance criteria, one printed pass/fail line each.

Tolerances are exact (integer or rational equality) and runtime limits are
wall-clock seconds for a cold build plus homology.
"""
import time

import pytest

from smale_homology import build_complex, homology
from smale_homology.complex import fibered_graph, reduce, symmetrized_basis
from smale_homology.dimension import rationalize
from smale_homology._linalg import mpow, rows_of, to_fraction, trace
from smale_homology import StationarySystem
from smale_homology.lefschetz import parse_oracle, verify_lefschetz
from smale_homology.pair import recode

from corpus import EXAMPLES, example, fuzz_corpus

LIMITS = {"sft": 1.0, "solenoid2": 5.0, "solenoid3": 5.0, "torus_fib": 30.0}


@pytest.fixture
def line(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
        return ok
    return emit


def cold(name):
    fibered_graph.cache_clear()
    reduce.cache_clear()
    t = time.perf_counter()
    cx = build_complex(example(name))
    hr = homology(cx)
    return cx, hr, time.perf_counter() - t


def nonzero(hr):
    return {N: d.canonical.text() for N, d in sorted(hr.integral.items())
            if d.canonical.tag != "Trivial"}


def test_criterion_1_fibonacci_shift(line):
    cx, hr, dt = cold("sft")
    d0 = hr.integral[0]
    ok = (set(cx.terms) == {(0, 0)} and nonzero(hr) == {0: "Z^2"}
          and d0.canonical.tag == "FreeRank" and d0.canonical.a == 2
          and rows_of(d0.system.matrix) == [[1, 1], [1, 0]] and dt < LIMITS["sft"])
    assert line(1, "Fibonacci SFT", ok,
                f"H = {nonzero(hr)}, stage matrix {rows_of(d0.system.matrix)}, "
                f"{dt:.2f} s (limit 1 s)")


@pytest.mark.parametrize("name, m", [("solenoid2", 2), ("solenoid3", 3)])
def test_criterion_2_solenoids(line, name, m):
    cx, hr, dt = cold(name)
    zero = all(b.is_zero_matrix for b in cx.blocks.values())
    ok = (set(cx.terms) == {(0, 0), (1, 0)} and zero
          and nonzero(hr) == {0: f"Z[1/{m}]^1", 1: "Z^1"} and dt < LIMITS[name])
    assert line(2, f"solenoid m={m}", ok,
                f"terms {sorted(cx.terms)}, boundaries zero={zero}, H = {nonzero(hr)}, "
                f"{dt:.2f} s (limit 5 s)")


def test_criterion_3_torus(line):
    cx, hr, dt = cold("torus_fib")
    ok = (set(cx.terms) == {(0, 0), (1, 0), (0, 1), (1, 1)}
          and nonzero(hr) == {-1: "Z^1", 0: "Z^2", 1: "Z^1"} and dt < LIMITS["torus_fib"])
    assert line(3, "Fibonacci torus automorphism", ok,
                f"terms {sorted(cx.terms)}, H = {nonzero(hr)}, {dt:.2f} s (limit 30 s)")


@pytest.mark.parametrize("name, spec, expect", [
    ("sft", "sft", [1, 3, 4, 7, 11, 18]),
    ("solenoid2", "solenoid:m=2", [1, 3, 7, 15, 31, 63]),
    ("torus_fib", "torus_fib", [1, 1, 4, 5, 11, 16]),
])
def test_criterion_4_lefschetz(line, name, spec, expect):
    pp = example(name)
    table = verify_lefschetz(pp, parse_oracle(spec, pp.graph), 6)
    sums = [r.trace_sum for r in table.rows]
    oracle = [r.oracle for r in table.rows]
    ok = table.ok and oracle == expect and all(s.denominator == 1 for s in sums)
    assert line(4, f"Lefschetz {name}", ok,
                f"trace sums {[int(s) for s in sums]} vs oracle {oracle}, tolerance 0")


def test_criterion_5_properties(line):
    corpus = fuzz_corpus()
    chain_ok = sum(build_complex(pp).checks == {"d2_zero": True, "commutes": True}
                   for pp in corpus)
    exact = True
    for name in EXAMPLES:
        cx = build_complex(example(name))
        exact &= cx.checks == {"d2_zero": True, "commutes": True}
        hr = homology(cx)
        exact &= hr.uct_consistent()
        for p in range(1, 5):
            chains = 0
            for (L, M), t in cx.terms.items():
                r, act = rationalize(StationarySystem(len(t), t.gamma))
                if r:
                    chains += (-1) ** ((L - M) % 2) * to_fraction(trace(mpow(act, p)))
            exact &= hr.lefschetz(p) == chains
    ok = len(corpus) >= 100 and chain_ok == len(corpus) and exact
    assert line(5, "chain identities, Hopf trace, UCT", ok,
                f"{chain_ok}/{len(corpus)} fuzzed presentations pass d^2 = 0 and commutation; "
                f"examples Hopf p=1..4 and UCT exact={exact}")


@pytest.mark.parametrize("name", ["sft", "solenoid2", "torus_fib"])
def test_criterion_6_recoding_invariance(line, name):
    key = lambda hr: [(r["N"], r["betti"], r["charpoly"]) for r in hr.to_json()]
    a = key(homology(build_complex(example(name))))
    b = key(homology(build_complex(recode(example(name), 2))))
    assert line(6, f"2-block recoding {name}", a == b, f"{a} vs {b}")


def test_criterion_7_finiteness(line):
    bounds = {name: build_complex(example(name)).bound["N0"] for name in EXAMPLES}
    pp = example("sft")
    empty = all(len(symmetrized_basis(fibered_graph(pp, L, M))) == 0
                for L in range(4) for M in range(4) if (L, M) != (0, 0))
    ok = empty and all(isinstance(v, int) for v in bounds.values())
    assert line(7, "finite vanishing bound", ok,
                f"N0 = {bounds}; sft bases beyond (0,0) empty for L, M <= 3: {empty}")
