"""Pair presentations: a graph for the fibre product plus same-Y / same-Z data.

The two relations say which edges stand for points with a common Y (resp. Z)
coordinate at the current symbol. In ``partition`` mode the blocks must be
disjoint. In ``cliques`` mode blocks may overlap and the relation is the
union of their complete graphs; this is what the carry-based generators
produce, since "digits agree up to a bounded carry" is not transitive.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

from .graph import (Graph, Report, block_words, graph_from_json, graph_to_json,
                    higher_block, validate_graph)

__all__ = [
    "PairPresentation", "PairFormatError", "RegularizeError", "ExampleFamily",
    "load_pair", "dump_pair", "pair_to_json", "validate_pair", "structural_report",
    "regularize", "recode", "gen_example", "relation_from_pairs",
]

MODES = ("partition", "cliques")


class PairFormatError(ValueError):
    pass


class RegularizeError(RuntimeError):
    pass


def _normalize(blocks, order) -> tuple:
    out = set()
    for b in blocks:
        b = tuple(sorted(set(b), key=order.__getitem__))
        if len(b) > 1:
            out.add(b)
    return tuple(sorted(out, key=lambda b: [order[x] for x in b]))


@dataclass(frozen=True)
class PairPresentation:
    graph: Graph
    sameY: tuple = ()
    sameZ: tuple = ()
    mode: str = "partition"
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        order = self.graph.eindex
        object.__setattr__(self, "sameY", _normalize(self.sameY, order))
        object.__setattr__(self, "sameZ", _normalize(self.sameZ, order))

    def _rel(self, blocks) -> dict:
        rel = {e: {e} for e in self.graph.edge_ids}
        for b in blocks:
            for x in b:
                rel[x].update(b)
        return {e: frozenset(s) for e, s in rel.items()}

    @cached_property
    def rel_y(self) -> dict:
        return self._rel(self.sameY)

    @cached_property
    def rel_z(self) -> dict:
        return self._rel(self.sameZ)

    def related(self, side: str, e, f) -> bool:
        return f in (self.rel_y if side == "Y" else self.rel_z)[e]


def relation_from_pairs(graph: Graph, pairs, mode: str = "cliques") -> tuple:
    """Blocks for a symmetric relation given as pairs (two-element cliques)."""
    order = graph.eindex
    blocks = {tuple(sorted((a, b), key=order.__getitem__)) for a, b in pairs if a != b}
    return tuple(sorted(blocks, key=lambda b: [order[x] for x in b]))


# serialization

def pair_to_json(pp: PairPresentation) -> dict:
    obj = {"graph": graph_to_json(pp.graph),
           "sameY": [list(b) for b in pp.sameY],
           "sameZ": [list(b) for b in pp.sameZ]}
    if pp.mode != "partition":
        obj["relation"] = pp.mode
    return obj


def dump_pair(pp: PairPresentation) -> str:
    return json.dumps(pair_to_json(pp), indent=1, sort_keys=False) + "\n"


def _parse_blocks(obj, key, graph, mode):
    blocks = obj.get(key, [])
    if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
        raise PairFormatError(f"parse error: '{key}' must be a list of lists of edge ids")
    known = set(graph.edge_ids)
    seen = {}
    for i, b in enumerate(blocks):
        for x in b:
            x = str(x)
            if x not in known:
                raise PairFormatError(f"dangling edge id {x!r} in {key} block {i}")
            if mode == "partition" and x in seen and seen[x] != i:
                raise PairFormatError(
                    f"overlapping partition: edge {x!r} appears in {key} blocks {seen[x]} and {i}")
            seen[x] = i
    return [[str(x) for x in b] for b in blocks]


def load_pair(src) -> PairPresentation:
    """Parse a pair file from a path, a JSON string or an already-decoded dict."""
    if isinstance(src, dict):
        obj = src
    else:
        text = src
        if isinstance(src, Path) or (isinstance(src, str) and not src.lstrip().startswith("{")):
            try:
                text = Path(src).read_text()
            except FileNotFoundError:
                raise FileNotFoundError(f"file not found: {src}") from None
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PairFormatError(f"parse error at line {exc.lineno} column {exc.colno}: "
                                  f"{exc.msg}") from None
    if not isinstance(obj, dict) or "graph" not in obj:
        raise PairFormatError("parse error: expected an object with a 'graph' field")
    try:
        g = graph_from_json(obj["graph"])
    except ValueError as exc:
        raise PairFormatError(f"parse error: {exc}") from None
    rep = validate_graph(g)
    if not rep.ok:
        first = rep.violations[0]
        raise PairFormatError(f"invalid graph: {first['kind']}: {first['detail']}")
    mode = obj.get("relation", "partition")
    if mode not in MODES:
        raise PairFormatError(f"parse error: relation must be one of {MODES}")
    y = _parse_blocks(obj, "sameY", g, mode)
    z = _parse_blocks(obj, "sameZ", g, mode)
    return PairPresentation(g, y, z, mode)


# validation

def structural_report(pp: PairPresentation) -> Report:
    """Graph invariants, vertex compatibility and square filling."""
    g = pp.graph
    rep = validate_graph(g)
    if not rep.ok:
        return rep
    for side, rel in (("Y", pp.rel_y), ("Z", pp.rel_z)):
        via_i = {(g.src[e], g.src[f]) for e in rel for f in rel[e]}
        via_t = {(g.dst[e], g.dst[f]) for e in rel for f in rel[e]}
        diff = sorted(via_i ^ via_t, key=repr)
        if diff:
            rep.add("vertex compatibility",
                    f"same{side} induces different vertex relations through i and t", diff[0])
        if pp.mode == "partition":
            for (a, b), (c, d) in itertools.product(via_i, repeat=2):
                if b == c and a != d and (a, d) not in via_i:
                    rep.add("vertex compatibility",
                            f"same{side} induced vertex relation is not transitive", (a, b, d))
                    break
    # The bracket of two symbols must be unique for partitions. Window
    # relations only record pairs that were seen together, so in cliques mode
    # brackets are not checked and the delete-map checks decide.
    if pp.mode != "partition":
        return rep
    ry, rz = pp.rel_y, pp.rel_z
    for e in g.edge_ids:
        for f in ry[e]:
            for g_ in rz[e]:
                hs = rz[f] & ry[g_]
                if len(hs) != 1:
                    rep.add("square filling",
                            f"{len(hs)} edges close the square (expected exactly one)",
                            (e, f, g_))
                    return rep
    return rep


def validate_pair(pp: PairPresentation, max_lm: int = 2, max_delay: int = 6) -> Report:
    """Full admissibility report; see ``complex.check_delete_maps`` for (c) and (d)."""
    rep = structural_report(pp)
    if not rep.ok:
        return rep
    from .complex import check_delete_maps
    rep.extend(check_delete_maps(pp, max_lm=max_lm, max_delay=max_delay))
    return rep


# recoding

def recode(pp: PairPresentation, k: int, symbolwise: bool = False) -> PairPresentation:
    """k-block recoding.

    Generated presentations keep their two-track data and are re-read at the
    longer window. Otherwise blocks are related iff related symbol by symbol.
    """
    if k == 1:
        return pp
    tracks = pp.meta.get("tracks")
    if tracks is not None and not symbolwise:
        from .generators import window_pair
        meta = {x: v for x, v in pp.meta.items() if x not in ("tracks", "sync", "block")}
        out = window_pair(*tracks, k=pp.meta["block"] + k - 1, meta=meta)
        out.meta["recoded"] = k
        return out
    h, _ = higher_block(pp.graph, k)
    words = block_words(pp.graph, k)
    meta = {x: v for x, v in pp.meta.items() if x != "tracks"}
    ids = h.edge_ids

    def lift(rel):
        pairs = []
        by_word = {words[e]: e for e in ids}
        for e in ids:
            w = words[e]
            for cand in itertools.product(*(sorted(rel[x], key=pp.graph.eindex.__getitem__)
                                            for x in w)):
                f = by_word.get(cand)
                if f is not None and f != e:
                    pairs.append((e, f))
        return pairs

    if pp.mode == "partition":
        def blocks(bl):
            label = {}
            for i, b in enumerate(bl):
                for x in b:
                    label[x] = i
            groups = {}
            for e in ids:
                key = tuple(label.get(x, ("s", x)) for x in words[e])
                groups.setdefault(key, []).append(e)
            return [b for b in groups.values() if len(b) > 1]
        return PairPresentation(h, blocks(pp.sameY), blocks(pp.sameZ), "partition",
                                {**meta, "recoded": k})
    return PairPresentation(h, relation_from_pairs(h, lift(pp.rel_y)),
                            relation_from_pairs(h, lift(pp.rel_z)), "cliques",
                            {**meta, "recoded": k})


def regularize(pp: PairPresentation, cap: int = 4, **kw) -> PairPresentation:
    if validate_pair(pp, **kw).ok:
        return pp
    for k in range(2, cap + 1):
        cand = recode(pp, k)
        if validate_pair(cand, **kw).ok:
            return cand
    raise RegularizeError(f"cap exceeded: no {cap}-block recoding passes validation; "
                          "re-present the pair by hand")


# examples

@dataclass(frozen=True)
class ExampleFamily:
    tag: str
    params: dict = field(default_factory=dict, hash=False)


def gen_example(fam: ExampleFamily | str, **params) -> PairPresentation:
    from . import generators
    if isinstance(fam, str):
        fam = ExampleFamily(fam, params)
    p = dict(fam.params)
    if fam.tag == "sft":
        if "graph" not in p:
            raise ValueError("sft family needs a graph")
        return generators.sft_pair(p["graph"])
    if fam.tag == "solenoid":
        m = int(p.get("m", 2))
        if m < 2:
            raise ValueError("solenoid needs m >= 2")
        return generators.solenoid_pair(m, raw=bool(p.get("raw", False)))
    if fam.tag == "torus_fib":
        return generators.torus_pair(raw=bool(p.get("raw", False)))
    raise ValueError(f"unknown family {fam.tag!r}")
