"""Finite directed graphs presenting shifts of finite type."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from ._linalg import DomainMatrix, mpow, trace, zz

__all__ = [
    "Graph", "GraphHom", "Report", "validate_graph", "prune", "adjacency_matrix",
    "higher_block", "block_words", "count_periodic", "closed_paths", "check_resolving",
    "resolving_delay",
    "is_irreducible", "graph_from_json", "graph_to_json", "compose",
]


@dataclass(frozen=True)
class Graph:
    """Vertices plus an ordered edge list of ``(id, src, dst)`` triples.

    Ids can be any hashable; the JSON format restricts them to strings.
    Edge order fixes basis order everywhere downstream.
    """

    vertices: tuple
    edges: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))

    @cached_property
    def vindex(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def eindex(self) -> dict:
        return {e[0]: i for i, e in enumerate(self.edges)}

    @cached_property
    def src(self) -> dict:
        return {e: s for e, s, _ in self.edges}

    @cached_property
    def dst(self) -> dict:
        return {e: t for e, _, t in self.edges}

    @cached_property
    def out_edges(self) -> dict:
        out = defaultdict(list)
        for e, s, _ in self.edges:
            out[s].append(e)
        return out

    @cached_property
    def in_edges(self) -> dict:
        into = defaultdict(list)
        for e, _, t in self.edges:
            into[t].append(e)
        return into

    @property
    def edge_ids(self) -> list:
        return [e for e, _, _ in self.edges]

    def __len__(self):
        return len(self.vertices)


@dataclass(frozen=True)
class GraphHom:
    domain: Graph
    codomain: Graph
    vmap: Mapping
    emap: Mapping

    def violations(self) -> list[str]:
        out = []
        for e, s, t in self.domain.edges:
            f = self.emap.get(e)
            if f not in self.codomain.src:
                out.append(f"edge {e!r} maps to unknown edge {f!r}")
                continue
            if self.vmap.get(s) != self.codomain.src[f]:
                out.append(f"source mismatch at edge {e!r}")
            if self.vmap.get(t) != self.codomain.dst[f]:
                out.append(f"target mismatch at edge {e!r}")
        return out


def compose(g: GraphHom, h: GraphHom) -> GraphHom:
    """``g`` after ``h``."""
    return GraphHom(h.domain, g.codomain,
                    {v: g.vmap[w] for v, w in h.vmap.items()},
                    {e: g.emap[f] for e, f in h.emap.items()})


@dataclass
class Report:
    """Validation outcome. Violations are data; ``ok`` iff there are none."""

    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, kind: str, detail: str, witness=None):
        self.violations.append({"kind": kind, "detail": detail, "witness": witness})

    def extend(self, other: "Report", prefix: str = ""):
        for v in other.violations:
            self.violations.append({**v, "kind": prefix + v["kind"]})
        self.notes.extend(other.notes)

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": self.violations, "notes": self.notes}


def validate_graph(g: Graph, prune_graph: bool = False) -> Report | tuple[Report, Graph]:
    """Check graph invariants. With ``prune_graph`` also return the essential part."""
    rep = Report()
    if len(set(g.vertices)) != len(g.vertices):
        rep.add("duplicate vertex", "vertex ids must be unique",
                sorted({v for v in g.vertices if list(g.vertices).count(v) > 1}, key=repr))
    ids = [e for e, _, _ in g.edges]
    if len(set(ids)) != len(ids):
        rep.add("duplicate edge", "edge ids must be unique",
                sorted({e for e in ids if ids.count(e) > 1}, key=repr))
    if not g.edges:
        rep.add("empty graph", "a presentation needs at least one edge")
    vs = set(g.vertices)
    for e, s, t in g.edges:
        for end in (s, t):
            if end not in vs:
                rep.add("dangling endpoint", f"edge {e!r} references missing vertex {end!r}", e)
    if prune_graph:
        return rep, prune(g)
    for v in g.vertices:
        if not g.in_edges.get(v):
            rep.add("no incoming edge", f"vertex {v!r} has no incoming edge", v)
        if not g.out_edges.get(v):
            rep.add("no outgoing edge", f"vertex {v!r} has no outgoing edge", v)
    return rep


def prune(g: Graph) -> Graph:
    """Repeatedly drop sources, sinks and their edges."""
    edges = list(g.edges)
    verts = set(g.vertices)
    while True:
        has_in = {t for _, _, t in edges}
        has_out = {s for _, s, _ in edges}
        keep = verts & has_in & has_out
        kept = [e for e in edges if e[1] in keep and e[2] in keep]
        if keep == verts and len(kept) == len(edges):
            break
        verts, edges = keep, kept
    return Graph([v for v in g.vertices if v in verts], edges)


def adjacency_matrix(g: Graph) -> DomainMatrix:
    n = len(g.vertices)
    rows = [[0] * n for _ in range(n)]
    for _, s, t in g.edges:
        rows[g.vindex[s]][g.vindex[t]] += 1
    return zz(rows, (n, n))


def _separator(ids: Iterable) -> str | None:
    ids = list(ids)
    if not all(isinstance(x, str) for x in ids):
        return None
    for sep in (".", "|", "/", ":", "+", "~"):
        if not any(sep in x for x in ids):
            return sep
    return None


def higher_block(g: Graph, k: int) -> tuple[Graph, GraphHom]:
    """k-block recoding; the returned map projects onto the first symbol."""
    if k < 1:
        raise ValueError("block length must be at least 1")
    if k == 1:
        return g, GraphHom(g, g, {v: v for v in g.vertices}, {e: e for e in g.edge_ids})
    sep = _separator(g.edge_ids)
    name = (lambda p: sep.join(p)) if sep else tuple
    paths = [[e] for e in g.edge_ids]
    for _ in range(k - 2):
        paths = [p + [f] for p in paths for f in g.out_edges[g.dst[p[-1]]]]
    vname = {tuple(p): name(p) for p in paths}
    edges, emap = [], {}
    for p in paths:
        for f in g.out_edges[g.dst[p[-1]]]:
            q = p + [f]
            eid = name(q)
            edges.append((eid, vname[tuple(p)], vname[tuple(q[1:])]))
            emap[eid] = q[0]
    h = Graph([vname[tuple(p)] for p in paths], edges)
    vmap = {vname[tuple(p)]: g.src[p[0]] for p in paths}
    return h, GraphHom(h, g, vmap, emap)


def block_words(g: Graph, k: int) -> dict:
    """Map each edge id of ``higher_block(g, k)`` to its word of base edges."""
    h, _ = higher_block(g, k)
    if k == 1:
        return {e: (e,) for e in g.edge_ids}
    paths = [[e] for e in g.edge_ids]
    for _ in range(k - 1):
        paths = [p + [f] for p in paths for f in g.out_edges[g.dst[p[-1]]]]
    return {eid: tuple(p) for eid, p in zip(h.edge_ids, paths)}


def closed_paths(g: Graph, p: int) -> int:
    """Count closed edge paths of length p by direct enumeration."""
    total = 0
    for v in g.vertices:
        layer = {v: 1}
        for _ in range(p):
            nxt = defaultdict(int)
            for u, c in layer.items():
                for e in g.out_edges.get(u, ()):
                    nxt[g.dst[e]] += c
            layer = nxt
        total += layer.get(v, 0)
    return total


def count_periodic(g: Graph, p: int) -> int:
    if p < 1:
        raise ValueError("period must be positive")
    return int(trace(mpow(adjacency_matrix(g), p)))


@dataclass
class Resolving:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def _steps(h: GraphHom, side: str):
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    g = h.domain
    return (g.in_edges, g.src) if side == "left" else (g.out_edges, g.dst)


def resolving_delay(h: GraphHom, side: str, limit: int | None = None):
    """Least delay making ``h`` resolving on ``side``, with a witness split.

    Two paths that split at a vertex and carry the same image word walk
    together in the pair graph; the needed delay is one more than the
    longest such walk. Returns ``(None, witness)`` when no delay up to
    ``limit`` works (a cycle in the pair graph means none ever does).
    """
    step, far = _steps(h, side)
    emap = h.emap

    def succ(pair):
        u1, u2 = pair
        by_img = defaultdict(list)
        for f2 in step.get(u2, ()):
            by_img[emap[f2]].append(far[f2])
        return {(far[f1], t) for f1 in step.get(u1, ()) for t in by_img.get(emap[f1], ())}

    depth = {}  # longest walk from a pair; None while on the DFS stack
    cap = float("inf") if limit is None else limit

    def longest(root):
        stack = [(root, iter(succ(root)))]
        depth[root] = None
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                kids = [depth[c] for c in succ(node)]
                depth[node] = 1 + max(kids) if kids else 0
                continue
            if nxt not in depth:
                depth[nxt] = None
                stack.append((nxt, iter(succ(nxt))))
            elif depth[nxt] is None:
                return None  # cycle
            if len(stack) > cap + 1:
                return None
        return depth[root]

    worst, witness = 0, None
    for w in h.domain.vertices:
        by_img = defaultdict(list)
        for e in step.get(w, ()):
            by_img[emap[e]].append(e)
        for es in by_img.values():
            for i, e1 in enumerate(es):
                for e2 in es[i + 1:]:
                    pair = (far[e1], far[e2])
                    d = depth.get(pair, "new")
                    if d == "new" or d is None:
                        d = longest(pair)
                    if d is None or d + 1 > cap:
                        return None, (w, e1, e2)
                    if d + 1 > worst:
                        worst, witness = d + 1, (w, e1, e2)
    return worst, witness


def check_resolving(h: GraphHom, side: str, delay: int = 0) -> Resolving:
    """Unique-lift test. ``left`` fixes the terminal vertex, ``right`` the initial one.

    With ``delay`` D, two domain paths of length D+1 sharing the fixed
    endpoint and the image must agree on the edge at that endpoint.
    The witness is ``(vertex, codomain edge)`` for D = 0, else the two edges.
    """
    step, _ = _steps(h, side)
    if delay == 0:
        for w in h.domain.vertices:
            seen = {}
            for e in step.get(w, ()):
                img = h.emap[e]
                if img in seen:
                    return Resolving(False, (w, img))
                seen[img] = e
        return Resolving(True)
    d, witness = resolving_delay(h, side, delay)
    if d is None:
        return Resolving(False, witness)
    return Resolving(True)


def is_irreducible(g: Graph) -> bool:
    if not g.vertices:
        return False
    def reach(start, nbr):
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for x in nbr(u):
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
        return seen
    v0 = g.vertices[0]
    fw = reach(v0, lambda u: [g.dst[e] for e in g.out_edges.get(u, ())])
    bw = reach(v0, lambda u: [g.src[e] for e in g.in_edges.get(u, ())])
    return len(fw) == len(bw) == len(g.vertices)


def graph_to_json(g: Graph) -> dict:
    return {"vertices": list(g.vertices),
            "edges": [{"id": e, "src": s, "dst": t} for e, s, t in g.edges]}


def graph_from_json(obj) -> Graph:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise ValueError("graph must be an object with 'vertices' and 'edges'")
    edges = []
    for i, e in enumerate(obj["edges"]):
        try:
            edges.append((str(e["id"]), str(e["src"]), str(e["dst"])))
        except (KeyError, TypeError):
            raise ValueError(f"edge #{i} needs 'id', 'src' and 'dst'") from None
    return Graph([str(v) for v in obj["vertices"]], edges)
