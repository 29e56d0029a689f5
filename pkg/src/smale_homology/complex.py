"""The doubly symmetrized double complex and its stationary shift.

Arrays are stored as tuples of rows of base indices (vertex indices for
vertex arrays, edge indices for edge arrays); the fixed total order on rows
and columns is the order of those integer tuples.

Delete maps need not be resolving on the nose, only after a delay. The
induced maps are then defined on the limit as gamma^-J composed with a
stage map. To keep one stage for the whole complex every block is padded to
``gamma^(T - J)`` with T exceeding every lag by the largest term rank; the
extra power also absorbs nilpotent discrepancies, so chain identities that
hold in the limit hold exactly on the stored integer matrices. Homology is
unchanged because gamma is an automorphism of each limit group.
"""
from __future__ import annotations

import itertools
import os
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

from ._linalg import DomainMatrix, block_diag, mpow, rows_of, zeros, zz
from .dimension import LagError, lift_contravariant, lift_covariant
from .graph import Graph, GraphHom, Report, prune, resolving_delay
from .pair import PairPresentation, regularize

__all__ = [
    "FiberedGraph", "SymmetrizedBasis", "StationaryComplex", "ComplexError", "CapError",
    "fibered_graph", "delete_hom", "reduce", "symmetrized_basis", "boundary_matrix",
    "build_complex", "check_delete_maps", "default_cap", "complex_report",
]


FIBER_LIMIT = 20000


class ComplexError(RuntimeError):
    pass


class CapError(ComplexError):
    pass


class FiberSizeError(ComplexError):
    pass


def default_cap() -> int:
    try:
        return int(os.environ.get("SMALE_MAX_LM", "12"))
    except ValueError:
        return 12


@dataclass(frozen=True)
class FiberedGraph:
    L: int
    M: int
    base: PairPresentation
    graph: Graph

    def render(self, arr, kind: str = "vertex"):
        names = self.base.graph.vertices if kind == "vertex" else self.base.graph.edge_ids
        return [[names[x] for x in row] for row in arr]


@lru_cache(maxsize=256)
def fibered_graph(pp: PairPresentation, L: int, M: int) -> FiberedGraph:
    """All (L+1)x(M+1) edge arrays with sameY rows and sameZ columns, pruned."""
    g = pp.graph
    ix = g.eindex
    ry = [frozenset(ix[f] for f in pp.rel_y[e]) for e in g.edge_ids]
    rz = [frozenset(ix[f] for f in pp.rel_z[e]) for e in g.edge_ids]
    src = [g.vindex[s] for _, s, _ in g.edges]
    dst = [g.vindex[t] for _, _, t in g.edges]
    every = frozenset(range(len(g.edges)))
    w = M + 1
    n = (L + 1) * w
    arrays = []
    cur = []

    def bt():
        if len(cur) == n:
            arrays.append(tuple(tuple(cur[r * w:(r + 1) * w]) for r in range(L + 1)))
            if len(arrays) > FIBER_LIMIT:
                raise FiberSizeError(f"G({L},{M}) has more than {FIBER_LIMIT} edges; "
                                     "presentation is likely not finite-to-one")
            return
        l, m = divmod(len(cur), w)
        cands = every
        for mm in range(m):
            cands = cands & ry[cur[l * w + mm]]
        for ll in range(l):
            cands = cands & rz[cur[ll * w + m]]
        for c in sorted(cands):
            cur.append(c)
            bt()
            cur.pop()

    bt()
    edges = []
    for a in arrays:
        s = tuple(tuple(src[x] for x in row) for row in a)
        t = tuple(tuple(dst[x] for x in row) for row in a)
        edges.append((a, s, t))
    verts = sorted({e[1] for e in edges} | {e[2] for e in edges})
    return FiberedGraph(L, M, pp, prune(Graph(verts, edges)))


def _sign(perm) -> int:
    s, p = 1, list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


@lru_cache(maxsize=None)
def reduce(arr):
    """Canonical representative and sign: ``arr = sign * rep`` in the quotient.

    The representative is the lexicographically least array in the orbit of
    row and column permutations. Sign 0 marks a repeated row, a repeated
    column or a stabilizer containing an odd permutation.
    """
    L = len(arr)
    M = len(arr[0])
    if len(set(arr)) < L or len(set(zip(*arr))) < M:
        return None, 0
    best, signs = None, set()
    for cp in itertools.permutations(range(M)):
        a = [tuple(r[c] for c in cp) for r in arr]
        order = sorted(range(L), key=a.__getitem__)
        rep = tuple(a[i] for i in order)
        s = _sign(cp) * _sign(order)
        if best is None or rep < best:
            best, signs = rep, {s}
        elif rep == best:
            signs.add(s)
    if len(signs) > 1:
        return None, 0
    return best, signs.pop()


@dataclass(frozen=True)
class SymmetrizedBasis:
    reps: tuple
    index: dict = field(hash=False, compare=False)

    def __len__(self):
        return len(self.reps)

    def vector(self, counter) -> list[int]:
        v = [0] * len(self.reps)
        for arr, c in counter.items():
            rep, s = reduce(arr)
            if s:
                v[self.index[rep]] += s * c
        return v


def symmetrized_basis(fg: FiberedGraph) -> SymmetrizedBasis:
    reps = sorted({r for r, s in map(reduce, fg.graph.vertices) if s})
    return SymmetrizedBasis(tuple(reps), {r: i for i, r in enumerate(reps)})


def _drop_row(arr, l):
    return arr[:l] + arr[l + 1:]


def _drop_col(arr, m):
    return tuple(row[:m] + row[m + 1:] for row in arr)


def delete_hom(fg: FiberedGraph, axis: str, index: int) -> GraphHom:
    if axis == "row":
        if fg.L < 1 or not 0 <= index <= fg.L:
            raise ValueError(f"row index {index} out of range for L={fg.L}")
        tgt = fibered_graph(fg.base, fg.L - 1, fg.M)
        f = lambda a: _drop_row(a, index)
    elif axis == "column":
        if fg.M < 1 or not 0 <= index <= fg.M:
            raise ValueError(f"column index {index} out of range for M={fg.M}")
        tgt = fibered_graph(fg.base, fg.L, fg.M - 1)
        f = lambda a: _drop_col(a, index)
    else:
        raise ValueError("axis must be 'row' or 'column'")
    g = fg.graph
    return GraphHom(g, tgt.graph, {v: f(v) for v in g.vertices}, {e: f(e) for e in g.edge_ids})


def _gamma(fg: FiberedGraph, basis: SymmetrizedBasis) -> DomainMatrix:
    g = fg.graph
    n = len(basis)
    cols = [basis.vector(Counter(g.src[e] for e in g.in_edges.get(r, ()))) for r in basis.reps]
    return zz([[cols[j][i] for j in range(n)] for i in range(n)], (n, n))


@dataclass
class Term:
    L: int
    M: int
    fibered: FiberedGraph
    basis: SymmetrizedBasis
    gamma: DomainMatrix

    @property
    def N(self) -> int:
        return self.L - self.M

    def __len__(self):
        return len(self.basis)


@dataclass
class StationaryComplex:
    pp: PairPresentation
    terms: dict  # (L, M) -> Term, nonzero ones only
    blocks: dict  # ((L, M), (L2, M2)) -> padded integer block
    lags: dict
    pad: int
    bound: dict
    checks: dict = field(default_factory=dict)

    def degrees(self) -> list[int]:
        return sorted({t.N for t in self.terms.values()})

    def keys(self, N: int) -> list:
        return sorted(k for k, t in self.terms.items() if t.N == N)

    def rank(self, N: int) -> int:
        return sum(len(self.terms[k]) for k in self.keys(N))

    def shift(self, N: int) -> DomainMatrix:
        return block_diag(self.terms[k].gamma for k in self.keys(N))

    def boundary(self, N: int) -> DomainMatrix:
        """Matrix of the boundary C_N -> C_(N-1) in the block ordering of ``keys``."""
        src, tgt = self.keys(N), self.keys(N - 1)
        rows = self.rank(N - 1)
        cols = self.rank(N)
        dok = {}
        co = 0
        for a in src:
            ro = 0
            for b in tgt:
                blk = self.blocks.get((a, b))
                if blk is not None:
                    for (i, j), v in blk.to_dok().items():
                        dok[(ro + i, co + j)] = v
                ro += len(self.terms[b])
            co += len(self.terms[a])
        return DomainMatrix.from_dok(dok, (rows, cols), zeros(0, 0).domain)


class _Builder:
    def __init__(self, pp: PairPresentation, max_lag: int = 12):
        self.pp = pp
        self.max_lag = max_lag
        self.terms = {}

    def term(self, L, M) -> Term | None:
        key = (L, M)
        if key not in self.terms:
            fg = fibered_graph(self.pp, L, M)
            basis = symmetrized_basis(fg)
            self.terms[key] = Term(L, M, fg, basis, _gamma(fg, basis)) if len(basis) else None
        return self.terms[key]

    def raw_blocks(self, keys):
        """Unpadded block columns as (lag, vector) pairs, per summand."""
        raw = {}
        for (L, M) in keys:
            t = self.terms.get((L, M))
            if t is None:
                continue
            if L >= 1 and self.terms.get((L - 1, M)) is not None:
                tgt = self.terms[(L - 1, M)]
                parts = []
                for l in range(L + 1):
                    h = delete_hom(t.fibered, "row", l)
                    cols = []
                    for r in t.basis.reps:
                        J, cnt = lift_covariant(h, r, self.max_lag)
                        cols.append((J, tgt.basis.vector(cnt)))
                    parts.append(((-1) ** l, cols))
                raw[((L, M), (L - 1, M))] = parts
            if (L, M + 1) in keys and self.terms.get((L, M + 1)) is not None:
                tgt = self.terms[(L, M + 1)]
                parts = []
                for m in range(M + 2):
                    h = delete_hom(tgt.fibered, "column", m)
                    fibres = defaultdict(list)
                    for w in h.domain.vertices:
                        fibres[h.vmap[w]].append(w)
                    cols = []
                    for r in t.basis.reps:
                        cnt = lift_contravariant(h, r, fibres.get(r, []))
                        cols.append((0, tgt.basis.vector(cnt)))
                    parts.append(((-1) ** (m + L), cols))
                raw[((L, M), (L, M + 1))] = parts
        return raw

    def assemble(self, keys):
        raw = self.raw_blocks(keys)
        lags = {k: max((J for _, cols in parts for J, _ in cols), default=0)
                for k, parts in raw.items()}
        top = max(lags.values(), default=0)
        dim = max((len(t) for k, t in self.terms.items() if t is not None and k in keys),
                  default=0)
        pad = top + dim
        blocks = {}
        for (s, t), parts in raw.items():
            tgt = self.terms[t]
            powers = {}
            n_t, n_s = len(tgt), len(self.terms[s])
            acc = zeros(n_t, n_s)
            for sign, cols in parts:
                for j, (J, vec) in enumerate(cols):
                    if J not in powers:
                        powers[J] = mpow(tgt.gamma, pad - J)
                    col = powers[J] * zz([[x] for x in vec], (n_t, 1))
                    if sign < 0:
                        col = -col
                    acc = acc + _place(col, j, n_s)
            blocks[(s, t)] = acc
        return blocks, lags, pad


def _place(col: DomainMatrix, j: int, n: int) -> DomainMatrix:
    dok = {(i, j): v for (i, _), v in col.to_dok().items()}
    return DomainMatrix.from_dok(dok, (col.shape[0], n), col.domain)


def _check(terms, blocks) -> dict:
    commutes = all(terms[t].gamma * B == B * terms[s].gamma for (s, t), B in blocks.items())
    comp = {}
    for (s, t), B1 in blocks.items():
        for (t2, u), B2 in blocks.items():
            if t2 == t:
                c = B2 * B1
                comp[(s, u)] = c if (s, u) not in comp else comp[(s, u)] + c
    d2 = all(c.is_zero_matrix for c in comp.values())
    return {"d2_zero": bool(d2), "commutes": bool(commutes)}


def build_complex(pp: PairPresentation, cap: int | None = None, verify: bool = True,
                  max_lag: int = 12) -> StationaryComplex:
    """Grow the (L, M) box until a full row and column of zero terms appears."""
    cap = default_cap() if cap is None else cap
    pp = regularize(pp)
    b = _Builder(pp, max_lag)
    n = 0
    b.term(0, 0)
    while True:
        n += 1
        if n > cap:
            raise CapError(f"cap exceeded: nonzero terms beyond L, M = {cap}; "
                           "presentation may not be finite-to-one")
        for L in range(n + 1):
            b.term(L, n)
            b.term(n, L)
        if all(b.terms[(n, m)] is None and b.terms[(m, n)] is None for m in range(n + 1)):
            break
    keys = {k for k, t in b.terms.items() if t is not None}
    try:
        blocks, lags, pad = b.assemble(keys)
    except LagError as exc:
        raise ComplexError(f"delete map has no finite lag: {exc}") from None
    terms = {k: b.terms[k] for k in sorted(keys)}
    cx = StationaryComplex(pp, terms, blocks, lags, pad,
                           {"N0": n - 1, "rows": max((k[0] for k in keys), default=0),
                            "cols": max((k[1] for k in keys), default=0)})
    cx.checks = _check(terms, blocks)
    if verify and not all(cx.checks.values()):
        raise ComplexError(f"complex invariants fail: {cx.checks}")
    return cx


def boundary_matrix(pp: PairPresentation, N: int, cx: StationaryComplex | None = None):
    """Blocks of the boundary out of degree N, keyed by (source, target)."""
    cx = cx or build_complex(pp)
    return {k: v for k, v in cx.blocks.items() if k[0][0] - k[0][1] == N}


def check_delete_maps(pp: PairPresentation, max_lm: int = 2, max_delay: int = 6) -> Report:
    """Delete maps on small fibered graphs: bounded-delay resolving plus chain checks."""
    rep = Report()
    delays = {}
    boxes = sorted(((L, M) for L in range(max_lm + 1) for M in range(max_lm + 1)),
                   key=lambda k: (k[0] + k[1], k))
    for L, M in boxes:
        try:
            fg = fibered_graph(pp, L, M)
        except FiberSizeError as exc:
            rep.add("delete map", str(exc))
            return rep
        if not fg.graph.edges:
            continue
        for axis, count, side in (("row", L, "left"), ("column", M, "right")):
            for i in range(count + 1 if count else 0):
                d, witness = resolving_delay(delete_hom(fg, axis, i), side, max_delay)
                if d is None:
                    rep.add("delete map", f"{axis} deletion {i} on G({L},{M}) is not "
                            f"{side}-resolving within delay {max_delay}", witness)
                    return rep
                delays[f"{axis}{i}@{L},{M}"] = d
    rep.notes.append({"max_delay": max(delays.values(), default=0)})
    if not rep.ok:
        return rep
    b = _Builder(pp)
    for L in range(max_lm + 1):
        for M in range(max_lm + 1):
            b.term(L, M)
    keys = {k for k, t in b.terms.items() if t is not None}
    try:
        blocks, lags, _ = b.assemble(keys)
    except LagError as exc:
        rep.add("induced map", str(exc))
        return rep
    checks = _check(b.terms, blocks)
    if not checks["commutes"]:
        rep.add("intertwining", "an induced delete map does not commute with the shift")
    if not checks["d2_zero"]:
        rep.add("intertwining", "boundary squares to a nonzero map")
    rep.notes.append({"max_lag": max(lags.values(), default=0)})
    return rep


def complex_report(cx: StationaryComplex) -> dict:
    """Deterministic JSON-ready dump of every term and boundary block."""
    terms = []
    for (L, M), t in cx.terms.items():
        terms.append({"L": L, "M": M, "N": L - M, "size": len(t),
                      "basis": [t.fibered.render(r) for r in t.basis.reps],
                      "gamma": rows_of(t.gamma)})
    blocks = [{"from": list(s), "to": list(t), "lag": cx.lags.get((s, t), 0),
               "matrix": rows_of(B)} for (s, t), B in sorted(cx.blocks.items())]
    return {"terms": terms, "boundaries": blocks, "pad": cx.pad, "bound": cx.bound,
            "checks": cx.checks}
