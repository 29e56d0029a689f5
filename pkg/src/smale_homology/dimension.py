"""Krieger dimension groups as stationary inductive limits."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint

from ._linalg import (QQ, ZZ, DomainMatrix, column_basis, is_nilpotent, mpow, rank,
                      rows_of, snf, solve_left, zeros, zz)
from .graph import Graph, GraphHom, adjacency_matrix, check_resolving

__all__ = [
    "StationarySystem", "CanonicalForm", "InducedMap", "ResolvingError", "LagError",
    "dimension_group", "rationalize", "integral_core", "classify_limit", "induced_map",
    "positive_cone_member", "same_element", "cone_bound", "lift_covariant",
    "lift_contravariant",
]


class ResolvingError(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class LagError(RuntimeError):
    """No finite delay makes the induced map well defined."""


@dataclass(frozen=True)
class StationarySystem:
    """lim(Z^n -> Z^n -> ...) with every connecting map equal to ``matrix``.

    ``torsion`` holds invariant factors of a finite part carried alongside
    (homology stages); it is informational and does not enter ``matrix``.
    """

    rank: int
    matrix: DomainMatrix
    torsion: tuple = field(default=())

    def __post_init__(self):
        if self.matrix.shape != (self.rank, self.rank):
            raise ValueError("matrix must be square of size rank")


def same_element(sys: StationarySystem, a, b) -> bool:
    """Decide (v, k) == (w, l) in the limit."""
    (v, k), (w, l) = a, b
    top = max(k, l)
    M = sys.matrix
    x = mpow(M, top - k) * zz([[c] for c in v], (sys.rank, 1))
    y = mpow(M, top - l) * zz([[c] for c in w], (sys.rank, 1))
    return (mpow(M, sys.rank) * (x - y)).is_zero_matrix


@dataclass(frozen=True)
class CanonicalForm:
    tag: str  # Trivial | FreeRank | LocalizedFree | Mixed
    a: int = 0
    m: int = 1
    presentation: tuple | None = None  # (rank, rows) for Mixed

    def text(self) -> str:
        if self.tag == "Trivial":
            return "0"
        if self.tag == "FreeRank":
            return f"Z^{self.a}"
        if self.tag == "LocalizedFree":
            return f"Z[1/{self.m}]^{self.a}"
        n, rows = self.presentation[:2]
        s = f"lim(Z^{n}, {rows})".replace(" ", "")
        if len(self.presentation) > 2 and self.presentation[2]:
            s += "+" + "+".join(f"Z/{d}" for d in self.presentation[2])
        return s

    __str__ = text


def dimension_group(g: Graph, side: str = "s") -> StationarySystem:
    A = adjacency_matrix(g)
    if side == "s":
        return StationarySystem(len(g.vertices), A)
    if side == "u":
        return StationarySystem(len(g.vertices), A.transpose())
    raise ValueError("side must be 's' or 'u'")


def rationalize(sys: StationarySystem):
    """Eventual range of the matrix over Q and the automorphism it carries."""
    M = sys.matrix
    B = column_basis(mpow(M, sys.rank))
    r = B.shape[1]
    if r == 0:
        return 0, zeros(0, 0, QQ)
    return r, solve_left(B, M * B)


def integral_core(sys: StationarySystem) -> DomainMatrix:
    """Action on Z^n / ker M^n; the limit only sees this injective quotient."""
    n = sys.rank
    M = sys.matrix
    if n == 0:
        return zeros(0, 0)
    P = mpow(M, n)
    S, _, V = snf(P)
    r = sum(1 for i in range(min(S.shape)) if S[i, i].element != 0)
    if r == n:
        return M
    Vinv = V.convert_to(QQ).inv().convert_to(ZZ)
    C = Vinv * M * V
    return C.extract(list(range(r)), list(range(r)))


def classify_limit(sys: StationarySystem) -> CanonicalForm:
    if sys.rank == 0 or is_nilpotent(sys.matrix):
        core = zeros(0, 0)
    else:
        core = integral_core(sys)
    r = core.shape[0]
    tors = tuple(sys.torsion)
    if r == 0 and not tors:
        return CanonicalForm("Trivial")
    if tors:
        return CanonicalForm("Mixed", r, presentation=(r, rows_of(core), tors))
    det = int(core.det())
    if abs(det) == 1:
        return CanonicalForm("FreeRank", r)
    primes = sorted(factorint(abs(det)))
    if primes and all(_nilpotent_mod(core, p) for p in primes):
        m = 1
        for p in primes:
            m *= p
        return CanonicalForm("LocalizedFree", r, m)
    return CanonicalForm("Mixed", r, presentation=(r, rows_of(core)))


def _nilpotent_mod(M: DomainMatrix, p: int) -> bool:
    n = M.shape[0]
    P = mpow(M, n)
    return all(x % p == 0 for row in rows_of(P) for x in row)


@dataclass(frozen=True)
class InducedMap:
    matrix: DomainMatrix
    intertwines: bool
    variance: str


def induced_map(h: GraphHom, variance: str) -> InducedMap:
    """Zero-delay maps on vertex groups with an intertwining check."""
    dom, cod = h.domain, h.codomain
    if variance == "covariant":
        res = check_resolving(h, "left")
        if not res:
            raise ResolvingError("covariant map needs a left-resolving homomorphism", res.witness)
        rows = [[0] * len(dom) for _ in cod.vertices]
        for w in dom.vertices:
            rows[cod.vindex[h.vmap[w]]][dom.vindex[w]] = 1
        P = zz(rows, (len(cod), len(dom)))
        ok = adjacency_matrix(cod) * P == P * adjacency_matrix(dom)
    elif variance == "contravariant":
        res = check_resolving(h, "right")
        if not res:
            raise ResolvingError("contravariant map needs a right-resolving homomorphism",
                                 res.witness)
        rows = [[0] * len(cod) for _ in dom.vertices]
        for w in dom.vertices:
            rows[dom.vindex[w]][cod.vindex[h.vmap[w]]] = 1
        P = zz(rows, (len(dom), len(cod)))
        ok = adjacency_matrix(dom) * P == P * adjacency_matrix(cod)
    else:
        raise ValueError("variance must be covariant or contravariant")
    return InducedMap(P, bool(ok), variance)


def cone_bound(sys: StationarySystem) -> int:
    top = max((abs(x) for row in rows_of(sys.matrix) for x in row), default=0)
    return sys.rank * (top + 1) ** sys.rank


def positive_cone_member(sys: StationarySystem, elem) -> bool:
    vec, _stage = elem if isinstance(elem, tuple) else (elem, 0)
    rows = rows_of(sys.matrix)
    if any(x < 0 for row in rows for x in row):
        raise ValueError("positive cone needs a nonnegative matrix")
    v = [int(x) for x in vec]
    for _ in range(cone_bound(sys) + 1):
        if all(x >= 0 for x in v):
            return True
        v = [sum(rows[i][j] * v[j] for j in range(sys.rank)) for i in range(sys.rank)]
    return False


# Delayed induced maps. Both work on one vertex at a time and return a
# Counter over vertices; callers assemble matrices in whatever basis they use.

def lift_covariant(h: GraphHom, w, max_lag: int = 12):
    """Image of the past cylinder at ``w``, read at depth J.

    Returns ``(J, counter)`` where the counter is over codomain vertices and
    represents gamma^J applied to the image class.
    """
    dom, cod = h.domain, h.codomain
    start = frozenset([w])
    succ = {}
    stack = [start]
    while stack:
        R = stack.pop()
        if R in succ:
            continue
        v2 = h.vmap[next(iter(R))]
        nxt = []
        for e2 in cod.in_edges.get(v2, ()):
            S = frozenset(dom.src[e] for u in R for e in dom.in_edges.get(u, ())
                          if h.emap[e] == e2)
            nxt.append((cod.src[e2], S))
            if S and S not in succ:
                stack.append(S)
        succ[R] = nxt
    mortal = set()
    changed = True
    while changed:
        changed = False
        for R, nxt in succ.items():
            if R not in mortal and any(not S or S in mortal for _, S in nxt):
                mortal.add(R)
                changed = True
    layer = Counter({(h.vmap[w], start): 1})
    for J in range(max_lag + 1):
        if all(R not in mortal for _, R in layer):
            out = Counter()
            for (v2, _), c in layer.items():
                out[v2] += c
            return J, out
        nl = Counter()
        for (_, R), c in layer.items():
            for v2, S in succ[R]:
                if S:
                    nl[(v2, S)] += c
        layer = nl
    raise LagError(f"no lag up to {max_lag} for covariant lift at {w!r}")


def _canonical_future(g: Graph, v):
    order = g.eindex
    path, pos = [], {}
    while v not in pos:
        pos[v] = len(path)
        e = min(g.out_edges[v], key=order.__getitem__)
        path.append(e)
        v = g.dst[e]
    i = pos[v]
    return path[:i], path[i:]


def lift_contravariant(h: GraphHom, v2, fibre=None):
    """Preimage class of codomain vertex ``v2``: each domain vertex over it,
    weighted by how many infinite lifts of a fixed future it carries."""
    dom, cod = h.domain, h.codomain
    pre, cyc = _canonical_future(cod, v2)
    seq = pre + cyc
    n, p = len(seq), len(pre)
    step = lambda i: i + 1 if i + 1 < n else p
    if fibre is None:
        fibre = [w for w in dom.vertices if h.vmap[w] == v2]
    succ = {}
    stack = [(w, 0) for w in fibre]
    while stack:
        s = stack.pop()
        if s in succ:
            continue
        u, i = s
        succ[s] = [(dom.dst[e], step(i)) for e in dom.out_edges.get(u, ())
                   if h.emap[e] == seq[i]]
        stack.extend(t for t in succ[s] if t not in succ)
    alive = set(succ)
    changed = True
    while changed:
        changed = False
        for s in list(alive):
            if not any(t in alive for t in succ[s]):
                alive.discard(s)
                changed = True
    size = len(succ)
    res = Counter()
    for w in fibre:
        if (w, 0) not in alive:
            continue
        cnt = Counter({(w, 0): 1})
        totals = []
        for k in range(2 * size + 2):
            nc = Counter()
            for s, c in cnt.items():
                for t in succ[s]:
                    if t in alive:
                        nc[t] += c
            cnt = nc
            if k in (size, 2 * size + 1):
                totals.append(sum(cnt.values()))
        if totals[0] != totals[1]:
            raise LagError(f"infinitely many lifts over {v2!r}; map is not finite-to-one")
        res[w] = totals[1]
    return res
