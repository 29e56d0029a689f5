"""Built-in presentations: SFTs, m-solenoids and the Fibonacci torus map.

Solenoid and torus share one pipeline. A two-track graph on states
``(carry, v, w)`` follows two base paths side by side; its edge labels are
pairs of base edges. Restricting the tracks to states where the two points
share Y (resp. Z) data gives two sofic shifts of pairs. Once the window is
longer than both synchronizing lengths, the set of pairs of k-words seen in
those shifts is the sameY (resp. sameZ) relation on the k-block graph.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import total_ordering

from .graph import Graph, block_words, higher_block
from .pair import PairPresentation, relation_from_pairs

__all__ = [
    "sft_pair", "solenoid_pair", "torus_pair", "carry_pair", "Zphi",
    "TORUS_RECTANGLES", "torus_transitions", "torus_base", "window_pair",
    "int_carry_tracks", "torus_tracks", "sync_length",
]


def sft_pair(g: Graph) -> PairPresentation:
    return PairPresentation(g, (), (), "partition", {"family": "sft"})


# two-track graphs: lists of (state, (e, f), state)

def _prune(tracks):
    while True:
        srcs = {a for a, _, _ in tracks}
        tgts = {b for _, _, b in tracks}
        kept = [x for x in tracks if x[0] in tgts and x[2] in srcs]
        if len(kept) == len(tracks):
            return tracks
        tracks = kept


def _reach(tracks, start, forward=True):
    adj = defaultdict(list)
    for a, _, b in tracks:
        if forward:
            adj[a].append(b)
        else:
            adj[b].append(a)
    seen, stack = set(start), list(start)
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _paths(tracks, k):
    out = defaultdict(list)
    for x in tracks:
        out[x[0]].append(x)
    ps = [[x] for x in tracks]
    for _ in range(k - 1):
        ps = [p + [y] for p in ps for y in out[p[-1][2]]]
    return ps


def sync_length(tracks, limit: int = 24) -> int:
    """Least j such that every label word of length j fixes the initial state."""
    if not tracks:
        return 1
    for j in range(1, limit + 1):
        first = {}
        clash = False
        for p in _paths(tracks, j):
            word = tuple(x[1] for x in p)
            if first.setdefault(word, p[0][0]) != p[0][0]:
                clash = True
                break
        if not clash:
            return j
    raise RuntimeError("two-track graph does not synchronize")


def window_pair(base: Graph, side_y, side_z, k: int | None = None, raw: bool = False,
                meta=None) -> PairPresentation:
    sy, sz = sync_length(side_y), sync_length(side_z)
    if k is None:
        k = max(sy, sz) if raw else max(sy, sz) + 1
    h, _ = higher_block(base, k)
    words = block_words(base, k)
    ident = {w: e for e, w in words.items()}

    def pairs(tracks):
        out = set()
        for p in _paths(tracks, k):
            a = ident.get(tuple(x[1][0] for x in p))
            b = ident.get(tuple(x[1][1] for x in p))
            if a is not None and b is not None and a != b:
                out.add((a, b))
        return sorted(out)

    info = {"sync": [sy, sz], "block": k, **(meta or {}),
            "tracks": (base, side_y, side_z)}
    return PairPresentation(h, relation_from_pairs(h, pairs(side_y)),
                            relation_from_pairs(h, pairs(side_z)), "cliques", info)


# integer carries: solenoids and their relatives

def int_carry_tracks(base: Graph, digits: dict, m: int):
    """Sides of the carry graph xi -> m (xi - (d_e - d_f)).

    sameZ: reachable from the diagonal; sameY: co-reachable to it.
    """
    ds = [digits[e] for e in base.edge_ids]
    spread = max(ds) - min(ds)
    bound = spread * m // (m - 1) + 1
    states = range(-bound, bound + 1)
    tracks = []
    for xi in states:
        for e, s, t in base.edges:
            for f, s2, t2 in base.edges:
                nx = m * (xi - (digits[e] - digits[f]))
                if abs(nx) <= bound:
                    tracks.append(((xi, s, s2), (e, f), (nx, t, t2)))
    tracks = _prune(tracks)
    diag = {a for a, _, _ in tracks if a[0] == 0 and a[1] == a[2]}
    fw = _reach(tracks, diag, True)
    bw = _reach(tracks, diag, False)
    side_y = _prune([x for x in tracks if x[2] in bw])
    side_z = _prune([x for x in tracks if x[0] in fw])
    return side_y, side_z


def carry_pair(base: Graph, digits: dict, m: int, k: int | None = None,
               raw: bool = False) -> PairPresentation:
    """Pair presentation for the digit system ``sum d_n m^-n`` over ``base``."""
    if m < 2:
        raise ValueError("multiplier must be at least 2")
    sy, sz = int_carry_tracks(base, digits, m)
    return window_pair(base, sy, sz, k, raw, {"family": "carry", "m": m})


def solenoid_pair(m: int, raw: bool = False) -> PairPresentation:
    base = Graph(["v"], [(str(i), "v", "v") for i in range(m)])
    pp = carry_pair(base, {str(i): i for i in range(m)}, m, raw=raw)
    pp.meta.update({"family": "solenoid"})
    return pp


# the golden ring Z[phi], exact

@total_ordering
@dataclass(frozen=True)
class Zphi:
    """a + b*phi with phi the golden ratio; compares as a real number."""

    a: int
    b: int = 0

    def __add__(self, o):
        o = _z(o)
        return Zphi(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Zphi(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-_z(o))

    def __rsub__(self, o):
        return _z(o) - self

    def __mul__(self, o):
        o = _z(o)
        return Zphi(self.a * o.a + self.b * o.b, self.a * o.b + self.b * o.a + self.b * o.b)

    __rmul__ = __mul__

    def conj(self) -> "Zphi":
        return Zphi(self.a + self.b, -self.b)

    def sign(self) -> int:
        # a + b phi = ((2a + b) + b sqrt5) / 2
        p, q = 2 * self.a + self.b, self.b
        if p >= 0 and q >= 0:
            return 0 if p == q == 0 else 1
        if p <= 0 and q <= 0:
            return -1
        d = p * p - 5 * q * q
        return (1 if d > 0 else -1) if p > 0 else (1 if d < 0 else -1)

    def __lt__(self, o):
        return (self - _z(o)).sign() < 0

    def __float__(self):
        return self.a + self.b * (1 + 5 ** 0.5) / 2


def _z(x) -> Zphi:
    return x if isinstance(x, Zphi) else Zphi(int(x), 0)


PHI = Zphi(0, 1)
PSI = PHI.conj()  # 1 - phi, the contracting eigenvalue
ONE = Zphi(1)

# Three rectangles tiling R^2 / Z[phi] in (unstable, stable) coordinates;
# a lattice element r sits at (r, conj r). Areas 1, phi-1, phi-1 sum to sqrt5.
TORUS_RECTANGLES = (
    ((Zphi(0), ONE), (Zphi(0), ONE)),
    ((Zphi(0), ONE), (ONE, PHI)),
    ((ONE, PHI), (Zphi(0), ONE)),
)

_LAT = [Zphi(x, y) for x in range(-6, 7) for y in range(-6, 7)]


def _overlap(i1, i2):
    return min(i1[1], i2[1]) - max(i1[0], i2[0])


def _shift(rect, lam: Zphi):
    (u1, u2), (s1, s2) = rect
    c = lam.conj()
    return (u1 + lam, u2 + lam), (s1 + c, s2 + c)


def torus_transitions(rects=TORUS_RECTANGLES):
    """Triples (i, j, lam) with A(R_i) meeting R_j + lam in an open set."""
    out = []
    for i, ((u1, u2), (s1, s2)) in enumerate(rects):
        img = ((PHI * u1, PHI * u2), (PSI * s2, PSI * s1))
        for j, r in enumerate(rects):
            for lam in _LAT:
                (tu, ts) = _shift(r, lam)
                if _overlap(img[0], tu).sign() > 0 and _overlap(img[1], ts).sign() > 0:
                    out.append((i, j, lam))
    return out


def torus_base(rects=TORUS_RECTANGLES):
    trans = torus_transitions(rects)
    names = {}
    edges = []
    for i, j, lam in trans:
        eid = f"{i}{j}"
        n = sum(1 for k in names if k.startswith(eid))
        eid = eid if n == 0 else f"{eid}_{n}"
        names[eid] = lam
        edges.append((eid, f"R{i}", f"R{j}"))
    return Graph([f"R{i}" for i in range(len(rects))], edges), names


def _itype(rects, v, w, xi: Zphi):
    ru, rs = rects[v]
    su, ss = _shift(rects[w], xi)
    lu, ls = _overlap(ru, su).sign(), _overlap(rs, ss).sign()
    if lu < 0 or ls < 0:
        return None
    if lu > 0 and ls > 0:
        if xi == Zphi(0) and v == w:
            return "same"
        raise ValueError("rectangles overlap: not a partition")
    if lu > 0:
        return "U"
    if ls > 0:
        return "S"
    return "corner"


def torus_tracks(rects=TORUS_RECTANGLES):
    """Carry xi' = phi xi - (lam_e - lam_f) over pairs of rectangle codes.

    sameY keeps pairs that stay on a common unstable segment, sameZ on a
    common stable one.
    """
    base, lam = torus_base(rects)
    idx = {f"R{i}": i for i in range(len(rects))}
    kind = {}
    for xi in _LAT:
        for v in range(len(rects)):
            for w in range(len(rects)):
                t = _itype(rects, v, w, xi)
                if t is not None:
                    kind[(xi, v, w)] = t
    tracks = []
    for (xi, v, w), t in kind.items():
        for e in base.out_edges[f"R{v}"]:
            for f in base.out_edges[f"R{w}"]:
                nx = PHI * xi - (lam[e] - lam[f])
                tgt = (nx, idx[base.dst[e]], idx[base.dst[f]])
                if tgt in kind:
                    tracks.append(((xi, v, w), (e, f), tgt))
    side_y = _prune([x for x in tracks if kind[x[0]] in ("same", "U")])
    side_z = _prune([x for x in tracks if kind[x[0]] in ("same", "S")])
    return base, side_y, side_z


def torus_pair(raw: bool = False) -> PairPresentation:
    base, sy, sz = torus_tracks()
    return window_pair(base, sy, sz, raw=raw, meta={"family": "torus_fib"})
