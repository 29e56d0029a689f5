"""Rational and integral homology of a stationary chain complex.

Over Q we pass to eventual ranges first and then take homology; over Z we
take homology of one stage (Smith normal form) and then the stationary limit
of the induced shift. Both routes must agree on ranks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ._linalg import (QQ, ZZ, DomainMatrix, charpoly, column_basis, eye, mpow, rows_of,
                      snf, solve_left, to_fraction, trace, zeros, zz)
from .complex import StationaryComplex
from .dimension import CanonicalForm, StationarySystem, classify_limit, rationalize

__all__ = [
    "RationalDegree", "IntegralDegree", "HomologyReport", "HomologyError",
    "homology_rational", "homology_integral", "homology", "stage_homology",
    "eventual_torsion", "chain_trace",
]


class HomologyError(RuntimeError):
    pass


@dataclass
class RationalDegree:
    N: int
    betti: int
    action: DomainMatrix  # over QQ, on a basis of H_N tensor Q

    @property
    def charpoly(self) -> list[int]:
        return charpoly(self.action)

    def trace_power(self, p: int) -> Fraction:
        return to_fraction(trace(mpow(self.action, p))) if self.betti else Fraction(0)


@dataclass
class IntegralDegree:
    N: int
    system: StationarySystem
    canonical: CanonicalForm
    stage_torsion: tuple  # invariant factors of one stage, before the limit

    @property
    def torsion(self) -> tuple:
        return self.system.torsion

    @property
    def free_rank(self) -> int:
        return rationalize(self.system)[0]


@dataclass
class HomologyReport:
    rational: dict = field(default_factory=dict)
    integral: dict = field(default_factory=dict)

    @property
    def degrees(self) -> list[int]:
        return sorted(set(self.rational) | set(self.integral))

    def betti(self, N: int) -> int:
        if N in self.rational:
            return self.rational[N].betti
        if N in self.integral:
            return self.integral[N].free_rank
        return 0

    def uct_consistent(self) -> bool:
        return all(self.rational[N].betti == self.integral[N].free_rank
                   for N in set(self.rational) & set(self.integral))

    def lefschetz(self, p: int) -> Fraction:
        return sum((Fraction((-1) ** (N % 2)) * d.trace_power(p)
                    for N, d in self.rational.items()), Fraction(0))

    def to_json(self) -> list[dict]:
        out = []
        for N in sorted(self.degrees, reverse=True):
            row = {"N": N, "betti": self.betti(N)}
            if N in self.integral:
                d = self.integral[N]
                row["torsion"] = list(d.torsion)
                row["canonical"] = d.canonical.text()
            else:
                row["torsion"] = []
            if N in self.rational:
                row["charpoly"] = self.rational[N].charpoly
            else:
                row["charpoly"] = charpoly(rationalize(self.integral[N].system)[1])
            out.append(row)
        return out


def homology_rational(cx: StationaryComplex) -> dict:
    degs = cx.degrees()
    if not degs:
        return {}
    lo, hi = degs[0], degs[-1]
    R, G, D = {}, {}, {}
    for N in range(lo - 1, hi + 2):
        n = cx.rank(N)
        if n == 0:
            R[N] = zeros(0, 0, QQ)
            G[N] = zeros(0, 0, QQ)
            continue
        S = cx.shift(N)
        R[N] = column_basis(mpow(S, n)).convert_to(QQ)
        G[N] = solve_left(R[N], S.convert_to(QQ) * R[N])
    for N in range(lo, hi + 2):
        r_src, r_tgt = R[N].shape[1], R[N - 1].shape[1]
        if cx.rank(N) == 0 or cx.rank(N - 1) == 0:
            D[N] = zeros(r_tgt, r_src, QQ)
            continue
        img = cx.boundary(N).convert_to(QQ) * R[N]
        try:
            D[N] = solve_left(R[N - 1], img)
        except ValueError:
            raise HomologyError(f"boundary out of degree {N} leaves the eventual range") from None
    out = {}
    for N in range(lo, hi + 1):
        r = R[N].shape[1]
        if r == 0:
            out[N] = RationalDegree(N, 0, zeros(0, 0, QQ))
            continue
        Z = _kernel(D[N], r)
        B = column_basis(D[N + 1]) if D[N + 1].shape[1] else zeros(r, 0, QQ)
        nb = B.shape[1]
        both = B.hstack(Z) if Z.shape[1] else B
        if both.shape[1] == 0:
            out[N] = RationalDegree(N, 0, zeros(0, 0, QQ))
            continue
        _, piv = both.rref()
        hcols = [p for p in piv if p >= nb]
        if not hcols:
            out[N] = RationalDegree(N, 0, zeros(0, 0, QQ))
            continue
        Hc = both.extract(list(range(r)), hcols)
        basis = B.hstack(Hc) if nb else Hc
        X = solve_left(basis, G[N] * Hc)
        act = X.extract(list(range(nb, nb + len(hcols))), list(range(len(hcols))))
        out[N] = RationalDegree(N, len(hcols), act)
    return out


def _kernel(D: DomainMatrix, r: int) -> DomainMatrix:
    if D.shape[0] == 0:
        return eye(r, QQ)
    N = D.nullspace()
    if N.shape[0] == 0:
        return zeros(r, 0, QQ)
    return N.transpose()


def _int_inverse(U: DomainMatrix) -> DomainMatrix:
    return U.convert_to(QQ).inv().convert_to(ZZ)


def _rank_of_snf(S: DomainMatrix) -> int:
    return sum(1 for i in range(min(S.shape)) if S[i, i].element != 0)


def stage_homology(d_in: DomainMatrix, d_out: DomainMatrix, gamma: DomainMatrix):
    """Homology at one stage: ker(d_out) / im(d_in) with the map induced by gamma.

    ``d_in``: C_{N+1} -> C_N, ``d_out``: C_N -> C_{N-1}, ``gamma`` on C_N.
    Returns (free action, torsion invariant factors, torsion action rows).
    """
    n = gamma.shape[0]
    if n == 0:
        return zeros(0, 0), (), []
    if d_out.shape[0]:
        S, _, V = snf(d_out)
        r = _rank_of_snf(S)
    else:
        V, r = eye(n), 0
    Vinv = _int_inverse(V)
    k = n - r
    idx_k = list(range(r, n))
    K = V.extract(list(range(n)), idx_k)
    if k == 0:
        return zeros(0, 0), (), []
    G = (Vinv * gamma * K).extract(idx_k, list(range(k)))
    if d_in.shape[1]:
        Y_full = Vinv * d_in
        if r and not Y_full.extract(list(range(r)), list(range(d_in.shape[1]))).is_zero_matrix:
            raise HomologyError("boundary does not square to zero")
        Y = Y_full.extract(idx_k, list(range(d_in.shape[1])))
        S2, U2, _ = snf(Y)
        s = _rank_of_snf(S2)
        diag = [int(S2[i, i].element) for i in range(s)]
    else:
        U2, s, diag = eye(k), 0, []
    Gh = U2 * G * _int_inverse(U2)
    rows = rows_of(Gh)
    free = list(range(s, k))
    tors = [i for i in range(s) if abs(diag[i]) > 1]
    for j in range(s):
        if any(rows[i][j] for i in free):
            raise HomologyError("shift does not descend to homology")
    free_act = zz([[rows[i][j] for j in free] for i in free], (len(free), len(free)))
    tinv = tuple(abs(diag[i]) for i in tors)
    tact = [[rows[i][j] % abs(diag[i]) for j in tors] for i in tors]
    return free_act, tinv, tact


def _subgroup_invariants(cols: list[list[int]], mods: tuple) -> tuple:
    """Invariant factors of the subgroup of prod Z/mods generated by ``cols``."""
    t = len(mods)
    c = len(cols)
    if t == 0 or c == 0:
        return ()
    A = zz([[cols[j][i] for j in range(c)] + [mods[i] if q == i else 0 for q in range(t)]
            for i in range(t)], (t, c + t))
    S, _, V = snf(A)
    r = _rank_of_snf(S)
    ker = V.extract(list(range(c)), list(range(r, c + t)))
    if ker.shape[1] == 0:
        return ()
    S2, _, _ = snf(ker)
    d = [abs(int(S2[i, i].element)) for i in range(min(S2.shape))]
    if len([x for x in d if x]) < c:
        raise HomologyError("torsion subgroup computation produced an infinite group")
    return tuple(x for x in d if x > 1)


def eventual_torsion(mods: tuple, action: list[list[int]]) -> tuple:
    """Torsion of the limit: the stable image of the torsion action."""
    t = len(mods)
    if t == 0:
        return ()
    cols = [[1 if i == j else 0 for i in range(t)] for j in range(t)]
    prev = None
    for _ in range(64):
        inv = _subgroup_invariants(cols, mods)
        order = 1
        for x in inv:
            order *= x
        if order == prev or order == 1:
            return inv
        prev = order
        cols = [[sum(action[i][q] * col[q] for q in range(t)) % mods[i] for i in range(t)]
                for col in cols]
    raise HomologyError("torsion image did not stabilize")


def homology_integral(cx: StationaryComplex) -> dict:
    degs = cx.degrees()
    out = {}
    for N in range(degs[0], degs[-1] + 1) if degs else ():
        free, tinv, tact = stage_homology(cx.boundary(N + 1), cx.boundary(N), cx.shift(N))
        lim_t = eventual_torsion(tinv, tact)
        system = StationarySystem(free.shape[0], free, lim_t)
        out[N] = IntegralDegree(N, system, classify_limit(system), tinv)
    return out


def homology(cx: StationaryComplex, mode: str = "both") -> HomologyReport:
    rep = HomologyReport()
    if mode in ("rational", "both"):
        rep.rational = homology_rational(cx)
    if mode in ("integral", "both"):
        rep.integral = homology_integral(cx)
    if mode == "both" and not rep.uct_consistent():
        raise HomologyError("rational and integral ranks disagree")
    return rep


def chain_trace(cx: StationaryComplex, p: int) -> Fraction:
    """Alternating trace of gamma^p over the chain groups (eventual ranges)."""
    total = Fraction(0)
    for (L, M), t in cx.terms.items():
        total += (-1) ** ((L - M) % 2) * int(trace(mpow(t.gamma, p)))
    return total
