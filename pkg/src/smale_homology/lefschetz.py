"""Alternating trace sums on rational homology against periodic-point counts."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ._linalg import eye, mpow, zz
from .graph import Graph, closed_paths, graph_from_json, is_irreducible
from .homology import HomologyReport

__all__ = [
    "PeriodicOracle", "OracleError", "LefschetzRow", "LefschetzTable", "lefschetz_sum",
    "diagnose", "periodic_oracle", "parse_oracle", "verify_lefschetz", "render_fraction",
    "OUTSIDE_HYPOTHESES",
]

OUTSIDE_HYPOTHESES = "outside theorem hypotheses"

FIB = ((1, 1), (1, 0))


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class PeriodicOracle:
    """A family formula (``sft``, ``solenoid``, ``torus_fib``) or an explicit table."""

    tag: str
    params: dict = field(default_factory=dict, hash=False)
    table: dict | None = field(default=None, hash=False)

    def __post_init__(self):
        if self.table is not None:
            for p, c in self.table.items():
                if not isinstance(c, int) or c < 0:
                    raise OracleError(f"table count for p={p} must be a nonnegative integer")


def render_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def lefschetz_sum(hr: HomologyReport, p: int) -> Fraction:
    if p < 1:
        raise ValueError("period must be positive")
    if hr.integral and not hr.rational:
        raise ValueError("lefschetz sum needs the rational shift actions")
    return hr.lefschetz(p)


def diagnose(value: Fraction) -> str | None:
    """A trace sum that is not a nonnegative integer means something upstream broke."""
    if value.denominator != 1:
        return f"pipeline error: non-integral trace sum {render_fraction(value)}"
    if value < 0:
        return f"pipeline error: negative trace sum {value}"
    return None


def _torus_count(p: int) -> int:
    A = mpow(zz([list(r) for r in FIB]), p) - eye(2)
    return abs(int(A.det()))


def periodic_oracle(po: PeriodicOracle, p: int) -> int:
    if p < 1:
        raise ValueError("period must be positive")
    if po.table is not None:
        if p not in po.table:
            raise OracleError(f"oracle table has no entry for p={p}")
        return po.table[p]
    if po.tag == "sft":
        g = po.params.get("graph")
        if not isinstance(g, Graph):
            raise OracleError("sft oracle needs a graph")
        return closed_paths(g, p)
    if po.tag == "solenoid":
        m = int(po.params.get("m", 2))
        if m < 2:
            raise OracleError("solenoid oracle needs m >= 2")
        return m ** p - 1
    if po.tag == "torus_fib":
        return _torus_count(p)
    raise OracleError(f"unknown oracle family {po.tag!r}")


def parse_oracle(spec: str, graph: Graph | None = None) -> PeriodicOracle:
    """``family[:k=v,...]`` or a path to a JSON table ``{"1": n1, "2": n2, ...}``.

    For ``sft`` the graph comes from ``graph=<file>`` or from the ``graph`` argument.
    """
    tag, _, rest = spec.partition(":")
    if tag in ("sft", "solenoid", "torus_fib"):
        params = {}
        for item in filter(None, rest.split(",")):
            k, eq, v = item.partition("=")
            if not eq:
                raise OracleError(f"bad oracle parameter {item!r}")
            params[k.strip()] = v.strip()
        if tag == "solenoid":
            try:
                params["m"] = int(params.get("m", 2))
            except ValueError:
                raise OracleError("solenoid oracle parameter m must be an integer") from None
        if tag == "sft":
            if "graph" in params:
                try:
                    obj = json.loads(Path(params["graph"]).read_text())
                except FileNotFoundError:
                    raise FileNotFoundError(f"file not found: {params['graph']}") from None
                params["graph"] = graph_from_json(obj.get("graph", obj))
            elif graph is not None:
                params["graph"] = graph
        return PeriodicOracle(tag, params)
    path = Path(spec)
    try:
        obj = json.loads(path.read_text())
    except FileNotFoundError:
        raise FileNotFoundError(f"file not found: {spec}") from None
    except json.JSONDecodeError as exc:
        raise OracleError(f"parse error at line {exc.lineno} column {exc.colno}: "
                          f"{exc.msg}") from None
    if isinstance(obj, list):
        obj = {str(i + 1): c for i, c in enumerate(obj)}
    if not isinstance(obj, dict):
        raise OracleError("oracle table must map periods to counts")
    try:
        table = {int(k): v for k, v in obj.items()}
    except ValueError:
        raise OracleError("oracle table keys must be integers") from None
    return PeriodicOracle("table", {"file": spec}, table)


@dataclass(frozen=True)
class LefschetzRow:
    p: int
    trace_sum: Fraction
    oracle: int
    diagnostic: str | None = None

    @property
    def passed(self) -> bool:
        return self.diagnostic is None and self.trace_sum == self.oracle

    def to_json(self) -> dict:
        d = {"p": self.p, "trace_sum": render_fraction(self.trace_sum),
             "oracle": self.oracle, "pass": self.passed}
        if self.diagnostic:
            d["diagnostic"] = self.diagnostic
        return d


@dataclass(frozen=True)
class LefschetzTable:
    rows: tuple
    flags: tuple = ()

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.rows)

    def to_json(self) -> list[dict]:
        return [r.to_json() for r in self.rows]


def verify_lefschetz(pp, po: PeriodicOracle, p_max: int,
                     hr: HomologyReport | None = None) -> LefschetzTable:
    if hr is None:
        from .complex import build_complex
        from .homology import homology
        hr = homology(build_complex(pp), "rational")
    rows = []
    for p in range(1, p_max + 1):
        s = lefschetz_sum(hr, p)
        rows.append(LefschetzRow(p, s, periodic_oracle(po, p), diagnose(s)))
    flags = () if is_irreducible(pp.graph) else (OUTSIDE_HYPOTHESES,)
    return LefschetzTable(tuple(rows), flags)
