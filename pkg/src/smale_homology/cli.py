"""Command-line entry point. Reports go to stdout as JSON, summaries to stderr."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .complex import CapError, ComplexError, build_complex, complex_report
from .dimension import LagError
from .graph import graph_from_json
from .homology import HomologyError, homology
from .lefschetz import OracleError, parse_oracle, verify_lefschetz
from .pair import (PairFormatError, RegularizeError, dump_pair, gen_example, load_pair,
                   regularize, validate_pair)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smale", description=__doc__)
    ap.add_argument("-q", "--quiet", action="store_true", help="no summary on stderr")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write a built-in example presentation")
    g.add_argument("--family", required=True, choices=["sft", "solenoid", "torus_fib"])
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--graph", help="graph JSON (or pair file) for the sft family")
    g.add_argument("--raw", action="store_true", help="shortest window, usually not regular")
    g.add_argument("-o", "--output", required=True)

    v = sub.add_parser("verify", help="validate a pair presentation")
    v.add_argument("-i", "--input", required=True)

    b = sub.add_parser("build", help="build the stationary double complex")
    b.add_argument("-i", "--input", required=True)
    b.add_argument("-o", "--output", default="-")

    h = sub.add_parser("homology", help="rational and/or integral homology")
    h.add_argument("-i", "--input", required=True)
    mode = h.add_mutually_exclusive_group()
    mode.add_argument("--rational", dest="mode", action="store_const", const="rational")
    mode.add_argument("--integral", dest="mode", action="store_const", const="integral")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    h.set_defaults(mode="both")

    lf = sub.add_parser("lefschetz", help="compare trace sums with periodic counts")
    lf.add_argument("-i", "--input", required=True)
    lf.add_argument("--p-max", type=int, required=True)
    lf.add_argument("--oracle", required=True, help="family[:k=v,...] or a JSON table file")
    return ap


def _emit(obj, dest: str = "-"):
    text = json.dumps(obj, indent=1) + "\n"
    if dest == "-":
        sys.stdout.write(text)
    else:
        Path(dest).write_text(text)


def _prepared(path: str):
    return regularize(load_pair(path))


def _cmd_gen(a, say):
    if a.family == "sft":
        if not a.graph:
            raise UsageError("gen --family sft needs --graph")
        try:
            obj = json.loads(Path(a.graph).read_text())
        except FileNotFoundError:
            raise FileNotFoundError(f"file not found: {a.graph}") from None
        except json.JSONDecodeError as exc:
            raise PairFormatError(f"parse error at line {exc.lineno} column {exc.colno}: "
                                  f"{exc.msg}") from None
        try:
            g = graph_from_json(obj.get("graph", obj) if isinstance(obj, dict) else obj)
        except ValueError as exc:
            raise PairFormatError(f"parse error: {exc}") from None
        pp = gen_example("sft", graph=g)
    elif a.family == "solenoid":
        if a.m < 2:
            raise UsageError("--m must be at least 2")
        pp = gen_example("solenoid", m=a.m, raw=a.raw)
    else:
        pp = gen_example("torus_fib", raw=a.raw)
    text = dump_pair(pp)
    if a.output == "-":
        sys.stdout.write(text)
    else:
        Path(a.output).write_text(text)
    say(f"gen: {a.family} with {len(pp.graph.vertices)} vertices, "
        f"{len(pp.graph.edges)} edges")
    return EXIT_OK


def _cmd_verify(a, say):
    rep = validate_pair(load_pair(a.input))
    _emit(rep.to_json())
    say(f"verify: {'valid' if rep.ok else 'invalid'} ({len(rep.violations)} violations)")
    return EXIT_OK if rep.ok else EXIT_FAIL


def _cmd_build(a, say):
    cx = build_complex(_prepared(a.input))
    _emit(complex_report(cx), a.output)
    say("build: terms " + ", ".join(f"({L},{M}):{len(t)}" for (L, M), t in cx.terms.items())
        + f"; N0={cx.bound['N0']}")
    return EXIT_OK


def _cmd_homology(a, say):
    hr = homology(build_complex(_prepared(a.input)), a.mode)
    rows = hr.to_json()
    _emit(rows)
    say("homology: " + "; ".join(f"N={r['N']} {r.get('canonical', r['betti'])}"
                                 for r in rows))
    return EXIT_OK


def _cmd_lefschetz(a, say):
    if a.p_max < 1:
        raise UsageError("--p-max must be positive")
    pp = load_pair(a.input)
    po = parse_oracle(a.oracle, pp.graph)
    pp = regularize(pp)
    table = verify_lefschetz(pp, po, a.p_max)
    _emit(table.to_json())
    for f in table.flags:
        say(f"lefschetz: {f}")
    for r in table.rows:
        if r.diagnostic:
            say(f"lefschetz: p={r.p}: {r.diagnostic}")
    say(f"lefschetz: {'pass' if table.ok else 'comparison failed'} for p = 1..{a.p_max}")
    return EXIT_OK if table.ok else EXIT_FAIL


COMMANDS = {"gen": _cmd_gen, "verify": _cmd_verify, "build": _cmd_build,
            "homology": _cmd_homology, "lefschetz": _cmd_lefschetz}


def run(argv=None) -> int:
    ap = _parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    say = (lambda msg: None) if a.quiet else (lambda msg: print(msg, file=sys.stderr))

    def err(kind, exc):
        msg = str(exc)
        plain = kind.replace("-", " ") + ": "
        print(f"{kind}: {msg[len(plain):] if msg.startswith(plain) else msg}", file=sys.stderr)

    try:
        return COMMANDS[a.cmd](a, say)
    except UsageError as exc:
        err("usage-error", exc)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        err("file-not-found", exc)
    except (PairFormatError, OracleError) as exc:
        err("input-error", exc)
    except (CapError, RegularizeError) as exc:
        err("cap-exceeded", exc)
    except (ComplexError, HomologyError, LagError) as exc:
        err("pipeline-error", exc)
    return EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
