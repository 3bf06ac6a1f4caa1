"""Command-line front end.

Exit codes: 0 for a definite result, 2 for an Unknown verdict or an
exhausted budget, 1 for usage errors and guard errors.  With
``--output structured`` each invocation prints exactly one JSON document
(sorted keys, no timestamps), so identical command lines give identical
bytes.
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
from contextlib import contextmanager
from fractions import Fraction
from typing import Callable, Sequence

from . import __version__
from .errors import (BudgetExhausted, DeadlineExceeded, ElError, GuardError,
                     RelationVerificationError)
from .evaluate import EvalBudget, evaluate
from .expr import Expr, meta
from .lab.evidence import DEFAULT_BASIS, conjecture_evidence
from .lab.galois import S5Certificate, certify_s5
from .lab.levels import LevelCaps, enumerate_levels, separation
from .lab.roots import opaque_constants
from .linrel import find_rational_relation, value_text, verify_relation
from .syntax import ParseError, parse, render
from .tower import build_tower, reduce_tower, target_ball, verify_tower
from .zero import Nonzero, Zero, is_zero

__all__ = ["main", "run", "SCHEMA_VERSION"]

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _positive(minimum: int) -> Callable[[str], int]:
    def check(text: str) -> int:
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
        if v < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}")
        return v
    return check


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("configuration")
    g.add_argument("--precision-bits", type=_positive(64), default=256, metavar="BITS")
    g.add_argument("--height-bound", type=_positive(1), default=50, metavar="H")
    g.add_argument("--budget-ms", type=_positive(0), default=30000, metavar="MS",
                   help="wall-clock budget; 0 disables it")
    g.add_argument("--output", choices=("text", "structured"), default="text")
    g.add_argument("--seed", type=int, default=0)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="elnum", description="EL numbers: evaluation, towers, relations, "
                                                "zero recognition and level sets.")
    parser.add_argument("--version", action="version", version=f"elnum {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    add("parse", "parse an expression and print it back").add_argument("expr")
    add("eval", "enclose the value of an expression in a ball").add_argument("expr")
    p = add("tower", "build a tower for an expression and check its witnesses")
    p.add_argument("expr")
    p.add_argument("--tolerance", default="1e-30")
    p = add("reduce", "build a tower and reduce it")
    p.add_argument("expr")
    p.add_argument("--tolerance", default="1e-30")
    add("zero", "decide whether an expression is exactly zero").add_argument("expr")
    p = add("relation", "search for an integer relation among values "
                        "(expressions, or R, r1..r5)")
    p.add_argument("values", nargs="+")
    p = add("enum", "enumerate the level sets E_0..E_n")
    p.add_argument("--n-max", type=_positive(0), default=2)
    p.add_argument("--max-members", type=_positive(1), default=5000)
    p.add_argument("--members", action="store_true", help="list the members of each level")
    p = add("s5", "certify that a quintic has Galois group S5")
    p.add_argument("coefficients", nargs="?", default="2,0,0,0,-10,5",
                   help="comma-separated rationals, highest degree first")
    p.add_argument("--prime-budget", type=_positive(1), default=10000)
    p = add("conjecture", "relation-search evidence for conjecture 1 or 2")
    p.add_argument("id", type=int, choices=(1, 2))
    p.add_argument("--basis", default=None,
                   help="comma-separated expressions (R and r1..r5 allowed); "
                        "default: " + ", ".join(DEFAULT_BASIS))
    return parser


# -- budget ------------------------------------------------------------------------------

@contextmanager
def _deadline(ms: int):
    usable = ms > 0 and hasattr(signal, "setitimer")
    try:
        import threading
        usable = usable and threading.current_thread() is threading.main_thread()
    except Exception:  # pragma: no cover
        usable = False
    if not usable:
        yield
        return

    def fire(signum, frame):
        raise DeadlineExceeded(f"wall-clock budget of {ms} ms exhausted")

    old = signal.signal(signal.SIGALRM, fire)
    signal.setitimer(signal.ITIMER_REAL, ms / 1000)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


# -- helpers -----------------------------------------------------------------------------

def split_top_level(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
            continue
        depth += (ch == "(") - (ch == ")")
        cur.append(ch)
    parts.append("".join(cur).strip())
    return [p for p in parts if p]


def _value(text: str):
    consts = opaque_constants()
    return consts[text.strip()] if text.strip() in consts else parse(text)


def _tree(e: Expr) -> dict:
    out: dict = {"kind": type(e).__name__}
    if hasattr(e, "p"):
        out["value"] = f"{e.p}/{e.q}" if e.q != 1 else str(e.p)
    kids = e.children()
    if kids:
        out["children"] = [_tree(c) for c in kids]
    return out


class Result:
    def __init__(self, data: dict, text: str, code: int = EXIT_OK):
        self.data, self.text, self.code = data, text, code


# -- commands ----------------------------------------------------------------------------

def cmd_parse(args, budget) -> Result:
    e = parse(args.expr)
    m = meta(e)
    return Result({"render": render(e), "depth": m.depth, "node_count": m.node_count,
                   "tree": _tree(e)},
                  f"{render(e)}\ndepth {m.depth}, {m.node_count} nodes")


def cmd_eval(args, budget) -> Result:
    e = parse(args.expr)
    ball = evaluate(e, args.precision_bits, budget)
    d = ball.to_dict()
    return Result({"expr": render(e), "ball": d},
                  f"{d['mid_re']} + {d['mid_im']}*i\n  +/- {d['radius']} "
                  f"({d['precision_bits']} bits)")


def _tower_text(t) -> str:
    return str(t)


def cmd_tower(args, budget) -> Result:
    e = parse(args.expr)
    t = build_tower(e, budget)
    report = verify_tower(t, args.tolerance, budget)
    value = target_ball(t, args.precision_bits, budget)
    text = [_tower_text(t), f"length {len(t)}, witnesses "
            + ("verified" if report.passed else "FAILED") + f" at {args.tolerance}",
            f"target value {value}"]
    return Result({"expr": render(e), "tower": t.to_dict(), "verification": report.to_dict(),
                   "target_value": value.to_dict()},
                  "\n".join(text), EXIT_OK if report.passed else EXIT_ERROR)


def cmd_reduce(args, budget) -> Result:
    e = parse(args.expr)
    t = build_tower(e, budget)
    red = reduce_tower(t, args.height_bound, args.precision_bits, budget)
    before = verify_tower(t, args.tolerance, budget)
    after = verify_tower(red.tower, args.tolerance, budget)
    v0 = target_ball(t, args.precision_bits, budget)
    v1 = target_ball(red.tower, args.precision_bits, budget)
    diff = v0 - v1
    preserved = diff.contains_zero()
    ok = before.passed and after.passed and preserved
    text = [f"original tower (length {len(t)}):", _tower_text(t),
            f"reduced tower (length {len(red.tower)}):", _tower_text(red.tower)]
    for s in red.splices:
        text.append(f"splice: removed entry {s.index} via relation "
                    f"{list(s.relation.coefficients)} (q = {s.q})")
    text.append(f"no relation of height <= {red.height_bound} found at "
                f"{red.precision_bits} bits; target value {v1}")
    return Result({"expr": render(e), "original": t.to_dict(), "reduced": red.to_dict(),
                   "verification": {"before": before.to_dict(), "after": after.to_dict()},
                   "target_value": v1.to_dict(), "target_preserved": preserved},
                  "\n".join(text), EXIT_OK if ok else EXIT_ERROR)


def cmd_zero(args, budget) -> Result:
    e = parse(args.expr)
    v = is_zero(e, budget)
    if isinstance(v, Zero):
        lines = ["Zero"] + [f"  {s.rule}: {render(s.before)} -> {render(s.after)}"
                            for s in v.derivation]
        code = EXIT_OK
    elif isinstance(v, Nonzero):
        lines = [f"Nonzero, certificate {v.certificate}"]
        code = EXIT_OK
    else:
        lines = [f"Unknown: {v.reason} (up to {v.max_precision_bits} bits, "
                 f"{v.rewrite_steps} rewrite steps)"]
        code = EXIT_UNKNOWN
    return Result({"expr": render(e), **v.to_dict()}, "\n".join(lines), code)


def cmd_relation(args, budget) -> Result:
    values = [_value(t) for t in args.values]
    rel = find_rational_relation(values, args.height_bound, args.precision_bits, budget)
    inputs = [value_text(v) for v in values]
    base = {"inputs": inputs, "height_bound": args.height_bound,
            "precision_bits": args.precision_bits}
    if rel is None:
        return Result({**base, "outcome": "none found", "relation": None},
                      f"no relation of height <= {args.height_bound} at "
                      f"{args.precision_bits} bits")
    rel = verify_relation(values, rel, budget)
    if rel.verified:
        outcome, code = "verified", EXIT_OK
    elif rel.rejected:
        outcome, code = "rejected", EXIT_OK
    else:
        outcome, code = "unverified candidate", EXIT_UNKNOWN
    text = f"{outcome}: {list(rel.coefficients)} ({rel.status}) {rel.diagnostic}".rstrip()
    return Result({**base, "outcome": outcome, "relation": rel.to_dict()}, text, code)


def cmd_enum(args, budget) -> Result:
    caps = LevelCaps(max_members=args.max_members)
    levels = enumerate_levels(args.n_max, caps, budget)
    out, lines, code = [], [], EXIT_OK
    for lv in levels:
        d = lv.to_dict()
        if not args.members:
            d.pop("members")
        sep = separation(lv, budget).to_dict() if len(lv) >= 2 else None
        d["separation"] = sep
        out.append(d)
        flag = " (truncated)" if lv.truncated else ""
        flag += f" ({len(lv.undecided)} undecided pairs)" if lv.undecided else ""
        line = f"E_{lv.n}: {len(lv)} members{flag}"
        if sep is not None:
            line += f", separation >= {sep['epsilon_lower_bound']}"
            if not sep["certified"]:
                line += " (not certified)"
                code = EXIT_UNKNOWN
        if lv.undecided:
            code = EXIT_UNKNOWN
        lines.append(line)
        if args.members:
            lines.extend("  " + m["expr"] for m in d["members"])
    return Result({"levels": out, "caps": caps.to_dict()}, "\n".join(lines), code)


def cmd_s5(args, budget) -> Result:
    try:
        coeffs = [Fraction(c) for c in split_top_level(args.coefficients)]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad coefficient list {args.coefficients!r}")
    cert = certify_s5(coeffs, args.prime_budget)
    d = cert.to_dict()
    if isinstance(cert, S5Certificate):
        irr = cert.irreducibility
        how = (f"Eisenstein at {irr['prime']}" if irr["method"] == "eisenstein"
               else f"degree patterns mod {irr['primes']}")
        lines = [f"Galois group S5; irreducible by {how}"]
        lines += [f"  mod {w.prime}: degrees {list(w.pattern)} -> {w.role}" for w in cert.witnesses]
        d["replayed"] = cert.replay()
    else:
        lines = [f"refused: {cert.reason}"]
        lines += [f"  factor {list(c)}^{e}" for c, e in cert.factors]
        d["replayed"] = cert.replay()
    return Result(d, "\n".join(lines))


def cmd_conjecture(args, budget) -> Result:
    basis = None
    if args.basis is not None:
        basis = [_value(t) for t in split_top_level(args.basis)]
    rep = conjecture_evidence(args.id, args.height_bound, args.precision_bits, basis,
                              args.seed, budget)
    lines = [f"Conjecture {rep.conjecture}: {rep.verdict}", f"  {rep.detail}"]
    for s in rep.searches:
        rel = s.relation["coefficients"] if s.relation else ""
        lines.append(f"  {s.target}: {s.outcome} {rel}".rstrip())
    code = EXIT_UNKNOWN if rep.verdict == "inconclusive" else EXIT_OK
    return Result(rep.to_dict(), "\n".join(lines), code)


COMMANDS = {
    "parse": cmd_parse, "eval": cmd_eval, "tower": cmd_tower, "reduce": cmd_reduce,
    "zero": cmd_zero, "relation": cmd_relation, "enum": cmd_enum, "s5": cmd_s5,
    "conjecture": cmd_conjecture,
}


def _config(args) -> dict:
    return {"precision_bits": args.precision_bits, "height_bound": args.height_bound,
            "budget_ms": args.budget_ms, "output": args.output, "seed": args.seed}


def run(argv: Sequence[str], out=None, err=None) -> int:
    """Run one command; returns the exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(list(argv))
    except UsageError as exc:
        print(str(exc), file=err)
        return EXIT_ERROR
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    budget = EvalBudget(max_precision_bits=max(2048, 4 * args.precision_bits))
    error = None
    result = None
    try:
        with _deadline(args.budget_ms):
            result = COMMANDS[args.command](args, budget)
        code = result.code
    except UsageError as exc:
        error, code = ("UsageError", str(exc)), EXIT_ERROR
    except (BudgetExhausted, DeadlineExceeded) as exc:
        error, code = ("BudgetExhausted", str(exc)), EXIT_UNKNOWN
    except (ParseError, GuardError, RelationVerificationError, ElError, ValueError,
            ZeroDivisionError) as exc:
        error, code = (type(exc).__name__, str(exc)), EXIT_ERROR
    if args.output == "structured":
        doc = {"version": SCHEMA_VERSION, "command": args.command, "config": _config(args),
               "exit_code": code}
        if result is not None:
            doc["result"] = result.data
        if error is not None:
            doc["error"] = {"type": error[0], "message": error[1]}
        out.write(json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    elif result is not None:
        out.write(result.text + "\n")
    if error is not None and args.output == "text":
        print(f"{error[0]}: {error[1]}", file=err)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
