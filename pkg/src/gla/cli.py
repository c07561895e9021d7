"""Command-line front end.

Exit codes: 0 for a positive result, 1 for a negative one (a failed
check, a refuted formula, a non-tautology), 2 for usage or input
errors.  Results go to stdout, diagnostics to stderr; artifacts are
only written when an output path is given.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import kernel
from .classify import (
    canonicalize, certificate, compare, consistency_equivalent, read_bundle,
    verify_certificate, write_bundle,
)
from .derive import (
    box_mono, build_lemma2a, build_lemma2b, build_theorem1, build_theorem2,
    build_theorem6, lift,
)
from .prop import NotATautologyError, compile_tautology
from .semantics import find_countermodel, model_to_text
from .syntax import (
    BOX_OP, Atom, Box, PrefixOp, Proves, Var, VarOp, parse_formula,
    parse_generator, print_formula, print_term,
)


def _parse_prefix(text: str) -> tuple[tuple[PrefixOp, ...], str]:
    """Read a prefix written as its application to an atom, e.g. '[]v:P'."""
    f = parse_formula(text)
    ops: list[PrefixOp] = []
    while not isinstance(f, Atom):
        if isinstance(f, Box):
            ops.append(BOX_OP)
            f = f.body
        elif isinstance(f, Proves) and isinstance(f.term, Var):
            ops.append(VarOp(f.term.name))
            f = f.body
        else:
            raise ValueError(
                "a prefix is boxes and proof variables applied to an atom,"
                f" got {text!r}")
    return tuple(ops), f.name


def _pick_var(taken: set[str]) -> str:
    for v in "uvwxyz":
        if v not in taken:
            return v
    i = 1
    while f"u{i}" in taken:
        i += 1
    return f"u{i}"


def _cmd_check(args: argparse.Namespace) -> int:
    blocks = kernel.derivations_from_text(Path(args.file).read_text())
    status = 0
    for name, d in blocks:
        report = kernel.check(d, mode=args.mode)
        if report.ok:
            print(f"OK {name}: steps={report.stats.steps}"
                  f" axioms={report.stats.axiom_instances}")
        else:
            n, reason = report.error
            print(f"FAIL {name}: step {n}: {reason}")
            status = 1
    return status


def _cmd_lift(args: argparse.Namespace) -> int:
    blocks = kernel.derivations_from_text(Path(args.file).read_text())
    lifted_blocks = []
    for name, d in blocks:
        report = kernel.check(d, mode="strict")
        if not report.ok:
            n, reason = report.error
            print(f"FAIL {name}: step {n}: {reason}")
            return 1
        if d.hypotheses:
            print(f"FAIL {name}: lifting needs a hypothesis-free derivation")
            return 1
        term, lifted = lift(d)
        lifted_blocks.append((f"{name}_lifted", lifted))
        print(print_term(term))
    if args.output:
        Path(args.output).write_text(
            kernel.derivations_to_text(lifted_blocks))
    return 0


def _cmd_taut_compile(args: argparse.Namespace) -> int:
    f = parse_formula(args.formula)
    try:
        d = compile_tautology(f)
    except NotATautologyError:
        print("NOT A TAUTOLOGY")
        return 1
    if args.output:
        Path(args.output).write_text(
            kernel.derivation_to_text("tautology", d))
    print(f"OK tautology: steps={len(d.steps)}")
    return 0


def _blocks_theorem1(args: argparse.Namespace) -> list:
    pair = build_theorem1(args.n)
    return [("theorem1_forward", pair.forward),
            ("theorem1_backward", pair.backward)]


def _blocks_theorem2(args: argparse.Namespace) -> list:
    ops, target = _parse_prefix(args.prefix)
    taken = {op.name for op in ops if isinstance(op, VarOp)}
    var = args.var if args.var is not None else _pick_var(taken)
    return [("theorem2", build_theorem2(ops, var, target))]


def _blocks_theorem6(args: argparse.Namespace) -> list:
    return [("theorem6", build_theorem6(args.k))]


def _blocks_lemma2a(args: argparse.Namespace) -> list:
    return [("lemma2a", build_lemma2a(args.k))]


def _blocks_lemma2b(args: argparse.Namespace) -> list:
    return [("lemma2b", build_lemma2b(args.k))]


def _blocks_boxmono(args: argparse.Namespace) -> list:
    return [("boxmono", box_mono(parse_formula(args.formula), args.n))]


def _cmd_derive(args: argparse.Namespace) -> int:
    blocks = args.make(args)
    for name, d in blocks:
        print(f"{name}: {print_formula(d.conclusion)}")
    if args.output:
        Path(args.output).write_text(kernel.derivations_to_text(blocks))
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    g = parse_generator(args.generator)
    c = canonicalize(g)
    print(str(c))
    equivalent = consistency_equivalent(c)
    if equivalent is None:
        print("consistency equivalent: none")
    else:
        print(f"consistency equivalent: {print_formula(equivalent)}")
    if args.output:
        write_bundle(certificate(g), args.output)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    print(str(compare(parse_generator(args.left),
                      parse_generator(args.right))))
    return 0


def _cmd_countermodel(args: argparse.Namespace) -> int:
    f = parse_formula(args.formula)
    hit = find_countermodel(f, args.max_worlds)
    if hit is None:
        print(f"NONE (bound {args.max_worlds})")
        return 0
    m, w = hit
    sys.stdout.write(model_to_text("countermodel", m))
    print(f"# refutes {print_formula(f)} at world {w}")
    return 1


def _cmd_verify_bundle(args: argparse.Namespace) -> int:
    b = read_bundle(args.directory)
    report = verify_certificate(b)
    if report.ok:
        print(f"BUNDLE OK: class {b.canonical},"
              f" {len(b.derivations)} derivations,"
              f" {len(b.countermodels)} countermodels,"
              f" {report.stats.steps} steps")
        return 0
    n, reason = report.error
    if n:
        print(f"BUNDLE FAIL: step {n}: {reason}")
    else:
        print(f"BUNDLE FAIL: {reason}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gla",
        description="Check, build, lift, and classify derivations in the"
                    " joint logic of provability and explicit proofs.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="validate every derivation in a file")
    c.add_argument("file")
    c.add_argument("--mode", choices=("strict", "extended"),
                   default="strict")
    c.set_defaults(handler=_cmd_check)

    c = sub.add_parser(
        "lift", help="turn checked derivations into explicit ones")
    c.add_argument("file")
    c.add_argument("-o", "--output", help="file for the lifted derivations")
    c.set_defaults(handler=_cmd_lift)

    c = sub.add_parser(
        "taut-compile", help="derive a propositional tautology from axioms")
    c.add_argument("formula")
    c.add_argument("-o", "--output", help="file for the derivation")
    c.set_defaults(handler=_cmd_taut_compile)

    c = sub.add_parser("derive", help="run one of the canned builders")
    dsub = c.add_subparsers(dest="builder", required=True)

    d = dsub.add_parser("theorem1",
                        help="both collapse halves for []^n P -> P")
    d.add_argument("n", type=int)
    d.set_defaults(handler=_cmd_derive, make=_blocks_theorem1)

    d = dsub.add_parser(
        "theorem2",
        help="u : <prefix> P -> P; the prefix is written applied to its"
             " atom, e.g. '[]v:P'")
    d.add_argument("prefix")
    d.add_argument("--var", help="outer proof variable (default: first free)")
    d.set_defaults(handler=_cmd_derive, make=_blocks_theorem2)

    d = dsub.add_parser("theorem6",
                        help="~[]^k false -> ([]^k u:P -> P)")
    d.add_argument("k", type=int)
    d.set_defaults(handler=_cmd_derive, make=_blocks_theorem6)

    d = dsub.add_parser("lemma2a",
                        help="[]^(k-1) false -> []^k false")
    d.add_argument("k", type=int)
    d.set_defaults(handler=_cmd_derive, make=_blocks_lemma2a)

    d = dsub.add_parser(
        "lemma2b",
        help="~[]^k false from instances of the reflection schema")
    d.add_argument("k", type=int)
    d.set_defaults(handler=_cmd_derive, make=_blocks_lemma2b)

    d = dsub.add_parser("boxmono", help="[]F -> []^n F")
    d.add_argument("formula")
    d.add_argument("n", type=int)
    d.set_defaults(handler=_cmd_derive, make=_blocks_boxmono)

    for builder_parser in dsub.choices.values():
        builder_parser.add_argument(
            "-o", "--output", help="file for the derivations")

    c = sub.add_parser("classify",
                       help="canonical class of a reflection generator")
    c.add_argument("generator")
    c.add_argument("-o", "--output",
                   help="directory for the certificate bundle")
    c.set_defaults(handler=_cmd_classify)

    c = sub.add_parser("compare",
                       help="order two generators by strength")
    c.add_argument("left")
    c.add_argument("right")
    c.set_defaults(handler=_cmd_compare)

    c = sub.add_parser("countermodel",
                       help="search for a refuting model of a box-only"
                            " formula")
    c.add_argument("formula")
    c.add_argument("--max-worlds", type=int, default=4)
    c.set_defaults(handler=_cmd_countermodel)

    c = sub.add_parser("verify-bundle",
                       help="re-check a certificate bundle directory")
    c.add_argument("directory")
    c.set_defaults(handler=_cmd_verify_bundle)

    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
