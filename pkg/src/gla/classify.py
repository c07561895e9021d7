"""Canonical classification of reflection generators, with certificates.

A generator u : Q1 ... Qn P -> P is classified by what its prefix
starts with: k leading boxes followed by a proof variable land it in
the explicit class of index k, while an all-box prefix lands it at the
top.  The classes are totally ordered by strength; the explicit class
of index k sits exactly at the consistency statement ~[]^k false, and
the top class sits strictly above all of them.

certificate produces the machine-checkable part of that placement:
derivations where the placement is outright derivable, countermodels
where adjacent classes must be separated, and declarative notes for the
arithmetic-level facts that have no finite object-level certificate.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from . import kernel
from .derive import (
    build_lemma2a, build_lemma2b, build_theorem1, build_theorem2,
    build_theorem6,
)
from .kernel import CheckReport, CheckStats, Derivation
from .semantics import (
    KripkeModel, forces, linear_model, model_from_text, model_to_text,
    validate_frame,
)
from .syntax import (
    FALSE, Atom, Formula, Generator, Impl, Neg, VarOp, box, parse_formula,
    parse_generator, print_formula, print_generator,
)


@dataclass(frozen=True, order=False)
class CanonicalClass:
    """Index of the canonical form; None marks the all-box top class."""
    k: Optional[int]

    def __post_init__(self) -> None:
        if self.k is not None and self.k < 0:
            raise ValueError("class index must be >= 0")

    @property
    def is_box_reflection(self) -> bool:
        return self.k is None

    @property
    def provable_outright(self) -> bool:
        return self.k == 0

    def __str__(self) -> str:
        if self.k is None:
            return "BoxReflection"
        return f"ExplicitK {self.k}"


BOX_REFLECTION = CanonicalClass(None)


class OrderResult(enum.Enum):
    EQUAL = "="
    STRICTLY_LESS = "<"
    STRICTLY_GREATER = ">"

    def __str__(self) -> str:
        return self.value


def canonicalize(g: Generator) -> CanonicalClass:
    for i, op in enumerate(g.prefix):
        if isinstance(op, VarOp):
            return CanonicalClass(i)
    return BOX_REFLECTION


def _rank(c: CanonicalClass) -> tuple[int, int]:
    if c.k is None:
        return (1, 0)
    return (0, c.k)


def compare(g1: Generator, g2: Generator) -> OrderResult:
    r1, r2 = _rank(canonicalize(g1)), _rank(canonicalize(g2))
    if r1 == r2:
        return OrderResult.EQUAL
    if r1 < r2:
        return OrderResult.STRICTLY_LESS
    return OrderResult.STRICTLY_GREATER


def consistency_equivalent(c: CanonicalClass) -> Optional[Formula]:
    """~[]^k false for the explicit class of index k; None at the top."""
    if c.k is None:
        return None
    return Neg(box(FALSE, c.k))


@dataclass(frozen=True)
class CertificateBundle:
    generator: Generator
    canonical: CanonicalClass
    derivations: tuple[tuple[str, Derivation], ...]
    countermodels: tuple[tuple[str, KripkeModel, int, Formula], ...]
    notes: tuple[str, ...]


_NOTE_COLLAPSE = (
    "tail collapse: identifying the generator with its canonical form"
    " reasons about the proof predicate inside arithmetic; no"
    " object-level derivation exists for it and none is included.")
_NOTE_LOWER = (
    "lower bound: recovering the canonical form from its consistency"
    " statement instantiates P by falsity at the arithmetic level;"
    " only the upper direction carries a derivation here.")
_NOTE_TOP = (
    "strict top: the all-box form yields every finite consistency"
    " statement (see the samples) yet matches none of them; the"
    " separation is an arithmetic-level diagonal argument with no"
    " finite certificate.")


def certificate(g: Generator) -> CertificateBundle:
    c = canonicalize(g)
    ders: list[tuple[str, Derivation]] = []
    cms: list[tuple[str, KripkeModel, int, Formula]] = []
    notes = [f"class of {print_generator(g)}: {c}", _NOTE_COLLAPSE]
    if c.is_box_reflection:
        n = len(g.prefix)
        pair = build_theorem1(n, g.target)
        ders.append(("collapse_forward", pair.forward))
        ders.append(("collapse_backward", pair.backward))
        for k in sorted({0, 1, n}):
            ders.append((f"consistency_sample_{k}", build_lemma2b(k)))
        notes.append(pair.note)
        notes.append(_NOTE_TOP)
    elif c.k == 0:
        head = g.prefix[0]
        assert isinstance(head, VarOp)
        ders.append(("principle",
                     build_theorem2(g.prefix[1:], head.name, g.target)))
        notes.append(
            "outright: the principle holds with an empty constant"
            " specification and no consistency side condition.")
    else:
        k = c.k
        first_var = next(op for op in g.prefix if isinstance(op, VarOp))
        ders.append(("consistency_upper",
                     build_theorem6(k, first_var.name, g.target)))
        ders.append(("chain_step", build_lemma2a(k)))
        refuted = Impl(box(FALSE, k), box(FALSE, k - 1))
        cms.append(("strictness", linear_model(k), 0, refuted))
        notes.append(_NOTE_LOWER)
        notes.append(
            "strictness: the bundled countermodel falsifies"
            f" {print_formula(refuted)} at its root, so the class sits"
            " strictly below its neighbour.")
    # keep the on-disk order: read_bundle collects files alphabetically
    ders.sort(key=lambda kv: kv[0])
    return CertificateBundle(g, c, tuple(ders), tuple(cms), tuple(notes))


def _expected_conclusions(b: CertificateBundle) -> list[str]:
    """Shape misfits between the bundle parts and its declared class."""
    problems = []
    named = dict(b.derivations)
    c = b.canonical

    def want(name: str, conclusion: Formula,
             hypotheses: Optional[tuple[Formula, ...]] = None) -> None:
        d = named.get(name)
        if d is None:
            problems.append(f"derivation {name!r} is missing")
            return
        if d.conclusion != conclusion:
            problems.append(
                f"derivation {name!r} concludes"
                f" {print_formula(d.conclusion)}, expected"
                f" {print_formula(conclusion)}")
        if hypotheses is not None and d.hypotheses != hypotheses:
            problems.append(
                f"derivation {name!r} carries unexpected hypotheses")

    p = Atom(b.generator.target)
    if c.is_box_reflection:
        n = len(b.generator.prefix)
        want("collapse_forward", Impl(box(p, 1), box(p, n)), ())
        want("collapse_backward", Impl(box(p, n), p),
             tuple(Impl(box(p, i), box(p, i - 1)) for i in range(n, 0, -1)))
        for k in sorted({0, 1, n}):
            want(f"consistency_sample_{k}", Neg(box(FALSE, k)),
                 tuple(Impl(box(FALSE, i), box(FALSE, i - 1))
                       for i in range(k, 0, -1)))
    elif c.k == 0:
        want("principle", b.generator.formula(), ())
        if b.countermodels:
            problems.append("an outright class should carry no countermodel")
    else:
        k = c.k
        upper = named.get("consistency_upper")
        if upper is None:
            problems.append("derivation 'consistency_upper' is missing")
        else:
            shape = upper.conclusion
            ok = (isinstance(shape, Impl)
                  and shape.left == Neg(box(FALSE, k))
                  and isinstance(shape.right, Impl)
                  and shape.right.right == p
                  and not upper.hypotheses)
            if not ok:
                problems.append(
                    "derivation 'consistency_upper' concludes"
                    f" {print_formula(shape)}, which does not bound the"
                    f" class by {print_formula(Neg(box(FALSE, k)))}")
        want("chain_step", Impl(box(FALSE, k - 1), box(FALSE, k)), ())
        if not any(f == Impl(box(FALSE, k), box(FALSE, k - 1))
                   for _, _, _, f in b.countermodels):
            problems.append(
                "no countermodel separates the class from its neighbour")
    return problems


def verify_certificate(b: CertificateBundle) -> CheckReport:
    """Strict-check every derivation and re-check every countermodel."""
    steps = 0
    axioms = 0

    def fail(message: str) -> CheckReport:
        return CheckReport(False, "strict", (0, message),
                           CheckStats(steps, axioms))

    if canonicalize(b.generator) != b.canonical:
        return fail(
            f"declared class {b.canonical} does not match the generator")
    for name, d in b.derivations:
        bad = kernel.validate_cs(d.cs)
        if bad:
            return fail(f"derivation {name!r}: {bad[0]}")
        report = kernel.check(d, mode="strict")
        steps += report.stats.steps
        axioms += report.stats.axiom_instances
        if not report.ok:
            at, reason = report.error
            return CheckReport(False, "strict",
                               (at, f"derivation {name!r}: {reason}"),
                               CheckStats(steps, axioms))
    for name, m, w, f in b.countermodels:
        problems = validate_frame(m)
        if problems:
            return fail(f"countermodel {name!r}: {problems[0]}")
        if not 0 <= w < m.worlds:
            return fail(f"countermodel {name!r}: world {w} is out of range")
        try:
            refuted = not forces(m, w, f)
        except ValueError as exc:
            return fail(f"countermodel {name!r}: {exc}")
        if not refuted:
            return fail(
                f"countermodel {name!r} does not refute"
                f" {print_formula(f)} at world {w}")
    shape = _expected_conclusions(b)
    if shape:
        return fail(shape[0])
    return CheckReport(True, "strict", None, CheckStats(steps, axioms))


# --- bundle directories ---------------------------------------------------------

class BundleFormatError(ValueError):
    pass


def write_bundle(b: CertificateBundle, path: Union[str, Path]) -> None:
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    flag = "provable" if b.canonical.provable_outright else "unprovable"
    (root / "class.txt").write_text(f"{b.canonical} {flag}\n")
    (root / "generator.txt").write_text(print_generator(b.generator) + "\n")
    (root / "notes.txt").write_text("".join(n + "\n" for n in b.notes))
    for name, d in b.derivations:
        (root / f"{name}.der").write_text(kernel.derivation_to_text(name, d))
    for name, m, w, f in b.countermodels:
        (root / f"{name}.model").write_text(model_to_text(name, m))
        (root / f"{name}.refutes").write_text(
            f"{print_formula(f)}\n{w}\n")


def _parse_class(text: str) -> CanonicalClass:
    parts = text.split()
    if len(parts) == 2 and parts[0] == "BoxReflection":
        cls: CanonicalClass = BOX_REFLECTION
    elif len(parts) == 3 and parts[0] == "ExplicitK" and parts[1].isdigit():
        cls = CanonicalClass(int(parts[1]))
    else:
        raise BundleFormatError(f"bad class line {text.strip()!r}")
    flag = parts[-1]
    if flag not in ("provable", "unprovable"):
        raise BundleFormatError(f"bad provability flag {flag!r}")
    if (flag == "provable") != cls.provable_outright:
        raise BundleFormatError(
            f"provability flag {flag!r} contradicts the class {cls}")
    return cls


def read_bundle(path: Union[str, Path]) -> CertificateBundle:
    root = Path(path)
    if not root.is_dir():
        raise BundleFormatError(f"{root} is not a bundle directory")
    for required in ("class.txt", "generator.txt"):
        if not (root / required).is_file():
            raise BundleFormatError(f"{required} is missing")
    cls = _parse_class((root / "class.txt").read_text())
    try:
        generator = parse_generator(
            (root / "generator.txt").read_text().strip())
    except ValueError as exc:
        raise BundleFormatError(f"generator.txt: {exc}")
    notes_file = root / "notes.txt"
    notes = tuple(notes_file.read_text().splitlines()) \
        if notes_file.is_file() else ()
    ders: list[tuple[str, Derivation]] = []
    for der_path in sorted(root.glob("*.der")):
        try:
            blocks = kernel.derivations_from_text(der_path.read_text())
        except ValueError as exc:
            raise BundleFormatError(f"{der_path.name}: {exc}")
        ders.extend(blocks)
    cms: list[tuple[str, KripkeModel, int, Formula]] = []
    for model_path in sorted(root.glob("*.model")):
        refutes_path = model_path.with_suffix(".refutes")
        if not refutes_path.is_file():
            raise BundleFormatError(
                f"{model_path.name} has no matching .refutes file")
        try:
            name, m = model_from_text(model_path.read_text())
        except ValueError as exc:
            raise BundleFormatError(f"{model_path.name}: {exc}")
        lines = [ln for ln in refutes_path.read_text().splitlines()
                 if ln.strip() and not ln.lstrip().startswith("#")]
        if len(lines) != 2 or not lines[1].strip().isdigit():
            raise BundleFormatError(
                f"{refutes_path.name}: expected a formula line and a"
                " world line")
        try:
            refuted = parse_formula(lines[0])
        except ValueError as exc:
            raise BundleFormatError(f"{refutes_path.name}: {exc}")
        cms.append((name, m, int(lines[1]), refuted))
    return CertificateBundle(generator, cls, tuple(ders), tuple(cms), notes)
