"""Trusted checking core: axiom schemas, derivations, and their validation.

A derivation is a numbered list of formulas, each justified by an axiom
schema instance, a constant-specification entry, a hypothesis, modus
ponens, necessitation, reflection, or (in extended mode only) an opaque
propositional tautology.  ``check`` revalidates every step; everything
else in the package ultimately answers to it.

Axiom schemas, in the fixed order used by ``match_axiom``:

    K1a   A -> (B -> A)
    K1b   (A -> B) -> ((A -> (B -> C)) -> (A -> C))
    K3    A -> (B -> A & B)
    K4a   A & B -> A
    K4b   A & B -> B
    K5a   A -> A | B
    K5b   B -> A | B
    K6    (A -> C) -> ((B -> C) -> (A | B -> C))
    K7    (A -> B) -> ((A -> ~B) -> ~A)
    K8    ~~A -> A
    KF    false -> A
    GL1   [](A -> B) -> ([]A -> []B)
    GL2   []A -> [][]A
    GL3   []([]A -> A) -> []A
    LP1   s:(A -> B) -> (t:A -> (s * t):B)
    LP2   t:A -> !t:(t:A)
    LP3a  s:A -> (s + t):A
    LP3b  t:A -> (s + t):A
    LP4   t:A -> A
    C1    t:A -> []A
    C2    ~t:A -> []~t:A
    C3    t:[]A -> A

Necessitation and reflection only apply to steps that do not depend on
a hypothesis; the taint is tracked per step and recomputed on demand.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

from .syntax import (
    FALSE, And, App, Atom, Box, Check, Const, Falsum, Formula, Impl, Neg, Or,
    Proves, Sum, Term, Var, parse_formula, print_formula,
)


class AxiomSchemaId(enum.Enum):
    K1a = "K1a"
    K1b = "K1b"
    K3 = "K3"
    K4a = "K4a"
    K4b = "K4b"
    K5a = "K5a"
    K5b = "K5b"
    K6 = "K6"
    K7 = "K7"
    K8 = "K8"
    KF = "KF"
    GL1 = "GL1"
    GL2 = "GL2"
    GL3 = "GL3"
    LP1 = "LP1"
    LP2 = "LP2"
    LP3a = "LP3a"
    LP3b = "LP3b"
    LP4 = "LP4"
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"

    def __str__(self) -> str:
        return self.value


# --- schema patterns and matching -------------------------------------------

@dataclass(frozen=True)
class _FMeta:
    name: str


@dataclass(frozen=True)
class _TMeta:
    name: str


_A, _B, _C = _FMeta("A"), _FMeta("B"), _FMeta("C")
_s, _t = _TMeta("s"), _TMeta("t")

SCHEMAS: dict[AxiomSchemaId, Formula] = {
    AxiomSchemaId.K1a: Impl(_A, Impl(_B, _A)),
    AxiomSchemaId.K1b: Impl(Impl(_A, _B),
                            Impl(Impl(_A, Impl(_B, _C)), Impl(_A, _C))),
    AxiomSchemaId.K3: Impl(_A, Impl(_B, And(_A, _B))),
    AxiomSchemaId.K4a: Impl(And(_A, _B), _A),
    AxiomSchemaId.K4b: Impl(And(_A, _B), _B),
    AxiomSchemaId.K5a: Impl(_A, Or(_A, _B)),
    AxiomSchemaId.K5b: Impl(_B, Or(_A, _B)),
    AxiomSchemaId.K6: Impl(Impl(_A, _C),
                           Impl(Impl(_B, _C), Impl(Or(_A, _B), _C))),
    AxiomSchemaId.K7: Impl(Impl(_A, _B), Impl(Impl(_A, Neg(_B)), Neg(_A))),
    AxiomSchemaId.K8: Impl(Neg(Neg(_A)), _A),
    AxiomSchemaId.KF: Impl(FALSE, _A),
    AxiomSchemaId.GL1: Impl(Box(Impl(_A, _B)), Impl(Box(_A), Box(_B))),
    AxiomSchemaId.GL2: Impl(Box(_A), Box(Box(_A))),
    AxiomSchemaId.GL3: Impl(Box(Impl(Box(_A), _A)), Box(_A)),
    AxiomSchemaId.LP1: Impl(Proves(_s, Impl(_A, _B)),
                            Impl(Proves(_t, _A), Proves(App(_s, _t), _B))),
    AxiomSchemaId.LP2: Impl(Proves(_t, _A), Proves(Check(_t), Proves(_t, _A))),
    AxiomSchemaId.LP3a: Impl(Proves(_s, _A), Proves(Sum(_s, _t), _A)),
    AxiomSchemaId.LP3b: Impl(Proves(_t, _A), Proves(Sum(_s, _t), _A)),
    AxiomSchemaId.LP4: Impl(Proves(_t, _A), _A),
    AxiomSchemaId.C1: Impl(Proves(_t, _A), Box(_A)),
    AxiomSchemaId.C2: Impl(Neg(Proves(_t, _A)), Box(Neg(Proves(_t, _A)))),
    AxiomSchemaId.C3: Impl(Proves(_t, Box(_A)), _A),
}

Substitution = dict[str, Union[Formula, Term]]


def _match(pat, val, binds: Substitution) -> bool:
    if isinstance(pat, _FMeta) or isinstance(pat, _TMeta):
        if pat.name in binds:
            return binds[pat.name] == val
        binds[pat.name] = val
        return True
    if type(pat) is not type(val):
        return False
    if isinstance(pat, (Atom, Var, Const)):
        return pat.name == val.name
    if isinstance(pat, Falsum):
        return True
    if isinstance(pat, (Neg, Box)):
        return _match(pat.body, val.body, binds)
    if isinstance(pat, (And, Or, Impl, App, Sum)):
        return (_match(pat.left, val.left, binds)
                and _match(pat.right, val.right, binds))
    if isinstance(pat, Proves):
        return (_match(pat.term, val.term, binds)
                and _match(pat.body, val.body, binds))
    if isinstance(pat, Check):
        return _match(pat.inner, val.inner, binds)
    raise TypeError(f"bad pattern node: {pat!r}")


def match_schema(sid: AxiomSchemaId, f: Formula) -> Optional[Substitution]:
    """Substitution making schema sid equal to f, or None."""
    binds: Substitution = {}
    return binds if _match(SCHEMAS[sid], f, binds) else None


def match_axiom(f: Formula) -> Optional[tuple[AxiomSchemaId, Substitution]]:
    """First schema (in the fixed order above) that f instantiates."""
    for sid in AxiomSchemaId:
        binds = match_schema(sid, f)
        if binds is not None:
            return sid, binds
    return None


def instantiate(sid: AxiomSchemaId, binds: Substitution) -> Formula:
    """Plug a substitution back into a schema pattern."""
    def go(pat):
        if isinstance(pat, (_FMeta, _TMeta)):
            return binds[pat.name]
        if isinstance(pat, (Atom, Falsum, Var, Const)):
            return pat
        if isinstance(pat, Neg):
            return Neg(go(pat.body))
        if isinstance(pat, Box):
            return Box(go(pat.body))
        if isinstance(pat, (And, Or, Impl, App, Sum)):
            return type(pat)(go(pat.left), go(pat.right))
        if isinstance(pat, Proves):
            return Proves(go(pat.term), go(pat.body))
        if isinstance(pat, Check):
            return Check(go(pat.inner))
        raise TypeError(f"bad pattern node: {pat!r}")
    return go(SCHEMAS[sid])


# --- constant specifications -------------------------------------------------

@dataclass(frozen=True)
class ConstantSpecification:
    """Finite choice of proof constants certifying axiom instances.

    One constant may certify several instances.  Entries keep their
    given order so serialization stays deterministic.
    """

    entries: tuple[tuple[str, Formula], ...] = ()

    def covers(self, const: str, f: Formula) -> bool:
        return (const, f) in self.entries

    def constants(self) -> set[str]:
        return {c for c, _ in self.entries}

    def extend(self, new: tuple[tuple[str, Formula], ...]) -> "ConstantSpecification":
        merged = list(self.entries)
        for e in new:
            if e not in merged:
                merged.append(e)
        return ConstantSpecification(tuple(merged))


EMPTY_CS = ConstantSpecification()


def validate_cs(cs: ConstantSpecification) -> list[str]:
    """Entries whose formula is not an axiom instance, as problem strings."""
    problems = []
    for const, f in cs.entries:
        if match_axiom(f) is None:
            problems.append(
                f"{const} certifies {print_formula(f)}, which instantiates"
                " no axiom schema")
    return problems


# --- justifications and derivations -----------------------------------------

@dataclass(frozen=True)
class Axiom:
    schema: AxiomSchemaId


@dataclass(frozen=True)
class Cs:
    const: str


@dataclass(frozen=True)
class Hyp:
    index: int  # 1-based into Derivation.hypotheses


@dataclass(frozen=True)
class Mp:
    antecedent: int  # step proving A
    implication: int  # step proving A -> B


@dataclass(frozen=True)
class Nec:
    premise: int


@dataclass(frozen=True)
class Refl:
    premise: int


@dataclass(frozen=True)
class Taut:
    pass


Justification = Union[Axiom, Cs, Hyp, Mp, Nec, Refl, Taut]

Step = tuple[Formula, Justification]


@dataclass(frozen=True)
class Derivation:
    cs: ConstantSpecification = EMPTY_CS
    hypotheses: tuple[Formula, ...] = ()
    steps: tuple[Step, ...] = ()

    @property
    def conclusion(self) -> Formula:
        if not self.steps:
            raise ValueError("empty derivation has no conclusion")
        return self.steps[-1][0]


def taint_flags(d: Derivation) -> tuple[bool, ...]:
    """Per step: does it depend on a hypothesis (directly or through MP).

    Out-of-range references count as tainted; check() rejects them anyway.
    """
    flags: list[bool] = []
    for idx, (_, j) in enumerate(d.steps):
        n = idx + 1
        if isinstance(j, Hyp):
            flags.append(True)
        elif isinstance(j, Mp):
            def look(i: int) -> bool:
                return flags[i - 1] if 1 <= i < n else True
            flags.append(look(j.antecedent) or look(j.implication))
        else:
            flags.append(False)
    return tuple(flags)


@dataclass(frozen=True)
class CheckStats:
    steps: int
    axiom_instances: int


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    mode: str
    error: Optional[tuple[int, str]]  # (1-based step, reason)
    stats: CheckStats


def check(d: Derivation, mode: str = "strict") -> CheckReport:
    """Revalidate every step of d.  Reports the first failure, if any."""
    if mode not in ("strict", "extended"):
        raise ValueError(f"unknown mode {mode!r}")
    taint: list[bool] = []
    axioms = 0

    def fail(n: int, reason: str) -> CheckReport:
        return CheckReport(False, mode, (n, reason),
                           CheckStats(len(d.steps), axioms))

    def premise(n: int, i: int) -> Optional[Formula]:
        return d.steps[i - 1][0] if 1 <= i < n else None

    for idx, (f, j) in enumerate(d.steps):
        n = idx + 1
        if isinstance(j, Axiom):
            if match_schema(j.schema, f) is None:
                return fail(n, f"not an instance of {j.schema}")
            axioms += 1
            taint.append(False)
        elif isinstance(j, Cs):
            if not isinstance(f, Proves) or not isinstance(f.term, Const) \
                    or f.term.name != j.const:
                return fail(n, f"formula is not of the shape {j.const} : A")
            if not d.cs.covers(j.const, f.body):
                return fail(n, f"constant specification has no entry"
                               f" {j.const} : {print_formula(f.body)}")
            taint.append(False)
        elif isinstance(j, Hyp):
            if not 1 <= j.index <= len(d.hypotheses):
                return fail(n, f"hypothesis {j.index} does not exist")
            if f != d.hypotheses[j.index - 1]:
                return fail(n, f"formula differs from hypothesis {j.index}")
            taint.append(True)
        elif isinstance(j, Mp):
            fa = premise(n, j.antecedent)
            fi = premise(n, j.implication)
            if fa is None or fi is None:
                return fail(n, "MP references a later or missing step")
            if not isinstance(fi, Impl) or fi.left != fa or fi.right != f:
                return fail(n, f"MP of steps {j.antecedent} and"
                               f" {j.implication} does not yield this formula")
            taint.append(taint[j.antecedent - 1] or taint[j.implication - 1])
        elif isinstance(j, Nec):
            fp = premise(n, j.premise)
            if fp is None:
                return fail(n, "NEC references a later or missing step")
            if f != Box(fp):
                return fail(n, f"formula is not the box of step {j.premise}")
            if taint[j.premise - 1]:
                return fail(n, "necessitation over hypothesis-tainted step")
            taint.append(False)
        elif isinstance(j, Refl):
            fp = premise(n, j.premise)
            if fp is None:
                return fail(n, "REFL references a later or missing step")
            if fp != Box(f):
                return fail(n, f"step {j.premise} is not the box of this"
                               " formula")
            if taint[j.premise - 1]:
                return fail(n, "reflection over hypothesis-tainted step")
            taint.append(False)
        elif isinstance(j, Taut):
            if mode != "extended":
                return fail(n, "TAUT steps are only allowed in extended mode")
            from .prop import is_tautology
            if not is_tautology(f):
                return fail(n, "not a propositional tautology")
            taint.append(False)
        else:
            return fail(n, f"unknown justification {j!r}")
    return CheckReport(True, mode, None, CheckStats(len(d.steps), axioms))


# --- derivation files ---------------------------------------------------------

class DerivationFormatError(ValueError):
    pass


def _format_just(j: Justification) -> str:
    if isinstance(j, Axiom):
        return f"AXIOM {j.schema}"
    if isinstance(j, Cs):
        return f"CS {j.const}"
    if isinstance(j, Hyp):
        return f"HYP {j.index}"
    if isinstance(j, Mp):
        return f"MP {j.antecedent} {j.implication}"
    if isinstance(j, Nec):
        return f"NEC {j.premise}"
    if isinstance(j, Refl):
        return f"REFL {j.premise}"
    if isinstance(j, Taut):
        return "TAUT"
    raise TypeError(f"bad justification: {j!r}")


def _parse_just(text: str, lineno: int) -> Justification:
    parts = text.split()
    def nat(k: str) -> int:
        if not k.isdigit():
            raise DerivationFormatError(
                f"line {lineno}: step reference {k!r} is not a number")
        return int(k)
    try:
        head = parts[0]
        if head == "AXIOM" and len(parts) == 2:
            try:
                return Axiom(AxiomSchemaId(parts[1]))
            except ValueError:
                raise DerivationFormatError(
                    f"line {lineno}: unknown axiom schema {parts[1]!r}")
        if head == "CS" and len(parts) == 2:
            return Cs(parts[1])
        if head == "HYP" and len(parts) == 2:
            return Hyp(nat(parts[1]))
        if head == "MP" and len(parts) == 3:
            return Mp(nat(parts[1]), nat(parts[2]))
        if head == "NEC" and len(parts) == 2:
            return Nec(nat(parts[1]))
        if head == "REFL" and len(parts) == 2:
            return Refl(nat(parts[1]))
        if head == "TAUT" and len(parts) == 1:
            return Taut()
    except IndexError:
        pass
    raise DerivationFormatError(f"line {lineno}: bad justification {text!r}")


def derivation_to_text(name: str, d: Derivation) -> str:
    lines = [f"DERIVATION {name}"]
    for const, f in d.cs.entries:
        lines.append(f"CS {const} : {print_formula(f)}")
    for h in d.hypotheses:
        lines.append(f"HYP {print_formula(h)}")
    for i, (f, j) in enumerate(d.steps, start=1):
        lines.append(f"STEP {i} {print_formula(f)} BY {_format_just(j)}")
    return "\n".join(lines) + "\n"


def derivations_to_text(blocks: list[tuple[str, Derivation]]) -> str:
    return "\n".join(derivation_to_text(name, d) for name, d in blocks)


def derivations_from_text(text: str) -> list[tuple[str, Derivation]]:
    """Parse one or more DERIVATION blocks.  Comments (#) are ignored."""
    blocks: list[tuple[str, Derivation]] = []
    name: Optional[str] = None
    cs_entries: list[tuple[str, Formula]] = []
    hyps: list[Formula] = []
    steps: list[Step] = []

    def close() -> None:
        nonlocal name, cs_entries, hyps, steps
        if name is not None:
            blocks.append((name, Derivation(
                ConstantSpecification(tuple(cs_entries)),
                tuple(hyps), tuple(steps))))
        name, cs_entries, hyps, steps = None, [], [], []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "DERIVATION":
            close()
            if not rest:
                raise DerivationFormatError(f"line {lineno}: missing name")
            name = rest
            continue
        if name is None:
            raise DerivationFormatError(
                f"line {lineno}: {key!r} before any DERIVATION header")
        if key == "CS":
            const, _, tail = rest.partition(" ")
            tail = tail.strip()
            if not tail.startswith(":"):
                raise DerivationFormatError(
                    f"line {lineno}: expected 'CS <const> : <formula>'")
            cs_entries.append((const, parse_formula(tail[1:])))
        elif key == "HYP":
            hyps.append(parse_formula(rest))
        elif key == "STEP":
            num, _, tail = rest.partition(" ")
            if not num.isdigit() or int(num) != len(steps) + 1:
                raise DerivationFormatError(
                    f"line {lineno}: expected step number {len(steps) + 1}")
            formula_text, sep, just_text = tail.rpartition(" BY ")
            if not sep:
                raise DerivationFormatError(
                    f"line {lineno}: missing 'BY <justification>'")
            steps.append((parse_formula(formula_text),
                          _parse_just(just_text.strip(), lineno)))
        else:
            raise DerivationFormatError(
                f"line {lineno}: unknown directive {key!r}")
    close()
    if not blocks:
        raise DerivationFormatError("no DERIVATION block found")
    return blocks
