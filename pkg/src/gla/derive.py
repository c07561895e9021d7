"""Builders that assemble checked derivations for the principle families.

Everything here goes through an Assembler, which grows a
hypothesis-free derivation step by step and reuses a step whenever the
same formula was already derived.  Propositional glue is delegated to
the compiler in prop; modal bookkeeping (pushing a derivation under a
box, monotonicity along iterated boxes) lives in the helpers below.

lift converts any hypothesis-free derivation into an explicit one: the
result proves t : F for a constructed term t whenever the input proved
F, at the price of fresh proof constants covering the axioms used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from . import kernel
from .kernel import ConstantSpecification, Derivation, EMPTY_CS
from .prop import compile_consequence, compile_tautology
from .syntax import (
    FALSE, App, Atom, BoxOp, Box, Check, Const, Formula, Impl, Neg,
    PrefixOp, Proves, Term, Var, VarOp, box, constants, fold_prefix,
    print_formula,
)


@dataclass(frozen=True)
class CertificatePair:
    """Two derivations certifying each half of an equivalence in strength."""
    forward: Derivation
    backward: Derivation
    note: str


class Assembler:
    """Accumulates a hypothesis-free derivation with formula-level reuse.

    Indices are 1-based, matching the kernel.  Reuse by formula is
    sound here because no step ever depends on a hypothesis.
    """

    def __init__(self, cs: ConstantSpecification = EMPTY_CS):
        self.cs = cs
        self.steps: list[kernel.Step] = []
        self._index: dict[Formula, int] = {}

    def formula(self, idx: int) -> Formula:
        return self.steps[idx - 1][0]

    def _emit(self, f: Formula, just: kernel.Justification) -> int:
        got = self._index.get(f)
        if got is not None:
            return got
        self.steps.append((f, just))
        self._index[f] = len(self.steps)
        return len(self.steps)

    def axiom(self, f: Formula) -> int:
        hit = kernel.match_axiom(f)
        if hit is None:
            raise ValueError(f"not an axiom instance: {print_formula(f)}")
        return self._emit(f, kernel.Axiom(hit[0]))

    def cs_step(self, const: str, body: Formula) -> int:
        f = Proves(Const(const), body)
        if not self.cs.covers(const, body):
            raise ValueError(f"constant specification has no entry for {const}")
        return self._emit(f, kernel.Cs(const))

    def mp(self, antecedent: int, implication: int) -> int:
        fi = self.formula(antecedent)
        fj = self.formula(implication)
        if not (isinstance(fj, Impl) and fj.left == fi):
            raise ValueError("steps do not compose by modus ponens")
        return self._emit(fj.right, kernel.Mp(antecedent, implication))

    def nec(self, premise: int) -> int:
        return self._emit(Box(self.formula(premise)), kernel.Nec(premise))

    def refl(self, premise: int) -> int:
        f = self.formula(premise)
        if not isinstance(f, Box):
            raise ValueError("reflection needs a boxed premise")
        return self._emit(f.body, kernel.Refl(premise))

    def include(self, d: Derivation) -> int:
        """Splice in a hypothesis-free derivation; returns its conclusion."""
        if d.hypotheses:
            raise ValueError("cannot include a derivation with hypotheses")
        if not d.steps:
            raise ValueError("cannot include an empty derivation")
        self.cs = self.cs.extend(d.cs.entries)
        remap: dict[int, int] = {}
        last = 0
        for i, (f, j) in enumerate(d.steps, start=1):
            if isinstance(j, kernel.Mp):
                j = kernel.Mp(remap[j.antecedent], remap[j.implication])
            elif isinstance(j, kernel.Nec):
                j = kernel.Nec(remap[j.premise])
            elif isinstance(j, kernel.Refl):
                j = kernel.Refl(remap[j.premise])
            elif isinstance(j, (kernel.Hyp, kernel.Taut)):
                raise ValueError("cannot include non-axiomatic steps")
            last = self._emit(f, j)
            remap[i] = last
        return last

    def tautology(self, f: Formula) -> int:
        return self.include(compile_tautology(f))

    def consequence(self, premises: Sequence[int], conclusion: Formula) -> int:
        """Close a propositional gap from already-derived steps."""
        curried = conclusion
        for i in reversed(premises):
            curried = Impl(self.formula(i), curried)
        cur = self.tautology(curried)
        for i in premises:
            cur = self.mp(i, cur)
        return cur

    def finish(self, conclusion: int) -> Derivation:
        # Reuse may leave the conclusion mid-buffer; restate it last.
        if conclusion != len(self.steps):
            f, j = self.steps[conclusion - 1]
            self.steps.append((f, j))
        return Derivation(self.cs, (), tuple(self.steps))


def distribute_box(d: Derivation, k: int) -> Derivation:
    """From a proof of A -> B, a proof of []^k A -> []^k B."""
    if k < 0:
        raise ValueError("box depth must be >= 0")
    if d.hypotheses:
        raise ValueError("distribution needs a hypothesis-free derivation")
    if not isinstance(d.conclusion, Impl):
        raise ValueError("distribution needs an implication conclusion")
    if k == 0:
        return d
    asm = Assembler()
    cur = asm.include(d)
    for _ in range(k):
        f = asm.formula(cur)
        assert isinstance(f, Impl)
        boxed = asm.nec(cur)
        dist = asm.axiom(Impl(Box(f), Impl(Box(f.left), Box(f.right))))
        cur = asm.mp(boxed, dist)
    return asm.finish(cur)


def box_mono(f: Formula, n: int) -> Derivation:
    """[]F -> []^n F, collapsing one box into any deeper stack."""
    if n < 1:
        raise ValueError("box depth must be >= 1")
    if n == 1:
        return compile_tautology(Impl(Box(f), Box(f)))
    asm = Assembler()
    cur = asm.axiom(Impl(Box(f), box(f, 2)))
    for i in range(2, n):
        g = box(f, i - 1)
        step = asm.axiom(Impl(Box(g), Box(Box(g))))
        cur = asm.consequence([cur, step], Impl(Box(f), box(f, i + 1)))
    return asm.finish(cur)


def distribute_impl(k: int, a: Formula, b: Formula) -> Derivation:
    """[]^k(A -> B) -> ([]^k A -> []^k B)."""
    if k < 1:
        raise ValueError("box depth must be >= 1")
    asm = Assembler()
    cur = asm.axiom(Impl(Box(Impl(a, b)), Impl(Box(a), Box(b))))
    for i in range(1, k):
        # Box the whole level-i implication, then squash the nested
        # consequent with one more distribution axiom.
        f = asm.formula(cur)
        assert isinstance(f, Impl)
        boxed = asm.mp(asm.nec(cur),
                       asm.axiom(Impl(Box(f),
                                      Impl(Box(f.left), Box(f.right)))))
        squash = asm.axiom(Impl(Box(Impl(box(a, i), box(b, i))),
                                Impl(box(a, i + 1), box(b, i + 1))))
        cur = asm.consequence(
            [boxed, squash],
            Impl(box(Impl(a, b), i + 1),
                 Impl(box(a, i + 1), box(b, i + 1))))
    return asm.finish(cur)


def build_theorem1(n: int, target: str = "P") -> CertificatePair:
    """Both halves of the collapse of []^n P -> P onto []P -> P."""
    if n < 1:
        raise ValueError("box depth must be >= 1")
    p = Atom(target)
    forward = box_mono(p, n)
    hyps = [Impl(box(p, i), box(p, i - 1)) for i in range(n, 0, -1)]
    backward = compile_consequence(hyps, Impl(box(p, n), p))
    note = (
        "forward: []P -> []^n P is outright, so any single instance"
        " []^n P -> P yields []P -> P by composition; backward:"
        " []^n P -> P follows from the n instances"
        " []^i P -> []^(i-1) P of []P -> P, carried as hypotheses.")
    return CertificatePair(forward, backward, note)


def _theorem2_into(asm: Assembler, prefix: tuple[PrefixOp, ...],
                   u: str, p: Atom) -> int:
    body = fold_prefix(prefix, p)
    x = Proves(Var(u), body)
    if not prefix:
        return asm.axiom(Impl(x, p))
    head = prefix[0]
    if isinstance(head, VarOp):
        peel = asm.axiom(Impl(x, body))
        rest = _theorem2_into(asm, prefix[1:], head.name, p)
        return asm.consequence([peel, rest], Impl(x, p))
    m = 0
    while m < len(prefix) and isinstance(prefix[m], BoxOp):
        m += 1
    tail = prefix[m:]
    f = fold_prefix(tail, p)
    # x is u : []^m f with the box run maximal, so tail is empty or
    # starts with a variable.
    s1 = asm.axiom(Impl(x, box(f, m)))
    s1 = asm.consequence([s1], Impl(Neg(box(f, m)), Neg(x)))
    s2 = asm.axiom(Impl(Neg(x), Box(Neg(x))))
    s3 = asm.include(
        distribute_box(compile_tautology(Impl(Neg(x), Impl(x, f))), 1))
    s4 = asm.consequence([s1, s2, s3],
                         Impl(Neg(box(f, m)), Box(Impl(x, f))))
    s5 = asm.include(box_mono(Impl(x, f), m))
    s6 = asm.consequence([s4, s5],
                         Impl(Neg(box(f, m)), box(Impl(x, f), m)))
    weaken = Assembler()
    weaken_idx = weaken.axiom(Impl(f, Impl(x, f)))
    s7 = asm.include(distribute_box(weaken.finish(weaken_idx), m))
    cur = asm.consequence([s6, s7], box(Impl(x, f), m))
    for _ in range(m):
        cur = asm.refl(cur)
    if not tail:
        return cur
    assert isinstance(tail[0], VarOp)
    rest = _theorem2_into(asm, tail[1:], tail[0].name, p)
    return asm.consequence([cur, rest], Impl(x, p))


def build_theorem2(prefix: Sequence[PrefixOp], u: str = "u",
                   target: str = "P") -> Derivation:
    """u : Q1 ... Qn P -> P without any constant specification.

    The prefix variables must be distinct and must not reuse the outer
    variable u.
    """
    prefix = tuple(prefix)
    names = [op.name for op in prefix if isinstance(op, VarOp)]
    if len(set(names)) != len(names):
        raise ValueError("prefix variables must be distinct")
    if u in names:
        raise ValueError(f"outer variable {u!r} reappears in the prefix")
    asm = Assembler()
    return asm.finish(_theorem2_into(asm, prefix, u, Atom(target)))


def build_theorem6(k: int, u: str = "u", target: str = "P") -> Derivation:
    """~[]^k false -> ([]^k u:P -> P)."""
    if k < 0:
        raise ValueError("box depth must be >= 0")
    p = Atom(target)
    up = Proves(Var(u), p)
    target = Impl(Neg(box(FALSE, k)), Impl(box(up, k), p))
    asm = Assembler()
    peel = asm.axiom(Impl(up, p))
    if k == 0:
        return asm.finish(asm.consequence([peel], target))
    contra = asm.consequence([peel], Impl(Neg(p), Neg(up)))
    stable = asm.axiom(Impl(Neg(up), Box(Neg(up))))
    deepen = asm.include(box_mono(Neg(up), k))
    rephrase = asm.include(distribute_box(
        compile_tautology(Impl(Neg(up), Impl(up, FALSE))), k))
    dist = asm.include(distribute_impl(k, up, FALSE))
    chain = asm.consequence(
        [contra, stable, deepen, rephrase, dist],
        Impl(Neg(p), Impl(box(up, k), box(FALSE, k))))
    return asm.finish(asm.consequence([chain], target))


def build_lemma2a(k: int) -> Derivation:
    """[]^(k-1) false -> []^k false, one link of the consistency chain."""
    if k < 1:
        raise ValueError("box depth must be >= 1")
    if k == 1:
        return compile_tautology(Impl(FALSE, Box(FALSE)))
    asm = Assembler()
    g = box(FALSE, k - 2)
    return asm.finish(asm.axiom(Impl(Box(g), Box(Box(g)))))


def build_lemma2b(k: int) -> Derivation:
    """~[]^k false from the k instances []^i false -> []^(i-1) false."""
    if k < 0:
        raise ValueError("box depth must be >= 0")
    hyps = [Impl(box(FALSE, i), box(FALSE, i - 1)) for i in range(k, 0, -1)]
    return compile_consequence(hyps, Neg(box(FALSE, k)))


def _fresh_constants(d: Derivation):
    used = set()
    for name, body in d.cs.entries:
        used.add(name)
        used |= constants(body)
    for f, _ in d.steps:
        used |= constants(f)
    counter = itertools.count(1000)

    def fresh() -> str:
        while True:
            name = f"c{next(counter)}"
            if name not in used:
                used.add(name)
                return name
    return fresh


def lift(d: Derivation) -> tuple[Term, Derivation]:
    """Realize a hypothesis-free derivation by an explicit proof term.

    Each step of the input is shadowed by a step proving t : F for a
    term t built from fresh constants.  Axioms get a constant outright;
    rule applications are internalized: application composes the two
    sides of a modus ponens, and the two reflection rules ride on
    constants certifying the corresponding connection axiom.
    """
    if d.hypotheses:
        raise ValueError("lift needs a hypothesis-free derivation")
    if not d.steps:
        raise ValueError("lift needs a nonempty derivation")
    report = kernel.check(d, mode="strict")
    if not report.ok:
        step, reason = report.error
        raise ValueError(f"input fails its own check: step {step}: {reason}")
    fresh = _fresh_constants(d)
    asm = Assembler(d.cs)
    terms: list[Term] = []
    lifted: list[int] = []
    for f, j in d.steps:
        if isinstance(j, kernel.Axiom):
            name = fresh()
            asm.cs = asm.cs.extend(((name, f),))
            idx = asm.cs_step(name, f)
            t: Term = Const(name)
        elif isinstance(j, kernel.Cs):
            assert isinstance(f, Proves)
            boost = asm.axiom(Impl(f, Proves(Check(f.term), f)))
            base = asm.cs_step(j.const, f.body)
            idx = asm.mp(base, boost)
            t = Check(f.term)
        elif isinstance(j, kernel.Mp):
            a = d.steps[j.antecedent - 1][0]
            s_term = terms[j.implication - 1]
            t_term = terms[j.antecedent - 1]
            compose = asm.axiom(Impl(
                Proves(s_term, Impl(a, f)),
                Impl(Proves(t_term, a), Proves(App(s_term, t_term), f))))
            half = asm.mp(lifted[j.implication - 1], compose)
            idx = asm.mp(lifted[j.antecedent - 1], half)
            t = App(s_term, t_term)
        elif isinstance(j, (kernel.Nec, kernel.Refl)):
            q = terms[j.premise - 1]
            a = d.steps[j.premise - 1][0]
            # q : A -> []A for necessitation, q : []A -> A for reflection;
            # either way the bridging axiom rides on a fresh constant.
            bridge = Impl(Proves(q, a), f)
            name = fresh()
            asm.cs = asm.cs.extend(((name, bridge),))
            raise_ = asm.axiom(Impl(Proves(q, a),
                                    Proves(Check(q), Proves(q, a))))
            banged = asm.mp(lifted[j.premise - 1], raise_)
            base = asm.cs_step(name, bridge)
            compose = asm.axiom(Impl(
                Proves(Const(name), bridge),
                Impl(Proves(Check(q), Proves(q, a)),
                     Proves(App(Const(name), Check(q)), f))))
            half = asm.mp(base, compose)
            idx = asm.mp(banged, half)
            t = App(Const(name), Check(q))
        else:
            raise ValueError(f"cannot lift a step justified by {j!r}")
        terms.append(t)
        lifted.append(idx)
    return terms[-1], asm.finish(lifted[-1])
