"""Propositional reasoning: abstraction, tautology tests, proof compilation.

Formulas are abstracted by replacing every maximal boxed, proof-asserted
or atomic subformula with a fresh propositional atom; ``false`` and the
connectives stay.  Tautologies of the abstraction are decided by truth
tables and compiled into explicit derivations that use only the ten
classical schemas, KF, and modus ponens.

The compiler follows the textbook construction: under a truth
assignment each subformula (or its negation) is derived from literal
hypotheses, assignments are split atom by atom, and every hypothetical
step is removed with the deduction theorem (K1a/K1b).  Splitting is
lazy: a branch stops as soon as the remaining assignment already forces
the formula, which keeps chain-shaped tautologies linear instead of
exponential.  All construction goes through a single buffer that
deduplicates steps by formula, so shared subproofs are emitted once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from . import kernel
from .kernel import AxiomSchemaId as S
from .kernel import ConstantSpecification, Derivation, EMPTY_CS
from .syntax import (
    FALSE, And, Atom, Box, Falsum, Formula, Impl, Neg, Or, Proves,
    print_formula,
)


class NotATautologyError(ValueError):
    pass


class NotAConsequenceError(ValueError):
    pass


# --- abstraction -------------------------------------------------------------

@dataclass(frozen=True)
class Abstraction:
    """Propositional skeleton of a formula.

    ``mapping`` pairs each abstracted subformula with its fresh atom
    name, in first-traversal order; the map is injective both ways, so
    ``restore()`` reproduces the original formula exactly.
    """

    mapping: tuple[tuple[Formula, str], ...]
    skeleton: Formula

    def restore(self) -> Formula:
        inv = {name: orig for orig, name in self.mapping}
        return subst_atoms(self.skeleton, inv)


def subst_atoms(f: Formula, mapping: dict[str, Formula]) -> Formula:
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, Falsum):
        return f
    if isinstance(f, Neg):
        return Neg(subst_atoms(f.body, mapping))
    if isinstance(f, Box):
        return Box(subst_atoms(f.body, mapping))
    if isinstance(f, Proves):
        return Proves(f.term, subst_atoms(f.body, mapping))
    return type(f)(subst_atoms(f.left, mapping), subst_atoms(f.right, mapping))


def abstract(f: Formula) -> Abstraction:
    mapping: dict[Formula, str] = {}

    def go(g: Formula) -> Formula:
        if isinstance(g, Falsum):
            return g
        if isinstance(g, Neg):
            return Neg(go(g.body))
        if isinstance(g, (And, Or, Impl)):
            return type(g)(go(g.left), go(g.right))
        # Atom, Box or Proves: an abstraction unit
        if g not in mapping:
            mapping[g] = f"A{len(mapping) + 1}"
        return Atom(mapping[g])

    sk = go(f)
    return Abstraction(tuple(mapping.items()), sk)


def _skeleton_atoms(sk: Formula) -> list[str]:
    """Atom names in first-occurrence order."""
    seen: list[str] = []

    def go(g: Formula) -> None:
        if isinstance(g, Atom):
            if g.name not in seen:
                seen.append(g.name)
        elif isinstance(g, Neg):
            go(g.body)
        elif isinstance(g, (And, Or, Impl)):
            go(g.left)
            go(g.right)

    go(sk)
    return seen


def _eval(sk: Formula, env: dict[str, bool]) -> bool:
    if isinstance(sk, Atom):
        return env[sk.name]
    if isinstance(sk, Falsum):
        return False
    if isinstance(sk, Neg):
        return not _eval(sk.body, env)
    if isinstance(sk, And):
        return _eval(sk.left, env) and _eval(sk.right, env)
    if isinstance(sk, Or):
        return _eval(sk.left, env) or _eval(sk.right, env)
    if isinstance(sk, Impl):
        return (not _eval(sk.left, env)) or _eval(sk.right, env)
    raise TypeError(f"not a propositional skeleton: {sk!r}")


def _tv(sk: Formula, env: dict[str, bool]) -> Optional[bool]:
    """Three-valued evaluation under a partial assignment (None = open)."""
    if isinstance(sk, Atom):
        return env.get(sk.name)
    if isinstance(sk, Falsum):
        return False
    if isinstance(sk, Neg):
        v = _tv(sk.body, env)
        return None if v is None else not v
    a = _tv(sk.left, env)
    b = _tv(sk.right, env)
    if isinstance(sk, And):
        if a is False or b is False:
            return False
        return True if (a is True and b is True) else None
    if isinstance(sk, Or):
        if a is True or b is True:
            return True
        return False if (a is False and b is False) else None
    if isinstance(sk, Impl):
        if a is False or b is True:
            return True
        return False if (a is True and b is False) else None
    raise TypeError(f"not a propositional skeleton: {sk!r}")


def is_tautology(f: Formula) -> bool:
    sk = abstract(f).skeleton
    names = _skeleton_atoms(sk)
    return all(_eval(sk, dict(zip(names, bits)))
               for bits in itertools.product((False, True), repeat=len(names)))


# --- the proof buffer ---------------------------------------------------------

@dataclass
class _BufStep:
    formula: Formula
    just: tuple  # ("AX", schema id) | ("HYP",) | ("MP", i, j)
    deps: frozenset[Formula]  # hypotheses this step still rests on


class _Buf:
    """Append-only step store; emits deduplicate by formula.

    A step is reused only when its recorded hypotheses are a subset of
    what the new emit would depend on, so nothing ever silently picks up
    an extra hypothesis.
    """

    def __init__(self) -> None:
        self.steps: list[_BufStep] = []
        self.by_formula: dict[Formula, list[int]] = {}

    def _emit(self, f: Formula, just: tuple, deps: frozenset) -> int:
        for i in self.by_formula.get(f, ()):
            if self.steps[i].deps <= deps:
                return i
        self.steps.append(_BufStep(f, just, deps))
        i = len(self.steps) - 1
        self.by_formula.setdefault(f, []).append(i)
        return i

    def ax(self, sid: S, f: Formula) -> int:
        assert kernel.match_schema(sid, f) is not None, (sid, print_formula(f))
        return self._emit(f, ("AX", sid), frozenset())

    def hyp(self, f: Formula) -> int:
        return self._emit(f, ("HYP",), frozenset((f,)))

    def mp(self, ante: int, impl: int) -> int:
        fi = self.steps[ante].formula
        fj = self.steps[impl].formula
        assert isinstance(fj, Impl) and fj.left == fi, "malformed MP"
        return self._emit(fj.right, ("MP", ante, impl),
                          self.steps[ante].deps | self.steps[impl].deps)


def _identity(buf: _Buf, x: Formula) -> int:
    """x -> x from K1a and K1b alone."""
    xx = Impl(x, x)
    a1 = buf.ax(S.K1b, Impl(Impl(x, xx), Impl(Impl(x, Impl(xx, x)), xx)))
    a2 = buf.ax(S.K1a, Impl(x, xx))
    a3 = buf.mp(a2, a1)
    a4 = buf.ax(S.K1a, Impl(x, Impl(xx, x)))
    return buf.mp(a4, a3)


def _ded(buf: _Buf, root: int, a: Formula) -> int:
    """Deduction theorem: from a proof of F under hypothesis a, a -> F.

    Steps that never touch a are kept and wrapped with K1a; only the
    dependent spine is rebuilt (K1b for each MP, identity at the leaf).
    """
    memo: dict[int, int] = {}
    stack = [root]
    while stack:
        i = stack.pop()
        if i in memo:
            continue
        st = buf.steps[i]
        if a not in st.deps:
            k = buf.ax(S.K1a, Impl(st.formula, Impl(a, st.formula)))
            memo[i] = buf.mp(i, k)
            continue
        if st.just[0] == "HYP":  # the hypothesis a itself
            memo[i] = _identity(buf, a)
            continue
        _, pi, pj = st.just
        if pi in memo and pj in memo:
            c = buf.steps[pi].formula
            b = st.formula
            k1b = buf.ax(S.K1b, Impl(Impl(a, c),
                                     Impl(Impl(a, Impl(c, b)), Impl(a, b))))
            m = buf.mp(memo[pi], k1b)
            memo[i] = buf.mp(memo[pj], m)
        else:
            stack += [i, pi, pj]
    return memo[root]


def _explode(buf: _Buf, ib: int, inb: int, c: Formula) -> int:
    """From proofs of B and ~B, a proof of an arbitrary c (K1a/K7/K8)."""
    b = buf.steps[ib].formula
    nb = buf.steps[inb].formula
    assert nb == Neg(b), "explode premises must be a formula and its negation"
    nc = Neg(c)
    e2 = buf.mp(ib, buf.ax(S.K1a, Impl(b, Impl(nc, b))))
    e4 = buf.mp(inb, buf.ax(S.K1a, Impl(nb, Impl(nc, nb))))
    k7 = buf.ax(S.K7, Impl(Impl(nc, b), Impl(Impl(nc, nb), Neg(nc))))
    e6 = buf.mp(e4, buf.mp(e2, k7))
    return buf.mp(e6, buf.ax(S.K8, Impl(Neg(nc), c)))


def _dneg_intro(buf: _Buf, ig: int) -> int:
    g = buf.steps[ig].formula
    ng = Neg(g)
    s1 = buf.mp(ig, buf.ax(S.K1a, Impl(g, Impl(ng, g))))
    k7 = buf.ax(S.K7, Impl(Impl(ng, g), Impl(Impl(ng, ng), Neg(ng))))
    m = buf.mp(s1, k7)
    return buf.mp(_identity(buf, ng), m)


def _neg_false(buf: _Buf) -> int:
    nf = Neg(FALSE)
    i1 = _identity(buf, FALSE)
    i2 = buf.ax(S.KF, Impl(FALSE, nf))
    k7 = buf.ax(S.K7, Impl(Impl(FALSE, FALSE), Impl(Impl(FALSE, nf), nf)))
    return buf.mp(i2, buf.mp(i1, k7))


def _case_elim(buf: _Buf, ipos: int, ineg: int) -> int:
    """From A -> C and ~A -> C, conclude C."""
    fpos = buf.steps[ipos].formula
    fneg = buf.steps[ineg].formula
    assert isinstance(fpos, Impl) and fneg == Impl(Neg(fpos.left), fpos.right)
    a, c = fpos.left, fpos.right
    nc = Neg(c)
    h = buf.hyp(nc)
    w2 = buf.mp(h, buf.ax(S.K1a, Impl(nc, Impl(a, nc))))
    k7 = buf.ax(S.K7, Impl(Impl(a, c), Impl(Impl(a, nc), Neg(a))))
    w4 = buf.mp(w2, buf.mp(ipos, k7))
    w5 = buf.mp(w4, ineg)  # c, resting on ~c
    q1 = _ded(buf, w5, nc)  # ~c -> c
    k7b = buf.ax(S.K7, Impl(Impl(nc, c), Impl(Impl(nc, nc), Neg(nc))))
    w7 = buf.mp(_identity(buf, nc), buf.mp(q1, k7b))
    return buf.mp(w7, buf.ax(S.K8, Impl(Neg(nc), c)))


def _truth_line(buf: _Buf, f: Formula, env: dict[str, bool]) -> int:
    """Proof of f (when forced true) or ~f (forced false) from literals.

    Precondition: the partial assignment already determines f's value.
    """
    v = _tv(f, env)
    assert v is not None, "truth line needs a determined value"
    if isinstance(f, Atom):
        return buf.hyp(f if v else Neg(f))
    if isinstance(f, Falsum):
        return _neg_false(buf)
    if isinstance(f, Neg):
        sub = _truth_line(buf, f.body, env)
        return sub if v else _dneg_intro(buf, sub)
    if isinstance(f, Impl):
        g, h = f.left, f.right
        if v:
            if _tv(h, env) is True:
                ih = _truth_line(buf, h, env)
                return buf.mp(ih, buf.ax(S.K1a, Impl(h, f)))
            if isinstance(g, Falsum):
                return buf.ax(S.KF, f)
            ing = _truth_line(buf, g, env)  # ~g
            hg = buf.hyp(g)
            return _ded(buf, _explode(buf, hg, ing, h), g)
        ig = _truth_line(buf, g, env)
        inh = _truth_line(buf, h, env)  # ~h
        hyp = buf.hyp(f)
        w1 = _ded(buf, buf.mp(ig, hyp), f)  # (g -> h) -> h
        w2 = buf.mp(inh, buf.ax(S.K1a, Impl(Neg(h), Impl(f, Neg(h)))))
        k7 = buf.ax(S.K7, Impl(Impl(f, h), Impl(Impl(f, Neg(h)), Neg(f))))
        return buf.mp(w2, buf.mp(w1, k7))
    if isinstance(f, And):
        g, h = f.left, f.right
        if v:
            ig = _truth_line(buf, g, env)
            ih = _truth_line(buf, h, env)
            return buf.mp(ih, buf.mp(ig, buf.ax(S.K3, Impl(g, Impl(h, f)))))
        if _tv(g, env) is False:
            side, k4 = g, buf.ax(S.K4a, Impl(f, g))
        else:
            side, k4 = h, buf.ax(S.K4b, Impl(f, h))
        ins = _truth_line(buf, side, env)  # ~side
        w = buf.mp(ins, buf.ax(S.K1a, Impl(Neg(side), Impl(f, Neg(side)))))
        k7 = buf.ax(S.K7, Impl(Impl(f, side),
                               Impl(Impl(f, Neg(side)), Neg(f))))
        return buf.mp(w, buf.mp(k4, k7))
    if isinstance(f, Or):
        g, h = f.left, f.right
        if v:
            if _tv(g, env) is True:
                return buf.mp(_truth_line(buf, g, env),
                              buf.ax(S.K5a, Impl(g, f)))
            return buf.mp(_truth_line(buf, h, env),
                          buf.ax(S.K5b, Impl(h, f)))
        ing = _truth_line(buf, g, env)  # ~g
        if isinstance(h, Falsum):
            hg = buf.ax(S.KF, Impl(h, g))
        else:
            inh = _truth_line(buf, h, env)  # ~h
            hh = buf.hyp(h)
            hg = _ded(buf, _explode(buf, hh, inh, g), h)  # h -> g
        k6 = buf.ax(S.K6, Impl(Impl(g, g), Impl(Impl(h, g), Impl(f, g))))
        org = buf.mp(hg, buf.mp(_identity(buf, g), k6))  # (g | h) -> g
        w = buf.mp(ing, buf.ax(S.K1a, Impl(Neg(g), Impl(f, Neg(g)))))
        k7 = buf.ax(S.K7, Impl(Impl(f, g), Impl(Impl(f, Neg(g)), Neg(f))))
        return buf.mp(w, buf.mp(org, k7))
    raise TypeError(f"not a propositional skeleton: {f!r}")


def _prove_skeleton(buf: _Buf, sk: Formula) -> int:
    """Hypothesis-free proof of a tautological skeleton."""
    order = _skeleton_atoms(sk)

    def rec(env: dict[str, bool]) -> int:
        if _tv(sk, env) is True:
            return _truth_line(buf, sk, env)
        name = next(n for n in order if n not in env)
        a = Atom(name)
        ipos = rec({**env, name: True})
        ineg = rec({**env, name: False})
        return _case_elim(buf, _ded(buf, ipos, a), _ded(buf, ineg, Neg(a)))

    return rec({})


def _extract(buf: _Buf, root: int, hypotheses: tuple[Formula, ...],
             inv: dict[str, Formula]) -> Derivation:
    """Reachable steps, renumbered, with skeleton atoms substituted back."""
    need: set[int] = set()
    stack = [root]
    while stack:
        i = stack.pop()
        if i in need:
            continue
        need.add(i)
        j = buf.steps[i].just
        if j[0] == "MP":
            stack += [j[1], j[2]]
    remap: dict[int, int] = {}
    out: list[kernel.Step] = []
    for i in sorted(need):
        st = buf.steps[i]
        f = subst_atoms(st.formula, inv)
        if st.just[0] == "AX":
            just: kernel.Justification = kernel.Axiom(st.just[1])
        elif st.just[0] == "HYP":
            just = kernel.Hyp(hypotheses.index(f) + 1)
        else:
            just = kernel.Mp(remap[st.just[1]], remap[st.just[2]])
        out.append((f, just))
        remap[i] = len(out)
    return Derivation(EMPTY_CS, hypotheses, tuple(out))


# --- entry points -------------------------------------------------------------

def compile_tautology(f: Formula) -> Derivation:
    """Hypothesis-free derivation of f from the classical schemas and MP."""
    ab = abstract(f)
    if not is_tautology(f):
        raise NotATautologyError(print_formula(f))
    buf = _Buf()
    root = _prove_skeleton(buf, ab.skeleton)
    assert not buf.steps[root].deps, "tautology proof kept a hypothesis"
    inv = {name: orig for orig, name in ab.mapping}
    return _extract(buf, root, (), inv)


def compile_consequence(premises: Iterable[Formula],
                        conclusion: Formula) -> Derivation:
    """Derivation of conclusion from premises (as hypotheses).

    The curried implication premises1 -> (... -> conclusion) must be a
    propositional tautology of the abstraction; it is compiled and then
    discharged against one Hyp step per premise.
    """
    prems = tuple(premises)
    curried = conclusion
    for p in reversed(prems):
        curried = Impl(p, curried)
    if not is_tautology(curried):
        raise NotAConsequenceError(
            f"{print_formula(conclusion)} is not a propositional consequence"
            " of the premises")
    ab = abstract(curried)
    buf = _Buf()
    cur = _prove_skeleton(buf, ab.skeleton)
    sk = ab.skeleton
    for _ in prems:
        assert isinstance(sk, Impl)
        cur = buf.mp(buf.hyp(sk.left), cur)
        sk = sk.right
    inv = {name: orig for orig, name in ab.mapping}
    return _extract(buf, cur, prems, inv)
