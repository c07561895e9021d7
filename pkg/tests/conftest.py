"""Shared corpora for the test suite.

The expensive sweeps (every builder over its full parameter range, all
theorem2 prefixes up to length 5) are built once per session; their
build times are recorded so the acceptance tests can count them toward
the stated budgets.
"""

from __future__ import annotations

import itertools
import random
import time

import pytest

from gla import (
    box_mono, build_lemma2a, build_lemma2b, build_theorem1, build_theorem2,
    build_theorem6, compile_tautology, distribute_box, distribute_impl,
    make_model,
)
from gla.syntax import (
    BOX_OP, FALSE, And, Atom, Box, BoxOp, Falsum, Impl, Neg, Or, Proves, Var,
    VarOp, box, fold_prefix,
)

VAR_POOL = ("v", "w", "x", "y", "z")


def prefixes_upto(max_len: int):
    """All BoxOp/VarOp prefixes of length <= max_len, variables auto-named."""
    for length in range(0, max_len + 1):
        for bits in itertools.product((0, 1), repeat=length):
            names = iter(VAR_POOL)
            yield tuple(BOX_OP if b else VarOp(next(names)) for b in bits)


def prefix_label(prefix) -> str:
    return "".join("b" if isinstance(op, BoxOp) else "v"
                   for op in prefix) or "empty"


@pytest.fixture(scope="session")
def acceptance_corpus():
    """(name, derivation, expected conclusion) triples plus build times."""
    p, q = Atom("P"), Atom("Q")
    up = Proves(Var("u"), p)

    t0 = time.perf_counter()
    sweep1 = []
    for n in range(1, 9):
        pair = build_theorem1(n)
        sweep1.append((f"theorem1_forward_{n}", pair.forward,
                       Impl(Box(p), box(p, n))))
        sweep1.append((f"theorem1_backward_{n}", pair.backward,
                       Impl(box(p, n), p)))
    for k in range(1, 9):
        sweep1.append((f"theorem6_{k}", build_theorem6(k),
                       Impl(Neg(box(FALSE, k)), Impl(box(up, k), p))))
        sweep1.append((f"lemma2a_{k}", build_lemma2a(k),
                       Impl(box(FALSE, k - 1), box(FALSE, k))))
        sweep1.append((f"lemma2b_{k}", build_lemma2b(k), Neg(box(FALSE, k))))
        sweep1.append((f"box_mono_{k}", box_mono(p, k),
                       Impl(Box(p), box(p, k))))
        sweep1.append((f"distribute_impl_{k}", distribute_impl(k, p, q),
                       Impl(box(Impl(p, q), k),
                            Impl(box(p, k), box(q, k)))))
    for m in range(1, 6):
        sweep1.append((f"distribute_box_{m}",
                       distribute_box(compile_tautology(Impl(p, p)), m),
                       Impl(box(p, m), box(p, m))))
    sweep1_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    sweep2 = []
    for prefix in prefixes_upto(5):
        sweep2.append((f"theorem2_{prefix_label(prefix)}",
                       build_theorem2(prefix, "u"),
                       Impl(Proves(Var("u"), fold_prefix(prefix, p)), p)))
    sweep2_seconds = time.perf_counter() - t0

    return {
        "sweep1": sweep1,
        "sweep2": sweep2,
        "build_seconds": {"sweep1": sweep1_seconds,
                          "sweep2": sweep2_seconds},
    }


@pytest.fixture(scope="session")
def small_corpus():
    """A fast cross-section of builder output for unit-level checks."""
    p, q = Atom("P"), Atom("Q")
    out = []
    for n in (1, 2, 3):
        pair = build_theorem1(n)
        out.append((f"theorem1_forward_{n}", pair.forward))
        out.append((f"theorem1_backward_{n}", pair.backward))
        out.append((f"box_mono_{n}", box_mono(p, n)))
        out.append((f"lemma2a_{n}", build_lemma2a(n)))
        out.append((f"lemma2b_{n}", build_lemma2b(n)))
        out.append((f"distribute_impl_{n}", distribute_impl(n, p, q)))
    for prefix in [(), (BOX_OP,), (VarOp("v"),), (BOX_OP, VarOp("v")),
                   (VarOp("v"), BOX_OP)]:
        out.append((f"theorem2_{prefix_label(prefix)}",
                    build_theorem2(prefix, "u")))
    return out


def random_prop_formula(rng: random.Random, atom_names, max_size: int):
    """A propositional formula over the given atoms; no modal operators."""
    if max_size <= 1:
        if rng.random() < 0.15:
            return FALSE
        return Atom(rng.choice(atom_names))
    shape = rng.randrange(4)
    if shape == 0:
        return Neg(random_prop_formula(rng, atom_names, max_size - 1))
    left_size = rng.randint(1, max_size - 1)
    left = random_prop_formula(rng, atom_names, left_size)
    right = random_prop_formula(rng, atom_names, max_size - left_size)
    return (And, Or, Impl)[shape - 1](left, right)


def truth_table_tautology(f) -> bool:
    """Plain truth-table oracle for formulas without Box or Proves."""
    names = sorted(_prop_atoms(f))
    for bits in itertools.product((False, True), repeat=len(names)):
        if not _prop_eval(f, dict(zip(names, bits))):
            return False
    return True


def _prop_atoms(f):
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, Falsum):
        return set()
    if isinstance(f, Neg):
        return _prop_atoms(f.body)
    return _prop_atoms(f.left) | _prop_atoms(f.right)


def _prop_eval(f, env) -> bool:
    if isinstance(f, Atom):
        return env[f.name]
    if isinstance(f, Falsum):
        return False
    if isinstance(f, Neg):
        return not _prop_eval(f.body, env)
    if isinstance(f, And):
        return _prop_eval(f.left, env) and _prop_eval(f.right, env)
    if isinstance(f, Or):
        return _prop_eval(f.left, env) or _prop_eval(f.right, env)
    if isinstance(f, Impl):
        return (not _prop_eval(f.left, env)) or _prop_eval(f.right, env)
    raise TypeError(f"not propositional: {f!r}")


@pytest.fixture(scope="session")
def prop_sweep():
    """200 seeded random propositional formulas with oracle verdicts."""
    rng = random.Random(20240817)
    atoms = ("P", "Q", "R", "S")
    out = []
    while len(out) < 200:
        f = random_prop_formula(rng, atoms, rng.randint(1, 14))
        out.append((f, truth_table_tautology(f)))
    return out


def random_gl_models(seed: int, count: int, max_worlds: int, atom_names):
    """Seeded irreflexive transitive models with random valuations."""
    rng = random.Random(seed)
    models = []
    for _ in range(count):
        n = rng.randint(1, max_worlds)
        rel = {(i, j) for i in range(n) for j in range(i + 1, n)
               if rng.random() < 0.4}
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c, d in list(rel):
                    if b == c and (a, d) not in rel:
                        rel.add((a, d))
                        changed = True
        val = {w: {a for a in atom_names if rng.random() < 0.5}
               for w in range(n)}
        models.append(make_model(n, rel, val))
    return models
