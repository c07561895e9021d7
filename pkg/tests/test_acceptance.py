"""Acceptance gate.

Each test below covers one published acceptance criterion and prints a
single PASS line; run with `pytest -v` to get one pass/fail line per
criterion.  Budgets count the shared corpus build time recorded by the
conftest fixture plus whatever the criterion itself spends.
"""

import itertools
import random
import time
from contextlib import contextmanager

import pytest

from gla.classify import (
    BOX_REFLECTION, CanonicalClass, OrderResult, canonicalize, compare,
)
from gla.cli import run
from gla.kernel import check
from gla.derive import lift
from gla.prop import compile_tautology, is_tautology
from gla.semantics import (
    find_countermodel, forces, linear_model, validate_frame,
)
from gla.syntax import (
    BOX_OP, FALSE, Generator, Impl, Proves, VarOp, box, is_box_only,
    parse_formula, print_formula,
)

from conftest import truth_table_tautology
from test_classify import all_shapes, shape_generator


@contextmanager
def criterion(number, title):
    try:
        yield
    except BaseException:
        print(f"CRITERION {number} FAIL: {title}")
        raise
    print(f"CRITERION {number} PASS: {title}")


def strict_ok(name, d, want):
    assert d.conclusion == want, \
        f"{name}: concluded {print_formula(d.conclusion)}"
    rep = check(d, mode="strict")
    assert rep.ok, f"{name}: step {rep.error[0]}: {rep.error[1]}"


def test_criterion_1_builder_sweep(acceptance_corpus):
    with criterion(1, "certificate builders over their full ranges,"
                      " strictly checked, under 60s"):
        sweep = acceptance_corpus["sweep1"]
        assert len(sweep) == 2 * 8 + 5 * 8 + 5
        t0 = time.perf_counter()
        for name, d, want in sweep:
            strict_ok(name, d, want)
        elapsed = (acceptance_corpus["build_seconds"]["sweep1"]
                   + time.perf_counter() - t0)
        assert elapsed < 60, f"took {elapsed:.1f}s"


def test_criterion_2_explicit_reflection_sweep(acceptance_corpus):
    with criterion(2, "theorem2 across every prefix up to length 5,"
                      " under 120s"):
        sweep = acceptance_corpus["sweep2"]
        assert len(sweep) == sum(2 ** n for n in range(6))  # empty included
        t0 = time.perf_counter()
        for name, d, want in sweep:
            strict_ok(name, d, want)
        elapsed = (acceptance_corpus["build_seconds"]["sweep2"]
                   + time.perf_counter() - t0)
        assert elapsed < 120, f"took {elapsed:.1f}s"


def test_criterion_3_internalization(acceptance_corpus):
    with criterion(3, "every hypothesis-free corpus derivation lifts,"
                      " ten members lift twice"):
        free = [(name, d)
                for name, d, _ in (acceptance_corpus["sweep1"]
                                   + acceptance_corpus["sweep2"])
                if not d.hypotheses]
        assert len(free) >= 100
        lifted_pairs = []
        for name, d in free:
            term, lifted = lift(d)
            assert lifted.conclusion == Proves(term, d.conclusion), name
            rep = check(lifted, mode="strict")
            assert rep.ok, (name, rep.error)
            lifted_pairs.append((name, d, lifted))
        # double lift a size-spread sample of the smaller half
        lifted_pairs.sort(key=lambda t: len(t[1].steps))
        half = len(lifted_pairs) // 2
        picks = [lifted_pairs[i * half // 10] for i in range(10)]
        assert len(picks) == 10
        for name, _, once in picks:
            term2, twice = lift(once)
            assert twice.conclusion == Proves(term2, once.conclusion), name
            assert check(twice, mode="strict").ok, name


def test_criterion_4_hierarchy_strictness():
    with criterion(4, "chain models separate consistency levels and the"
                      " hierarchy steps are refuted, under 30s"):
        t0 = time.perf_counter()
        for k in range(1, 11):
            m = linear_model(k)
            assert validate_frame(m) == []
            assert forces(m, 0, box(FALSE, k))
            assert not forces(m, 0, box(FALSE, k - 1))
        for k in range(1, 5):
            f = Impl(box(FALSE, k), box(FALSE, k - 1))
            hit = find_countermodel(f, k)
            assert hit is not None, print_formula(f)
            model, world = hit
            assert validate_frame(model) == []
            assert not forces(model, world, f)
        elapsed = time.perf_counter() - t0
        assert elapsed < 30, f"took {elapsed:.1f}s"


def test_criterion_5_classification_and_order():
    with criterion(5, "canonical classes match the shape oracle and the"
                      " order is a strict chain"):
        shapes = list(all_shapes(6))
        assert len(shapes) == 126
        for shape in shapes:
            want = (CanonicalClass(shape.index("v")) if "v" in shape
                    else BOX_REFLECTION)
            assert canonicalize(shape_generator(shape)) == want, shape
        chain = [Generator((BOX_OP,) * k + (VarOp("u"),), "P")
                 for k in range(0, 9)]
        chain.append(Generator((BOX_OP,), "P"))
        for i, gi in enumerate(chain):
            for j, gj in enumerate(chain):
                want = (OrderResult.EQUAL if i == j
                        else OrderResult.STRICTLY_LESS if i < j
                        else OrderResult.STRICTLY_GREATER)
                assert compare(gi, gj) == want, (i, j)


def test_criterion_6_propositional_compiler(prop_sweep):
    with criterion(6, "200 random formulas agree with truth tables and"
                      " all tautologies compile, under 60s"):
        assert len(prop_sweep) == 200
        t0 = time.perf_counter()
        compiled = 0
        for f, verdict in prop_sweep:
            assert truth_table_tautology(f) is verdict
            assert is_tautology(f) is verdict, print_formula(f)
            if verdict:
                d = compile_tautology(f)
                assert d.conclusion == f and d.hypotheses == ()
                rep = check(d, mode="strict")
                assert rep.ok, (print_formula(f), rep.error)
                compiled += 1
        elapsed = time.perf_counter() - t0
        assert compiled > 0
        assert elapsed < 60, f"took {elapsed:.1f}s"


def test_criterion_7_no_refutable_conclusions(acceptance_corpus):
    with criterion(7, "countermodel search never refutes a checked"
                      " box-only conclusion"):
        targets = set()
        for name, d, _ in (acceptance_corpus["sweep1"]
                           + acceptance_corpus["sweep2"]):
            if not d.hypotheses and is_box_only(d.conclusion):
                targets.add(d.conclusion)
        assert targets
        for f in sorted(targets, key=print_formula):
            assert find_countermodel(f, 4) is None, print_formula(f)


def test_criterion_8_cli_round_trip(tmp_path):
    with criterion(8, "classify and verify-bundle agree for the nine"
                      " reference generators"):
        generators = (["u : P -> P"]
                      + [f"[]^{k} u : P -> P" for k in range(1, 5)]
                      + [f"[]^{n} P -> P" for n in range(1, 5)])
        assert len(generators) == 9
        for i, text in enumerate(generators):
            bundle = tmp_path / f"bundle{i}"
            assert run(["classify", text, "-o", str(bundle)]) == 0, text
            assert run(["verify-bundle", str(bundle)]) == 0, text
