import itertools

import pytest

from gla.semantics import (
    KripkeModel, ModelFormatError, NotBoxOnlyError, UnknownWorldError,
    find_countermodel, forces, linear_model, make_model, model_from_text,
    model_to_text, validate_frame,
)
from gla.syntax import (
    FALSE, And, Atom, Box, Falsum, Impl, Neg, Or, box, is_box_only,
    parse_formula,
)

pf = parse_formula


# ------------------------------------------------------------------ frames

def test_linear_model_is_a_strict_chain():
    m = linear_model(3)
    assert m.worlds == 3
    assert m.relation == frozenset({(0, 1), (0, 2), (1, 2)})
    assert validate_frame(m) == []


def test_validate_frame_reports_reflexive_pairs():
    m = make_model(2, {(0, 0), (0, 1)}, {})
    assert validate_frame(m) == ["reflexive pair (0, 0)"]


def test_validate_frame_reports_transitivity_gaps():
    m = make_model(3, {(0, 1), (1, 2)}, {})
    assert validate_frame(m) == [
        "missing (0, 2) although (0, 1) and (1, 2) are related"]


def test_make_model_rejects_out_of_range_pairs():
    with pytest.raises(ValueError):
        make_model(2, {(0, 5)}, {})
    with pytest.raises(ValueError):
        make_model(2, {(0, 1)}, {7: {"P"}})


# ----------------------------------------------------------------- forcing

def test_forcing_of_connectives():
    m = make_model(2, {(0, 1)}, {0: {"P"}, 1: {"Q"}})
    assert forces(m, 0, pf("P & ~Q"))
    assert forces(m, 1, pf("Q | P"))
    assert not forces(m, 1, pf("P"))
    assert forces(m, 0, pf("P -> P"))
    assert not forces(m, 0, pf("false"))


def test_box_quantifies_over_successors():
    m = make_model(3, {(0, 1), (0, 2), (1, 2)}, {1: {"P"}, 2: {"P"}})
    assert forces(m, 0, pf("[]P"))
    assert forces(m, 2, pf("[]P"))      # vacuously: no successors
    assert forces(m, 2, pf("[]false"))
    assert not forces(m, 0, pf("[]false"))


def test_forcing_rejects_proof_terms():
    m = linear_model(1)
    with pytest.raises(NotBoxOnlyError):
        forces(m, 0, pf("u : P -> P"))


def test_forcing_rejects_unknown_worlds():
    m = linear_model(2)
    with pytest.raises(UnknownWorldError):
        forces(m, 5, pf("P"))


@pytest.mark.parametrize("k", range(1, 11))
def test_linear_model_separates_consistency_levels(k):
    m = linear_model(k)
    assert validate_frame(m) == []
    assert forces(m, 0, box(FALSE, k))
    assert not forces(m, 0, box(FALSE, k - 1))


# ----------------------------------------------------------- countermodels

def test_reflection_fails_on_a_single_dead_end():
    hit = find_countermodel(pf("[]false -> false"), 4)
    assert hit is not None
    m, w = hit
    assert m.worlds == 1 and w == 0
    assert not forces(m, w, pf("[]false -> false"))


def test_search_returns_smallest_models_first():
    hit = find_countermodel(pf("[][]false -> []false"), 4)
    assert hit is not None
    m, w = hit
    assert m.worlds == 2   # needs one successor that still sees a world


def test_valid_principles_have_no_countermodel():
    for src in ["[]P -> [][]P",
                "[](P -> Q) -> []P -> []Q",
                "[]([]P -> P) -> []P",
                "[](P & Q) -> []P",
                "P -> P"]:
        assert find_countermodel(pf(src), 4) is None, src


def test_found_countermodels_really_refute():
    for src in ["[]P -> P", "P -> []P", "[]P -> []Q",
                "~[]false", "[]([]P | []~P) -> []P | []~P"]:
        hit = find_countermodel(pf(src), 4)
        assert hit is not None, src
        m, w = hit
        assert validate_frame(m) == []
        assert not forces(m, w, pf(src)), src


def test_search_respects_the_world_bound():
    f = Impl(box(FALSE, 3), box(FALSE, 2))
    assert find_countermodel(f, 2) is None
    hit = find_countermodel(f, 3)
    assert hit is not None and hit[0].worlds == 3


def test_search_rejects_proof_terms():
    with pytest.raises(NotBoxOnlyError):
        find_countermodel(pf("u : P -> P"), 2)


def test_search_is_deterministic():
    a = find_countermodel(pf("[]P -> P"), 4)
    b = find_countermodel(pf("[]P -> P"), 4)
    assert a == b


# ------------------------------------------------- brute-force cross-check

def eval_at(worlds, rel, val, w, f):
    """Straight recursive evaluation, independent of the library."""
    if isinstance(f, Atom):
        return f.name in val.get(w, set())
    if isinstance(f, Falsum):
        return False
    if isinstance(f, Neg):
        return not eval_at(worlds, rel, val, w, f.body)
    if isinstance(f, And):
        return (eval_at(worlds, rel, val, w, f.left)
                and eval_at(worlds, rel, val, w, f.right))
    if isinstance(f, Or):
        return (eval_at(worlds, rel, val, w, f.left)
                or eval_at(worlds, rel, val, w, f.right))
    if isinstance(f, Impl):
        return ((not eval_at(worlds, rel, val, w, f.left))
                or eval_at(worlds, rel, val, w, f.right))
    if isinstance(f, Box):
        return all(eval_at(worlds, rel, val, v, f.body)
                   for v in range(worlds) if (w, v) in rel)
    raise TypeError(f)


def all_frames(n):
    """Every irreflexive transitive relation on n labeled worlds."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        rel = {p for p, b in zip(pairs, bits) if b}
        if all((a, d) in rel
               for a, b in rel for c, d in rel if b == c):
            yield rel


def brute_force_refutable(f, max_worlds):
    names = sorted({a for a in _atom_names(f)})
    for n in range(1, max_worlds + 1):
        for rel in all_frames(n):
            for assignment in itertools.product(
                    *[[(w, a) for a in _subsets(names)] for w in range(n)]):
                val = {w: set(chosen) for w, chosen in assignment}
                for w in range(n):
                    if not eval_at(n, rel, val, w, f):
                        return True
    return False


def _subsets(names):
    out = []
    for r in range(len(names) + 1):
        out.extend(map(set, itertools.combinations(names, r)))
    return out


def _atom_names(f):
    if isinstance(f, Atom):
        return {f.name}
    if isinstance(f, (Falsum,)):
        return set()
    if isinstance(f, (Neg, Box)):
        return _atom_names(f.body)
    return _atom_names(f.left) | _atom_names(f.right)


@pytest.mark.parametrize("src", [
    "[]P -> P", "P -> []P", "[]P -> [][]P", "[][]P -> []P",
    "~[]false", "[]false -> false", "[][]false -> []false",
    "[]([]P -> P) -> []P", "[]P | ~[]P", "[](P -> P)",
    "[]P -> []Q", "[](P & Q) -> []P & []Q",
])
def test_search_agrees_with_exhaustive_enumeration(src):
    f = pf(src)
    ours = find_countermodel(f, 3) is not None
    brute = brute_force_refutable(f, 3)
    assert ours is brute, src


def test_no_countermodel_for_compiled_box_only_conclusions(small_corpus):
    from gla.kernel import check
    seen = set()
    for name, d in small_corpus:
        if d.hypotheses or not is_box_only(d.conclusion):
            continue
        if d.conclusion in seen:
            continue
        seen.add(d.conclusion)
        assert check(d).ok, name
        assert find_countermodel(d.conclusion, 5) is None, name
    assert seen


# ------------------------------------------------------------- file format

def test_model_text_round_trip():
    m = make_model(3, {(0, 1), (0, 2), (1, 2)}, {0: {"P"}, 2: {"P", "Q"}})
    name, back = model_from_text(model_to_text("demo", m))
    assert name == "demo" and back == m


def test_model_text_is_stable():
    m = linear_model(3)
    text = model_to_text("lin", m)
    assert text == model_to_text("lin", model_from_text(text)[1])


def test_model_text_tolerates_comments():
    text = "# frame first\nMODEL m\nWORLDS 2\nREL 0 1\n\nVAL 1 P\n"
    name, m = model_from_text(text)
    assert m == make_model(2, {(0, 1)}, {1: {"P"}})


@pytest.mark.parametrize("text", [
    "WORLDS 2",                         # no header
    "MODEL m\nREL 0 1",                 # relation before WORLDS
    "MODEL m\nWORLDS 2\nREL 0 5",       # out of range
    "MODEL m\nWORLDS 2\nVAL 9 P",
    "MODEL m\nWORLDS two",
    "MODEL m\nWORLDS 1\nWAT 3",
])
def test_malformed_model_text_is_rejected(text):
    with pytest.raises(ModelFormatError):
        model_from_text(text)
