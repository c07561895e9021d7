"""Relational models for the box-only fragment.

A model is a finite set of worlds 0..n-1, an accessibility relation
that should be irreflexive and transitive, and a valuation assigning a
set of atoms to each world.  Forcing is standard; formulas containing a
proof-term assertion are rejected, since explicit proofs have no
relational reading here.

Countermodel search enumerates strict orders up to a world bound.
Every finite strict order can be relabeled so that the relation only
goes upward, so only subsets of {(i, j) : i < j} are tried, with a
best-effort canonical form to skip isomorphic duplicates.  Absence of a
countermodel within the bound is evidence, not a validity proof.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional

from .syntax import (
    And, Atom, Box, Falsum, Formula, Impl, Neg, Or, Proves, atoms,
    print_formula,
)


class NotBoxOnlyError(ValueError):
    """The formula mentions a proof term and has no relational semantics."""


class UnknownWorldError(ValueError):
    pass


@dataclass(frozen=True)
class KripkeModel:
    worlds: int
    relation: frozenset[tuple[int, int]]
    valuation: tuple[frozenset[str], ...]  # index = world

    def __post_init__(self) -> None:
        if self.worlds < 1:
            raise ValueError("a model needs at least one world")
        for i, j in self.relation:
            if not (0 <= i < self.worlds and 0 <= j < self.worlds):
                raise ValueError(f"relation pair ({i}, {j}) is out of range")
        if len(self.valuation) != self.worlds:
            raise ValueError("valuation must cover every world exactly once")

    def successors(self, w: int) -> list[int]:
        return sorted(j for i, j in self.relation if i == w)


def make_model(worlds: int, relation: Iterable[tuple[int, int]],
               valuation: Optional[dict[int, Iterable[str]]] = None) -> KripkeModel:
    val = valuation or {}
    for w in val:
        if not 0 <= w < worlds:
            raise ValueError(f"valuation mentions world {w},"
                             f" but worlds are 0..{worlds - 1}")
    return KripkeModel(
        worlds, frozenset(relation),
        tuple(frozenset(val.get(w, ())) for w in range(worlds)))


def validate_frame(m: KripkeModel) -> list[str]:
    """Frame-condition violations; empty iff irreflexive and transitive."""
    problems = []
    for i, j in sorted(m.relation):
        if i == j:
            problems.append(f"reflexive pair ({i}, {i})")
    for i, j in sorted(m.relation):
        for j2, k in sorted(m.relation):
            if j2 == j and (i, k) not in m.relation:
                problems.append(
                    f"missing ({i}, {k}) although ({i}, {j}) and ({j}, {k})"
                    " are related")
    return problems


def forces(m: KripkeModel, w: int, f: Formula) -> bool:
    if not 0 <= w < m.worlds:
        raise UnknownWorldError(f"world {w} is not in 0..{m.worlds - 1}")
    if isinstance(f, Proves):
        raise NotBoxOnlyError(
            f"{print_formula(f)} contains a proof-term assertion")
    if isinstance(f, Atom):
        return f.name in m.valuation[w]
    if isinstance(f, Falsum):
        return False
    if isinstance(f, Neg):
        return not forces(m, w, f.body)
    if isinstance(f, And):
        return forces(m, w, f.left) and forces(m, w, f.right)
    if isinstance(f, Or):
        return forces(m, w, f.left) or forces(m, w, f.right)
    if isinstance(f, Impl):
        return (not forces(m, w, f.left)) or forces(m, w, f.right)
    if isinstance(f, Box):
        return all(forces(m, v, f.body) for v in m.successors(w))
    raise TypeError(f"not a formula: {f!r}")


def linear_model(k: int) -> KripkeModel:
    """k worlds in a strict chain; world 0 is the root and sees all others."""
    if k < 1:
        raise ValueError("a linear model needs at least one world")
    rel = frozenset((i, j) for i in range(k) for j in range(i + 1, k))
    return KripkeModel(k, rel, tuple(frozenset() for _ in range(k)))


def _transitive(rel: frozenset[tuple[int, int]]) -> bool:
    return all((i, k) in rel
               for i, j in rel for j2, k in rel if j2 == j)


def _strict_orders(n: int) -> list[frozenset[tuple[int, int]]]:
    """Transitive subsets of the upward pairs, one per isomorphism class.

    Canonicalization is best effort: the minimum relabeling that keeps
    the relation upward.
    """
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    perms = list(itertools.permutations(range(n)))
    seen: set[tuple] = set()
    out = []
    for mask in range(1 << len(pairs)):
        rel = frozenset(p for b, p in enumerate(pairs) if mask >> b & 1)
        if not _transitive(rel):
            continue
        key = min(tuple(sorted((p[i], p[j]) for i, j in rel))
                  for p in perms if all(p[i] < p[j] for i, j in rel))
        if key in seen:
            continue
        seen.add(key)
        out.append(rel)
    return out


def find_countermodel(f: Formula, max_worlds: int = 4
                      ) -> Optional[tuple[KripkeModel, int]]:
    """Smallest-first search for a world refuting f.

    Returns (model, world) with the model's frame valid and f false at
    the world, or None if no refutation exists within the bound.
    """
    if max_worlds < 1:
        raise ValueError("world bound must be >= 1")
    names = sorted(atoms(f))
    subsets = [frozenset(c) for r in range(len(names) + 1)
               for c in itertools.combinations(names, r)]
    for n in range(1, max_worlds + 1):
        for rel in _strict_orders(n):
            for val in itertools.product(subsets, repeat=n):
                m = KripkeModel(n, rel, val)
                for w in range(n):
                    if not forces(m, w, f):
                        return m, w
    return None


# --- model files ---------------------------------------------------------------

class ModelFormatError(ValueError):
    pass


def model_to_text(name: str, m: KripkeModel) -> str:
    lines = [f"MODEL {name}", f"WORLDS {m.worlds}"]
    for i, j in sorted(m.relation):
        lines.append(f"REL {i} {j}")
    for w in range(m.worlds):
        for a in sorted(m.valuation[w]):
            lines.append(f"VAL {w} {a}")
    return "\n".join(lines) + "\n"


def model_from_text(text: str) -> tuple[str, KripkeModel]:
    name: Optional[str] = None
    worlds: Optional[int] = None
    rel: list[tuple[int, int]] = []
    val: dict[int, set[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        parts = rest.split()
        if key == "MODEL":
            if name is not None:
                raise ModelFormatError(f"line {lineno}: duplicate MODEL line")
            name = rest.strip()
        elif key == "WORLDS" and len(parts) == 1 and parts[0].isdigit():
            worlds = int(parts[0])
        elif key == "REL" and len(parts) == 2 \
                and all(p.isdigit() for p in parts):
            rel.append((int(parts[0]), int(parts[1])))
        elif key == "VAL" and len(parts) == 2 and parts[0].isdigit():
            val.setdefault(int(parts[0]), set()).add(parts[1])
        else:
            raise ModelFormatError(f"line {lineno}: bad directive {line!r}")
    if name is None or worlds is None:
        raise ModelFormatError("MODEL and WORLDS lines are required")
    try:
        return name, make_model(worlds, rel, val)
    except ValueError as exc:
        raise ModelFormatError(str(exc))
