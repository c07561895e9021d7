"""Object language: proof terms, formulas, and reflection generators.

The language has two sorts.  Proof terms are built from variables
(``u``, ``v1``, ...), constants (``a``, ``c1000``, ...), application
``s * t``, sum ``s + t``, and proof checking ``!t``.  Formulas are built
from atoms (``P``, ``Q2``, ...), ``false``, negation ``~``, the binary
connectives ``&``, ``|``, ``->``, the provability modality ``[]``, and
the explicit-proof assertion ``t : F``.

Concrete grammar (prefix operators nest to the right; ``->``, ``&`` and
``|`` associate to the right; ``*`` and ``+`` to the left)::

    formula := or ('->' formula)?
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '~' unary | '[]' unary | '[]^' NAT unary
             | term ':' unary | primary
    primary := ATOM | 'false' | '(' formula ')'
    term    := tapp ('+' tapp)*
    tapp    := tunary ('*' tunary)*
    tunary  := '!' tunary | VAR | CONST | '(' term ')'

``[]^n`` is input sugar for an n-fold box and never appears in printed
output.  Printing is canonical: minimal parentheses, single spaces
around infix operators, and ``parse(print(f)) == f`` for every formula.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Union


def _cache_hash(cls):
    """Compute each node's hash once.

    Derivations index thousands of steps by formula; the generated
    dataclass hash walks the whole tree on every lookup, which turns
    quadratic on the box towers the builders produce.
    """
    names = tuple(cls.__dataclass_fields__)

    def __hash__(self):  # noqa: N807 - replacing the generated slot
        try:
            return self._hash
        except AttributeError:
            h = hash((cls.__name__,)
                     + tuple(getattr(self, f) for f in names))
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = __hash__
    return cls


# --- terms -----------------------------------------------------------------

@_cache_hash
@dataclass(frozen=True)
class Var:
    name: str


@_cache_hash
@dataclass(frozen=True)
class Const:
    name: str


@_cache_hash
@dataclass(frozen=True)
class App:
    """Application ``left * right``: apply a proof of an implication."""

    left: "Term"
    right: "Term"


@_cache_hash
@dataclass(frozen=True)
class Sum:
    """Sum ``left + right``: a proof of anything either side proves."""

    left: "Term"
    right: "Term"


@_cache_hash
@dataclass(frozen=True)
class Check:
    """Proof checker ``!inner``: a proof that ``inner`` proves what it does."""

    inner: "Term"


Term = Union[Var, Const, App, Sum, Check]


# --- formulas --------------------------------------------------------------

@_cache_hash
@dataclass(frozen=True)
class Atom:
    name: str


@_cache_hash
@dataclass(frozen=True)
class Falsum:
    pass


@_cache_hash
@dataclass(frozen=True)
class Neg:
    body: "Formula"


@_cache_hash
@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@_cache_hash
@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@_cache_hash
@dataclass(frozen=True)
class Impl:
    left: "Formula"
    right: "Formula"


@_cache_hash
@dataclass(frozen=True)
class Box:
    body: "Formula"


@_cache_hash
@dataclass(frozen=True)
class Proves:
    """``term : body`` -- the term is a proof of the body."""

    term: Term
    body: "Formula"


Formula = Union[Atom, Falsum, Neg, And, Or, Impl, Box, Proves]

FALSE = Falsum()


def box(f: Formula, n: int = 1) -> Formula:
    """n-fold box of f.  n = 0 returns f itself."""
    if n < 0:
        raise ValueError("box count must be >= 0")
    for _ in range(n):
        f = Box(f)
    return f


def strip_boxes(f: Formula) -> tuple[int, Formula]:
    """Split f into its leading run of boxes and the remainder."""
    n = 0
    while isinstance(f, Box):
        n += 1
        f = f.body
    return n, f


def box_depth(f: Formula) -> int:
    """Maximal nesting depth of [] anywhere in f."""
    if isinstance(f, (Atom, Falsum)):
        return 0
    if isinstance(f, Box):
        return 1 + box_depth(f.body)
    if isinstance(f, (Neg, Proves)):
        return box_depth(f.body)
    return max(box_depth(f.left), box_depth(f.right))


def atoms(f: Formula) -> set[str]:
    """Names of all atoms occurring in f."""
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            out.add(g.name)
        elif isinstance(g, (Neg, Box)):
            stack.append(g.body)
        elif isinstance(g, Proves):
            stack.append(g.body)
        elif isinstance(g, (And, Or, Impl)):
            stack.extend((g.left, g.right))
    return out


def subterms(f: Formula) -> set[Term]:
    """All proof terms occurring in f, including their sub-terms."""
    found: set[Term] = set()

    def walk_term(t: Term) -> None:
        found.add(t)
        if isinstance(t, (App, Sum)):
            walk_term(t.left)
            walk_term(t.right)
        elif isinstance(t, Check):
            walk_term(t.inner)

    def walk(g: Formula) -> None:
        if isinstance(g, (Neg, Box)):
            walk(g.body)
        elif isinstance(g, (And, Or, Impl)):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, Proves):
            walk_term(g.term)
            walk(g.body)

    walk(f)
    return found


def constants(f: Formula) -> set[str]:
    """Names of all proof constants occurring in f."""
    return {t.name for t in subterms(f) if isinstance(t, Const)}


def is_box_only(f: Formula) -> bool:
    """True when f contains no proof-term assertion (pure modal formula)."""
    if isinstance(f, Proves):
        return False
    if isinstance(f, (Atom, Falsum)):
        return True
    if isinstance(f, (Neg, Box)):
        return is_box_only(f.body)
    return is_box_only(f.left) and is_box_only(f.right)


# --- printing --------------------------------------------------------------

# Formula precedence: -> is 0, | is 1, & is 2, prefix operators 3, atoms 4.
# Term precedence: + is 0, * is 1, ! and leaves 2.

def _fmt_term(t: Term, floor: int) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Check):
        return "!" + _fmt_term(t.inner, 2)
    if isinstance(t, App):
        txt = _fmt_term(t.left, 1) + " * " + _fmt_term(t.right, 2)
        return "(" + txt + ")" if floor > 1 else txt
    if isinstance(t, Sum):
        txt = _fmt_term(t.left, 0) + " + " + _fmt_term(t.right, 1)
        return "(" + txt + ")" if floor > 0 else txt
    raise TypeError(f"not a term: {t!r}")


def _fmt(f: Formula, floor: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Falsum):
        return "false"
    if isinstance(f, Neg):
        return "~" + _fmt(f.body, 3)
    if isinstance(f, Box):
        return "[]" + _fmt(f.body, 3)
    if isinstance(f, Proves):
        return _fmt_term(f.term, 0) + " : " + _fmt(f.body, 3)
    if isinstance(f, And):
        txt = _fmt(f.left, 3) + " & " + _fmt(f.right, 2)
        return "(" + txt + ")" if floor > 2 else txt
    if isinstance(f, Or):
        txt = _fmt(f.left, 2) + " | " + _fmt(f.right, 1)
        return "(" + txt + ")" if floor > 1 else txt
    if isinstance(f, Impl):
        txt = _fmt(f.left, 1) + " -> " + _fmt(f.right, 0)
        return "(" + txt + ")" if floor > 0 else txt
    raise TypeError(f"not a formula: {f!r}")


def print_term(t: Term) -> str:
    return _fmt_term(t, 0)


def print_formula(f: Formula) -> str:
    return _fmt(f, 0)


# --- lexing ----------------------------------------------------------------

class ParseError(ValueError):
    """Rejected input, with the byte offset where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


_TOKEN = re.compile(
    r"\s*(?:(?P<punct>->|\[\]|[~&|:()+*!^])"
    r"|(?P<nat>[0-9]+)"
    r"|(?P<word>[A-Za-z][A-Za-z0-9]*))")


class _Token(NamedTuple):
    kind: str  # punctuation itself, or ATOM / VAR / CONST / NAT / FALSE / END
    text: str
    pos: int


def _lex(src: str) -> list[_Token]:
    out = []
    i, n = 0, len(src)
    while i < n:
        m = _TOKEN.match(src, i)
        if m is None or m.lastgroup is None:
            j = m.end() if m is not None else i
            while j < n and src[j].isspace():
                j += 1
            if j >= n:
                break  # trailing whitespace
            raise ParseError(f"unexpected character {src[j]!r}", j)
        group = m.lastgroup
        text = m.group(group)
        pos = m.start(group)
        if group == "punct":
            out.append(_Token(text, text, pos))
        elif group == "nat":
            out.append(_Token("NAT", text, pos))
        else:
            head = text[0]
            if text == "false":
                kind = "FALSE"
            elif head.isupper():
                kind = "ATOM"
            elif head in "uvwxyz" and (len(text) == 1 or text[1:].isdigit()):
                kind = "VAR"
            elif head in "abcde" and (len(text) == 1 or text[1:].isdigit()):
                kind = "CONST"
            else:
                raise ParseError(
                    f"invalid name {text!r} (variables are u..z, constants a..e,"
                    " atoms start uppercase)", pos)
            out.append(_Token(kind, text, pos))
        i = m.end()
    out.append(_Token("END", "", n))
    return out


# --- parsing ---------------------------------------------------------------

class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _lex(src)
        self.i = 0
        self.match: dict[int, int] = {}
        stack: list[int] = []
        for idx, tok in enumerate(self.toks):
            if tok.kind == "(":
                stack.append(idx)
            elif tok.kind == ")" and stack:
                self.match[stack.pop()] = idx

    def peek(self) -> _Token:
        return self.toks[self.i]

    def take(self) -> _Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str, what: str) -> _Token:
        t = self.peek()
        if t.kind != kind:
            got = t.text or "end of input"
            raise ParseError(f"expected {what}, found {got!r}", t.pos)
        return self.take()

    # formulas

    def formula(self) -> Formula:
        left = self.disj()
        if self.peek().kind == "->":
            self.take()
            return Impl(left, self.formula())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.peek().kind == "|":
            self.take()
            parts.append(self.conj())
        f = parts[-1]
        for g in reversed(parts[:-1]):
            f = Or(g, f)
        return f

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek().kind == "&":
            self.take()
            parts.append(self.unary())
        f = parts[-1]
        for g in reversed(parts[:-1]):
            f = And(g, f)
        return f

    def unary(self) -> Formula:
        t = self.peek()
        if t.kind == "~":
            self.take()
            return Neg(self.unary())
        if t.kind == "[]":
            self.take()
            if self.peek().kind == "^":
                self.take()
                nat = self.expect("NAT", "a box count after '^'")
                return box(self.unary(), int(nat.text))
            return Box(self.unary())
        if t.kind in ("VAR", "CONST", "!"):
            term = self.term()
            self.expect(":", "':' after a proof term")
            return Proves(term, self.unary())
        if t.kind == "(":
            # A '(' here may open a parenthesized proof term ("(s * t) : F")
            # or a parenthesized formula.  The token after the matching ')'
            # usually settles which; only '*' and '+' leave both readings
            # open, and then the term attempt backtracks on failure.
            j = self.match.get(self.i)
            after = self.toks[j + 1].kind if j is not None else None
            if after == ":":
                term = self.term()
                self.expect(":", "':' after a proof term")
                return Proves(term, self.unary())
            if after in ("*", "+"):
                mark = self.i
                try:
                    term = self.term()
                    self.expect(":", "':' after a proof term")
                except ParseError:
                    self.i = mark
                    return self.primary()
                return Proves(term, self.unary())
            return self.primary()
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t.kind == "ATOM":
            return Atom(self.take().text)
        if t.kind == "FALSE":
            self.take()
            return FALSE
        if t.kind == "(":
            self.take()
            f = self.formula()
            self.expect(")", "')'")
            return f
        got = t.text or "end of input"
        raise ParseError(f"expected an atom, 'false', a prefix operator or '(',"
                         f" found {got!r}", t.pos)

    # terms

    def term(self) -> Term:
        t = self.tapp()
        while self.peek().kind == "+":
            self.take()
            t = Sum(t, self.tapp())
        return t

    def tapp(self) -> Term:
        t = self.tunary()
        while self.peek().kind == "*":
            self.take()
            t = App(t, self.tunary())
        return t

    def tunary(self) -> Term:
        t = self.peek()
        if t.kind == "!":
            self.take()
            return Check(self.tunary())
        if t.kind == "VAR":
            return Var(self.take().text)
        if t.kind == "CONST":
            return Const(self.take().text)
        if t.kind == "(":
            self.take()
            inner = self.term()
            self.expect(")", "')'")
            return inner
        got = t.text or "end of input"
        raise ParseError(f"expected a proof term, found {got!r}", t.pos)


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    end = p.peek()
    if end.kind != "END":
        raise ParseError(f"trailing input {end.text!r}", end.pos)
    return f


def parse_term(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    end = p.peek()
    if end.kind != "END":
        raise ParseError(f"trailing input {end.text!r}", end.pos)
    return t


# --- reflection generators -------------------------------------------------

@dataclass(frozen=True)
class BoxOp:
    pass


@dataclass(frozen=True)
class VarOp:
    name: str


PrefixOp = Union[BoxOp, VarOp]

BOX_OP = BoxOp()


class NotAGeneratorError(ValueError):
    """The formula is not of the shape Q1 Q2 ... Qm P -> P."""


class DuplicateVariableError(NotAGeneratorError):
    """A proof variable occurs twice in a generator prefix."""


@dataclass(frozen=True)
class Generator:
    """A reflection principle Q1 Q2 ... Qm P -> P.

    Each prefix operator is a box or a distinct proof variable; the
    target atom is the P on both sides.
    """

    prefix: tuple[PrefixOp, ...]
    target: str = "P"

    def __post_init__(self) -> None:
        if not self.prefix:
            raise NotAGeneratorError("generator prefix must be nonempty")
        seen = set()
        for op in self.prefix:
            if isinstance(op, VarOp):
                if op.name in seen:
                    raise DuplicateVariableError(
                        f"variable {op.name!r} occurs twice in the prefix")
                seen.add(op.name)

    def formula(self) -> Formula:
        return Impl(fold_prefix(self.prefix, Atom(self.target)),
                    Atom(self.target))


def fold_prefix(prefix: tuple[PrefixOp, ...], core: Formula) -> Formula:
    """Apply a prefix to a formula: Q1 (Q2 (... (Qm core)))."""
    f = core
    for op in reversed(prefix):
        f = Box(f) if isinstance(op, BoxOp) else Proves(Var(op.name), f)
    return f


def parse_generator(text: str) -> Generator:
    f = parse_formula(text)
    if not isinstance(f, Impl) or not isinstance(f.right, Atom):
        raise NotAGeneratorError(
            "a generator is an implication ending in an atom")
    target = f.right.name
    prefix: list[PrefixOp] = []
    body = f.left
    while not isinstance(body, Atom):
        if isinstance(body, Box):
            prefix.append(BOX_OP)
            body = body.body
        elif isinstance(body, Proves):
            if not isinstance(body.term, Var):
                raise NotAGeneratorError(
                    f"prefix operator {len(prefix) + 1} uses the compound proof"
                    f" term {print_term(body.term)!r}; only variables may"
                    " prefix a generator")
            prefix.append(VarOp(body.term.name))
            body = body.body
        else:
            raise NotAGeneratorError(
                f"prefix operator {len(prefix) + 1} is not a box or a proof"
                " variable")
    if body.name != target:
        raise NotAGeneratorError(
            f"prefix ends in atom {body.name!r} but the conclusion is"
            f" {target!r}")
    return Generator(tuple(prefix), target)


def print_generator(g: Generator) -> str:
    return print_formula(g.formula())
