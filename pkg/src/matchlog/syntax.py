"""First-order syntax: terms, atoms, Horn clauses, programs, and the text format.

Variables are canonical integer indices internally (printed X1, X2, ...).
Surface names from source text survive only as display metadata; they never
take part in equality. Constants are nullary functors, not a separate case.

The external format is Prolog-like, one clause per line or wrapped:

    nat(0).
    list(cons(X, Y)) :- nat(X), list(Y).   % comment to end of line

Predicates and functors match [a-z][A-Za-z0-9_]* (bare integers are allowed
as constant names), variables match [A-Z_][A-Za-z0-9_]*.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Union


class ParseError(Exception):
    """Malformed source text; carries a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ArityMismatchError(Exception):
    """A functor or predicate is used with two conflicting arities."""

    def __init__(self, symbol: str, first: int, second: int, role: str = "symbol") -> None:
        super().__init__(f"{role} '{symbol}' used with arity {first} and arity {second}")
        self.symbol = symbol
        self.arities = (first, second)


# ---------------------------------------------------------------------------
# Terms and atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """Variable with a 1-based index."""

    index: int


@dataclass(frozen=True)
class Fn:
    """Functor applied to argument terms; a constant has no arguments."""

    name: str
    args: tuple["Term", ...] = ()


Term = Union[Var, Fn]


@dataclass(frozen=True)
class Atom:
    """Predicate applied to terms; goals and clause heads are atoms."""

    pred: str
    args: tuple[Term, ...] = ()


def term_vars(t: Term) -> Iterator[int]:
    if isinstance(t, Var):
        yield t.index
    else:
        for a in t.args:
            yield from term_vars(a)


def atom_vars(a: Atom) -> Iterator[int]:
    for t in a.args:
        yield from term_vars(t)


def max_var(x: Term | Atom | Iterable[Atom]) -> int:
    """Largest variable index occurring in x, or 0 if x is ground."""
    if isinstance(x, (Var, Fn)):
        return max(term_vars(x), default=0)
    if isinstance(x, Atom):
        return max(atom_vars(x), default=0)
    return max((max_var(a) for a in x), default=0)


# ---------------------------------------------------------------------------
# Clauses and programs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Clause:
    """Horn clause ``head :- body``.

    Canonical numbering: head variables get 1..n by first occurrence in the
    head, body-only (existential) variables get n+1..n+k by first occurrence
    in the body. `var_names` keeps the surface spellings for display only.
    """

    head: Atom
    body: tuple[Atom, ...] = ()
    var_names: tuple[str, ...] | None = field(default=None, compare=False, repr=False)

    @cached_property
    def head_var_count(self) -> int:
        return len(set(atom_vars(self.head)))

    @cached_property
    def var_count(self) -> int:
        seen = set(atom_vars(self.head))
        for a in self.body:
            seen.update(atom_vars(a))
        return len(seen)

    @property
    def is_existential(self) -> bool:
        return self.var_count > self.head_var_count


def canonical_clause(head: Atom, body: Iterable[Atom],
                     names: Mapping[int, str] | None = None) -> Clause:
    """Renumber variables into canonical order (head first, then body)."""
    body = tuple(body)
    order: dict[int, int] = {}

    def visit(t: Term) -> None:
        if isinstance(t, Var):
            if t.index not in order:
                order[t.index] = len(order) + 1
        else:
            for a in t.args:
                visit(a)

    for t in head.args:
        visit(t)
    for a in body:
        for t in a.args:
            visit(t)

    def rename_term(t: Term) -> Term:
        if isinstance(t, Var):
            return Var(order[t.index])
        return Fn(t.name, tuple(rename_term(a) for a in t.args))

    def rename_atom(a: Atom) -> Atom:
        return Atom(a.pred, tuple(rename_term(t) for t in a.args))

    var_names = None
    if names is not None:
        by_new = sorted(order.items(), key=lambda kv: kv[1])
        var_names = tuple(names[old] for old, _ in by_new)
    return Clause(rename_atom(head), tuple(rename_atom(a) for a in body), var_names)


@dataclass(frozen=True)
class Signature:
    """Functor and predicate arities, as sorted (name, arity) pairs."""

    functors: tuple[tuple[str, int], ...] = ()
    predicates: tuple[tuple[str, int], ...] = ()

    @cached_property
    def functor_arities(self) -> dict[str, int]:
        return dict(self.functors)

    @cached_property
    def predicate_arities(self) -> dict[str, int]:
        return dict(self.predicates)

    @property
    def constants(self) -> tuple[str, ...]:
        return tuple(name for name, arity in self.functors if arity == 0)


def _collect_arities(clauses: Iterable[Clause]) -> Signature:
    functors: dict[str, int] = {}
    predicates: dict[str, int] = {}

    def note(table: dict[str, int], name: str, arity: int, role: str) -> None:
        old = table.setdefault(name, arity)
        if old != arity:
            raise ArityMismatchError(name, old, arity, role)

    def visit_term(t: Term) -> None:
        if isinstance(t, Fn):
            note(functors, t.name, len(t.args), "functor")
            for a in t.args:
                visit_term(a)

    for c in clauses:
        for a in (c.head,) + c.body:
            note(predicates, a.pred, len(a.args), "predicate")
            for t in a.args:
                visit_term(t)
    return Signature(tuple(sorted(functors.items())), tuple(sorted(predicates.items())))


@dataclass(frozen=True)
class Program:
    """A sequence of clauses (order significant) plus the shared signature."""

    clauses: tuple[Clause, ...] = ()
    signature: Signature = Signature()

    @classmethod
    def of(cls, clauses: Iterable[Clause]) -> "Program":
        canon = []
        for c in clauses:
            names = None
            if c.var_names is not None:
                names = {i + 1: nm for i, nm in enumerate(c.var_names)}
            canon.append(canonical_clause(c.head, c.body, names))
        canon = tuple(canon)
        return cls(canon, _collect_arities(canon))

    def check_atom(self, a: Atom) -> None:
        """Raise ArityMismatchError if `a` conflicts with this program's signature."""
        known = self.signature.predicate_arities.get(a.pred)
        if known is not None and known != len(a.args):
            raise ArityMismatchError(a.pred, known, len(a.args), "predicate")

        def visit(t: Term) -> None:
            if isinstance(t, Fn):
                k = self.signature.functor_arities.get(t.name)
                if k is not None and k != len(t.args):
                    raise ArityMismatchError(t.name, k, len(t.args), "functor")
                for x in t.args:
                    visit(x)

        for t in a.args:
            visit(t)


@dataclass(frozen=True)
class Classification:
    """Which clauses (0-based indices) contain existential variables."""

    existential_clauses: tuple[int, ...]

    @property
    def is_existential(self) -> bool:
        return bool(self.existential_clauses)


def classify_program(p: Program) -> Classification:
    return Classification(tuple(i for i, c in enumerate(p.clauses) if c.is_existential))


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<comment>%[^\n]*)"
    r"|(?P<implies>:-)"
    r"|(?P<name>[a-z][A-Za-z0-9_]*|[0-9]+)"
    r"|(?P<var>[A-Z_][A-Za-z0-9_]*)"
    r"|(?P<lparen>\()"
    r"|(?P<rparen>\))"
    r"|(?P<comma>,)"
    r"|(?P<dot>\.)"
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    col = 1
    n = len(source)
    while pos < n:
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(f"unexpected character {source[pos]!r}", line, col)
        kind = m.lastgroup or ""
        text = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token], signature: Signature | None = None) -> None:
        self.tokens = tokens
        self.pos = 0
        self.functors: dict[str, int] = dict(signature.functors) if signature else {}
        self.predicates: dict[str, int] = dict(signature.predicates) if signature else {}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            got = repr(tok.text) if tok.kind != "eof" else "end of input"
            raise ParseError(f"expected {what}, found {got}", tok.line, tok.column)
        return self.take()

    def _note(self, table: dict[str, int], name: str, arity: int, role: str) -> None:
        old = table.setdefault(name, arity)
        if old != arity:
            raise ArityMismatchError(name, old, arity, role)

    def term(self, varmap: dict[str, int], canonical_vars: bool = False) -> Term:
        tok = self.peek()
        if tok.kind == "var":
            self.take()
            if canonical_vars:
                m = re.fullmatch(r"X([1-9][0-9]*)", tok.text)
                if m is None:
                    raise ParseError(f"expected canonical variable, found {tok.text!r}",
                                     tok.line, tok.column)
                return Var(int(m.group(1)))
            if tok.text not in varmap:
                varmap[tok.text] = len(varmap) + 1
            return Var(varmap[tok.text])
        if tok.kind == "name":
            self.take()
            args: tuple[Term, ...] = ()
            if self.peek().kind == "lparen":
                self.take()
                items = [self.term(varmap, canonical_vars)]
                while self.peek().kind == "comma":
                    self.take()
                    items.append(self.term(varmap, canonical_vars))
                self.expect("rparen", "')'")
                args = tuple(items)
            self._note(self.functors, tok.text, len(args), "functor")
            return Fn(tok.text, args)
        got = repr(tok.text) if tok.kind != "eof" else "end of input"
        raise ParseError(f"expected a term, found {got}", tok.line, tok.column)

    def atom(self, varmap: dict[str, int], canonical_vars: bool = False) -> Atom:
        tok = self.expect("name", "a predicate name")
        args: tuple[Term, ...] = ()
        if self.peek().kind == "lparen":
            self.take()
            items = [self.term(varmap, canonical_vars)]
            while self.peek().kind == "comma":
                self.take()
                items.append(self.term(varmap, canonical_vars))
            self.expect("rparen", "')'")
            args = tuple(items)
        self._note(self.predicates, tok.text, len(args), "predicate")
        return Atom(tok.text, args)

    def clause(self) -> Clause:
        varmap: dict[str, int] = {}
        head = self.atom(varmap)
        body: list[Atom] = []
        if self.peek().kind == "implies":
            self.take()
            body.append(self.atom(varmap))
            while self.peek().kind == "comma":
                self.take()
                body.append(self.atom(varmap))
        self.expect("dot", "'.'")
        names = tuple(nm for nm, _ in sorted(varmap.items(), key=lambda kv: kv[1]))
        # Variables were numbered by first occurrence, head before body, so the
        # clause is already canonical.
        return Clause(head, tuple(body), names)


def parse_program(source: str) -> Program:
    """Parse a whole program. Clause order is preserved."""
    parser = _Parser(_tokenize(source))
    clauses = []
    while parser.peek().kind != "eof":
        clauses.append(parser.clause())
    clauses = tuple(clauses)
    return Program(clauses, _collect_arities(clauses))


@dataclass(frozen=True)
class Goal:
    """A parsed query: one or more atoms sharing a variable context."""

    atoms: tuple[Atom, ...]
    var_count: int
    var_names: tuple[str, ...]

    @property
    def atom(self) -> Atom:
        if len(self.atoms) != 1:
            raise ValueError("expected a single-atom goal")
        return self.atoms[0]


def parse_goal(source: str, signature: Signature | None = None) -> Goal:
    """Parse a comma-separated atom list; a trailing '.' is optional."""
    parser = _Parser(_tokenize(source), signature)
    varmap: dict[str, int] = {}
    atoms = [parser.atom(varmap)]
    while parser.peek().kind == "comma":
        parser.take()
        atoms.append(parser.atom(varmap))
    if parser.peek().kind == "dot":
        parser.take()
    parser.expect("eof", "end of input")
    names = tuple(nm for nm, _ in sorted(varmap.items(), key=lambda kv: kv[1]))
    return Goal(tuple(atoms), len(varmap), names)


def parse_atom(source: str, signature: Signature | None = None) -> tuple[Atom, int]:
    """Parse one atom; variables are renumbered x1..xn by first occurrence."""
    goal = parse_goal(source, signature)
    return goal.atom, goal.var_count


def parse_canonical_atom(source: str, signature: Signature | None = None) -> Atom:
    """Parse an atom whose variables must already be spelled X1, X2, ..."""
    parser = _Parser(_tokenize(source), signature)
    atom = parser.atom({}, canonical_vars=True)
    parser.expect("eof", "end of input")
    return atom


def parse_canonical_term(source: str) -> Term:
    parser = _Parser(_tokenize(source))
    term = parser.term({}, canonical_vars=True)
    parser.expect("eof", "end of input")
    return term


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def var_name(index: int) -> str:
    return f"X{index}"


def print_term(t: Term) -> str:
    if isinstance(t, Var):
        return var_name(t.index)
    if not t.args:
        return t.name
    return f"{t.name}({', '.join(print_term(a) for a in t.args)})"


def print_atom(a: Atom) -> str:
    if not a.args:
        return a.pred
    return f"{a.pred}({', '.join(print_term(t) for t in a.args)})"


def print_clause(c: Clause) -> str:
    if not c.body:
        return f"{print_atom(c.head)}."
    return f"{print_atom(c.head)} :- {', '.join(print_atom(a) for a in c.body)}."


def print_program(p: Program) -> str:
    return "".join(print_clause(c) + "\n" for c in p.clauses)
