"""Substitutions, unification (mgu), one-way matching (mgm), and tuple arrows.

A substitution is a finite map from variable indices to terms; variables
outside the map are fixed. Application is simultaneous. Unifiers returned by
`mgu` are idempotent and normalised so that when two variables are merged the
smaller index is kept as the representative, which makes results directly
comparable in tests.

`mgm(pattern, target)` is strictly one-way: only pattern variables may be
bound, target variables are inert. A tuple arrow n->m carries m terms over
variables x1..xn and acts on atoms by substitution, sending an atom over at
most m variables to one over at most n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union, overload

from .syntax import (
    ArityMismatchError,
    Atom,
    Clause,
    Fn,
    Term,
    Var,
    max_var,
    print_term,
    var_name,
)


class Substitution:
    """Finite variable-to-term map; identity bindings are never stored."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[int, Term] | Iterable[tuple[int, Term]] = ()) -> None:
        items = bindings.items() if isinstance(bindings, Mapping) else bindings
        self._bindings = {
            i: t for i, t in items if not (isinstance(t, Var) and t.index == i)
        }

    @classmethod
    def identity(cls) -> "Substitution":
        return cls()

    @property
    def is_identity(self) -> bool:
        return not self._bindings

    def get(self, index: int) -> Term:
        return self._bindings.get(index, Var(index))

    def domain(self) -> frozenset[int]:
        return frozenset(self._bindings)

    def items(self) -> tuple[tuple[int, Term], ...]:
        return tuple(sorted(self._bindings.items()))

    def restrict(self, indices: Iterable[int]) -> "Substitution":
        keep = set(indices)
        return Substitution({i: t for i, t in self._bindings.items() if i in keep})

    def __bool__(self) -> bool:
        return bool(self._bindings)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Substitution):
            return NotImplemented
        return self._bindings == other._bindings

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __str__(self) -> str:
        inner = ", ".join(f"{var_name(i)} -> {print_term(t)}" for i, t in self.items())
        return "{" + inner + "}"

    def __repr__(self) -> str:
        return f"Substitution({self!s})"


_Applicable = Union[Term, Atom, Sequence[Atom]]


@overload
def apply(s: Substitution, x: Var) -> Term: ...
@overload
def apply(s: Substitution, x: Fn) -> Fn: ...
@overload
def apply(s: Substitution, x: Atom) -> Atom: ...
@overload
def apply(s: Substitution, x: Sequence[Atom]) -> tuple[Atom, ...]: ...


def apply(s: Substitution, x: _Applicable) -> _Applicable:
    """Homomorphic, simultaneous replacement of variables in x."""
    if isinstance(x, Var):
        return s.get(x.index)
    if isinstance(x, Fn):
        return Fn(x.name, tuple(apply(s, a) for a in x.args))
    if isinstance(x, Atom):
        return Atom(x.pred, tuple(apply(s, t) for t in x.args))
    return tuple(apply(s, a) for a in x)


def compose(s1: Substitution, s2: Substitution) -> Substitution:
    """The substitution with apply(compose(s1, s2), t) = apply(s1, apply(s2, t))."""
    out: dict[int, Term] = {i: apply(s1, t) for i, t in s2.items()}
    for i, t in s1.items():
        out.setdefault(i, t)
    return Substitution(out)


# ---------------------------------------------------------------------------
# Unification and matching
# ---------------------------------------------------------------------------

def mgu(a: Atom, b: Atom) -> Substitution | None:
    """Most general unifier of two atoms, or None. The occurs check is on.

    The result is idempotent; when two variables are unified the smaller
    index becomes the representative.
    """
    if a.pred != b.pred or len(a.args) != len(b.args):
        return None
    bind: dict[int, Term] = {}

    def walk(t: Term) -> Term:
        while isinstance(t, Var) and t.index in bind:
            t = bind[t.index]
        return t

    def occurs(i: int, t: Term) -> bool:
        t = walk(t)
        if isinstance(t, Var):
            return t.index == i
        return any(occurs(i, a) for a in t.args)

    stack = list(zip(a.args, b.args))
    while stack:
        x, y = stack.pop()
        x = walk(x)
        y = walk(y)
        if isinstance(x, Var) and isinstance(y, Var):
            if x.index == y.index:
                continue
            lo, hi = sorted((x.index, y.index))
            bind[hi] = Var(lo)
        elif isinstance(x, Var):
            if occurs(x.index, y):
                return None
            bind[x.index] = y
        elif isinstance(y, Var):
            if occurs(y.index, x):
                return None
            bind[y.index] = x
        else:
            if x.name != y.name or len(x.args) != len(y.args):
                return None
            stack.extend(zip(x.args, y.args))

    def resolve(t: Term) -> Term:
        t = walk(t)
        if isinstance(t, Fn):
            return Fn(t.name, tuple(resolve(a) for a in t.args))
        return t

    return Substitution({i: resolve(Var(i)) for i in bind})


def mgm(pattern: Atom, target: Atom) -> Substitution | None:
    """Most general matcher sending `pattern` exactly onto `target`, or None.

    Only pattern variables are bound; target variables are treated as inert
    constants, so the target is never specialised. When a matcher exists it
    is the unique one on vars(pattern).
    """
    if pattern.pred != target.pred or len(pattern.args) != len(target.args):
        return None
    bind: dict[int, Term] = {}
    stack = list(zip(pattern.args, target.args))
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            prev = bind.get(p.index)
            if prev is None:
                bind[p.index] = t
            elif prev != t:
                return None
        else:
            if not isinstance(t, Fn) or p.name != t.name or len(p.args) != len(t.args):
                return None
            stack.extend(zip(p.args, t.args))
    return Substitution(bind)


def rename_apart(c: Clause, avoid: int) -> Clause:
    """Shift every variable in the clause above `avoid`."""
    if avoid == 0:
        return c

    def shift_term(t: Term) -> Term:
        if isinstance(t, Var):
            return Var(t.index + avoid)
        return Fn(t.name, tuple(shift_term(a) for a in t.args))

    def shift_atom(a: Atom) -> Atom:
        return Atom(a.pred, tuple(shift_term(t) for t in a.args))

    return Clause(shift_atom(c.head), tuple(shift_atom(a) for a in c.body))


# ---------------------------------------------------------------------------
# Tuple arrows n -> m
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArrowSubstitution:
    """An m-tuple of terms over x1..xn, acting on atoms by substitution."""

    source: int
    target: int
    terms: tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.terms) != self.target:
            raise ValueError(f"arrow {self.source}->{self.target} needs "
                             f"{self.target} terms, got {len(self.terms)}")
        for t in self.terms:
            if max_var(t) > self.source:
                raise ArityMismatchError(print_term(t), self.source, max_var(t), "arrow term")

    @classmethod
    def identity(cls, n: int) -> "ArrowSubstitution":
        return cls(n, n, tuple(Var(i) for i in range(1, n + 1)))

    @property
    def is_injection(self) -> bool:
        """True when the tuple consists of pairwise distinct variables."""
        if not all(isinstance(t, Var) for t in self.terms):
            return False
        idx = [t.index for t in self.terms]  # type: ignore[union-attr]
        return len(set(idx)) == len(idx)

    def __str__(self) -> str:
        inner = ", ".join(print_term(t) for t in self.terms)
        return f"({inner}):{self.source}->{self.target}"


def arrow_apply(f: ArrowSubstitution, a: Atom) -> Atom:
    """Substitute the i-th arrow component for x_i throughout the atom."""
    if max_var(a) > f.target:
        raise ArityMismatchError(a.pred, f.target, max_var(a), "goal for arrow")

    def sub(t: Term) -> Term:
        if isinstance(t, Var):
            return f.terms[t.index - 1]
        return Fn(t.name, tuple(sub(x) for x in t.args))

    return Atom(a.pred, tuple(sub(t) for t in a.args))


def compose_arrows(f: ArrowSubstitution, g: ArrowSubstitution) -> ArrowSubstitution:
    """Composite of f: n->m and g: m->k, yielding n->k (substitution of f into g)."""
    if f.target != g.source:
        raise ArityMismatchError("arrow composition", f.target, g.source, "arrow")

    def sub(t: Term) -> Term:
        if isinstance(t, Var):
            return f.terms[t.index - 1]
        return Fn(t.name, tuple(sub(x) for x in t.args))

    return ArrowSubstitution(f.source, g.target, tuple(sub(t) for t in g.terms))
