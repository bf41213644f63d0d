"""Semantic structures behind the engines.

Ground side: a variable-free program is the same thing as a map sending each
atom to the set of its clause bodies (a set of sets of atoms). Unfolding that
map to a finite level produces nested approximants that carry exactly the
information of the depth-truncated and-or tree; `approximant_matches_tree`
checks the two constructions against each other.

First-order side: for an atom over a base of n variables, `pff_step` collects
the matched clause bodies, with body-only clause variables mapped to fresh
indices n+1, n+2, ... The result is kept as a canonical representative
(minimal fresh count, fresh numbering fixed by taking the least renaming), so
that literal equality decides equality of the underlying quotient. Arrows act
on these elements by substitution on the base and uniform renumbering of the
fresh block, and `check_lax_square` compares acting-then-stepping against
stepping-then-acting: the first is always below the second in the subset
order, with equality whenever the arrow is an injective renaming.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .cotree import AndNode, build_tree
from .substitution import (
    ArrowSubstitution,
    Substitution,
    apply,
    arrow_apply,
    mgm,
)
from .syntax import (
    ArityMismatchError,
    Atom,
    Clause,
    Fn,
    Program,
    Signature,
    Term,
    Var,
    atom_vars,
    max_var,
    print_atom,
)


# ---------------------------------------------------------------------------
# Ground programs as set-of-bodies maps
# ---------------------------------------------------------------------------

BodySets = frozenset[frozenset[Atom]]


@dataclass(frozen=True)
class GroundCoalgebra:
    """Structure map of a variable-free program: atom -> set of clause bodies."""

    entries: tuple[tuple[Atom, BodySets], ...]  # sorted by printed atom

    @cached_property
    def mapping(self) -> dict[Atom, BodySets]:
        return dict(self.entries)

    @property
    def atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a, _ in self.entries)

    def body_sets(self, atom: Atom) -> BodySets:
        try:
            return self.mapping[atom]
        except KeyError:
            raise ValueError(f"unknown atom {print_atom(atom)}") from None


def ground_coalgebra(program: Program, extra_atoms: Iterable[Atom] = ()) -> GroundCoalgebra:
    """Read off the structure map; rejects programs with variables."""
    for i, c in enumerate(program.clauses):
        if c.var_count:
            raise ValueError(f"clause {i} contains variables; the program is not ground")
    universe: set[Atom] = set(extra_atoms)
    bodies: dict[Atom, set[frozenset[Atom]]] = {}
    for c in program.clauses:
        universe.add(c.head)
        universe.update(c.body)
    for a in universe:
        bodies[a] = set()
    for c in program.clauses:
        bodies[c.head].add(frozenset(c.body))
    entries = tuple(
        (a, frozenset(bodies[a]))
        for a in sorted(universe, key=print_atom)
    )
    return GroundCoalgebra(entries)


def coalgebra_program(g: GroundCoalgebra) -> Program:
    """The normalised program presenting `g`: clauses sorted, bodies sorted."""
    clauses = []
    for atom, sets in g.entries:
        for body in sorted(sets, key=lambda s: sorted(print_atom(a) for a in s)):
            clauses.append(Clause(atom, tuple(sorted(body, key=print_atom))))
    return Program.of(clauses)


def ground_lfp(program: Program) -> frozenset[Atom]:
    """Least fixed point of the one-step consequence operator (ground only)."""
    for i, c in enumerate(program.clauses):
        if c.var_count:
            raise ValueError(f"clause {i} contains variables; the program is not ground")
    derived: set[Atom] = set()
    changed = True
    while changed:
        changed = False
        for c in program.clauses:
            if c.head not in derived and all(b in derived for b in c.body):
                derived.add(c.head)
                changed = True
    return frozenset(derived)


# ---------------------------------------------------------------------------
# Finite unfoldings of the ground structure map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Approximant:
    """Level-n unfolding: an atom at level 0, otherwise an atom paired with a
    set of sets of level-(n-1) approximants."""

    level: int
    atom: Atom
    branches: frozenset[frozenset["Approximant"]] | None = None

    def __post_init__(self) -> None:
        if (self.branches is None) != (self.level == 0):
            raise ValueError("branches must be present exactly when level > 0")
        if self.branches is not None:
            for s in self.branches:
                for x in s:
                    if x.level != self.level - 1:
                        raise ValueError("branch levels must be one below the node level")

    def __str__(self) -> str:
        if self.level == 0:
            return print_atom(self.atom)
        inner = sorted(
            "{" + ", ".join(sorted(str(x) for x in s)) + "}" for s in self.branches or ()
        )
        return f"({print_atom(self.atom)}, {{{', '.join(inner)}}})"


def unfold(g: GroundCoalgebra, atom: Atom, level: int) -> Approximant:
    """n-fold unfolding of the structure map at `atom` (level 0 is the atom)."""
    if level < 0:
        raise ValueError("level must be >= 0")
    g.body_sets(atom)  # raises on unknown atoms
    memo: dict[tuple[Atom, int], Approximant] = {}

    def go(a: Atom, n: int) -> Approximant:
        key = (a, n)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if n == 0:
            out = Approximant(0, a)
        else:
            out = Approximant(n, a, frozenset(
                frozenset(go(b, n - 1) for b in body)
                for body in g.body_sets(a)
            ))
        memo[key] = out
        return out

    return go(atom, level)


def project_approximant(x: Approximant) -> Approximant:
    """Drop the deepest layer, turning a level-(n+1) approximant into level n."""
    if x.level == 0:
        raise ValueError("cannot project a level-0 approximant")
    if x.level == 1:
        return Approximant(0, x.atom)
    return Approximant(x.level - 1, x.atom, frozenset(
        frozenset(project_approximant(c) for c in s) for s in x.branches or ()
    ))


def encode_tree(node: AndNode, level: int) -> Approximant:
    """Encode a depth-`level` ground and-or tree as an approximant.

    And-node atoms become the atom component, the or-children become the
    outer set, each or-node's child list the inner set. Duplicate bodies
    collapse, matching the set-valued structure map.
    """
    memo: dict[tuple[int, int], Approximant] = {}

    def go(n: AndNode, lvl: int) -> Approximant:
        key = (id(n), lvl)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if lvl == 0:
            out = Approximant(0, n.atom)
        else:
            out = Approximant(lvl, n.atom, frozenset(
                frozenset(go(c, lvl - 1) for c in o.children)
                for o in n.children
            ))
        memo[key] = out
        return out

    return go(node, level)


def approximant_matches_tree(g: GroundCoalgebra, atom: Atom, level: int) -> bool:
    """Does the level-n unfolding carry exactly the depth-n tree's information?"""
    tree = build_tree(coalgebra_program(g), atom, 0, level)
    return unfold(g, atom, level) == encode_tree(tree.root, level)


# ---------------------------------------------------------------------------
# Clause bodies over a base arity plus a fresh block
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PffElement:
    """A set of sets of atoms over x1..x(base+fresh), in canonical form.

    Canonical means: every index base+1..base+fresh actually occurs, and the
    numbering of the fresh block is the least one under the set ordering, so
    two elements equal up to renaming fresh variables are literally equal.
    """

    base: int
    fresh: int
    body: BodySets

    @classmethod
    def canonical(cls, base: int, sets: Iterable[Iterable[Atom]]) -> "PffElement":
        raw = [tuple(s) for s in sets]
        fresh_vars = sorted({
            i for s in raw for a in s for i in atom_vars(a) if i > base
        })
        k = len(fresh_vars)
        if k == 0:
            return cls(base, 0, frozenset(frozenset(s) for s in raw))
        best_key = None
        best_body = None
        for perm in itertools.permutations(range(base + 1, base + k + 1)):
            ren = dict(zip(fresh_vars, perm))

            def rn_term(t: Term) -> Term:
                if isinstance(t, Var):
                    return Var(ren.get(t.index, t.index))
                return Fn(t.name, tuple(rn_term(a) for a in t.args))

            body = frozenset(
                frozenset(Atom(a.pred, tuple(rn_term(t) for t in a.args)) for a in s)
                for s in raw
            )
            key = tuple(sorted(
                tuple(sorted(print_atom(a) for a in s)) for s in body
            ))
            if best_key is None or key < best_key:
                best_key = key
                best_body = body
        assert best_body is not None
        return cls(base, k, best_body)

    def __str__(self) -> str:
        inner = sorted(
            "{" + ", ".join(sorted(print_atom(a) for a in s)) + "}" for s in self.body
        )
        return "{" + ", ".join(inner) + "}"


def pff_step(program: Program, atom: Atom, base: int) -> PffElement:
    """Matched clause bodies for `atom` over `base` variables.

    Each clause whose head matches the atom exactly contributes the matched
    body, with its body-only variables sent to fresh indices base+1, ...
    """
    program.check_atom(atom)
    if max_var(atom) > base:
        raise ArityMismatchError(print_atom(atom), base, max_var(atom), "goal")
    sets = []
    for clause in program.clauses:
        theta = mgm(clause.head, atom)
        if theta is None:
            continue
        k = clause.var_count - clause.head_var_count
        if k:
            extended = dict(theta.items())
            for j in range(1, k + 1):
                extended[clause.head_var_count + j] = Var(base + j)
            theta = Substitution(extended)
        sets.append(frozenset(apply(theta, b) for b in clause.body))
    return PffElement.canonical(base, sets)


def pff_map(f: ArrowSubstitution, e: PffElement) -> PffElement:
    """Act on an element by an arrow: substitute on the base, shift the fresh
    block from above f.target to above f.source, re-canonicalise."""
    if f.target != e.base:
        raise ArityMismatchError("element base", f.target, e.base, "arrow target")
    m, n = f.target, f.source

    def sub(t: Term) -> Term:
        if isinstance(t, Var):
            if t.index <= m:
                return f.terms[t.index - 1]
            return Var(n + (t.index - m))
        return Fn(t.name, tuple(sub(a) for a in t.args))

    sets = [
        frozenset(Atom(a.pred, tuple(sub(t) for t in a.args)) for a in s)
        for s in e.body
    ]
    return PffElement.canonical(n, sets)


def pp_leq(a: Iterable[Iterable[Atom]], b: Iterable[Iterable[Atom]]) -> bool:
    """Set-of-sets order over a discrete base: every member of `a` is
    contained in some member of `b`."""
    bs = [set(t) for t in b]
    return all(any(set(s) <= t for t in bs) for s in a)


def pff_leq(e1: PffElement, e2: PffElement) -> bool:
    """pp_leq after embedding both elements into a common fresh block.

    Fresh variables may be renamed injectively; base variables are fixed.
    """
    if e1.base != e2.base:
        raise ValueError("cannot compare elements over different bases")
    if e1.fresh == 0:
        return pp_leq(e1.body, e2.body)
    if e1.fresh > e2.fresh:
        return False
    base = e1.base
    src = range(base + 1, base + e1.fresh + 1)
    for image in itertools.permutations(range(base + 1, base + e2.fresh + 1), e1.fresh):
        ren = dict(zip(src, image))

        def rn_term(t: Term) -> Term:
            if isinstance(t, Var):
                return Var(ren.get(t.index, t.index))
            return Fn(t.name, tuple(rn_term(a) for a in t.args))

        renamed = [
            {Atom(a.pred, tuple(rn_term(t) for t in a.args)) for a in s}
            for s in e1.body
        ]
        if pp_leq(renamed, e2.body):
            return True
    return False


# ---------------------------------------------------------------------------
# Lax square checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LaxSquare:
    """One checked square: act-then-step on the left, step-then-act on the right."""

    arrow: ArrowSubstitution
    atom: Atom
    lhs: PffElement
    rhs: PffElement
    lax_ok: bool
    strict_ok: bool

    def line(self, strict_expected: bool = False) -> str:
        if not self.lax_ok:
            tag = "LAX FAIL"
        elif self.strict_ok:
            tag = "STRICT OK"
        elif strict_expected:
            tag = "STRICT FAIL"
        else:
            tag = "LAX OK"
        return (f"{tag}  f={self.arrow}  A={print_atom(self.atom)}  "
                f"lhs={self.lhs} rhs={self.rhs}")

    def to_record(self) -> dict:
        return {
            "arrow": str(self.arrow),
            "atom": print_atom(self.atom),
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "lax_ok": self.lax_ok,
            "strict_ok": self.strict_ok,
        }


def _square(program: Program, f: ArrowSubstitution, atom: Atom,
            lhs_source: PffElement | None = None) -> LaxSquare:
    src = lhs_source if lhs_source is not None else pff_step(program, atom, f.target)
    lhs = pff_map(f, src)
    rhs = pff_step(program, arrow_apply(f, atom), f.source)
    return LaxSquare(f, atom, lhs, rhs, pff_leq(lhs, rhs), lhs == rhs)


@dataclass(frozen=True)
class LaxReport:
    squares: tuple[LaxSquare, ...]

    @property
    def lax_failures(self) -> tuple[LaxSquare, ...]:
        return tuple(s for s in self.squares if not s.lax_ok)

    @property
    def equality_failures(self) -> tuple[LaxSquare, ...]:
        return tuple(s for s in self.squares if s.lax_ok and not s.strict_ok)

    def to_text(self, strict_expected: bool = False) -> str:
        return "\n".join(s.line(strict_expected) for s in self.squares) + "\n"

    def to_json_records(self) -> list[dict]:
        return [s.to_record() for s in self.squares]


def check_lax_square(program: Program, f: ArrowSubstitution,
                     atoms: Iterable[Atom]) -> LaxReport:
    """Check the inequality lhs <= rhs for each atom, reporting equality too."""
    return LaxReport(tuple(_square(program, f, a) for a in atoms))


# ---------------------------------------------------------------------------
# Exhaustive sweeps over generated arrows
# ---------------------------------------------------------------------------

def enumerate_terms(signature: Signature, nvars: int, depth: int) -> tuple[Term, ...]:
    """All terms over x1..xnvars up to `depth` levels of structure.

    Variables and constants count as depth 1, so depth 2 allows one layer of
    functors over atomic arguments.
    """
    pool: dict[Term, None] = {}
    for i in range(1, nvars + 1):
        pool[Var(i)] = None
    for name in signature.constants:
        pool[Fn(name)] = None
    for _ in range(depth - 1):
        prev = list(pool)
        for name, arity in signature.functors:
            if arity == 0:
                continue
            for args in itertools.product(prev, repeat=arity):
                pool.setdefault(Fn(name, args))
    return tuple(pool)


def enumerate_arrows(signature: Signature, max_arity: int = 3,
                     term_depth: int = 2) -> Iterator[ArrowSubstitution]:
    """All arrows n->m with n, m <= max_arity and components of bounded depth."""
    for n in range(max_arity + 1):
        pool = enumerate_terms(signature, n, term_depth)
        for m in range(max_arity + 1):
            for tup in itertools.product(pool, repeat=m):
                yield ArrowSubstitution(n, m, tup)


def default_check_atoms(program: Program, max_arity: int = 3) -> tuple[tuple[Atom, int], ...]:
    """Atoms worth checking, paired with the base arity to view them at:
    one generic atom per predicate, each clause head, and the generic atoms
    again viewed at the maximal arity."""
    out: list[tuple[Atom, int]] = []
    seen: set[tuple[Atom, int]] = set()

    def add(atom: Atom, base: int) -> None:
        if base <= max_arity and (atom, base) not in seen:
            seen.add((atom, base))
            out.append((atom, base))

    generics = []
    for pred, arity in program.signature.predicates:
        if arity <= max_arity:
            g = Atom(pred, tuple(Var(i) for i in range(1, arity + 1)))
            generics.append(g)
            add(g, arity)
    for clause in program.clauses:
        add(clause.head, clause.head_var_count)
    for g in generics:
        add(g, max_arity)
    return tuple(out)


def _is_var_injection(tup: tuple[Term, ...]) -> bool:
    if not all(isinstance(t, Var) for t in tup):
        return False
    idx = [t.index for t in tup]  # type: ignore[union-attr]
    return len(set(idx)) == len(idx)


@dataclass(frozen=True)
class LaxSweepReport:
    squares_checked: int
    classes_checked: int  # distinct behaviours after restricting arrows to the atom's variables
    strict_ok_squares: int
    lax_failures: tuple[LaxSquare, ...]
    equality_failures: tuple[LaxSquare, ...]  # one witness per behaviour class
    injection_failures: tuple[LaxSquare, ...]

    @property
    def all_lax_ok(self) -> bool:
        return not self.lax_failures

    @property
    def injections_strict(self) -> bool:
        return not self.injection_failures

    def summary(self) -> str:
        return (f"checked {self.squares_checked} squares "
                f"({self.classes_checked} distinct): "
                f"{len(self.lax_failures)} lax failures, "
                f"{len(self.injection_failures)} injection equality failures, "
                f"{len(self.equality_failures)} equality failures elsewhere")


def lax_sweep(program: Program,
              atom_bases: Sequence[tuple[Atom, int]] | None = None,
              max_arity: int = 3, term_depth: int = 2) -> LaxSweepReport:
    """Check every arrow n->m (n, m <= max_arity, components of bounded depth)
    against every supplied atom viewed at base m.

    A square's verdict only depends on the arrow components at variables the
    atom actually uses, so verdicts are cached per restriction; the sweep
    still visits every arrow to classify injections exactly.
    """
    if atom_bases is None:
        atom_bases = default_check_atoms(program, max_arity)
    terms_by_n = [enumerate_terms(program.signature, n, term_depth)
                  for n in range(max_arity + 1)]
    step_cache: dict[tuple[Atom, int], PffElement] = {}

    def step(atom: Atom, base: int) -> PffElement:
        key = (atom, base)
        hit = step_cache.get(key)
        if hit is None:
            hit = step_cache[key] = pff_step(program, atom, base)
        return hit

    squares = 0
    classes = 0
    strict_ok = 0
    lax_failures: list[LaxSquare] = []
    equality_failures: list[LaxSquare] = []
    injection_failures: list[LaxSquare] = []

    for atom, m in atom_bases:
        element = step(atom, m)
        used = tuple(sorted(set(atom_vars(atom))))
        for n in range(max_arity + 1):
            pool = terms_by_n[n]
            verdicts: dict[tuple[Term, ...], LaxSquare] = {}
            for tup in itertools.product(pool, repeat=m):
                squares += 1
                fkey = tuple(tup[i - 1] for i in used)
                sq = verdicts.get(fkey)
                if sq is None:
                    f = ArrowSubstitution(n, m, tup)
                    lhs = pff_map(f, element)
                    rhs = step(arrow_apply(f, atom), n)
                    sq = LaxSquare(f, atom, lhs, rhs, pff_leq(lhs, rhs), lhs == rhs)
                    verdicts[fkey] = sq
                    classes += 1
                    if not sq.lax_ok:
                        lax_failures.append(sq)
                    elif not sq.strict_ok:
                        equality_failures.append(sq)
                if sq.strict_ok:
                    strict_ok += 1
                elif _is_var_injection(tup):
                    injection_failures.append(LaxSquare(
                        ArrowSubstitution(n, m, tup), atom,
                        sq.lhs, sq.rhs, sq.lax_ok, sq.strict_ok))
    return LaxSweepReport(squares, classes, strict_ok,
                          tuple(lax_failures), tuple(equality_failures),
                          tuple(injection_failures))
