"""Seeded random generators and independent oracles shared by the tests.

The oracles deliberately avoid the code paths they check: matching and
unification are cross-checked against brute-force enumeration over small
term spaces, entailment of ground programs against a hand-rolled fixpoint
loop, and tree shapes against a per-node re-scan of the clause list.
"""

from __future__ import annotations

import itertools
import random

from matchlog import (
    ArrowSubstitution,
    Atom,
    Clause,
    Fn,
    Program,
    Substitution,
    Term,
    Var,
    apply,
    mgm,
    mgu,
    compose,
    arrow_apply,
    compose_arrows,
)
from matchlog.syntax import atom_vars, canonical_clause, max_var, print_term


# ---------------------------------------------------------------------------
# Random syntax
# ---------------------------------------------------------------------------

CONSTANTS = ("a", "b")
UNARY = "f"
BINARY = "g"


def random_term(rng: random.Random, nvars: int, depth: int) -> Term:
    choices = ["const"]
    if nvars:
        choices += ["var", "var"]
    if depth > 1:
        choices += ["unary", "binary"]
    kind = rng.choice(choices)
    if kind == "var":
        return Var(rng.randint(1, nvars))
    if kind == "const":
        return Fn(rng.choice(CONSTANTS))
    if kind == "unary":
        return Fn(UNARY, (random_term(rng, nvars, depth - 1),))
    return Fn(BINARY, (random_term(rng, nvars, depth - 1),
                       random_term(rng, nvars, depth - 1)))


def random_atom(rng: random.Random, nvars: int, depth: int = 2,
                preds: tuple[tuple[str, int], ...] = (("p", 1), ("q", 2), ("r", 3))) -> Atom:
    pred, arity = rng.choice(preds)
    return Atom(pred, tuple(random_term(rng, nvars, depth) for _ in range(arity)))


def random_substitution(rng: random.Random, domain: tuple[int, ...], nvars: int,
                        depth: int = 2) -> Substitution:
    return Substitution({i: random_term(rng, nvars, depth)
                         for i in domain if rng.random() < 0.8})


def random_ground_program(rng: random.Random, max_atoms: int = 6,
                          max_clauses: int = 8) -> Program:
    pool = [Atom(name) for name in "abcdef"[: rng.randint(1, max_atoms)]]
    clauses = []
    for _ in range(rng.randint(0, max_clauses)):
        head = rng.choice(pool)
        body = tuple(rng.choice(pool) for _ in range(rng.randint(0, 3)))
        clauses.append(Clause(head, body))
    return Program.of(clauses)


def random_fo_program(rng: random.Random, existential: bool) -> Program:
    """Small first-order program over constants a/b, f/1 and predicates p/1, q/2."""
    preds = (("p", 1), ("q", 2))
    clauses = []
    n_clauses = rng.randint(2, 5)
    existential_at = rng.randrange(n_clauses) if existential else -1
    for ci in range(n_clauses):
        pred, arity = rng.choice(preds)
        head_vars = rng.randint(0, 2)

        def head_term() -> Term:
            roll = rng.random()
            if head_vars and roll < 0.6:
                return Var(rng.randint(1, head_vars))
            if roll < 0.85:
                return Fn(rng.choice(CONSTANTS))
            inner = (Var(rng.randint(1, head_vars)) if head_vars and rng.random() < 0.7
                     else Fn(rng.choice(CONSTANTS)))
            return Fn(UNARY, (inner,))

        head = Atom(pred, tuple(head_term() for _ in range(arity)))
        head_var_pool = sorted(set(atom_vars(head)))

        def body_term() -> Term:
            if head_var_pool and rng.random() < 0.7:
                return Var(rng.choice(head_var_pool))
            return Fn(rng.choice(CONSTANTS))

        body = []
        for _ in range(rng.randint(0, 2)):
            bp, ba = rng.choice(preds)
            body.append(Atom(bp, tuple(body_term() for _ in range(ba))))
        if ci == existential_at:
            bp, ba = rng.choice(preds)
            args = [Var(max_var(head) + 1)] + [body_term() for _ in range(ba - 1)]
            body.append(Atom(bp, tuple(args)))
        clauses.append(canonical_clause(head, body))
    program = Program.of(clauses)
    assert any(c.is_existential for c in program.clauses) == existential
    return program


# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------

def subterms(t: Term) -> set[Term]:
    out = {t}
    if isinstance(t, Fn):
        for a in t.args:
            out |= subterms(a)
    return out


def atom_subterms(a: Atom) -> set[Term]:
    out: set[Term] = set()
    for t in a.args:
        out |= subterms(t)
    return out


def enumerate_matchers(pattern: Atom, target: Atom) -> list[Substitution]:
    """All substitutions on vars(pattern) into subterms of the target that
    send the pattern exactly onto the target."""
    pvars = sorted(set(atom_vars(pattern)))
    pool = sorted(atom_subterms(target), key=print_term) or [Fn("a")]
    found = []
    for combo in itertools.product(pool, repeat=len(pvars)):
        s = Substitution(dict(zip(pvars, combo)))
        if apply(s, pattern) == target and s not in found:
            found.append(s)
    return found


def ground_term_pool(depth: int) -> list[Term]:
    pool: dict[Term, None] = {Fn(c): None for c in CONSTANTS}
    for _ in range(depth - 1):
        prev = list(pool)
        for t in prev:
            pool.setdefault(Fn(UNARY, (t,)))
    return list(pool)


def enumerate_unifiers(a: Atom, b: Atom, pool: list[Term]) -> list[Substitution]:
    avars = sorted(set(atom_vars(a)) | set(atom_vars(b)))
    found = []
    for combo in itertools.product(pool, repeat=len(avars)):
        s = Substitution(dict(zip(avars, combo)))
        if apply(s, a) == apply(s, b) and s not in found:
            found.append(s)
    return found


def lfp_entailed(program: Program) -> frozenset[Atom]:
    """Independent immediate-consequence fixpoint for ground programs."""
    facts: set[Atom] = set()
    while True:
        new = {c.head for c in program.clauses
               if c.head not in facts and all(b in facts for b in c.body)}
        if not new:
            return frozenset(facts)
        facts |= new


def expected_or_children(program: Program, atom: Atom, ceiling: int):
    """Naive re-scan: which clauses match `atom` and what child atoms result."""
    out = []
    for idx, clause in enumerate(program.clauses):
        theta = mgm(clause.head, atom)
        if theta is None:
            continue
        k = clause.var_count - clause.head_var_count
        ext = dict(theta.items())
        for j in range(1, k + 1):
            ext[clause.head_var_count + j] = Var(ceiling + j)
        full = Substitution(ext)
        out.append((idx, tuple(apply(full, b) for b in clause.body), k))
    return out


# ---------------------------------------------------------------------------
# Property-check batteries (one random case per call; assert inside)
# ---------------------------------------------------------------------------

def check_apply_compose_case(rng: random.Random) -> None:
    nvars = rng.randint(1, 4)
    t = random_atom(rng, nvars)
    s2 = random_substitution(rng, tuple(range(1, nvars + 1)), nvars)
    s1 = random_substitution(rng, tuple(range(1, nvars + 1)), nvars)
    assert apply(compose(s1, s2), t) == apply(s1, apply(s2, t))
    s3 = random_substitution(rng, tuple(range(1, nvars + 1)), nvars)
    lhs = compose(compose(s1, s2), s3)
    rhs = compose(s1, compose(s2, s3))
    assert lhs == rhs
    assert compose(Substitution.identity(), s1) == s1
    assert compose(s1, Substitution.identity()) == s1


def check_mgm_case(rng: random.Random) -> None:
    nvars = rng.randint(0, 2)
    pattern = random_atom(rng, nvars, depth=2)
    if rng.random() < 0.6:
        sigma = random_substitution(rng, tuple(range(1, nvars + 1)), nvars=2, depth=2)
        target = apply(sigma, pattern)
    else:
        target = random_atom(rng, 2, depth=2,
                             preds=((pattern.pred, len(pattern.args)),))
    result = mgm(pattern, target)
    oracle = enumerate_matchers(pattern, target)
    assert len(oracle) <= 1, "matching must be decisive"
    if result is None:
        assert not oracle
    else:
        assert apply(result, pattern) == target
        assert result.domain() <= set(atom_vars(pattern))
        assert oracle == [result]


def check_mgu_case(rng: random.Random, enumerate_pool: list[Term] | None = None) -> None:
    nvars = rng.randint(1, 3)
    a = random_atom(rng, nvars, depth=2)
    b = random_atom(rng, nvars, depth=2, preds=((a.pred, len(a.args)),))
    sigma = mgu(a, b)
    if sigma is not None:
        assert apply(sigma, a) == apply(sigma, b)
        assert compose(sigma, sigma) == sigma, "mgu must be idempotent"
    if enumerate_pool is not None:
        pool = enumerate_pool + [Var(i) for i in range(1, nvars + 1)]
        unifiers = enumerate_unifiers(a, b, pool)
        if unifiers:
            assert sigma is not None
        for tau in unifiers:
            # tau factors through the mgu: tau = tau . sigma
            assert compose(tau, sigma) == tau


def check_arrow_case(rng: random.Random) -> None:
    n = rng.randint(0, 3)
    m = rng.randint(0, 3)
    k = rng.randint(0, 3)
    f = ArrowSubstitution(n, m, tuple(random_term(rng, n, 2) for _ in range(m)))
    g = ArrowSubstitution(m, k, tuple(random_term(rng, m, 2) for _ in range(k)))
    atom = random_atom(rng, k) if k else Atom("p", (Fn("a"),))
    assert arrow_apply(compose_arrows(f, g), atom) == arrow_apply(f, arrow_apply(g, atom))
    ident = ArrowSubstitution.identity(k)
    assert arrow_apply(ident, atom) == atom
