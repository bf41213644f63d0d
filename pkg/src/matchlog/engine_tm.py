"""Term-matching prover: depth-bounded search for proofs that never bind
goal variables.

A goal is proved as stated, for all values of its variables: at each step a
clause head must match the current atom exactly (one-way matching), and the
matched body instances become subgoals. Body-only clause variables are
instantiated with fresh variables; a dead end that mentions such a fresh
variable is inconclusive rather than a definite failure, because the fresh
variable stands for an arbitrary instantiation.

The search is an independent implementation of the verdict that
`cotree.success_subtree(cotree.build_tree(...))` computes; the two are
cross-checked in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cotree import AndNode, OrNode, ProofTree, Status
from .substitution import Substitution, apply, mgm
from .syntax import Atom, Fn, Program, Term, Var, max_var


@dataclass(frozen=True)
class TmResult:
    status: Status
    proof: ProofTree | None = None

    @property
    def is_proved(self) -> bool:
        return self.status is Status.PROVED


def _canonical_key(atom: Atom, base: int) -> Atom:
    """Renumber variables above `base` by first occurrence, for memoisation."""
    seen: dict[int, int] = {}

    def walk(t: Term) -> Term:
        if isinstance(t, Var):
            if t.index <= base:
                return t
            if t.index not in seen:
                seen[t.index] = base + len(seen) + 1
            return Var(seen[t.index])
        return Fn(t.name, tuple(walk(a) for a in t.args))

    return Atom(atom.pred, tuple(walk(t) for t in atom.args))


def tm_prove(program: Program, goal: Atom, depth: int) -> TmResult:
    """Decide entailment of `goal` up to `depth` clause applications.

    Clauses are tried in program order, subgoals left to right. Statuses of
    subgoals are memoised per (atom up to fresh renaming, remaining depth),
    which keeps looping programs within the depth bound.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    program.check_atom(goal)
    base = max_var(goal)
    memo: dict[tuple[Atom, int], Status] = {}

    def instances(atom: Atom):
        ceiling = max(base, max_var(atom))
        for idx, clause in enumerate(program.clauses):
            theta = mgm(clause.head, atom)
            if theta is None:
                continue
            k = clause.var_count - clause.head_var_count
            if k:
                extended = dict(theta.items())
                for j in range(1, k + 1):
                    extended[clause.head_var_count + j] = Var(ceiling + j)
                theta = Substitution(extended)
            yield idx, theta, tuple(apply(theta, b) for b in clause.body)

    def status(atom: Atom, remaining: int) -> Status:
        if remaining == 0:
            return Status.UNKNOWN
        key = (_canonical_key(atom, base), remaining)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best = None
        for _, _, body in instances(atom):
            branch = Status.PROVED
            for sub in body:
                branch = min(branch, status(sub, remaining - 1))
                if branch is Status.FAILED:
                    break
            best = branch if best is None else max(best, branch)
            if best is Status.PROVED:
                break
        if best is None:
            best = Status.UNKNOWN if max_var(atom) > base else Status.FAILED
        memo[key] = best
        return best

    def extract(atom: Atom, remaining: int) -> AndNode:
        for idx, theta, body in instances(atom):
            if all(status(sub, remaining - 1) is Status.PROVED for sub in body):
                kids = tuple(extract(sub, remaining - 1) for sub in body)
                return AndNode(atom, (OrNode(idx, theta, kids),), False)
        raise AssertionError("proof extraction on an unproved goal")

    outcome = status(goal, depth)
    if outcome is Status.PROVED:
        return TmResult(outcome, ProofTree(extract(goal, depth), base))
    return TmResult(outcome)


def tm_prove_all(program: Program, goals: Sequence[Atom], depth: int) -> tuple[TmResult, ...]:
    return tuple(tm_prove(program, g, depth) for g in goals)
