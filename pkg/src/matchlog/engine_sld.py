"""SLD resolution with unification: enumerates computed answer substitutions.

Selection is always the leftmost atom; clauses are tried in program order
after being renamed apart from everything used so far. Answers are restricted
to the query's own variables, canonically renamed, and deduplicated. Search
is depth-first or iterative deepening (the default, so that looping programs
still surface the answers a bounded search can reach); deepening doubles the
step bound each sweep up to `max_steps`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cotree import Status
from .engine_tm import tm_prove
from .substitution import Substitution, apply, compose, mgu, rename_apart
from .syntax import Atom, Fn, Program, Term, Var, max_var, print_atom


@dataclass(frozen=True)
class SldLimits:
    max_steps: int = 10_000
    max_answers: int = 1
    strategy: str = "iddfs"  # "dfs" or "iddfs"

    def __post_init__(self) -> None:
        if self.max_steps < 1 or self.max_answers < 1:
            raise ValueError("bounds must be >= 1")
        if self.strategy not in ("dfs", "iddfs"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class Answer:
    """A computed substitution restricted to the query variables.

    `trace` records (clause index, renaming offset) per resolution step, so
    the derivation can be replayed and checked.
    """

    bindings: Substitution
    steps: int
    trace: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SldResult:
    answers: tuple[Answer, ...]
    exhausted: bool  # True when the step bound cut off unexplored derivations


def _canonical_answer(sigma: Substitution, n0: int) -> Substitution:
    """Restrict to query variables 1..n0 and renumber residual free variables."""
    fresh: dict[int, int] = {}

    def canon(t: Term) -> Term:
        if isinstance(t, Var):
            if t.index <= n0:
                return t
            if t.index not in fresh:
                fresh[t.index] = n0 + len(fresh) + 1
            return Var(fresh[t.index])
        return Fn(t.name, tuple(canon(a) for a in t.args))

    out: dict[int, Term] = {}
    for i in range(1, n0 + 1):
        t = apply(sigma, Var(i))
        if t != Var(i):
            out[i] = canon(t)
    return Substitution(out)


@dataclass(frozen=True)
class _Node:
    resolvent: tuple[Atom, ...]
    sigma: Substitution  # running answer, kept restricted to the query variables
    ceiling: int
    steps: int
    trace: tuple[tuple[int, int], ...]


def _advance(sigma: Substitution, unifier: Substitution, n0: int) -> Substitution:
    """Push one resolution step through the restricted answer substitution."""
    return Substitution({i: apply(unifier, sigma.get(i)) for i in range(1, n0 + 1)})


def sld_solve(program: Program, goals: Sequence[Atom],
              limits: SldLimits | None = None) -> SldResult:
    """Enumerate answers for the conjunction `goals` under the given limits."""
    limits = limits or SldLimits()
    goals = tuple(goals)
    for g in goals:
        program.check_atom(g)
    n0 = max_var(goals)

    answers: list[Answer] = []
    seen: set[Substitution] = set()

    def sweep(budget: int) -> bool:
        """One depth-first pass with a per-derivation step budget.

        Returns True when some derivation was cut off by the budget.
        """
        cutoff = False
        stack = [_Node(goals, Substitution.identity(), n0, 0, ())]
        while stack:
            node = stack.pop()
            if not node.resolvent:
                restricted = _canonical_answer(node.sigma, n0)
                if restricted not in seen:
                    seen.add(restricted)
                    answers.append(Answer(restricted, node.steps, node.trace))
                    if len(answers) >= limits.max_answers:
                        return cutoff
                continue
            if node.steps >= budget:
                cutoff = True
                continue
            selected = node.resolvent[0]
            children = []
            for idx, clause in enumerate(program.clauses):
                renamed = rename_apart(clause, node.ceiling)
                unifier = mgu(selected, renamed.head)
                if unifier is None:
                    continue
                resolvent = apply(unifier, renamed.body + node.resolvent[1:])
                children.append(_Node(
                    resolvent,
                    _advance(node.sigma, unifier, n0),
                    node.ceiling + clause.var_count,
                    node.steps + 1,
                    node.trace + ((idx, node.ceiling),),
                ))
            stack.extend(reversed(children))
        return cutoff

    if limits.strategy == "dfs":
        cutoff = sweep(limits.max_steps)
        exhausted = cutoff and len(answers) < limits.max_answers
    else:
        budget = 1
        exhausted = False
        while True:
            cutoff = sweep(budget)
            if len(answers) >= limits.max_answers:
                break
            if not cutoff:
                break
            if budget >= limits.max_steps:
                exhausted = True
                break
            budget = min(budget * 2, limits.max_steps)
    return SldResult(tuple(answers), exhausted)


def replay_trace(program: Program, goals: Sequence[Atom], answer: Answer) -> Substitution:
    """Re-run a recorded derivation; returns the restricted answer it computes.

    Raises ValueError if any step fails to unify or the final goal is not
    empty, so tests can use it as an independent soundness check.
    """
    resolvent = tuple(goals)
    sigma = Substitution.identity()
    for idx, offset in answer.trace:
        if not resolvent:
            raise ValueError("trace continues past an empty goal")
        renamed = rename_apart(program.clauses[idx], offset)
        unifier = mgu(resolvent[0], renamed.head)
        if unifier is None:
            raise ValueError(f"trace step does not unify: clause {idx}")
        resolvent = apply(unifier, renamed.body + resolvent[1:])
        sigma = compose(unifier, sigma)
    if resolvent:
        raise ValueError("trace ends on a non-empty goal")
    return _canonical_answer(sigma, max_var(tuple(goals)))


# ---------------------------------------------------------------------------
# Bridging answers back to the term-matching prover
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BridgeEntry:
    answer: Answer
    instance: Atom
    status: Status


@dataclass(frozen=True)
class BridgeReport:
    goal: Atom
    entries: tuple[BridgeEntry, ...]
    exhausted: bool

    @property
    def violations(self) -> tuple[BridgeEntry, ...]:
        return tuple(e for e in self.entries if e.status is Status.FAILED)

    @property
    def inconclusive(self) -> tuple[BridgeEntry, ...]:
        return tuple(e for e in self.entries if e.status is Status.UNKNOWN)

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            tag = "BRIDGE FAIL" if e.status is Status.FAILED else "BRIDGE OK"
            lines.append(f"{tag}  goal={print_atom(self.goal)}  "
                         f"answer={e.answer.bindings}  instance={print_atom(e.instance)}  "
                         f"tm={e.status}")
        if not self.entries:
            lines.append(f"BRIDGE OK  goal={print_atom(self.goal)}  (no answers)")
        return "\n".join(lines) + "\n"


def check_bridge(program: Program, goal: Atom, limits: SldLimits | None = None,
                 tm_depth: int | None = None) -> BridgeReport:
    """For each answer s, prove the s-instance of the goal by term matching.

    A Failed instance is a soundness violation and must never occur; Unknown
    entries are merely inconclusive. With `tm_depth` None the prover gets
    three times the answer's step count.
    """
    result = sld_solve(program, [goal], limits)
    entries = []
    for ans in result.answers:
        instance = apply(ans.bindings, goal)
        depth = tm_depth if tm_depth is not None else max(1, 3 * ans.steps)
        entries.append(BridgeEntry(ans, instance, tm_prove(program, instance, depth).status))
    return BridgeReport(goal, tuple(entries), result.exhausted)
