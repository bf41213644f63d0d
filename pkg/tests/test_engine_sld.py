"""SLD resolution tests: answers, traces, strategies, and the bridge check."""

from __future__ import annotations

import random

import pytest

from matchlog import (
    Fn,
    SldLimits,
    Status,
    Substitution,
    Var,
    check_bridge,
    parse_atom,
    replay_trace,
    sld_solve,
)

from helpers import random_fo_program


def test_gc_first_answer(gc):
    g, _ = parse_atom("connected(X, Y)")
    result = sld_solve(gc, [g])
    assert len(result.answers) == 1
    ans = result.answers[0]
    assert ans.bindings == Substitution({2: Var(1)})
    assert ans.steps == 1
    assert not result.exhausted


def test_listnat_first_answer(listnat):
    g, _ = parse_atom("list(cons(X, Y))")
    result = sld_solve(listnat, [g])
    assert result.answers[0].bindings == Substitution({1: Fn("0"), 2: Fn("nil")})
    assert not result.exhausted


def test_bad_exhausts(bad):
    g, _ = parse_atom("bad(X)")
    result = sld_solve(bad, [g], SldLimits(max_steps=100))
    assert result.answers == ()
    assert result.exhausted
    result = sld_solve(bad, [g], SldLimits(max_steps=100, strategy="dfs"))
    assert result.answers == () and result.exhausted


def test_empty_goal(listnat):
    result = sld_solve(listnat, [])
    assert len(result.answers) == 1
    assert result.answers[0].bindings.is_identity
    assert result.answers[0].steps == 0


def test_limits_validation():
    with pytest.raises(ValueError):
        SldLimits(max_steps=0)
    with pytest.raises(ValueError):
        SldLimits(strategy="bfs")


def test_answers_replay(listnat_plus, gc):
    for program, text, k in ((listnat_plus, "list(X)", 4), (gc, "connected(X, Y)", 2)):
        g, _ = parse_atom(text, program.signature)
        result = sld_solve(program, [g], SldLimits(max_answers=k, max_steps=500))
        assert result.answers
        for ans in result.answers:
            assert replay_trace(program, [g], ans) == ans.bindings


def test_duplicate_answers_collapse(listnat_plus):
    # two distinct derivations of the same ground goal yield one empty answer
    g, _ = parse_atom("list(cons(0, nil))")
    result = sld_solve(listnat_plus, [g], SldLimits(max_answers=5, max_steps=100))
    assert len(result.answers) == 1
    assert result.answers[0].bindings.is_identity


def test_strategies_find_same_answer_set(listnat, listnat_plus, gc):
    # queries whose full SLD tree is finite, so both strategies enumerate it
    queries = [
        (gc, "connected(X, Y)"),
        (gc, "edge(X, Y)"),
        (listnat, "list(cons(0, nil))"),
        (listnat, "nat(s(s(X)))"),
        (listnat_plus, "list(cons(0, nil))"),
    ]
    for program, text in queries:
        g, _ = parse_atom(text, program.signature)
        found = {}
        for strategy in ("dfs", "iddfs"):
            limits = SldLimits(max_steps=60, max_answers=16, strategy=strategy)
            result = sld_solve(program, [g], limits)
            assert not result.exhausted
            found[strategy] = {a.bindings for a in result.answers}
        assert found["dfs"] == found["iddfs"]


def test_renaming_hygiene(listnat_plus):
    from matchlog import apply, mgu, rename_apart
    from matchlog.syntax import atom_vars

    g, n = parse_atom("list(cons(X, Y))")
    result = sld_solve(listnat_plus, [g], SldLimits(max_answers=3, max_steps=200))
    for ans in result.answers:
        offsets = [off for _, off in ans.trace]
        assert all(o >= n for o in offsets)
        assert offsets == sorted(offsets)
        # replay step by step: renamed clause variables never collide with
        # variables already present in the resolvent
        resolvent = (g,)
        for idx, offset in ans.trace:
            renamed = rename_apart(listnat_plus.clauses[idx], offset)
            live = {v for a in resolvent for v in atom_vars(a)}
            fresh = {v for a in (renamed.head,) + renamed.body for v in atom_vars(a)}
            assert not live & fresh
            unifier = mgu(resolvent[0], renamed.head)
            resolvent = apply(unifier, renamed.body + resolvent[1:])
        assert resolvent == ()


def test_conjunction_goal(gc):
    from matchlog import parse_goal
    goal = parse_goal("edge(X, Z), connected(Z, Y)", gc.signature)
    result = sld_solve(gc, goal.atoms, SldLimits(max_steps=50, max_answers=2))
    assert result.answers == ()  # no edge facts exist
    assert not result.exhausted


def test_bridge_reports(listnat, gc, bad):
    g, _ = parse_atom("list(cons(X, Y))")
    report = check_bridge(listnat, g)
    assert len(report.entries) == 1
    entry = report.entries[0]
    assert entry.instance == parse_atom("list(cons(0, nil))")[0]
    assert entry.status is Status.PROVED
    assert report.violations == ()

    g, _ = parse_atom("connected(X, Y)")
    report = check_bridge(gc, g)
    assert report.entries[0].instance == parse_atom("connected(X, X)")[0]
    assert report.entries[0].status is Status.PROVED

    g, _ = parse_atom("bad(X)")
    report = check_bridge(bad, g, SldLimits(max_steps=64))
    assert report.entries == () and report.exhausted
    assert "no answers" in report.to_text()


def test_bridge_never_fails_on_random_programs():
    # small step budget: bounded DFS over a branchy looping program is
    # exponential in the budget, and violations would show up early anyway
    rng = random.Random(59)
    for i in range(12):
        program = random_fo_program(rng, existential=bool(i % 2))
        for pred, arity in program.signature.predicate_arities.items():
            g, _ = parse_atom(
                pred + ("(" + ", ".join(f"V{j}" for j in range(arity)) + ")" if arity else ""),
                program.signature)
            report = check_bridge(program, g, SldLimits(max_steps=12, max_answers=3))
            assert report.violations == ()
