from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from forge import free_algebra as fa
from forge.models import find_models
from forge.theory import App, OpSymbol, Var, app, builtin_theory, semilattice, theory_tensor

SMALL_THEORIES = ["Semilattice", "Monoid", "CommMonoid", "Unary", "State(2)"]


def term_count(signature, n_gens, depth):
    """Terms of height <= depth, by the recursion c(0) = g + constants, c(d) = g + sum c(d-1)^arity."""
    count = n_gens + sum(1 for op in signature if op.arity == 0)
    for _ in range(depth):
        count = n_gens + sum(count ** op.arity for op in signature)
    return count


@given(st.lists(st.integers(0, 2), max_size=3), st.integers(0, 2), st.integers(0, 2))
def test_enumerate_terms_matches_recursion(arities, n_gens, depth):
    sig = [OpSymbol(f"o{i}", k) for i, k in enumerate(arities)]
    terms = fa.enumerate_terms(sig, [f"x{i}" for i in range(n_gens)], depth)
    assert len(terms) == term_count(sig, n_gens, depth)
    assert len(set(terms)) == len(terms)


def subset_of(t):
    if isinstance(t, Var):
        return frozenset({t.name})
    if t.op == "bot":
        return frozenset()
    return subset_of(t.args[0]) | subset_of(t.args[1])


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_free_semilattice_is_powerset(k):
    gens = [f"x{i}" for i in range(k)]
    q = fa.free_algebra(semilattice(), gens, 4)
    assert q.closed
    assert q.class_count == 2 ** k
    # independent check: class representatives denote distinct subsets of the generators
    images = {subset_of(c.rep) for c in q.classes}
    assert images == {frozenset(s) for r in range(k + 1) for s in itertools.combinations(gens, r)}


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(SMALL_THEORIES), st.integers(1, 2), st.data())
def test_classes_are_sound_in_every_model(name, n_gens, data):
    th = builtin_theory(name)
    gens = [f"x{i}" for i in range(n_gens)]
    q = fa.free_algebra(th, gens, 2, budget=20_000)
    models = list(find_models(th, 2, limit=50))
    if not models:
        return
    tables = data.draw(st.sampled_from(models))
    env = {g: data.draw(st.integers(0, 1)) for g in gens}
    by_class: dict = {}
    for t in fa.enumerate_terms(th.signature, gens, 2):
        c = q.class_of(t)
        if c is not None:
            by_class.setdefault(c, set()).add(fa.evaluate_term(t, tables, env))
    assert all(len(vals) == 1 for vals in by_class.values())


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(SMALL_THEORIES), st.integers(0, 2), st.integers(1, 3))
def test_class_counts_grow_with_depth(name, n_gens, depth):
    th = builtin_theory(name)
    q = fa.free_algebra(th, [f"x{i}" for i in range(n_gens)], depth, budget=50_000)
    assert list(q.history) == sorted(q.history)
    assert q.history[-1] == q.class_count


def test_free_algebra_without_equations_has_all_terms():
    th = builtin_theory("Unary")
    q = fa.free_algebra(th, ["a"], 3)
    assert q.class_count == term_count(th.signature, 1, 3)
    assert not q.closed


def test_closed_means_table_is_total():
    q = fa.free_algebra(builtin_theory("Monoid"), [], 3)
    assert q.closed and q.class_count == 1
    assert q.op_table("mul") == {(0, 0): 0}


def test_budget_exceeded_reports_partial_quotient():
    with pytest.raises(fa.BudgetExceeded) as err:
        fa.free_algebra(builtin_theory("Sigma22Free"), ["a", "b"], 4, budget=100)
    assert err.value.partial is not None
    assert err.value.partial.partial


def test_decide_equal():
    x, y = Var("x"), Var("y")
    assert fa.decide_equal(semilattice(), app("join", x, y), app("join", y, x), 2) == "equal"
    assert fa.decide_equal(semilattice(), app("join", x, y), x, 2) == "unknown"


def test_tensor_of_semilattice_with_itself_collapses_joins():
    th = theory_tensor(semilattice(), semilattice())
    q = fa.free_algebra(th, ["a"], 3)
    assert q.class_of(app("left.join", Var("a"), App("right.bot"))) == q.class_of(Var("a"))


def test_algebra_of_table_reports_violation():
    th = semilattice()
    good = {"bot": {(): 0}, "join": {(a, b): max(a, b) for a in range(2) for b in range(2)}}
    assert fa.algebra_of_table(th, [0, 1], good).ok
    bad = {"bot": {(): 1}, "join": good["join"]}
    check = fa.algebra_of_table(th, [0, 1], bad)
    assert not check.ok
    assert check.lhs_value != check.rhs_value
    with pytest.raises(ValueError):
        fa.algebra_of_table(th, [0, 1], {"bot": {(): 0}})


def test_report_schema():
    d = fa.free_algebra(semilattice(), ["a"], 2).to_dict(sample=3)
    assert d["schema"] == fa.REPORT_SCHEMA
    assert len(d["opTableSample"]) == 3
