from __future__ import annotations

import math

import pytest
from hypothesis import given, settings, strategies as st

from forge import monads as mo
from forge.presentation import PRESENTED_MONADS, presentation_for, quotient_presentation

FAST = ["identity", "state:S=2", "powerset:full", "powerset:nonempty", "list:cap=3", "multiset:cap=3",
        "cont:R=2", "wellorder", "output:O=2:depth=2", "sigma22:depth=1", "exc:E=1:identity",
        "exc:E=1:powerset:full", "exc:E=1:wellorder"]


def free_count(ops, n, depth):
    count = n
    for _ in range(depth):
        count = n + sum(count ** k for k in ops)
    return count


CARRIER_SIZE = {
    "identity": lambda n: n,
    "state:S=2": lambda n: (2 * n) ** 2,
    "powerset:full": lambda n: 2 ** n,
    "powerset:nonempty": lambda n: 2 ** n - 1,
    "list:cap=3": lambda n: sum(n ** k for k in range(4)),
    "multiset:cap=3": lambda n: math.comb(n + 3, 3),
    "cont:R=2": lambda n: 2 ** (2 ** n),
    "wellorder": lambda n: 1 + sum(math.perm(n, k) for k in range(1, n + 1)),
    "free:I=2:depth=2": lambda n: free_count([2], n, 2),
    "output:O=2:depth=2": lambda n: free_count([1, 1], n, 2),
    "sigma22:depth=1": lambda n: free_count([2, 2], n, 1),
    "exc:E=1:identity": lambda n: n + 1,
    "exc:E=1:powerset:full": lambda n: 2 ** (n + 1),
    "exc:E=1:wellorder": lambda n: 1 + sum(math.perm(n + 1, k) for k in range(1, n + 2)),
}


@pytest.mark.parametrize("name", sorted(CARRIER_SIZE))
def test_carrier_sizes(name):
    m = mo.builtin_monad(name)
    for n in range(3):
        assert len(m.carrier(mo.atoms(n))) == CARRIER_SIZE[name](n)


@st.composite
def law_instances(draw):
    name = draw(st.sampled_from(FAST))
    m = mo.builtin_monad(name)
    sizes = [draw(st.integers(1, 2)) for _ in range(3)]
    xs, ys, zs = mo.atoms(sizes[0], "a"), mo.atoms(sizes[1], "b"), mo.atoms(sizes[2], "c")
    tx, ty, tz = m.carrier(xs), m.carrier(ys), m.carrier(zs)
    if not (tx and ty and tz):
        return None
    f = {x: draw(st.sampled_from(ty)) for x in xs}
    g = {y: draw(st.sampled_from(tz)) for y in ys}
    return m, xs, ys, zs, draw(st.sampled_from(tx)), f, g


@settings(max_examples=200, deadline=None)
@given(law_instances())
def test_kleisli_laws_on_random_instances(inst):
    if inst is None:
        return
    m, xs, ys, zs, p, f, g = inst
    assert m.kleisli(xs, xs, {x: m.unit(xs, x) for x in xs})(p) == p
    for x in xs:
        assert m.kleisli(xs, ys, f)(m.unit(xs, x)) == f[x]
    g_ext = m.kleisli(ys, zs, g)
    lhs = g_ext(m.kleisli(xs, ys, f)(p))
    rhs = m.kleisli(xs, zs, {x: g_ext(f[x]) for x in xs})(p)
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(st.sampled_from(FAST), st.data())
def test_fmap_preserves_identity_and_composition(name, data):
    m = mo.builtin_monad(name)
    xs, ys, zs = mo.atoms(2, "a"), mo.atoms(2, "b"), mo.atoms(1, "c")
    tx = m.carrier(xs)
    if not tx:
        return
    p = data.draw(st.sampled_from(tx))
    h = {x: data.draw(st.sampled_from(ys)) for x in xs}
    k = {y: zs[0] for y in ys}
    assert m.fmap(xs, xs, {x: x for x in xs})(p) == p
    assert m.fmap(ys, zs, k)(m.fmap(xs, ys, h)(p)) == m.fmap(xs, zs, {x: k[h[x]] for x in xs})(p)


@pytest.mark.parametrize("name", ["identity", "powerset:full", "list:cap=3", "wellorder", "cont:R=2"])
def test_checker_passes_fast_monads(name):
    rep = mo.check_monad_laws(mo.builtin_monad(name), 2)
    assert rep.status == "pass", rep.witness
    assert set(rep.checked) == {"left-unit", "right-unit", "associativity"}
    assert not rep.sampled


def test_broken_powerset_fails_with_replayable_witness():
    m = mo.builtin_monad("powerset:broken")
    rep = mo.check_monad_laws(m, 2)
    assert rep.status == "fail"
    assert rep.witness is not None
    assert mo.replay_law_witness(m, rep.witness)
    # the witness does not reproduce on the correct monad
    assert not mo.replay_law_witness(mo.builtin_monad("powerset:full"), rep.witness)


def test_bounded_monads_are_flagged():
    rep = mo.check_monad_laws(mo.builtin_monad("sigma22:depth=1"), 1)
    assert rep.bounded
    assert rep.to_dict()["boundedFragment"]


def test_sampled_associativity_is_flagged():
    rep = mo.check_monad_laws(mo.builtin_monad("cont:R=2"), 2, laws=["associativity"], exhaust_limit=10,
                              samples=200)
    assert rep.sampled and rep.status == "pass"


@pytest.mark.parametrize("name, expected", [
    ("identity", True), ("powerset:full", True), ("multiset:cap=3", True),
    ("state:S=2", False), ("wellorder", False), ("list:cap=3", False),
])
def test_commutativity(name, expected):
    m = mo.builtin_monad(name)
    rep = mo.is_commutative(m, 2)
    assert rep.commutative is expected
    if not expected:
        assert mo.replay_commute_witness(m, rep.witness)
        w = rep.witness
        assert w["lhs"] != w["rhs"]


def test_commutes_on_explicit_elements():
    m = mo.builtin_monad("powerset:full")
    xs, ys = mo.atoms(2, "a"), mo.atoms(1, "b")
    res = mo.commutes(m, xs, ys, frozenset(xs), frozenset(ys))
    assert res.commutes
    assert res.lhs == frozenset({("a0", "b0"), ("a1", "b0")})


@pytest.mark.parametrize("name", FAST)
def test_theorify_has_no_violations(name):
    _, rep = mo.theorify(mo.builtin_monad(name), 1, build_equations=False)
    assert rep.violations == 0


def test_theorify_counts_operations():
    th, rep = mo.theorify(mo.builtin_monad("powerset:full"), 2)
    # one operation per element of T{a0..a(k-1)}, k = 0, 1, 2
    assert rep.operations == 1 + 2 + 4 == len(th.signature)
    assert rep.unit_equations == 1 + 2


def test_theorify_reports_broken_monad():
    _, rep = mo.theorify(mo.builtin_monad("powerset:broken"), 2, build_equations=False)
    assert rep.violations > 0 and rep.witness is not None


def test_morphisms():
    assert mo.check_morphism(mo.list_to_multiset(), 2).ok
    assert mo.check_morphism(mo.nonempty_to_collapse(), 2).ok
    assert mo.check_morphism(mo.identity_morphism(mo.builtin_monad("state:S=2")), 2).ok


def test_non_morphism_is_rejected():
    fake = mo.MonadMorphism(mo.builtin_monad("list:cap=3"), mo.builtin_monad("list:cap=3"),
                            lambda xs, m: tuple(reversed(m))[:1] if m else m, "head-of-reverse")
    rep = mo.check_morphism(fake, 2)
    assert not rep.ok and rep.witness is not None


def test_quotient_presentation_adds_commutativity():
    alpha = mo.list_to_multiset()
    source = presentation_for("list:cap=3")
    theory, rep = quotient_presentation(alpha, source, depth=2)
    assert rep.added > 0
    assert rep.target_classes < rep.source_classes
    xs = ("x0", "x1")
    added = [eq for eq in theory.equations if eq not in source.theory.equations]
    assert len(added) == rep.added
    for eq in added:
        assert alpha(xs, source.interpret(eq.lhs, xs)) == alpha(xs, source.interpret(eq.rhs, xs))


@pytest.mark.parametrize("name", PRESENTED_MONADS)
def test_presentations_denote_every_element(name):
    pres = presentation_for(name)
    xs = mo.atoms(2)
    for m in pres.monad.carrier(xs):
        assert pres.interpret(pres.term_of(xs, m), xs) == m


def test_unknown_monad():
    with pytest.raises(ValueError):
        mo.builtin_monad("nosuch")
    with pytest.raises(ValueError):
        mo.builtin_monad("state")
