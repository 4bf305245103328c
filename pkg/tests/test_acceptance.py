"""The ten acceptance checks; each prints one pass/fail line (also repeated in the pytest summary)."""

from __future__ import annotations

import time

import pytest

from forge import free_algebra as fa
from forge import metalang as ml
from forge import monads as mo
from forge import subsume as sb
from forge import tensor as tn
from forge.models import find_models
from forge.theory import builtin_theory, semilattice

pytestmark = pytest.mark.slow


def test_monad_laws(criterion):
    with criterion(1, "Kleisli laws for every built-in monad at size 2, well-order unit laws at 3") as c:
        start = time.perf_counter()
        failed, sampled = [], []
        for name in mo.BUILTIN_MONADS:
            rep = mo.check_monad_laws(mo.builtin_monad(name), 2)
            if rep.status != "pass":
                failed.append(name)
            if rep.sampled:
                sampled.append(name)
        wo = mo.check_monad_laws(mo.builtin_monad("wellorder"), 3, laws=("left-unit", "right-unit"))
        seconds = time.perf_counter() - start
        c.note(f"{len(mo.BUILTIN_MONADS)} monads, {seconds:.0f}s")
        assert not failed, failed
        assert not sampled, sampled
        assert wo.status == "pass" and not wo.sampled
        assert seconds < 300


def test_free_semilattice(criterion):
    with criterion(2, "free semilattice on X has 2^|X| classes, |X| = 0..3") as c:
        counts = []
        for k in range(4):
            q = fa.free_algebra(semilattice(), [f"x{i}" for i in range(k)], 3)
            assert q.closed
            counts.append(q.class_count)
        c.note(f"classes {counts}")
        assert counts == [1, 2, 4, 8]


def test_state_tensor(criterion):
    with criterion(3, "free Semilattice x State(S) on X matches S -> P(S x X)") as c:
        start = time.perf_counter()
        found = []
        for s, x, expected in ((1, 1, 2), (1, 2, 4), (2, 1, 16)):
            rep = tn.verify_state_tensor(s, x)
            found.append(rep.found)
            assert rep.status == "pass"
            assert rep.found == rep.expected == expected
            assert rep.bijection and rep.homomorphism and rep.generators_respected
        seconds = time.perf_counter() - start
        c.note(f"sizes {found}, {seconds:.1f}s")
        assert seconds < 600


def test_commutativity(criterion):
    with criterion(4, "powerset commutative; state and well-order not, with replayable witnesses") as c:
        power = mo.is_commutative(mo.builtin_monad("powerset:full"), 2)
        assert power.commutative
        for name in ("state:S=2", "wellorder"):
            m = mo.builtin_monad(name)
            rep = mo.is_commutative(m, 2)
            assert not rep.commutative
            assert mo.replay_commute_witness(m, rep.witness)
            c.note(f"{name} witness sizes {rep.witness['sizes']}")


def test_spurious_analog(criterion):
    with criterion(5, "SpuriousAnalog(3) has one model of size 1 and none of size 2") as c:
        th = builtin_theory("SpuriousAnalog(3)")
        one, two = len(list(find_models(th, 1))), len(list(find_models(th, 2)))
        c.note(f"size 1: {one}, size 2: {two}")
        assert (one, two) == (1, 0)


def test_theorify(criterion):
    with criterion(6, "theory-of-a-monad schemas hold at arity 2 for every built-in monad") as c:
        bad = {}
        for name in mo.BUILTIN_MONADS:
            _, rep = mo.theorify(mo.builtin_monad(name), 2, build_equations=False)
            if rep.violations:
                bad[name] = rep.violations
        c.note(f"{len(mo.BUILTIN_MONADS)} monads, violations {sum(bad.values())}")
        assert not bad, bad


def test_cross_validation(criterion):
    with criterion(7, "syntactic and semantic tensor checks agree on 500 sampled algebras") as c:
        rep = tn.cross_validate(500, seed=0)
        c.note(f"agree {rep.agree}/{rep.samples}, both pass {rep.both_pass}, both fail {rep.both_fail}")
        assert rep.samples >= 500
        assert rep.ok, rep.disagreements[:1]


def test_enumeration(criterion):
    with criterion(8, "canonical count equals brute force; well-order x Sigma22Free counts monotone") as c:
        start = time.perf_counter()
        sl, un = semilattice(), builtin_theory("Unary")
        canonical = tn.enumerate_tensor_algebras(sl, un, tn.SearchConfig(1, 3))
        brute = tn.enumerate_tensor_algebras(sl, un, tn.SearchConfig(1, 3, symmetry_breaking=False))
        assert canonical.counts == brute.counts
        wo = tn.enumerate_tensor_algebras(tn.lowered_wellorder, builtin_theory("Sigma22Free"),
                                          tn.SearchConfig(2, 3, count_only=True))
        seconds = time.perf_counter() - start
        c.note(f"Semilattice x Unary {canonical.counts}; WellOrder x Sigma22Free {wo.counts}; {seconds:.0f}s")
        assert not wo.partial
        assert wo.counts[2] <= wo.counts[3]
        assert seconds < 900


def test_subsumption(criterion):
    with criterion(9, "union splitting on 1000 random lassos; reduction agrees with chain search on 50") as c:
        ram = sb.ramsey(1000, 4, seed=0)
        cat = sb.check_catalog()
        c.note(f"union splitting {ram.holds}/{ram.samples}, catalogue {cat.agree}/{cat.instances}")
        assert ram.ok and ram.samples == 1000
        assert cat.ok and cat.instances == 50


def test_metalanguage(criterion):
    with criterion(10, "law programs equivalent at size 2; interpreter commutation agrees with direct check") as c:
        failed, sampled, disagree = [], [], []
        for name in mo.BUILTIN_MONADS:
            m = mo.builtin_monad(name)
            for law, rep in ml.check_laws(m, 2).items():
                if not rep.equivalent:
                    failed.append((name, law))
                if rep.sampled:
                    sampled.append(f"{name} {law}")
            if not ml.commute_agreement(m, 2).ok:
                disagree.append(name)
        c.note("sampled: " + (", ".join(sampled) or "none"))
        assert not failed, failed
        assert not disagree, disagree
