"""Presentations: a theory paired with a monad it presents.

Each operation of arity ``k`` is interpreted as an element of ``T{0..k-1}`` and a
term over variables ``xs`` denotes an element of ``T(xs)`` by Kleisli extension.
``term_of`` goes the other way and picks a normal-form term for every element;
the two are inverse on carriers, which the tests check exhaustively.

With ``term_of`` a table algebra of the theory becomes an Eilenberg-Moore
algebra: the structure map sends ``m`` to the value of ``term_of(m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from . import monads as mo
from .free_algebra import enumerate_terms, evaluate_term
from .theory import App, Equation, OpSymbol, Term, Theory, Var, add_constants, builtin_theory, term_key


@dataclass
class Presentation:
    theory: Theory
    monad: mo.FiniteMonad
    operations: Mapping  # op name -> element of monad.carrier(range(arity))
    term_of: Callable  # (xs, m) -> Term with Var leaves named by elements of xs

    def interpret(self, t: Term, xs: Sequence):
        """The element of T(xs) denoted by ``t``; variables must be elements of ``xs``."""
        xs = tuple(xs)
        if isinstance(t, Var):
            return self.monad.unit(xs, t.name)
        k = len(t.args)
        dom = tuple(range(k))
        f = {i: self.interpret(a, xs) for i, a in enumerate(t.args)}
        return self.monad.kleisli(dom, xs, f)(self.operations[t.op])

    def structure(self, carrier: Sequence, tables: Mapping) -> Callable:
        """Structure map T(carrier) -> carrier of the table algebra ``tables``."""
        carrier = tuple(carrier)
        env = {a: a for a in carrier}
        cache: dict = {}

        def alpha(m):
            v = cache.get(m)
            if v is None:
                v = cache[m] = evaluate_term(self.term_of(carrier, m), tables, env)
            return v

        return alpha


def _fold(op: str, items: Sequence[Term], empty: Term | None) -> Term:
    if not items:
        if empty is None:
            raise ValueError(f"no {op}-term for the empty case")
        return empty
    out = items[-1]
    for t in reversed(items[:-1]):
        out = App(op, (t, out))
    return out


def _ordered(xs: Sequence, values) -> list:
    pos = {x: i for i, x in enumerate(xs)}
    return sorted(values, key=pos.__getitem__)


def _identity_presentation(monad) -> Presentation:
    return Presentation(builtin_theory("Empty"), monad, {}, lambda xs, m: Var(m))


def _powerset_presentation(monad: mo.PowersetMonad) -> Presentation:
    if monad.nonempty:
        theory = builtin_theory("JoinSemilattice")
        ops = {"join": frozenset((0, 1))}
        empty = None
    else:
        theory = builtin_theory("Semilattice")
        ops = {"join": frozenset((0, 1)), "bot": frozenset()}
        empty = App("bot")

    def term_of(xs, m):
        return _fold("join", [Var(x) for x in _ordered(xs, m)], empty)

    return Presentation(theory, monad, ops, term_of)


def _list_presentation(monad: mo.ListMonad) -> Presentation:
    return Presentation(builtin_theory("Monoid"), monad, {"mul": (0, 1), "one": ()},
                        lambda xs, m: _fold("mul", [Var(x) for x in m], App("one")))


def _multiset_presentation(monad: mo.MultisetMonad) -> Presentation:
    ops = {"mul": frozenset(((0, 1), (1, 1))), "one": frozenset()}

    def term_of(xs, m):
        counts = dict(m)
        seq = [Var(x) for x in _ordered(xs, counts) for _ in range(counts[x])]
        return _fold("mul", seq, App("one"))

    return Presentation(builtin_theory("CommMonoid"), monad, ops, term_of)


def _state_presentation(monad: mo.StateMonad) -> Presentation:
    n = monad.states
    theory = builtin_theory(f"State({n})")
    ops = {"lookup": tuple((s, s) for s in range(n))}
    for v in range(n):
        ops[f"update{v}"] = tuple((v, 0) for _ in range(n))

    def term_of(xs, m):
        return App("lookup", tuple(App(f"update{s2}", (Var(x),)) for s2, x in m))

    return Presentation(theory, monad, ops, term_of)


def _free_presentation(monad: mo.FreeMonad, theory: Theory) -> Presentation:
    ops = {name: monad.node(name, [monad.atom_char(i) for i in range(k)]) for name, k in monad.ops}
    return Presentation(theory, monad, ops, lambda xs, m: monad.to_term(m))


def _wellorder_presentation(monad: mo.WellOrderMonad, size: int) -> Presentation:
    theory = builtin_theory(f"WellOrder({size})")
    ops = {"bot": mo.BOT}
    ops.update({f"iota{k}": tuple(range(k)) for k in range(2, size + 1)})

    def term_of(xs, m):
        if m is mo.BOT:
            return App("bot")
        if len(m) == 1:
            return Var(m[0])
        if len(m) > size:
            return App("bot")
        return App(f"iota{len(m)}", tuple(Var(x) for x in m))

    return Presentation(theory, monad, ops, term_of)


def _exception_presentation(monad: mo.ExceptionMonad, inner: Presentation) -> Presentation:
    labels = [str(e) for e in monad.exceptions]
    theory = add_constants(inner.theory, labels)
    const_name = {e: n for e, n in zip(monad.exceptions, sorted(set(theory.op_names) - set(inner.theory.op_names)))}
    base = monad.inner
    ops = {}
    for name, elem in inner.operations.items():
        k = inner.theory.arity[name]
        dom = tuple(range(k))
        ops[name] = base.fmap(dom, monad.tagged(dom), {i: mo.Inl(i) for i in dom})(elem)
    for e, name in const_name.items():
        ops[name] = base.unit(monad.tagged(()), mo.Inr(e))

    def relabel(t: Term) -> Term:
        if isinstance(t, Var):
            tag = t.name
            return Var(tag.value) if isinstance(tag, mo.Inl) else App(const_name[tag.value])
        return App(t.op, tuple(relabel(a) for a in t.args))

    def term_of(xs, m):
        return relabel(inner.term_of(monad.tagged(xs), m))

    return Presentation(theory, monad, ops, term_of)


def presentation_for(monad: mo.FiniteMonad | str, size: int = 2) -> Presentation:
    """The catalogue presentation of a monad.

    ``size`` only matters for the well-order monad, whose theory is lowered to a
    carrier of that size.
    """
    if isinstance(monad, str):
        monad = mo.builtin_monad(monad)
    if isinstance(monad, mo.IdentityMonad):
        return _identity_presentation(monad)
    if isinstance(monad, mo.PowersetMonad) and not isinstance(monad, mo.BrokenPowersetMonad):
        return _powerset_presentation(monad)
    if isinstance(monad, mo.ListMonad):
        return _list_presentation(monad)
    if isinstance(monad, mo.MultisetMonad):
        return _multiset_presentation(monad)
    if isinstance(monad, mo.StateMonad):
        return _state_presentation(monad)
    if isinstance(monad, mo.WellOrderMonad):
        return _wellorder_presentation(monad, size)
    if isinstance(monad, mo.FreeMonad):
        names = [n for n, _ in monad.ops]
        if names == ["read"]:
            theory = builtin_theory(f"Input({monad.ops[0][1]})")
        elif names and all(n == f"out{i}" and k == 1 for i, (n, k) in enumerate(monad.ops)):
            theory = builtin_theory(f"Output({len(names)})")
        elif monad.ops == (("u0", 2), ("u1", 2)):
            theory = builtin_theory("Sigma22Free")
        else:
            theory = Theory.make(monad.name, [OpSymbol(n, k) for n, k in monad.ops])
        return _free_presentation(monad, theory)
    if isinstance(monad, mo.ExceptionMonad):
        return _exception_presentation(monad, presentation_for(monad.inner, size + len(monad.exceptions)))
    raise KeyError(f"no presentation known for {monad.name}")


PRESENTED_MONADS = (
    "identity",
    "powerset:full",
    "powerset:nonempty",
    "list:cap=3",
    "multiset:cap=3",
    "state:S=2",
    "wellorder",
    "free:I=2:depth=1",
    "output:O=2:depth=1",
    "sigma22:depth=1",
)


# -- quotient presentations ----------------------------------------------------


@dataclass
class QuotientReport:
    terms: int
    source_classes: int
    target_classes: int
    added: int
    morphism: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"terms": self.terms, "sourceClasses": self.source_classes, "targetClasses": self.target_classes,
                "added": self.added, "morphism": self.morphism}


def quotient_presentation(alpha: mo.MonadMorphism, source: Presentation, depth: int, n_vars: int = 2,
                          check_bound: int = 2) -> tuple:
    """Extend the source theory by equations between terms whose images under ``alpha`` agree.

    Terms up to ``depth`` over ``n_vars`` variables are grouped by their image in the
    target monad.  Inside a group, terms with the same source image are already equal
    in the source theory, so one equation per extra source class suffices: each
    class's least term is equated with the group's least term.
    """
    check = mo.check_morphism(alpha, check_bound)
    if not check.surjective:
        raise ValueError(f"{alpha.name} is not componentwise surjective up to size {check_bound}")
    if not check.ok:
        raise ValueError(f"{alpha.name} is not a monad morphism: {check.witness}")
    xs = tuple(f"x{i}" for i in range(n_vars))
    terms = enumerate_terms(source.theory.signature, xs, depth)
    groups: dict = {}
    for t in terms:
        m = source.interpret(t, xs)
        groups.setdefault(alpha(xs, m), {}).setdefault(m, []).append(t)
    added = []
    source_classes = 0
    for image, by_source in groups.items():
        source_classes += len(by_source)
        leaders = sorted((min(ts, key=term_key) for ts in by_source.values()), key=term_key)
        for t in leaders[1:]:
            added.append(Equation(frozenset(xs), leaders[0], t))
    theory = Theory.make(f"{source.theory.name}/{alpha.name}", source.theory.signature,
                         list(source.theory.equations) + added)
    report = QuotientReport(len(terms), source_classes, len(groups), len(added), check.to_dict())
    return theory, report
