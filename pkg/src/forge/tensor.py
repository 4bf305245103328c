"""Tensor algebras: validation, enumeration of reachable ones, and free tensor algebras.

Two views of a tensor algebra are supported.  Semantically it is one carrier
with an Eilenberg-Moore structure for each of two monads, related by the tensor
law.  Syntactically it is one carrier with operation tables for two theories in
which every operation of one commutes with every operation of the other.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from . import monads as mo
from .free_algebra import DEFAULT_BUDGET, BudgetExceeded, EGraph, QuotientAlgebra, evaluate_term, free_algebra
from .models import SearchStats, find_generated_models, find_models
from .presentation import presentation_for
from .theory import (_disjoint, _renamed, App, Equation, OpSymbol, Term, Theory, builtin_theory, operations, rename_ops, semilattice,
                     state_theory, theory_tensor)


# -- Eilenberg-Moore algebras --------------------------------------------------


@dataclass
class EMAlgebra:
    monad: mo.FiniteMonad
    carrier: tuple
    structure: Callable  # element of monad.carrier(carrier) -> carrier element


@dataclass
class CheckResult:
    ok: bool
    checked: int = 0
    witness: dict | None = None
    partial: bool = False

    def to_dict(self) -> dict:
        out = {"ok": self.ok, "checked": self.checked, "partial": self.partial}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def check_em_algebra(alg: EMAlgebra, bound: int = 2) -> CheckResult:
    """alpha . unit = id, and alpha(f*(m)) = alpha(T(alpha . f)(m)) for f: Y -> T(carrier), |Y| <= bound."""
    mon, a, alpha = alg.monad, tuple(alg.carrier), alg.structure
    checked = 0
    for x in a:
        checked += 1
        v = alpha(mon.unit(a, x))
        if v != x:
            return CheckResult(False, checked, {"law": "unit", "x": x, "value": v})
    ta = mon.carrier(a)
    for ny in range(bound + 1):
        ys = mo.atoms(ny, "y")
        ty = mon.carrier(ys)
        for values in itertools.product(ta, repeat=ny):
            f = dict(zip(ys, values))
            ext = mon.kleisli(ys, a, f)
            collapsed = mon.fmap(ys, a, {y: alpha(f[y]) for y in ys})
            for m in ty:
                checked += 1
                lhs, rhs = alpha(ext(m)), alpha(collapsed(m))
                if lhs != rhs:
                    return CheckResult(False, checked, {
                        "law": "multiplication", "f": {y: mon.encode(v) for y, v in f.items()},
                        "m": mon.encode(m), "lhs": lhs, "rhs": rhs})
    return CheckResult(True, checked)


@dataclass
class TensorAlgebra:
    carrier: tuple
    t: EMAlgebra
    s: EMAlgebra


def check_tensor_law(alg: TensorAlgebra, y_bound: int = 2, z_bound: int = 2, budget: int | None = None) -> CheckResult:
    """For p in S Y, q in T Z and f: Y x Z -> carrier compare

        alpha(T(z |-> beta(S(y |-> f(y, z)) p)) q)   and   beta(S(y |-> alpha(T(z |-> f(y, z)) q)) p)

    where alpha is the T-structure and beta the S-structure.  ``budget`` caps the
    number of instances; hitting it returns a passing result flagged partial.
    """
    a = tuple(alg.carrier)
    tm, sm = alg.t.monad, alg.s.monad
    alpha, beta = alg.t.structure, alg.s.structure
    checked = 0
    for ny, nz in itertools.product(range(y_bound + 1), range(z_bound + 1)):
        ys, zs = mo.atoms(ny, "y"), mo.atoms(nz, "z")
        cells = list(itertools.product(ys, zs))
        sy, tz = sm.carrier(ys), tm.carrier(zs)
        for values in itertools.product(a, repeat=len(cells)):
            f = dict(zip(cells, values))
            s_maps = {z: sm.fmap(ys, a, {y: f[y, z] for y in ys}) for z in zs}
            t_maps = {y: tm.fmap(zs, a, {z: f[y, z] for z in zs}) for y in ys}
            for p in sy:
                inner_t = {z: beta(s_maps[z](p)) for z in zs}
                lhs_map = tm.fmap(zs, a, inner_t)
                for q in tz:
                    checked += 1
                    lhs = alpha(lhs_map(q))
                    rhs = beta(sm.fmap(ys, a, {y: alpha(t_maps[y](q)) for y in ys})(p))
                    if lhs != rhs:
                        return CheckResult(False, checked, {
                            "sizes": [ny, nz], "p": sm.encode(p), "q": tm.encode(q),
                            "f": [[str(y), str(z), f[y, z]] for y, z in cells], "lhs": lhs, "rhs": rhs})
                    if budget is not None and checked >= budget:
                        return CheckResult(True, checked, partial=True)
    return CheckResult(True, checked)


def check_commutation_tables(t: Theory, s: Theory, carrier: Sequence, tables_t: Mapping, tables_s: Mapping) -> CheckResult:
    """Every operation of ``t`` commutes with every operation of ``s`` under all assignments."""
    carrier = tuple(carrier)
    checked = 0
    for f in t.signature:
        ft = tables_t[f.name]
        for g in s.signature:
            gt = tables_s[g.name]
            for values in itertools.product(carrier, repeat=f.arity * g.arity):
                x = [values[i * g.arity:(i + 1) * g.arity] for i in range(f.arity)]
                checked += 1
                lhs = ft[tuple(gt[tuple(x[i])] for i in range(f.arity))]
                rhs = gt[tuple(ft[tuple(x[i][j] for i in range(f.arity))] for j in range(g.arity))]
                if lhs != rhs:
                    return CheckResult(False, checked, {
                        "f": f.name, "g": g.name, "x": [list(row) for row in x], "lhs": lhs, "rhs": rhs})
    return CheckResult(True, checked)


# -- cross-validation of the two views -----------------------------------------

# (T, S, carrier size); state algebras for two states have square size, hence 4
CROSS_PAIRS = (
    ("powerset:full", "free:I=2:depth=1", 2),
    ("powerset:full", "output:O=2:depth=1", 2),
    ("powerset:full", "state:S=2", 4),
    ("powerset:full", "powerset:full", 2),
    ("powerset:nonempty", "sigma22:depth=1", 2),
    ("powerset:full", "list:cap=3", 2),
    ("multiset:cap=3", "output:O=2:depth=1", 2),
    ("wellorder", "sigma22:depth=1", 2),
    ("identity", "sigma22:depth=1", 2),
    ("list:cap=3", "free:I=2:depth=1", 2),
    ("state:S=2", "output:O=2:depth=1", 4),
)


def _model_pool(theory: Theory, n: int, cap: int = 4000) -> list | None:
    if not theory.equations:
        return None
    return list(find_models(theory, n, limit=cap))


def _random_tables(theory: Theory, n: int, rng: random.Random) -> dict:
    return {op.name: {args: rng.randrange(n) for args in itertools.product(range(n), repeat=op.arity)}
            for op in theory.signature}


@dataclass
class CrossReport:
    samples: int
    agree: int
    both_pass: int
    both_fail: int
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements and self.agree == self.samples

    def to_dict(self) -> dict:
        return {"samples": self.samples, "agree": self.agree, "bothPass": self.both_pass,
                "bothFail": self.both_fail, "disagreements": self.disagreements}


def cross_validate(samples: int = 500, seed: int = 0, pairs: Sequence = CROSS_PAIRS, y_bound: int = 2,
                   z_bound: int = 2) -> CrossReport:
    """Sample table algebras for presented pairs and compare the syntactic and semantic checks.

    Half the samples start from a random commuting candidate: tables for the
    second theory are drawn from the models of the tensor theory with the first
    theory's tables fixed, which makes passing cases common enough to matter.
    """
    rng = random.Random(seed)
    pools: dict = {}
    report = CrossReport(0, 0, 0, 0)
    for i in range(samples):
        tname, sname, n = pairs[i % len(pairs)]
        tp, sp = presentation_for(tname, n), presentation_for(sname, n)
        key_t, key_s = (tname, n), (sname, n)
        if key_t not in pools:
            pools[key_t] = _model_pool(tp.theory, n)
        if key_s not in pools:
            pools[key_s] = _model_pool(sp.theory, n)
        tab_t = rng.choice(pools[key_t]) if pools[key_t] is not None else _random_tables(tp.theory, n, rng)
        tab_s = None
        if i % 2 == 1:
            tensor = theory_tensor(tp.theory, sp.theory)
            renamed_t = {_qualified(tensor, tp.theory, op, "left"): tab for op, tab in tab_t.items()}
            fixed = {(op, args): v for op, tab in renamed_t.items() for args, v in tab.items()}
            found = list(find_models(tensor, n, fixed=fixed, limit=200))
            if found:
                choice = rng.choice(found)
                tab_s = {op: choice[_qualified(tensor, sp.theory, op, "right")] for op in sp.theory.op_names}
        if tab_s is None:
            tab_s = rng.choice(pools[key_s]) if pools[key_s] is not None else _random_tables(sp.theory, n, rng)
        carrier = tuple(range(n))
        syn = check_commutation_tables(tp.theory, sp.theory, carrier, tab_t, tab_s)
        alg = TensorAlgebra(carrier, EMAlgebra(tp.monad, carrier, tp.structure(carrier, tab_t)),
                            EMAlgebra(sp.monad, carrier, sp.structure(carrier, tab_s)))
        sem = check_tensor_law(alg, y_bound, z_bound)
        report.samples += 1
        if syn.ok == sem.ok:
            report.agree += 1
            if syn.ok:
                report.both_pass += 1
            else:
                report.both_fail += 1
        else:
            report.disagreements.append({"pair": [tname, sname], "size": n, "syntactic": syn.ok, "semantic": sem.ok,
                                         "tablesT": _jsonable_tables(tab_t), "tablesS": _jsonable_tables(tab_s)})
    return report


def _qualified(tensor: Theory, side: Theory, op: str, prefix: str) -> str:
    return op if op in tensor.arity and f"{prefix}.{op}" not in tensor.arity else f"{prefix}.{op}"


def _jsonable_tables(tables: Mapping) -> dict:
    return {op: [[list(args), v] for args, v in sorted(tab.items())] for op, tab in tables.items()}


# -- enumeration of reachable tensor algebras ----------------------------------

TheorySource = "Theory | Callable[[int], Theory]"


def _at_size(src, n: int) -> Theory:
    return src(n) if callable(src) and not isinstance(src, Theory) else src


@dataclass
class SearchConfig:
    generators: int = 1
    max_carrier: int = 3
    symmetry_breaking: bool = True
    budget: int | None = None  # search nodes per carrier size
    injective_generators: bool = False
    count_only: bool = False


@dataclass(frozen=True)
class FoundAlgebra:
    size: int
    generators: tuple
    tables: Mapping  # op -> {args: value}, operation names as in the tensor theory

    def to_dict(self) -> dict:
        return {"carrier": list(range(self.size)), "generators": list(self.generators),
                "tables": _jsonable_tables(self.tables)}


@dataclass
class Enumeration:
    counts: dict  # carrier size -> number of iso classes
    algebras: list
    partial: bool = False
    method: str = "canonical"
    seconds: float = 0.0
    nodes: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def max_size(self) -> int:
        return max((n for n, c in self.counts.items() if c), default=0)

    def to_dict(self, include_algebras: bool = False) -> dict:
        out = {"counts": {str(k): v for k, v in sorted(self.counts.items())}, "total": self.total,
               "maxSize": self.max_size, "partial": self.partial, "method": self.method, "nodes": self.nodes}
        if include_algebras:
            out["algebras"] = [a.to_dict() for a in self.algebras]
        return out


def generator_maps(g: int, n: int, injective: bool = False) -> list:
    """Generator assignments in first-appearance normal form (restricted growth strings)."""
    out = []

    def rec(prefix: list, used: int) -> None:
        if len(prefix) == g:
            out.append(tuple(prefix))
            return
        top = min(used, n - 1)
        for v in range(top + 1):
            if injective and v < used:
                continue
            rec(prefix + [v], max(used, v + 1))

    rec([], 0)
    return out


def closure(tables: Mapping, arity: Mapping, seeds: Iterable[int]) -> set:
    """Smallest subset containing ``seeds`` closed under all tables."""
    reached = set(seeds)
    changed = True
    while changed:
        changed = False
        for op, tab in tables.items():
            k = arity[op]
            for args in itertools.product(sorted(reached), repeat=k):
                v = tab[args]
                if v not in reached:
                    reached.add(v)
                    changed = True
    return reached


def canonical_form(tables: Mapping, n: int, generators: Sequence[int]) -> tuple:
    """Least encoding over all relabellings of the carrier (generators keep their labels' positions)."""
    best = None
    ops = sorted(tables)
    for perm in itertools.permutations(range(n)):
        gens = tuple(perm[g] for g in generators)
        inv = {perm[i]: i for i in range(n)}
        enc = [gens]
        for op in ops:
            tab = tables[op]
            keys = sorted(tab)
            enc.append(tuple(perm[tab[tuple(inv[a] for a in args)]] for args in keys))
        enc = tuple(enc)
        if best is None or enc < best:
            best = enc
    return best


def _brute_force(theory: Theory, n: int, g: int, injective: bool, stats: SearchStats) -> list:
    seen: dict = {}
    arity = theory.arity
    maps = [m for m in itertools.product(range(n), repeat=g) if not injective or len(set(m)) == g]
    for tables in find_models(theory, n, stats=stats):
        for gens in maps:
            if len(closure(tables, arity, gens)) != n:
                continue
            key = canonical_form(tables, n, gens)
            if key not in seen:
                seen[key] = FoundAlgebra(n, gens, tables)
    return list(seen.values())


def _op_groups(s: Theory) -> list:
    """Operations of ``s`` grouped by connectivity through its equations."""
    parent = {op: op for op in s.op_names}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for eq in s.equations:
        names = sorted(_ops_of(eq))
        for a, b in zip(names, names[1:]):
            parent[find(b)] = find(a)
    groups: dict = {}
    for op in s.op_names:
        groups.setdefault(find(op), []).append(op)
    return [sorted(v) for _, v in sorted(groups.items())]


def _ops_of(eq: Equation) -> set:
    return {name for name, _ in operations(eq.lhs) | operations(eq.rhs)}


def _group_equations(s: Theory, group: Sequence[str]) -> list:
    members = set(group)
    return [e for e in s.equations if _ops_of(e) & members]


def _group_shape(s: Theory, group: Sequence[str]) -> tuple:
    """A renaming-invariant key so that isomorphic groups are solved once."""
    ren = {op: f"g{i}" for i, op in enumerate(group)}
    eqs = sorted(f"{rename_ops(e.lhs, ren)}={rename_ops(e.rhs, ren)}" for e in _group_equations(s, group))
    return tuple(s.arity[op] for op in group), tuple(eqs)


def _count_by_closed_sets(t: Theory, s: Theory, n: int, g: int, injective: bool, stats: SearchStats) -> int:
    """Number of generated algebras up to pointed isomorphism, without listing them.

    Labelled pairs (algebra on range(n), generator assignment) with the algebra
    generated by the assignment are counted and divided by n!; a generated pointed
    algebra has no non-trivial automorphism, so each class has exactly n! labelled
    copies.  Given the tables of ``t``, the groups of ``s``-operations are
    independent.  Whether an assignment generates depends only on the family of
    subsets closed under every operation, which is the intersection of the
    families of the core and of each group; so each group contributes a histogram
    over families (bitmasks over subsets) and the histograms are intersected.
    """
    groups = _op_groups(s)
    subsets = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]
    full_bit = 1 << subsets.index(frozenset(range(n)))
    gen_sets = [frozenset(m) for m in itertools.product(range(n), repeat=g) if not injective or len(set(m)) == g]

    def family(tables: Mapping, arity: Mapping) -> int:
        return sum(1 << i for i, b in enumerate(subsets) if _is_closed(tables, arity, b))

    generating: dict = {}

    def generated(mask: int) -> int:
        if mask not in generating:
            proper = [b for i, b in enumerate(subsets) if mask >> i & 1 and (1 << i) != full_bit]
            generating[mask] = sum(1 for gs in gen_sets if not any(gs <= b for b in proper))
        return generating[mask]

    total = 0
    histograms: dict = {}
    for core in find_models(t, n, stats=stats):
        fixed = {(op, args): v for op, tab in core.items() for args, v in tab.items()}
        combined = {family(core, t.arity): 1}
        for group in groups:
            key = (_group_shape(s, group), tuple(sorted(fixed.items())))
            if key not in histograms:
                sub = Theory.make("group", [OpSymbol(op, s.arity[op]) for op in group], _group_equations(s, group))
                hist: dict = {}
                for model in find_models(theory_tensor(t, sub), n, fixed=fixed, stats=stats):
                    mask = family({op: model[op] for op in group}, s.arity)
                    hist[mask] = hist.get(mask, 0) + 1
                histograms[key] = hist
            merged: dict = {}
            for m1, c1 in combined.items():
                for m2, c2 in histograms[key].items():
                    merged[m1 & m2] = merged.get(m1 & m2, 0) + c1 * c2
            combined = merged
        total += sum(c * generated(mask) for mask, c in combined.items())
    denom = math.factorial(n)
    if total % denom:
        raise ArithmeticError("labelled count is not divisible by n!")
    return total // denom


def _is_closed(tables: Mapping, arity: Mapping, b: frozenset) -> bool:
    for op, tab in tables.items():
        for args in itertools.product(sorted(b), repeat=arity[op]):
            if tab[args] not in b:
                return False
    return True


def enumerate_tensor_algebras(t, s, cfg: SearchConfig) -> Enumeration:
    """Generated (t, s)-tensor algebras on carriers of size 1..cfg.max_carrier, up to isomorphism.

    ``t`` and ``s`` are theories, or callables giving the theory to use on a carrier
    of a given size (this is how the well-order theory is lowered).  Three methods:
    canonical generation (symmetry breaking on), labelled search with explicit
    isomorphism rejection (off), and counting through closed-set families (``count_only``).
    """
    start = time.perf_counter()
    counts: dict = {}
    found: list = []
    partial = False
    stats = SearchStats()
    method = "closed-sets" if cfg.count_only else ("canonical" if cfg.symmetry_breaking else "brute-force")
    for n in range(1, cfg.max_carrier + 1):
        tn, sn = _at_size(t, n), _at_size(s, n)
        theory = theory_tensor(tn, sn)
        if cfg.count_only:
            tn, sn = _disjoint_pair(tn, sn)
            counts[n] = _count_by_closed_sets(tn, sn, n, cfg.generators, cfg.injective_generators, stats)
            continue
        if cfg.symmetry_breaking:
            here = []
            for gens in generator_maps(cfg.generators, n, cfg.injective_generators):
                local = SearchStats()
                for tables in find_generated_models(theory, n, gens, local, cfg.budget):
                    here.append(FoundAlgebra(n, gens, tables))
                stats.nodes += local.nodes
                partial |= not local.exhausted
        else:
            here = _brute_force(theory, n, cfg.generators, cfg.injective_generators, stats)
        counts[n] = len(here)
        found.extend(here)
    return Enumeration(counts, found, partial, method, time.perf_counter() - start, stats.nodes)


def _disjoint_pair(t: Theory, s: Theory) -> tuple:
    """The two halves of ``theory_tensor(t, s)`` with the names it uses."""
    left, right = _disjoint(t, s)
    return Theory.make(t.name, *_renamed(t, left)), Theory.make(s.name, *_renamed(s, right))


def lowered_wellorder(n: int) -> Theory:
    return builtin_theory(f"WellOrder({n})")


def homomorphism_onto(q: QuotientAlgebra, tables: Mapping, gen_values: Mapping) -> bool:
    """Whether the generator assignment extends to a surjective homomorphism from ``q``.

    Operation names in ``tables`` must match those of ``q.theory``.
    """
    image = {}
    for i, cls in enumerate(q.classes):
        try:
            image[i] = evaluate_term(cls.rep, tables, gen_values)
        except KeyError:
            return False
    for (op, args), v in q.tables.items():
        if tables[op][tuple(image[a] for a in args)] != image[v]:
            return False
    codomain = {v for tab in tables.values() for v in tab.values()} | set(gen_values.values())
    return set(image.values()) >= codomain


# -- free tensor algebras by alternating saturation ----------------------------


@dataclass
class SaturationReport:
    rounds: int
    history: list  # (phase, class count) after each phase
    fixpoint: bool
    pattern_observed: bool
    classes: int

    def to_dict(self) -> dict:
        return {"rounds": self.rounds, "history": [list(h) for h in self.history], "fixpoint": self.fixpoint,
                "patternObserved": self.pattern_observed, "classes": self.classes}


def saturate_free_tensor(tm: Theory, gens: Iterable, max_rounds: int = 10, budget: int = DEFAULT_BUDGET,
                         p_theory: Theory | None = None) -> tuple:
    """Free (Semilattice x tm)-tensor algebra over ``gens`` by alternating closure.

    Each round applies every ``tm`` operation once to all current classes and then
    closes under joins and bot; all equations of the tensor theory are re-applied
    after every step.  Stops at the first round whose ``tm`` step creates no new
    class, which means the structure is closed under both theories.  Returns
    ``(quotient, report)``.
    """
    p_theory = p_theory or semilattice()
    theory = theory_tensor(p_theory, tm)
    p_ops = [n for n in theory.op_names if n in _renamed_ops(theory, p_theory, "left")]
    t_ops = [n for n in theory.op_names if n not in p_ops]
    g = EGraph(theory, budget)
    for x in sorted(set(gens), key=str):
        g.add_generator(x)
    history: list = []
    fixpoint = False
    rounds = 0

    def close_p() -> None:
        while True:
            g.close_equations()
            if g.expand(p_ops) == 0:
                break

    close_p()
    history.append(("P", len(g.roots())))
    for rounds in range(1, max_rounds + 1):
        before = len(g.roots())
        g.expand(t_ops)
        g.close_equations()
        after_t = len(g.roots())
        history.append(("T", after_t))
        close_p()
        history.append(("P", len(g.roots())))
        if after_t == before and g.is_total():
            fixpoint = True
            break
    closed = g.is_total()
    q = g.quotient(rounds, closed, [c for _, c in history])
    report = SaturationReport(rounds, history, fixpoint, fixpoint and closed, q.class_count)
    return q, report


def _renamed_ops(tensor: Theory, side: Theory, prefix: str) -> set:
    return {_qualified(tensor, side, op, prefix) for op in side.op_names}


# -- the state tensor identity -------------------------------------------------


@dataclass
class StateTensorReport:
    s: int
    x: int
    expected: int
    found: int
    closed: bool
    bijection: bool
    homomorphism: bool
    generators_respected: bool
    depth: int
    status: str

    def to_dict(self) -> dict:
        return {"S": self.s, "X": self.x, "expected": self.expected, "found": self.found, "closed": self.closed,
                "bijection": self.bijection, "homomorphism": self.homomorphism,
                "generatorsRespected": self.generators_respected, "depth": self.depth, "status": self.status}


def _state_model_ops(s: int):
    states = range(s)

    def join(a, b):
        return tuple(a[i] | b[i] for i in states)

    def lookup(*phis):
        return tuple(phis[i][i] for i in states)

    def update(v):
        return lambda phi: tuple(phi[v] for _ in states)

    return join, lookup, update


def verify_state_tensor(s: int = 2, x: int = 1, max_depth: int = 8, budget: int = DEFAULT_BUDGET) -> StateTensorReport:
    """Free algebra of Semilattice x State(s) over x generators versus the model S -> P(S x X).

    The model interprets join pointwise, bot as the empty family, a generator g as
    s |-> {(s, g)}, lookup(phi_0, ..) as s |-> phi_s(s) and update_v(phi) as s |-> phi(v).
    """
    theory = theory_tensor(semilattice(), state_theory(s))
    gens = [f"x{i}" for i in range(x)]
    expected = (2 ** (s * x)) ** s
    try:
        q = free_algebra(theory, gens, max_depth, budget)
    except BudgetExceeded as exc:
        q = exc.partial
        return StateTensorReport(s, x, expected, q.class_count if q else 0, False, False, False, False,
                                 q.depth if q else 0, "inconclusive")
    join, lookup, update = _state_model_ops(s)
    empty = tuple(frozenset() for _ in range(s))
    gen_elem = {gname: tuple(frozenset({(st, gname)}) for st in range(s)) for gname in gens}

    def ev(t: Term):
        if not isinstance(t, App):
            return gen_elem[t.name]
        args = [ev(a) for a in t.args]
        if t.op == "join":
            return join(*args)
        if t.op == "bot":
            return empty
        if t.op == "lookup":
            return lookup(*args)
        return update(int(t.op[len("update"):]))(args[0])

    image = [ev(c.rep) for c in q.classes]
    injective = len(set(image)) == len(image)
    homomorphism = True
    for (op, args), v in q.tables.items():
        if ev(App(op, tuple(q.classes[a].rep for a in args))) != image[v]:
            homomorphism = False
            break
    gens_ok = all(image[q.generator_class[gname]] == gen_elem[gname] for gname in gens)
    bijection = injective and len(image) == expected
    ok = q.closed and bijection and homomorphism and gens_ok and q.class_count == expected
    status = "pass" if ok else ("fail" if q.closed else "inconclusive")
    return StateTensorReport(s, x, expected, q.class_count, q.closed, bijection, homomorphism, gens_ok, q.depth, status)
