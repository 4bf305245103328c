"""Bounded free algebras by term enumeration and congruence closure.

The engine is a small e-graph: a union-find over term classes, a hash-consed
table ``(op, argument classes) -> class`` and a rebuild step that restores
congruence after merges.  Terms are never materialised one by one.  A class
stands for every term it contains, and the table holds one node per distinct
operation application.

Depth ``d`` means: every term of height at most ``d`` over the generators is
represented.  Concretely the table is widened with every application whose
argument classes have minimal height below ``d``.  Equations are applied by
matching one side against the table and looking up the other; a merge happens
only when both sides are already present, so every union is a consequence of
the theory (soundness).

When after saturation every operation is defined on every tuple of classes,
the quotient is a model of the theory generated by the generators and is
therefore the free algebra itself.  ``closed`` records exactly this.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .theory import App, Equation, OpSymbol, Term, Theory, Var, term_key, variables

DEFAULT_BUDGET = 200_000
REPORT_SCHEMA = "forge.free/1"


class BudgetExceeded(RuntimeError):
    """Raised when the node budget is hit; ``partial`` holds what was built so far."""

    def __init__(self, message: str, partial: "QuotientAlgebra | None" = None):
        super().__init__(message)
        self.partial = partial


# -- plain term enumeration ----------------------------------------------------


def enumerate_terms(signature: Iterable[OpSymbol], gens: Iterable[Hashable], depth: int) -> list:
    """All terms of height at most ``depth``, sorted by (height, text)."""
    if depth < 0:
        raise ValueError("depth must be non-negative")
    ops = sorted(signature)
    level = [Var(g) for g in sorted(gens, key=str)] + [App(op.name) for op in ops if op.arity == 0]
    for _ in range(depth):
        nxt = [Var(g) for g in sorted(gens, key=str)]
        for op in ops:
            nxt.extend(App(op.name, args) for args in itertools.product(level, repeat=op.arity))
        level = nxt
    return sorted(level, key=term_key)


# -- e-graph -------------------------------------------------------------------


@dataclass
class _Compiled:
    match_side: Term
    other_side: Term
    extra_vars: tuple
    equation: Equation


def _compile(eq: Equation) -> _Compiled:
    sides = [(eq.lhs, eq.rhs), (eq.rhs, eq.lhs)]

    def score(pair: tuple) -> tuple:
        m, o = pair
        covers = variables(o) <= variables(m)
        return (isinstance(m, App), covers, len(variables(m)))

    m, o = max(sides, key=score)
    extra = tuple(sorted(variables(o) - variables(m), key=str))
    return _Compiled(m, o, extra, eq)


class EGraph:
    """Union-find over classes with a congruence-closed operation table."""

    def __init__(self, theory: Theory, budget: int = DEFAULT_BUDGET):
        self.theory = theory
        self.arity = theory.arity
        self.budget = budget
        self.parent: list = []
        self.height: list = []
        self.table: dict = {}
        self.generators: dict = {}
        self.rules = [_compile(eq) for eq in theory.equations]

    # union-find
    def find(self, c: int) -> int:
        parent = self.parent
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def _new_class(self, h: int) -> int:
        self.parent.append(len(self.parent))
        self.height.append(h)
        return len(self.parent) - 1

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.height[ra] = min(self.height[ra], self.height[rb])
        return True

    def roots(self) -> list:
        return [c for c in range(len(self.parent)) if self.parent[c] == c]

    @property
    def node_count(self) -> int:
        return len(self.table) + len(self.generators)

    # construction
    def add_generator(self, name: Hashable) -> int:
        if name not in self.generators:
            self.generators[name] = self._new_class(0)
        return self.find(self.generators[name])

    def add_node(self, op: str, args: Sequence[int]) -> int:
        key = (op, tuple(self.find(a) for a in args))
        found = self.table.get(key)
        if found is not None:
            return self.find(found)
        h = 1 + max((self.height[a] for a in key[1]), default=-1)
        c = self._new_class(h)
        self.table[key] = c
        return c

    def add_term(self, t: Term) -> int:
        if isinstance(t, Var):
            return self.add_generator(t.name)
        return self.add_node(t.op, [self.add_term(a) for a in t.args])

    def lookup_term(self, t: Term) -> int | None:
        if isinstance(t, Var):
            c = self.generators.get(t.name)
            return None if c is None else self.find(c)
        args = []
        for a in t.args:
            c = self.lookup_term(a)
            if c is None:
                return None
            args.append(c)
        found = self.table.get((t.op, tuple(args)))
        return None if found is None else self.find(found)

    def _check_budget(self) -> None:
        if self.node_count > self.budget:
            raise BudgetExceeded(f"node budget of {self.budget} exceeded")

    def expand(self, ops: Iterable[str], max_height: int | None = None) -> int:
        """Add every missing application of ``ops`` to eligible classes; returns the count added."""
        roots = self.roots()
        if max_height is not None:
            roots = [c for c in roots if self.height[c] < max_height]
        added = 0
        for op in ops:
            k = self.arity[op]
            for args in itertools.product(roots, repeat=k):
                key = (op, args)
                if key in self.table:
                    continue
                h = 1 + max((self.height[a] for a in args), default=-1)
                self.table[key] = self._new_class(h)
                added += 1
                if added % 4096 == 0:
                    self._check_budget()
        self._check_budget()
        return added

    def rebuild(self) -> None:
        """Re-canonicalise table keys; colliding keys force further merges (congruence)."""
        while True:
            merged = False
            fresh: dict = {}
            find = self.find
            for (op, args), c in self.table.items():
                key = (op, tuple(find(a) for a in args))
                c = find(c)
                other = fresh.get(key)
                if other is None:
                    fresh[key] = c
                elif find(other) != c:
                    self.union(other, c)
                    merged = True
            self.table = fresh
            if not merged:
                break
        changed = True
        while changed:
            changed = False
            for (op, args), c in self.table.items():
                h = 1 + max((self.height[a] for a in args), default=-1)
                r = self.find(c)
                if h < self.height[r]:
                    self.height[r] = h
                    changed = True

    # equations
    def _index(self) -> tuple:
        by_op: dict = {}
        by_class_op: dict = {}
        for (op, args), c in self.table.items():
            by_op.setdefault(op, []).append((args, c))
            by_class_op.setdefault((c, op), []).append(args)
        return by_op, by_class_op

    def _match(self, pat: Term, c: int, binding: dict, by_class_op: dict) -> Iterator[dict]:
        if isinstance(pat, Var):
            bound = binding.get(pat.name)
            if bound is None:
                b = dict(binding)
                b[pat.name] = c
                yield b
            elif bound == c:
                yield binding
            return
        for args in by_class_op.get((c, pat.op), ()):
            yield from self._match_args(pat.args, args, 0, binding, by_class_op)

    def _match_args(self, pats: tuple, args: tuple, i: int, binding: dict, by_class_op: dict) -> Iterator[dict]:
        if i == len(pats):
            yield binding
            return
        for b in self._match(pats[i], args[i], binding, by_class_op):
            yield from self._match_args(pats, args, i + 1, b, by_class_op)

    def _eval(self, t: Term, binding: Mapping) -> int | None:
        if isinstance(t, Var):
            return binding[t.name]
        args = []
        for a in t.args:
            c = self._eval(a, binding)
            if c is None:
                return None
            args.append(c)
        found = self.table.get((t.op, tuple(args)))
        return None if found is None else found

    def apply_equations(self) -> bool:
        """One pass of equation matching followed by a rebuild; True if anything merged."""
        by_op, by_class_op = self._index()
        roots = self.roots()
        merges = []
        for rule in self.rules:
            pat = rule.match_side
            if isinstance(pat, Var):
                starts = (({pat.name: c}, c) for c in roots)
            else:
                starts = (
                    (b, c)
                    for args, c in by_op.get(pat.op, ())
                    for b in self._match_args(pat.args, args, 0, {}, by_class_op)
                )
            for binding, c in starts:
                if rule.extra_vars:
                    choices = itertools.product(roots, repeat=len(rule.extra_vars))
                else:
                    choices = [()]
                for extra in choices:
                    full = dict(binding)
                    full.update(zip(rule.extra_vars, extra))
                    d = self._eval(rule.other_side, full)
                    if d is not None and d != c:
                        merges.append((c, d))
        merged = False
        for a, b in merges:
            merged |= self.union(a, b)
        if merged:
            self.rebuild()
        return merged

    def saturate(self, max_height: int | None = None, ops: Iterable[str] | None = None) -> None:
        """Alternate expansion and equation passes until neither changes anything."""
        ops = sorted(self.arity) if ops is None else list(ops)
        while True:
            while self.apply_equations():
                pass
            if self.expand(ops, max_height) == 0:
                break

    def close_equations(self) -> None:
        while self.apply_equations():
            pass

    def is_total(self, ops: Iterable[str] | None = None) -> bool:
        n = len(self.roots())
        ops = sorted(self.arity) if ops is None else ops
        counts: dict = {}
        for op, _ in self.table:
            counts[op] = counts.get(op, 0) + 1
        return all(counts.get(op, 0) == n ** self.arity[op] for op in ops)

    def quotient(self, depth: int, closed: bool, history: Sequence[int] = (), partial: bool = False) -> "QuotientAlgebra":
        return _build_quotient(self, depth, closed, tuple(history), partial)


# -- quotient algebra ----------------------------------------------------------


@dataclass(frozen=True)
class TermClass:
    rep: Term
    height: int
    size: int  # number of table nodes (and generators) in the class


@dataclass(frozen=True)
class QuotientAlgebra:
    theory: Theory
    generators: tuple
    depth: int
    classes: tuple  # of TermClass, sorted by (height, representative text)
    tables: Mapping  # (op, tuple of class indices) -> class index
    closed: bool
    history: tuple = ()  # class count after each depth
    partial: bool = False
    generator_class: Mapping = field(default_factory=dict)

    @property
    def class_count(self) -> int:
        return len(self.classes)

    def class_of(self, t: Term) -> int | None:
        """Index of the class holding ``t``, or None when ``t`` was not reached."""
        if isinstance(t, Var):
            return self.generator_class.get(t.name)
        args = []
        for a in t.args:
            c = self.class_of(a)
            if c is None:
                return None
            args.append(c)
        return self.tables.get((t.op, tuple(args)))

    def rep(self, i: int) -> Term:
        return self.classes[i].rep

    def op_table(self, op: str) -> dict:
        return {args: v for (name, args), v in self.tables.items() if name == op}

    def to_dict(self, sample: int = 20) -> dict:
        entries = sorted(self.tables.items(), key=lambda kv: (kv[0][0], kv[0][1]))
        return {
            "schema": REPORT_SCHEMA,
            "theory": self.theory.name,
            "generators": [str(g) for g in self.generators],
            "depth": self.depth,
            "classCount": self.class_count,
            "closed": self.closed,
            "partial": self.partial,
            "history": list(self.history),
            "classes": [{"repr": str(c.rep), "size": c.size, "height": c.height} for c in self.classes],
            "opTableSample": [
                {"op": op, "args": [str(self.classes[a].rep) for a in args], "value": str(self.classes[v].rep)}
                for (op, args), v in entries[:sample]
            ],
            "opTableSize": len(self.tables),
        }


def _build_quotient(g: EGraph, depth: int, closed: bool, history: tuple, partial: bool) -> QuotientAlgebra:
    roots = g.roots()
    sizes = {c: 0 for c in roots}
    nodes_by_height: dict = {}
    for (op, args), c in g.table.items():
        r = g.find(c)
        sizes[r] += 1
        h = 1 + max((g.height[a] for a in args), default=-1)
        nodes_by_height.setdefault(h, []).append((op, args, r))
    reps: dict = {}
    for name, c in g.generators.items():
        r = g.find(c)
        sizes[r] += 1
        cand = Var(name)
        if r not in reps or term_key(cand) < term_key(reps[r]):
            reps[r] = cand
    for h in sorted(nodes_by_height):
        for op, args, r in nodes_by_height[h]:
            if g.height[r] != h or any(a not in reps for a in args):
                continue
            cand = App(op, tuple(reps[a] for a in args))
            if r not in reps or term_key(cand) < term_key(reps[r]):
                reps[r] = cand
    ordered = sorted((c for c in roots if c in reps), key=lambda c: term_key(reps[c]))
    index = {c: i for i, c in enumerate(ordered)}
    classes = tuple(TermClass(reps[c], g.height[c], sizes[c]) for c in ordered)
    tables = {}
    for (op, args), c in g.table.items():
        if all(a in index for a in args) and g.find(c) in index:
            tables[(op, tuple(index[a] for a in args))] = index[g.find(c)]
    gen_class = {name: index[g.find(c)] for name, c in g.generators.items()}
    return QuotientAlgebra(g.theory, tuple(g.generators), depth, classes, tables, closed, history, partial, gen_class)


def free_algebra(theory: Theory, gens: Iterable[Hashable], depth: int, budget: int = DEFAULT_BUDGET) -> QuotientAlgebra:
    """The quotient of all terms of height <= ``depth`` by the congruence the theory generates.

    Raises ``BudgetExceeded`` (with ``partial`` set) if more than ``budget`` table
    nodes would be needed.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    g = EGraph(theory, budget)
    gens = sorted(set(gens), key=str)
    for name in gens:
        g.add_generator(name)
    history: list = []
    closed = False
    try:
        for d in range(1, depth + 1):
            g.saturate(max_height=d)
            history.append(len(g.roots()))
            if g.is_total():
                closed = True
                history.extend([history[-1]] * (depth - d))
                break
    except BudgetExceeded as exc:
        g.rebuild()
        exc.partial = g.quotient(len(history), False, history, partial=True)
        raise
    return g.quotient(depth, closed, history)


def decide_equal(theory: Theory, t1: Term, t2: Term, depth: int, budget: int = DEFAULT_BUDGET) -> str:
    """``"equal"`` when both terms land in one class at this depth, else ``"unknown"``."""
    gens = variables(t1) | variables(t2)
    try:
        q = free_algebra(theory, gens, max(depth, 1), budget)
    except BudgetExceeded as exc:
        q = exc.partial
        if q is None:
            return "unknown"
    c1, c2 = q.class_of(t1), q.class_of(t2)
    if c1 is not None and c1 == c2:
        return "equal"
    return "unknown"


# -- finite algebras given by tables -------------------------------------------


def evaluate_term(t: Term, tables: Mapping, env: Mapping):
    """Value of ``t`` under operation tables ``{op: {args: value}}`` and a variable assignment."""
    if isinstance(t, Var):
        return env[t.name]
    return tables[t.op][tuple(evaluate_term(a, tables, env) for a in t.args)]


@dataclass(frozen=True)
class AlgebraCheck:
    ok: bool
    equation: Equation | None = None
    assignment: Mapping | None = None
    lhs_value: object = None
    rhs_value: object = None
    checked: int = 0

    def to_dict(self) -> dict:
        out = {"ok": self.ok, "checked": self.checked}
        if not self.ok:
            out["equation"] = str(self.equation)
            out["assignment"] = {str(k): repr(v) for k, v in self.assignment.items()}
            out["lhs"] = repr(self.lhs_value)
            out["rhs"] = repr(self.rhs_value)
        return out


def algebra_of_table(theory: Theory, carrier: Sequence, tables: Mapping) -> AlgebraCheck:
    """Check every equation under every assignment; the first violation is returned."""
    carrier = list(carrier)
    for op in theory.signature:
        table = tables.get(op.name)
        if table is None:
            raise ValueError(f"missing table for {op}")
        for args in itertools.product(carrier, repeat=op.arity):
            if args not in table:
                raise ValueError(f"table for {op} undefined at {args}")
    checked = 0
    for eq in theory.equations:
        ctx = sorted(eq.context, key=str)
        for values in itertools.product(carrier, repeat=len(ctx)):
            env = dict(zip(ctx, values))
            lv = evaluate_term(eq.lhs, tables, env)
            rv = evaluate_term(eq.rhs, tables, env)
            checked += 1
            if lv != rv:
                return AlgebraCheck(False, eq, env, lv, rv, checked)
    return AlgebraCheck(True, checked=checked)
