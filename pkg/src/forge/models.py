"""Backtracking finite model search over operation tables.

Every equation is expanded into ground instances over the carrier ``range(n)``.
Each instance watches the first table cell that blocks its evaluation; when a
cell is assigned its watchers are re-evaluated, and an instance whose one side
is known while the other is blocked only at its outermost cell forces that
cell.  This is ordinary unit propagation for the equational setting.

The optional canonical mode implements generation order: table cells are
visited by (largest argument, operation name, arguments), and a value is either
an element that already appeared or the next fresh label.  Each algebra that is
generated by its marked generators is produced exactly once per isomorphism
class of pointed algebras.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

from .theory import Term, Theory, Var


def _compile_term(t: Term, slots: Mapping) -> object:
    if isinstance(t, Var):
        return slots[t.name]
    return (t.op, tuple(_compile_term(a, slots) for a in t.args))


@dataclass
class SearchStats:
    nodes: int = 0
    models: int = 0
    exhausted: bool = True


class _Finder:
    def __init__(self, theory: Theory, n: int, cells: Sequence, fixed: Mapping | None):
        self.theory = theory
        self.n = n
        self.cells = list(cells)
        self.vals: dict = {}
        self.watch: dict = {c: [] for c in self.cells}
        self.trail: list = []  # ('v', cell) or ('w', cell)
        self.instances: list = []
        for eq in theory.equations:
            ctx = sorted(eq.context, key=str)
            slots = {v: i for i, v in enumerate(ctx)}
            lhs, rhs = _compile_term(eq.lhs, slots), _compile_term(eq.rhs, slots)
            for env in itertools.product(range(n), repeat=len(ctx)):
                self.instances.append((lhs, rhs, env))
        self.fixed = dict(fixed or {})

    # evaluation: returns (value, None) or (None, blocking cell)
    def _ev(self, t, env):
        if isinstance(t, int):
            return env[t], None
        op, subs = t
        args = []
        for s in subs:
            v, blk = self._ev(s, env)
            if blk is not None:
                return None, blk
            args.append(v)
        cell = (op, tuple(args))
        v = self.vals.get(cell)
        if v is None:
            return None, cell
        return v, None

    def _assign(self, cell, v) -> None:
        self.vals[cell] = v
        self.trail.append(("v", cell))

    def _add_watch(self, cell, inst: int) -> None:
        self.watch[cell].append(inst)
        self.trail.append(("w", cell))

    def _visit(self, inst: int, queue: list) -> bool:
        lhs, rhs, env = self.instances[inst]
        lv, lb = self._ev(lhs, env)
        rv, rb = self._ev(rhs, env)
        if lb is None and rb is None:
            return lv == rv
        if lb is None or rb is None:
            known = lv if lb is None else rv
            blk = rb if lb is None else lb
            side = rhs if lb is None else lhs
            if not isinstance(side, int) and blk == self._top_cell(side, env):
                self._assign(blk, known)
                queue.append(blk)
                return True
            self._add_watch(blk, inst)
            return True
        self._add_watch(lb, inst)
        return True

    def _top_cell(self, t, env):
        op, subs = t
        args = []
        for s in subs:
            v, blk = self._ev(s, env)
            if blk is not None:
                return None
            args.append(v)
        return (op, tuple(args))

    def _propagate(self, queue: list) -> bool:
        while queue:
            cell = queue.pop()
            # watchers of an assigned cell stay registered; they are harmless until undo
            for inst in list(self.watch[cell]):
                if not self._visit(inst, queue):
                    return False
        return True

    def initial(self) -> bool:
        queue: list = []
        for cell, v in self.fixed.items():
            self._assign(cell, v)
        for i in range(len(self.instances)):
            if not self._visit(i, queue):
                return False
        return self._propagate(queue)

    def undo(self, mark: int) -> None:
        trail = self.trail
        while len(trail) > mark:
            kind, cell = trail.pop()
            if kind == "v":
                del self.vals[cell]
            else:
                self.watch[cell].pop()

    def try_assign(self, cell, v) -> bool:
        self._assign(cell, v)
        return self._propagate([cell])


def _tables(theory: Theory, vals: Mapping) -> dict:
    out = {op.name: {} for op in theory.signature}
    for (op, args), v in vals.items():
        out[op][args] = v
    return out


def find_models(theory: Theory, n: int, fixed: Mapping | None = None, stats: SearchStats | None = None,
                limit: int | None = None) -> Iterator[dict]:
    """All table assignments on ``range(n)`` satisfying ``theory`` (labelled, no symmetry breaking).

    ``fixed`` pins cells ``(op, args) -> value`` in advance.  Models are yielded as
    ``{op: {args: value}}``.
    """
    stats = stats if stats is not None else SearchStats()
    cells = [(op.name, args) for op in theory.signature for args in itertools.product(range(n), repeat=op.arity)]
    f = _Finder(theory, n, cells, fixed)
    if not f.initial():
        return

    def rec(pos: int) -> Iterator[dict]:
        while pos < len(cells) and cells[pos] in f.vals:
            pos += 1
        if pos == len(cells):
            stats.models += 1
            yield _tables(theory, f.vals)
            return
        cell = cells[pos]
        for v in range(n):
            stats.nodes += 1
            mark = len(f.trail)
            if f.try_assign(cell, v):
                yield from rec(pos + 1)
            f.undo(mark)
            if limit is not None and stats.models >= limit:
                stats.exhausted = False
                return

    yield from rec(0)


def generation_cells(theory: Theory, n: int) -> list:
    """Cells in generation order: by largest argument (nullary first), then name, then arguments."""
    cells = [(op.name, args) for op in theory.signature for args in itertools.product(range(n), repeat=op.arity)]
    return sorted(cells, key=lambda c: (max(c[1], default=-1), c[0], c[1]))


def find_generated_models(theory: Theory, n: int, generators: Sequence[int], stats: SearchStats | None = None,
                          budget: int | None = None) -> Iterator[dict]:
    """Canonically labelled models on ``range(n)`` generated by ``generators``.

    ``generators`` lists the element each generator label denotes and must be in
    first-appearance normal form (e.g. ``(0, 1)`` or ``(0, 0)``).  Elements not
    named by a generator must appear, in increasing order, as values of cells
    visited in generation order.
    """
    stats = stats if stats is not None else SearchStats()
    distinct = 0
    for g in generators:
        if g > distinct:
            raise ValueError("generators must be in first-appearance normal form")
        distinct = max(distinct, g + 1)
    if distinct > n or (n > 0 and distinct == 0 and not any(op.arity == 0 for op in theory.signature)):
        return
    cells = generation_cells(theory, n)
    f = _Finder(theory, n, cells, None)
    if not f.initial():
        return

    def rec(pos: int, count: int) -> Iterator[dict]:
        if pos == len(cells):
            if count == n:
                stats.models += 1
                yield _tables(theory, f.vals)
            return
        cell = cells[pos]
        if max(cell[1], default=-1) >= count:
            return
        if cell in f.vals:
            v = f.vals[cell]
            if v > count:
                return
            yield from rec(pos + 1, count + (v == count))
            return
        for v in range(min(count, n - 1) + 1):
            stats.nodes += 1
            if budget is not None and stats.nodes > budget:
                stats.exhausted = False
                return
            mark = len(f.trail)
            if f.try_assign(cell, v):
                yield from rec(pos + 1, count + (v == count))
            f.undo(mark)

    yield from rec(0, distinct)
