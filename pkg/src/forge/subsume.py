"""Subsumption between ultimately periodic sequences.

A sequence of finite sets ``a`` subsumes a sequence ``x`` when there is an
infinite set ``M`` of indices such that ``x_i`` is in ``a_j`` whenever
``i < j`` are both in ``M``.

When ``x`` takes finitely many values this holds exactly when some value ``v``
satisfies ``x_i = v`` and ``v in a_i`` for infinitely many ``i``:

* given ``M``, some value ``v`` is taken infinitely often on ``M``; the indices
  of ``M`` carrying ``v``, minus the first, all have ``v`` in their set;
* conversely the indices with ``x_i = v in a_i`` form a valid ``M``, since for
  ``i < j`` among them ``x_i = v in a_j``.

For lassos (a finite preamble followed by a repeated cycle) "infinitely many"
means "at least once in one common period after both preambles".
:func:`chain_oracle` decides the same relation by searching for long chains
directly, without the reduction, and is used to cross-check it.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class LassoSeq:
    preamble: tuple
    cycle: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "preamble", tuple(self.preamble))
        object.__setattr__(self, "cycle", tuple(self.cycle))
        if not self.cycle:
            raise ValueError("the cycle of a lasso must be nonempty")

    def __getitem__(self, i: int):
        if i < len(self.preamble):
            return self.preamble[i]
        return self.cycle[(i - len(self.preamble)) % len(self.cycle)]

    def prefix(self, n: int) -> list:
        return [self[i] for i in range(n)]

    def values(self) -> set:
        return set(self.preamble) | set(self.cycle)

    def unrolled(self, times: int = 2) -> "LassoSeq":
        return type(self)(self.preamble, self.cycle * times)

    def shifted(self, k: int) -> "LassoSeq":
        """The sequence with its first ``k`` entries dropped."""
        start = len(self.preamble)
        if k <= start:
            return type(self)(self.preamble[k:], self.cycle)
        r = (k - start) % len(self.cycle)
        return type(self)((), self.cycle[r:] + self.cycle[:r])

    def __str__(self) -> str:
        return f"pre:[{','.join(map(_show_value, self.preamble))}];cyc:[{','.join(map(_show_value, self.cycle))}]"


class LassoSetSeq(LassoSeq):
    """A lasso whose entries are finite sets."""

    def __post_init__(self) -> None:
        super().__post_init__()
        object.__setattr__(self, "preamble", tuple(frozenset(s) for s in self.preamble))
        object.__setattr__(self, "cycle", tuple(frozenset(s) for s in self.cycle))

    def universe(self) -> set:
        return set().union(*self.preamble, *self.cycle)


def _show_value(v) -> str:
    if isinstance(v, frozenset):
        return "{" + ",".join(sorted(map(str, v))) + "}"
    return str(v)


def aligned_window(*seqs: LassoSeq) -> tuple:
    """``(start, period)`` after which all the lassos repeat with a common period."""
    start = max(len(s.preamble) for s in seqs)
    period = math.lcm(*(len(s.cycle) for s in seqs))
    return start, period


def subsumes(a: LassoSetSeq, x: LassoSeq) -> bool:
    start, period = aligned_window(a, x)
    return any(x[i] in a[i] for i in range(start, start + period))


def recurring_witnesses(a: LassoSetSeq, x: LassoSeq) -> list:
    """Values ``v`` with ``x_i = v in a_i`` for infinitely many ``i``, each with its first such index."""
    start, period = aligned_window(a, x)
    found: dict = {}
    for i in range(start, start + period):
        if x[i] in a[i]:
            found.setdefault(x[i], i)
    return sorted(found.items(), key=lambda kv: kv[1])


def union(a: LassoSetSeq, b: LassoSetSeq) -> LassoSetSeq:
    start, period = aligned_window(a, b)
    return LassoSetSeq([a[i] | b[i] for i in range(start)], [a[i] | b[i] for i in range(start, start + period)])


def union_split_property(a: LassoSetSeq, b: LassoSetSeq, x: LassoSeq) -> bool:
    """Whether a u b subsumes x exactly when a or b does."""
    return subsumes(union(a, b), x) == (subsumes(a, x) or subsumes(b, x))


# -- an independent decision by chain search -------------------------------------


def longest_chain(a: LassoSetSeq, x: LassoSeq, length: int, target: int | None = None) -> list:
    """A longest chain ``i_1 < ... < i_k < length`` with ``x_{i_p} in a_{i_q}`` for all ``p < q``.

    Stops early once a chain of ``target`` elements is found.
    """
    ok = [[x[i] in a[j] for j in range(length)] for i in range(length)]
    best: list = []

    def extend(chain: list, candidates: list) -> bool:
        nonlocal best
        if len(chain) > len(best):
            best = list(chain)
            if target is not None and len(best) >= target:
                return True
        if len(chain) + len(candidates) <= len(best):
            return False
        for pos, j in enumerate(candidates):
            if len(chain) + len(candidates) - pos <= len(best):
                return False
            chain.append(j)
            rest = [k for k in candidates[pos + 1:] if ok[j][k]]
            if extend(chain, rest):
                return True
            chain.pop()
        return False

    extend([], list(range(length)))
    return best


def chain_oracle(a: LassoSetSeq, x: LassoSeq) -> bool:
    """Decide subsumption from chains in a finite prefix.

    Without subsumption a chain has at most ``start`` indices inside the
    preambles and at most one index per value afterwards (two indices ``i < j``
    with the same value ``v`` would give ``v = x_j in a_j`` in the periodic part,
    which then recurs).  With subsumption the recurring positions give a chain
    with one index per period.  A prefix of ``start + period * (bound + 1)``
    therefore separates the two cases at ``bound = start + #values``.
    """
    start, period = aligned_window(a, x)
    bound = start + len(x.values())
    length = start + period * (bound + 1)
    return len(longest_chain(a, x, length, target=bound + 1)) > bound


# -- catalogue and random instances ----------------------------------------------


def _sets(*specs: str) -> list:
    return [frozenset(s) for s in specs]


def catalog() -> list:
    """Fifty fixed instances ``(name, a, x)``: hand-made edge cases plus seeded random ones."""
    out = [
        ("constant-hit", LassoSetSeq([], _sets("v")), LassoSeq([], "v")),
        ("all-empty", LassoSetSeq([], _sets("")), LassoSeq([], "uv")),
        ("all-empty-long", LassoSetSeq(_sets("uv", "u"), _sets("")), LassoSeq("uv", "u")),
        ("shifted-parity", LassoSetSeq([], _sets("v", "u")), LassoSeq([], "uv")),
        ("matching-parity", LassoSetSeq([], _sets("u", "v")), LassoSeq([], "uv")),
        ("preamble-only-hit", LassoSetSeq(_sets("u"), _sets("")), LassoSeq("u", "u")),
        ("late-hit", LassoSetSeq(_sets("", ""), _sets("", "", "w")), LassoSeq("ww", "uvw")),
        ("coprime-cycles-hit", LassoSetSeq([], _sets("u", "", "")), LassoSeq([], "uv")),
        ("coprime-cycles-miss", LassoSetSeq([], _sets("v", "", "")), LassoSeq([], "uuu")),
        ("full-sets", LassoSetSeq([], _sets("uvw")), LassoSeq("w", "uvvw")),
        ("disjoint-values", LassoSetSeq([], _sets("xy")), LassoSeq([], "uv")),
        ("next-position-only", LassoSetSeq(_sets(""), _sets("v", "u")), LassoSeq([], "uv")),
    ]
    rng = random.Random(20240601)
    universe = "uvwz"
    while len(out) < 50:
        k = len(out)
        a = random_set_lasso(rng, universe, sparse=k % 3 == 0)
        x = random_lasso(rng, universe)
        out.append((f"random-{k}", a, x))
    return out


def random_lasso(rng: random.Random, universe: Sequence, max_pre: int = 3, max_cyc: int = 4) -> LassoSeq:
    pre = [rng.choice(universe) for _ in range(rng.randint(0, max_pre))]
    cyc = [rng.choice(universe) for _ in range(rng.randint(1, max_cyc))]
    return LassoSeq(pre, cyc)


def random_set_lasso(rng: random.Random, universe: Sequence, max_pre: int = 3, max_cyc: int = 4,
                     sparse: bool = False) -> LassoSetSeq:
    def one() -> frozenset:
        p = 0.2 if sparse else 0.5
        return frozenset(u for u in universe if rng.random() < p)

    return LassoSetSeq([one() for _ in range(rng.randint(0, max_pre))], [one() for _ in range(rng.randint(1, max_cyc))])


@dataclass
class CatalogReport:
    instances: int
    agree: int
    subsuming: int
    disagreements: list

    @property
    def ok(self) -> bool:
        return self.agree == self.instances

    def to_dict(self) -> dict:
        return {"instances": self.instances, "agree": self.agree, "subsuming": self.subsuming,
                "disagreements": self.disagreements}


def check_catalog(instances: Iterable | None = None) -> CatalogReport:
    rep = CatalogReport(0, 0, 0, [])
    for name, a, x in instances if instances is not None else catalog():
        fast, slow = subsumes(a, x), chain_oracle(a, x)
        rep.instances += 1
        rep.subsuming += fast
        if fast == slow:
            rep.agree += 1
        else:
            rep.disagreements.append({"name": name, "a": str(a), "x": str(x), "reduction": fast, "chains": slow})
    return rep


@dataclass
class RamseyReport:
    samples: int
    universe: int
    seed: int
    holds: int
    union_subsumes: int
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return self.holds == self.samples

    def to_dict(self) -> dict:
        out = {"samples": self.samples, "universe": self.universe, "seed": self.seed, "holds": self.holds,
               "unionSubsumes": self.union_subsumes}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def ramsey(samples: int = 1000, universe: int = 4, seed: int = 0) -> RamseyReport:
    """Check the union-splitting property on seeded random lasso triples."""
    rng = random.Random(seed)
    values = [f"u{i}" for i in range(universe)]
    rep = RamseyReport(samples, universe, seed, 0, 0)
    for _ in range(samples):
        a = random_set_lasso(rng, values, sparse=rng.random() < 0.5)
        b = random_set_lasso(rng, values, sparse=rng.random() < 0.5)
        x = random_lasso(rng, values)
        rep.union_subsumes += subsumes(union(a, b), x)
        if union_split_property(a, b, x):
            rep.holds += 1
        elif rep.witness is None:
            rep.witness = {"a": str(a), "b": str(b), "x": str(x)}
    return rep


# -- concrete syntax -------------------------------------------------------------

_LASSO = re.compile(r"^\s*pre\s*:\s*\[(?P<pre>.*?)\]\s*;\s*cyc\s*:\s*\[(?P<cyc>.*?)\]\s*$", re.S)
_ITEM = re.compile(r"\s*(\{[^{}]*\}|[^,{}\s]+)\s*(?:,|$)")


def _items(body: str) -> list:
    body = body.strip()
    if not body:
        return []
    out, pos = [], 0
    while pos < len(body):
        m = _ITEM.match(body, pos)
        if m is None:
            raise ValueError(f"cannot read lasso entries near {body[pos:]!r}")
        out.append(m.group(1))
        pos = m.end()
    return out


def _set(item: str) -> frozenset:
    if not (item.startswith("{") and item.endswith("}")):
        raise ValueError(f"expected a set like {{u,v}}, got {item!r}")
    return frozenset(v.strip() for v in item[1:-1].split(",") if v.strip())


def parse_lasso(text: str) -> LassoSeq:
    """Read ``pre:[u,v];cyc:[w]``."""
    m = _LASSO.match(text)
    if m is None:
        raise ValueError(f"expected pre:[...];cyc:[...], got {text!r}")
    pre, cyc = _items(m["pre"]), _items(m["cyc"])
    if any(i.startswith("{") for i in pre + cyc):
        raise ValueError("element lasso entries must be plain values")
    return LassoSeq(pre, cyc)


def parse_set_lasso(text: str) -> LassoSetSeq:
    """Read ``pre:[{v}];cyc:[{u},{v},{}]``."""
    m = _LASSO.match(text)
    if m is None:
        raise ValueError(f"expected pre:[...];cyc:[...], got {text!r}")
    return LassoSetSeq([_set(i) for i in _items(m["pre"])], [_set(i) for i in _items(m["cyc"])])
