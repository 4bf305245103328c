"""Finite-set monads as Kleisli triples, and the checks built on them.

A monad here is an object map on explicitly listed finite sets together with a
unit and a Kleisli extension.  Sets are tuples of hashable atoms; the canonical
test universe is ``a0, a1, ...``.  Every operation takes the relevant sets
explicitly, because some representations (continuations, for instance) index
their elements by the domain.

Monads with infinite carriers (lists, multisets, free monads) are represented
exactly, but their carriers are only materialised up to a bound; such monads
have ``bounded = True`` and reports say so.
"""

from __future__ import annotations

import itertools
import random
import re
import time
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from operator import itemgetter
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .theory import App, Equation, OpSymbol, Term, Theory, Var, equation


def atoms(n: int, prefix: str = "a") -> tuple:
    return tuple(f"{prefix}{i}" for i in range(n))


class _Bottom:
    """The error element of the well-order monad."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "⊥"

    def __reduce__(self):
        return (_Bottom, ())


BOT = _Bottom()


@dataclass(frozen=True, order=True)
class Inl:
    value: Hashable

    def __repr__(self) -> str:
        return f"inl({self.value!r})"


@dataclass(frozen=True, order=True)
class Inr:
    value: Hashable

    def __repr__(self) -> str:
        return f"inr({self.value!r})"


def to_jsonable(v):
    """Best-effort JSON rendering of carrier elements (for reports)."""
    if v is BOT:
        return "⊥"
    if isinstance(v, Inl):
        return {"inl": to_jsonable(v.value)}
    if isinstance(v, Inr):
        return {"inr": to_jsonable(v.value)}
    if isinstance(v, frozenset):
        return sorted((to_jsonable(x) for x in v), key=repr)
    if isinstance(v, (tuple, list)):
        return [to_jsonable(x) for x in v]
    if isinstance(v, (str, int, float, bool)) or v is None:
        return v
    return repr(v)


class FiniteMonad:
    """Base class: subclasses provide ``_carrier``, ``unit`` and ``kleisli``."""

    name = "monad"
    bounded = False

    def __init__(self) -> None:
        self._carriers: dict = {}
        self._law_cache: dict = {}

    def carrier(self, xs: Sequence) -> tuple:
        xs = tuple(xs)
        found = self._carriers.get(xs)
        if found is None:
            found = self._carriers[xs] = tuple(self._carrier(xs))
        return found

    def _carrier(self, xs: tuple) -> Iterable:
        raise NotImplementedError

    def unit(self, xs: Sequence, x):
        raise NotImplementedError

    def kleisli(self, xs: Sequence, ys: Sequence, f: Mapping) -> Callable:
        raise NotImplementedError

    def kleisli_many(self, xs: Sequence, ys: Sequence, f: Mapping, ms: Iterable) -> list:
        return list(map(self.kleisli(xs, ys, f), ms))

    def fmap(self, xs: Sequence, ys: Sequence, h: Mapping) -> Callable:
        """Functor action derived from the triple: T h = (unit . h)*."""
        return self.kleisli(xs, ys, {x: self.unit(ys, h[x]) for x in xs})

    def multiplication(self, xs: Sequence) -> Callable:
        """mu_X = (id on T X)*, applied to elements of T(T X)."""
        tx = self.carrier(xs)
        return self.kleisli(tx, xs, {m: m for m in tx})

    def encode(self, m):
        return to_jsonable(m)

    def show(self, m) -> str:
        return str(self.encode(m))

    def __repr__(self) -> str:
        return f"<monad {self.name}>"


# -- catalogue -----------------------------------------------------------------


class IdentityMonad(FiniteMonad):
    name = "identity"

    def _carrier(self, xs):
        return xs

    def unit(self, xs, x):
        return x

    def kleisli(self, xs, ys, f):
        return f.__getitem__


class StateMonad(FiniteMonad):
    """T X = S -> S x X, elements stored as the tuple of (state, value) indexed by state."""

    def __init__(self, states: int):
        super().__init__()
        if states < 1:
            raise ValueError("state monad needs at least one state")
        self.states = states
        self.name = f"state:S={states}"

    def _carrier(self, xs):
        pairs = list(itertools.product(range(self.states), xs))
        return itertools.product(pairs, repeat=self.states)

    def unit(self, xs, x):
        return tuple((s, x) for s in range(self.states))

    def kleisli(self, xs, ys, f):
        return lambda m: tuple(f[x][s] for s, x in m)


class PowersetMonad(FiniteMonad):
    def __init__(self, nonempty: bool = False):
        super().__init__()
        self.nonempty = nonempty
        self.name = "powerset:nonempty" if nonempty else "powerset:full"

    def _carrier(self, xs):
        start = 1 if self.nonempty else 0
        for k in range(start, len(xs) + 1):
            for combo in itertools.combinations(xs, k):
                yield frozenset(combo)

    def unit(self, xs, x):
        return frozenset((x,))

    def kleisli(self, xs, ys, f):
        empty = frozenset()
        return lambda m: empty.union(*[f[x] for x in m])


class BrokenPowersetMonad(PowersetMonad):
    """Powerset with the unit replaced by the empty set; fails the left unit law."""

    def __init__(self):
        super().__init__(False)
        self.name = "powerset:broken"

    def unit(self, xs, x):
        return frozenset()


class ListMonad(FiniteMonad):
    bounded = True

    def __init__(self, cap: int = 3):
        super().__init__()
        self.cap = cap
        self.name = f"list:cap={cap}"

    def _carrier(self, xs):
        for k in range(self.cap + 1):
            yield from itertools.product(xs, repeat=k)

    def unit(self, xs, x):
        return (x,)

    def kleisli(self, xs, ys, f):
        chain = itertools.chain.from_iterable
        return lambda m: tuple(chain([f[x] for x in m]))


class MultisetMonad(FiniteMonad):
    """Finite multisets as frozensets of (element, multiplicity) pairs."""

    bounded = True

    def __init__(self, cap: int = 3):
        super().__init__()
        self.cap = cap
        self.name = f"multiset:cap={cap}"

    def _carrier(self, xs):
        for total in range(self.cap + 1):
            for combo in itertools.combinations_with_replacement(xs, total):
                yield frozenset(Counter(combo).items())

    def unit(self, xs, x):
        return frozenset(((x, 1),))

    def kleisli(self, xs, ys, f):
        def ext(m):
            acc: Counter = Counter()
            for x, k in m:
                for y, j in f[x]:
                    acc[y] += k * j
            return frozenset(acc.items())

        return ext

    def encode(self, m):
        return sorted(([to_jsonable(x), k] for x, k in m), key=repr)


class ContinuationMonad(FiniteMonad):
    """T X = (X -> R) -> R; an element is the tuple of its results, one per continuation.

    Continuations X -> R are listed in ``itertools.product`` order, so the index of
    ``k`` is ``k`` read as a base-|R| numeral.
    """

    def __init__(self, results: int):
        super().__init__()
        if results < 1:
            raise ValueError("continuation monad needs a non-empty result set")
        self.results = results
        self.name = f"cont:R={results}"

    def _continuations(self, xs):
        return list(itertools.product(range(self.results), repeat=len(xs)))

    def _carrier(self, xs):
        return itertools.product(range(self.results), repeat=self.results ** len(xs))

    def unit(self, xs, x):
        i = tuple(xs).index(x)
        return tuple(k[i] for k in self._continuations(xs))

    def kleisli(self, xs, ys, f):
        r = self.results
        idx = []
        for j in range(r ** len(ys)):
            code = 0
            for x in xs:
                code = code * r + f[x][j]
            idx.append(code)
        if len(idx) == 1:
            only = idx[0]
            return lambda m: (m[only],)
        getter = itemgetter(*idx)
        return getter


class WellOrderMonad(FiniteMonad):
    """Duplicate-free non-empty sequences plus the error element ``BOT``."""

    def __init__(self):
        super().__init__()
        self.name = "wellorder"

    def _carrier(self, xs):
        yield BOT
        for k in range(1, len(xs) + 1):
            yield from itertools.permutations(xs, k)

    def unit(self, xs, x):
        return (x,)

    def kleisli(self, xs, ys, f):
        def ext(m):
            if m is BOT:
                return BOT
            out: list = []
            seen: set = set()
            for x in m:
                w = f[x]
                if w is BOT:
                    return BOT
                for y in w:
                    if y in seen:
                        return BOT
                    seen.add(y)
                    out.append(y)
            return tuple(out)

        return ext


class FreeMonad(FiniteMonad):
    """Free monad over a finite signature, carriers cut at a tree-height bound.

    A tree is stored as its Polish notation in a string, one character per node:
    operation symbols and atoms are each assigned a private code point.  Kleisli
    extension is then a single ``str.translate`` that replaces atom characters by
    the strings of their images and leaves operation characters alone.
    """

    bounded = True

    def __init__(self, ops: Sequence[tuple], depth: int, name: str):
        super().__init__()
        self.ops = tuple((str(n), int(k)) for n, k in ops)
        self.depth = depth
        self.name = name
        self._op_arity: dict = {}
        self._codes: dict = {}
        self._decode: list = []
        self._identity: list = []
        for op, k in self.ops:
            ch = self._register(("op", op))
            self._op_arity[ch] = (op, k)

    def _register(self, key) -> str:
        ch = self._codes.get(key)
        if ch is None:
            code = len(self._decode) + 1
            ch = chr(code)
            self._codes[key] = ch
            self._decode.append(key)
            while len(self._identity) <= code:
                self._identity.append(chr(len(self._identity)))
        return ch

    def atom_char(self, x) -> str:
        return self._register(("atom", x))

    def _carrier(self, xs):
        leaves = [self.atom_char(x) for x in xs]
        level = list(leaves)
        for _ in range(self.depth):
            nxt = list(leaves)
            for op, k in self.ops:
                head = self._codes[("op", op)]
                nxt.extend(head + "".join(args) for args in itertools.product(level, repeat=k))
            level = nxt
        return level

    def unit(self, xs, x):
        return self.atom_char(x)

    def node(self, op: str, children: Sequence[str]) -> str:
        return self._codes[("op", op)] + "".join(children)

    def _table(self, f: Mapping) -> list:
        chars = [(self.atom_char(x), v) for x, v in f.items()]
        table = list(self._identity)
        for ch, v in chars:
            table[ord(ch)] = v
        return table

    def kleisli(self, xs, ys, f):
        table = self._table(f)
        return lambda m: m.translate(table)

    def kleisli_many(self, xs, ys, f, ms):
        table = self._table(f)
        return [m.translate(table) for m in ms]

    def to_term(self, m: str) -> Term:
        pos = 0

        def parse() -> Term:
            nonlocal pos
            key = self._decode[ord(m[pos]) - 1]
            pos += 1
            if key[0] == "atom":
                return Var(key[1])
            op = key[1]
            k = dict(self.ops)[op]
            return App(op, tuple(parse() for _ in range(k)))

        return parse()

    def from_term(self, t: Term) -> str:
        if isinstance(t, Var):
            return self.atom_char(t.name)
        return self.node(t.op, [self.from_term(a) for a in t.args])

    def encode(self, m):
        return str(self.to_term(m))


class ExceptionMonad(FiniteMonad):
    """X |-> M(X + E): values are tagged ``Inl``, exceptions ``Inr``."""

    def __init__(self, inner: FiniteMonad, exceptions: Sequence):
        super().__init__()
        self.inner = inner
        self.exceptions = tuple(exceptions)
        self.bounded = inner.bounded
        self.name = f"exc:E={len(self.exceptions)}:{inner.name}"

    def tagged(self, xs) -> tuple:
        return tuple(Inl(x) for x in xs) + tuple(Inr(e) for e in self.exceptions)

    def _carrier(self, xs):
        return self.inner.carrier(self.tagged(xs))

    def unit(self, xs, x):
        return self.inner.unit(self.tagged(xs), Inl(x))

    def _lift(self, xs, ys, f) -> tuple:
        xe, ye = self.tagged(xs), self.tagged(ys)
        g = {Inl(x): f[x] for x in xs}
        for e in self.exceptions:
            g[Inr(e)] = self.inner.unit(ye, Inr(e))
        return xe, ye, g

    def kleisli(self, xs, ys, f):
        return self.inner.kleisli(*self._lift(xs, ys, f))

    def kleisli_many(self, xs, ys, f, ms):
        return self.inner.kleisli_many(*self._lift(xs, ys, f), ms)

    def encode(self, m):
        return self.inner.encode(m)


class CollapseMonad(FiniteMonad):
    """X |-> 1 for non-empty X and the empty set otherwise."""

    name = "collapse"

    def _carrier(self, xs):
        return [()] if xs else []

    def unit(self, xs, x):
        return ()

    def kleisli(self, xs, ys, f):
        return lambda m: ()


def exception_extend(monad: FiniteMonad, exceptions: Sequence) -> ExceptionMonad:
    return ExceptionMonad(monad, exceptions)


def free_monad(ops: Sequence[tuple], depth: int, name: str | None = None) -> FreeMonad:
    label = name or "free[" + ",".join(f"{n}/{k}" for n, k in ops) + f"]:depth={depth}"
    return FreeMonad(ops, depth, label)


_PARAM_RE = re.compile(r"^([A-Za-z]+)=(\d+)$")


@lru_cache(maxsize=None)
def builtin_monad(name: str) -> FiniteMonad:
    """Build a monad from a CLI string such as ``state:S=2`` or ``exc:E=1:wellorder``.

    Instances are shared per name, so law results cached on an instance
    are reused by later checks (theorify repeats the associativity check).
    """
    name = name.strip()
    head, _, rest = name.partition(":")
    head = head.lower()
    if head in ("exc", "exception"):
        m = re.match(r"^E=(\d+):(.+)$", rest)
        if not m:
            raise ValueError(f"exception monad needs E=<n>:<inner>, got {name!r}")
        inner = builtin_monad(m.group(2))
        return ExceptionMonad(inner, atoms(int(m.group(1)), "e"))
    params: dict = {}
    flags: list = []
    for part in filter(None, rest.split(":")):
        pm = _PARAM_RE.match(part)
        if pm:
            params[pm.group(1).lower()] = int(pm.group(2))
        else:
            flags.append(part.lower())

    def param(key: str, default: int | None = None, low: int = 0) -> int:
        if key not in params and default is None:
            raise ValueError(f"monad {head} needs parameter {key.upper()}=<n>")
        v = params.pop(key, default)
        if v < low:
            raise ValueError(f"parameter {key} of {head} out of range: {v}")
        return v

    if head == "identity":
        mon: FiniteMonad = IdentityMonad()
    elif head == "state":
        mon = StateMonad(param("s", None, 1))
    elif head == "powerset":
        kind = flags.pop() if flags else "full"
        if kind == "full":
            mon = PowersetMonad(False)
        elif kind == "nonempty":
            mon = PowersetMonad(True)
        elif kind == "broken":
            mon = BrokenPowersetMonad()
        else:
            raise ValueError(f"unknown powerset variant {kind!r}")
    elif head == "list":
        mon = ListMonad(param("cap", 3))
    elif head == "multiset":
        mon = MultisetMonad(param("cap", 3))
    elif head == "cont":
        mon = ContinuationMonad(param("r", None, 1))
    elif head == "wellorder":
        mon = WellOrderMonad()
    elif head in ("free", "input"):
        arity = param("i", None, 0)
        depth = param("depth", 2)
        mon = FreeMonad([("read", arity)], depth, f"free:I={arity}:depth={depth}")
    elif head == "output":
        count = param("o", None, 0)
        depth = param("depth", 2)
        mon = FreeMonad([(f"out{i}", 1) for i in range(count)], depth, f"output:O={count}:depth={depth}")
    elif head == "sigma22":
        depth = param("depth", 1)
        mon = FreeMonad([("u0", 2), ("u1", 2)], depth, f"sigma22:depth={depth}")
    elif head == "collapse":
        mon = CollapseMonad()
    else:
        raise ValueError(f"unknown monad {name!r}")
    if params or flags:
        raise ValueError(f"unexpected parameters for {head}: {sorted(params) + flags}")
    return mon


BUILTIN_MONADS = (
    "identity",
    "state:S=2",
    "powerset:full",
    "powerset:nonempty",
    "list:cap=3",
    "multiset:cap=3",
    "cont:R=2",
    "wellorder",
    "free:I=2:depth=2",
    "output:O=2:depth=2",
    "sigma22:depth=1",
    "exc:E=1:identity",
    "exc:E=1:powerset:full",
    "exc:E=1:wellorder",
)


# -- law checking --------------------------------------------------------------

DEFAULT_EXHAUST_LIMIT = 150_000_000


@dataclass
class LawReport:
    monad: str
    max_size: int
    status: str = "pass"
    checked: dict = field(default_factory=dict)
    witness: dict | None = None
    sampled: bool = False
    bounded: bool = False
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def to_dict(self) -> dict:
        out = {
            "monad": self.monad,
            "maxSize": self.max_size,
            "status": self.status,
            "checked": dict(self.checked),
            "sampled": self.sampled,
            "boundedFragment": self.bounded,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _maps(dom: Sequence, cod: Sequence) -> Iterable:
    """All maps dom -> cod as dicts, in product order (index = base-|cod| numeral)."""
    for values in itertools.product(cod, repeat=len(dom)):
        yield dict(zip(dom, values))


def _map_at(dom: Sequence, cod: Sequence, index: int) -> dict:
    values = []
    for _ in dom:
        index, r = divmod(index, len(cod))
        values.append(r)
    return {x: cod[i] for x, i in zip(dom, reversed(values))}


def _render_map(monad: FiniteMonad, f: Mapping) -> dict:
    return {str(k): monad.encode(v) for k, v in f.items()}


def _left_unit(monad: FiniteMonad, nx: int, ny: int):
    xs, ys = atoms(nx), atoms(ny)
    ty = monad.carrier(ys)
    count = 0
    for fi, f in enumerate(_maps(xs, ty)):
        ext = monad.kleisli(xs, ys, f)
        for x in xs:
            count += 1
            lhs = ext(monad.unit(xs, x))
            if lhs != f[x]:
                return count, {
                    "law": "left-unit", "sizes": [nx, ny], "f": _render_map(monad, f), "fIndex": fi,
                    "x": x, "lhs": monad.encode(lhs), "rhs": monad.encode(f[x]),
                }
    return count, None


def _right_unit(monad: FiniteMonad, nx: int):
    xs = atoms(nx)
    tx = monad.carrier(xs)
    eta = {x: monad.unit(xs, x) for x in xs}
    out = monad.kleisli_many(xs, xs, eta, tx)
    for i, (m, r) in enumerate(zip(tx, out)):
        if m != r:
            return i + 1, {"law": "right-unit", "sizes": [nx], "m": monad.encode(m), "mIndex": i,
                           "lhs": monad.encode(r), "rhs": monad.encode(m)}
    return len(tx), None


def assoc_count(monad: FiniteMonad, nx: int, ny: int, nz: int) -> int:
    tx = len(monad.carrier(atoms(nx)))
    ty = len(monad.carrier(atoms(ny)))
    tz = len(monad.carrier(atoms(nz)))
    return tx * ty ** nx * tz ** ny


def _assoc_instance(monad: FiniteMonad, sizes: tuple, fi: int, gi: int, mi: int) -> tuple:
    xs, ys, zs = (atoms(n) for n in sizes)
    tx, ty, tz = monad.carrier(xs), monad.carrier(ys), monad.carrier(zs)
    f, g, m = _map_at(xs, ty, fi), _map_at(ys, tz, gi), tx[mi]
    gstar = monad.kleisli(ys, zs, g)
    lhs = gstar(monad.kleisli(xs, ys, f)(m))
    rhs = monad.kleisli(xs, zs, {x: gstar(f[x]) for x in xs})(m)
    return f, g, m, lhs, rhs


def _assoc_witness(monad, sizes, fi, gi, mi) -> dict:
    f, g, m, lhs, rhs = _assoc_instance(monad, sizes, fi, gi, mi)
    return {"law": "associativity", "sizes": list(sizes), "f": _render_map(monad, f), "g": _render_map(monad, g),
            "m": monad.encode(m), "fIndex": fi, "gIndex": gi, "mIndex": mi,
            "lhs": monad.encode(lhs), "rhs": monad.encode(rhs)}


def _associativity(monad: FiniteMonad, nx: int, ny: int, nz: int):
    """(g* . f)* = g* . f* on every m in T X, for all f: X -> T Y and g: Y -> T Z."""
    key = ("assoc", nx, ny, nz)
    if key in monad._law_cache:
        return monad._law_cache[key]
    xs, ys, zs = atoms(nx), atoms(ny), atoms(nz)
    tx, ty, tz = monad.carrier(xs), monad.carrier(ys), monad.carrier(zs)
    fs = list(_maps(xs, ty))
    f_images = [monad.kleisli_many(xs, ys, f, tx) for f in fs]
    count = 0
    result = None
    for gi, g in enumerate(_maps(ys, tz)):
        gstar = monad.kleisli(ys, zs, g)
        gcache: dict = {}
        for fi, f in enumerate(fs):
            fg = {}
            for x in xs:
                fx = f[x]
                v = gcache.get(fx)
                if v is None:
                    v = gcache[fx] = gstar(fx)
                fg[x] = v
            lhs = monad.kleisli_many(ys, zs, g, f_images[fi])
            rhs = monad.kleisli_many(xs, zs, fg, tx)
            count += len(tx)
            if lhs != rhs:
                mi = next(i for i, (a, b) in enumerate(zip(lhs, rhs)) if a != b)
                result = (count, _assoc_witness(monad, (nx, ny, nz), fi, gi, mi))
                break
        if result:
            break
    if result is None:
        result = (count, None)
    monad._law_cache[key] = result
    return result


def _sampled_associativity(monad, nx, ny, nz, samples: int, rng: random.Random):
    xs, ys, zs = atoms(nx), atoms(ny), atoms(nz)
    tx, ty, tz = monad.carrier(xs), monad.carrier(ys), monad.carrier(zs)
    if not tx or (nx and not ty) or (ny and not tz):
        return 0, None
    for i in range(samples):
        fi = rng.randrange(len(ty) ** nx)
        gi = rng.randrange(len(tz) ** ny)
        mi = rng.randrange(len(tx))
        _, _, _, lhs, rhs = _assoc_instance(monad, (nx, ny, nz), fi, gi, mi)
        if lhs != rhs:
            return i + 1, _assoc_witness(monad, (nx, ny, nz), fi, gi, mi)
    return samples, None


def check_monad_laws(monad: FiniteMonad, max_size: int, laws: Iterable[str] = ("left-unit", "right-unit", "associativity"),
                     exhaust_limit: int = DEFAULT_EXHAUST_LIMIT, samples: int = 20_000, seed: int = 0) -> LawReport:
    """Kleisli-form monad laws over all sets of size <= ``max_size`` from the atom universe.

    An associativity case with more than ``exhaust_limit`` instances is sampled
    instead, and the report's ``sampled`` flag is set.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    laws = tuple(laws)
    start = time.perf_counter()
    report = LawReport(monad.name, max_size, bounded=monad.bounded)
    rng = random.Random(seed)
    sizes = range(max_size + 1)

    def record(law: str, n: int, witness) -> bool:
        report.checked[law] = report.checked.get(law, 0) + n
        if witness is not None:
            report.status = "fail"
            report.witness = witness
            return True
        return False

    done = False
    if "left-unit" in laws:
        for nx, ny in itertools.product(sizes, repeat=2):
            if record("left-unit", *_left_unit(monad, nx, ny)):
                done = True
                break
    if not done and "right-unit" in laws:
        for nx in sizes:
            if record("right-unit", *_right_unit(monad, nx)):
                done = True
                break
    if not done and "associativity" in laws:
        for nx, ny, nz in itertools.product(sizes, repeat=3):
            if assoc_count(monad, nx, ny, nz) > exhaust_limit:
                report.sampled = True
                n, w = _sampled_associativity(monad, nx, ny, nz, samples, rng)
            else:
                n, w = _associativity(monad, nx, ny, nz)
            if record("associativity", n, w):
                break
    report.seconds = time.perf_counter() - start
    return report


def replay_law_witness(monad: FiniteMonad, witness: Mapping) -> bool:
    """Re-evaluate a recorded law instance; True when it still fails."""
    law = witness["law"]
    sizes = tuple(witness["sizes"])
    if law == "associativity":
        _, _, _, lhs, rhs = _assoc_instance(monad, sizes, witness["fIndex"], witness["gIndex"], witness["mIndex"])
        return lhs != rhs
    if law == "left-unit":
        xs, ys = atoms(sizes[0]), atoms(sizes[1])
        f = _map_at(xs, monad.carrier(ys), witness["fIndex"])
        x = witness["x"]
        return monad.kleisli(xs, ys, f)(monad.unit(xs, x)) != f[x]
    if law == "right-unit":
        xs = atoms(sizes[0])
        m = monad.carrier(xs)[witness["mIndex"]]
        return monad.kleisli(xs, xs, {x: monad.unit(xs, x) for x in xs})(m) != m
    raise ValueError(f"unknown law {law!r}")


# -- theory of a monad ---------------------------------------------------------


@dataclass
class TheorifyReport:
    monad: str
    max_arity: int
    operations: int = 0
    unit_equations: int = 0
    substitution_equations: int = 0
    outside_fragment: int = 0
    unit_checks: int = 0
    substitution_checks: int = 0
    violations: int = 0
    witness: dict | None = None

    def to_dict(self) -> dict:
        out = {k: v for k, v in self.__dict__.items() if k != "witness"}
        out["maxArity"] = out.pop("max_arity")
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def theorify(monad: FiniteMonad, max_arity: int = 2, build_equations: bool = True) -> tuple:
    """The theory of the monad restricted to argument sets a0..a(k-1) with k <= ``max_arity``.

    There is one operation ``h{k}_{i}`` of arity ``k`` per element ``i`` of ``T{a0..a(k-1)}``.
    Returns ``(theory, report)``.  The report counts the schema instances and the
    semantic checks: interpreting each operation by Kleisli extension, the unit
    schema is the left unit law and the substitution schema is associativity,
    both verified over every target set of size <= ``max_arity``.
    """
    report = TheorifyReport(monad.name, max_arity)
    ops: list = []
    eqs: list = []
    index: dict = {}
    for k in range(max_arity + 1):
        tx = monad.carrier(atoms(k))
        index[k] = {m: i for i, m in enumerate(tx)}
        ops.extend(OpSymbol(f"h{k}_{i}", k) for i in range(len(tx)))
    report.operations = len(ops)

    def pvars(k: int) -> tuple:
        return tuple(Var(f"p{i}") for i in range(k))

    for k in range(1, max_arity + 1):
        xs = atoms(k)
        for a, x in enumerate(xs):
            i = index[k][monad.unit(xs, x)]
            report.unit_equations += 1
            if build_equations:
                eqs.append(equation(App(f"h{k}_{i}", pvars(k)), pvars(k)[a], context=[p.name for p in pvars(k)]))
    for k, l in itertools.product(range(max_arity + 1), repeat=2):
        xs, ys = atoms(k), atoms(l)
        tx, ty = monad.carrier(xs), monad.carrier(ys)
        for f in _maps(xs, ty):
            ext = monad.kleisli_many(xs, ys, f, tx)
            inner = [App(f"h{l}_{index[l][f[x]]}", pvars(l)) for x in xs] if build_equations else None
            for m, fm in zip(tx, ext):
                j = index[l].get(fm)
                if j is None:
                    report.outside_fragment += 1
                    continue
                report.substitution_equations += 1
                if build_equations:
                    eqs.append(Equation(frozenset(p.name for p in pvars(l)), App(f"h{l}_{j}", pvars(l)),
                                        App(f"h{k}_{index[k][m]}", tuple(inner))))
    sizes = range(max_arity + 1)
    for k, z in itertools.product(sizes, repeat=2):
        n, w = _left_unit(monad, k, z)
        report.unit_checks += n
        if w is not None:
            report.violations += 1
            report.witness = report.witness or w
    for k, l, z in itertools.product(sizes, repeat=3):
        n, w = _associativity(monad, k, l, z)
        report.substitution_checks += n
        if w is not None:
            report.violations += 1
            report.witness = report.witness or w
    theory = Theory.make(f"Theta[{monad.name}]<={max_arity}", ops, eqs)
    return theory, report


# -- commutation ---------------------------------------------------------------


@dataclass(frozen=True)
class CommuteResult:
    commutes: bool
    lhs: object
    rhs: object


def commute_sides(monad: FiniteMonad, xs: Sequence, ys: Sequence, p, q) -> tuple:
    """Both sides of: do x <- p; y <- q; ret (x,y)  versus  do y <- q; x <- p; ret (x,y)."""
    xs, ys = tuple(xs), tuple(ys)
    pairs = tuple(itertools.product(xs, ys))
    lhs = monad.kleisli(xs, pairs, {
        x: monad.kleisli(ys, pairs, {y: monad.unit(pairs, (x, y)) for y in ys})(q) for x in xs
    })(p)
    rhs = monad.kleisli(ys, pairs, {
        y: monad.kleisli(xs, pairs, {x: monad.unit(pairs, (x, y)) for x in xs})(p) for y in ys
    })(q)
    return lhs, rhs


def commutes(monad: FiniteMonad, xs: Sequence, ys: Sequence, p, q) -> CommuteResult:
    lhs, rhs = commute_sides(monad, xs, ys, p, q)
    return CommuteResult(lhs == rhs, lhs, rhs)


@dataclass
class CommutativityReport:
    monad: str
    max_size: int
    commutative: bool
    checked: int
    witness: dict | None = None

    def to_dict(self) -> dict:
        out = {"monad": self.monad, "maxSize": self.max_size, "commutative": self.commutative, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def is_commutative(monad: FiniteMonad, max_size: int) -> CommutativityReport:
    """Search all p in T A, q in T B with |A|, |B| <= max_size; the witness is minimal by (|A|, |B|, p index, q index)."""
    checked = 0
    for na, nb in itertools.product(range(max_size + 1), repeat=2):
        xs, ys = atoms(na, "a"), atoms(nb, "b")
        for i, p in enumerate(monad.carrier(xs)):
            for j, q in enumerate(monad.carrier(ys)):
                checked += 1
                lhs, rhs = commute_sides(monad, xs, ys, p, q)
                if lhs != rhs:
                    witness = {"sizes": [na, nb], "pIndex": i, "qIndex": j, "p": monad.encode(p),
                               "q": monad.encode(q), "lhs": monad.encode(lhs), "rhs": monad.encode(rhs)}
                    return CommutativityReport(monad.name, max_size, False, checked, witness)
    return CommutativityReport(monad.name, max_size, True, checked)


def replay_commute_witness(monad: FiniteMonad, witness: Mapping) -> bool:
    """True when the recorded pair still fails to commute."""
    na, nb = witness["sizes"]
    xs, ys = atoms(na, "a"), atoms(nb, "b")
    p = monad.carrier(xs)[witness["pIndex"]]
    q = monad.carrier(ys)[witness["qIndex"]]
    lhs, rhs = commute_sides(monad, xs, ys, p, q)
    return lhs != rhs


# -- morphisms -----------------------------------------------------------------


@dataclass
class MonadMorphism:
    source: FiniteMonad
    target: FiniteMonad
    component: Callable  # (xs, m) -> element of target.carrier(xs)
    name: str = "alpha"

    def __call__(self, xs, m):
        return self.component(tuple(xs), m)


@dataclass
class MorphismReport:
    ok: bool
    checked: int
    surjective: bool
    witness: dict | None = None

    def to_dict(self) -> dict:
        out = {"ok": self.ok, "checked": self.checked, "surjective": self.surjective}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def check_morphism(alpha: MonadMorphism, max_size: int) -> MorphismReport:
    """Unit and extension compatibility, plus componentwise surjectivity, on sets of size <= max_size."""
    src, tgt = alpha.source, alpha.target
    checked = 0
    surjective = True
    for nx in range(max_size + 1):
        xs = atoms(nx)
        for x in xs:
            checked += 1
            if alpha(xs, src.unit(xs, x)) != tgt.unit(xs, x):
                return MorphismReport(False, checked, surjective, {"law": "unit", "x": x})
        image = {alpha(xs, m) for m in src.carrier(xs)}
        if not set(tgt.carrier(xs)) <= image:
            surjective = False
        for ny in range(max_size + 1):
            ys = atoms(ny)
            for f in _maps(xs, src.carrier(ys)):
                ext = src.kleisli(xs, ys, f)
                ext_t = tgt.kleisli(xs, ys, {x: alpha(ys, f[x]) for x in xs})
                for m in src.carrier(xs):
                    checked += 1
                    if alpha(ys, ext(m)) != ext_t(alpha(xs, m)):
                        return MorphismReport(False, checked, surjective, {
                            "law": "extension", "sizes": [nx, ny], "f": _render_map(src, f), "m": src.encode(m)})
    return MorphismReport(surjective, checked, surjective, None if surjective else {"law": "surjectivity"})


def identity_morphism(monad: FiniteMonad) -> MonadMorphism:
    return MonadMorphism(monad, monad, lambda xs, m: m, "id")


def list_to_multiset(cap: int = 3) -> MonadMorphism:
    return MonadMorphism(ListMonad(cap), MultisetMonad(cap),
                         lambda xs, m: frozenset(Counter(m).items()), "forget-order")


def nonempty_to_collapse() -> MonadMorphism:
    return MonadMorphism(PowersetMonad(True), CollapseMonad(), lambda xs, m: (), "collapse")
