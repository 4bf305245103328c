"""A small computational metalanguage over finite-set monads.

Types are ``1``, base types, products ``A * B`` and computations ``T A``.  Terms
are variables, function application, ``star``, pairs, projections, ``ret`` and
``do x <- p; q`` (which extends as far to the right as possible).

A program file (``.ml-meta``) declares base types, function symbols and typed
variables, then gives one term::

    base A = {a0, a1}
    base B
    fun f : A -> B = {a0 -> b0, a1 -> b0}
    fun g : A -> T B
    var p : T A
    term do x <- p; g x

A base type without a carrier, or a function symbol without a table, is a
parameter: :func:`equiv` quantifies over all carriers up to a size bound and over
all tables.  Evaluation closes over the environment, which is how the context
is threaded through binding.
"""

from __future__ import annotations

import itertools
import json
import random
import re
import time
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from . import monads as mo


# -- syntax ----------------------------------------------------------------------


@dataclass(frozen=True)
class UnitType:
    def __str__(self) -> str:
        return "1"


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Prod:
    left: "MLType"
    right: "MLType"

    def __str__(self) -> str:
        left = f"({self.left})" if isinstance(self.left, Prod) else str(self.left)
        return f"{left} * {self.right}"


@dataclass(frozen=True)
class Mon:
    arg: "MLType"

    def __str__(self) -> str:
        inner = f"({self.arg})" if isinstance(self.arg, Prod) else str(self.arg)
        return f"T {inner}"


MLType = UnitType | Base | Prod | Mon


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Apply:
    fn: str
    arg: "MLTerm"


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class Pair:
    first: "MLTerm"
    second: "MLTerm"


@dataclass(frozen=True)
class Fst:
    arg: "MLTerm"


@dataclass(frozen=True)
class Snd:
    arg: "MLTerm"


@dataclass(frozen=True)
class Ret:
    arg: "MLTerm"


@dataclass(frozen=True)
class Do:
    var: str
    bound: "MLTerm"
    body: "MLTerm"


MLTerm = Var | Apply | Star | Pair | Fst | Snd | Ret | Do

STAR = ()  # the value of type 1

KEYWORDS = {"do", "ret", "fst", "snd", "star", "base", "fun", "var", "term", "T"}


def free_vars(t: MLTerm) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Star):
        return frozenset()
    if isinstance(t, Pair):
        return free_vars(t.first) | free_vars(t.second)
    if isinstance(t, Do):
        return free_vars(t.bound) | (free_vars(t.body) - {t.var})
    return free_vars(t.arg)


def symbols(t: MLTerm) -> frozenset:
    """Function symbols applied somewhere in ``t``."""
    if isinstance(t, (Var, Star)):
        return frozenset()
    if isinstance(t, Pair):
        return symbols(t.first) | symbols(t.second)
    if isinstance(t, Do):
        return symbols(t.bound) | symbols(t.body)
    if isinstance(t, Apply):
        return symbols(t.arg) | {t.fn}
    return symbols(t.arg)


def show(t: MLTerm) -> str:
    """Concrete syntax that parses back to ``t``."""
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Star):
        return "star"
    if isinstance(t, Pair):
        return f"({show(t.first)}, {show(t.second)})"
    if isinstance(t, Do):
        return f"do {t.var} <- {_show_arg(t.bound)}; {show(t.body)}"
    head = {Fst: "fst", Snd: "snd", Ret: "ret"}.get(type(t)) or t.fn
    return f"{head} {_show_arg(t.arg)}"


def _show_arg(t: MLTerm) -> str:
    return f"({show(t)})" if isinstance(t, Do) else show(t)


# -- lexing and parsing ----------------------------------------------------------


class MLParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message, self.line, self.col = message, line, col


_TOKEN = re.compile(r"\s+|#[^\n]*|(?P<arrow><-|->)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<num>\d+)|(?P<sym>[(){},;:=*])")


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident, num, sym, eof
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list:
    toks = []
    pos, line, line_start = 0, 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise MLParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind is not None:
            toks.append(_Tok("sym" if kind == "arrow" else kind, m.group(), line, pos - line_start + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str) -> MLParseError:
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.text)
        return MLParseError(f"{message}, found {found}", t.line, t.col)

    def at(self, text: str) -> bool:
        return self.tok.kind in ("sym", "ident") and self.tok.text == text

    def take(self, text: str) -> _Tok:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        self.i += 1
        return self.toks[self.i - 1]

    def ident(self, what: str = "identifier") -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected {what}")
        self.i += 1
        return t.text

    # terms
    def term(self) -> MLTerm:
        if self.at("do"):
            self.i += 1
            name = self.ident("bound variable")
            self.take("<-")
            bound = self.unary()
            self.take(";")
            return Do(name, bound, self.term())
        return self.unary()

    def _starts_unary(self) -> bool:
        t = self.tok
        return (t.kind == "ident" and t.text not in ("do", "base", "fun", "var", "term", "T")) or \
            (t.kind == "sym" and t.text in ("(", "*"))

    def unary(self) -> MLTerm:
        t = self.tok
        if t.kind == "ident" and t.text in ("ret", "fst", "snd"):
            self.i += 1
            arg = self.unary()
            return {"ret": Ret, "fst": Fst, "snd": Snd}[t.text](arg)
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if self._starts_unary():
                return Apply(t.text, self.unary())
            return Var(t.text)
        return self.atom()

    def atom(self) -> MLTerm:
        if self.at("star") or self.at("*"):
            self.i += 1
            return Star()
        if self.at("("):
            self.i += 1
            first = self.term()
            if self.at(","):
                self.i += 1
                second = self.term()
                self.take(")")
                return Pair(first, second)
            self.take(")")
            return first
        raise self.error("expected a term")

    # types
    def type_(self) -> MLType:
        left = self.mtype()
        if self.at("*"):
            self.i += 1
            return Prod(left, self.type_())
        return left

    def mtype(self) -> MLType:
        if self.at("T"):
            self.i += 1
            return Mon(self.mtype())
        if self.tok.kind == "num" and self.tok.text == "1":
            self.i += 1
            return UnitType()
        if self.at("("):
            self.i += 1
            inner = self.type_()
            self.take(")")
            return inner
        return Base(self.ident("type"))

    # values (for carriers and tables)
    def value(self):
        if self.at("star") or self.at("*"):
            self.i += 1
            return STAR
        if self.at("("):
            self.i += 1
            first = self.value()
            self.take(",")
            second = self.value()
            self.take(")")
            return (first, second)
        return self.ident("value")

    def value_list(self, pairs: bool) -> list:
        self.take("{")
        out = []
        while not self.at("}"):
            if out:
                self.take(",")
            v = self.value()
            if pairs:
                self.take("->")
                v = (v, self.value())
            out.append(v)
        self.take("}")
        return out

    def expect_eof(self) -> None:
        if self.tok.kind != "eof":
            raise self.error("expected end of input")


def parse_term(src: str) -> MLTerm:
    p = _Parser(src)
    t = p.term()
    p.expect_eof()
    return t


def parse_type(src: str) -> MLType:
    p = _Parser(src)
    ty = p.type_()
    p.expect_eof()
    return ty


# -- signatures and programs -----------------------------------------------------


@dataclass(frozen=True)
class FunSymbol:
    name: str
    dom: MLType
    cod: MLType
    table: tuple | None = None  # ((arg, value), ...) or None for a parameter


@dataclass
class MLSignature:
    bases: dict = field(default_factory=dict)  # name -> tuple of atoms, or None for a parameter
    functions: dict = field(default_factory=dict)  # name -> FunSymbol

    def merged(self, other: "MLSignature") -> "MLSignature":
        out = MLSignature(dict(self.bases), dict(self.functions))
        for name, carrier in other.bases.items():
            if name in out.bases and out.bases[name] != carrier:
                raise ValueError(f"base type {name} declared differently")
            out.bases[name] = carrier
        for name, fs in other.functions.items():
            if name in out.functions and out.functions[name] != fs:
                raise ValueError(f"function {name} declared differently")
            out.functions[name] = fs
        return out


@dataclass
class Program:
    signature: MLSignature
    context: list  # [(name, MLType)] in declaration order
    term: MLTerm
    values: dict = field(default_factory=dict)  # variables given a first-order value


def parse_program(src: str) -> Program:
    p = _Parser(src)
    sig = MLSignature()
    ctx: list = []
    values: dict = {}
    while not p.at("term"):
        if p.at("base"):
            p.i += 1
            name = p.ident("base type name")
            carrier = None
            if p.at("="):
                p.i += 1
                carrier = tuple(p.value_list(False))
            sig.bases[name] = carrier
        elif p.at("fun"):
            p.i += 1
            name = p.ident("function name")
            p.take(":")
            dom = p.type_()
            p.take("->")
            cod = p.type_()
            table = None
            if p.at("="):
                p.i += 1
                table = tuple(p.value_list(True))
            sig.functions[name] = FunSymbol(name, dom, cod, table)
        elif p.at("var"):
            p.i += 1
            name = p.ident("variable name")
            p.take(":")
            ty = p.type_()
            ctx.append((name, ty))
            if p.at("="):
                p.i += 1
                values[name] = p.value()
        else:
            raise p.error("expected 'base', 'fun', 'var' or 'term'")
    p.take("term")
    t = p.term()
    p.expect_eof()
    return Program(sig, ctx, t, values)


# -- typing ----------------------------------------------------------------------


class MLTypeError(TypeError):
    def __init__(self, rule: str, message: str):
        super().__init__(f"[{rule}] {message}")
        self.rule, self.message = rule, message


def typecheck(ctx: Sequence, t: MLTerm, sig: MLSignature) -> MLType:
    """The type of ``t`` in the ordered context ``ctx`` (innermost binding wins)."""
    if isinstance(t, Var):
        for name, ty in reversed(ctx):
            if name == t.name:
                return ty
        raise MLTypeError("var", f"unbound variable {t.name}")
    if isinstance(t, Star):
        return UnitType()
    if isinstance(t, Apply):
        fs = sig.functions.get(t.fn)
        if fs is None:
            raise MLTypeError("app", f"{t.fn} is not a function symbol")
        arg = typecheck(ctx, t.arg, sig)
        if arg != fs.dom:
            raise MLTypeError("app", f"{t.fn} expects {fs.dom}, got {arg}")
        return fs.cod
    if isinstance(t, Pair):
        return Prod(typecheck(ctx, t.first, sig), typecheck(ctx, t.second, sig))
    if isinstance(t, (Fst, Snd)):
        rule = "fst" if isinstance(t, Fst) else "snd"
        ty = typecheck(ctx, t.arg, sig)
        if not isinstance(ty, Prod):
            raise MLTypeError(rule, f"{rule} needs a product, got {ty}")
        return ty.left if isinstance(t, Fst) else ty.right
    if isinstance(t, Ret):
        return Mon(typecheck(ctx, t.arg, sig))
    if isinstance(t, Do):
        bound = typecheck(ctx, t.bound, sig)
        if not isinstance(bound, Mon):
            raise MLTypeError("do", f"bound term must be a computation T A, got {bound}")
        body = typecheck(list(ctx) + [(t.var, bound.arg)], t.body, sig)
        if not isinstance(body, Mon):
            raise MLTypeError("do", f"body must be a computation T B, got {body}")
        return body
    raise TypeError(f"not a term: {t!r}")


def _base_names(ty: MLType) -> set:
    if isinstance(ty, Base):
        return {ty.name}
    if isinstance(ty, Prod):
        return _base_names(ty.left) | _base_names(ty.right)
    if isinstance(ty, Mon):
        return _base_names(ty.arg)
    return set()


# -- semantics -------------------------------------------------------------------


class Semantics:
    """Carriers of types for one monad and one choice of base carriers."""

    def __init__(self, monad: mo.FiniteMonad, bases: Mapping):
        self.monad = monad
        self.bases = dict(bases)
        self._carriers: dict = {}

    def carrier(self, ty: MLType) -> tuple:
        found = self._carriers.get(ty)
        if found is None:
            if isinstance(ty, UnitType):
                found = (STAR,)
            elif isinstance(ty, Base):
                if self.bases.get(ty.name) is None:
                    raise ValueError(f"base type {ty.name} has no carrier")
                found = tuple(self.bases[ty.name])
            elif isinstance(ty, Prod):
                found = tuple(itertools.product(self.carrier(ty.left), self.carrier(ty.right)))
            else:
                found = self.monad.carrier(self.carrier(ty.arg))
            self._carriers[ty] = found
        return found


_CACHE_CAP = 1 << 14


def compile_term(ctx: Sequence, t: MLTerm, sig: MLSignature, sem: Semantics) -> tuple:
    """``(type, run)`` where ``run(env)`` computes the denotation.

    ``env`` maps variable names to values and function names to tables (dicts
    from argument to result).  Each binding caches its Kleisli extension keyed by
    the values its body depends on, so quantifying over environments that share
    those values does not rebuild the extension.
    """
    mon = sem.monad

    def comp(ctx: list, t: MLTerm) -> tuple:
        if isinstance(t, Var):
            ty = typecheck(ctx, t, sig)
            name = t.name
            return ty, lambda env: env[name]
        if isinstance(t, Star):
            return UnitType(), lambda env: STAR
        if isinstance(t, Apply):
            fs = sig.functions.get(t.fn)
            aty, arun = comp(ctx, t.arg)
            typecheck(ctx, t, sig)
            fn = t.fn
            return fs.cod, lambda env: env[fn][arun(env)]
        if isinstance(t, Pair):
            lt, lrun = comp(ctx, t.first)
            rt, rrun = comp(ctx, t.second)
            return Prod(lt, rt), lambda env: (lrun(env), rrun(env))
        if isinstance(t, Fst):
            ty, run = comp(ctx, t.arg)
            if not isinstance(ty, Prod):
                raise MLTypeError("fst", f"fst needs a product, got {ty}")
            return ty.left, lambda env: run(env)[0]
        if isinstance(t, Snd):
            ty, run = comp(ctx, t.arg)
            if not isinstance(ty, Prod):
                raise MLTypeError("snd", f"snd needs a product, got {ty}")
            return ty.right, lambda env: run(env)[1]
        if isinstance(t, Ret):
            ty, run = comp(ctx, t.arg)
            dom = sem.carrier(ty)
            return Mon(ty), lambda env: mon.unit(dom, run(env))
        if isinstance(t, Do):
            bty, brun = comp(ctx, t.bound)
            if not isinstance(bty, Mon):
                raise MLTypeError("do", f"bound term must be a computation T A, got {bty}")
            qty, qrun = comp(ctx + [(t.var, bty.arg)], t.body)
            if not isinstance(qty, Mon):
                raise MLTypeError("do", f"body must be a computation T B, got {qty}")
            dom, cod = sem.carrier(bty.arg), sem.carrier(qty.arg)
            var = t.var
            deps = tuple(sorted((free_vars(t.body) - {var}) | symbols(t.body)))
            cache: dict = {}

            def run(env, dom=dom, cod=cod, var=var, deps=deps, cache=cache):
                key = tuple(env[d] for d in deps)
                ext = cache.get(key)
                if ext is None:
                    if len(cache) >= _CACHE_CAP:
                        cache.clear()
                    local = dict(env)
                    f = {}
                    for a in dom:
                        local[var] = a
                        f[a] = qrun(local)
                    ext = cache[key] = mon.kleisli(dom, cod, f)
                return ext(brun(env))

            return qty, run
        raise TypeError(f"not a term: {t!r}")

    return comp(list(ctx), t)


class FnTable(dict):
    """A function table usable as a cache key (never mutated after construction)."""

    _hash = None

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.items()))
        return self._hash


def evaluate(ctx: Sequence, t: MLTerm, monad: mo.FiniteMonad, sig: MLSignature, env: Mapping) -> object:
    """Denotation of ``t`` in context ``ctx`` under ``env``.

    Concrete tables come from ``sig`` unless ``env`` overrides them; ``env`` must
    give a value to every variable free in ``t``.
    """
    sem = Semantics(monad, sig.bases)
    full = dict(env)
    for name, fs in sig.functions.items():
        if fs.table is not None:
            full.setdefault(name, FnTable(fs.table))
        elif name in full:
            full[name] = FnTable(full[name])
    _, run = compile_term(ctx, t, sig, sem)
    return run(full)


def evaluate_program(prog: Program, monad: mo.FiniteMonad, env: Mapping | None = None) -> tuple:
    """``(type, value)`` of a program whose parameters are all supplied by ``env`` or the file."""
    ty = typecheck(prog.context, prog.term, prog.signature)
    full = dict(prog.values)
    full.update(env or {})
    missing = [n for n, _ in prog.context if n not in full and n in free_vars(prog.term)]
    missing += [n for n in symbols(prog.term)
                if prog.signature.functions[n].table is None and n not in full]
    if missing:
        raise ValueError(f"no value for {', '.join(sorted(missing))}")
    return ty, evaluate(prog.context, prog.term, monad, prog.signature, full)


def decode_value(monad: mo.FiniteMonad, sem: Semantics, ty: MLType, data) -> object:
    """Find the carrier element of ``ty`` whose JSON encoding is ``data``."""
    target = json.dumps(data, sort_keys=True)
    for v in sem.carrier(ty):
        if json.dumps(encode_value(monad, ty, v), sort_keys=True) == target:
            return v
    raise ValueError(f"{data!r} is not an element of {ty}")


def encode_value(monad: mo.FiniteMonad, ty: MLType, v) -> object:
    if isinstance(ty, Mon):
        return monad.encode(v)
    if isinstance(ty, Prod):
        return [encode_value(monad, ty.left, v[0]), encode_value(monad, ty.right, v[1])]
    if isinstance(ty, UnitType):
        return "star"
    return mo.to_jsonable(v)


# -- program equivalence ---------------------------------------------------------


DEFAULT_EXHAUST_LIMIT = 2_000_000


@dataclass
class EquivReport:
    equivalent: bool
    type: str
    checked: int = 0
    sampled: bool = False
    witness: dict | None = None
    seconds: float = 0.0

    def to_dict(self) -> dict:
        out = {"status": "pass" if self.equivalent else "fail", "type": self.type, "checked": self.checked,
               "sampled": self.sampled}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _base_carriers(sig: MLSignature, names: Sequence[str], size_bound: int) -> Iterator[dict]:
    free = [n for n in names if sig.bases.get(n) is None]
    fixed = {n: sig.bases[n] for n in names if sig.bases.get(n) is not None}
    for sizes in itertools.product(range(size_bound + 1), repeat=len(free)):
        out = dict(fixed)
        out.update({n: mo.atoms(k, n.lower()) for n, k in zip(free, sizes)})
        yield out


def equiv(ctx: Sequence, t1: MLTerm, t2: MLTerm, monad: mo.FiniteMonad, sig: MLSignature, size_bound: int = 2,
          exhaust_limit: int = DEFAULT_EXHAUST_LIMIT, samples: int = 20_000, seed: int = 0,
          values: Mapping | None = None) -> EquivReport:
    """Compare two terms under every environment over carriers of size <= ``size_bound``.

    Quantified are the context variables free in either term (minus those fixed
    in ``values``), the function symbols without a table, and the carriers of base
    types without one.  A carrier choice with more than ``exhaust_limit``
    environments is sampled instead and the report says so.
    """
    start = time.perf_counter()
    ty1, ty2 = typecheck(ctx, t1, sig), typecheck(ctx, t2, sig)
    if ty1 != ty2:
        raise MLTypeError("equiv", f"terms have different types {ty1} and {ty2}")
    values = dict(values or {})
    used = free_vars(t1) | free_vars(t2)
    syms = sorted(symbols(t1) | symbols(t2))
    ctx_types: dict = {}
    for name, ty in ctx:
        ctx_types[name] = ty
    var_names = [n for n, _ in ctx if n in used and n not in values]
    var_names = sorted(set(var_names), key=[n for n, _ in ctx].index)
    params = [s for s in syms if sig.functions[s].table is None]
    bases: set = _base_names(ty1)
    for n in var_names:
        bases |= _base_names(ctx_types[n])
    for s in syms:
        bases |= _base_names(sig.functions[s].dom) | _base_names(sig.functions[s].cod)
    report = EquivReport(True, str(ty1))
    rng = random.Random(seed)
    for carriers in _base_carriers(sig, sorted(bases), size_bound):
        sem = Semantics(monad, carriers)
        _, run1 = compile_term(ctx, t1, sig, sem)
        _, run2 = compile_term(ctx, t2, sig, sem)
        fixed_env = dict(values)
        for s in syms:
            if s not in params:
                fixed_env[s] = FnTable(sig.functions[s].table)
        domains = [sem.carrier(ctx_types[n]) for n in var_names]
        for s in params:
            fs = sig.functions[s]
            dom = sem.carrier(fs.dom)
            domains.append(_Tables(dom, sem.carrier(fs.cod)))
        names = var_names + params
        total = 1
        for d in domains:
            total *= len(d)
        if total > exhaust_limit:
            report.sampled = True
            envs = (tuple(d[rng.randrange(len(d))] for d in domains) for _ in range(samples))
        else:
            envs = itertools.product(*domains)
        for combo in envs:
            env = dict(fixed_env)
            env.update(zip(names, combo))
            report.checked += 1
            v1, v2 = run1(env), run2(env)
            if v1 != v2:
                report.equivalent = False
                report.witness = {
                    "carriers": {n: list(c) for n, c in carriers.items()},
                    "env": {n: _encode_env(monad, ctx_types, sig, n, env[n]) for n in names},
                    "lhs": encode_value(monad, ty1, v1), "rhs": encode_value(monad, ty1, v2)}
                report.seconds = time.perf_counter() - start
                return report
    report.seconds = time.perf_counter() - start
    return report


class _Tables:
    """All functions ``dom -> cod`` as dicts, indexable like a sequence."""

    def __init__(self, dom: tuple, cod: tuple):
        self.dom, self.cod = dom, cod

    def __len__(self) -> int:
        return len(self.cod) ** len(self.dom)

    def __getitem__(self, i: int) -> FnTable:
        out = FnTable()
        for a in reversed(self.dom):
            i, r = divmod(i, len(self.cod))
            out[a] = self.cod[r]
        return out

    def __iter__(self):
        for values in itertools.product(self.cod, repeat=len(self.dom)):
            yield FnTable(zip(self.dom, values))


def _encode_env(monad, ctx_types: Mapping, sig: MLSignature, name: str, v) -> object:
    if name in sig.functions:
        fs = sig.functions[name]
        return [[encode_value(monad, fs.dom, a), encode_value(monad, fs.cod, b)] for a, b in v.items()]
    return encode_value(monad, ctx_types[name], v)


def equiv_programs(p1: Program, p2: Program, monad: mo.FiniteMonad, size_bound: int = 2, **kw) -> EquivReport:
    sig = p1.signature.merged(p2.signature)
    ctx = list(p1.context)
    known = {n: ty for n, ty in ctx}
    for name, ty in p2.context:
        if name in known and known[name] != ty:
            raise MLTypeError("equiv", f"variable {name} has different types in the two programs")
        if name not in known:
            ctx.append((name, ty))
    values = dict(p1.values)
    values.update(p2.values)
    return equiv(ctx, p1.term, p2.term, monad, sig, size_bound, values=values, **kw)


# -- the monad laws and program commutation as programs ------------------------------

LAW_PROGRAMS = {
    "right-unit": ("base A\nvar p : T A\n", "do x <- p; ret x", "p"),
    "left-unit": ("base A\nbase B\nvar a : A\nfun g : A -> T B\n", "do x <- ret a; g x", "g a"),
    "associativity": ("base A\nbase B\nbase C\nvar p : T A\nfun g : A -> T B\nfun h : B -> T C\n",
                      "do x <- (do y <- p; g y); h x", "do y <- p; do x <- g y; h x"),
}

COMMUTE_DECLS = "base A\nbase B\nvar p : T A\nvar q : T B\n"
COMMUTE_LEFT = "do x <- p; do y <- q; ret (x, y)"
COMMUTE_RIGHT = "do y <- q; do x <- p; ret (x, y)"


def law_programs(law: str) -> tuple:
    decls, lhs, rhs = LAW_PROGRAMS[law]
    return parse_program(decls + "term " + lhs), parse_program(decls + "term " + rhs)


def check_laws(monad: mo.FiniteMonad, size_bound: int = 2, **kw) -> dict:
    """The three monad laws as program equivalences; law name -> EquivReport."""
    out = {}
    for law in LAW_PROGRAMS:
        p1, p2 = law_programs(law)
        out[law] = equiv_programs(p1, p2, monad, size_bound, **kw)
    return out


@dataclass
class CommuteAgreement:
    monad: str
    checked: int
    agree: int
    commuting: int
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.agree == self.checked

    def to_dict(self) -> dict:
        return {"monad": self.monad, "checked": self.checked, "agree": self.agree, "commuting": self.commuting,
                "disagreements": self.disagreements}


def commute_agreement(monad: mo.FiniteMonad, size_bound: int = 2, limit: int = 200_000, seed: int = 0) -> CommuteAgreement:
    """Evaluate both sides of the commutation equation with the interpreter and compare,
    for every ``p`` and ``q``, with :func:`monads.commutes`.

    Carrier pairs with more than ``limit`` ``(p, q)`` combinations are sampled.
    """
    left = parse_program(COMMUTE_DECLS + "term " + COMMUTE_LEFT)
    right = parse_program(COMMUTE_DECLS + "term " + COMMUTE_RIGHT)
    sig = left.signature
    rng = random.Random(seed)
    out = CommuteAgreement(monad.name, 0, 0, 0)
    for na, nb in itertools.product(range(size_bound + 1), repeat=2):
        carriers = {"A": mo.atoms(na, "a"), "B": mo.atoms(nb, "b")}
        sem = Semantics(monad, carriers)
        _, run_l = compile_term(left.context, left.term, sig, sem)
        _, run_r = compile_term(right.context, right.term, sig, sem)
        ta, tb = sem.carrier(Mon(Base("A"))), sem.carrier(Mon(Base("B")))
        if len(ta) * len(tb) > limit:
            pairs = [(rng.choice(ta), rng.choice(tb)) for _ in range(limit)]
        else:
            pairs = itertools.product(ta, tb)
        for p, q in pairs:
            env = {"p": p, "q": q}
            by_interpreter = run_l(env) == run_r(env)
            by_kernel = mo.commutes(monad, carriers["A"], carriers["B"], p, q).commutes
            out.checked += 1
            out.commuting += by_interpreter
            if by_interpreter == by_kernel:
                out.agree += 1
            elif len(out.disagreements) < 5:
                out.disagreements.append({"A": list(carriers["A"]), "B": list(carriers["B"]),
                                          "p": monad.encode(p), "q": monad.encode(q),
                                          "interpreter": by_interpreter, "kernel": by_kernel})
    return out
