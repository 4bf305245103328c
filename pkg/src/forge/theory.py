"""Finitary signatures, terms, equations and theories, plus the theory combinators.

Terms are immutable trees: ``Var`` leaves and ``App`` nodes carrying an operation
name.  A ``Theory`` bundles a signature with a set of equations-in-context; the
set is stored as a tuple sorted by canonical string so that iteration order and
serialisation are reproducible.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence, Union


@dataclass(frozen=True, order=True)
class OpSymbol:
    name: str
    arity: int

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Var:
    name: Hashable

    def __str__(self) -> str:
        return str(self.name)


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.op
        return f"{self.op}({','.join(map(str, self.args))})"


Term = Union[Var, App]


def app(op: str, *args: Term) -> App:
    return App(op, tuple(args))


def height(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(height(a) for a in t.args)


def variables(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset([t.name])
    out: set = set()
    for a in t.args:
        out |= variables(a)
    return frozenset(out)


def operations(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset()
    out = {(t.op, len(t.args))}
    for a in t.args:
        out |= operations(a)
    return frozenset(out)


def term_key(t: Term) -> tuple:
    """Ordering used for canonical representatives: height first, then text."""
    return (height(t), str(t))


def substitute(t: Term, bindings: Mapping) -> Term:
    """Replace every ``Var(v)`` with ``bindings[v]``; unbound variables stay."""
    if isinstance(t, Var):
        return bindings.get(t.name, t)
    if not t.args:
        return t
    return App(t.op, tuple(substitute(a, bindings) for a in t.args))


def rename_ops(t: Term, renaming: Mapping[str, str]) -> Term:
    if isinstance(t, Var):
        return t
    return App(renaming.get(t.op, t.op), tuple(rename_ops(a, renaming) for a in t.args))


@dataclass(frozen=True)
class Equation:
    context: frozenset
    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        free = variables(self.lhs) | variables(self.rhs)
        if not free <= self.context:
            missing = ", ".join(sorted(map(str, free - self.context)))
            raise ValueError(f"variables {missing} not in equation context")

    @cached_property
    def canonical(self) -> str:
        ctx = ",".join(sorted(map(str, self.context)))
        return f"({ctx}) {self.lhs} = {self.rhs}"

    def __str__(self) -> str:
        return self.canonical


def equation(lhs: Term, rhs: Term, context: Iterable | None = None) -> Equation:
    if context is None:
        context = variables(lhs) | variables(rhs)
    return Equation(frozenset(context), lhs, rhs)


@dataclass(frozen=True)
class Theory:
    name: str
    signature: tuple  # of OpSymbol, sorted by name
    equations: tuple  # of Equation, sorted by canonical string, no duplicates

    def __post_init__(self) -> None:
        names = [op.name for op in self.signature]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate operation names in {self.name}")
        arities = {op.name: op.arity for op in self.signature}
        for eq in self.equations:
            for name, k in operations(eq.lhs) | operations(eq.rhs):
                if arities.get(name) != k:
                    raise ValueError(f"{name}/{k} used in {eq} is not in the signature of {self.name}")

    @classmethod
    def make(cls, name: str, ops: Iterable[OpSymbol], eqs: Iterable[Equation] = ()) -> "Theory":
        unique = {eq.canonical: eq for eq in eqs}
        return cls(name, tuple(sorted(ops)), tuple(unique[k] for k in sorted(unique)))

    @cached_property
    def arity(self) -> dict:
        return {op.name: op.arity for op in self.signature}

    @property
    def op_names(self) -> list:
        return [op.name for op in self.signature]

    def __str__(self) -> str:
        return to_dsl(self)


# -- combinators ---------------------------------------------------------------


def _disjoint(t: Theory, s: Theory) -> tuple:
    clash = set(t.op_names) & set(s.op_names)
    left = {n: f"left.{n}" for n in clash}
    right = {n: f"right.{n}" for n in clash}
    return left, right


def _renamed(th: Theory, renaming: Mapping[str, str]) -> tuple:
    ops = [OpSymbol(renaming.get(op.name, op.name), op.arity) for op in th.signature]
    eqs = [Equation(eq.context, rename_ops(eq.lhs, renaming), rename_ops(eq.rhs, renaming))
           for eq in th.equations]
    return ops, eqs


def theory_sum(t: Theory, s: Theory, name: str | None = None) -> Theory:
    """Disjoint union of signatures and equations; clashing names get left./right. prefixes."""
    left, right = _disjoint(t, s)
    ops_t, eqs_t = _renamed(t, left)
    ops_s, eqs_s = _renamed(s, right)
    return Theory.make(name or f"{t.name}+{s.name}", ops_t + ops_s, eqs_t + eqs_s)


def commutation_equation(f: OpSymbol, g: OpSymbol) -> Equation:
    """f(g(x_ij | j) | i) = g(f(x_ij | i) | j) over the context {x_i_j}."""
    xs = [[Var(f"x_{i}_{j}") for j in range(g.arity)] for i in range(f.arity)]
    lhs = App(f.name, tuple(App(g.name, tuple(xs[i][j] for j in range(g.arity))) for i in range(f.arity)))
    rhs = App(g.name, tuple(App(f.name, tuple(xs[i][j] for i in range(f.arity))) for j in range(g.arity)))
    ctx = frozenset(v.name for row in xs for v in row)
    return Equation(ctx, lhs, rhs)


def commutation_equations(t_ops: Sequence[OpSymbol], s_ops: Sequence[OpSymbol]) -> list:
    return [commutation_equation(f, g) for f in t_ops for g in s_ops]


def theory_tensor(t: Theory, s: Theory, name: str | None = None) -> Theory:
    """Sum plus one commutation equation per pair (f in t, g in s)."""
    left, right = _disjoint(t, s)
    ops_t, eqs_t = _renamed(t, left)
    ops_s, eqs_s = _renamed(s, right)
    comm = commutation_equations(sorted(ops_t), sorted(ops_s))
    return Theory.make(name or f"{t.name}*{s.name}", ops_t + ops_s, eqs_t + eqs_s + comm)


def add_constants(t: Theory, labels: Iterable[str], name: str | None = None) -> Theory:
    taken = set(t.op_names)
    ops = list(t.signature)
    for label in sorted(set(labels)):
        fresh = label if label not in taken else f"const.{label}"
        while fresh in taken:
            fresh = "const." + fresh
        taken.add(fresh)
        ops.append(OpSymbol(fresh, 0))
    if len(ops) == len(t.signature) and name is None:
        return t
    return Theory.make(name or f"{t.name}+consts", ops, t.equations)


# -- builtin catalogue ---------------------------------------------------------

x, y, z = Var("x"), Var("y"), Var("z")


def _semilattice_eqs(join: str) -> list:
    return [
        equation(app(join, app(join, x, y), z), app(join, x, app(join, y, z))),
        equation(app(join, x, y), app(join, y, x)),
        equation(app(join, x, x), x),
    ]


def semilattice() -> Theory:
    eqs = _semilattice_eqs("join") + [equation(app("join", x, app("bot")), x)]
    return Theory.make("Semilattice", [OpSymbol("join", 2), OpSymbol("bot", 0)], eqs)


def join_semilattice() -> Theory:
    return Theory.make("JoinSemilattice", [OpSymbol("join", 2)], _semilattice_eqs("join"))


def monoid(commutative: bool = False) -> Theory:
    e = app("one")
    eqs = [
        equation(app("mul", app("mul", x, y), z), app("mul", x, app("mul", y, z))),
        equation(app("mul", e, x), x),
        equation(app("mul", x, e), x),
    ]
    if commutative:
        eqs.append(equation(app("mul", x, y), app("mul", y, x)))
    return Theory.make("CommMonoid" if commutative else "Monoid",
                       [OpSymbol("mul", 2), OpSymbol("one", 0)], eqs)


def free_theory(name: str, ops: Iterable[OpSymbol]) -> Theory:
    return Theory.make(name, ops, [])


def spurious_analog(n: int) -> Theory:
    """Constants k0..k(n-1) and ternary f with f(ka,ka,x)=k0 and f(ka,kb,x)=x for a != b."""
    if n < 1:
        raise ValueError("SpuriousAnalog needs at least one constant")
    ks = [app(f"k{a}") for a in range(n)]
    eqs = []
    for a, b in itertools.product(range(n), repeat=2):
        rhs = ks[0] if a == b else x
        eqs.append(Equation(frozenset(["x"]), app("f", ks[a], ks[b], x), rhs))
    ops = [OpSymbol(f"k{a}", 0) for a in range(n)] + [OpSymbol("f", 3)]
    return Theory.make(f"SpuriousAnalog({n})", ops, eqs)


def state_theory(v: int) -> Theory:
    """Single-location state over ``v`` values: v-ary lookup, unary update<i>."""
    if v < 1:
        raise ValueError("state theory needs at least one value")
    vals = range(v)
    upd = [f"update{i}" for i in vals]
    lookup = "lookup"
    eqs = [equation(App(lookup, tuple(x for _ in vals)), x)]
    xs = {(i, j): Var(f"x_{i}_{j}") for i in vals for j in vals}
    eqs.append(equation(
        App(lookup, tuple(App(lookup, tuple(xs[i, j] for j in vals)) for i in vals)),
        App(lookup, tuple(xs[i, i] for i in vals)),
        context=[t.name for t in xs.values()],
    ))
    ws = [Var(f"x_{j}") for j in vals]
    for i in vals:
        eqs.append(equation(app(upd[i], App(lookup, tuple(ws))), app(upd[i], ws[i]),
                            context=[w.name for w in ws]))
        for j in vals:
            eqs.append(equation(app(upd[i], app(upd[j], x)), app(upd[j], x)))
    eqs.append(equation(App(lookup, tuple(app(upd[i], x) for i in vals)), x))
    ops = [OpSymbol(lookup, v)] + [OpSymbol(u, 1) for u in upd]
    return Theory.make(f"State({v})", ops, eqs)


def wellorder_theory(n: int) -> Theory:
    """Strict non-empty well-order theory lowered to a carrier of size ``n``.

    Only iota2..iota<n> are kept; iota1 is the identity and every iota of arity
    above ``n`` is constantly bot on an ``n``-element carrier.
    """
    if n < 1:
        raise ValueError("carrier size must be positive")
    bot = app("bot")
    ops = [OpSymbol("bot", 0)] + [OpSymbol(f"iota{k}", k) for k in range(2, n + 1)]

    def iota(args: Sequence[Term]) -> Term:
        if len(args) == 1:
            return args[0]
        if len(args) > n:
            return bot
        return App(f"iota{len(args)}", tuple(args))

    eqs = []
    for k in range(2, n + 1):
        ws = [Var(f"w{i}") for i in range(k)]
        for i in range(k):
            args = list(ws)
            args[i] = bot
            eqs.append(equation(iota(args), bot, context=[w.name for w in ws]))
        for i, j in itertools.combinations(range(k), 2):
            args = list(ws)
            args[j] = ws[i]
            eqs.append(equation(iota(args), bot, context=[w.name for w in ws]))
    for nu in range(2, n + 1):
        for sizes in itertools.product(range(1, n + 1), repeat=nu):
            if all(s == 1 for s in sizes):
                continue
            blocks = [[Var(f"w_{mu}_{a}") for a in range(s)] for mu, s in enumerate(sizes)]
            flat = [w for block in blocks for w in block]
            lhs = iota(flat)
            rhs = iota([iota(block) for block in blocks])
            eqs.append(equation(lhs, rhs, context=[w.name for w in flat]))
    return Theory.make(f"WellOrder({n})", ops, eqs)


_BUILTIN_RE = re.compile(r"^([A-Za-z][A-Za-z0-9]*)(?:[(:](\d+)\)?)?$")


def builtin_theory(name: str, n: int | None = None) -> Theory:
    """Look up a catalogue theory.  Size parameters may be given as ``Name(3)``, ``Name:3`` or ``n=3``."""
    m = _BUILTIN_RE.match(name.strip())
    if not m:
        raise KeyError(f"unknown theory {name!r}")
    base, param = m.group(1), m.group(2)
    if param is not None:
        n = int(param)
    key = base.lower()
    simple = {
        "semilattice": semilattice,
        "joinsemilattice": join_semilattice,
        "monoid": monoid,
        "commmonoid": lambda: monoid(True),
        "sigma22free": lambda: free_theory("Sigma22Free", [OpSymbol("u0", 2), OpSymbol("u1", 2)]),
        "empty": lambda: free_theory("Empty", []),
        "emptytheory": lambda: free_theory("Empty", []),
        "unary": lambda: free_theory("Unary", [OpSymbol("f", 1)]),
    }
    if key in simple:
        return simple[key]()
    sized = {
        "spuriousanalog": (spurious_analog, 3),
        "state": (state_theory, 2),
        "statetheory": (state_theory, 2),
        "wellorder": (wellorder_theory, 2),
        "input": (lambda k: free_theory(f"Input({k})", [OpSymbol("read", k)]), 2),
        "output": (lambda k: free_theory(f"Output({k})", [OpSymbol(f"out{i}", 1) for i in range(k)]), 2),
    }
    if key in sized:
        build, default = sized[key]
        return build(default if n is None else n)
    raise KeyError(f"unknown theory {name!r}")


BUILTIN_THEORIES = ("Semilattice", "JoinSemilattice", "Monoid", "CommMonoid", "Sigma22Free", "Empty",
                    "Unary", "SpuriousAnalog(n)", "State(n)", "WellOrder(n)", "Input(n)", "Output(n)")


# -- DSL -----------------------------------------------------------------------


class TheoryParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*|//[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<punct>[{}(),;:=])
""", re.VERBOSE)


def _tokenize(text: str) -> list:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise TheoryParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tokens.append((kind, value, line, col))
        nl = value.count("\n")
        if nl:
            line += nl
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(("eof", "", line, col))
    return tokens


class _TheoryParser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple:
        return self.toks[self.i]

    def take(self, kind: str | None = None, value: str | None = None) -> tuple:
        tok = self.toks[self.i]
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise TheoryParseError(f"expected {want}, got {got!r}", tok[2], tok[3])
        self.i += 1
        return tok

    def theories(self) -> list:
        out = []
        while self.peek()[0] != "eof":
            out.append(self.theory())
        if not out:
            tok = self.peek()
            raise TheoryParseError("expected 'theory'", tok[2], tok[3])
        return out

    def theory(self) -> Theory:
        self.take("ident", "theory")
        name = self.take("ident")[1]
        self.take("punct", "{")
        ops: list = []
        raw_eqs: list = []
        while self.peek()[1] != "}":
            tok = self.take("ident")
            if tok[1] == "op":
                op_name = self.take("ident")[1]
                self.take("punct", ":")
                arity = int(self.take("num")[1])
                ops.append(OpSymbol(op_name, arity))
            elif tok[1] == "eq":
                raw_eqs.append((tok, self.equation({o.name: o.arity for o in ops})))
            else:
                raise TheoryParseError(f"expected 'op' or 'eq', got {tok[1]!r}", tok[2], tok[3])
            self.take("punct", ";")
        self.take("punct", "}")
        try:
            return Theory.make(name, ops, [eq for _, eq in raw_eqs])
        except ValueError as exc:
            tok = raw_eqs[0][0] if raw_eqs else self.toks[0]
            raise TheoryParseError(str(exc), tok[2], tok[3]) from None

    def equation(self, arities: dict) -> Equation:
        start = self.take("punct", "(")
        ctx = []
        if self.peek()[1] != ")":
            ctx.append(self.take("ident")[1])
            while self.peek()[1] == ",":
                self.take("punct", ",")
                ctx.append(self.take("ident")[1])
        self.take("punct", ")")
        lhs = self.term(arities, set(ctx))
        self.take("punct", "=")
        rhs = self.term(arities, set(ctx))
        try:
            return Equation(frozenset(ctx), lhs, rhs)
        except ValueError as exc:
            raise TheoryParseError(str(exc), start[2], start[3]) from None

    def term(self, arities: dict, ctx: set) -> Term:
        tok = self.take("ident")
        name = tok[1]
        if self.peek()[1] == "(":
            if name not in arities:
                raise TheoryParseError(f"undeclared operation {name!r}", tok[2], tok[3])
            self.take("punct", "(")
            args = [self.term(arities, ctx)]
            while self.peek()[1] == ",":
                self.take("punct", ",")
                args.append(self.term(arities, ctx))
            self.take("punct", ")")
            if len(args) != arities[name]:
                raise TheoryParseError(f"{name} expects {arities[name]} arguments, got {len(args)}",
                                       tok[2], tok[3])
            return App(name, tuple(args))
        if name in ctx:
            return Var(name)
        if name in arities:
            if arities[name] != 0:
                raise TheoryParseError(f"{name} expects {arities[name]} arguments", tok[2], tok[3])
            return App(name)
        raise TheoryParseError(f"unknown variable or constant {name!r}", tok[2], tok[3])


def parse_theories(text: str) -> list:
    return _TheoryParser(text).theories()


def parse_theory(text: str) -> Theory:
    found = parse_theories(text)
    if len(found) != 1:
        raise TheoryParseError(f"expected exactly one theory, found {len(found)}", 1, 1)
    return found[0]


def to_dsl(th: Theory) -> str:
    lines = [f"theory {th.name.replace('(', '_').replace(')', '').replace('+', '_').replace('*', '_x_')} {{"]
    for op in th.signature:
        lines.append(f"  op {op.name} : {op.arity};")
    for eq in th.equations:
        ctx = ", ".join(sorted(map(str, eq.context)))
        lines.append(f"  eq ({ctx}) {eq.lhs} = {eq.rhs};")
    lines.append("}")
    return "\n".join(lines)


def theory_to_dict(th: Theory) -> dict:
    return {
        "name": th.name,
        "ops": [{"name": op.name, "arity": op.arity} for op in th.signature],
        "equations": [
            {"context": sorted(map(str, eq.context)), "lhs": str(eq.lhs), "rhs": str(eq.rhs)}
            for eq in th.equations
        ],
    }


def theory_to_json(th: Theory) -> str:
    return json.dumps(theory_to_dict(th), sort_keys=True, indent=2)


def resolve_theory(name: str) -> Theory:
    """A catalogue name, or a path to a DSL file."""
    try:
        return builtin_theory(name)
    except KeyError:
        pass
    with open(name, encoding="utf-8") as fh:
        return parse_theory(fh.read())
