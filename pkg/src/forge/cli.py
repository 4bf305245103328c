"""Command-line entry point: ``forge <command> [<subcommand>] ...``.

Every command prints one JSON report::

    {"toolVersion": ..., "command": {"name": ..., "argv": [...]}, "status": ...,
     "payload": {...}, "timing": {"seconds": ...}, "witness": {...}}

Exit codes: 0 pass, 1 property failure (the report carries a witness), 2 usage
or parse error, 3 budget exhausted or result inconclusive.  A report written to
disk can be re-run with ``forge replay REPORT`` (or ``forge --replay REPORT``).

The report also goes to ``--out`` when given, otherwise into the directory
named by ``FORGE_OUT`` when that is set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from typing import Callable, Sequence

from . import __version__
from . import free_algebra as fa
from . import metalang as ml
from . import monads as mo
from . import subsume as sb
from . import tensor as tn
from .models import find_models
from .presentation import presentation_for
from .theory import (BUILTIN_THEORIES, Theory, TheoryParseError, builtin_theory, parse_theory, resolve_theory,
                     theory_sum, theory_tensor, theory_to_dict, to_dsl)

EXIT = {"pass": 0, "fail": 1, "usage": 2, "inconclusive": 3, "partial": 3}


class UsageError(Exception):
    """Bad input discovered after argument parsing (exit code 2)."""


def _result(status: str, payload: dict, witness: dict | None = None) -> tuple:
    return status, payload, witness


# -- theory ------------------------------------------------------------------------


def _theory(name: str) -> Theory:
    try:
        return resolve_theory(name)
    except FileNotFoundError:
        raise UsageError(f"{name!r} is neither a built-in theory ({', '.join(BUILTIN_THEORIES)}) nor a file")


def cmd_theory_show(a) -> tuple:
    th = _theory(a.name)
    payload = theory_to_dict(th)
    if a.dsl:
        payload["dsl"] = to_dsl(th)
    return _result("pass", payload)


def _combine(a, combinator: Callable) -> tuple:
    left, right = _theory(a.left), _theory(a.right)
    th = combinator(left, right)
    payload = {"theory": theory_to_dict(th), "operations": len(th.signature), "equations": len(th.equations)}
    base = {eq.canonical for eq in theory_sum(left, right).equations}
    added = [str(eq) for eq in th.equations if eq.canonical not in base]
    payload["addedEquations"] = len(added)
    if a.show:
        payload["added"] = added
    return _result("pass", payload)


def cmd_theory_sum(a) -> tuple:
    return _combine(a, theory_sum)


def cmd_theory_tensor(a) -> tuple:
    return _combine(a, theory_tensor)


def cmd_theory_parse(a) -> tuple:
    with open(a.file, encoding="utf-8") as fh:
        th = parse_theory(fh.read())
    return _result("pass", theory_to_dict(th))


# -- free --------------------------------------------------------------------------


def _names(text: str) -> list:
    return [g.strip() for g in text.split(",") if g.strip()] if text else []


def cmd_free(a) -> tuple:
    th = _theory(a.theory)
    try:
        q = fa.free_algebra(th, _names(a.gens), a.depth, a.budget)
    except fa.BudgetExceeded as exc:
        payload = exc.partial.to_dict(a.sample) if exc.partial is not None else {}
        payload["error"] = str(exc)
        return _result("partial", payload)
    return _result("pass" if q.closed else "inconclusive", q.to_dict(a.sample))


# -- monad -------------------------------------------------------------------------


def _monad(name: str) -> mo.FiniteMonad:
    try:
        return mo.builtin_monad(name)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc.args[0] if exc.args else exc))


def cmd_monad_laws(a) -> tuple:
    m = _monad(a.monad)
    laws = _names(a.laws) or ["left-unit", "right-unit", "associativity"]
    rep = mo.check_monad_laws(m, a.max_size, laws, samples=a.samples, seed=a.seed)
    payload = rep.to_dict()
    witness = payload.pop("witness", None)
    return _result(rep.status, payload, witness and {"kind": "monad-law", "monad": a.monad, **witness})


def _decode(m: mo.FiniteMonad, xs: tuple, text: str):
    data = json.loads(text)
    target = json.dumps(data, sort_keys=True)
    for v in m.carrier(xs):
        if json.dumps(m.encode(v), sort_keys=True) == target:
            return v
    raise UsageError(f"{text} is not an element of T{{{', '.join(xs)}}}")


def cmd_monad_commute(a) -> tuple:
    m = _monad(a.monad)
    xs, ys = mo.atoms(a.A, "a"), mo.atoms(a.B, "b")
    p, q = _decode(m, xs, a.p), _decode(m, ys, a.q)
    res = mo.commutes(m, xs, ys, p, q)
    payload = {"monad": m.name, "A": list(xs), "B": list(ys), "p": m.encode(p), "q": m.encode(q),
               "commutes": res.commutes, "lhs": m.encode(res.lhs), "rhs": m.encode(res.rhs)}
    witness = None
    if not res.commutes:
        witness = {"kind": "commute", "monad": a.monad, "sizes": [a.A, a.B],
                   "pIndex": m.carrier(xs).index(p), "qIndex": m.carrier(ys).index(q)}
    return _result("pass" if res.commutes else "fail", payload, witness)


def cmd_monad_commutative(a) -> tuple:
    m = _monad(a.monad)
    rep = mo.is_commutative(m, a.max_size)
    payload = rep.to_dict()
    witness = payload.pop("witness", None)
    if witness is not None:
        witness = {"kind": "commute", "monad": a.monad, **witness}
    # the question is answered either way; "fail" would signal a broken property
    return _result("pass", payload, witness)


def cmd_monad_theorify(a) -> tuple:
    m = _monad(a.monad)
    th, rep = mo.theorify(m, a.max_arity, build_equations=a.show)
    payload = rep.to_dict()
    if a.show:
        payload["theory"] = theory_to_dict(th)
    witness = payload.pop("witness", None)
    return _result("pass" if rep.violations == 0 else "fail", payload, witness)


# -- metalang ----------------------------------------------------------------------


def _program(path: str) -> ml.Program:
    with open(path, encoding="utf-8") as fh:
        return ml.parse_program(fh.read())


def cmd_metalang_check(a) -> tuple:
    prog = _program(a.file)
    ty = ml.typecheck(prog.context, prog.term, prog.signature)
    return _result("pass", {"type": str(ty), "term": ml.show(prog.term), "monad": a.monad})


def cmd_metalang_eval(a) -> tuple:
    prog = _program(a.file)
    m = _monad(a.monad)
    ty = ml.typecheck(prog.context, prog.term, prog.signature)
    sem = ml.Semantics(m, prog.signature.bases)
    types = dict(prog.context)
    env = {}
    for name, data in json.loads(a.env or "{}").items():
        if name not in types:
            raise UsageError(f"{name} is not declared")
        env[name] = ml.decode_value(m, sem, types[name], data)
    _, value = ml.evaluate_program(prog, m, env)
    return _result("pass", {"type": str(ty), "value": ml.encode_value(m, ty, value)})


def cmd_metalang_equiv(a) -> tuple:
    p1, p2 = _program(a.file1), _program(a.file2)
    m = _monad(a.monad)
    rep = ml.equiv_programs(p1, p2, m, a.size, samples=a.samples, seed=a.seed)
    payload = rep.to_dict()
    witness = payload.pop("witness", None)
    payload.pop("status")
    payload["equivalent"] = rep.equivalent
    return _result("pass" if rep.equivalent else "fail", payload, witness and {"kind": "equiv", **witness})


# -- tensor ------------------------------------------------------------------------


def _theory_source(name: str):
    """WellOrder without a size is lowered to each carrier size."""
    if name in ("WellOrder", "wellorder"):
        return tn.lowered_wellorder
    return _theory(name)


def cmd_tensor_enum(a) -> tuple:
    cfg = tn.SearchConfig(a.gens, a.max_size, not a.no_symmetry, a.budget, a.injective, a.count_only)
    if cfg.max_carrier < 1:
        raise UsageError("--max-size must be at least 1")
    res = tn.enumerate_tensor_algebras(_theory_source(a.left), _theory_source(a.right), cfg)
    payload = {"left": a.left, "right": a.right, "generators": a.gens, "maxCarrier": a.max_size,
               **res.to_dict(include_algebras=a.algebras)}
    return _result("partial" if res.partial else "pass", payload)


def _read_tables(raw: dict) -> dict:
    out = {}
    for op, tab in raw.items():
        entries = tab.items() if isinstance(tab, dict) else tab
        out[op] = {}
        for args, v in entries:
            if isinstance(args, str):
                args = [x for x in args.split(",") if x != ""]
            out[op][tuple(_atom(x) for x in args)] = _atom(v)
    return out


def _atom(x):
    if isinstance(x, str) and x.lstrip("-").isdigit():
        return int(x)
    return x


def cmd_tensor_law_check(a) -> tuple:
    with open(a.algebra, encoding="utf-8") as fh:
        data = json.load(fh)
    data = data.get("payload", data)
    if "algebras" in data:
        data = data["algebras"][a.index]
    left, right = a.left or data.get("left"), a.right or data.get("right")
    if not left or not right:
        raise UsageError("name the two monads with --left/--right or in the algebra file")
    carrier = tuple(_atom(x) for x in data["carrier"])
    tp, sp = presentation_for(left, len(carrier)), presentation_for(right, len(carrier))
    tensor = theory_tensor(tp.theory, sp.theory)
    tables = _read_tables(data["tables"])
    tab_t = {op: tables[tn._qualified(tensor, tp.theory, op, "left")] for op in tp.theory.op_names}
    tab_s = {op: tables[tn._qualified(tensor, sp.theory, op, "right")] for op in sp.theory.op_names}
    checks = {}
    for side, pres, tab in (("left", tp, tab_t), ("right", sp, tab_s)):
        alg = fa.algebra_of_table(pres.theory, carrier, tab)
        checks[side] = alg.to_dict()
    syn = tn.check_commutation_tables(tp.theory, sp.theory, carrier, tab_t, tab_s)
    alg = tn.TensorAlgebra(carrier, tn.EMAlgebra(tp.monad, carrier, tp.structure(carrier, tab_t)),
                           tn.EMAlgebra(sp.monad, carrier, sp.structure(carrier, tab_s)))
    em = {"left": tn.check_em_algebra(alg.t, a.y_bound).to_dict(), "right": tn.check_em_algebra(alg.s, a.y_bound).to_dict()}
    sem = tn.check_tensor_law(alg, a.y_bound, a.z_bound, a.budget)
    payload = {"left": left, "right": right, "carrier": list(carrier), "theories": checks, "emAlgebras": em,
               "commutation": syn.to_dict(), "tensorLaw": sem.to_dict()}
    ok = all(c["ok"] for c in checks.values()) and syn.ok and sem.ok
    witness = None
    if not ok:
        witness = {"kind": "tensor-law", "algebra": data, "left": left, "right": right}
    status = "pass" if ok else "fail"
    if ok and sem.partial:
        status = "partial"
    return _result(status, payload, witness)


def cmd_tensor_saturate(a) -> tuple:
    tm = _theory(a.theory)
    try:
        q, rep = tn.saturate_free_tensor(tm, _names(a.gens), a.max_rounds, a.budget)
    except fa.BudgetExceeded as exc:
        return _result("partial", {"error": str(exc)})
    payload = {"saturation": rep.to_dict(), "algebra": q.to_dict(a.sample)}
    return _result("pass" if rep.fixpoint else "inconclusive", payload)


def cmd_tensor_verify_state(a) -> tuple:
    rep = tn.verify_state_tensor(a.S, a.X, a.max_depth, a.budget)
    return _result(rep.status, rep.to_dict())


def cmd_tensor_cross(a) -> tuple:
    rep = tn.cross_validate(a.samples, a.seed)
    payload = rep.to_dict()
    return _result("pass" if rep.ok else "fail", payload,
                   {"kind": "cross", "first": rep.disagreements[0]} if rep.disagreements else None)


# -- subsume -----------------------------------------------------------------------


def cmd_subsume_decide(a) -> tuple:
    seq_a, seq_x = sb.parse_set_lasso(a.a), sb.parse_lasso(a.x)
    fast = sb.subsumes(seq_a, seq_x)
    payload = {"a": str(seq_a), "x": str(seq_x), "subsumes": fast,
               "recurring": [[str(v), i] for v, i in sb.recurring_witnesses(seq_a, seq_x)]}
    if a.check:
        payload["chainOracle"] = sb.chain_oracle(seq_a, seq_x)
        if payload["chainOracle"] != fast:
            return _result("fail", payload, {"kind": "subsume", "a": a.a, "x": a.x})
    return _result("pass", payload)


def cmd_subsume_ramsey(a) -> tuple:
    rep = sb.ramsey(a.samples, a.universe, a.seed)
    payload = rep.to_dict()
    witness = payload.pop("witness", None)
    return _result("pass" if rep.ok else "fail", payload, witness and {"kind": "ramsey", **witness})


def cmd_subsume_catalog(a) -> tuple:
    rep = sb.check_catalog()
    return _result("pass" if rep.ok else "fail", rep.to_dict(),
                   {"kind": "catalog", "first": rep.disagreements[0]} if rep.disagreements else None)


# -- suites ------------------------------------------------------------------------


def _suite_laws(seed: int) -> list:
    out = []
    for name in mo.BUILTIN_MONADS:
        m = mo.builtin_monad(name)
        rep = mo.check_monad_laws(m, 2, seed=seed)
        out.append((f"laws {name}", rep.status, rep.to_dict()))
    rep = mo.check_monad_laws(mo.builtin_monad("wellorder"), 3, laws=("left-unit", "right-unit"))
    out.append(("unit laws wellorder size 3", rep.status, rep.to_dict()))
    for name in mo.BUILTIN_MONADS:
        _, rep = mo.theorify(mo.builtin_monad(name), 2, build_equations=False)
        out.append((f"theorify {name}", "pass" if rep.violations == 0 else "fail", rep.to_dict()))
    return out


def _suite_tensor(seed: int) -> list:
    out = []
    for s, x in ((1, 1), (1, 2), (2, 1)):
        rep = tn.verify_state_tensor(s, x)
        out.append((f"state tensor S={s} X={x}", rep.status, rep.to_dict()))
    rep = tn.cross_validate(500, seed)
    out.append(("cross-validation", "pass" if rep.ok else "fail", rep.to_dict()))
    sl, un = builtin_theory("Semilattice"), builtin_theory("Unary")
    fast = tn.enumerate_tensor_algebras(sl, un, tn.SearchConfig(1, 3))
    slow = tn.enumerate_tensor_algebras(sl, un, tn.SearchConfig(1, 3, symmetry_breaking=False))
    out.append(("enumeration Semilattice x Unary", "pass" if fast.counts == slow.counts else "fail",
                {"canonical": fast.to_dict(), "bruteForce": slow.to_dict()}))
    wo = tn.enumerate_tensor_algebras(tn.lowered_wellorder, builtin_theory("Sigma22Free"),
                                      tn.SearchConfig(2, 3, count_only=True))
    counts = [wo.counts[n] for n in sorted(wo.counts)]
    monotone = all(x <= y for x, y in zip(counts, counts[1:]))
    out.append(("enumeration WellOrder x Sigma22Free", "pass" if monotone else "fail", wo.to_dict()))
    q, rep = tn.saturate_free_tensor(builtin_theory("Empty"), ["a", "b"])
    out.append(("saturation identity", "pass" if q.class_count == 4 and rep.fixpoint else "fail", rep.to_dict()))
    return out


def _suite_subsume(seed: int) -> list:
    cat = sb.check_catalog()
    ram = sb.ramsey(1000, 4, seed)
    return [("subsumption catalog", "pass" if cat.ok else "fail", cat.to_dict()),
            ("union splitting", "pass" if ram.ok else "fail", ram.to_dict())]


def _suite_metalang(seed: int) -> list:
    out = []
    for name in mo.BUILTIN_MONADS:
        m = mo.builtin_monad(name)
        reps = ml.check_laws(m, 2, seed=seed)
        ok = all(r.equivalent for r in reps.values())
        out.append((f"metalang laws {name}", "pass" if ok else "fail", {k: r.to_dict() for k, r in reps.items()}))
        agree = ml.commute_agreement(m, 2, seed=seed)
        out.append((f"metalang commutation {name}", "pass" if agree.ok else "fail", agree.to_dict()))
    for name, expected in (("powerset:full", True), ("state:S=2", False), ("wellorder", False)):
        rep = mo.is_commutative(mo.builtin_monad(name), 2)
        out.append((f"commutative {name}", "pass" if rep.commutative == expected else "fail", rep.to_dict()))
    return out


def _suite_models(seed: int) -> list:
    th = builtin_theory("SpuriousAnalog(3)")
    counts = {n: len(list(find_models(th, n))) for n in (1, 2)}
    ok = counts == {1: 1, 2: 0}
    return [("spurious analog models", "pass" if ok else "fail", {"counts": {str(k): v for k, v in counts.items()}})]


def _suite_free(seed: int) -> list:
    out = []
    for k in range(4):
        q = fa.free_algebra(builtin_theory("Semilattice"), [f"x{i}" for i in range(k)], 3)
        ok = q.closed and q.class_count == 2 ** k
        out.append((f"free semilattice |X|={k}", "pass" if ok else "fail",
                    {"classCount": q.class_count, "expected": 2 ** k, "closed": q.closed}))
    return out


SUITES = {
    "laws": (_suite_laws,),
    "tensor": (_suite_tensor,),
    "subsume": (_suite_subsume,),
    "all": (_suite_laws, _suite_free, _suite_models, _suite_tensor, _suite_subsume, _suite_metalang),
}


def cmd_suite(a) -> tuple:
    parts = []
    for fn in SUITES[a.name]:
        for name, status, payload in fn(a.seed):
            parts.append({"name": name, "status": status, "payload": payload})
    failed = [p["name"] for p in parts if p["status"] != "pass"]
    payload = {"suite": a.name, "checks": len(parts), "failed": failed, "results": parts}
    worst = "pass"
    for p in parts:
        if p["status"] == "fail":
            worst = "fail"
        elif p["status"] in ("partial", "inconclusive") and worst == "pass":
            worst = p["status"]
    return _result(worst, payload)


# -- replay ------------------------------------------------------------------------


def cmd_replay(a) -> tuple:
    with open(a.report, encoding="utf-8") as fh:
        report = json.load(fh)
    witness = report.get("witness") or {}
    kind = witness.get("kind")
    if kind == "monad-law":
        still = mo.replay_law_witness(_monad(witness["monad"]), witness)
        return _result("fail" if still else "pass", {"replayed": "monad-law", "reproduced": still}, witness)
    if kind == "commute":
        still = mo.replay_commute_witness(_monad(witness["monad"]), witness)
        return _result("fail" if still else "pass", {"replayed": "commute", "reproduced": still}, witness)
    argv = report.get("command", {}).get("argv")
    if not argv or argv[0] == "replay":
        raise UsageError("report has no replayable command")
    status, payload, witness = _dispatch(build_parser().parse_args(argv))
    same = payload == report.get("payload")
    return _result(status, {"replayed": argv, "identicalPayload": same, "payload": payload}, witness)


# -- argument parsing --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forge", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"forge {__version__}")
    p.add_argument("--out", "--json", dest="out", help="write the report here (overrides FORGE_OUT)")
    p.add_argument("--pretty", action="store_true", help="human-readable rendering instead of JSON")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    p.add_argument("--replay", dest="replay_report", metavar="REPORT", help="re-run the failure recorded in REPORT")
    sub = p.add_subparsers(dest="command")

    th = sub.add_parser("theory", help="show, combine and parse theories").add_subparsers(dest="sub", required=True)
    x = th.add_parser("show", help="a built-in theory or DSL file")
    x.add_argument("name")
    x.add_argument("--dsl", action="store_true", help="include the DSL rendering")
    x.set_defaults(fn=cmd_theory_show)
    for name, fn in (("sum", cmd_theory_sum), ("tensor", cmd_theory_tensor)):
        x = th.add_parser(name, help=f"{name} of two theories")
        x.add_argument("--left", required=True)
        x.add_argument("--right", required=True)
        x.add_argument("--show", action="store_true", help="list the equations added by the combinator")
        x.set_defaults(fn=fn)
    x = th.add_parser("parse", help="parse a theory DSL file")
    x.add_argument("file")
    x.set_defaults(fn=cmd_theory_parse)

    x = sub.add_parser("free", help="free algebra by bounded congruence closure")
    x.add_argument("--theory", required=True)
    x.add_argument("--gens", default="", help="comma-separated generator names")
    x.add_argument("--depth", type=_positive, default=3)
    x.add_argument("--budget", type=_positive, default=fa.DEFAULT_BUDGET)
    x.add_argument("--sample", type=int, default=20, help="operation-table entries to include")
    x.set_defaults(fn=cmd_free)

    mon = sub.add_parser("monad", help="finite-set monads").add_subparsers(dest="sub", required=True)
    x = mon.add_parser("laws", help="exhaustive Kleisli-law check")
    x.add_argument("--monad", required=True)
    x.add_argument("--max-size", type=_positive, default=2)
    x.add_argument("--laws", default="", help="comma-separated subset of left-unit,right-unit,associativity")
    x.add_argument("--samples", type=_positive, default=20_000)
    x.set_defaults(fn=cmd_monad_laws)
    x = mon.add_parser("commute", help="whether two programs commute")
    x.add_argument("--monad", required=True)
    x.add_argument("--A", type=int, default=2, help="size of A (atoms a0..)")
    x.add_argument("--B", type=int, default=1, help="size of B (atoms b0..)")
    x.add_argument("--p", required=True, help="element of T A as JSON, e.g. '[\"a0\", \"a1\"]'")
    x.add_argument("--q", required=True, help="element of T B as JSON")
    x.set_defaults(fn=cmd_monad_commute)
    x = mon.add_parser("commutative", help="search for a non-commuting pair")
    x.add_argument("--monad", required=True)
    x.add_argument("--max-size", type=_positive, default=2)
    x.set_defaults(fn=cmd_monad_commutative)
    x = mon.add_parser("theorify", help="truncated theory of a monad and its schema check")
    x.add_argument("--monad", required=True)
    x.add_argument("--max-arity", type=_positive, default=2)
    x.add_argument("--show", action="store_true", help="include the theory itself")
    x.set_defaults(fn=cmd_monad_theorify)

    met = sub.add_parser("metalang", help="the computational metalanguage").add_subparsers(dest="sub", required=True)
    x = met.add_parser("check", help="parse and typecheck a program")
    x.add_argument("file")
    x.add_argument("--monad", default="identity")
    x.set_defaults(fn=cmd_metalang_check)
    x = met.add_parser("eval", help="evaluate a program")
    x.add_argument("file")
    x.add_argument("--monad", required=True)
    x.add_argument("--env", help="JSON object of variable values")
    x.set_defaults(fn=cmd_metalang_eval)
    x = met.add_parser("equiv", help="compare two programs over all environments")
    x.add_argument("file1")
    x.add_argument("file2")
    x.add_argument("--monad", required=True)
    x.add_argument("--size", type=int, default=2)
    x.add_argument("--samples", type=_positive, default=20_000)
    x.set_defaults(fn=cmd_metalang_equiv)

    ten = sub.add_parser("tensor", help="tensor algebras").add_subparsers(dest="sub", required=True)
    x = ten.add_parser("enum", help="count generated tensor algebras")
    x.add_argument("--left", required=True, help="theory (WellOrder is lowered per carrier size)")
    x.add_argument("--right", required=True)
    x.add_argument("--gens", type=int, default=1)
    x.add_argument("--max-size", type=int, default=3)
    x.add_argument("--budget", type=_positive)
    x.add_argument("--no-symmetry", action="store_true", help="labelled search with explicit isomorphism rejection")
    x.add_argument("--count-only", action="store_true", help="count without listing")
    x.add_argument("--injective", action="store_true", help="generators must be distinct")
    x.add_argument("--algebras", action="store_true", help="include the algebras in the report")
    x.set_defaults(fn=cmd_tensor_enum)
    x = ten.add_parser("law-check", help="check a table algebra syntactically and semantically")
    x.add_argument("--algebra", required=True, help="JSON file {carrier, tables, left?, right?}")
    x.add_argument("--left")
    x.add_argument("--right")
    x.add_argument("--index", type=int, default=0, help="algebra index when the file is an enum report")
    x.add_argument("--y-bound", type=int, default=2)
    x.add_argument("--z-bound", type=int, default=2)
    x.add_argument("--budget", type=_positive)
    x.set_defaults(fn=cmd_tensor_law_check)
    x = ten.add_parser("saturate", help="free Semilattice tensor algebra by alternating closure")
    x.add_argument("--theory", required=True, help="presenting theory of the second monad")
    x.add_argument("--gens", default="a,b")
    x.add_argument("--max-rounds", type=_positive, default=10)
    x.add_argument("--budget", type=_positive, default=fa.DEFAULT_BUDGET)
    x.add_argument("--sample", type=int, default=20)
    x.set_defaults(fn=cmd_tensor_saturate)
    x = ten.add_parser("verify-state", help="free Semilattice x State algebra against S -> P(S x X)")
    x.add_argument("--S", type=_positive, default=2)
    x.add_argument("--X", type=int, default=1)
    x.add_argument("--max-depth", type=_positive, default=8)
    x.add_argument("--budget", type=_positive, default=fa.DEFAULT_BUDGET)
    x.set_defaults(fn=cmd_tensor_verify_state)
    x = ten.add_parser("cross", help="compare the syntactic and semantic tensor checks on sampled algebras")
    x.add_argument("--samples", type=_positive, default=500)
    x.set_defaults(fn=cmd_tensor_cross)

    sub_s = sub.add_parser("subsume", help="subsumption on lasso sequences").add_subparsers(dest="sub", required=True)
    x = sub_s.add_parser("decide", help="decide whether --a subsumes --x")
    x.add_argument("--a", required=True, help="set lasso, e.g. 'pre:[{v}];cyc:[{u},{v}]'")
    x.add_argument("--x", required=True, help="lasso, e.g. 'pre:[];cyc:[u,v]'")
    x.add_argument("--check", action="store_true", help="also run the chain-search oracle")
    x.set_defaults(fn=cmd_subsume_decide)
    x = sub_s.add_parser("ramsey", help="union-splitting property on random lassos")
    x.add_argument("--samples", type=_positive, default=1000)
    x.add_argument("--universe", type=_positive, default=4)
    x.set_defaults(fn=cmd_subsume_ramsey)
    x = sub_s.add_parser("catalog", help="reduction versus chain search on the fixed catalogue")
    x.set_defaults(fn=cmd_subsume_catalog)

    x = sub.add_parser("suite", help="run an acceptance suite")
    x.add_argument("name", choices=sorted(SUITES))
    x.set_defaults(fn=cmd_suite)

    x = sub.add_parser("replay", help="re-run the failure recorded in a report")
    x.add_argument("report")
    x.set_defaults(fn=cmd_replay)
    _add_global_flags(p)
    return p


def _add_global_flags(parser: argparse.ArgumentParser) -> None:
    """Let the global flags also appear after the subcommand (``forge tensor enum ... --out r.json``)."""
    for action in parser._actions:
        if not isinstance(action, argparse._SubParsersAction):
            continue
        for child in action.choices.values():
            if any(isinstance(a, argparse._SubParsersAction) for a in child._actions):
                _add_global_flags(child)
                continue
            child.add_argument("--out", "--json", dest="out", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
            child.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
            child.add_argument("--seed", type=int, default=argparse.SUPPRESS, help=argparse.SUPPRESS)


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _dispatch(args) -> tuple:
    return args.fn(args)


def _command_name(args) -> str:
    return " ".join(x for x in (args.command, getattr(args, "sub", None)) if x)


def render_pretty(report: dict) -> str:
    lines = [f"{report['command']['name']}: {report['status']}  ({report['timing']['seconds']:.2f}s)"]

    def walk(value, indent: int) -> None:
        pad = "  " * indent
        if isinstance(value, dict):
            for k, v in value.items():
                if isinstance(v, (dict, list)) and v:
                    lines.append(f"{pad}{k}:")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}{k}: {json.dumps(v)}")
        elif isinstance(value, list):
            for v in value:
                if isinstance(v, (dict, list)):
                    lines.append(f"{pad}-")
                    walk(v, indent + 1)
                else:
                    lines.append(f"{pad}- {v}")
        else:
            lines.append(f"{pad}{value}")

    walk(report["payload"], 1)
    if report.get("witness"):
        lines.append("  witness:")
        walk(report["witness"], 2)
    return "\n".join(lines)


def _write(report: dict, args) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, default=mo.to_jsonable)
    path = args.out
    if path is None and os.environ.get("FORGE_OUT"):
        os.makedirs(os.environ["FORGE_OUT"], exist_ok=True)
        path = os.path.join(os.environ["FORGE_OUT"], _command_name(args).replace(" ", "-") + ".json")
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(render_pretty(json.loads(text)) if args.pretty else text)


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.replay_report:
        args.command, args.sub, args.fn, args.report = "replay", None, cmd_replay, args.replay_report
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT["usage"]
    start = time.perf_counter()
    try:
        status, payload, witness = _dispatch(args)
    except (UsageError, TheoryParseError, ml.MLParseError, ml.MLTypeError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"forge: error: {exc}", file=sys.stderr)
        return EXIT["usage"]
    report = {
        "toolVersion": __version__,
        "command": {"name": _command_name(args), "argv": [a for a in argv if a != "--pretty"]},
        "status": status,
        "payload": payload,
        "timing": {"seconds": round(time.perf_counter() - start, 3)},
    }
    if witness is not None:
        report["witness"] = witness
    _write(report, args)
    return EXIT[status]


if __name__ == "__main__":
    sys.exit(main())
