from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from forge.theory import (App, OpSymbol, Theory, TheoryParseError, Var, app, builtin_theory, equation,
                          parse_theory, resolve_theory, semilattice, state_theory, theory_sum, theory_tensor,
                          theory_to_dict, to_dsl, wellorder_theory)

OP_NAMES = ["f", "g", "h", "k", "m", "c", "d"]


@st.composite
def terms(draw, ops, depth=2):
    leaves = [Var(v) for v in ("x", "y", "z")] + [App(o.name) for o in ops if o.arity == 0]
    if depth == 0 or not ops or draw(st.booleans()):
        return draw(st.sampled_from(leaves))
    op = draw(st.sampled_from(ops))
    return App(op.name, tuple(draw(terms(ops, depth - 1)) for _ in range(op.arity)))


@st.composite
def theories(draw, name="T"):
    names = draw(st.lists(st.sampled_from(OP_NAMES), min_size=1, max_size=3, unique=True))
    ops = [OpSymbol(n, draw(st.integers(0, 2))) for n in names]
    eqs = []
    for _ in range(draw(st.integers(0, 3))):
        op = draw(st.sampled_from(ops))
        lhs = App(op.name, tuple(draw(terms(ops, 1)) for _ in range(op.arity)))
        eqs.append(equation(lhs, draw(terms(ops))))
    return Theory.make(name, ops, eqs)


@given(theories("T"), theories("S"))
def test_tensor_counts(t, s):
    tensor = theory_tensor(t, s)
    assert len(tensor.signature) == len(t.signature) + len(s.signature)
    assert len(tensor.equations) == len(t.equations) + len(s.equations) + len(t.signature) * len(s.signature)


@given(theories("T"), theories("S"))
def test_sum_is_tensor_without_commutation(t, s):
    total = {eq.canonical for eq in theory_sum(t, s).equations}
    tensor = {eq.canonical for eq in theory_tensor(t, s).equations}
    assert total <= tensor
    assert len(tensor - total) == len(t.signature) * len(s.signature)


@given(theories("T"), theories("S"))
def test_combined_theories_are_well_formed(t, s):
    for th in (theory_sum(t, s), theory_tensor(t, s)):
        arity = th.arity
        for eq in th.equations:
            for side in (eq.lhs, eq.rhs):
                stack = [side]
                while stack:
                    u = stack.pop()
                    if isinstance(u, App):
                        assert arity[u.op] == len(u.args)
                        stack.extend(u.args)


@given(theories())
def test_dsl_round_trip(th):
    assert parse_theory(to_dsl(th)) == th


@settings(max_examples=30)
@given(theories("T"), theories("S"))
def test_dsl_round_trip_with_prefixed_names(t, s):
    th = theory_tensor(t, s)
    back = parse_theory(to_dsl(th))
    assert (back.signature, back.equations) == (th.signature, th.equations)


def test_clashing_names_are_prefixed():
    th = theory_tensor(semilattice(), semilattice())
    assert set(th.op_names) == {"left.bot", "left.join", "right.bot", "right.join"}
    assert len(th.equations) == 4 + 4 + 4


def test_semilattice_tensor_sigma22_adds_four_equations():
    th = theory_tensor(semilattice(), builtin_theory("Sigma22Free"))
    assert len(th.equations) == 4 + 0 + 2 * 2
    texts = {str(eq) for eq in th.equations}
    assert "() bot = u0(bot,bot)" in texts


def test_commutation_equation_shape():
    th = theory_tensor(builtin_theory("Unary"), builtin_theory("Output(1)"))
    (eq,) = th.equations
    assert eq.lhs == app("f", app("out0", Var("x_0_0")))
    assert eq.rhs == app("out0", app("f", Var("x_0_0")))


def test_state_theory_size():
    th = state_theory(2)
    assert th.arity == {"lookup": 2, "update0": 1, "update1": 1}
    assert len(th.equations) == 9


@pytest.mark.parametrize("n", [1, 2, 3])
def test_wellorder_theory_signature(n):
    th = wellorder_theory(n)
    assert th.arity["bot"] == 0
    assert all(k <= n for k in th.arity.values())


def test_builtin_parameter_syntax():
    assert builtin_theory("State(3)") == builtin_theory("State:3") == builtin_theory("State", 3)
    with pytest.raises(KeyError):
        builtin_theory("Nonsense")


def test_parse_error_position():
    text = "theory X {\n  op f : 2;\n  eq (x) f(x, = x;\n}\n"
    with pytest.raises(TheoryParseError) as err:
        parse_theory(text)
    assert (err.value.line, err.value.col) == (3, 15)


def test_parse_rejects_unknown_operation():
    with pytest.raises(ValueError):
        parse_theory("theory X { op f : 1; eq (x) g(x) = x; }")


def test_equation_context_must_cover_variables():
    with pytest.raises(ValueError):
        equation(Var("x"), Var("y"), context=["x"])


def test_resolve_theory_reads_files(tmp_path):
    path = tmp_path / "m.th"
    path.write_text(to_dsl(builtin_theory("Monoid")))
    assert resolve_theory(str(path)) == builtin_theory("Monoid")


def test_theory_to_dict_is_sorted():
    d = theory_to_dict(semilattice())
    assert [op["name"] for op in d["ops"]] == ["bot", "join"]
