from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from forge import subsume as sb

VALUES = "uvw"

value_sets = st.frozensets(st.sampled_from(VALUES))


@st.composite
def set_lassos(draw, max_pre=2, max_cyc=3):
    return sb.LassoSetSeq(draw(st.lists(value_sets, max_size=max_pre)),
                          draw(st.lists(value_sets, min_size=1, max_size=max_cyc)))


@st.composite
def lassos(draw, max_pre=2, max_cyc=3):
    return sb.LassoSeq(draw(st.lists(st.sampled_from(VALUES), max_size=max_pre)),
                       draw(st.lists(st.sampled_from(VALUES), min_size=1, max_size=max_cyc)))


@settings(max_examples=150, deadline=None)
@given(set_lassos(), lassos())
def test_reduction_agrees_with_chain_search(a, x):
    assert sb.subsumes(a, x) == sb.chain_oracle(a, x)


@given(set_lassos(), lassos(), st.data())
def test_growing_the_sets_preserves_subsumption(a, x, data):
    start, period = sb.aligned_window(a, x)
    extra = [data.draw(value_sets) for _ in range(start + period)]
    bigger = sb.LassoSetSeq([a[i] | extra[i] for i in range(start)],
                            [a[i] | extra[i] for i in range(start, start + period)])
    if sb.subsumes(a, x):
        assert sb.subsumes(bigger, x)


@given(set_lassos(), lassos(), st.integers(0, 6))
def test_dropping_a_prefix_preserves_subsumption(a, x, k):
    assert sb.subsumes(a.shifted(k), x.shifted(k)) == sb.subsumes(a, x)


@given(set_lassos(), lassos(), st.integers(1, 3), st.integers(1, 3))
def test_unrolling_cycles_preserves_subsumption(a, x, i, j):
    assert sb.subsumes(a.unrolled(i), x.unrolled(j)) == sb.subsumes(a, x)


@given(set_lassos(), set_lassos(), lassos())
def test_union_splits(a, b, x):
    assert sb.union_split_property(a, b, x)


@given(set_lassos(), set_lassos(), st.integers(0, 12))
def test_union_is_pointwise(a, b, i):
    assert sb.union(a, b)[i] == a[i] | b[i]


@given(lassos(), st.integers(0, 5))
def test_shifted_drops_entries(x, k):
    assert x.shifted(k).prefix(8) == x.prefix(k + 8)[k:]


@given(set_lassos(), lassos())
def test_recurring_witnesses_are_exactly_the_hits(a, x):
    ws = sb.recurring_witnesses(a, x)
    assert bool(ws) == sb.subsumes(a, x)
    for v, i in ws:
        assert x[i] == v and v in a[i]


def test_parity_example():
    a = sb.parse_set_lasso("pre:[{v}];cyc:[{u},{v}]")
    x = sb.parse_lasso("pre:[];cyc:[u,v]")
    assert not sb.subsumes(a, x)
    assert not sb.chain_oracle(a, x)
    # the same sets one step later line up with x
    assert sb.subsumes(a.shifted(1), x)


def test_longest_chain_respects_order():
    a = sb.parse_set_lasso("pre:[];cyc:[{u,v}]")
    x = sb.parse_lasso("pre:[];cyc:[u]")
    chain = sb.longest_chain(a, x, 6)
    assert chain == list(range(6))


def test_parse_round_trip():
    text = "pre:[{u,v},{}];cyc:[{w}]"
    assert str(sb.parse_set_lasso(text)) == text
    assert str(sb.parse_lasso("pre:[a];cyc:[b,c]")) == "pre:[a];cyc:[b,c]"


@pytest.mark.parametrize("text", ["pre:[];cyc:[]", "cyc:[u]", "pre:[u];cyc:[u"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        sb.parse_lasso(text)


def test_catalog_agrees():
    rep = sb.check_catalog()
    assert rep.instances == 50
    assert rep.ok
    assert 0 < rep.subsuming < 50


def test_ramsey_is_deterministic():
    first, second = sb.ramsey(200, 3, seed=5), sb.ramsey(200, 3, seed=5)
    assert first.ok
    assert first.to_dict() == second.to_dict()
