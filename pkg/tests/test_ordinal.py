import itertools

import pytest
from hypothesis import given, settings, strategies as st

from endcalc import oracle as OR
from endcalc import ordinal as O

P = O.parse_ordinal
UNIVERSE = list(O.iter_below(2)) + list(itertools.islice(O.iter_below(3), 0, 20000, 37))
ords = st.sampled_from(UNIVERSE)


def test_cmp_examples():
    assert O.cmp(P("1"), P("w")) < 0
    assert O.cmp(P("w^w"), P("w^w")) == 0
    assert O.cmp(P("w^w"), P("w^2*5+w*3")) > 0


def test_cmp_against_tuple_arithmetic():
    # the tuple ordinals of the cross-check module compare independently
    for a, b in itertools.product(UNIVERSE[::17], repeat=2):
        assert O.cmp(a, b) == OR.ocmp(OR.from_ordinal(a), OR.from_ordinal(b))


def test_add_examples():
    assert O.add(P("1"), P("w")) == P("w")
    assert O.add(P("w"), P("1")) == P("w+1")
    assert O.add(P("w^2"), P("w^2")) == P("w^2*2")


def test_ms_normal_examples():
    assert O.ms_normal(P("w^2*3+w*7+4")) == (P("2"), 3)
    assert O.ms_normal(P("5")) == (P("0"), 5)
    assert O.ms_normal(P("w^w")) == (P("w"), 1)
    with pytest.raises(ValueError):
        O.ms_normal(O.ZERO)


def test_ms_normal_matches_derivative_iteration():
    for xi in ("w^2*3+w*7+4", "w^w", "5"):
        a, n = OR.cb_rank_of_space(OR.from_ordinal(P(xi)))
        assert (OR.to_ordinal(a), n) == O.ms_normal(P(xi))


def test_sup_over_index_examples():
    assert O.sup_over_index(O.parse_expr("n")[0]) == (P("w"), False)
    assert O.sup_over_index(O.parse_expr("3")[0]) == (P("3"), True)
    e = O.parse_expr("w^n")[0]
    assert O.sup_over_index(e) == (P("w^w"), False)
    assert all(O.cmp(O.subst(e, k), P("w^w")) < 0 for k in range(51))
    for u in UNIVERSE:
        if O.cmp(u, P("w^w")) < 0:
            assert any(O.cmp(u, O.subst(e, k)) < 0 for k in range(12))


def test_index_templates_are_certified_monotone():
    for text in ("n", "w^n+1", "w*n+3", "w^(w^n)"):
        assert O.monotone_check(O.parse_expr(text)[0])


def test_successor_and_limits():
    assert P("w*2").is_limit()
    assert not P("w+1").is_limit()
    assert P("w").succ() == P("w+1")
    assert O.subst(O.parse_expr("w^n+1")[0], 2) == P("w^2+1")


def test_printing_is_canonical():
    assert str(P("w^2*3+w*7+4")) == "w^2*3+w*7+4"
    assert str(P("w^(w^2+1)")) == "w^(w^2+1)"


@settings(max_examples=300, deadline=None)
@given(ords, ords, ords)
def test_total_order(a, b, c):
    assert O.cmp(a, b) == -O.cmp(b, a)
    assert (O.cmp(a, b) == 0) == (a == b)
    if O.cmp(a, b) <= 0 and O.cmp(b, c) <= 0:
        assert O.cmp(a, c) <= 0


@settings(max_examples=300, deadline=None)
@given(ords, ords, ords)
def test_addition_laws(a, b, c):
    assert O.add(O.add(a, b), c) == O.add(a, O.add(b, c))
    assert O.add(a, O.ZERO) == a
    assert O.cmp(a, O.add(a, b)) <= 0
    if O.cmp(b, c) <= 0:
        assert O.cmp(O.add(a, b), O.add(a, c)) <= 0


@settings(max_examples=300, deadline=None)
@given(ords)
def test_ms_normal_is_leading_term(xi):
    if xi.is_zero():
        return
    a, n = OR.cb_rank_of_space(OR.from_ordinal(xi))
    assert O.ms_normal(xi) == (OR.to_ordinal(a), n)


@settings(max_examples=300, deadline=None)
@given(ords)
def test_print_parse_round_trip(a):
    assert P(str(a)) == a


@pytest.mark.parametrize("text", ["n", "n+1", "w*n", "w^n", "w+n", "w^2*n", "w^(w^n)", "3"])
def test_sup_is_least_bound(text):
    e = O.parse_expr(text)[0]
    sup, attained = O.sup_over_index(e)
    values = [O.subst(e, k) for k in range(101)]
    assert all(O.cmp(v, sup) <= 0 for v in values)
    if attained:
        assert any(v == sup for v in values)
    for u in UNIVERSE:
        if all(O.cmp(v, u) <= 0 for v in values[:20]):
            assert O.cmp(u, sup) >= 0
