import random

import pytest
from hypothesis import given, settings, strategies as st

from endcalc import ordinal as O
from endcalc import signature as S

import gen

N = O.parse_expr("n")[0]


def test_parse_examples():
    assert S.parse("1 v o(1)") == S.Wedge((S.ONE, S.Genus(S.ONE)))
    assert S.parse("{w^n+1} -> (1 v C)") == S.Conv(S.Param(S.Ord(N)), S.Wedge((S.ONE, S.C)))
    assert S.parse("R0") == S.Rose(0)


def test_unicode_aliases():
    assert S.parse("1 ∨ o(1)") == S.parse("1 v o(1)")
    assert S.parse("(ω+1) → C") == S.parse("(w+1) -> C")


def test_print_examples():
    assert S.to_text(S.Rose(3)) == "R3"
    assert S.to_text(S.Ord(O.parse_ordinal("w^2+1"))) == "w^(w^2+1)+1"
    assert S.to_text(S.Conv(S.Const(S.ONE), S.C)) == "1 -> C"


def test_singleton_wedge_collapses():
    assert S.wedge([S.C]) == S.C


@pytest.mark.parametrize("text, offset", [("o()", 2), ("1 v", 3), ("w^+1", 2)])
def test_syntax_errors_carry_offsets(text, offset):
    with pytest.raises((S.ParseError, O.OrdinalSyntaxError)) as info:
        S.parse(text)
    assert info.value.offset == offset


def test_family_members():
    assert S.family_member(S.Param(S.Ord(N)), 3) == S.Ord(O.Ordinal.of(3))
    assert S.family_member(S.Accum(S.Param(S.Ord(N))), 2) == S.Wedge(
        tuple(S.Ord(O.Ordinal.of(k)) for k in range(3)))
    assert S.family_member(S.Prefix((S.C,), S.Const(S.ONE)), 0) == S.C
    assert S.family_member(S.Stride(2, 1, S.Param(S.Ord(N))), 3) == S.Ord(O.Ordinal.of(7))


def test_stress_signature_parses():
    s = S.parse("{ {o(w^n+1)} -> Vee_{i=1..n}((1 -> C) -> (w^(w^i)+1)) } -> (1 v C)")
    member = S.family_member(s.family, 3)
    assert isinstance(member, S.Wedge) and len(member.parts) == 3
    assert all(isinstance(p, S.Conv) for p in member.parts)
    assert S.parse(S.to_text(s)) == s


def test_vee_with_fixed_bounds():
    assert S.parse("Vee_{i=1..3}(w^i+1)") == S.parse("(w+1) v (w^2+1) v (w^3+1)")


def _members(sig):
    return list(sig.parts) if isinstance(sig, S.Wedge) else [sig]


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_round_trip(seed):
    s = gen.rand_any(random.Random(seed), 6)
    assert S.parse(S.to_text(s)) == s


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9), st.integers(1, 6))
def test_accumulation_contains_previous(seed, n):
    f = S.Accum(gen.rand_family(random.Random(seed), 3))
    now, before = _members(S.family_member(f, n)), _members(S.family_member(f, n - 1))
    for part in before:
        assert part in now
        now.remove(part)


def test_depth_and_subterms():
    s = S.parse("o((w+1) -> C)")
    assert S.depth(s) == 3
    assert S.C in list(S.subterms(s))
