import random

import pytest
from hypothesis import given, settings, strategies as st

from endcalc import canonical as K
from endcalc import semantics as M
from endcalc import signature as S
from endcalc.cli import atlas_entries

import gen

P = S.parse
ATLAS = {e["name"]: e for e in atlas_entries()}


def nf(text):
    return S.to_text(K.normalize(P(text)))


@pytest.mark.parametrize("text, expected", [
    ("C -> 1", "C"),
    ("C -> C", "C"),
    ("(1 -> C) -> 1", "1 -> C"),
    ("(w^2+1) -> 1", "w^3+1"),
    ("R1 -> C", "o(C)"),
    ("o(o(1))", "o(1)"),
    ("o(R2)", "R3"),
    ("1 v R0", "1"),
])
def test_normal_forms(text, expected):
    assert nf(text) == expected


@pytest.mark.parametrize("text, status", [
    ("w^(w^2)+1", "Stable"),
    ("C", "Stable"),
    ("o(w+1)", "Stable"),
    ("1 -> C", "Stable"),
    ("{(w^n+1) -> o(1)} -> o(1)", "Unstable"),
])
def test_stability(text, status):
    assert K.is_stable(P(text)).status == status


def test_keystone_halves_unstable():
    for name in ("keystone", "keystone-odd", "keystone-even"):
        assert K.is_stable(P(ATLAS[name]["expr"])).status == "Unstable"


def test_unstable_witness_cites_incomparable_members():
    from endcalc import poset
    w = K.is_stable(P("{(w^n+1) -> o(1)} -> o(1)")).witness
    members = [P(m) for m in w["members"]]
    assert len(members) >= 3
    for a in members[:3]:
        for b in members[:3]:
            if a != b:
                assert poset.leq(a, b).answer == "No"


@pytest.mark.parametrize("text, parts", [
    ("C", ["C"]),
    ("(w+1) v (w^2+1)", ["w^2+1"]),
    ("1 v C v o(1)", ["1", "o(1)", "C"]),
])
def test_wedge_decomposition(text, parts):
    assert [S.to_text(c.sig) for c in K.wedge_decomposition(P(text))] == parts


@pytest.mark.parametrize("text, answer", [("C", "Yes"), ("1 v 1", "No"), ("1 v C", "No"), ("w^w+1", "Yes")])
def test_self_similar(text, answer):
    assert K.is_self_similar(P(text)).answer == answer


@pytest.mark.parametrize("a, b, answer", [
    ("(w+1) -> 1", "w^2+1", "Yes"),
    ("C", "1 v C", "No"),
    ("o(1)", "1", "No"),
])
def test_isomorphic(a, b, answer):
    assert K.isomorphic(P(a), P(b)).answer == answer


@pytest.mark.parametrize("text, shell", [("1 -> C", "C"), ("o(1)", "o(1)"), ("w^w+1", "1"), ("o(C)", "o(C)")])
def test_max_shell(text, shell):
    ((t, _),) = M.max_type_counts(P(text))
    assert S.to_text(K.max_shell(t)) == shell


def _any(seed, depth=3):
    return gen.rand_any(random.Random(seed), depth)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_normalize_is_idempotent_and_decreasing(seed):
    s = _any(seed)
    trace = []
    n = K.normalize(s, trace)
    assert K.normalize(n) == n
    assert K.measure(n) <= K.measure(s)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.randoms(use_true_random=False))
def test_rule_order_does_not_matter(seed, rng):
    s = _any(seed, 4)
    order = list(K.RULES)
    rng.shuffle(order)
    assert K.normalize(s, order=tuple(order)) == K.normalize(s)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_collapse_steps_preserve_invariants(seed):
    trace = []
    K.normalize(_any(seed), trace)
    for step in trace:
        if step["rule"] not in ("R5", "R6"):
            continue
        a, b = P(step["from"]), P(step["to"])
        if S.free_in(a):
            continue
        ca, cb = M.char_pair(a), M.char_pair(b)
        assert ca.ms_form == cb.ms_form
        assert (ca.perfect, ca.countable, ca.genus_support) == (cb.perfect, cb.countable, cb.genus_support)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.integers(0, 10**9))
def test_isomorphic_yes_implies_same_invariants(s1, s2):
    a, b = _any(s1, 2), _any(s2, 2)
    for x, y in ((a, b), (a, K.normalize(a))):
        if K.isomorphic(x, y).answer == "Yes":
            assert M.genus_class(x) == M.genus_class(y)
            assert M.char_pair(x).ms_form == M.char_pair(y).ms_form
            assert sorted(map(M.describe, M.types(x))) == sorted(map(M.describe, M.types(y)))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_decomposition_components(seed):
    s = _any(seed)
    st_ = K.is_stable(s)
    if st_.status != "Stable" or M.genus_class(s).kind == "Finite":
        return
    comps = K.wedge_decomposition(s, st_)
    for c in comps:
        assert K.is_self_similar(c.sig).answer == "Yes"
    for i, c in enumerate(comps):
        for d in comps[i + 1:]:
            cantor = isinstance(c.top, M.CantorType) and isinstance(d.top, M.CantorType)
            if cantor:
                assert c.top != d.top


@pytest.mark.parametrize("text", ["C", "o(C)", "1 -> C", "(w^2+1) -> C", "(1 v C) -> C"])
def test_cantor_type_absorbs_own_copy(text):
    w = P(text)
    assert K.isomorphic(w, S.Wedge((w, w))).answer == "Yes"


def test_normalization_terminates_on_many_terms():
    rng = random.Random(10_000)
    for _ in range(10_000):
        nf = K.normalize(gen.rand_any(rng, 3))
        assert K.normalize(nf) == nf
