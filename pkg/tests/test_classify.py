import random

import pytest
from hypothesis import given, settings, strategies as st

from endcalc import classify as CL
from endcalc import poset as PO
from endcalc import semantics as M
from endcalc import signature as S

import gen

P = S.parse

TABLE = [
    ("C", "Yes", "CantorTree"),
    ("w+1", "Yes", "UniqueMaxEnd"),
    ("w^w+1", "Yes", "UniqueMaxEnd"),
    ("o(1)", "Yes", "UniqueMaxEnd"),
    ("(w^5+1) v C", "Yes", "TreeCantorFactor"),
    ("R3 v 1 v 1 v 1", "No", "FiniteGenus"),
    ("(w^2+1) v (w^2+1)", "No", "FiniteEndType"),
    ("1 -> C", "No", "Babel1"),
    ("o(C)", "No", "Babel2"),
    ("(w^3+1) -> (1 v C)", "No", "GcdFlux"),
    ("o(1) v o(1)", "No", "FiniteEndType"),
    ("(w^2+1) v ((1->C) -> o(1))", "No", "GcdFlux"),
    ("(w^2+1) v (1->C) v (1->o(1))", "No", "GeneralFlux"),
    ("1 v o(1)", "Unknown", "UnknownCategory1"),
    ("(w+1) v C v o(1)", "Unknown", "UnknownCategory1"),
    ("{w^n+1} -> (1 v C)", "Unknown", "UnknownCategory2"),
    ("R0", "Yes", "FiniteTree"),
    ("R2", "No", "FiniteGenus"),
]


@pytest.mark.parametrize("text, answer, theorem", TABLE)
def test_verdicts(text, answer, theorem):
    v = CL.classify_maps(P(text))
    assert (v.answer, v.theorem) == (answer, theorem)


def test_unknown_categories():
    assert CL.classify_maps(P("1 v o(1)")).category == 1
    assert CL.classify_maps(P("{w^n+1} -> (1 v C)")).category == 2
    v = CL.classify_maps(P("{(w^n+1) -> o(1)} -> o(1)"))
    assert (v.answer, v.category) == ("Unknown", 3)


def test_gcd_lambdas():
    assert CL.classify_maps(P("(w^3+1) -> (1 v C)")).witness["lambda"] == "w^3+1"
    assert CL.classify_maps(P("(w^2+1) v ((1->C) -> o(1))")).witness["lambda"] == "1"
    assert CL.gcd_witness_search(P("o(1) v o(1)")).lam == CL.LOOP
    assert S.to_text(PO.LocalStructure.of_type(CL.gcd_witness_search(P("o(w+1) v o(w+1)")).lam).sig) == "o(1)"
    assert CL.gcd_witness_search(P("(w^2+1) v (1->C) v (1->o(1))")) is None


@pytest.mark.parametrize("text, tag", [
    ("o(C)", "Babel2"),
    ("(1->C) v o(1)", "Babel1"),
    ("w^2+1", None),
    ("o(1) v o(C)", None),
])
def test_babel(text, tag):
    assert CL.babel_check(P(text)) == tag


def test_genus_cantor_has_only_marked_cantor_max_ends():
    tops = [t for t, _ in M.max_type_counts(P("o(C)"))]
    assert all(isinstance(t, M.CantorType) and t.marked for t in tops)


def test_flux_splittings():
    w = CL.flux_splitting_search(P("(w^2+1) v (1->C) v (1->o(1))")).to_json()
    assert (w["Y1"], w["Y2"], w["lambda"]) == (["w^2+1"], ["1 -> C", "1 -> o(1)"], "1")
    assert CL.flux_splitting_search(P("1 v o(1)")) is None
    assert CL.flux_splitting_search(P("o(1) v o(1)")).lam == CL.LOOP


@pytest.mark.parametrize("text, answer, theorem", [
    ("o(1 v C)", "Yes", "TreeCantorFactor"),
    ("R5 v (w+1)", "Yes", "UniqueMaxEnd"),
    ("o((w^2+1) -> (1 v C))", "No", "GcdFlux"),
    ("o(C)", "Yes", "CantorTree"),
])
def test_homeo(text, answer, theorem):
    v = CL.classify_homeo(P(text))
    assert (v.answer, v.theorem) == (answer, theorem)


def test_strip_genus():
    assert CL.strip_genus(P("o(1)")) == S.ONE
    assert CL.strip_genus(P("R3 v 1")) == S.ONE


def test_json_shape():
    out = CL.classify_maps(P("1 v o(1)")).to_json()
    assert out["answer"] == "Unknown" and out["category"] == 1
    assert {"answer", "theorem", "witness", "trace"} <= set(out)


def _sig_type(text):
    return CL.LOOP if text == "R1" else PO.LocalStructure.of(P(text)).top


def audit(sig, v):
    """Re-check a No verdict through the definition it cites."""
    if v.theorem == "GcdFlux":
        w = v.witness
        maxes = M.max_type_counts(sig)
        tops = [t for t, _ in maxes]
        i, j = tops.index(_sig_type(w["mu1"])), tops.index(_sig_type(w["mu2"]))
        if i == j:
            assert dict(maxes)[tops[i]] == 2
        else:
            assert CL.gcd_check(_sig_type(w["lambda"]), i, j, maxes, M.types(sig)) is not None
    elif v.theorem == "GeneralFlux":
        w = v.witness
        finite = {t for t, c in M.max_type_counts(sig) if c != M.INF}
        side1, side2 = tuple(map(P, w["Y1"])), tuple(map(P, w["Y2"]))
        assert CL.split_ok(_sig_type(w["lambda"]), side1, side2, M.types(sig), finite)
    elif v.theorem in ("Babel1", "Babel2"):
        assert CL.babel_check(sig) is not None
    elif v.theorem == "FiniteEndType":
        assert any(isinstance(c, int) and 2 <= c < M.INF for _, c in M.max_type_counts(sig))
    elif v.theorem == "FiniteGenus":
        assert M.genus_class(sig).kind == "Finite" or not M.has_ends(sig)


@pytest.mark.parametrize("text, answer, theorem", [t for t in TABLE if t[1] == "No"])
def test_table_witnesses_recheck(text, answer, theorem):
    sig = P(text)
    audit(sig, CL.classify_maps(sig))


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**9))
def test_random_verdicts_are_sound_and_deterministic(seed):
    sig = gen.rand_any(random.Random(seed), 3)
    v = CL.classify_maps(sig)
    assert v == CL.classify_maps(sig)
    assert v.theorem in CL.THEOREMS
    if v.answer == "No":
        audit(sig, v)
    if v.answer == "Yes" and M.genus_class(sig).kind == "Infinite":
        assert CL.classify_homeo(sig).answer == "Yes"


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_strip_genus_idempotent(seed):
    s = CL.strip_genus(gen.rand_any(random.Random(seed), 3))
    assert CL.strip_genus(s) == s
    assert M.genus_class(s).kind == "Zero"
