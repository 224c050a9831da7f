import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from endcalc import flux as F

import checks

FIG, UNIT = F.DECORATED_SPINE, F.UNIT_DENSITY


@pytest.mark.parametrize("a, b, value", [(0, -2, 2), (2, 0, 3), (2, -2, 5)])
def test_fixture_corks(a, b, value):
    assert F.cork(FIG, F.X(a), F.X(b)) == value


def test_cork_vanishes_upwards():
    for n in range(-4, 5):
        for m in range(n, 6):
            assert F.cork(FIG, F.X(n), F.X(m)) == 0


def test_cork_additivity():
    for a in range(-4, 4):
        for b in range(a, 5):
            for c in range(b, 6):
                assert F.cork(FIG, F.X(c), F.X(a)) == F.cork(FIG, F.X(c), F.X(b)) + F.cork(FIG, F.X(b), F.X(a))


def test_admissible_pairs():
    shift = F.parse_action("shift:1")
    for n in range(-3, 4):
        assert F.is_admissible(UNIT, F.IDENTITY, n, n)
        assert F.is_admissible(UNIT, shift, n + 1, n)
        assert not F.is_admissible(UNIT, shift, n - 1, n)


@pytest.mark.parametrize("spec, value", [("shift:1", 1), ("shift:-1", -1), ("shift:-2", -2), ("shift:0", 0)])
def test_unit_density_shifts(spec, value):
    assert F.flux_value(UNIT, F.parse_action(spec)) == value


def test_identity_has_no_flux():
    for model in (FIG, UNIT):
        assert F.flux_value(model, F.IDENTITY) == 0


def test_shift_flux_by_direct_count():
    # count slots crossing position 0 over a window of -10..10
    for s in range(-3, 4):
        f = F.parse_action(f"shift:{s}")
        moved_up = sum(1 for p in range(-10, 1) if p + s > 0)
        moved_down = sum(1 for p in range(1, 11) if p + s <= 0)
        assert F.flux_value(UNIT, f) == moved_up - moved_down


def test_compose_inverse_and_shift_cancel():
    f = F.parse_action("shift:1;swap:0.0,3.0")
    assert F.compose(f, F.inverse(f)) == F.IDENTITY
    assert F.compose(F.parse_action("shift:1"), F.parse_action("shift:-1")) == F.IDENTITY


def test_swaps_move_single_slots():
    f = F.parse_action("swap:0.0,3.0")
    assert f((0, 0)) == (3, 0) and f((3, 0)) == (0, 0) and f((1, 0)) == (1, 0)
    assert F.flux_value(UNIT, f) == 0


def test_invalid_actions_rejected():
    with pytest.raises(F.ModelError):
        F.flux_value(FIG, F.parse_action("shift:1"))
    with pytest.raises(F.ModelError):
        F.flux_value(FIG, F.parse_action("swap:0.0,5.3"))
    with pytest.raises(F.ModelError):
        F.parse_action("rotate:1")
    with pytest.raises(F.ModelError):
        F.SpineModel(F.END_KIND, (), 2, (1,))


def test_model_json_round_trip(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(FIG.to_json()))
    assert F.load_model(path) == FIG
    assert F.model_from_json(UNIT.to_json()) == UNIT


action_seeds = st.integers(0, 10**9)


@settings(max_examples=200, deadline=None)
@given(action_seeds, action_seeds, action_seeds)
def test_group_laws(a, b, c):
    f, g, h = (checks.random_action(random.Random(x), UNIT) for x in (a, b, c))
    assert F.compose(F.compose(f, g), h) == F.compose(f, F.compose(g, h))
    assert F.flux_value(UNIT, F.compose(f, g)) == F.flux_value(UNIT, f) + F.flux_value(UNIT, g)
    assert F.flux_value(UNIT, F.inverse(f)) == -F.flux_value(UNIT, f)
    for x in [(p, 0) for p in range(-8, 9)]:
        assert F.compose(f, g)(x) == f(g(x))
        assert f.preimage(f(x)) == x


@settings(max_examples=100, deadline=None)
@given(action_seeds)
def test_finite_permutations_have_no_flux(seed):
    rng = random.Random(seed)
    for model in (FIG, UNIT):
        f = checks.random_action(rng, model)
        f = F.EndAction.make(0, f.perm_map())
        assert F.flux_value(model, f) == 0


def test_pair_independence_sample():
    rng = random.Random(2)
    actions = [checks.random_action(rng, UNIT) for _ in range(10)]
    assert checks.pair_independence_failures(UNIT, actions) == []
