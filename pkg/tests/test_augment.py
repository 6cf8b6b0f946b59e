"""Augmented loss: frozen examples, exact identities, saturation policy."""
import math
from decimal import Decimal, getcontext

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minfinity import (AugConfig, AugPoint, SaturationError, eval_u, evaluate,
                       get_field, gradient)
from minfinity.augment import POLICY_ERROR, POLICY_SATURATE

CFG = AugConfig()
ERR_CFG = AugConfig(saturation_policy=POLICY_ERROR)


# --- eval_u -----------------------------------------------------------------

def test_u_zero_times_anything():
    assert eval_u(0.0, 50.0, CFG) == (0.0, False)


def test_u_identity_by_construction():
    u, sat = eval_u(0.5, math.log(2.0), CFG)
    assert not sat
    assert u == pytest.approx(1.0, abs=1e-15)


def test_u_tiny_a_large_b_is_representable_and_unflagged():
    # log(1e-300) + 800 is about 109, comfortably inside the clamp
    u, sat = eval_u(1e-300, 800.0, CFG)
    assert not sat
    assert u == math.exp(math.log(1e-300) + 800.0)


def test_u_flag_fires_only_past_the_clamp():
    u, sat = eval_u(1.0, 800.0, CFG)
    assert sat and u == math.exp(700.0)
    u, sat = eval_u(1e-300, -50.0, CFG)  # exponent ~ -741
    assert sat and u == math.exp(-700.0)
    with pytest.raises(SaturationError):
        eval_u(1.0, 800.0, ERR_CFG)


@settings(max_examples=300, deadline=None)
@given(a=st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
       b=st.floats(min_value=-900, max_value=900, allow_nan=False))
def test_u_flag_matches_exponent_arithmetic(a, b):
    u, sat = eval_u(a, b, CFG)
    if a == 0.0:
        assert u == 0.0 and not sat
    else:
        assert sat == (abs(math.log(abs(a)) + b) > CFG.b_clamp)
        assert math.isfinite(u)


# --- evaluate ---------------------------------------------------------------

def test_value_vanishes_at_global_minimum_slice():
    field = get_field("quadratic-1d")
    out = evaluate(field, AugPoint((0.0,), 0.0, 5.0), CFG)
    assert out.value == 0.0 and out.base == 0.0


def test_value_doubles_base_when_a_zero():
    field = get_field("quadratic-1d")
    out = evaluate(field, AugPoint((1.0,), 0.0, 0.0), CFG)
    assert out.value == 2.0 and out.base == 1.0


def test_value_collapses_to_regularizer_when_u_is_one():
    field = get_field("quadratic-2d")  # L(1,1) = 2 exactly
    out = evaluate(field, AugPoint((1.0, 1.0), 0.5, math.log(2.0)), CFG)
    assert out.value == pytest.approx(2.25, abs=1e-12)
    # independent high-precision substitution of the defining formula
    getcontext().prec = 50
    b = Decimal(math.log(2.0))
    u = Decimal("0.5") * b.exp()
    expected = 2 * (1 + (u - 1) ** 2) + Decimal("0.25")
    assert out.value == pytest.approx(float(expected), abs=1e-12)


# --- gradient ---------------------------------------------------------------

def test_gradient_a_component_at_a_zero():
    # with a = 0 the a-derivative reduces to -2 L exp(b)
    field = get_field("quadratic-1d")
    g = gradient(field, AugPoint((1.0,), 0.0, 0.0), CFG)
    assert g.d_a == -2.0
    for b in (-2.0, 0.5, 3.0):
        g = gradient(field, AugPoint((2.0,), 0.0, b), CFG)
        assert g.d_a == pytest.approx(-2.0 * 4.0 * math.exp(b), rel=1e-12)


def test_gradient_b_component_vanishes_at_a_zero():
    for name in ("rastrigin-1d", "double-well-1d"):
        field = get_field(name)
        g = gradient(field, AugPoint((0.5,), 0.0, 1.7), CFG)
        assert g.d_b == 0.0


def test_gradient_theta_multiplier():
    field = get_field("quadratic-1d")
    g = gradient(field, AugPoint((1.0,), 0.0, 0.0), CFG)
    assert g.d_theta == (4.0,)


def test_gradient_saturation_policy():
    field = get_field("quadratic-1d")
    point = AugPoint((1.0,), 1.0, 800.0)
    g = gradient(field, point, CFG)
    assert g.saturated
    with pytest.raises(SaturationError):
        gradient(field, point, ERR_CFG)


# --- exact identities (property tests) --------------------------------------

FIELD_STRATS = {
    "quadratic-1d": st.tuples(st.floats(-10, 10)),
    "rastrigin-1d": st.tuples(st.floats(-5.12, 5.12)),
    "ackley-2d": st.tuples(st.floats(-5, 5), st.floats(-5, 5)),
    "double-well-1d": st.tuples(st.floats(-2, 2)),
    "quadratic-plus-one-1d": st.tuples(st.floats(-10, 10)),
}


@settings(max_examples=200, deadline=None)
@given(data=st.data(),
       name=st.sampled_from(sorted(FIELD_STRATS)),
       a=st.floats(-10, 10),
       b=st.floats(-30, 30))
def test_lower_bound_is_exact_pointwise(data, name, a, b):
    field = get_field(name)
    theta = data.draw(FIELD_STRATS[name])
    out = evaluate(field, AugPoint(theta, a, b), CFG)
    assert out.value >= out.base
    assert out.value >= 0.0


@settings(max_examples=200, deadline=None)
@given(data=st.data(),
       name=st.sampled_from(sorted(FIELD_STRATS)),
       b1=st.floats(-30, 30),
       b2=st.floats(-30, 30))
def test_restriction_identity_and_b_invariance(data, name, b1, b2):
    field = get_field(name)
    theta = data.draw(FIELD_STRATS[name])
    v1 = evaluate(field, AugPoint(theta, 0.0, b1), CFG).value
    v2 = evaluate(field, AugPoint(theta, 0.0, b2), CFG).value
    assert v1 == 2.0 * field.value(theta)
    assert v1 == v2


@settings(max_examples=200, deadline=None)
@given(a=st.floats(-10, 10), b=st.floats(-30, 30),
       lam=st.floats(min_value=1e-3, max_value=1e3))
def test_global_min_slice_is_pure_regularizer(a, b, lam):
    field = get_field("quadratic-1d")
    cfg = AugConfig(lam=lam)
    out = evaluate(field, AugPoint((0.0,), a, b), cfg)
    assert out.value == lam * a * a


def test_lower_bound_on_seeded_grid():
    import random
    rng = random.Random(99)
    field = get_field("rastrigin-2d")
    for _ in range(2000):
        theta = field.interior_sample(rng, margin=0.0)
        p = AugPoint(theta, rng.uniform(-3, 3), rng.uniform(-10, 25))
        out = evaluate(field, p, CFG)
        assert out.value >= out.base


def test_config_validation():
    with pytest.raises(ValueError):
        AugConfig(lam=0.0)
    with pytest.raises(ValueError):
        AugConfig(b_clamp=1000.0)
    with pytest.raises(ValueError):
        AugConfig(saturation_policy="ignore")
    with pytest.raises(ValueError):
        AugPoint((1.0,), math.inf, 0.0)
    assert POLICY_SATURATE == AugConfig().saturation_policy
