"""Dual-number arithmetic laws and the two derivative oracles."""
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from minfinity import AugConfig, AugPoint, evaluate, get_field, gradient
from minfinity.augment import lifted_loss
from minfinity.differentiation import Dual, dual_gradient, fd_gradient

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


# --- arithmetic laws --------------------------------------------------------

def test_product_rule_on_seeded_pairs():
    rng = random.Random(0)
    for _ in range(10_000):
        x = Dual(rng.uniform(-50, 50), rng.uniform(-5, 5))
        y = Dual(rng.uniform(-50, 50), rng.uniform(-5, 5))
        z = x * y
        assert z.primal == x.primal * y.primal
        assert z.tangent == x.primal * y.tangent + x.tangent * y.primal


def test_tangent_linearity_on_seeded_pairs():
    rng = random.Random(1)
    for _ in range(10_000):
        x = Dual(rng.uniform(-50, 50), rng.uniform(-5, 5))
        y = Dual(rng.uniform(-50, 50), rng.uniform(-5, 5))
        s = x + y
        assert s.tangent == x.tangent + y.tangent
        d = x - y
        assert d.tangent == x.tangent - y.tangent


def test_exp_chain_rule_on_seeded_pairs():
    rng = random.Random(2)
    for _ in range(10_000):
        x = Dual(rng.uniform(-20, 20), rng.uniform(-5, 5))
        e = x.exp()
        assert e.primal == math.exp(x.primal)
        assert e.tangent == math.exp(x.primal) * x.tangent


@settings(max_examples=300, deadline=None)
@given(p=finite, t=finite, q=finite, s=finite)
def test_product_rule_property(p, t, q, s):
    z = Dual(p, t) * Dual(q, s)
    assert z.tangent == p * s + t * q


@settings(max_examples=300, deadline=None)
@given(p=st.floats(min_value=0.1, max_value=1e3), t=finite)
def test_sqrt_power_consistency(p, t):
    x = Dual(p, t)
    r1 = x.sqrt()
    r2 = x ** 0.5
    assert r1.primal == pytest.approx(r2.primal, rel=1e-15)
    assert r1.tangent == pytest.approx(r2.tangent, rel=1e-12, abs=1e-300)


def test_division_and_float_mixing():
    x = Dual(3.0, 1.0)
    y = (2.0 * x + 1.0) / x  # f = 2 + 1/x, f' = -1/x^2
    assert y.primal == pytest.approx(7.0 / 3.0)
    assert y.tangent == pytest.approx(-1.0 / 9.0)
    with pytest.raises(ZeroDivisionError):
        x / Dual(0.0, 1.0)


# --- finite differences -----------------------------------------------------

def test_fd_square():
    (g,) = fd_gradient(lambda x: x[0] * x[0], [3.0])
    assert abs(g - 6.0) <= 1e-6


def test_fd_exp():
    (g,) = fd_gradient(lambda x: math.exp(x[0]), [0.0])
    assert abs(g - 1.0) <= 1e-9


def test_fd_matches_analytic_a_slice():
    # slice of the augmented loss in a at (L=1, b=0): derivative -2 at a=0
    field = get_field("quadratic-1d")
    cfg = AugConfig()

    def f(aa):
        return evaluate(field, AugPoint((1.0,), aa[0], 0.0), cfg).value

    (g,) = fd_gradient(f, [0.0])
    assert abs(g - (-2.0)) <= 1e-6


def test_fd_rejects_nonfinite_stencil():
    with pytest.raises(ValueError):
        fd_gradient(lambda x: math.inf, [1.0])


# --- dual gradients ---------------------------------------------------------

def test_dual_product_with_exp():
    (g,) = dual_gradient(lambda c: c[0] * c[0].exp(), [1.0])
    assert g == pytest.approx(2.0 * math.e, rel=1e-15)


def test_dual_constant_function():
    assert dual_gradient(lambda c: 7.5, [1.0, 2.0]) == [0.0, 0.0]


def test_dual_augmented_loss_where_u_is_one():
    # u = 1 kills both (u-1) factors: d/da = 2*lam*a = 1, d/db = 0
    field = get_field("quadratic-1d")
    g = dual_gradient(lifted_loss(field, 1.0), [1.0, 0.5, math.log(2.0)])
    assert abs(g[1] - 1.0) <= 1e-12
    assert abs(g[2]) <= 1e-12


# --- three-way agreement ----------------------------------------------------

@pytest.mark.parametrize("name", ["quadratic-2d", "rastrigin-1d", "ackley-2d"])
def test_three_way_agreement(name):
    field = get_field(name)
    cfg = AugConfig()
    lifted = lifted_loss(field, cfg.lam)
    rng = random.Random(31)

    def flat(x):
        return evaluate(field, AugPoint(tuple(x[:field.dim]), x[field.dim],
                                        x[field.dim + 1]), cfg,
                        check_domain=False).value

    for _ in range(200):
        theta = field.interior_sample(rng)
        p = AugPoint(theta, rng.uniform(-2, 2), rng.uniform(-3, 3))
        g = gradient(field, p, cfg)
        if g.saturated:
            continue
        analytic = list(g.d_theta) + [g.d_a, g.d_b]
        fd = fd_gradient(flat, p.coords())
        dual = dual_gradient(lifted, p.coords())
        for ga, gf, gd in zip(analytic, fd, dual):
            scale = max(1.0, abs(ga))
            assert abs(ga - gf) / scale <= 1e-6
            assert abs(ga - gd) / scale <= 1e-12
