import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from raddirac.specfun import (
    QuadratureRule,
    erf,
    gauss_rule,
    glof,
    laguerre_poly_deriv_sequence,
    laguerre_poly_sequence,
    laguerre_table,
    scaled_laguerre_function,
)


def test_laguerre_sequence_examples():
    assert laguerre_poly_sequence(0, 7.3) == pytest.approx([1.0])
    assert laguerre_poly_sequence(1, 2.0) == pytest.approx([1.0, -1.0])
    assert laguerre_poly_sequence(2, 1.0)[-1] == pytest.approx(-0.5)


def test_laguerre_deriv_examples():
    assert laguerre_poly_deriv_sequence(0, 5.0) == pytest.approx([0.0])
    assert laguerre_poly_deriv_sequence(1, 3.7)[1] == pytest.approx(-1.0)
    assert laguerre_poly_deriv_sequence(2, 1.0)[-1] == pytest.approx(-1.0)


@pytest.mark.parametrize("t", [math.nan, math.inf, -math.inf])
def test_laguerre_rejects_non_finite(t):
    with pytest.raises(ValueError):
        laguerre_poly_sequence(3, t)
    with pytest.raises(ValueError):
        laguerre_poly_deriv_sequence(3, t)


@given(st.integers(1, 30), st.floats(0.01, 50.0))
def test_derivative_identity(n, t):
    L = laguerre_poly_sequence(n, t)
    dL = laguerre_poly_deriv_sequence(n, t)
    lhs = t * dL[n]
    rhs = n * (L[n] - L[n - 1])
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9 * max(1.0, abs(n * L[n])))


@pytest.mark.parametrize("n,t", [(120, 600.0), (120, 37.5), (80, 0.3), (50, 250.0), (100, 99.0)])
def test_recurrence_matches_extended_precision(n, t):
    mpmath.mp.dps = 80
    ref = float(mpmath.laguerre(n, 0, t))
    got = laguerre_poly_sequence(n, t)[n]
    assert got == pytest.approx(ref, rel=1e-12)


def test_scaled_laguerre_examples():
    assert scaled_laguerre_function(0, 1.0, 0.0)[0] == pytest.approx(1.0)
    assert scaled_laguerre_function(0, 4.0, 0.0)[0] == pytest.approx(2.0)
    assert scaled_laguerre_function(1, 1.0, 2.0)[0] == pytest.approx(-math.exp(-1.0))
    with pytest.raises(ValueError):
        scaled_laguerre_function(0, 0.0, 1.0)


@pytest.mark.parametrize("beta", [0.5, 1.0, 7.0])
def test_scaled_laguerre_orthonormal(beta):
    q = gauss_rule("gauss-laguerre", 200)
    # u = beta r: int Lhat_n Lhat_m dr = int L_n L_m e^{-u} du
    r = q.nodes / beta
    vals = np.array([[scaled_laguerre_function(n, beta, x)[0] for x in r] for n in range(21)])
    G = (vals * (q.scaled_weights / beta)) @ vals.T
    assert np.abs(G - np.eye(21)).max() < 1e-12


def test_glof_examples():
    assert glof(0, 4.0, 2.0, 0.5)[0] == pytest.approx(0.5)
    assert glof(3, 4.0, 2.0, 1.0)[0] == pytest.approx(1.0)
    assert glof(1, 4.0, 2.0, 0.5)[0] == pytest.approx(0.5 * (1 - 5 * math.log(2)), rel=1e-12)
    for bad in (0.0, -0.1, 1.5):
        with pytest.raises(ValueError):
            glof(1, 4.0, 2.0, bad)


def test_glof_weighted_orthogonality():
    # x = e^{-t/5}: int_0^1 S_n S_m x^2 dx = (1/5) int L_n L_m e^{-t} dt
    q = gauss_rule("gauss-laguerre", 120)
    x = np.exp(-q.nodes / 5.0)
    S = np.array([[glof(n, 4.0, 2.0, xi)[0] for xi in x] for n in range(16)])
    w = q.scaled_weights * x * x * x / 5.0   # dx = x/5 dt
    G = (S * w) @ S.T
    assert np.abs(G - np.eye(16) / 5.0).max() < 1e-12


def _fd(fun, x, h=1e-6):
    return (fun(x + h) - fun(x - h)) / (2 * h)


def test_derivative_consistency_random_points():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(0, 12))
        r = float(rng.uniform(0.05, 8.0))
        beta = float(rng.uniform(0.3, 3.0))
        v, d = scaled_laguerre_function(n, beta, r)
        fd = _fd(lambda s: scaled_laguerre_function(n, beta, s)[0], r)
        assert d == pytest.approx(fd, rel=1e-6, abs=1e-8)
        x = float(rng.uniform(0.05, 0.95))
        v, d = glof(n, 4.0, 2.0, x)
        fd = _fd(lambda s: glof(n, 4.0, 2.0, s)[0], x)
        assert d == pytest.approx(fd, rel=1e-6, abs=1e-7)
        t = float(rng.uniform(0.1, 20.0))
        d = laguerre_poly_deriv_sequence(n, t)[n]
        fd = _fd(lambda s: laguerre_poly_sequence(n, s)[n], t)
        assert d == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_table_matches_scalar_and_survives_large_degree():
    t = np.array([0.0, 1.5, 40.0, 700.0])
    v, _ = laguerre_table(200, t, envelope=0.5)
    assert np.all(np.isfinite(v))
    ref = laguerre_poly_sequence(10, 1.5)[10] * math.exp(-0.75)
    assert v[10, 1] == pytest.approx(ref, rel=1e-13)


def test_gauss_rule_examples():
    r = gauss_rule("gauss-laguerre", 1)
    assert r.nodes == pytest.approx([1.0]) and r.weights == pytest.approx([1.0])
    r = gauss_rule("gauss-legendre", 1)
    assert r.nodes == pytest.approx([0.0], abs=1e-15) and r.weights == pytest.approx([2.0])
    r = gauss_rule("gauss-laguerre", 2)
    assert r.nodes == pytest.approx([2 - math.sqrt(2), 2 + math.sqrt(2)], rel=1e-14)
    with pytest.raises(ValueError):
        gauss_rule("gauss-legendre", 0)
    with pytest.raises(ValueError):
        gauss_rule("simpson", 3)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40))
def test_gauss_exactness(Q):
    lag = gauss_rule("gauss-laguerre", Q)
    leg = gauss_rule("gauss-legendre", Q)
    for rule in (lag, leg):
        assert np.all(np.diff(rule.nodes) > 0) and np.all(rule.weights > 0)
    for k in range(0, min(2 * Q, 30)):
        assert lag.integrate(lag.nodes**k) == pytest.approx(math.factorial(k), rel=1e-13)
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert leg.integrate(leg.nodes**k) == pytest.approx(exact, rel=1e-13, abs=1e-14)


def test_log_mapped_composite_covers_interval():
    r = gauss_rule("log-mapped-composite", 20)
    assert r.kind == "log-mapped-composite"
    assert r.integrate(np.exp(-r.nodes)) == pytest.approx(1.0, rel=1e-13)
    assert r.nodes.max() < 85.0


def test_rule_validation():
    with pytest.raises(ValueError):
        QuadratureRule(np.array([0.0]), np.array([1.0, 2.0]), "gauss-legendre")


def test_erf_examples():
    assert erf(0.0) == 0.0
    assert abs(erf(6.0) - 1.0) <= 1e-15
    assert erf(1.0) == pytest.approx(0.8427007929497149, abs=1e-15)
    assert erf(-1.0) == pytest.approx(-0.8427007929497149, abs=1e-15)
