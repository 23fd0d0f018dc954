import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from raddirac import adaptive as ad
from raddirac.adaptive import (
    AdaptiveConfig,
    adapt_beta,
    adaptive_states,
    decay_seed,
    frequency_indicator,
    laguerre_coefficients,
    model_projection_residual,
    reference_threshold,
)
from raddirac.assembly import SpinorLayout
from raddirac.basis import GlobalBasisSpec
from raddirac.potentials import Coulomb, Harmonic, PhysicsConstants, Yukawa, coulomb_levels
from raddirac.specfun import scaled_laguerre_function


def test_indicator_examples():
    c = np.zeros(6)
    c[0] = 1.0
    assert frequency_indicator(c, M=2) == 0.0
    c = np.zeros(6)
    c[-2:] = [0.3, -2.0]
    assert frequency_indicator(c, M=2) == pytest.approx(1.0)
    assert frequency_indicator(np.ones(6), M=1) == pytest.approx(math.sqrt(1 / 6))
    with pytest.raises(ValueError):
        frequency_indicator(np.zeros(4), M=1)
    with pytest.raises(ValueError):
        frequency_indicator(np.ones(4), M=5)


@given(st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=40), st.floats(-1e6, 1e6))
def test_indicator_scale_invariance(c, alpha):
    c = np.array(c)
    assume(np.sum(c * c) > 1e-100 and abs(alpha) > 1e-6)
    f = frequency_indicator(c, M=2)
    assert 0.0 <= f <= 1.0
    assert frequency_indicator(alpha * c, M=2) == pytest.approx(f, rel=1e-12, abs=1e-300)


def test_reference_threshold():
    f = [reference_threshold(N) for N in (20, 40, 80)]
    assert all(0 < x < 1 for x in f)
    assert f[0] > f[1] > f[2]
    assert model_projection_residual(80) < 1e-13
    with pytest.raises(ValueError):
        reference_threshold(9)


def test_config_validation():
    for kw in (dict(nu=1.0), dict(beta0=1e-5), dict(beta0=1e6), dict(mode_index=-1)):
        with pytest.raises(ValueError):
            AdaptiveConfig(**kw)


def test_laguerre_coefficients_reproduce_tail():
    spec = GlobalBasisSpec(L=1.0, N1=3, N2=5, beta=2.0)
    lay = SpinorLayout.balanced(spec)
    coef = np.random.default_rng(1).normal(size=lay.dim)
    c = laguerre_coefficients(coef, lay)
    from raddirac.basis import basis_values
    r = np.array([1.3, 2.0, 4.5])
    F = coef[: spec.dim] @ basis_values(spec, r)[0]
    expansion = [sum(c[k] * scaled_laguerre_function(k, 2.0, x - 1.0)[0] for k in range(6)) for x in r]
    np.testing.assert_allclose(F, expansion, rtol=1e-12)


def _hydrogen_layout(N1=40, N2=40, L=1.0):
    return SpinorLayout.balanced(GlobalBasisSpec(L=L, N1=N1, N2=N2))


def test_hydrogen_ground_state_accuracy():
    beta, sol, trace = adapt_beta(_hydrogen_layout(), Coulomb(1.0), -1)
    ref = coulomb_levels(1.0, -1, 1)[0]
    assert abs(sol.entries[0].binding_energy - ref) <= 1e-10 * abs(ref)
    assert trace.stop_reason in ad.STOP_REASONS


def test_trace_invariants():
    cfg = AdaptiveConfig(beta0=64.0)
    lay = _hydrogen_layout()
    beta, sol, trace = adapt_beta(lay, Coulomb(1.0), -1, cfg=cfg)
    accepted = [s.indicator for s in trace.steps if s.accepted]
    assert all(b <= a for a, b in zip(accepted, accepted[1:]))
    assert cfg.beta_min <= beta <= cfg.beta_max
    assert trace.final_beta == beta
    assert len(trace.steps) > 1


def test_initial_ok_uses_one_solve():
    lay = _hydrogen_layout()
    solver = ad._Solver(lay, Coulomb(1.0), -1, PhysicsConstants(), "idom", None, 1)
    cfg = AdaptiveConfig(f0=1.0)
    beta, _, trace = adapt_beta(lay, Coulomb(1.0), -1, cfg=cfg, _solver=solver)
    assert beta == cfg.beta0 and trace.stop_reason == "initial-ok"
    assert len(solver.cache) == 1


def test_bound_hit_when_walk_leaves_range():
    cfg = AdaptiveConfig(beta0=1.0, beta_min=0.5, beta_max=2.0, f0=1e-30)
    beta, _, trace = adapt_beta(_hydrogen_layout(), Coulomb(1.0), -1, cfg=cfg)
    assert trace.stop_reason in ("bound-hit", "indicator-increase")
    assert 0.5 <= beta <= 2.0


def test_needs_enough_tail_functions():
    with pytest.raises(ValueError):
        adapt_beta(_hydrogen_layout(N2=8), Coulomb(1.0), -1)


def test_missing_mode_at_start():
    with pytest.raises(ValueError):
        adapt_beta(_hydrogen_layout(), Yukawa(1.0, 5.0), -1)


def test_adaptive_beats_fixed_beta_at_z92():
    lay = _hydrogen_layout(N1=80, N2=40, L=2.5 / 92)
    ref = coulomb_levels(92.0, -1, 5)
    res = adaptive_states(lay, Coulomb(92.0), -1, 5)
    from raddirac.studies import solve_states
    fixed = solve_states(Coulomb(92.0), -1, 5, N1=80, N2=40, L=2.5 / 92, beta=1.0)
    err = lambda e: max(abs(a - b) / abs(b) for a, b in zip(e, ref))
    assert err(res.energies) <= err(fixed.energies)


def test_decay_seed():
    cfg = AdaptiveConfig()
    e = coulomb_levels(1.0, -1, 1)[0]
    assert decay_seed(e, PhysicsConstants()) == 2.0
    b = decay_seed(-1e-14, PhysicsConstants(), cfg=cfg)
    assert b >= cfg.beta_min


def test_adaptive_states_seeds_agree():
    lay = _hydrogen_layout()
    ref = coulomb_levels(1.0, -1, 3)
    for seed in ("fixed", "chain", "decay"):
        res = adaptive_states(lay, Coulomb(1.0), -1, 3, seed=seed)
        np.testing.assert_allclose(res.energies, ref, rtol=1e-9)
    with pytest.raises(ValueError):
        adaptive_states(lay, Coulomb(1.0), -1, 1, seed="random")


def test_confining_potential_adapts():
    lay = SpinorLayout.balanced(GlobalBasisSpec(L=0.1, N1=20, N2=60))
    res = adaptive_states(lay, Harmonic(), -1, 2)
    assert res.energies[0] == pytest.approx(1.4999950, abs=1e-6)
