import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from raddirac.potentials import (
    BOHR_NM,
    HARTREE_EV,
    Coulomb,
    GaussianNucleus,
    Harmonic,
    Hellmann,
    Morse,
    PhysicsConstants,
    QuantumState,
    Yukawa,
    asymptotic_decay_rate,
    coulomb_exact_energy,
    coulomb_levels,
    evaluate,
    make_potential,
    morse_from_molecular,
    morse_nonrel_energy,
    singularity_exponent,
    unit_conversions,
)

C = PhysicsConstants().c


def test_evaluate_examples():
    assert evaluate(Coulomb(2.0), 0.5) == pytest.approx(-4.0)
    m = Morse(De=0.17, re=1.4, alpha=1.02)
    assert evaluate(m, 1.4) == pytest.approx(-0.17)
    g = GaussianNucleus(Z=80.0, R=1e-4)
    assert evaluate(g, 0.0) == pytest.approx(-2 * 80.0 / (math.sqrt(math.pi) * 1e-4), rel=1e-14)


def test_singular_potentials_reject_origin():
    for pot in (Coulomb(1.0), Yukawa(1.0, 0.5), Hellmann(2.0, -1.0, 0.1)):
        with pytest.raises(ValueError):
            evaluate(pot, 0.0)
    assert evaluate(Harmonic(), 0.0) == 0.0
    assert np.isfinite(evaluate(Morse(0.1, 1.0, 1.0), 0.0))


@pytest.mark.parametrize("bad", [
    lambda: Coulomb(0.0), lambda: GaussianNucleus(1.0, 0.0), lambda: Yukawa(1.0, -0.1),
    lambda: Morse(0.0, 1.0, 1.0), lambda: Morse(1.0, 1.0, -1.0), lambda: Harmonic(0.0),
    lambda: PhysicsConstants(c=0.0), lambda: PhysicsConstants(mass=-1.0),
    lambda: QuantumState(1, 0), lambda: QuantumState(1, -2), lambda: QuantumState(1, 1),
])
def test_invalid_parameters(bad):
    with pytest.raises(ValueError):
        bad()


def test_reduction_identities():
    r = np.random.default_rng(3).uniform(1e-3, 30.0, 100)
    np.testing.assert_allclose(Yukawa(2.5, 0.0).evaluate(r), Coulomb(2.5).evaluate(r), rtol=1e-15)
    np.testing.assert_allclose(Hellmann(3.0, 0.0, 0.7).evaluate(r), Coulomb(3.0).evaluate(r), rtol=1e-15)


def test_gaussian_series():
    Z, R = 92.0, 1.3e-4
    g = GaussianNucleus(Z, R)
    r = np.linspace(1e-9, R / 100, 40)
    sp = math.sqrt(math.pi)
    series = -2 * Z / (sp * R) + 2 * Z * r**2 / (3 * sp * R**3) - Z * r**4 / (5 * sp * R**5)
    np.testing.assert_allclose(g.evaluate(r), series, rtol=1e-12)


def test_coulomb_exact_examples():
    assert coulomb_exact_energy(3.0, QuantumState(1, -1)) == pytest.approx(-4.5005393, abs=5e-8)
    e = coulomb_exact_energy(1.0, QuantumState(1, -1), PhysicsConstants(c=1e6))
    assert e == pytest.approx(-0.5, abs=1e-9)
    a = 92.0 / C
    closed = C * C / math.sqrt(1 + (a / math.sqrt(1 - a * a)) ** 2) - C * C
    assert coulomb_exact_energy(92.0, QuantumState(1, -1)) == pytest.approx(closed, rel=1e-12)


@given(st.floats(0.5, 100.0), st.sampled_from([-3, -2, -1, 1, 2, 3]))
def test_coulomb_levels_increase_with_n(Z, kappa):
    e = coulomb_levels(Z, kappa, 6)
    assert all(b > a for a, b in zip(e, e[1:]))
    assert all(x < 0 for x in e)


def test_supercritical_charge_errors():
    with pytest.raises(ValueError):
        coulomb_exact_energy(140.0, QuantumState(1, -1))
    with pytest.raises(ValueError):
        singularity_exponent(200.0, 1)


def test_singularity_exponent():
    assert singularity_exponent(0.0, -1) == 1.0
    assert singularity_exponent(0.0, 2) == 2.0
    assert singularity_exponent(92.0, -1) == pytest.approx(math.sqrt(1 - (92 / C) ** 2))


@given(st.floats(0.0, 130.0), st.integers(1, 5))
def test_singularity_exponent_symmetric(Z, k):
    assert singularity_exponent(Z, k) == singularity_exponent(Z, -k)
    s = singularity_exponent(Z, k)
    assert 0 < s <= k


def test_decay_rate():
    assert asymptotic_decay_rate(-1e-12) < 1e-4
    assert asymptotic_decay_rate(-C * C) == pytest.approx(C)
    e = coulomb_exact_energy(1.0, QuantumState(1, -1))
    assert asymptotic_decay_rate(e) == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(ValueError):
        asymptotic_decay_rate(0.1)


def test_unit_conversions():
    assert unit_conversions(1.0, "hartree", "eV") == HARTREE_EV == 27.211385
    assert unit_conversions(0.0, "bohr", "nm") == 0.0
    assert unit_conversions(1.0, "amu", "me") == pytest.approx(1 / 5.48578e-4, rel=1e-15)
    assert unit_conversions(unit_conversions(2.0, "nm", "bohr"), "bohr", "nm") == pytest.approx(2.0)
    assert BOHR_NM == 5.291772e-2
    with pytest.raises(ValueError):
        unit_conversions(1.0, "hartree", "nm")


def test_make_potential():
    assert make_potential("yukawa", V0=1.0, **{"lambda": 0.5}) == Yukawa(1.0, 0.5)
    assert make_potential("harmonic") == Harmonic()
    with pytest.raises(ValueError):
        make_potential("coulomb")
    with pytest.raises(ValueError):
        make_potential("square-well", Z=1)


def test_morse_molecular_units():
    pot, consts = morse_from_molecular(4.7446, 0.07416, 0.50391, 14.40558)
    assert pot.De * HARTREE_EV == pytest.approx(4.7446)
    assert consts.mass == pytest.approx(0.50391 / 5.48578e-4)
    # harmonic-plus-anharmonic estimate sits a few tenths of an eV above -De
    e = morse_nonrel_energy(pot, consts) * HARTREE_EV
    assert -4.7446 < e < -4.4
