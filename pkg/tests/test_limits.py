import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgmvwalk.errors import ModulusOutOfRange
from cgmvwalk.limits import (
    LimitParamsI,
    LimitParamsII,
    atom_mass_null_odd,
    localizes_I,
    localizes_II,
    mass_M,
    nu_I,
    nu_II,
    theorem1_mass,
    theorem3_mass,
)

from conftest import disk_grid

STATES = [
    (1, 0, 0, 0),
    (0, 2**-0.5, 2**-0.5, 0),
    (0.5, 0.5j, -0.5, 0.5),
    (0, 0, 0, 1),
]
unit = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.0, 0.97), st.floats(-np.pi, np.pi))


def test_nu_examples():
    assert nu_I(0.5) == pytest.approx(0.57735, abs=1e-5)
    assert nu_I(0) == 0
    assert nu_I(0.6j) == 0
    assert nu_II(0.5) == pytest.approx(0.57735, abs=1e-5)
    assert nu_II(0) == 1


def test_mass_examples():
    assert mass_M(0.5) == pytest.approx(2 / 3)
    assert mass_M(0) == 0
    assert mass_M(-0.5) == 0


def test_limit_mass_examples():
    p = LimitParamsI(0.5)
    assert theorem1_mass(p, 0, 0) == pytest.approx(0.83333, abs=1e-5)
    assert theorem1_mass(p, 1, 1) == pytest.approx(0.27778, abs=1e-5)
    assert theorem1_mass(LimitParamsI(0.0, 0.4, STATES[2]), 2, 1) == 0
    q = LimitParamsII(0.5)
    assert theorem3_mass(q, 0, 0, "even") == pytest.approx(0.44444, abs=1e-5)
    assert theorem3_mass(q, 1, 0, "even") == 0
    assert theorem3_mass(q, 0, 0, 1) == 0
    assert theorem3_mass(LimitParamsII(-0.5), 2, 0) == 0


def test_predicate_examples():
    assert not localizes_I((1, 0, 0, 0), 0.6j, 0)
    assert localizes_I((1, 0, 0, 0), 0.5, 0)
    nu = nu_I(0.5)
    # alpha chosen to cancel the amplitude, then normalized
    mu, beta, zeta = 0.3, 0.2, 0.4
    alpha = -nu * (mu + beta) - zeta * nu
    v = np.array([alpha, beta, mu, zeta])
    v = v / np.linalg.norm(v)
    assert abs(LimitParamsI(0.5, 0.0, tuple(v)).amplitude()) < 1e-15
    assert not localizes_I(tuple(v), 0.5, 0)
    assert localizes_II(0) == (False, False)
    assert localizes_II(0.5) == (True, True)
    assert localizes_II(-0.5j) == (False, True)


def test_out_of_range():
    for f in (nu_I, nu_II, mass_M, atom_mass_null_odd):
        with pytest.raises(ModulusOutOfRange):
            f(1.0)
    with pytest.raises(ModulusOutOfRange):
        localizes_II(0.8 + 0.8j)


def test_nu_ranges():
    for z in disk_grid(41, 0.99):
        if abs(z.real) > 1e-12:
            assert 0 <= abs(nu_I(z)) < 1
        assert nu_II(z) > 0
        assert 0 <= mass_M(z) <= 1 + 1e-12


def test_type_i_predicate_is_mass_support():
    for z in disk_grid(7):
        for cs in STATES:
            for th in (0.0, 0.9):
                p = LimitParamsI(z, th, cs)
                assert localizes_I(cs, z, th) == (theorem1_mass(p, 0, 0) > 1e-12)


def test_type_ii_predicate_is_mass_support():
    for z in disk_grid(7):
        assert localizes_II(z)[1] == (theorem3_mass(LimitParamsII(z), 0, 0, "even") > 1e-12)


def test_mass_region_closed_form():
    # M(b) != 0 exactly on (x + 1/2)^2 + y^2 > 1/4
    for z in disk_grid(31, 0.99):
        inside = (z.real + 0.5) ** 2 + z.imag**2 > 0.25
        if abs((z.real + 0.5) ** 2 + z.imag**2 - 0.25) > 1e-9:
            assert localizes_II(z)[1] == inside


def test_region_formula_disagrees_somewhere():
    dis = [z for z in disk_grid(21, 0.99) if localizes_II(z)[0] != localizes_II(z)[1]]
    assert dis


@given(unit, st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi), st.sampled_from(STATES))
def test_type_i_mass_global_phase(a, th, phi, cs):
    p0 = LimitParamsI(a, th, cs)
    p1 = LimitParamsI(a, th, tuple(np.exp(1j * phi) * np.array(cs, complex)))
    for x, y in ((0, 0), (1, 2), (3, 0)):
        assert theorem1_mass(p1, x, y) == pytest.approx(theorem1_mass(p0, x, y), rel=1e-12, abs=1e-300)


@given(unit, st.integers(0, 6), st.integers(0, 6), st.sampled_from(["even", "odd"]))
def test_type_ii_mass_symmetric(b, x, y, par):
    p = LimitParamsII(b)
    assert theorem3_mass(p, x, y, par) == theorem3_mass(p, y, x, par)


@given(unit, st.sampled_from(STATES))
def test_type_i_mass_diagonal_decay(a, cs):
    p = LimitParamsI(a, 0.3, cs)
    vals = [theorem1_mass(p, k, k) for k in range(5)]
    if vals[0] > 1e-12:
        ratios = np.array(vals[2:]) / np.array(vals[1:-1])
        assert np.allclose(ratios, p.nu**2, rtol=0, atol=1e-12)


def test_atom_mass_prefactor():
    for a in (0.5, 0.3 + 0.3j, -0.2 - 0.6j):
        a = complex(a)
        assert atom_mass_null_odd(a) ** 2 == pytest.approx(a.real**2 / (1 - a.imag**2))
