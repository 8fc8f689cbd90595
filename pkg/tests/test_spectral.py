import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgmvwalk.cmv import VerblunskySeq, build_cmv, cmv_power_entry, rotate_seq
from cgmvwalk.errors import InsideDiskViolation, NoConvergence
from cgmvwalk.limits import atom_mass_null_odd, mass_M
from cgmvwalk.opuc import laurent_basis
from cgmvwalk.spectral import (
    RadialLimitConfig,
    ac_weight,
    caratheodory,
    caratheodory_ratio,
    measure_moment,
    point_masses,
    richardson,
    schur_function,
    spectral_measure,
)

SEQS = [
    VerblunskySeq.zero(),
    VerblunskySeq.null_odd(0.5),
    VerblunskySeq.null_even(0.5),
    VerblunskySeq.null_odd(0.3 + 0.3j),
]
ids = lambda s: s.describe()  # noqa: E731

inside = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.0, 0.7), st.floats(-np.pi, np.pi))
# the ratio oracle overflows for |z| below about 1e-100
inside_ratio = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(1e-6, 0.7), st.floats(-np.pi, np.pi))
param = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.05, 0.85), st.floats(-np.pi, np.pi))


@pytest.fixture(scope="module")
def measures():
    return {s.describe(): spectral_measure(s) for s in SEQS}


def series_oracle(seq, z, terms=60):
    """``1 + 2 sum conj(c_k) z**k`` with ``c_k = (C^k)_00``."""
    M = build_cmv(seq, 2 * terms + 8).dense()
    v = np.zeros(len(M), complex)
    v[0] = 1
    tot = 1.0 + 0j
    for k in range(1, terms):
        v = M @ v
        tot += 2 * np.conj(v[0]) * z**k
    return tot


def test_free_caratheodory():
    assert caratheodory(VerblunskySeq.zero(), 0.3 - 0.5j) == 1
    assert ac_weight(VerblunskySeq.zero(), 1.234) == pytest.approx(1.0)
    assert point_masses(VerblunskySeq.zero()) == []


def test_normalization_at_zero():
    assert caratheodory(VerblunskySeq.null_odd(0.5), 0) == pytest.approx(1.0)
    assert schur_function(VerblunskySeq.null_odd(0.5), 0) == pytest.approx(0.5)


def test_ratio_agrees_example():
    seq = VerblunskySeq.null_even(0.5)
    assert abs(caratheodory(seq, 0.5) - caratheodory_ratio(seq, 0.5)) < 1e-9


@given(st.sampled_from(["null-odd", "null-even", "const"]), param, inside)
def test_closed_form_vs_series(rule, p, z):
    seq = VerblunskySeq(rule, p)
    assert abs(caratheodory(seq, z) - series_oracle(seq, z)) < 1e-8


@given(st.sampled_from(["null-odd", "null-even", "const"]), param, inside_ratio)
def test_closed_form_vs_ratio(rule, p, z):
    seq = VerblunskySeq(rule, p)
    assert abs(caratheodory(seq, z) - caratheodory(seq, z, method="ratio")) < 1e-8


@given(st.sampled_from(["null-odd", "null-even", "const"]), param, inside)
def test_positive_real_part(rule, p, z):
    assert caratheodory(VerblunskySeq(rule, p), z).real > 0


def test_outside_disk():
    with pytest.raises(InsideDiskViolation):
        caratheodory(VerblunskySeq.zero(), 1.0)


def test_richardson_linear_exact():
    h = 2.0 ** -np.arange(3, 8)
    assert np.allclose(richardson(3.0 + 5.0 * h, 1), 3.0)


def test_atom_angle_diverges():
    seq = VerblunskySeq.null_odd(0.5)
    (theta0, _), = point_masses(seq)
    with pytest.raises(NoConvergence):
        ac_weight(seq, theta0)


def test_null_odd_atom_mass():
    for a in (0.5, 0.3 + 0.3j, -0.4 + 0.2j):
        atoms = point_masses(VerblunskySeq.null_odd(a))
        assert len(atoms) == 1
        assert atoms[0][1] == pytest.approx(atom_mass_null_odd(a), abs=1e-5)


def test_null_even_atoms_total_M():
    for b in (0.5, 0.3 - 0.4j, -0.2 + 0.6j):
        atoms = point_masses(VerblunskySeq.null_even(b))
        assert len(atoms) == 2
        assert sum(m for _, m in atoms) == pytest.approx(mass_M(b), abs=1e-5)


def test_imaginary_a_no_atoms():
    assert point_masses(VerblunskySeq.null_odd(0.9j)) == []


@pytest.mark.parametrize("rule,p", [("null-odd", 0.5), ("null-even", 0.5), ("null-odd", -0.7), ("null-even", 0.3)])
def test_real_parameter_atoms_symmetric(rule, p):
    atoms = point_masses(VerblunskySeq(rule, p))
    pts = np.array([np.exp(1j * t) for t, _ in atoms])
    # the conjugate of every atom is an atom with the same mass
    for (t, m) in atoms:
        j = np.argmin(np.abs(pts - np.exp(-1j * t)))
        assert abs(pts[j] - np.exp(-1j * t)) < 1e-6
        assert atoms[j][1] == pytest.approx(m, abs=1e-6)


def test_ratio_tiny_argument():
    with pytest.raises(NoConvergence):
        caratheodory_ratio(VerblunskySeq.null_odd(0.5), 1e-218)


@pytest.mark.parametrize("seq", SEQS, ids=ids)
def test_total_mass(seq, measures):
    assert abs(measures[seq.describe()].total - 1) < 1e-4


@pytest.mark.parametrize("seq", SEQS, ids=ids)
def test_weight_nonnegative(seq, measures):
    assert np.all(measures[seq.describe()].weight >= 0)


def test_ac_weight_matches_grid(measures):
    mu = measures[VerblunskySeq.null_even(0.5).describe()]
    i = np.argmin(np.abs(mu.theta - np.pi / 2))
    assert ac_weight(VerblunskySeq.null_even(0.5), mu.theta[i]) == pytest.approx(mu.weight[i], abs=1e-4)


@pytest.mark.parametrize("seq", SEQS, ids=ids)
def test_moment_identity(seq, measures):
    mu = measures[seq.describe()]
    basis = laurent_basis(seq, 6)
    C = build_cmv(seq, 64)
    worst = max(
        abs(measure_moment(mu, basis, t, l, m) - cmv_power_entry(C, t, l, m))
        for t in range(13)
        for l in range(5)
        for m in range(5)
    )
    assert worst < 1e-4


def test_moment_examples(measures):
    free = measures[VerblunskySeq.zero().describe()]
    b0 = laurent_basis(VerblunskySeq.zero(), 4)
    for t in range(4):
        assert abs(measure_moment(free, b0, t, 0, 0) - (t == 0)) < 1e-10
    mu = measures[VerblunskySeq.null_odd(0.5).describe()]
    b = laurent_basis(VerblunskySeq.null_odd(0.5), 4)
    assert abs(measure_moment(mu, b, 1, 0, 0) - 0.5) < 1e-4
    for l in range(3):
        assert abs(measure_moment(mu, b, 0, l, l) - 1) < 1e-4


@pytest.mark.parametrize("w", [0.3, -1.1, 2.0])
def test_rotation_covariance(w):
    seq = VerblunskySeq.null_odd(0.5)
    rot = rotate_seq(seq, w)
    C0, C1 = build_cmv(seq, 48), build_cmv(rot, 48)
    ratios = []
    for t in range(1, 10):
        m0, m1 = cmv_power_entry(C0, t, 0, 0), cmv_power_entry(C1, t, 0, 0)
        if abs(m0) > 1e-6:
            ratios.append(m1 / m0 / np.exp(-1j * t * w))
    # moment_t(rotated) = exp(-i t w) moment_t, the same factor for every t
    assert np.allclose(ratios, 1, atol=1e-12)
    mu0 = spectral_measure(seq)
    mu1 = spectral_measure(rot)
    # atoms move to theta - w
    want = np.array([np.exp(1j * (t - w)) for t, _ in mu0.atoms])
    got = np.array([np.exp(1j * t) for t, _ in mu1.atoms])
    assert len(got) == len(want)
    assert all(np.abs(want - g).min() < 1e-5 for g in got)


def test_to_dict_shape(measures):
    d = measures[VerblunskySeq.null_even(0.5).describe()].to_dict()
    assert set(d) == {"weight", "atoms", "total"}
    assert len(d["weight"]) == 2048
    assert all(len(p) == 2 for p in d["atoms"])


def test_config_validation():
    with pytest.raises(ValueError):
        RadialLimitConfig(kmin=10, kmax=5)
    with pytest.raises(ValueError):
        RadialLimitConfig(scan_r=1.0)
