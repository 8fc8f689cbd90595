import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cgmvwalk.cmv import VerblunskySeq, build_cmv, cmv_power_entry
from cgmvwalk.errors import ZeroArgument
from cgmvwalk.opuc import (
    LaurentBasis,
    basis_values,
    eigen_residual,
    eval_basis,
    laurent_basis,
    verblunsky_from_moments,
)
from cgmvwalk.spectral import RadialLimitConfig, gram_matrix, spectral_measure

SEQS = [
    VerblunskySeq.zero(),
    VerblunskySeq.null_odd(0.5),
    VerblunskySeq.null_even(0.5),
    VerblunskySeq.null_odd(0.3 + 0.3j),
]
CIRCLE = np.exp(2j * np.pi * (np.arange(16) + 0.5) / 16)

coef = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.0, 0.9), st.floats(-np.pi, np.pi))


def free_order(n):
    ex = [0]
    k = 1
    while len(ex) < n:
        ex += [-k, k]
        k += 1
    return ex[:n]


def gram_schmidt_oracle(seq, n):
    """Orthonormalize ``1, 1/z, z, 1/z^2, ...`` against the moments ``(C^k)_00``."""
    C = build_cmv(seq, 4 * n + 8)
    c = [cmv_power_entry(C, k, 0, 0) for k in range(n + 2)]

    def ip(p, q):  # int p conj(q) dmu, p and q as {exponent: coefficient}
        tot = 0j
        for a, x in p.items():
            for b, y in q.items():
                k = a - b
                tot += x * np.conj(y) * (c[k] if k >= 0 else np.conj(c[-k]))
        return tot

    out = []
    for e in free_order(n):
        v = {e: 1.0 + 0j}
        for u in out:
            proj = ip(v, u)
            for k, y in u.items():
                v[k] = v.get(k, 0) - proj * y
        nrm = np.sqrt(ip(v, v).real)
        out.append({k: y / nrm for k, y in v.items()})
    return out


@pytest.mark.parametrize("seq", SEQS, ids=lambda s: s.describe())
def test_gram_schmidt_oracle(seq):
    n = 8
    basis = laurent_basis(seq, n)
    ref = gram_schmidt_oracle(seq, n)
    for j, (poly, want) in enumerate(zip(basis.polys, ref)):
        got = poly.as_dict()
        phase = got[free_order(n)[j]] / want[free_order(n)[j]]
        assert abs(abs(phase) - 1) < 1e-10
        keys = set(got) | set(want)
        assert max(abs(got.get(k, 0) - phase * want.get(k, 0)) for k in keys) < 1e-10


def test_free_basis_monomials():
    b = laurent_basis(VerblunskySeq.zero(), 7)
    for j, e in enumerate(free_order(7)):
        assert b.polys[j].as_dict() == {e: 1}
    assert np.allclose(eval_basis(b, 1.0), 1)
    assert np.allclose(eval_basis(b, -1.0), [(-1.0) ** e for e in free_order(7)])


def test_first_entry_is_one():
    for seq in SEQS:
        assert eval_basis(laurent_basis(seq, 6), 0.3 + 0.8j)[0] == 1


@pytest.mark.parametrize("seq", SEQS, ids=lambda s: s.describe())
def test_eigen_relation_circle(seq):
    C = build_cmv(seq, 64)
    basis = laurent_basis(seq, 32)
    for z in CIRCLE:
        assert eigen_residual(C, basis, z, 20) < 1e-10


def test_eigen_free_example():
    seq = VerblunskySeq.zero()
    assert eigen_residual(build_cmv(seq, 16), laurent_basis(seq, 16), np.exp(1j * np.pi / 3), 10) < 1e-12


def test_left_family():
    seq = VerblunskySeq.null_even(0.4 - 0.2j)
    C = build_cmv(seq, 64)
    left = laurent_basis(seq, 32).left()
    assert left.side == "left"
    for z in CIRCLE[:4]:
        assert eigen_residual(C, left, z, 20) < 1e-10


def test_shuffled_basis_detected():
    seq = VerblunskySeq.null_odd(0.5)
    b = laurent_basis(seq, 24)
    perm = np.random.default_rng(0).permutation(24)
    bad = LaurentBasis(seq, b.coeffs[perm])
    assert eigen_residual(build_cmv(seq, 64), bad, np.exp(0.7j), 20) > 1e-2


@given(st.lists(coef, min_size=14, max_size=14))
def test_second_kind_is_negated_first_kind(vals):
    seq = VerblunskySeq.explicit(vals)
    a = laurent_basis(seq, 12, "second").coeffs
    b = laurent_basis(seq.negated(), 12).coeffs
    assert np.array_equal(a, b)


@given(st.lists(coef, min_size=14, max_size=14), st.floats(-np.pi, np.pi))
def test_values_match_coefficients(vals, th):
    seq = VerblunskySeq.explicit(vals)
    z = np.exp(1j * th)
    assert np.abs(basis_values(seq, z, 12) - eval_basis(laurent_basis(seq, 12), z)).max() < 1e-9


@given(st.lists(coef, min_size=6, max_size=6), st.floats(-np.pi, np.pi))
def test_circle_bound(vals, th):
    basis = laurent_basis(VerblunskySeq.explicit(vals), 8)
    vals_z = eval_basis(basis, np.exp(1j * th))
    bounds = np.abs(basis.coeffs).sum(axis=1)
    assert np.all(np.abs(vals_z) <= bounds + 1e-12)


def test_zero_argument():
    with pytest.raises(ZeroArgument):
        eval_basis(laurent_basis(VerblunskySeq.zero(), 4), 0)


@given(st.lists(coef, min_size=8, max_size=8))
def test_moments_recover_coefficients(vals):
    seq = VerblunskySeq.explicit(vals)
    C = build_cmv(seq, 48)
    c = [cmv_power_entry(C, k, 0, 0) for k in range(9)]
    assert np.abs(verblunsky_from_moments(c) - np.array(vals)).max() < 1e-9


def test_gram_under_measure():
    # needs the fine radial ladder and a fine grid to reach 1e-6
    cfg = RadialLimitConfig(kmax=20)
    for seq in (VerblunskySeq.null_even(0.5), VerblunskySeq.null_odd(0.3 + 0.3j)):
        mu = spectral_measure(seq, 65536, cfg)
        G = gram_matrix(mu, laurent_basis(seq, 8), 8)
        assert np.abs(G - np.eye(8)).max() < 1e-6
