import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.linalg import block_diag

from cgmvwalk.cmv import (
    VerblunskySeq,
    build_cmv,
    cmv_apply,
    cmv_power_entry,
    parse_seq,
    rotate_seq,
    unitarity_residual,
)
from cgmvwalk.errors import BadModulus, LengthMismatch, SizeTooSmall, TruncationTooSmall

coef = st.builds(lambda r, t: r * np.exp(1j * t), st.floats(0.0, 0.9), st.floats(-np.pi, np.pi))


def lm_oracle(alphas, n):
    """Dense ``L M`` from explicit 2x2 blocks, cut to ``n x n``."""
    th = []
    for a in alphas:
        r = np.sqrt(1 - abs(a) ** 2)
        th.append(np.array([[np.conj(a), r], [r, -a]]))
    m = len(alphas)
    Lm = block_diag(*th[0:m:2])
    Mm = block_diag(np.eye(1), *th[1 : m - 1 : 2], np.eye(1))
    return (Lm @ Mm)[:n, :n]


def test_free_entries():
    C = build_cmv(VerblunskySeq.zero(), 6)
    assert C.entry(0, 2) == 1
    assert C.entry(1, 0) == 1
    assert C.entry(0, 0) == 0
    assert C.entry(3, 1) == 1


def test_null_odd_entries():
    C = build_cmv(VerblunskySeq.null_odd(0.5), 6)
    r = np.sqrt(0.75)
    assert C.entry(0, 0) == pytest.approx(0.5)
    assert C.entry(0, 1) == 0
    assert C.entry(0, 2) == pytest.approx(r)
    assert C.entry(1, 0) == pytest.approx(r)
    assert C.entry(1, 2) == pytest.approx(-0.5)


def test_bad_modulus():
    with pytest.raises(BadModulus):
        VerblunskySeq.null_odd(1.0)
    with pytest.raises(BadModulus):
        VerblunskySeq.explicit([0.1, 1.2])


def test_size_checks():
    with pytest.raises(SizeTooSmall):
        build_cmv(VerblunskySeq.zero(), 2)
    with pytest.raises(SizeTooSmall):
        build_cmv(VerblunskySeq.zero(), 7)


@given(st.lists(coef, min_size=12, max_size=12))
def test_matches_block_oracle(vals):
    seq = VerblunskySeq.explicit(vals)
    C = build_cmv(seq, 10)
    assert np.abs(C.dense() - lm_oracle(seq.alphas(12), 10)).max() < 1e-14


@given(st.lists(coef, min_size=66, max_size=66))
def test_interior_unitary_and_banded(vals):
    C = build_cmv(VerblunskySeq.explicit(vals), 64)
    assert unitarity_residual(C) < 1e-12
    M = C.dense()
    i, j = np.indices(M.shape)
    assert np.all(M[np.abs(i - j) > 2] == 0)


def test_unitarity_examples():
    assert unitarity_residual(build_cmv(VerblunskySeq.zero(), 16)) < 1e-14
    assert unitarity_residual(build_cmv(VerblunskySeq.null_odd(0.5), 64)) < 1e-12
    assert unitarity_residual(build_cmv(VerblunskySeq.constant(0.999), 32)) < 1e-10


def test_apply_examples():
    e0 = np.zeros(8)
    e0[0] = 1
    assert np.allclose(cmv_apply(build_cmv(VerblunskySeq.zero(), 8), e0), np.eye(8)[1])
    C = build_cmv(VerblunskySeq.null_odd(0.5), 8)
    assert np.allclose(cmv_apply(C, np.zeros(8)), 0)
    assert np.allclose(cmv_apply(C, e0)[:3], [0.5, np.sqrt(0.75), 0])
    with pytest.raises(LengthMismatch):
        cmv_apply(C, np.zeros(6))


@given(st.lists(coef, min_size=30, max_size=30), st.integers(0, 5), st.integers(0, 4), st.integers(0, 4))
def test_apply_matches_dense(vals, t, l, m):
    C = build_cmv(VerblunskySeq.explicit(vals), 24)
    want = np.linalg.matrix_power(C.dense(), t)[l, m]
    assert abs(cmv_power_entry(C, t, l, m) - want) < 1e-12


def test_power_entry_independent_of_n():
    seq = VerblunskySeq.null_even(0.3 - 0.6j)
    for t in range(0, 12):
        for l in range(4):
            a = cmv_power_entry(build_cmv(seq, 32), t, l, 0)
            b = cmv_power_entry(build_cmv(seq, 64), t, l, 0)
            assert abs(a - b) < 1e-13


def test_power_entry_identity_and_guard():
    C = build_cmv(VerblunskySeq.null_odd(0.2), 16)
    assert cmv_power_entry(C, 0, 3, 3) == 1
    assert cmv_power_entry(C, 0, 3, 2) == 0
    with pytest.raises(TruncationTooSmall):
        cmv_power_entry(C, 7, 0, 0)


def test_rotate_examples():
    seq = VerblunskySeq.null_odd(0.4 + 0.1j)
    assert rotate_seq(seq, 0.0) == seq
    assert np.allclose(rotate_seq(seq, 2 * np.pi).alphas(10), seq.alphas(10))
    half = rotate_seq(seq, np.pi).alphas(10)
    assert np.allclose(half[::2], -seq.alphas(10)[::2])
    assert np.all(half[1::2] == 0)


@given(st.floats(-np.pi, np.pi), st.sampled_from(["null-odd:0.5,0", "null-even:0.3,0.4", "const:0.2,-0.1"]))
def test_rotation_preserves_moment_modulus(w, text):
    seq = parse_seq(text)
    C0 = build_cmv(seq, 40)
    C1 = build_cmv(rotate_seq(seq, w), 40)
    for t in range(1, 12):
        assert abs(abs(cmv_power_entry(C0, t, 0, 0)) - abs(cmv_power_entry(C1, t, 0, 0))) < 1e-12


def test_parse_seq():
    assert parse_seq("null-odd:0.5,0") == VerblunskySeq.null_odd(0.5)
    assert parse_seq("zero").alphas(4).tolist() == [0, 0, 0, 0]
    assert np.allclose(parse_seq("explicit:0.1,0;0,0.2").alphas(3), [0.1, 0.2j, 0])
    with pytest.raises(ValueError):
        parse_seq("null-odd:abc")
    with pytest.raises(ValueError):
        parse_seq("wobble:0,0")


def test_null_patterns():
    assert np.allclose(VerblunskySeq.null_odd(0.3).alphas(6), [0.3, 0, 0.3, 0, 0.3, 0])
    assert np.allclose(VerblunskySeq.null_even(0.3).alphas(6), [0, 0.3, 0, 0.3, 0, 0.3])
