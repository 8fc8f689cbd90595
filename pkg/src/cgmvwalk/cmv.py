"""
Truncated CMV matrices.

The n x n truncation is the top-left corner of the infinite five-diagonal
matrix ``C = L M`` with ``L = T0 + T2 + ...`` and ``M = 1 + T1 + T3 + ...``
(direct sums), ``T_j = [[conj(a_j), rho_j], [rho_j, -a_j]]``.  Nothing is
modified at the cut; callers stay away from it through the truncation
safety precondition of :func:`cmv_power_entry`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import BadModulus, LengthMismatch, SizeTooSmall, TruncationTooSmall

__all__ = [
    "VerblunskySeq",
    "CMVOperator",
    "build_cmv",
    "rotate_seq",
    "cmv_apply",
    "cmv_power_entry",
    "unitarity_residual",
    "parse_seq",
]

_RULES = ("null-odd", "null-even", "const", "explicit", "rotated")


@dataclass(frozen=True)
class VerblunskySeq:
    """Rule-based Verblunsky sequence ``(alpha_0, alpha_1, ...)``.

    Use the constructors :meth:`null_odd`, :meth:`null_even`,
    :meth:`constant`, :meth:`explicit`.  Explicit sequences continue with
    zeros after the listed values.
    """

    rule: str
    value: complex = 0j
    values: tuple = ()
    base: "VerblunskySeq | None" = None
    w: float = 0.0

    def __post_init__(self):
        if self.rule not in _RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.rule in ("null-odd", "null-even", "const") and not abs(self.value) < 1:
            raise BadModulus(f"|alpha| = {abs(self.value):.6g} must be < 1")
        if self.rule == "explicit":
            bad = [v for v in self.values if not abs(v) < 1]
            if bad:
                raise BadModulus(f"explicit sequence has |alpha| >= 1: {bad[0]!r}")

    @classmethod
    def null_odd(cls, a: complex) -> "VerblunskySeq":
        return cls("null-odd", complex(a))

    @classmethod
    def null_even(cls, b: complex) -> "VerblunskySeq":
        return cls("null-even", complex(b))

    @classmethod
    def constant(cls, alpha: complex) -> "VerblunskySeq":
        return cls("const", complex(alpha))

    @classmethod
    def explicit(cls, values) -> "VerblunskySeq":
        return cls("explicit", values=tuple(complex(v) for v in values))

    @classmethod
    def zero(cls) -> "VerblunskySeq":
        return cls("explicit", values=())

    def alpha(self, j: int) -> complex:
        return complex(self.alphas(j + 1)[j])

    def alphas(self, n: int) -> NDArray[np.complex128]:
        """First ``n`` coefficients."""
        j = np.arange(n)
        out = np.zeros(n, dtype=np.complex128)
        if self.rule == "null-odd":
            out[j % 2 == 0] = self.value
        elif self.rule == "null-even":
            out[j % 2 == 1] = self.value
        elif self.rule == "const":
            out[:] = self.value
        elif self.rule == "explicit":
            m = min(n, len(self.values))
            out[:m] = self.values[:m]
        else:
            out = self.base.alphas(n) * np.exp(1j * (j + 1) * self.w)
        return out

    def negated(self) -> "VerblunskySeq":
        """The sequence ``(-alpha_j)`` that generates second-kind functions."""
        if self.rule == "explicit":
            return VerblunskySeq.explicit([-v for v in self.values])
        if self.rule == "rotated":
            return VerblunskySeq("rotated", base=self.base.negated(), w=self.w)
        return VerblunskySeq(self.rule, -self.value)

    @property
    def is_periodic(self) -> bool:
        if self.rule == "rotated":
            return self.base.is_periodic
        return self.rule in ("null-odd", "null-even", "const")

    def describe(self) -> str:
        if self.rule == "explicit":
            return "explicit:" + ";".join(f"{v.real:.17g},{v.imag:.17g}" for v in self.values)
        if self.rule == "rotated":
            return f"rotated({self.base.describe()},w={self.w:.17g})"
        return f"{self.rule}:{self.value.real:.17g},{self.value.imag:.17g}"


def parse_seq(text: str) -> VerblunskySeq:
    """Parse ``null-odd:RE,IM``, ``null-even:RE,IM``, ``const:RE,IM``, ``zero``."""
    text = text.strip()
    if text == "zero":
        return VerblunskySeq.zero()
    try:
        rule, rest = text.split(":", 1)
        if rule == "explicit":
            vals = [complex(*map(float, p.split(","))) for p in rest.split(";") if p]
            return VerblunskySeq.explicit(vals)
        re_, im_ = (float(x) for x in rest.split(","))
    except ValueError as exc:
        raise ValueError(f"cannot parse sequence {text!r}") from exc
    value = complex(re_, im_)
    if rule == "null-odd":
        return VerblunskySeq.null_odd(value)
    if rule == "null-even":
        return VerblunskySeq.null_even(value)
    if rule == "const":
        return VerblunskySeq.constant(value)
    raise ValueError(f"unknown sequence rule {rule!r}")


def rotate_seq(seq: VerblunskySeq, w: float) -> VerblunskySeq:
    """Map ``alpha_j`` to ``alpha_j * exp(i (j + 1) w)``.

    The result is a closed rule whenever the pattern survives (full turns,
    half turns of null patterns); otherwise a lazily rotated rule.
    """
    w = float(w)
    turns = w / (2 * np.pi)
    if np.isclose(turns, round(turns), rtol=0, atol=1e-15):
        return seq
    half = np.isclose(w / np.pi, round(w / np.pi), rtol=0, atol=1e-15)
    if half and seq.rule == "null-odd":
        return VerblunskySeq.null_odd(-seq.value)
    if half and seq.rule == "null-even":
        return seq
    if seq.rule == "explicit":
        vals = np.asarray(seq.values, dtype=np.complex128)
        return VerblunskySeq.explicit(vals * np.exp(1j * (np.arange(len(vals)) + 1) * w))
    if seq.rule == "rotated":
        return rotate_seq(seq.base, seq.w + w)
    return VerblunskySeq("rotated", base=seq, w=w)


@dataclass(frozen=True)
class CMVOperator:
    """Banded n x n truncation.  ``band[i, k] = C[i, i + k - 2]``."""

    dim: int
    band: NDArray[np.complex128]
    seq: VerblunskySeq
    alphas: NDArray[np.complex128]
    rhos: NDArray[np.float64]

    def entry(self, i: int, j: int) -> complex:
        k = j - i + 2
        if 0 <= k < 5 and 0 <= i < self.dim and 0 <= j < self.dim:
            return complex(self.band[i, k])
        return 0j

    def dense(self) -> NDArray[np.complex128]:
        n = self.dim
        out = np.zeros((n, n), dtype=np.complex128)
        for k in range(5):
            off = k - 2
            i = np.arange(max(0, -off), min(n, n - off))
            out[i, i + off] = self.band[i, k]
        return out


def _theta(a: complex, r: float) -> NDArray[np.complex128]:
    return np.array([[np.conj(a), r], [r, -a]], dtype=np.complex128)


def build_cmv(seq: VerblunskySeq, n: int) -> CMVOperator:
    """Build the n x n truncation (``n`` even, ``n >= 4``)."""
    if n < 4:
        raise SizeTooSmall(f"CMV truncation needs n >= 4, got {n}")
    if n % 2:
        raise SizeTooSmall(f"CMV truncation size must be even, got {n}")
    m = n + 2
    alphas = seq.alphas(m)
    if np.any(np.abs(alphas) >= 1):
        raise BadModulus("Verblunsky coefficient with modulus >= 1")
    rhos = np.sqrt(1.0 - np.abs(alphas) ** 2)
    # Banded product L M on an oversized square, then cut.
    lm = np.zeros((m, m), dtype=np.complex128)
    mm = np.zeros((m, m), dtype=np.complex128)
    mm[0, 0] = 1.0
    for j in range(0, m - 1, 2):
        lm[j : j + 2, j : j + 2] = _theta(alphas[j], rhos[j])
    for j in range(1, m - 1, 2):
        mm[j : j + 2, j : j + 2] = _theta(alphas[j], rhos[j])
    mm[m - 1, m - 1] = 1.0
    full = (lm @ mm)[:n, :n]
    band = np.zeros((n, 5), dtype=np.complex128)
    for k in range(5):
        off = k - 2
        i = np.arange(max(0, -off), min(n, n - off))
        band[i, k] = full[i, i + off]
    band.setflags(write=False)
    a_view = alphas[:n].copy()
    r_view = rhos[:n].copy()
    a_view.setflags(write=False)
    r_view.setflags(write=False)
    return CMVOperator(dim=n, band=band, seq=seq, alphas=a_view, rhos=r_view)


def cmv_apply(C: CMVOperator, v) -> NDArray[np.complex128]:
    """Banded product ``C @ v``; ``v`` may carry extra trailing axes."""
    v = np.asarray(v, dtype=np.complex128)
    n = C.dim
    if v.shape[0] != n:
        raise LengthMismatch(f"vector length {v.shape[0]} != operator dim {n}")
    out = np.zeros_like(v)
    extra = (slice(None),) + (None,) * (v.ndim - 1)
    for k in range(5):
        off = k - 2
        lo, hi = max(0, -off), min(n, n - off)
        out[lo:hi] += C.band[lo:hi, k][extra] * v[lo + off : hi + off]
    return out


def cmv_power_entry(C: CMVOperator, t: int, l: int, m: int) -> complex:
    """Entry ``(C^t)[l, m]`` of the untruncated operator.

    Requires ``2 t + max(l, m) + 2 < n`` so that no path of length ``t``
    from ``m`` can reach the cut.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if not 2 * t + max(l, m) + 2 < C.dim:
        raise TruncationTooSmall(f"need 2t + max(l, m) + 2 < n; t={t}, l={l}, m={m}, n={C.dim}")
    v = np.zeros(C.dim, dtype=np.complex128)
    v[m] = 1.0
    for _ in range(t):
        v = cmv_apply(C, v)
    return complex(v[l])


def unitarity_residual(C: CMVOperator) -> float:
    cols = C.dense()[:, 2 : C.dim - 2]
    if cols.shape[1] == 0:
        return 0.0
    gram = cols.conj().T @ cols
    norms = np.sqrt(np.abs(np.diag(gram)))
    off = gram - np.diag(np.diag(gram))
    return float(np.abs(norms - 1).max() + (np.abs(off).max() if off.size else 0.0))
