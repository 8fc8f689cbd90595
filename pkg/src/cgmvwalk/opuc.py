"""
Laurent orthonormal bases on the unit circle.

The first-kind basis is the right-eigenvector family of the CMV matrix,
``C x(z) = z x(z)``, generated two rows at a time.  With all coefficients
zero it reduces to ``1, 1/z, z, 1/z**2, z**2, ...``.  The left family
(``X(z) C = z X(z)``) is the substar ``X_j(z) = conj(x_j(1/conj(z)))``.
Second-kind functions use the negated sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .cmv import CMVOperator, VerblunskySeq
from .errors import BadModulus, ZeroArgument

__all__ = [
    "LaurentPoly",
    "LaurentBasis",
    "laurent_basis",
    "eval_basis",
    "basis_values",
    "eigen_residual",
    "verblunsky_from_moments",
]

FIRST = "first"
SECOND = "second"


@dataclass(frozen=True)
class LaurentPoly:
    """``sum_k coeffs[k - kmin] * z**k``."""

    coeffs: NDArray[np.complex128]
    kmin: int

    @property
    def exponents(self) -> NDArray[np.int64]:
        return np.arange(self.kmin, self.kmin + len(self.coeffs))

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        out = np.zeros(z.shape, dtype=np.complex128)
        for k, c in zip(self.exponents, self.coeffs):
            if c != 0:
                out = out + c * z ** int(k)
        return out[()] if out.ndim == 0 else out

    def as_dict(self) -> dict[int, complex]:
        return {int(k): complex(c) for k, c in zip(self.exponents, self.coeffs) if c != 0}


@dataclass(frozen=True)
class LaurentBasis:
    seq: VerblunskySeq
    coeffs: NDArray[np.complex128]  # (n, 2K + 1), exponent -K .. K
    kind: str = FIRST
    side: str = "right"

    @property
    def K(self) -> int:
        return (self.coeffs.shape[1] - 1) // 2

    def __len__(self) -> int:
        return self.coeffs.shape[0]

    @property
    def polys(self) -> list[LaurentPoly]:
        return [LaurentPoly(row, -self.K) for row in self.coeffs]

    def left(self) -> "LaurentBasis":
        """Substar family, the left eigenvectors ``X C = z X``."""
        side = "left" if self.side == "right" else "right"
        return LaurentBasis(self.seq, self.coeffs[:, ::-1].conj(), self.kind, side)


def _shift(p: NDArray, s: int) -> NDArray:
    out = np.zeros_like(p)
    if s > 0:
        out[..., s:] = p[..., :-s]
    elif s < 0:
        out[..., :s] = p[..., -s:]
    else:
        out[...] = p
    return out


def _recurrence(alphas: NDArray, n: int, x0, times_z, div_z):
    """Solve ``C x = z x`` row pairs for ``x_1 .. x_(n-1)``.

    ``times_z``/``div_z`` implement multiplication/division by ``z`` on the
    representation in use (coefficient arrays or point values).
    """
    rhos = np.sqrt(1.0 - np.abs(alphas) ** 2)
    xs = [x0]
    prev = np.zeros_like(x0)  # x_(2k-1), x_(-1) = 0
    a_prev, r_prev = -1.0 + 0j, 0.0  # alpha_(-1) = -1, rho_(-1) = 0
    k = 0
    while len(xs) < n:
        cur = xs[2 * k]
        a0, a1 = alphas[2 * k], alphas[2 * k + 1]
        r0, r1 = rhos[2 * k], rhos[2 * k + 1]
        p, q = r0 * np.conj(a1), r0 * r1
        r, s = -a0 * np.conj(a1), -a0 * r1
        u = times_z(cur) - r_prev * np.conj(a0) * prev + a_prev * np.conj(a0) * cur
        v = -r_prev * r0 * prev + a_prev * r0 * cur
        x_odd = div_z(s * u - q * v) / q
        x_even = div_z(p * v - r * u + times_z(u)) / q
        xs.append(x_odd)
        if len(xs) < n:
            xs.append(x_even)
        prev = x_odd
        a_prev, r_prev = a1, r1
        k += 1
    return xs[:n]


def laurent_basis(seq: VerblunskySeq, n: int, kind: str = FIRST) -> LaurentBasis:
    """Coefficient tables of the first ``n`` basis functions.

    Parameters
    ----------
    seq : VerblunskySeq
    n : int
        Number of functions (``n >= 1``).
    kind : {"first", "second"}
        ``"second"`` builds the same family from the negated sequence.
    """
    if n < 1:
        raise ValueError("basis size must be >= 1")
    src = seq.negated() if kind == SECOND else seq
    alphas = src.alphas(n + 2)
    if np.any(np.abs(alphas) >= 1):
        raise BadModulus("Verblunsky coefficient with modulus >= 1")
    K = n // 2 + 1
    x0 = np.zeros(2 * K + 1, dtype=np.complex128)
    x0[K] = 1.0
    xs = _recurrence(alphas, n, x0, lambda p: _shift(p, 1), lambda p: _shift(p, -1))
    coeffs = np.array(xs)
    coeffs.setflags(write=False)
    return LaurentBasis(seq, coeffs, kind)


def eval_basis(basis: LaurentBasis, z: complex, count: int | None = None) -> NDArray[np.complex128]:
    """``(x_0(z), ..., x_(count-1)(z))`` from the stored coefficients."""
    if z == 0:
        raise ZeroArgument("Laurent basis is singular at z = 0")
    count = len(basis) if count is None else count
    K = basis.K
    powers = complex(z) ** np.arange(-K, K + 1)
    return basis.coeffs[:count] @ powers


def basis_values(seq: VerblunskySeq, z, count: int, kind: str = FIRST) -> NDArray[np.complex128]:
    """Point values by running the recurrence numerically.

    ``z`` may be an array; the result has shape ``(count,) + z.shape``.
    """
    z = np.asarray(z, dtype=np.complex128)
    if np.any(z == 0):
        raise ZeroArgument("Laurent basis is singular at z = 0")
    src = seq.negated() if kind == SECOND else seq
    alphas = src.alphas(count + 2)
    with np.errstate(over="ignore", invalid="ignore"):
        xs = _recurrence(alphas, count, np.ones_like(z), lambda p: z * p, lambda p: p / z)
    return np.array(xs)


def eigen_residual(C: CMVOperator, basis: LaurentBasis, z: complex, rows: int) -> float:
    """Max deviation from the eigen-relation over the first ``rows`` equations.

    Right bases are checked against ``C x = z x`` (rows of ``C``), left
    bases against ``X C = z X`` (columns of ``C``).
    """
    m = min(len(basis), C.dim)
    if not rows + 2 < m:
        raise ValueError(f"need rows + 2 < basis length, got rows={rows}, length={m}")
    x = eval_basis(basis, z, m)
    dense = C.dense()[:m, :m]
    if basis.side == "right":
        lhs = dense[:rows] @ x
    else:
        lhs = x @ dense[:, :rows]
    return float(np.abs(lhs - z * x[:rows]).max())


def verblunsky_from_moments(moments, count: int | None = None) -> NDArray[np.complex128]:
    """Recover ``alpha_0 .. alpha_(count-1)`` from ``c_k = int z**k dmu``.

    Runs the Szego recursion ``Phi_(n+1) = z Phi_n - conj(alpha_n) Phi_n^*``
    with ``conj(alpha_n) = int z Phi_n dmu / int Phi_n^* dmu``.  Needs
    ``count + 1`` moments starting at ``k = 0``.
    """
    c = np.asarray(moments, dtype=np.complex128)
    count = len(c) - 1 if count is None else count
    if len(c) < count + 1:
        raise ValueError("need count + 1 moments")
    phi = np.array([1.0 + 0j])
    out = np.zeros(count, dtype=np.complex128)
    for n in range(count):
        num = phi @ c[1 : n + 2]
        star = phi[::-1].conj()
        den = star @ c[: n + 1]
        abar = num / den
        out[n] = np.conj(abar)
        new = np.zeros(n + 2, dtype=np.complex128)
        new[1:] = phi
        new[: n + 1] -= abar * star
        phi = new
    return out
