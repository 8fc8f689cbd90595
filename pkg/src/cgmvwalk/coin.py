"""
Quantum coin algebra for quarter-plane walks.

A coin is stored exactly as the 4x4 matrix is written down, rows and
columns ordered (R, L, U, D).  Row ``i`` lists the amplitudes produced by
an incoming direction ``i``: the entry in row ``R`` and column ``L`` is the
weight ``c_LR`` with which ``|R>`` feeds ``|L>``.  In other words
``entries[i, j] == c_ji`` and one coin step acting on a direction vector
``psi`` is ``psi @ entries``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from .errors import (
    AOutOfRange,
    BOutOfRange,
    ModulusOutOfRange,
    NotPaperClass,
    NotUnitary,
    SizeTooSmall,
    Unrealizable,
    ZeroDiagonal,
)

__all__ = [
    "DIRECTIONS",
    "R",
    "L",
    "U",
    "D",
    "WalkType",
    "CoinDerived",
    "QuantumCoin",
    "PhasePlan",
    "validate_coin",
    "canonical_coin",
    "identity_coin",
    "grover_coin",
    "random_paper_class_coin",
    "coin_for_a",
    "coin_for_b",
    "off_diagonal_sum",
    "verblunsky_a",
    "verblunsky_b",
    "lambda_diag",
    "phase_matrix_D",
    "coin_to_json",
    "coin_from_json",
    "load_coin",
]

DIRECTIONS = ("R", "L", "U", "D")
R, L, U, D = range(4)

UNITARY_TOL = 1e-12
PAPER_CLASS_TOL = 1e-10


class WalkType(str, enum.Enum):
    I = "I"
    II = "II"

    @classmethod
    def parse(cls, value) -> "WalkType":
        if isinstance(value, WalkType):
            return value
        text = str(value).strip().upper()
        if text in ("I", "1", "TYPEI", "TYPE_I"):
            return cls.I
        if text in ("II", "2", "TYPEII", "TYPE_II"):
            return cls.II
        raise ValueError(f"unknown walk type {value!r}")


@dataclass(frozen=True)
class CoinDerived:
    """Phases and invariants read off a coin.

    Attributes
    ----------
    sigma : ndarray of shape (4,)
        ``arg(c_ii)`` for i in (R, L, U, D).
    rho_diag : ndarray of shape (4,)
        ``|c_ii|``.
    delta : complex
        The determinant.
    theta : float
        ``((sigma_R + sigma_U) - (sigma_L + sigma_D)) / 2``.
    """

    sigma: NDArray[np.float64]
    rho_diag: NDArray[np.float64]
    delta: complex
    theta: float

    @property
    def sigma_ru(self) -> float:
        return float(self.sigma[R] + self.sigma[U])

    @property
    def sigma_ld(self) -> float:
        return float(self.sigma[L] + self.sigma[D])

    def psi(self, gamma=(0.0, 0.0)) -> float:
        """Phase ``(sigma_R + sigma_U) - (gamma_1 + gamma_2)``."""
        return self.sigma_ru - (gamma[0] + gamma[1])

    def phi(self) -> float:
        """Half phase imbalance; identical to ``theta``."""
        return self.theta

    @property
    def delta_phase_residual(self) -> float:
        """``|det U - exp(i * sum(sigma))|``; zero only for special coins."""
        return float(abs(self.delta - np.exp(1j * self.sigma.sum())))


@dataclass(frozen=True)
class QuantumCoin:
    entries: NDArray[np.complex128]
    derived: CoinDerived
    paper_class: bool
    canonical: bool = False
    paper_class_residual: float = field(default=0.0, compare=False)

    def c(self, i: str, j: str) -> complex:
        """Weight ``c_ij`` (from direction ``j`` into direction ``i``)."""
        return complex(self.entries[DIRECTIONS.index(j), DIRECTIONS.index(i)])

    @property
    def transfer(self) -> NDArray[np.complex128]:
        """Matrix ``T`` with ``T[out, in]`` the amplitude from ``in`` to ``out``."""
        return self.entries.T


def validate_coin(entries, canonical: bool = False) -> QuantumCoin:
    """Check unitarity and compute the derived phases.

    Parameters
    ----------
    entries : array_like, shape (4, 4)
        Coin matrix in the written layout.
    canonical : bool
        Tag the coin as a member of the canonical family ``C(alpha)``.

    Returns
    -------
    QuantumCoin

    Raises
    ------
    NotUnitary
        If ``max |U^H U - I| > 1e-12`` or an entry is not finite.
    ZeroDiagonal
        If some diagonal entry vanishes.
    """
    u = np.array(entries, dtype=np.complex128)
    if u.shape != (4, 4):
        raise ValueError(f"coin must be 4x4, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise NotUnitary("coin has non-finite entries")
    resid = np.abs(u.conj().T @ u - np.eye(4)).max()
    if resid > UNITARY_TOL:
        raise NotUnitary(f"coin unitarity residual {resid:.3e} > {UNITARY_TOL:g}")
    diag = np.diag(u)
    if np.any(np.abs(diag) == 0.0):
        raise ZeroDiagonal("a diagonal entry is zero, its phase is undefined")
    sigma = np.angle(diag)
    delta = complex(np.linalg.det(u))
    theta = 0.5 * ((sigma[R] + sigma[U]) - (sigma[L] + sigma[D]))
    off = u - np.diag(diag)
    pc_resid = float(np.abs(off + delta * off.conj().T).max())
    u.setflags(write=False)
    sigma.setflags(write=False)
    rho = np.abs(diag)
    rho.setflags(write=False)
    derived = CoinDerived(sigma=sigma, rho_diag=rho, delta=delta, theta=float(theta))
    return QuantumCoin(
        entries=u,
        derived=derived,
        paper_class=pc_resid <= PAPER_CLASS_TOL,
        canonical=canonical,
        paper_class_residual=pc_resid,
    )


def canonical_coin(alpha: complex) -> QuantumCoin:
    """The coin ``C(alpha)``.

    It equals ``A (x) A`` with ``A = [[rho, -alpha], [conj(alpha), rho]]``,
    which is how unitarity is guaranteed.
    """
    alpha = complex(alpha)
    if not abs(alpha) < 1:
        raise ModulusOutOfRange(f"|alpha| = {abs(alpha):.6g} must be < 1")
    m2 = abs(alpha) ** 2
    p = 1.0 - m2
    s = np.sqrt(p)
    ab = alpha.conjugate()
    entries = np.array(
        [
            [p, -alpha * s, -alpha * s, alpha**2],
            [ab * s, p, -m2, -alpha * s],
            [ab * s, -m2, p, -alpha * s],
            [ab**2, ab * s, ab * s, p],
        ],
        dtype=np.complex128,
    )
    return validate_coin(entries, canonical=True)


def identity_coin() -> QuantumCoin:
    return validate_coin(np.eye(4))


def grover_coin() -> QuantumCoin:
    return validate_coin(0.5 * np.ones((4, 4)) - np.eye(4))


def _hermitian_involution(k: int, rng: np.random.Generator) -> NDArray[np.complex128]:
    z = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    signs = rng.choice([-1.0, 1.0], size=k)
    return (q * signs) @ q.conj().T


def random_paper_class_coin(rng: np.random.Generator | int | None = None) -> QuantumCoin:
    """Draw a unitary coin obeying ``c_ij = -det(U) conj(c_ji)`` for i != j.

    Such coins are ``s * V`` where the Hermitian part of ``V`` is diagonal;
    ``V`` is built as a direct sum of blocks ``cos(l) I + i sin(l) R`` with
    ``R`` a Hermitian involution, and ``s**2 = conj(det V)``.
    """
    rng = np.random.default_rng(rng)
    perm = rng.permutation(4)
    cut = int(rng.integers(1, 5))
    groups = [perm[:cut], perm[cut:]]
    v = np.zeros((4, 4), dtype=np.complex128)
    for g in groups:
        if len(g) == 0:
            continue
        lam = rng.uniform(0.05, np.pi - 0.05)
        block = np.cos(lam) * np.eye(len(g)) + 1j * np.sin(lam) * _hermitian_involution(len(g), rng)
        v[np.ix_(g, g)] = block
    s = np.sqrt(np.conj(np.linalg.det(v)))
    return validate_coin(s * v)


def off_diagonal_sum(coin: QuantumCoin) -> complex:
    u = coin.entries
    return complex(u.sum() - np.trace(u))


def _require_mappable(coin: QuantumCoin) -> None:
    if not (coin.paper_class or coin.canonical):
        raise NotPaperClass(
            "coin violates c_ij = -det(U) conj(c_ji) "
            f"(residual {coin.paper_class_residual:.3e}); no Verblunsky map"
        )


def verblunsky_a(coin: QuantumCoin) -> complex:
    """Type I parameter ``a = conj(sum_{m != n} c_mn) * sqrt(det U)``.

    The principal square root is used.  Canonical coins are accepted even
    though ``C(alpha)`` is not paper-class for ``alpha != 0``.
    """
    _require_mappable(coin)
    a = np.conj(off_diagonal_sum(coin)) * np.sqrt(coin.derived.delta)
    if not abs(a) < 1:
        raise AOutOfRange(f"|a| = {abs(a):.6g} >= 1; the null-odd CMV matrix is undefined")
    return complex(a)


def verblunsky_b(coin: QuantumCoin, gamma=(0.0, 0.0)) -> complex:
    """Type II parameter ``b = conj(sum_{m != n} c_mn) * det U * exp(-i(g1 + g2))``."""
    _require_mappable(coin)
    b = np.conj(off_diagonal_sum(coin)) * coin.derived.delta * np.exp(-1j * (gamma[0] + gamma[1]))
    if not abs(b) < 1:
        raise BOutOfRange(f"|b| = {abs(b):.6g} >= 1; the null-even CMV matrix is undefined")
    return complex(b)


def coin_for_b(b: complex) -> tuple[QuantumCoin, tuple[float, float]]:
    """A paper-class coin and phases ``(g1, g2)`` realising a given ``b``.

    Uses ``V = cos(l) I + i sin(l) (2 P - I)`` with ``P`` the projector on
    the uniform vector, so that the off-diagonal sum is ``6 i sin(l)``.
    """
    b = complex(b)
    if not abs(b) < 1:
        raise BOutOfRange(f"|b| = {abs(b):.6g} >= 1")
    coin = _reflection_family(float(np.arcsin(abs(b) / 6.0)))
    b0 = verblunsky_b(coin)
    g = 0.0 if abs(b) == 0 else float(np.angle(b0) - np.angle(b))
    g = float(np.mod(g, 2 * np.pi))
    return coin, (0.5 * g, 0.5 * g)


def _reflection_family(lam: float) -> QuantumCoin:
    refl = 0.5 * np.ones((4, 4)) - np.eye(4)
    v = np.cos(lam) * np.eye(4) + 1j * np.sin(lam) * refl
    s = np.sqrt(np.conj(np.linalg.det(v)))
    return validate_coin(s * v)


def coin_for_a(a: complex, tol: float = 1e-12) -> QuantumCoin:
    """A paper-class coin with Type I parameter ``a``.

    Every paper-class coin has a purely imaginary ``a``; in the family used
    here ``a = -6 i sin(l)``.

    Raises
    ------
    Unrealizable
        If ``Re a != 0``.
    """
    a = complex(a)
    if not abs(a) < 1:
        raise AOutOfRange(f"|a| = {abs(a):.6g} >= 1")
    if abs(a.real) > tol:
        raise Unrealizable(f"a = {a!r}: paper-class coins only give imaginary a")
    coin = _reflection_family(float(np.arcsin(-a.imag / 6.0)))
    got = verblunsky_a(coin)
    if abs(got - a) > 1e-10:
        raise Unrealizable(f"reflection family gave a = {got!r}, wanted {a!r}")
    return coin


@dataclass(frozen=True)
class PhasePlan:
    kind: WalkType
    size: int
    gamma: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.size < 2:
            raise SizeTooSmall(f"phase plan size {self.size} < 2")
        object.__setattr__(self, "kind", WalkType.parse(self.kind))


def lambda_diag(plan: PhasePlan, derived: CoinDerived, flip_odd: bool = False) -> NDArray[np.complex128]:
    """Diagonal of the phase matrix relating a walk to its CMV matrix.

    Type I: ``l_0 = 1``, ``l_2k = exp(-ik(s_R + s_U))`` and
    ``l_(2k-1) = exp(-ik(s_L + s_D))``.  Type II: ``l_2k =
    exp(-ik((s_L + s_D) - g))`` and ``l_(2k+1) = exp(ik((s_R + s_U) - g))``
    with ``g = g1 + g2``.  ``flip_odd`` negates the exponent of the odd rule.
    """
    n = plan.size
    idx = np.arange(n)
    out = np.ones(n, dtype=np.complex128)
    even = idx % 2 == 0
    odd = ~even
    sgn = 1.0 if flip_odd else -1.0
    if plan.kind is WalkType.I:
        k_even = idx[even] // 2
        k_odd = (idx[odd] + 1) // 2
        out[even] = np.exp(-1j * k_even * derived.sigma_ru)
        out[odd] = np.exp(sgn * 1j * k_odd * derived.sigma_ld)
    else:
        g = plan.gamma[0] + plan.gamma[1]
        k_even = idx[even] // 2
        k_odd = (idx[odd] - 1) // 2
        out[even] = np.exp(-1j * k_even * (derived.sigma_ld - g))
        out[odd] = np.exp(-sgn * 1j * k_odd * (derived.sigma_ru - g))
    out[0] = 1.0
    return out


def phase_matrix_D(theta: float) -> NDArray[np.complex128]:
    return np.diag([np.exp(1j * theta), 1.0, 1.0, np.exp(-1j * theta)]).astype(np.complex128)


def coin_to_json(coin: QuantumCoin) -> str:
    rows = [[[float(z.real), float(z.imag)] for z in row] for row in coin.entries]
    return json.dumps({"entries": rows})


def coin_from_json(text: str) -> QuantumCoin:
    data = json.loads(text)
    rows = data["entries"] if isinstance(data, dict) else data
    arr = np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)
    return validate_coin(arr)


def load_coin(path) -> QuantumCoin:
    return coin_from_json(Path(path).read_text(encoding="utf-8"))
