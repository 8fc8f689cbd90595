"""
Closed-form limit masses and localization predicates.

``nu_I``, ``nu_II`` and ``M(b)`` are the decay rates and origin mass of the
localized part of the Type I and Type II walks.  ``sgn(0) = 0`` and
``0**0 = 1`` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModulusOutOfRange

__all__ = [
    "ZERO_TOL",
    "LimitParamsI",
    "LimitParamsII",
    "nu_I",
    "nu_II",
    "mass_M",
    "theorem1_mass",
    "theorem3_mass",
    "localizes_I",
    "localizes_II",
    "atom_mass_null_odd",
]

ZERO_TOL = 1e-12


def _sgn(x: float) -> float:
    return float(np.sign(x))


def _check(z: complex, name: str) -> complex:
    z = complex(z)
    if not abs(z) < 1:
        raise ModulusOutOfRange(f"|{name}| = {abs(z):.6g} must be < 1")
    return z


def _pow(nu: float, k: int) -> float:
    return 1.0 if k == 0 else float(nu) ** (2 * k)


def nu_I(a: complex) -> float:
    """``sgn(Re a) (sqrt(1 - Im(a)**2) - |Re a|) / rho`` with ``rho = sqrt(1 - |a|**2)``."""
    a = _check(a, "a")
    rho = np.sqrt(1.0 - abs(a) ** 2)
    return float(_sgn(a.real) / rho * (np.sqrt(1.0 - a.imag**2) - abs(a.real)))


def nu_II(b: complex) -> float:
    """``rho / |1 + b|``."""
    b = _check(b, "b")
    return float(np.sqrt(1.0 - abs(b) ** 2) / abs(1.0 + b))


def mass_M(b: complex) -> float:
    """``(1 + sgn(|b|**2 + Re b)) (|b|**2 + Re b) / |1 + b|**2``."""
    b = _check(b, "b")
    s = abs(b) ** 2 + b.real
    return float((1.0 + _sgn(s)) * s / abs(1.0 + b) ** 2) + 0.0


def atom_mass_null_odd(a: complex) -> float:
    """Mass of the single atom of the null-odd measure: ``|Re a| / sqrt(1 - Im(a)**2)``.

    Its square is the prefactor ``Re(a)**2 / (1 - Im(a)**2)`` of the Type I
    limit mass.
    """
    a = _check(a, "a")
    return float(abs(a.real) / np.sqrt(1.0 - a.imag**2))


@dataclass(frozen=True)
class LimitParamsI:
    a: complex
    theta: float = 0.0
    coin_state: tuple = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        _check(self.a, "a")
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "coin_state", tuple(complex(c) for c in self.coin_state))

    @property
    def rho(self) -> float:
        return float(np.sqrt(1.0 - abs(self.a) ** 2))

    @property
    def nu(self) -> float:
        return nu_I(self.a)

    def amplitude(self) -> complex:
        """``alpha e^{i theta} + nu (mu + beta) + zeta nu e^{-i theta}``."""
        al, be, mu, ze = self.coin_state
        nu = self.nu
        return al * np.exp(1j * self.theta) + nu * (mu + be) + ze * nu * np.exp(-1j * self.theta)


@dataclass(frozen=True)
class LimitParamsII:
    b: complex

    def __post_init__(self):
        _check(self.b, "b")
        object.__setattr__(self, "b", complex(self.b))

    @property
    def rho(self) -> float:
        return float(np.sqrt(1.0 - abs(self.b) ** 2))

    @property
    def nu(self) -> float:
        return nu_II(self.b)

    @property
    def mass(self) -> float:
        return mass_M(self.b)


def theorem1_mass(params: LimitParamsI, x: int, y: int) -> float:
    """Limit probability at ``(x, y)`` for the Type I walk; the closed form is evaluated literally."""
    a = params.a
    nu = params.nu
    pref = a.real**2 / (1.0 - a.imag**2)
    return float(pref * abs(params.amplitude()) ** 2 * (1.0 + 2.0 * nu**2) * (_pow(nu, x) + _pow(nu, y)))


def theorem3_mass(params: LimitParamsII, x: int, y: int, t_parity: int | str = 0) -> float:
    """Limit probability at ``(x, y)`` for the Type II walk, evaluated literally.

    ``t_parity`` is 0/"even" or 1/"odd"; the factor ``(1 + (-1)**(x+y+t))/2``
    kills the wrong parity.  The off-origin form applies to every
    ``(x, y) != (0, 0)``.
    """
    if isinstance(t_parity, str):
        t_parity = {"even": 0, "odd": 1}[t_parity]
    if (x + y + t_parity) % 2:
        return 0.0
    m2 = params.mass**2
    if x == 0 and y == 0:
        return float(m2)
    nu = params.nu
    return float(m2 * (1.0 + 1.0 / (2.0 * nu**2)) * (_pow(nu, x) + _pow(nu, y)))


def localizes_I(coin_state, a: complex, theta: float, tol: float = ZERO_TOL) -> bool:
    """Type I localization: ``Re a != 0`` and the coin-state amplitude is nonzero."""
    p = LimitParamsI(a, theta, tuple(coin_state))
    return abs(p.a.real) > tol and abs(p.amplitude()) > tol


def localizes_II(b: complex, tol: float = ZERO_TOL) -> tuple[bool, bool]:
    """Both Type II predicates for ``b = x + i y``.

    Returns
    -------
    (paper_region, mass_criterion)
        ``(x + 1/2)**2 + (y + 1/2)**2 > 1/2`` and ``M(b) > tol``.  They
        disagree on part of the disk; both are reported.
    """
    b = _check(b, "b")
    region = (b.real + 0.5) ** 2 + (b.imag + 0.5) ** 2 > 0.5
    return bool(region), bool(mass_M(b) > tol)
