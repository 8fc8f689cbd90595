"""
Spectral measures from Caratheodory functions.

``F(z) = (1 + z f(z)) / (1 - z f(z))`` where ``f`` is the Schur function of
the Verblunsky sequence.  Period-2 rules have closed forms for ``f``;
explicit sequences (zero after the listed values) are handled by the exact
backward Schur recursion.  The ratio of second- to first-kind basis values
gives an independent evaluation used as a cross-check.

Radial limits use geometric radii ``r_k = 1 - 2**-k`` and Richardson
extrapolation: ``Re F(r e^{it}) -> w(t)`` and ``(1 - r) F / 2 -> m0``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import IntegrationWarning, quad
from scipy.optimize import minimize_scalar

from .cmv import VerblunskySeq
from .errors import InsideDiskViolation, NoConvergence
from .opuc import SECOND, LaurentBasis, basis_values

__all__ = [
    "RadialLimitConfig",
    "SpectralMeasure",
    "schur_function",
    "caratheodory",
    "caratheodory_ratio",
    "richardson",
    "ac_weight",
    "point_masses",
    "spectral_measure",
    "measure_moment",
    "gram_matrix",
]


@dataclass(frozen=True)
class RadialLimitConfig:
    """Radii ``1 - 2**-k`` for ``k = kmin .. kmax`` and detection knobs.

    Parameters
    ----------
    order : int
        Richardson levels (1 is the classic two-point ``2 m(h/2) - m(h)``).
    tau_atom : float
        Atoms lighter than this are discarded.
    gate : float
        Relative change allowed between the last two extrapolants of an
        atom mass.  Square-root resonances at band edges fail it.
    scan_r, scan_grid : float, int
        Radius and grid for the coarse divergence scan.
    """

    kmin: int = 4
    kmax: int = 14
    order: int = 1
    tau_atom: float = 1e-6
    gate: float = 1e-3
    scan_r: float = 0.999
    scan_grid: int = 4096
    zero_tol: float = 1e-8

    def __post_init__(self):
        if not 1 <= self.kmin < self.kmax:
            raise ValueError("need 1 <= kmin < kmax")
        if not 1 <= self.order < self.kmax - self.kmin + 1:
            raise ValueError("extrapolation order must be below the number of radii")
        if not 0 < self.scan_r < 1:
            raise ValueError("scan radius must lie in (0, 1)")

    @property
    def steps(self) -> NDArray[np.float64]:
        return 2.0 ** -np.arange(self.kmin, self.kmax + 1)

    @property
    def radii(self) -> NDArray[np.float64]:
        return 1.0 - self.steps


@dataclass(frozen=True)
class SpectralMeasure:
    theta: NDArray[np.float64]
    weight: NDArray[np.float64]
    atoms: tuple[tuple[float, float], ...]
    excluded: NDArray[np.bool_] = field(repr=False)
    seq: VerblunskySeq | None = None

    @property
    def grid(self) -> int:
        return len(self.theta)

    @property
    def ac_mass(self) -> float:
        return float(self.weight.mean())

    @property
    def total(self) -> float:
        return self.ac_mass + sum(m for _, m in self.atoms)

    def to_dict(self) -> dict:
        return {
            "weight": [[float(t), float(w)] for t, w in zip(self.theta, self.weight)],
            "atoms": [[float(t), float(m)] for t, m in self.atoms],
            "total": self.total,
        }


# -- Schur and Caratheodory functions ---------------------------------------


def _g_const(alpha: complex, w):
    """Schur function of the constant sequence, at ``w``.

    Root of ``conj(a) w g**2 + (1 - w) g - a = 0`` inside the closed disk,
    written as ``2a / (B + s sqrt(disc))`` with the sign making the
    denominator largest (stable as ``a -> 0`` and ``w -> 0``).
    """
    w = np.asarray(w, dtype=np.complex128)
    if alpha == 0:
        return np.zeros_like(w)
    B = 1.0 - w
    root = np.sqrt(B * B + 4.0 * abs(alpha) ** 2 * w)
    plus, minus = B + root, B - root
    den = np.where(np.abs(plus) >= np.abs(minus), plus, minus)
    return 2.0 * alpha / den


def _schur_explicit(alphas, z):
    f = np.zeros_like(z)
    for a in alphas[::-1]:
        zf = z * f
        f = (a + zf) / (1.0 + np.conj(a) * zf)
    return f


def _schur(seq: VerblunskySeq, z):
    if seq.rule == "const":
        return _g_const(seq.value, z)
    if seq.rule == "null-odd":
        return _g_const(seq.value, z * z)
    if seq.rule == "null-even":
        return z * _g_const(seq.value, z * z)
    if seq.rule == "explicit":
        return _schur_explicit(np.asarray(seq.values, dtype=np.complex128), z)
    phase = np.exp(1j * seq.w)
    return phase * _schur(seq.base, phase * z)


def _check_disk(z):
    z = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(z) >= 1):
        raise InsideDiskViolation("evaluation point must satisfy |z| < 1")
    return z


def schur_function(seq: VerblunskySeq, z):
    """Schur function ``f`` with ``f(0) = alpha_0``; ``z`` scalar or array."""
    z = _check_disk(z)
    out = _schur(seq, z)
    return out[()] if out.ndim == 0 else out


def caratheodory(seq: VerblunskySeq, z, depth: int | None = None, method: str = "closed"):
    """Caratheodory function ``F(z)`` of the measure of ``seq``.

    Parameters
    ----------
    method : {"closed", "ratio"}
        ``"closed"`` uses the Schur function; ``"ratio"`` the basis-value
        ratio (see :func:`caratheodory_ratio`), scalar ``z`` only.

    Raises
    ------
    InsideDiskViolation
        If ``|z| >= 1``.
    """
    if method == "ratio":
        return caratheodory_ratio(seq, z, depth)
    z = _check_disk(z)
    zf = z * _schur(seq, z)
    out = (1.0 + zf) / (1.0 - zf)
    return out[()] if out.ndim == 0 else out


def caratheodory_ratio(seq: VerblunskySeq, z: complex, depth: int | None = None, tol: float = 1e-10) -> complex:
    """``F(z)`` as the ratio of second- to first-kind values at an odd index.

    With ``depth`` given the ratio is taken there and must agree with the
    one at ``depth - 2``; otherwise the depth grows until it does.

    Raises
    ------
    NoConvergence
        If consecutive ratios still differ by more than ``tol``, or if
        ``|z|`` is so small (below about ``1e-100``) that the basis values
        overflow before two odd-index ratios exist.
    """
    z = complex(z)
    if abs(z) >= 1:
        raise InsideDiskViolation("evaluation point must satisfy |z| < 1")
    if z == 0:
        return 1.0 + 0j
    # values grow like |z|**(-j/2); stay well inside double range
    cap = 4001 if abs(z) < 1e-300 else int(min(4001, 2 * 250 * math.log(10) / max(-math.log(abs(z)), 1e-12)))
    if cap < 5:
        raise NoConvergence(f"|z| = {abs(z):.3g} is too small for the ratio method")
    if depth is not None:
        depth = depth if depth % 2 else depth + 1
        if depth < 3:
            raise ValueError("depth must be >= 3")
        cap = depth
    count = cap + 1
    first = basis_values(seq, z, count)
    second = basis_values(seq, z, count, kind=SECOND)
    odd = np.arange(1, count, 2)
    with np.errstate(all="ignore"):
        ratios = second[odd] / first[odd]
        diffs = np.abs(np.diff(ratios))
    diffs[~np.isfinite(diffs)] = np.inf
    if depth is not None:
        if not diffs[-1] < tol:
            raise NoConvergence(f"ratio changed by {diffs[-1]:.3g} between depths {depth - 2} and {depth}")
        return complex(ratios[-1])
    ok = np.nonzero(diffs < tol)[0]
    if len(ok) == 0:
        raise NoConvergence(f"ratio did not settle within depth {cap}")
    return complex(ratios[ok[0] + 1])


# -- radial limits ----------------------------------------------------------


def richardson(values, order: int = 1) -> NDArray[np.float64]:
    """Richardson table for samples at step sizes halving each time.

    Returns the column of ``order``-fold extrapolants (errors ``O(h)``,
    ``O(h**2)``, ... eliminated in turn).
    """
    col = np.asarray(values)
    for j in range(1, order + 1):
        col = (2.0**j * col[1:] - col[:-1]) / (2.0**j - 1.0)
    return col


def _re_f_radial(seq, theta, cfg):
    theta = np.asarray(theta, dtype=np.float64)
    r = cfg.radii.reshape((-1,) + (1,) * theta.ndim)
    return caratheodory(seq, r * np.exp(1j * theta)).real


def _weights_from_samples(samples, cfg):
    """Extrapolated weights; samples have the radius on axis 0."""
    h = cfg.steps.reshape((-1,) + (1,) * (samples.ndim - 1))
    # an atom keeps (1 - r) Re F / 2 flat; square-root edges let it decay
    scaled = h[-2:] / 2 * samples[-2:]
    divergent = (scaled[1] > cfg.tau_atom * 1e3) & (scaled[1] > 0.9 * scaled[0])
    w = richardson(samples, cfg.order)[-1]
    w = np.where(w < 0, 0.0, w)
    w = np.where(np.abs(w) < cfg.zero_tol, 0.0, w)
    return w, divergent


def ac_weight(seq: VerblunskySeq, theta: float, cfg: RadialLimitConfig | None = None) -> float:
    """Radial limit of ``Re F(r e^{i theta})``.

    Negative extrapolants (overshoot next to band edges) are clipped to 0.

    Raises
    ------
    NoConvergence
        If ``(1 - r) Re F / 2`` stays large at the innermost radius, i.e.
        ``theta`` sits on an atom and the limit diverges.
    """
    cfg = cfg or RadialLimitConfig()
    w, divergent = _weights_from_samples(_re_f_radial(seq, theta, cfg), cfg)
    if bool(divergent):
        raise NoConvergence(f"Re F diverges radially at theta={theta:.17g}")
    return float(w)


def _locate_peak(seq, theta, width):
    """Angle of the peak of ``|F|`` near ``theta``, tightened radially."""
    h = max(width, 1e-3)
    while h > 1e-9:
        r = 1.0 - h
        # search the offset, not the angle: the bounded method adds a
        # tolerance relative to |x|, too coarse near theta = +-pi
        res = minimize_scalar(
            lambda u, c=theta: -abs(caratheodory(seq, r * np.exp(1j * (c + u)))),
            bounds=(-4 * h, 4 * h),
            method="bounded",
            options={"xatol": h * 1e-3},
        )
        theta = theta + float(res.x)
        h /= 4
    return theta


def _wrap(theta):
    return (theta + np.pi) % (2 * np.pi) - np.pi


def point_masses(seq: VerblunskySeq, cfg: RadialLimitConfig | None = None) -> list[tuple[float, float]]:
    """Atoms ``(theta0, m0)`` of the measure, sorted by angle.

    Every local maximum of ``|F|`` on a scan circle is localized by nested
    bounded searches at radii approaching 1; the masses
    ``(1 - r_k) Re F(r_k e^{i theta0}) / 2`` are then extrapolated.
    Candidates whose extrapolants keep drifting (band-edge resonances)
    or weigh less than ``tau_atom`` are dropped.
    """
    cfg = cfg or RadialLimitConfig()
    g = cfg.scan_grid
    grid = -np.pi + 2 * np.pi * np.arange(g) / g
    mag = np.abs(caratheodory(seq, cfg.scan_r * np.exp(1j * grid)))
    peaks = np.nonzero((mag > np.roll(mag, 1)) & (mag >= np.roll(mag, -1)))[0]
    spacing = 2 * np.pi / g
    floor = 2 * cfg.tau_atom / (1 - cfg.scan_r)
    found: list[tuple[float, float]] = []
    for i in peaks:
        if mag[i] < floor:
            continue
        t0 = float(_wrap(_locate_peak(seq, grid[i], max(spacing, 1 - cfg.scan_r))))
        z = cfg.radii * np.exp(1j * t0)
        masses = cfg.steps / 2 * caratheodory(seq, z).real
        ext = richardson(masses, cfg.order)
        m0 = float(ext[-1])
        if not m0 > cfg.tau_atom:
            continue
        if abs(ext[-1] - ext[-2]) > cfg.gate * abs(ext[-1]):
            continue
        if any(abs(_wrap(t0 - t)) < 1e-6 for t, _ in found):
            continue
        found.append((t0, m0))
    return sorted(found)


def _atom_poisson(atoms, z):
    """``Re`` of the atoms' share of ``F`` at the points ``z``."""
    out = np.zeros(np.shape(z))
    for t0, m0 in atoms:
        zeta = np.exp(1j * t0)
        out = out + m0 * ((zeta + z) / (zeta - z)).real
    return out


def _boundary_weight(seq, atoms, theta, eps=1e-12):
    """``Re F`` just inside the circle with the atoms removed."""
    z = (1.0 - eps) * np.exp(1j * np.asarray(theta))
    return caratheodory(seq, z).real - _atom_poisson(atoms, z)


def spectral_measure(
    seq: VerblunskySeq,
    G: int = 2048,
    cfg: RadialLimitConfig | None = None,
    cell_tol: float = 1e-2,
) -> SpectralMeasure:
    """Weight on a uniform ``G``-point grid over ``[-pi, pi)`` plus atoms.

    The detected atoms' exact Poisson terms are subtracted before the radial
    extrapolation, so no atom leaks into neighbouring grid points.  Points
    within ``2 pi / G`` of an atom are excluded (weight 0); the atom enters
    as a Dirac term.  Cells where the sampled weight bends sharply (band
    edges, where it may behave like ``|theta - theta_e|**-1/2``) carry the
    adaptive-quadrature cell average instead of the point value, which
    keeps the trapezoid sum accurate there.

    Parameters
    ----------
    cell_tol : float
        Second-difference threshold, relative to the mean weight, that marks
        a cell as irregular.
    """
    if G < 8:
        raise ValueError("grid too small")
    cfg = cfg or RadialLimitConfig()
    theta = -np.pi + 2 * np.pi * np.arange(G) / G
    atoms = point_masses(seq, cfg)
    excluded = np.zeros(G, dtype=bool)
    for t0, _ in atoms:
        excluded |= np.abs(_wrap(theta - t0)) <= 2 * np.pi / G * (1 + 1e-9)
    z = cfg.radii[:, None] * np.exp(1j * theta)[None, :]
    samples = caratheodory(seq, z).real - _atom_poisson(atoms, z)
    w, divergent = _weights_from_samples(samples, cfg)
    bad = divergent & ~excluded
    if np.any(bad):
        raise NoConvergence(f"radial limit diverges at theta={theta[bad][0]:.17g} with no atom detected there")
    w = np.where(excluded, 0.0, w)

    scale = max(float(w.mean()), 1e-12)
    bend = np.abs(np.roll(w, 1) - 2 * w + np.roll(w, -1)) > cell_tol * scale
    irregular = bend | np.roll(bend, 1) | np.roll(bend, -1)
    irregular &= ~excluded
    half = np.pi / G
    with warnings.catch_warnings():
        # inverse-square-root edges make quad complain; the cell mass is fine
        warnings.simplefilter("ignore", IntegrationWarning)
        for j in np.nonzero(irregular)[0]:
            val, _ = quad(
                lambda t: float(_boundary_weight(seq, atoms, t)),
                theta[j] - half,
                theta[j] + half,
                limit=200,
                epsabs=1e-13,
            )
            w[j] = max(val / (2 * half), 0.0)

    w.setflags(write=False)
    excluded.setflags(write=False)
    theta.setflags(write=False)
    return SpectralMeasure(theta, w, tuple(atoms), excluded, seq)


def _basis_on(basis: LaurentBasis, z, count: int) -> NDArray[np.complex128]:
    K = basis.K
    powers = np.asarray(z)[None, :] ** np.arange(-K, K + 1)[:, None]
    return basis.coeffs[:count] @ powers


def measure_moment(measure: SpectralMeasure, basis: LaurentBasis, t: int, l: int, m: int) -> complex:
    """``int z**t x_l(z) conj(x_m(z)) dmu(z)`` by trapezoid plus atoms."""
    if measure.grid < 512:
        raise ValueError("moment quadrature needs G >= 512")
    count = max(l, m) + 1
    z = np.exp(1j * measure.theta)
    vals = _basis_on(basis, z, count)
    ac = np.mean(measure.weight * z**t * vals[l] * np.conj(vals[m]))
    if measure.atoms:
        za = np.exp(1j * np.array([a for a, _ in measure.atoms]))
        ma = np.array([m0 for _, m0 in measure.atoms])
        va = _basis_on(basis, za, count)
        ac += np.sum(ma * za**t * va[l] * np.conj(va[m]))
    return complex(ac)


def gram_matrix(measure: SpectralMeasure, basis: LaurentBasis, count: int) -> NDArray[np.complex128]:
    """``int x_i conj(x_j) dmu`` for ``i, j < count``."""
    z = np.exp(1j * measure.theta)
    vals = _basis_on(basis, z, count)
    out = (vals * measure.weight) @ vals.conj().T / measure.grid
    if measure.atoms:
        za = np.exp(1j * np.array([a for a, _ in measure.atoms]))
        ma = np.array([m0 for _, m0 in measure.atoms])
        va = _basis_on(basis, za, count)
        out += (va * ma) @ va.conj().T
    return out
