"""
Cross-layer checks: spectrum vs. simulation vs. closed-form predicates.

Two dynamical witnesses are computed for every parameter.  The
quarter-plane walk is simulated with a coin realising the parameter (when
one exists); the CMV matrix itself is run as a walk on the half-line,
sites being the index pairs ``(2k, 2k + 1)``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .cmv import VerblunskySeq
from .coin import WalkType, coin_for_a, coin_for_b
from .errors import Unrealizable
from .limits import localizes_I, localizes_II, mass_M, nu_I, nu_II
from .spectral import RadialLimitConfig, point_masses, spectral_measure
from .walk import cmv_walk, initial_state, step

__all__ = [
    "RETURN_THRESHOLD",
    "NEAR_THRESHOLD",
    "GRID_VALUES",
    "LocalizationPoint",
    "margin",
    "localization_point",
    "quarter_plane_profile",
    "half_line_profile",
    "compare_report",
]

RETURN_THRESHOLD = 0.05
# |margin| below this is too close to the localization boundary for a
# T = 256 run to separate atoms from the continuum at the fixed threshold
NEAR_THRESHOLD = 0.1
GRID_VALUES = (-0.56, -0.28, 0.0, 0.28, 0.56)
TAIL = (192, 256)


def margin(kind, p: complex) -> float:
    """Signed distance-like quantity whose sign decides localization."""
    kind = WalkType.parse(kind)
    p = complex(p)
    return p.real if kind is WalkType.I else abs(p) ** 2 + p.real


def _seq(kind, p):
    return VerblunskySeq.null_odd(p) if WalkType.parse(kind) is WalkType.I else VerblunskySeq.null_even(p)


def half_line_profile(kind, p: complex, sites: int = 4, T: int = TAIL[1], t0: int = TAIL[0]) -> np.ndarray:
    """Site probabilities of the half-line CMV walk averaged over ``t0 <= t < T``."""
    probs = cmv_walk(_seq(kind, p), T)[t0:]
    return (probs[:, 0 : 2 * sites : 2] + probs[:, 1 : 2 * sites : 2]).mean(axis=0)


def _realize(kind, p):
    kind = WalkType.parse(kind)
    if kind is WalkType.I:
        return coin_for_a(p), (0.0, 0.0), (1.0, 0.0, 0.0, 0.0)
    coin, gamma = coin_for_b(p)
    return coin, gamma, (0.0, 0.0)


def quarter_plane_profile(kind, p: complex, sites: int = 4, T: int = TAIL[1], t0: int = TAIL[0]) -> np.ndarray:
    """Diagonal probabilities ``P_t(k, k)`` averaged over ``t0 <= t < T``.

    Raises
    ------
    Unrealizable
        If no coin in the supported family gives the parameter.
    """
    coin, gamma, cs = _realize(kind, p)
    st = initial_state(kind, cs, T + 4)
    acc = np.zeros(sites)
    k = np.arange(sites)
    for t in range(T):
        if t >= t0:
            acc += np.sum(np.abs(st.amplitudes[k, k]) ** 2, axis=1)
        if t + 1 < T:
            st = step(st, coin, gamma)
    return acc / (T - t0)


@dataclass(frozen=True)
class LocalizationPoint:
    kind: str
    re: float
    im: float
    margin: float
    atoms: int
    atom_mass: float
    predicate: bool
    paper_region: bool | None
    half_line_return: float
    quarter_return: float | None
    realizable: bool

    @property
    def near_threshold(self) -> bool:
        return 0.0 < abs(self.margin) < NEAR_THRESHOLD

    @property
    def disputed(self) -> bool:
        return self.paper_region is not None and self.paper_region != self.predicate

    def verdicts(self, walk: str = "half-line") -> tuple[bool, bool | None, bool]:
        ret = self.half_line_return if walk == "half-line" else self.quarter_return
        sim = None if ret is None else ret > RETURN_THRESHOLD
        return self.atoms > 0, sim, self.predicate

    def unanimous(self, walk: str = "half-line") -> bool:
        a, s, p = self.verdicts(walk)
        return s is not None and a == s == p

    def as_dict(self) -> dict:
        d = asdict(self)
        d["near_threshold"] = self.near_threshold
        d["disputed"] = self.disputed
        return d


def localization_point(kind, p: complex, cfg: RadialLimitConfig | None = None, quarter: bool = True) -> LocalizationPoint:
    """Atoms, both return witnesses and the predicate at one parameter."""
    kind = WalkType.parse(kind)
    p = complex(p)
    atoms = point_masses(_seq(kind, p), cfg)
    half = half_line_profile(kind, p, sites=1)[0]
    quarter_ret = None
    realizable = True
    if quarter:
        try:
            quarter_ret = float(quarter_plane_profile(kind, p, sites=1)[0])
        except Unrealizable:
            realizable = False
    if kind is WalkType.I:
        pred = localizes_I((1.0, 0.0, 0.0, 0.0), p, 0.0)
        region = None
    else:
        region, pred = localizes_II(p)
    return LocalizationPoint(
        kind=kind.value,
        re=p.real,
        im=p.imag,
        margin=margin(kind, p),
        atoms=len(atoms),
        atom_mass=float(sum(m for _, m in atoms)),
        predicate=bool(pred),
        paper_region=region,
        half_line_return=float(half),
        quarter_return=quarter_ret,
        realizable=realizable,
    )


def _ratios(profile):
    if profile is None or profile[0] <= 0:
        return None
    return [float(v) for v in profile / profile[0]]


def compare_report(kind, p: complex, sites: int = 4, cfg: RadialLimitConfig | None = None) -> dict:
    """Spectrum, closed forms and both simulations for one parameter."""
    kind = WalkType.parse(kind)
    p = complex(p)
    seq = _seq(kind, p)
    measure = spectral_measure(seq, 2048, cfg)
    nu = nu_I(p) if kind is WalkType.I else nu_II(p)
    half = half_line_profile(kind, p, sites)
    try:
        quarter = quarter_plane_profile(kind, p, sites)
        reason = None
    except Unrealizable as exc:
        quarter, reason = None, str(exc)
    if kind is WalkType.I:
        predicates = {"localizes_I": localizes_I((1.0, 0.0, 0.0, 0.0), p, 0.0)}
        predicate = predicates["localizes_I"]
    else:
        region, crit = localizes_II(p)
        predicates = {"paper_region": region, "mass_criterion": crit, "disagree": region != crit, "M": mass_M(p)}
        predicate = crit
    sim_half = bool(half[0] > RETURN_THRESHOLD)
    sim_quarter = None if quarter is None else bool(quarter[0] > RETURN_THRESHOLD)
    return {
        "type": kind.value,
        "parameter": [p.real, p.imag],
        "sequence": seq.describe(),
        "spectrum": {
            "atoms": [[t, m] for t, m in measure.atoms],
            "atom_total": float(sum(m for _, m in measure.atoms)),
            "total": measure.total,
        },
        "limits": {
            "nu": nu,
            "nu_power_2k": [float(nu ** (2 * k)) for k in range(sites)],
            "predicates": predicates,
        },
        "half_line": {
            "tail_return": float(half[0]),
            "profile": [float(v) for v in half],
            "decay_ratios": _ratios(half),
        },
        "quarter_plane": {
            "realizable": quarter is not None,
            "reason": reason,
            "tail_return": None if quarter is None else float(quarter[0]),
            "profile": None if quarter is None else [float(v) for v in quarter],
            "decay_ratios": _ratios(quarter),
        },
        "verdicts": {
            "atoms": bool(measure.atoms),
            "predicate": bool(predicate),
            "half_line": sim_half,
            "quarter_plane": sim_quarter,
            "half_line_agrees": sim_half == bool(measure.atoms) == bool(predicate),
            "quarter_plane_agrees": None if sim_quarter is None else sim_quarter == bool(measure.atoms) == bool(predicate),
        },
        "threshold": RETURN_THRESHOLD,
        "window": list(TAIL),
    }
