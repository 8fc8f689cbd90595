"""
Quarter-plane quantum walks of Type I and Type II.

States are arrays of shape ``(X, X, 4)`` indexed ``[x, y, direction]`` with
directions ordered (R, L, U, D).  One step applies the coin at every site,
``out = psi @ coin.entries``, and then moves each component one cell
(R: x+1, L: x-1, U: y+1, D: y-1).

Walls.  Away from the walls both types follow the four-direction update.
Type I applies the coin at the origin and keeps L and D there.  On the open
edges a component that would leave the quadrant is reflected into the
opposite direction in place (``edge="reflect"``, the default): L on
``x = 0`` becomes R, D on ``y = 0`` becomes U, and the components entering
the origin from ``(1, 0, L)`` and ``(0, 1, D)`` arrive as R and U.  This
makes the shift a permutation, hence the walk unitary.  ``edge="stay"``
keeps L on ``x = 0`` and D on ``y = 0`` instead; it is not norm preserving
and exists for comparison only.

Type II has only the L and D states at the origin and no coin there:
``(0,0,L) -> exp(i g1) (1,0,R)`` and ``(0,0,D) -> exp(i g2) (0,1,U)``.
Edges reflect as above; ``(1,0,L)`` and ``(0,1,D)`` enter the origin as L
and D.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .cmv import VerblunskySeq, build_cmv, cmv_apply, rotate_seq
from .coin import D, L, R, U, PhasePlan, QuantumCoin, WalkType, lambda_diag, verblunsky_a, verblunsky_b
from .errors import NotNormalized, TruncationOverflow
from .opuc import verblunsky_from_moments

__all__ = [
    "WalkState",
    "PassageWeight",
    "Convention",
    "CONVENTIONS",
    "FROZEN_CONVENTION",
    "CorrespondenceReport",
    "initial_state",
    "step",
    "evolve",
    "distribution",
    "passage_weight",
    "time_avg_return",
    "correspondence_residual",
    "walk_moments",
    "walk_verblunsky",
    "cmv_walk",
    "cmv_site_profile",
]

EDGE_RULES = ("reflect", "stay")
NORM_TOL = 1e-12


@dataclass(frozen=True)
class WalkState:
    kind: WalkType
    amplitudes: NDArray[np.complex128]
    time: int = 0

    @property
    def size(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm2(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def amplitude(self, x: int, y: int, d: int) -> complex:
        return complex(self.amplitudes[x, y, d])


@dataclass(frozen=True)
class PassageWeight:
    """``block[out, in]`` amplitude between direction components.

    Rows follow (R, L, U, D); columns follow ``inputs``.
    """

    block: NDArray[np.complex128]
    inputs: tuple[int, ...]


def _origin_inputs(kind: WalkType, site) -> tuple[int, ...]:
    if kind is WalkType.II and tuple(site) == (0, 0):
        return (L, D)
    return (R, L, U, D)


def initial_state(kind, coin_state, size: int) -> WalkState:
    """Initial state at the origin.

    Parameters
    ----------
    kind : WalkType or str
    coin_state : sequence
        Type I: ``(alpha, beta, mu, zeta)`` amplitudes of R, L, U, D with
        unit norm.  Type II: phases ``(d1, d2)``; the state is
        ``(exp(i d1) |0,0,L> + exp(i d2) |0,0,D>) / sqrt(2)``.
    size : int
        Side ``X`` of the truncation square.
    """
    kind = WalkType.parse(kind)
    if size < 4:
        raise ValueError("truncation size must be >= 4")
    amp = np.zeros((size, size, 4), dtype=np.complex128)
    if kind is WalkType.I:
        c = np.asarray(coin_state, dtype=np.complex128)
        if c.shape != (4,):
            raise ValueError("Type I coin state needs four amplitudes")
        n2 = float(np.sum(np.abs(c) ** 2))
        if abs(n2 - 1.0) > NORM_TOL:
            raise NotNormalized(f"|alpha|^2 + |beta|^2 + |mu|^2 + |zeta|^2 = {n2:.15g}")
        amp[0, 0, :] = c
    else:
        d1, d2 = (float(v) for v in coin_state)
        amp[0, 0, L] = np.exp(1j * d1) / np.sqrt(2.0)
        amp[0, 0, D] = np.exp(1j * d2) / np.sqrt(2.0)
    return WalkState(kind, amp, 0)


def _shift_I(out: NDArray, edge: str) -> NDArray:
    new = np.zeros_like(out)
    new[1:, :, R] += out[:-1, :, R]
    new[:, 1:, U] += out[:, :-1, U]
    new[:-1, 1:, L] += out[1:, 1:, L]
    new[1:-1, 0, L] += out[2:, 0, L]
    new[1:, :-1, D] += out[1:, 1:, D]
    new[0, 1:-1, D] += out[0, 2:, D]
    new[0, 0, L] += out[0, 0, L]
    new[0, 0, D] += out[0, 0, D]
    if edge == "reflect":
        new[0, 0, R] += out[1, 0, L]
        new[0, 0, U] += out[0, 1, D]
        new[1:, 0, U] += out[1:, 0, D]
        new[0, 1:, R] += out[0, 1:, L]
    else:
        new[0, 0, L] += out[1, 0, L]
        new[0, 0, D] += out[0, 1, D]
        new[1:, 0, D] += out[1:, 0, D]
        new[0, 1:, L] += out[0, 1:, L]
    return new


def _shift_II(out: NDArray, origin: NDArray, gamma) -> NDArray:
    new = np.zeros_like(out)
    new[1:, :, R] += out[:-1, :, R]
    new[:, 1:, U] += out[:, :-1, U]
    new[:-1, 1:, L] += out[1:, 1:, L]
    new[:-1, 0, L] += out[1:, 0, L]
    new[1:, :-1, D] += out[1:, 1:, D]
    new[0, :-1, D] += out[0, 1:, D]
    new[1:, 0, U] += out[1:, 0, D]
    new[0, 1:, R] += out[0, 1:, L]
    new[1, 0, R] += np.exp(1j * gamma[0]) * origin[L]
    new[0, 1, U] += np.exp(1j * gamma[1]) * origin[D]
    return new


def _apply(kind: WalkType, amp: NDArray, coin: QuantumCoin, gamma, edge: str) -> NDArray:
    if kind is WalkType.I:
        return _shift_I(amp @ coin.entries, edge)
    origin = amp[0, 0].copy()
    inner = amp.copy()
    inner[0, 0] = 0.0
    return _shift_II(inner @ coin.entries, origin, gamma)


def _check_room(amp: NDArray, margin: int = 2) -> None:
    n = amp.shape[0]
    if np.any(amp[n - margin :] != 0) or np.any(amp[:, n - margin :] != 0):
        raise TruncationOverflow(f"support reached the last {margin} cells of a {n}-wide truncation")


def step(state: WalkState, coin: QuantumCoin, gamma=(0.0, 0.0), edge: str = "reflect") -> WalkState:
    """One application of the walk operator; returns a new state.

    Raises
    ------
    TruncationOverflow
        If the support is within two cells of the truncation boundary.
    """
    if edge not in EDGE_RULES:
        raise ValueError(f"edge rule must be one of {EDGE_RULES}")
    _check_room(state.amplitudes)
    new = _apply(state.kind, state.amplitudes, coin, gamma, edge)
    return WalkState(state.kind, new, state.time + 1)


def evolve(state: WalkState, coin: QuantumCoin, steps: int, gamma=(0.0, 0.0), edge: str = "reflect"):
    """Yield ``state, W state, W^2 state, ...`` (``steps + 1`` states)."""
    yield state
    for _ in range(steps):
        state = step(state, coin, gamma, edge)
        yield state


def distribution(state: WalkState) -> NDArray[np.float64]:
    """``P[x, y] = sum_d |psi(x, y, d)|**2``."""
    return np.sum(np.abs(state.amplitudes) ** 2, axis=2)


def passage_weight(kind, coin: QuantumCoin, gamma, t: int, start, end, size: int | None = None) -> PassageWeight:
    """Amplitudes ``<end, d_out | W^t | start, d_in>``.

    One run per admissible input direction (Type II origin has only L, D).
    """
    kind = WalkType.parse(kind)
    x1, y1 = start
    x2, y2 = end
    size = size or (max(x1, y1, x2, y2) + t + 4)
    inputs = _origin_inputs(kind, start)
    block = np.zeros((4, len(inputs)), dtype=np.complex128)
    for col, d_in in enumerate(inputs):
        amp = np.zeros((size, size, 4), dtype=np.complex128)
        amp[x1, y1, d_in] = 1.0
        st = WalkState(kind, amp)
        for _ in range(t):
            st = step(st, coin, gamma)
        block[:, col] = st.amplitudes[x2, y2, :]
    return PassageWeight(block, inputs)


def time_avg_return(kind, coin: QuantumCoin, gamma, coin_state, T: int, edge: str = "reflect") -> tuple[float, float]:
    """Cesaro mean of ``P_t(0, 0)`` over ``t < T`` and over the last ``T/4`` steps.

    Returns
    -------
    (mean, tail) : tuple of float
    """
    if T < 16:
        raise ValueError("horizon T must be >= 16")
    st = initial_state(kind, coin_state, T + 4)
    p0 = np.empty(T)
    for t in range(T):
        p0[t] = float(np.sum(np.abs(st.amplitudes[0, 0]) ** 2))
        if t + 1 < T:
            st = step(st, coin, gamma, edge)
    return float(p0.mean()), float(p0[T - T // 4 :].mean())


# -- walk <-> CMV correspondence -------------------------------------------


@dataclass(frozen=True)
class Convention:
    """One way of reading the walk to CMV correspondence.

    ``flip_odd`` negates the odd-index phase exponent; ``placement`` is
    ``"T*"`` for ``L C conj(L)`` or ``"*T"`` for ``conj(L) C L``; ``fold`` is
    the sign joining the colliding pair (``+1`` gives ``(|R> + |U>)/sqrt 2``);
    ``pattern`` selects the constant sequence or the phased one with the
    index-dependent phase.
    """

    flip_odd: bool
    placement: str
    fold: int
    pattern: str

    def label(self) -> str:
        sign = "+" if self.fold > 0 else "-"
        return f"flip={int(self.flip_odd)},place={self.placement},fold={sign},seq={self.pattern}"


CONVENTIONS = tuple(
    Convention(f, p, s, q)
    for q in ("const", "phased")
    for f, p, s in itertools.product((False, True), ("T*", "*T"), (1, -1))
)
# default reading; no convention reaches tolerance, this one ties for best
FROZEN_CONVENTION = CONVENTIONS[0]


@dataclass(frozen=True)
class CorrespondenceReport:
    residuals: dict
    best: Convention
    best_residual: float
    parameter: complex
    tol: float = 1e-6
    rows: tuple = field(default=(), repr=False)

    @property
    def fits(self) -> bool:
        return self.best_residual <= self.tol

    @property
    def verdict(self) -> str:
        return "ok" if self.fits else "NoConventionFits"


def _fold_basis(kind: WalkType, n: int, size: int, sign: int) -> NDArray[np.complex128]:
    """Columns: walk states for indices ``0 .. n-1`` (flattened)."""
    cols = np.zeros((size, size, 4, n), dtype=np.complex128)
    h = 1.0 / np.sqrt(2.0)
    if kind is WalkType.I:
        for d in range(4):
            cols[0, 0, d, d] = 1.0
        start = 2
    else:
        cols[0, 0, L, 0] = 1.0
        cols[0, 0, D, 1] = 1.0
        start = 1
    for k in range(start, n // 2 + 1):
        for idx, (a, b) in ((2 * k, (R, U)), (2 * k + 1, (L, D))):
            if idx < n and kind is WalkType.I:
                cols[k, k, a, idx] = h
                cols[k, k, b, idx] = sign * h
    if kind is WalkType.II:
        for k in range(1, n // 2 + 1):
            for idx, (a, b) in ((2 * k, (R, U)), (2 * k + 1, (L, D))):
                if idx < n:
                    cols[k, k, a, idx] = h
                    cols[k, k, b, idx] = sign * h
    return cols.reshape(-1, n)


def _folded_matrix(kind, coin, gamma, n, sign, edge="reflect"):
    size = n // 2 + 6
    V = _fold_basis(kind, n, size, sign)
    WV = np.empty_like(V)
    for j in range(n):
        amp = V[:, j].reshape(size, size, 4)
        WV[:, j] = _apply(kind, amp, coin, gamma, edge).reshape(-1)
    return V.conj().T @ WV


def _cmv_candidate(kind, coin, gamma, n, conv: Convention, param: complex):
    delta = coin.derived.delta
    if kind is WalkType.I:
        seq = VerblunskySeq.null_odd(param)
        if conv.pattern == "phased":
            seq = rotate_seq(seq, -0.5 * float(np.angle(delta)))
        prefactor = 1.0
    else:
        g = gamma[0] + gamma[1]
        value = param if conv.pattern == "const" else param * np.exp(-1j * g) * delta
        seq = VerblunskySeq.null_even(value)
        prefactor = np.exp(1j * g)
    C = build_cmv(seq, n).dense()
    lam = lambda_diag(PhasePlan(kind, n, tuple(gamma)), coin.derived, flip_odd=conv.flip_odd)
    if conv.placement == "T*":
        M = lam[:, None] * C * lam.conj()[None, :]
    else:
        M = lam.conj()[:, None] * C * lam[None, :]
    return prefactor * M


def correspondence_residual(kind, coin: QuantumCoin, gamma=(0.0, 0.0), n: int = 64, tol: float = 1e-6) -> CorrespondenceReport:
    """Compare the folded walk matrix with the phase-conjugated CMV matrix.

    The walk is compressed onto the diagonal sector spanned by the origin
    states and the folded pairs at ``(k, k)``; the residual is the largest
    entry of the difference over the leading ``n - 4`` rows and columns
    (away from the CMV cut).  All conventions in :data:`CONVENTIONS` are
    tried; the report names the best one and whether it fits ``tol``.

    Raises
    ------
    AOutOfRange, BOutOfRange
        If the coin's parameter leaves the unit disk.
    """
    kind = WalkType.parse(kind)
    param = verblunsky_a(coin) if kind is WalkType.I else verblunsky_b(coin, gamma)
    inner = n - 4
    folded = {s: _folded_matrix(kind, coin, gamma, n, s) for s in (1, -1)}
    residuals = {}
    for conv in CONVENTIONS:
        M = _cmv_candidate(kind, coin, gamma, n, conv, param)
        residuals[conv] = float(np.abs(folded[conv.fold][:inner, :inner] - M[:inner, :inner]).max())
    best = min(CONVENTIONS, key=lambda c: (residuals[c], CONVENTIONS.index(c)))
    rows = tuple((c.label(), residuals[c]) for c in CONVENTIONS)
    return CorrespondenceReport(residuals, best, residuals[best], complex(param), tol, rows)


def walk_moments(kind, coin: QuantumCoin, gamma, coin_state, count: int, edge: str = "reflect") -> NDArray[np.complex128]:
    """``<Psi_0, W^t Psi_0>`` for ``t = 0 .. count``."""
    st = initial_state(kind, coin_state, count + 6)
    psi0 = st.amplitudes.copy()
    out = np.empty(count + 1, dtype=np.complex128)
    for t in range(count + 1):
        out[t] = np.vdot(psi0, st.amplitudes)
        if t < count:
            st = step(st, coin, gamma, edge)
    return out


def walk_verblunsky(kind, coin: QuantumCoin, gamma, coin_state, count: int = 16, edge: str = "reflect"):
    """Verblunsky coefficients of the walk's spectral measure at ``Psi_0``.

    A direct probe of the cyclic subspace of the initial state: if the walk
    were unitarily a null-odd (null-even) CMV matrix on that subspace, the
    odd (even) coefficients would vanish.
    """
    return verblunsky_from_moments(walk_moments(kind, coin, gamma, coin_state, count, edge), count)


# -- the CMV matrix as a walk on the half-line -----------------------------


def cmv_walk(seq: VerblunskySeq, T: int) -> NDArray[np.float64]:
    """Probabilities ``|(C^t e_0)_j|**2`` for ``t = 0 .. T-1``.

    Returns an array of shape ``(T, 2T + 4)``; the truncation is large
    enough that the cut is never reached.
    """
    n = 2 * T + 8
    C = build_cmv(seq, n)
    v = np.zeros(n, dtype=np.complex128)
    v[0] = 1.0
    out = np.empty((T, 2 * T + 4))
    for t in range(T):
        out[t] = np.abs(v[: 2 * T + 4]) ** 2
        v = cmv_apply(C, v)
    return out


def cmv_site_profile(seq: VerblunskySeq, T: int, t0: int, sites: int) -> NDArray[np.float64]:
    """Site probabilities (index pairs ``2k, 2k+1``) averaged over ``t0 <= t < T``."""
    probs = cmv_walk(seq, T)[t0:]
    pairs = probs[:, 0 : 2 * sites : 2] + probs[:, 1 : 2 * sites : 2]
    return pairs.mean(axis=0)
