"""
Gaussian-state propagation in the cosine/sine quadrature basis.

Quadratures are ``x^c = (a + a^dag)/sqrt(2)`` and ``x^s = (a - a^dag)/(i sqrt(2))``,
so the vacuum has variance 1/2 in each. States store the mean vector and
covariance matrix with the quadratures interleaved per mode,
``(c_0, s_0, c_1, s_1, ...)``. Mode indices are zero-based.

Every operation returns a new state; nothing is mutated in place.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

# Eigenvalues of the covariance down to -PSD_TOL * scale are treated as round-off.
PSD_TOL = 1e-12

Quadrature = Literal["cosine", "sine"]


class InvalidStateError(ValueError):
    """Raised when a covariance matrix is not a valid (PSD, symmetric) matrix."""


@dataclass(frozen=True)
class MomentReport:
    """Mean and variance of one measured observable."""

    mean: float
    variance: float

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


def squeeze_matrix(r: float) -> np.ndarray:
    """Single-mode squeezing block ``diag(e^r, e^-r)``."""
    return np.array([[np.exp(r), 0.0], [0.0, np.exp(-r)]])


def rotation_matrix(phi: float) -> np.ndarray:
    """Phase-shift block for ``b = a exp(-i phi)``.

    Equals ``I cos(phi) - Y sin(phi)`` with ``Y = [[0, -1], [1, 0]]``.
    """
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


IDENTITY2 = np.eye(2)
Y_MATRIX = np.array([[0.0, -1.0], [1.0, 0.0]])
# Idler-conjugation block: a^dag in quadratures flips the sine component.
Z_MATRIX = np.array([[1.0, 0.0], [0.0, -1.0]])


def two_mode_squeeze_matrix(r: float) -> np.ndarray:
    """4x4 block for ``b_s = a_s cosh r + a_i^dag sinh r`` and its s<->i partner."""
    ch, sh = np.cosh(r), np.sinh(r)
    return np.block([[ch * IDENTITY2, sh * Z_MATRIX], [sh * Z_MATRIX, ch * IDENTITY2]])


def beamsplitter_matrix(sign: int = 1) -> np.ndarray:
    """4x4 block mapping ``(a_1, a_2)`` to ``((a_1 + sign a_2), (a_1 - sign a_2)) / sqrt(2)``."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    h = np.array([[1.0, sign], [1.0, -sign]]) / np.sqrt(2.0)
    return np.kron(h, IDENTITY2)


def symplectic_form(num_modes: int) -> np.ndarray:
    return np.kron(np.eye(num_modes), Y_MATRIX.T)


@dataclass(frozen=True)
class SymplecticOp:
    """A 2x2 (single-mode) or 4x4 (two-mode) symplectic block.

    ``modes`` lists the targeted mode indices in block order.
    """

    matrix: np.ndarray
    kind: Literal["squeeze", "rotate", "beamsplitter", "two_mode_squeeze"]
    modes: tuple[int, ...]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (2 * len(self.modes), 2 * len(self.modes)):
            raise ValueError(f"matrix shape {m.shape} does not match modes {self.modes}")
        if len(set(self.modes)) != len(self.modes):
            raise ValueError(f"modes must be distinct, got {self.modes}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def is_symplectic(self, atol: float = 1e-12) -> bool:
        omega = symplectic_form(len(self.modes))
        return bool(np.allclose(self.matrix @ omega @ self.matrix.T, omega, atol=atol))

    def embed(self, num_modes: int) -> np.ndarray:
        """Full ``2n x 2n`` matrix acting as identity on untouched modes."""
        full = np.eye(2 * num_modes)
        idx = _quad_indices(self.modes)
        full[np.ix_(idx, idx)] = self.matrix
        return full


def _quad_indices(modes: Sequence[int]) -> list[int]:
    return [2 * m + q for m in modes for q in (0, 1)]


@dataclass(frozen=True)
class GaussianState:
    """Mean quadrature vector and covariance matrix of an ``num_modes``-mode state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        n2 = mean.size
        if n2 == 0 or n2 % 2:
            raise InvalidStateError(f"mean must have even, non-zero length, got {n2}")
        if cov.shape != (n2, n2):
            raise InvalidStateError(f"cov shape {cov.shape} does not match mean length {n2}")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > 1e-12 * scale:
            raise InvalidStateError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        evals, evecs = np.linalg.eigh(cov)
        lowest = evals.min()
        if lowest < -PSD_TOL * scale:
            raise InvalidStateError(f"covariance has negative eigenvalue {lowest:.3e}")
        if lowest < 0.0:
            cov = (evecs * np.clip(evals, 0.0, None)) @ evecs.T
            cov = 0.5 * (cov + cov.T)
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def num_modes(self) -> int:
        return self.mean.size // 2

    def _check_mode(self, mode: int) -> None:
        if not 0 <= mode < self.num_modes:
            raise IndexError(f"mode {mode} out of range for {self.num_modes}-mode state")

    def mode_mean(self, mode: int) -> np.ndarray:
        self._check_mode(mode)
        return self.mean[2 * mode : 2 * mode + 2].copy()

    def mode_cov(self, mode: int) -> np.ndarray:
        self._check_mode(mode)
        return self.cov[2 * mode : 2 * mode + 2, 2 * mode : 2 * mode + 2].copy()

    def reduced(self, modes: Sequence[int]) -> GaussianState:
        """Marginal state of the listed modes, in the listed order."""
        for m in modes:
            self._check_mode(m)
        idx = _quad_indices(modes)
        return GaussianState(self.mean[idx], self.cov[np.ix_(idx, idx)])

    def apply(self, op: SymplecticOp) -> GaussianState:
        for m in op.modes:
            self._check_mode(m)
        full = op.embed(self.num_modes)
        return GaussianState(full @ self.mean, full @ self.cov @ full.T)

    def allclose(self, other: GaussianState, atol: float = 1e-12) -> bool:
        return (
            self.num_modes == other.num_modes
            and np.allclose(self.mean, other.mean, rtol=0.0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0.0, atol=atol)
        )


def vacuum(num_modes: int = 1) -> GaussianState:
    if num_modes < 1:
        raise ValueError(f"num_modes must be >= 1, got {num_modes}")
    return GaussianState(np.zeros(2 * num_modes), 0.5 * np.eye(2 * num_modes))


def displace(state: GaussianState, mode: int, dc: float, ds: float) -> GaussianState:
    """Shift the mean of ``mode`` by ``(dc, ds)``; ``dc = sqrt(2) Re(alpha)``."""
    state._check_mode(mode)
    mean = state.mean.copy()
    mean[2 * mode] += dc
    mean[2 * mode + 1] += ds
    return GaussianState(mean, state.cov)


def coherent(alpha: complex, num_modes: int = 1, mode: int = 0) -> GaussianState:
    a = complex(alpha)
    return displace(vacuum(num_modes), mode, np.sqrt(2.0) * a.real, np.sqrt(2.0) * a.imag)


def squeeze(state: GaussianState, mode: int, r: float) -> GaussianState:
    return state.apply(SymplecticOp(squeeze_matrix(r), "squeeze", (mode,)))


def rotate(state: GaussianState, mode: int, phi: float) -> GaussianState:
    return state.apply(SymplecticOp(rotation_matrix(phi), "rotate", (mode,)))


def squeeze_two_mode(state: GaussianState, mode_s: int, mode_i: int, r: float) -> GaussianState:
    if mode_s == mode_i:
        raise ValueError("two-mode squeezing needs distinct modes")
    return state.apply(SymplecticOp(two_mode_squeeze_matrix(r), "two_mode_squeeze", (mode_s, mode_i)))


def beamsplitter_5050(state: GaussianState, m1: int, m2: int, sign: int = 1) -> GaussianState:
    """Balanced beamsplitter: ``m1 -> (m1 + sign m2)/sqrt2``, ``m2 -> (m1 - sign m2)/sqrt2``."""
    if m1 == m2:
        raise ValueError("beamsplitter needs distinct modes")
    return state.apply(SymplecticOp(beamsplitter_matrix(sign), "beamsplitter", (m1, m2)))


def loss(state: GaussianState, mode: int, transmissivity: float) -> GaussianState:
    """Pure-loss channel: mix ``mode`` with vacuum on a beamsplitter of power transmissivity ``t``."""
    t = float(transmissivity)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {t}")
    state._check_mode(mode)
    scale = np.ones(2 * state.num_modes)
    scale[2 * mode : 2 * mode + 2] = np.sqrt(t)
    cov = state.cov * np.outer(scale, scale)
    cov[2 * mode, 2 * mode] += 0.5 * (1.0 - t)
    cov[2 * mode + 1, 2 * mode + 1] += 0.5 * (1.0 - t)
    return GaussianState(state.mean * scale, cov)


def homodyne_stats(state: GaussianState, mode: int, quadrature: Quadrature = "sine") -> MomentReport:
    q = {"cosine": 0, "sine": 1}[quadrature]
    i = 2 * mode + q
    state._check_mode(mode)
    return MomentReport(float(state.mean[i]), float(state.cov[i, i]))


def photon_stats(state: GaussianState, mode: int) -> MomentReport:
    """Exact photon-number mean and variance of one mode.

    With ``sigma`` the 2x2 covariance block and ``d`` the mean pair,
    ``<N> = (tr sigma + |d|^2 - 1)/2`` and
    ``Var N = (tr sigma^2 - 1/2)/2 + d^T sigma d``.
    """
    return photon_stats_total(state, [mode])


def photon_stats_total(state: GaussianState, modes: Sequence[int]) -> MomentReport:
    """Mean and variance of the summed photon number over ``modes``.

    Cross-mode correlations enter through the full reduced covariance.
    """
    modes = list(modes)
    if not modes:
        raise ValueError("modes must be non-empty")
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate modes in {modes}")
    sub = state.reduced(modes)
    sigma, d = sub.cov, sub.mean
    n = len(modes)
    mean = 0.5 * (np.trace(sigma) + d @ d - n)
    var = 0.5 * (np.sum(sigma * sigma) - 0.5 * n) + d @ sigma @ d
    return MomentReport(float(mean), float(var))


def mode_purity_det(state: GaussianState, mode: int) -> float:
    """Determinant of a mode's covariance block; 1/4 for a pure single-mode state."""
    return float(np.linalg.det(state.mode_cov(mode)))
