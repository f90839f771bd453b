"""
Truncated number-basis simulator, used only as a test oracle for the Gaussian engine.

States live on a product of truncated Fock spaces, one per mode. A pure
state is kept as an amplitude vector until a loss channel forces it into a
density matrix. Unitaries are applied on a padded space and truncated back;
any population that ends up near the truncation edge is reported as leakage.

Operator conventions follow :mod:`sqinterf.gaussian`: in the Heisenberg
picture squeezing maps ``a -> a cosh r + a^dag sinh r``, rotation maps
``a -> a e^{-i phi}``, and displacement by ``(dc, ds)`` shifts the
quadrature means by ``(dc, ds)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply
from scipy.special import comb

from . import gaussian as g

LEAKAGE_TOL = 1e-8
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-10
START_DIM = 40
MAX_DIM = 320
MAX_TWO_MODE_DIM = 40
# Fraction of each mode's basis counted as the "edge" for leakage.
EDGE_FRACTION = 0.1


class FockTruncationError(RuntimeError):
    """Too much population near the truncation edge."""

    def __init__(self, leakage: float, dims: tuple[int, ...]):
        self.leakage = leakage
        self.dims = dims
        self.required_dim = 2 * max(dims)
        super().__init__(
            f"leakage {leakage:.2e} exceeds {LEAKAGE_TOL:.0e} at dims {dims}; "
            f"retry with dim >= {self.required_dim}"
        )


@dataclass(frozen=True)
class FockState:
    """State on ``dims[0] x dims[1] x ...``; ``data`` is a vector (pure) or a matrix."""

    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims or min(dims) < 2:
            raise ValueError(f"each mode needs dim >= 2, got {dims}")
        data = np.asarray(self.data, dtype=complex)
        size = math.prod(dims)
        if data.shape not in ((size,), (size, size)):
            raise ValueError(f"data shape {data.shape} does not match dims {dims}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", data)

    @property
    def num_modes(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def populations(self) -> np.ndarray:
        if self.is_pure:
            return np.abs(self.data) ** 2
        return self.data.diagonal().real

    def trace(self) -> float:
        return float(self.populations().sum())

    def leakage(self) -> float:
        """Population with any mode in the top :data:`EDGE_FRACTION` of its basis."""
        pops = self.populations().reshape(self.dims)
        inner = pops
        for axis, d in enumerate(self.dims):
            cut = d - max(1, int(math.ceil(EDGE_FRACTION * d)))
            inner = np.take(inner, range(cut), axis=axis)
        return float(max(pops.sum() - inner.sum(), 0.0))

    def validate(self) -> None:
        """Check trace, Hermiticity and positivity; raise ``ValueError`` on failure."""
        tr = self.trace()
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} differs from 1 by more than {TRACE_TOL}")
        if self.is_pure:
            return
        rho = self.data
        if np.max(np.abs(rho - rho.conj().T)) > TRACE_TOL:
            raise ValueError("density matrix is not Hermitian")
        lowest = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min()
        if lowest < -POSITIVITY_TOL:
            raise ValueError(f"density matrix has eigenvalue {lowest:.3e}")


def fock_vacuum(num_modes: int = 1, dim: int = START_DIM) -> FockState:
    dims = (dim,) * num_modes
    vec = np.zeros(math.prod(dims), dtype=complex)
    vec[0] = 1.0
    return FockState(dims, vec)


def _annihilation(d: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, d, dtype=float)), 1, shape=(d, d), format="csr")


def _embed(op: sp.spmatrix, mode: int, dims: Sequence[int]) -> sp.csr_matrix:
    out = sp.identity(1, format="csr")
    for k, d in enumerate(dims):
        out = sp.kron(out, op if k == mode else sp.identity(d, format="csr"), format="csr")
    return out


def _ladders(dims: Sequence[int]) -> list[sp.csr_matrix]:
    return [_embed(_annihilation(d), k, dims) for k, d in enumerate(dims)]


def _resize(state: FockState, new_dims: tuple[int, ...]) -> tuple[np.ndarray, float]:
    """Zero-pad or crop each mode; returns data and the population cropped away."""
    old, new = state.dims, new_dims
    keep = tuple(slice(0, min(a, b)) for a, b in zip(old, new))
    if state.is_pure:
        src = state.data.reshape(old)
        out = np.zeros(new, dtype=complex)
        out[keep] = src[keep]
        lost = float(np.sum(np.abs(src) ** 2) - np.sum(np.abs(out) ** 2))
        return out.reshape(-1), max(lost, 0.0)
    src = state.data.reshape(old + old)
    out = np.zeros(new + new, dtype=complex)
    out[keep + keep] = src[keep + keep]
    size = math.prod(new)
    out = out.reshape(size, size)
    lost = float(state.data.diagonal().real.sum() - out.diagonal().real.sum())
    return out, max(lost, 0.0)


def _checked(dims: tuple[int, ...], data: np.ndarray, cropped: float = 0.0) -> FockState:
    state = FockState(dims, data)
    leak = state.leakage() + cropped
    if leak > LEAKAGE_TOL:
        raise FockTruncationError(leak, dims)
    return state


def _apply_generator(state: FockState, build, pad_modes: Sequence[int]) -> FockState:
    """Apply ``exp(G)`` with ``G = build(ladders)`` on a space padded along ``pad_modes``."""
    padded = tuple(2 * d if k in pad_modes else d for k, d in enumerate(state.dims))
    data, _ = _resize(state, padded)
    gen = build(_ladders(padded)).tocsc()
    if data.ndim == 1:
        out = expm_multiply(gen, data)
    else:
        half = expm_multiply(gen, data)
        out = expm_multiply(gen, half.conj().T).conj().T
        out = 0.5 * (out + out.conj().T)
    big = FockState(padded, out)
    small, cropped = _resize(big, state.dims)
    return _checked(state.dims, small, cropped)


def _apply_operator(state: FockState, op: sp.spmatrix) -> FockState:
    """Apply a number-non-increasing or number-preserving operator exactly."""
    if state.is_pure:
        return _checked(state.dims, op @ state.data)
    out = op @ (op @ state.data).conj().T
    out = out.conj().T
    return _checked(state.dims, 0.5 * (out + out.conj().T))


def _check_mode(state: FockState, mode: int) -> None:
    if not 0 <= mode < state.num_modes:
        raise IndexError(f"mode {mode} out of range for {state.num_modes}-mode state")


def fock_squeeze(state: FockState, r: float, mode: int = 0) -> FockState:
    """``exp((r/2)(a^dag^2 - a^2))``; amplifies the cosine quadrature for ``r > 0``."""
    _check_mode(state, mode)
    if r == 0.0:
        return state

    def build(a):
        am = a[mode]
        return (0.5 * r) * (am.T @ am.T - am @ am)

    return _apply_generator(state, build, [mode])


def fock_rotate(state: FockState, phi: float, mode: int = 0) -> FockState:
    """``exp(-i phi N)`` on one mode."""
    _check_mode(state, mode)
    d = state.dims[mode]
    phase = sp.diags(np.exp(-1j * phi * np.arange(d)), format="csr")
    return _apply_operator(state, _embed(phase, mode, state.dims))


def fock_displace(state: FockState, dc: float, ds: float, mode: int = 0) -> FockState:
    """Displacement with ``alpha = (dc + i ds)/sqrt(2)``."""
    _check_mode(state, mode)
    alpha = complex(dc, ds) / math.sqrt(2.0)
    if alpha == 0:
        return state

    def build(a):
        am = a[mode]
        return alpha * am.T - alpha.conjugate() * am

    return _apply_generator(state, build, [mode])


def _loss_kraus(d: int, t: float) -> list[sp.csr_matrix]:
    n = np.arange(d)
    ops = []
    for k in range(d):
        m = n[k:]
        amp = np.sqrt(comb(m, k)) * t ** ((m - k) / 2.0) * (1.0 - t) ** (k / 2.0)
        ops.append(sp.csr_matrix((amp, (m - k, m)), shape=(d, d)))
    return ops


def fock_loss(state: FockState, t: float, mode: int = 0) -> FockState:
    """Pure-loss channel of power transmissivity ``t`` via its Kraus operators."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {t}")
    _check_mode(state, mode)
    if t == 1.0:
        return state
    rho = state.density()
    out = np.zeros_like(rho)
    for k_op in _loss_kraus(state.dims[mode], t):
        full = _embed(k_op, mode, state.dims)
        out += full @ (full @ rho).conj().T
    out = out.conj().T
    return _checked(state.dims, 0.5 * (out + out.conj().T))


def fock_loss_ancilla(state: FockState, t: float, mode: int = 0) -> FockState:
    """Loss realised literally: vacuum ancilla, beamsplitter, partial trace.

    Exact on the truncated space because the beamsplitter conserves total
    photon number. Cost grows as ``dim^4``; use for cross-checks at small ``dim``.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"transmissivity must lie in [0, 1], got {t}")
    _check_mode(state, mode)
    d = state.dims[mode]
    dims = state.dims + (d,)
    anc = np.zeros(d, dtype=complex)
    anc[0] = 1.0
    rho = np.kron(state.density(), np.outer(anc, anc))
    theta = math.acos(math.sqrt(t))
    a = _ladders(dims)
    gen = theta * (a[-1].T @ a[mode] - a[mode].T @ a[-1])
    u = scipy.linalg.expm(gen.toarray())
    rho = u @ rho @ u.conj().T
    size = state.size
    reduced = np.einsum("iaja->ij", rho.reshape(size, d, size, d))
    return _checked(state.dims, 0.5 * (reduced + reduced.conj().T))


def fock_beamsplitter(state: FockState, m1: int, m2: int, sign: int = 1) -> FockState:
    """Balanced beamsplitter matching :func:`sqinterf.gaussian.beamsplitter_5050`."""
    _check_mode(state, m1)
    _check_mode(state, m2)
    if m1 == m2:
        raise ValueError("beamsplitter needs distinct modes")
    h = g.beamsplitter_matrix(sign)[::2, ::2]
    # U^dag a_j U = sum_k h_jk a_k  <=>  U = exp(-i a^dag H a) with exp(-iH) = h
    herm = 1j * scipy.linalg.logm(h)
    herm = 0.5 * (herm + herm.conj().T)

    def build(a):
        modes = (m1, m2)
        out = sp.csr_matrix(a[0].shape, dtype=complex)
        for j in range(2):
            for k in range(2):
                if herm[j, k] != 0:
                    out = out + (-1j * herm[j, k]) * (a[modes[j]].T @ a[modes[k]])
        return out

    # number conserving, so no padding is needed
    return _apply_generator(state, build, [])


def fock_two_mode_squeeze(state: FockState, ms: int, mi: int, r: float) -> FockState:
    """``exp(r (a_s^dag a_i^dag - a_s a_i))``; ``a_s -> a_s cosh r + a_i^dag sinh r``."""
    _check_mode(state, ms)
    _check_mode(state, mi)
    if ms == mi:
        raise ValueError("two-mode squeezing needs distinct modes")

    def build(a):
        return r * (a[ms].T @ a[mi].T - a[ms] @ a[mi])

    return _apply_generator(state, build, [ms, mi])


@dataclass(frozen=True)
class FockMoments:
    """Quadrature means and covariance (engine ordering) plus total photon statistics."""

    mean: np.ndarray
    cov: np.ndarray
    mean_n: float
    var_n: float


def _expect(rho_or_vec: np.ndarray, op: sp.spmatrix) -> complex:
    if rho_or_vec.ndim == 1:
        return complex(np.vdot(rho_or_vec, op @ rho_or_vec))
    return complex((op @ rho_or_vec).diagonal().sum())


def fock_moments(state: FockState, modes: Sequence[int] | None = None) -> FockMoments:
    """Exact truncated expectation values.

    The state is zero-padded by two levels per mode first, so products of two
    ladder operators are not clipped at the edge. Photon statistics refer to
    the total number in ``modes`` (all modes by default).
    """
    modes = list(range(state.num_modes)) if modes is None else list(modes)
    padded = tuple(d + 2 for d in state.dims)
    data, _ = _resize(state, padded)
    a = _ladders(padded)
    quads = []
    for k in range(state.num_modes):
        quads.append((a[k] + a[k].T) / math.sqrt(2.0))
        quads.append((a[k] - a[k].T) / (1j * math.sqrt(2.0)))
    mean = np.array([_expect(data, q).real for q in quads])
    n = len(quads)
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            sym = 0.5 * (quads[i] @ quads[j] + quads[j] @ quads[i])
            cov[i, j] = cov[j, i] = _expect(data, sym).real - mean[i] * mean[j]
    num = sum(a[k].T @ a[k] for k in modes)
    mean_n = _expect(data, num).real
    var_n = _expect(data, num @ num).real - mean_n**2
    return FockMoments(mean, cov, float(mean_n), float(var_n))


# Chains: ("squeeze", mode, r) | ("rotate", mode, phi) | ("displace", mode, dc, ds)
#         | ("loss", mode, t) | ("beamsplitter", m1, m2, sign) | ("tms", ms, mi, r)
Step = tuple


def run_fock(steps: Sequence[Step], num_modes: int = 1, dim: int = START_DIM) -> FockState:
    state = fock_vacuum(num_modes, dim)
    for step in steps:
        kind, *args = step
        if kind == "squeeze":
            state = fock_squeeze(state, args[1], args[0])
        elif kind == "rotate":
            state = fock_rotate(state, args[1], args[0])
        elif kind == "displace":
            state = fock_displace(state, args[1], args[2], args[0])
        elif kind == "loss":
            state = fock_loss(state, args[1], args[0])
        elif kind == "beamsplitter":
            state = fock_beamsplitter(state, *args)
        elif kind == "tms":
            state = fock_two_mode_squeeze(state, *args)
        else:
            raise ValueError(f"unknown step kind {kind!r}")
    return state


def run_fock_adaptive(
    steps: Sequence[Step], num_modes: int = 1, start_dim: int = START_DIM, max_dim: int | None = None
) -> FockState:
    """Run a chain, doubling the truncation until the leakage guard passes."""
    cap = max_dim if max_dim is not None else (MAX_DIM if num_modes == 1 else MAX_TWO_MODE_DIM)
    dim = min(start_dim, cap)
    while True:
        try:
            return run_fock(steps, num_modes, dim)
        except FockTruncationError:
            if dim >= cap:
                raise
            dim = min(2 * dim, cap)


def run_gaussian(steps: Sequence[Step], num_modes: int = 1) -> g.GaussianState:
    state = g.vacuum(num_modes)
    for step in steps:
        kind, *args = step
        if kind == "squeeze":
            state = g.squeeze(state, args[0], args[1])
        elif kind == "rotate":
            state = g.rotate(state, args[0], args[1])
        elif kind == "displace":
            state = g.displace(state, args[0], args[1], args[2])
        elif kind == "loss":
            state = g.loss(state, args[0], args[1])
        elif kind == "beamsplitter":
            state = g.beamsplitter_5050(state, *args)
        elif kind == "tms":
            state = g.squeeze_two_mode(state, *args)
        else:
            raise ValueError(f"unknown step kind {kind!r}")
    return state


def moment_error(fock: FockMoments, state: g.GaussianState, modes: Sequence[int] | None = None) -> float:
    """Largest discrepancy, each scaled by ``max(1, |reference|)``."""
    modes = list(range(state.num_modes)) if modes is None else list(modes)
    ref = g.photon_stats_total(state, modes)
    pairs = [(fock.mean, state.mean), (fock.cov, state.cov), (fock.mean_n, ref.mean), (fock.var_n, ref.variance)]
    worst = 0.0
    for got, want in pairs:
        got, want = np.asarray(got, dtype=float), np.asarray(want, dtype=float)
        err = np.abs(got - want) / np.maximum(1.0, np.abs(want))
        worst = max(worst, float(np.max(err)))
    return worst


def random_chain(rng: np.random.Generator, max_len: int = 6) -> list[Step]:
    """Single-mode chain of squeeze (|r| <= 0.5), rotate, displace (|alpha| <= 1), loss (t in [0.5, 1])."""
    steps: list[Step] = []
    for _ in range(int(rng.integers(1, max_len + 1))):
        kind = rng.choice(["squeeze", "rotate", "displace", "loss"])
        if kind == "squeeze":
            steps.append(("squeeze", 0, float(rng.uniform(-0.5, 0.5))))
        elif kind == "rotate":
            steps.append(("rotate", 0, float(rng.uniform(-math.pi, math.pi))))
        elif kind == "displace":
            mag, ang = float(rng.uniform(0.0, 1.0)), float(rng.uniform(-math.pi, math.pi))
            steps.append(("displace", 0, math.sqrt(2.0) * mag * math.cos(ang), math.sqrt(2.0) * mag * math.sin(ang)))
        else:
            steps.append(("loss", 0, float(rng.uniform(0.5, 1.0))))
    return steps


def two_mode_cases() -> list[list[Step]]:
    """Fixed two-mode chains covering the beamsplitter and two-mode squeezer."""
    return [
        [("tms", 0, 1, 0.3)],
        [("tms", 0, 1, 0.25), ("rotate", 0, 0.4), ("loss", 1, 0.8)],
        [("displace", 0, 0.8, -0.3), ("squeeze", 1, 0.3), ("beamsplitter", 0, 1, 1)],
        [("squeeze", 0, -0.3), ("displace", 1, 0.5, 0.5), ("beamsplitter", 0, 1, -1), ("rotate", 1, 1.0)],
        [("displace", 0, 1.0, 0.0), ("tms", 0, 1, 0.2), ("beamsplitter", 0, 1, 1), ("loss", 0, 0.9)],
    ]


@dataclass(frozen=True)
class OracleCase:
    steps: tuple
    num_modes: int
    dim: int
    error: float
    passed: bool


@dataclass(frozen=True)
class OracleReport:
    cases: list[OracleCase] = field(default_factory=list)
    elapsed: float = 0.0
    tol: float = 1e-6

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def max_error(self) -> float:
        return max((c.error for c in self.cases), default=0.0)


def check_chain(steps: Sequence[Step], num_modes: int = 1, dim: int = 60, tol: float = 1e-6) -> OracleCase:
    fock_state = run_fock_adaptive(steps, num_modes, start_dim=dim)
    err = moment_error(fock_moments(fock_state), run_gaussian(steps, num_modes))
    return OracleCase(tuple(steps), num_modes, fock_state.dims[0], err, err <= tol)


def oracle_suite(
    n_cases: int = 200, seed: int = 20240517, dim: int = 60, tol: float = 1e-6, include_two_mode: bool = True
) -> OracleReport:
    """Randomised Gaussian-vs-Fock comparison; deterministic for a given ``seed``."""
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    cases = [check_chain(random_chain(rng), 1, dim, tol) for _ in range(n_cases)]
    if include_two_mode:
        cases += [check_chain(steps, 2, 20, tol) for steps in two_mode_cases()]
    return OracleReport(cases, time.perf_counter() - start, tol)
