"""
Numeric error propagation, supersensitive ranges, working-point search and sweeps.
"""

from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Literal, NamedTuple, Sequence

import numpy as np
from scipy import optimize

from . import analytic as an
from . import gaussian as g
from .schemes import (
    DIRECT_SCHEMES,
    HOMODYNE_SCHEMES,
    DetectorPlan,
    Scheme,
    SchemeConfig,
    build,
    build_su11_nondegenerate,
)

log = logging.getLogger(__name__)

DIFF_STEP = 1e-5
RICHARDSON_RTOL = 1e-7
BISECT_XTOL = 1e-9
GOLDEN_XTOL = 1e-8
GOLDEN_MAXITER = 500


class RichardsonWarning(RuntimeWarning):
    """Central differences at ``h`` and ``h/2`` disagree beyond tolerance."""


class OptimizationError(RuntimeError):
    pass


def _moments(config: SchemeConfig, phi: float, plan: DetectorPlan | None, linearized: bool):
    state, default_plan = build(config, phi)
    plan = plan or default_plan
    if plan.observable in ("sine_quadrature", "cosine_quadrature"):
        q = "sine" if plan.observable == "sine_quadrature" else "cosine"
        m = g.homodyne_stats(state, plan.modes[0], q)
        return m.mean, m.variance
    if linearized:
        # first order in fluctuations: <N> = |d|^2/2, Var N = d^T sigma d
        sub = state.reduced(plan.modes)
        return 0.5 * float(sub.mean @ sub.mean), float(sub.mean @ sub.cov @ sub.mean)
    m = g.photon_stats_total(state, plan.modes) if len(plan.modes) > 1 else g.photon_stats(state, plan.modes[0])
    return m.mean, m.variance


def _extra_noise(config: SchemeConfig, plan: DetectorPlan | None) -> float:
    if config.scheme is Scheme.SU11_UNSEEDED_DIRECT and (plan is None or plan.observable.startswith("photon")):
        return config.delta_n_d**2
    return 0.0


def _slope(f: Callable[[float], float], phi: float, h: float) -> tuple[float, bool, bool]:
    """Richardson-extrapolated central difference.

    Returns ``(slope, flat, flagged)``: ``flat`` when the difference is at
    round-off level, ``flagged`` when ``h`` and ``h/2`` disagree.
    """
    fp, fm = f(phi + h), f(phi - h)
    scale = max(1.0, abs(fp), abs(fm))
    if abs(fp - fm) <= 1e-13 * scale:
        return 0.0, True, False
    d1 = (fp - fm) / (2 * h)
    d2 = (f(phi + h / 2) - f(phi - h / 2)) / h
    flagged = abs(d1 - d2) > RICHARDSON_RTOL * abs(d2)
    return (4 * d2 - d1) / 3, False, flagged


def numeric_sensitivity(
    config: SchemeConfig,
    phi: float,
    observable: DetectorPlan | None = None,
    h: float = DIFF_STEP,
    linearized: bool = False,
) -> float:
    """Error-propagation sensitivity ``sqrt(Var O) / |d<O>/dphi|`` from the engine.

    Moments are exact; only the slope is a finite difference. For the unseeded
    layout the detector noise ``delta_n_d^2`` is added to the photon-number
    variance. The non-degenerate homodyne layout reads both outputs and uses
    the optimal linear combination, ``(dphi)^-2 = g^T Sigma^-1 g``.
    """
    if config.scheme is Scheme.SU11_NONDEGENERATE and (
        observable is None or observable.observable in ("sine_quadrature", "cosine_quadrature")
    ):
        q = 1 if observable is None or observable.observable == "sine_quadrature" else 0
        return _multi_quadrature_sensitivity(config, phi, q, h)

    def mean_of(x: float) -> float:
        return _moments(config, x, observable, linearized)[0]

    slope, flat, flagged = _slope(mean_of, phi, h)
    if flat or abs(slope) < 1e-14:
        return math.inf
    if flagged:
        warnings.warn(f"finite-difference slope unstable at phi={phi:.6g}", RichardsonWarning, stacklevel=2)
    var = _moments(config, phi, observable, linearized)[1] + _extra_noise(config, observable)
    return math.sqrt(var) / abs(slope)


def _multi_quadrature_sensitivity(config: SchemeConfig, phi: float, q: int, h: float) -> float:
    idx = [q, 2 + q]

    def means(x: float) -> np.ndarray:
        return build_su11_nondegenerate(config, x)[0].mean[idx]

    grad = (4 * (means(phi + h / 2) - means(phi - h / 2)) / h - (means(phi + h) - means(phi - h)) / (2 * h)) / 3
    if np.max(np.abs(grad)) < 1e-14:
        return math.inf
    state = build_su11_nondegenerate(config, phi)[0]
    cov = state.cov[np.ix_(idx, idx)]
    info = float(grad @ np.linalg.solve(cov, grad))
    return math.inf if info <= 0.0 else 1.0 / math.sqrt(info)


# -- supersensitive range ---------------------------------------------------


@dataclass(frozen=True)
class RangeResult:
    intervals: tuple[tuple[float, float], ...]
    total_width: float
    split_by_peak: bool
    peak_gaps: tuple[tuple[float, float], ...] = ()

    @property
    def peak_width(self) -> float:
        """Widest insensitive gap between two supersensitive intervals."""
        return max((hi - lo for lo, hi in self.peak_gaps), default=0.0)


def default_window(config: SchemeConfig) -> tuple[float, float]:
    if config.scheme in DIRECT_SCHEMES:
        return (-math.pi / 4, math.pi / 4)
    return (-math.pi / 2, math.pi / 2)


def singular_points(config: SchemeConfig, window: tuple[float, float]) -> list[float]:
    """Working points inside ``window`` where the mean signal has zero slope."""
    lo, hi = window
    if config.scheme is Scheme.SU11_SEEDED_DIRECT:
        base, period = -config.psi, math.pi / 2
    elif config.scheme is Scheme.SU11_UNSEEDED_DIRECT:
        base, period = 0.0, math.pi / 2
    else:
        base, period = math.pi / 2, math.pi
    k0 = math.ceil((lo - base) / period)
    k1 = math.floor((hi - base) / period)
    return [base + k * period for k in range(k0, k1 + 1) if lo < base + k * period < hi]


def scan_grid(config: SchemeConfig, window: tuple[float, float], resolution: int) -> np.ndarray:
    """Uniform grid plus log-spaced refinement on both sides of every singular point."""
    lo, hi = window
    pts = [np.linspace(lo, hi, resolution)]
    offsets = np.logspace(-10, 0, 201)
    for s in singular_points(config, window):
        pts.append(s + offsets)
        pts.append(s - offsets)
    grid = np.unique(np.concatenate(pts))
    grid = grid[(grid >= lo) & (grid <= hi)]
    sing = singular_points(config, window)
    if sing:
        grid = grid[np.min(np.abs(grid[:, None] - np.array(sing)[None, :]), axis=1) > 0.0]
    return grid


def sensitivity_function(config: SchemeConfig, approx_n: bool = False) -> Callable[[float], float]:
    """``phi -> dphi`` from the closed form matching the layout."""

    def f(phi: float) -> float:
        return an.closed_form(config, phi, approx_n).dphi

    return f


def supersensitive_range(
    config: SchemeConfig,
    phi_window: tuple[float, float] | None = None,
    resolution: int = 2001,
    method: Literal["auto", "closed_form", "scan"] = "auto",
    approx_n: bool = False,
) -> RangeResult:
    """Phase intervals where ``dphi < dphi_SNL``.

    Homodyne layouts use the closed-form width (one interval centred on 0);
    everything else, or ``method="scan"``, scans ``phi`` and refines each
    crossing by bracketing root search.
    """
    if method == "auto":
        method = "closed_form" if config.scheme in HOMODYNE_SCHEMES else "scan"
    if method == "closed_form":
        if config.scheme not in HOMODYNE_SCHEMES:
            raise ValueError("closed-form range exists only for homodyne layouts")
        width = an.supersensitive_width_homodyne(config, approx_n)
        if width == 0.0:
            return RangeResult((), 0.0, False)
        return RangeResult(((-width / 2, width / 2),), width, False)

    window = phi_window or default_window(config)
    ref = an.snl_for(config, approx_n)
    f = sensitivity_function(config, approx_n)

    def excess(phi: float) -> float:
        return min(f(phi), 1e300) - ref

    grid = scan_grid(config, window, resolution)
    vals = np.array([excess(x) for x in grid])
    below = vals < 0.0
    intervals: list[tuple[float, float]] = []
    start: float | None = window[0] if below[0] else None
    for i in range(1, len(grid)):
        if below[i] == below[i - 1]:
            continue
        x = optimize.brentq(excess, grid[i - 1], grid[i], xtol=BISECT_XTOL)
        if below[i]:
            start = x
        else:
            intervals.append((start, x))
            start = None
    if start is not None:
        intervals.append((start, window[1]))

    sing = singular_points(config, window)
    gaps = []
    for (a0, a1), (b0, b1) in zip(intervals, intervals[1:]):
        if any(a1 <= s <= b0 for s in sing):
            gaps.append((a1, b0))
    total = sum(hi - lo for lo, hi in intervals)
    return RangeResult(tuple(intervals), total, bool(gaps), tuple(gaps))


# -- optimisation -----------------------------------------------------------


class R1Optimum(NamedTuple):
    r1: float
    dphi_min: float


def optimize_r1(n: float) -> R1Optimum:
    """Lossless optimum of the input squeeze factor at fixed photon budget ``N``.

    ``e^{2 r1} = 2N + 1``; the sensitivity is evaluated from the homodyne
    minimum with ``alpha^2 = N - sinh^2 r1`` and equals ``1/sqrt(4N(N+1))``.
    """
    if not n > 0:
        raise ValueError(f"photon number must be positive, got {n}")
    r1 = 0.5 * math.log(2 * n + 1)
    return R1Optimum(r1, lossless_dphi_min_at_budget(n, r1))


def lossless_dphi_min_at_budget(n: float, r1: float) -> float:
    a2 = n - math.sinh(r1) ** 2
    if a2 <= 0.0:
        return math.inf
    return math.exp(-r1) / (2.0 * math.sqrt(a2))


class WorkingPoint(NamedTuple):
    phi0: float
    dphi_min: float


def _golden_refine(f: Callable[[float], float], grid: np.ndarray, vals: np.ndarray) -> WorkingPoint:
    i = int(np.argmin(vals))  # first occurrence = leftmost minimiser
    if not math.isfinite(vals[i]):
        raise OptimizationError("no finite sensitivity on the search grid")
    if i == 0 or i == len(grid) - 1:
        return WorkingPoint(float(grid[i]), float(vals[i]))
    a, b, c = grid[i - 1], grid[i], grid[i + 1]
    if not (vals[i] < vals[i - 1] and vals[i] < vals[i + 1]):
        return WorkingPoint(float(b), float(vals[i]))
    res = optimize.minimize_scalar(
        f, bracket=(a, b, c), method="golden", options={"xtol": GOLDEN_XTOL, "maxiter": GOLDEN_MAXITER}
    )
    if not res.success:
        raise OptimizationError(f"golden-section search did not converge: {res.message}")
    if res.fun > vals[i]:
        return WorkingPoint(float(b), float(vals[i]))
    return WorkingPoint(float(res.x), float(res.fun))


def optimal_working_point(
    config: SchemeConfig,
    window: tuple[float, float] | None = None,
    resolution: int = 2001,
    approx_n: bool = False,
) -> WorkingPoint:
    """Working point ``phi0`` of best sensitivity and the sensitivity there.

    Homodyne layouts peak at ``phi = 0``. Direct-detection layouts are searched
    on a grid refined around the insensitive points and polished by
    golden-section search on the closed form.
    """
    if config.scheme in HOMODYNE_SCHEMES or config.scheme is Scheme.SU11_NONDEGENERATE:
        return WorkingPoint(0.0, an.closed_form(config, 0.0, approx_n).dphi)
    window = window or default_window(config)
    f = sensitivity_function(config, approx_n)
    grid = scan_grid(config, window, resolution)
    vals = np.array([f(x) for x in grid])
    return _golden_refine(f, grid, vals)


def recovery_gain(config: SchemeConfig, fraction: float = 0.01) -> float:
    """``|r2|`` at which detection loss adds ``fraction`` of the internal noise.

    Solves ``(1-eta)/(mu eta) e^{-2|r2|} = fraction (e^{-2 r1} + (1-mu)/mu)``.
    """
    mu, eta = config.mu, config.eta
    if eta >= 1.0:
        return 0.0
    internal = mu * math.exp(-2 * config.r1) + 1 - mu
    return max(0.0, 0.5 * math.log((1 - eta) / (fraction * eta * internal)))


# -- sweeps ------------------------------------------------------------------

SweepParam = Literal["r2", "r1", "eta", "mu", "phi", "psi"]
SWEEP_PARAMS = ("r2", "r1", "eta", "mu", "phi", "psi")


@dataclass(frozen=True)
class SweepSpec:
    """A one-parameter scan.

    ``r2`` values are gain magnitudes; the sign is set opposite to ``r1``.
    """

    varying: SweepParam
    grid: tuple[float, ...]
    fixed: SchemeConfig = field(default_factory=SchemeConfig)
    outputs: tuple[str, ...] = ("dphi_min", "range")
    approx_n: bool = False

    def __post_init__(self) -> None:
        if self.varying not in SWEEP_PARAMS:
            raise ValueError(f"cannot sweep {self.varying!r}; choose from {SWEEP_PARAMS}")
        grid = tuple(float(x) for x in self.grid)
        if len(grid) < 1:
            raise ValueError("grid must not be empty")
        diffs = np.diff(grid)
        if len(grid) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("grid must be strictly monotone")
        object.__setattr__(self, "grid", grid)


@dataclass(frozen=True)
class SweepRow:
    value: float
    phi0: float = math.nan
    dphi_min: float = math.nan
    dphi_min_over_snl: float = math.nan
    range_width: float = math.nan
    error: str = ""


def apply_parameter(config: SchemeConfig, name: str, value: float) -> SchemeConfig:
    if name == "r2":
        sign = -1.0 if config.r1 >= 0 else 1.0
        return replace(config, r2=sign * abs(value))
    return replace(config, **{name: value})


def _sweep_row(sweep: SweepSpec, value: float) -> SweepRow:
    try:
        if sweep.varying == "phi":
            pt = an.closed_form(sweep.fixed, value, sweep.approx_n)
            return SweepRow(value, value, pt.dphi, pt.dphi_over_snl)
        cfg = apply_parameter(sweep.fixed, sweep.varying, value)
        wp = optimal_working_point(cfg, approx_n=sweep.approx_n)
        ref = an.snl_for(cfg, sweep.approx_n)
        width = math.nan
        if "range" in sweep.outputs:
            width = supersensitive_range(cfg, approx_n=sweep.approx_n).total_width
        return SweepRow(value, wp.phi0, wp.dphi_min, wp.dphi_min / ref, width)
    except (ValueError, ArithmeticError, OptimizationError) as exc:
        log.debug("sweep row %s=%s failed: %s", sweep.varying, value, exc)
        return SweepRow(value, error=f"{type(exc).__name__}: {exc}")


def sweep_threads() -> int:
    try:
        return max(1, int(os.environ.get("SQINTERF_THREADS", "1")))
    except ValueError:
        return 1


def run_sweep(sweep: SweepSpec, threads: int | None = None) -> list[SweepRow]:
    """Evaluate every grid point; failures are recorded per row, never raised."""
    threads = threads or sweep_threads()
    if threads == 1:
        return [_sweep_row(sweep, v) for v in sweep.grid]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda v: _sweep_row(sweep, v), sweep.grid))


def frange(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Grid ``start, start+step, ...`` up to and including ``stop``, without accumulating round-off."""
    n = int(math.floor((stop - start) / step + 1e-9))
    return tuple(float(x) for x in np.round(start + step * np.arange(n + 1), 12))


def curve(config: SchemeConfig, phis: Iterable[float], approx_n: bool = False) -> list[an.SensitivityPoint]:
    return [an.closed_form(config, float(p), approx_n) for p in phis]
