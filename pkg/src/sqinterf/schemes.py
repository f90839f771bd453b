"""
Interferometer configurations assembled as chains of Gaussian operations.

Four measured layouts are supported, plus the two-mode (non-degenerate)
SU(1,1) variant:

* ``SU2_HOMODYNE``: Mach-Zehnder with squeezed vacuum in the second input port
  and an anti-squeezer plus homodyne detector on the dark output port.
* ``SU11_SEEDED_HOMODYNE`` / ``SU11_SEEDED_DIRECT`` / ``SU11_UNSEEDED_DIRECT``:
  two cascaded degenerate parametric amplifiers.
* ``SU11_NONDEGENERATE``: two cascaded two-mode amplifiers acting on signal and
  idler modes, equivalent to a pair of degenerate interferometers on the
  symmetric (+) and antisymmetric (-) modes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Literal, Sequence

import numpy as np

from . import gaussian as g
from .gaussian import GaussianState


class ConfigError(ValueError):
    """A SchemeConfig parameter is outside its allowed range."""

    def __init__(self, name: str, value: object, bound: str):
        self.name = name
        self.value = value
        self.bound = bound
        super().__init__(f"{name}={value!r} violates {bound}")


class Scheme(str, enum.Enum):
    SU2_HOMODYNE = "SU2_HOMODYNE"
    SU11_SEEDED_HOMODYNE = "SU11_SEEDED_HOMODYNE"
    SU11_SEEDED_DIRECT = "SU11_SEEDED_DIRECT"
    SU11_UNSEEDED_DIRECT = "SU11_UNSEEDED_DIRECT"
    SU11_NONDEGENERATE = "SU11_NONDEGENERATE"

    @property
    def detection(self) -> Literal["homodyne", "direct"]:
        return "direct" if self in DIRECT_SCHEMES else "homodyne"


DEGENERATE_SU11 = frozenset(
    {Scheme.SU11_SEEDED_HOMODYNE, Scheme.SU11_SEEDED_DIRECT, Scheme.SU11_UNSEEDED_DIRECT}
)
DIRECT_SCHEMES = frozenset({Scheme.SU11_SEEDED_DIRECT, Scheme.SU11_UNSEEDED_DIRECT})
HOMODYNE_SCHEMES = frozenset({Scheme.SU2_HOMODYNE, Scheme.SU11_SEEDED_HOMODYNE})


@dataclass(frozen=True)
class SchemeConfig:
    """Every free parameter of the interferometer models.

    ``alpha`` is the classical amplitude *inside* the interferometer. For the
    SU(1,1) layouts this is ``e^{r1}`` times the seed amplitude; for the SU(2)
    layout it is the coherent input amplitude itself (the beamsplitter halves
    the power per arm but the dark-port signal scales with ``alpha``).

    ``r2`` carries its sign; by convention ``r1 >= 0`` and ``r2 <= 0`` and the
    product ``r1 * r2`` must not be positive.
    """

    r1: float = 1.15
    r2: float = -3.0
    mu: float = 0.9
    eta: float = 0.3
    alpha: float = 100.0
    psi: float = 0.0
    delta_n_d: float = 0.0
    scheme: Scheme = Scheme.SU2_HOMODYNE
    seed_split: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        for name in ("r1", "r2", "mu", "eta", "alpha", "psi", "delta_n_d"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ConfigError(name, value, "finite value")
            object.__setattr__(self, name, value)
        if not 0.0 < self.mu <= 1.0:
            raise ConfigError("mu", self.mu, "0 < mu <= 1")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigError("eta", self.eta, "0 < eta <= 1")
        if self.alpha < 0.0:
            raise ConfigError("alpha", self.alpha, "alpha >= 0")
        if self.delta_n_d < 0.0:
            raise ConfigError("delta_n_d", self.delta_n_d, "delta_n_d >= 0")
        if self.r1 * self.r2 > 0.0:
            raise ConfigError("r2", self.r2, "r1 * r2 <= 0 (amplifiers in anti-phase)")
        if self.seed_split is not None:
            a_s, a_i = (float(x) for x in self.seed_split)
            object.__setattr__(self, "seed_split", (a_s, a_i))

    def with_(self, **changes) -> SchemeConfig:
        return replace(self, **changes)

    @property
    def seeds(self) -> tuple[float, float]:
        """Internal (signal, idler) amplitudes for the non-degenerate layout."""
        if self.seed_split is not None:
            return self.seed_split
        # balanced seeds put all power into the symmetric mode
        a = self.alpha / math.sqrt(2.0)
        return (a, a)

    def as_dict(self) -> dict[str, object]:
        out: dict[str, object] = {
            "scheme": self.scheme.value,
            "r1": self.r1,
            "r2": self.r2,
            "mu": self.mu,
            "eta": self.eta,
            "alpha": self.alpha,
            "psi": self.psi,
            "delta_n_d": self.delta_n_d,
        }
        if self.seed_split is not None:
            out["seed_split"] = self.seed_split
        return out


PARAMS_DEFAULT = SchemeConfig()

Observable = Literal["sine_quadrature", "cosine_quadrature", "photon_number", "photon_number_total"]


@dataclass(frozen=True)
class DetectorPlan:
    observable: Observable
    modes: tuple[int, ...] = field(default=(0,))

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", tuple(self.modes))
        if self.observable == "photon_number_total":
            if len(self.modes) < 2:
                raise ValueError("photon_number_total needs at least two modes")
        elif self.observable in ("sine_quadrature", "cosine_quadrature", "photon_number"):
            if len(self.modes) != 1:
                raise ValueError(f"{self.observable} needs exactly one mode")
        else:
            raise ValueError(f"unknown observable {self.observable!r}")


def _require(config: SchemeConfig, allowed: Sequence[Scheme]) -> None:
    if config.scheme not in allowed:
        names = ", ".join(s.value for s in allowed)
        raise ValueError(f"scheme {config.scheme.value} not handled here (expected {names})")


def internal_amplitude(config: SchemeConfig) -> np.ndarray:
    """Quadrature mean inside a degenerate SU(1,1) interferometer.

    The complex amplitude is ``alpha e^{-i psi}``; ``psi`` is honoured only for
    the seeded direct-detection layout.
    """
    if config.scheme is Scheme.SU11_UNSEEDED_DIRECT:
        return np.zeros(2)
    psi = config.psi if config.scheme is Scheme.SU11_SEEDED_DIRECT else 0.0
    return math.sqrt(2.0) * config.alpha * np.array([math.cos(psi), -math.sin(psi)])


def build_su2(config: SchemeConfig, phi: float) -> tuple[GaussianState, DetectorPlan]:
    """Detector-plane state of the squeezer/anti-squeezer Mach-Zehnder.

    Mode 0 carries the coherent input and, after the second beamsplitter, the
    dark port; mode 1 is the squeezed-vacuum input and then the bright port.
    """
    _require(config, [Scheme.SU2_HOMODYNE])
    s = g.displace(g.vacuum(2), 0, math.sqrt(2.0) * config.alpha, 0.0)
    s = g.squeeze(s, 1, config.r1)
    s = g.beamsplitter_5050(s, 0, 1, +1)
    s = g.rotate(s, 0, phi)
    s = g.rotate(s, 1, -phi)
    s = g.loss(s, 0, config.mu)
    s = g.loss(s, 1, config.mu)
    # mode 0 <- (d1 - d2)/sqrt2, the dark port
    s = g.beamsplitter_5050(s, 0, 1, -1)
    s = g.squeeze(s, 0, config.r2)
    s = g.loss(s, 0, config.eta)
    return s, DetectorPlan("sine_quadrature", (0,))


def build_su11_degenerate(config: SchemeConfig, phi: float) -> tuple[GaussianState, DetectorPlan]:
    _require(config, sorted(DEGENERATE_SU11))
    seed = g.squeeze_matrix(-config.r1) @ internal_amplitude(config)
    s = g.displace(g.vacuum(1), 0, *seed)
    s = g.squeeze(s, 0, config.r1)
    s = g.rotate(s, 0, phi)
    s = g.loss(s, 0, config.mu)
    s = g.squeeze(s, 0, config.r2)
    s = g.loss(s, 0, config.eta)
    if config.scheme is Scheme.SU11_SEEDED_HOMODYNE:
        return s, DetectorPlan("sine_quadrature", (0,))
    return s, DetectorPlan("photon_number", (0,))


def nondegenerate_planes(config: SchemeConfig, phi: float) -> dict[str, GaussianState]:
    """States of the non-degenerate chain at every cross-section ``a`` .. ``f``."""
    _require(config, [Scheme.SU11_NONDEGENERATE])
    a_s, a_i = config.seeds
    internal = np.array([math.sqrt(2.0) * a_s, 0.0, math.sqrt(2.0) * a_i, 0.0])
    seed = g.two_mode_squeeze_matrix(-config.r1) @ internal
    planes: dict[str, GaussianState] = {}
    s = g.displace(g.displace(g.vacuum(2), 0, *seed[:2]), 1, *seed[2:])
    planes["a"] = s
    s = g.squeeze_two_mode(s, 0, 1, config.r1)
    planes["b"] = s
    s = g.rotate(g.rotate(s, 0, phi), 1, phi)
    planes["c"] = s
    s = g.loss(g.loss(s, 0, config.mu), 1, config.mu)
    planes["d"] = s
    s = g.squeeze_two_mode(s, 0, 1, config.r2)
    planes["e"] = s
    s = g.loss(g.loss(s, 0, config.eta), 1, config.eta)
    planes["f"] = s
    return planes


def build_su11_nondegenerate(
    config: SchemeConfig,
    phi: float,
    detection: Literal["homodyne", "direct"] = "homodyne",
) -> tuple[GaussianState, DetectorPlan]:
    """Signal (mode 0) and idler (mode 1) at the detectors.

    Homodyne detection reads the sine quadrature of both outputs; the returned
    plan names the signal mode and callers combine both via
    :func:`sqinterf.metrology.numeric_sensitivity`.
    """
    state = nondegenerate_planes(config, phi)["f"]
    if detection == "direct":
        return state, DetectorPlan("photon_number_total", (0, 1))
    return state, DetectorPlan("sine_quadrature", (0,))


def build(config: SchemeConfig, phi: float) -> tuple[GaussianState, DetectorPlan]:
    """Dispatch to the builder matching ``config.scheme``."""
    if config.scheme is Scheme.SU2_HOMODYNE:
        return build_su2(config, phi)
    if config.scheme is Scheme.SU11_NONDEGENERATE:
        return build_su11_nondegenerate(config, phi)
    return build_su11_degenerate(config, phi)


def pm_basis(state: GaussianState) -> GaussianState:
    """Rotate a two-mode state into ``a_pm = (a_s +- a_i)/sqrt2`` (mode 0 = +, mode 1 = -)."""
    if state.num_modes != 2:
        raise ValueError("pm decomposition needs a two-mode state")
    return g.beamsplitter_5050(state, 0, 1, +1)


def decompose_pm(state: GaussianState, atol: float = 1e-10) -> tuple[GaussianState, GaussianState]:
    """Split a two-mode state into independent (+, -) single-mode states.

    Raises ValueError when the +/- modes are correlated beyond ``atol``
    (relative to the largest covariance entry), which happens only for
    asymmetric signal/idler chains.
    """
    pm = pm_basis(state)
    cross = pm.cov[0:2, 2:4]
    scale = max(1.0, float(np.max(np.abs(pm.cov))))
    if np.max(np.abs(cross)) > atol * scale:
        raise ValueError(f"+/- modes are correlated (max cross-covariance {np.max(np.abs(cross)):.3e})")
    return pm.reduced([0]), pm.reduced([1])


def pm_configs(config: SchemeConfig) -> tuple[SchemeConfig, SchemeConfig]:
    """Degenerate seeded-homodyne equivalents of the (+) and (-) modes.

    The antisymmetric interferometer runs with both squeeze factors inverted.
    """
    a_s, a_i = config.seeds
    a_plus = (a_s + a_i) / math.sqrt(2.0)
    a_minus = (a_s - a_i) / math.sqrt(2.0)
    base = replace(config, scheme=Scheme.SU11_SEEDED_HOMODYNE, seed_split=None, psi=0.0)
    plus = replace(base, alpha=abs(a_plus))
    minus = replace(base, alpha=abs(a_minus), r1=-config.r1, r2=-config.r2)
    return plus, minus


def balanced_seed_split(total_alpha: float, mode: Literal["+", "-"] = "+") -> tuple[float, float]:
    """Signal/idler seeds that put all ``total_alpha**2`` quanta into one of the +/- modes."""
    a = total_alpha / math.sqrt(2.0)
    return (a, a) if mode == "+" else (a, -a)


def combine_pm_sensitivity(dphi_plus: float, dphi_minus: float) -> float:
    """Inverse-variance combination of two independent phase estimates."""
    for v in (dphi_plus, dphi_minus):
        if not v > 0.0:
            raise ValueError(f"sensitivities must be positive, got {v}")
    if math.isinf(dphi_plus) and math.isinf(dphi_minus):
        raise ValueError("both branches are insensitive")
    info = 0.0
    for v in (dphi_plus, dphi_minus):
        if not math.isinf(v):
            info += 1.0 / (v * v)
    return 1.0 / math.sqrt(info)
