"""
Closed-form phase sensitivities.

All functions take a :class:`SchemeConfig` and a working point ``phi`` and
return a :class:`SensitivityPoint`. Points where the mean signal has zero slope
return ``dphi = inf`` instead of raising, so callers scanning in ``phi`` can
bracket supersensitive intervals without special cases.

Squeeze factors enter with their signs (``e^{2 r2}`` rather than
``e^{-2|r2|}``); for the standard orientation ``r1 > 0 > r2`` the two agree,
and inverting both signs gives the antisymmetric-mode interferometer of the
two-mode layout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .schemes import HOMODYNE_SCHEMES, Scheme, SchemeConfig, combine_pm_sensitivity, pm_configs

# Below this |slope factor| a working point is treated as insensitive.
_SINGULAR = 1e-15

# <N_f> below this marks the continuous-photon-number approximation as unreliable.
UNSEEDED_VALIDITY_PHOTONS = 10.0


@dataclass(frozen=True)
class SensitivityPoint:
    phi: float
    dphi: float
    dphi_over_snl: float
    formula_id: str
    valid: bool = True


def snl(n: float) -> float:
    """Shot-noise limit ``1/(2 sqrt N)``."""
    if not n > 0:
        raise ValueError(f"photon number must be positive, got {n}")
    return 1.0 / (2.0 * math.sqrt(n))


def heisenberg(n: float) -> float:
    """Heisenberg scaling ``1/(2N)``."""
    if not n > 0:
        raise ValueError(f"photon number must be positive, got {n}")
    return 1.0 / (2.0 * n)


def heisenberg_exact(n: float) -> float:
    """Best lossless squeezed-input sensitivity, ``1/sqrt(4N(N+1))``."""
    if not n > 0:
        raise ValueError(f"photon number must be positive, got {n}")
    return 1.0 / math.sqrt(4.0 * n * (n + 1.0))


def caves_sensitivity(n: float, r: float) -> float:
    """Squeezed-input sensitivity ``e^{-r}/(2 sqrt N)``, valid for ``e^{2r} << N``."""
    return math.exp(-r) * snl(n)


def photon_number(config: SchemeConfig, approx_n: bool = False) -> float:
    """Photons used inside the interferometer.

    ``alpha^2 + sinh^2 r1`` for seeded layouts (``alpha^2`` alone with
    ``approx_n``), ``sinh^2 r1`` for the unseeded one.
    """
    sq = math.sinh(config.r1) ** 2
    if config.scheme is Scheme.SU11_UNSEEDED_DIRECT:
        return sq
    if config.scheme is Scheme.SU11_NONDEGENERATE:
        a_s, a_i = config.seeds
        coherent = a_s * a_s + a_i * a_i
        # two amplified vacuum modes
        return coherent if approx_n else coherent + 2.0 * sq
    a2 = config.alpha**2
    return a2 if approx_n else a2 + sq


def snl_for(config: SchemeConfig, approx_n: bool = False) -> float:
    return snl(photon_number(config, approx_n))


def _point(config: SchemeConfig, phi: float, dphi: float, formula_id: str, approx_n: bool, valid: bool = True):
    ref = snl_for(config, approx_n)
    return SensitivityPoint(float(phi), float(dphi), float(dphi / ref), formula_id, valid)


def _loss_terms(config: SchemeConfig) -> tuple[float, float]:
    internal = (1.0 - config.mu) / config.mu
    external = (1.0 - config.eta) / (config.mu * config.eta) * math.exp(2.0 * config.r2)
    return internal, external


def dphi_min_homodyne(config: SchemeConfig) -> float:
    """Best homodyne sensitivity, reached at ``phi = 0``; shared by SU(2) and SU(1,1)."""
    if config.alpha == 0.0:
        return math.inf
    internal, external = _loss_terms(config)
    return math.sqrt(math.exp(-2.0 * config.r1) + internal + external) / (2.0 * config.alpha)


def k_factor(config: SchemeConfig) -> float:
    """Coefficient of ``tan^2 phi`` in the homodyne sensitivity.

    SU(2): ``(1/mu + ext)/(4 alpha^2)``. SU(1,1): the anti-squeezed amplitude
    quadrature adds ``e^{2 r1}`` in place of the ``1``.
    """
    if config.alpha == 0.0:
        return math.inf
    internal, external = _loss_terms(config)
    if config.scheme is Scheme.SU2_HOMODYNE:
        lead = 1.0
    else:
        lead = math.exp(2.0 * config.r1)
    return (lead + internal + external) / (4.0 * config.alpha**2)


def _homodyne_dphi(config: SchemeConfig, phi: float) -> float:
    c = math.cos(phi)
    if abs(c) < _SINGULAR or config.alpha == 0.0:
        return math.inf
    t = math.tan(phi)
    return math.sqrt(dphi_min_homodyne(config) ** 2 + k_factor(config) * t * t)


def _homodyne(config: SchemeConfig, phi: float, formula_id: str, approx_n: bool) -> SensitivityPoint:
    return _point(config, phi, _homodyne_dphi(config, phi), formula_id, approx_n)


def su2_homodyne(config: SchemeConfig, phi: float, approx_n: bool = False) -> SensitivityPoint:
    if config.scheme is not Scheme.SU2_HOMODYNE:
        raise ValueError(f"expected SU2_HOMODYNE, got {config.scheme.value}")
    return _homodyne(config, phi, "su2_homodyne", approx_n)


def su11_homodyne(config: SchemeConfig, phi: float, approx_n: bool = False) -> SensitivityPoint:
    if config.scheme is not Scheme.SU11_SEEDED_HOMODYNE:
        raise ValueError(f"expected SU11_SEEDED_HOMODYNE, got {config.scheme.value}")
    return _homodyne(config, phi, "su11_homodyne", approx_n)


def supersensitive_width_homodyne(config: SchemeConfig, approx_n: bool = False) -> float:
    """Full width of the phase interval beating the SNL for homodyne layouts.

    ``2 arctan sqrt((snl^2 - dphi_min^2)/K)``; zero when there is no
    supersensitivity at all.
    """
    ref = snl_for(config, approx_n)
    dmin = dphi_min_homodyne(config)
    gap = ref * ref - dmin * dmin
    if gap <= 0.0:
        return 0.0
    return 2.0 * math.atan(math.sqrt(gap / k_factor(config)))


def nondegenerate_homodyne(config: SchemeConfig, phi: float, approx_n: bool = False) -> SensitivityPoint:
    """Two-mode layout read out by two homodyne detectors, combined over +/- modes."""
    if config.scheme is not Scheme.SU11_NONDEGENERATE:
        raise ValueError(f"expected SU11_NONDEGENERATE, got {config.scheme.value}")
    plus, minus = pm_configs(config)
    dp = _homodyne_dphi(plus, phi)
    dm = _homodyne_dphi(minus, phi)
    if math.isinf(dp) and math.isinf(dm):
        dphi = math.inf
    else:
        dphi = combine_pm_sensitivity(dp, dm)
    return _point(config, phi, dphi, "nondegenerate_homodyne", approx_n)


@dataclass(frozen=True)
class DirectDetectionTerms:
    """Ingredients of the direct-detection sensitivities at one working point."""

    sigma_a2: float
    sigma_m2: float
    sigma_n2: float
    dN_dphi: float
    mean_n: float
    theta_abs2: float
    C_abs2: float
    S_abs2: float
    re_CS: float
    A: float
    B: float


def _bogolyubov(r1: float, r2: float, phi: float) -> tuple[complex, complex]:
    ep, em = complex(math.cos(phi), math.sin(phi)), complex(math.cos(phi), -math.sin(phi))
    ch1, sh1, ch2, sh2 = math.cosh(r1), math.sinh(r1), math.cosh(r2), math.sinh(r2)
    c = ch1 * ch2 * em + sh1 * sh2 * ep
    s = sh1 * ch2 * em + ch1 * sh2 * ep
    return c, s


def unseeded_ab(config: SchemeConfig) -> tuple[float, float]:
    """Phase-independent loss and detector-noise factors of the unseeded layout."""
    mu, eta = config.mu, config.eta
    internal = (1.0 - mu) / mu
    sh2 = math.sinh(config.r2) ** 2
    a = 2.0 * internal * sh2 + (1.0 - mu * eta) / (mu * eta)
    b = internal * sh2 * (a + 1.0 / mu) + config.delta_n_d**2 / (mu * eta) ** 2
    return a, b


def _sigma_a2(r1: float, r2: float, phi: float, u: float) -> float:
    """Amplified input-noise term of the seeded photon-number variance.

    Written as the squared norm ``|S(r1) O(phi)^T S(r2)^2 (cos u, -sin u)|^2``.
    Expanding it into cosh/sinh products is algebraically identical
    (see :func:`sigma_a2_expanded`) but cancels catastrophically once
    ``|r2| >~ 4``.
    """
    c, s = math.cos(phi), math.sin(phi)
    y_c = math.exp(2 * r2) * math.cos(u)
    y_s = -math.exp(-2 * r2) * math.sin(u)
    z_c = c * y_c - s * y_s
    z_s = s * y_c + c * y_s
    return math.exp(2 * r1) * z_c * z_c + math.exp(-2 * r1) * z_s * z_s


def sigma_a2_expanded(r1: float, r2: float, phi: float, psi: float) -> float:
    """Hyperbolic-function expansion of :func:`_sigma_a2` (reference form)."""
    u = phi + psi
    return (
        math.cosh(2 * r1) * math.cosh(4 * r2)
        + math.sinh(2 * r1)
        * (math.cosh(4 * r2) * math.cos(2 * phi) * math.cos(2 * u) + math.sin(2 * phi) * math.sin(2 * u))
        + (math.cosh(2 * r1) * math.cos(2 * u) + math.sinh(2 * r1) * math.cos(2 * phi)) * math.sinh(4 * r2)
    )


def direct_terms(config: SchemeConfig, phi: float) -> DirectDetectionTerms:
    r1, r2, mu, eta = config.r1, config.r2, config.mu, config.eta
    u = phi + config.psi
    cu2, su2 = math.cos(u) ** 2, math.sin(u) ** 2
    sigma_n2 = math.exp(2 * r2) * cu2 + math.exp(-2 * r2) * su2
    sigma_m2 = math.exp(4 * r2) * cu2 + math.exp(-4 * r2) * su2
    sigma_a2 = _sigma_a2(r1, r2, phi, u)
    c, s = _bogolyubov(r1, r2, phi)
    a2 = config.alpha**2
    theta_abs2 = a2 * (math.cosh(2 * r2) + math.sinh(2 * r2) * math.cos(2 * u))
    A, B = unseeded_ab(config)
    if config.scheme is Scheme.SU11_UNSEEDED_DIRECT:
        mean_n = eta * (mu * abs(s) ** 2 + (1.0 - mu) * math.sinh(r2) ** 2)
        slope = -mu * eta * math.sinh(2 * r1) * math.sinh(2 * r2) * math.sin(2 * phi)
    else:
        mean_n = mu * eta * theta_abs2
        slope = -2.0 * mu * eta * a2 * math.sinh(2 * r2) * math.sin(2 * u)
    return DirectDetectionTerms(
        sigma_a2=sigma_a2,
        sigma_m2=sigma_m2,
        sigma_n2=sigma_n2,
        dN_dphi=slope,
        mean_n=mean_n,
        theta_abs2=theta_abs2,
        C_abs2=abs(c) ** 2,
        S_abs2=abs(s) ** 2,
        re_CS=(c * s).real,
        A=A,
        B=B,
    )


def su11_direct_seeded_exact(config: SchemeConfig, phi: float, approx_n: bool = False) -> SensitivityPoint:
    """Seeded direct detection, first order in the field fluctuations.

    Exact in the limit of a bright seed; the engine's full photon-number
    variance adds terms suppressed by ``1/alpha^2``.
    """
    if config.scheme is not Scheme.SU11_SEEDED_DIRECT:
        raise ValueError(f"expected SU11_SEEDED_DIRECT, got {config.scheme.value}")
    mu, eta = config.mu, config.eta
    u = phi + config.psi
    s2u = math.sin(2 * u)
    if abs(s2u) < _SINGULAR or config.alpha == 0.0 or config.r2 == 0.0:
        return _point(config, phi, math.inf, "su11_direct_seeded_exact", approx_n)
    t = direct_terms(config, phi)
    num = t.sigma_a2 + (1 - mu) / mu * t.sigma_m2 + (1 - eta) / (mu * eta) * t.sigma_n2
    den = 4.0 * config.alpha**2 * math.sinh(2 * config.r2) ** 2 * s2u * s2u
    return _point(config, phi, math.sqrt(num / den), "su11_direct_seeded_exact", approx_n)


def su11_direct_seeded_approx(config: SchemeConfig, phi: float, approx_n: bool = False) -> SensitivityPoint:
    """Strong-gain, small-angle form of the seeded direct-detection sensitivity."""
    u = phi + config.psi
    if u == 0.0 or config.alpha == 0.0:
        return _point(config, phi, math.inf, "su11_direct_seeded_approx", approx_n)
    mu, eta = config.mu, config.eta
    g2, g4, g8 = (math.exp(-k * abs(config.r2)) for k in (2, 4, 8))
    e2 = math.exp(2 * config.r1)
    total = (
        1.0 / e2
        + (phi + g4 / u) ** 2 * e2
        + (1 - mu) / mu * (1.0 + g8 / (u * u))
        + (1 - eta) / (mu * eta) * g2 * (1.0 + g4 / (u * u))
    )
    dphi = math.sqrt(total) / (2.0 * config.alpha)
    return _point(config, phi, dphi, "su11_direct_seeded_approx", approx_n)


def unseeded_cross_term(config: SchemeConfig, phi: float) -> float:
    """Correlation between amplified internal and loss noise in the unseeded variance.

    ``((1-mu)/mu) Re(C S) sinh 2 r2``, in units of ``(mu eta)^2``. It is absent
    from the commonly quoted form of the variance; omitting it underestimates
    the photon-number noise whenever ``0 < mu < 1``.
    """
    c, s = _bogolyubov(config.r1, config.r2, phi)
    return (1 - config.mu) / config.mu * (c * s).real * math.sinh(2 * config.r2)


def su11_direct_unseeded_exact(
    config: SchemeConfig, phi: float, printed: bool = False
) -> SensitivityPoint:
    """Unseeded SU(1,1) with photon counting and additive detector noise.

    ``(2|C|^2|S|^2 + A|S|^2 + B + X) / (sinh^2 2r1 sinh^2 2r2 sin^2 2phi)``
    where ``X`` is :func:`unseeded_cross_term`. ``printed=True`` drops ``X``
    to reproduce the widely quoted expression.
    """
    if config.scheme is not Scheme.SU11_UNSEEDED_DIRECT:
        raise ValueError(f"expected SU11_UNSEEDED_DIRECT, got {config.scheme.value}")
    fid = "su11_direct_unseeded_printed" if printed else "su11_direct_unseeded_exact"
    t = direct_terms(config, phi)
    valid = t.mean_n >= UNSEEDED_VALIDITY_PHOTONS
    s2 = math.sin(2 * phi)
    den = (math.sinh(2 * config.r1) * math.sinh(2 * config.r2) * s2) ** 2
    if abs(s2) < _SINGULAR or den == 0.0:
        return _point(config, phi, math.inf, fid, False, valid)
    num = 2 * t.C_abs2 * t.S_abs2 + t.A * t.S_abs2 + t.B
    if not printed:
        num += unseeded_cross_term(config, phi)
    return _point(config, phi, math.sqrt(num / den), fid, False, valid)


@dataclass(frozen=True)
class SmallPhiCoefficients:
    """``dphi^2 = (phi^2 + a/|P| + b/(4 phi^2 P^2))/2`` with ``P = sinh 2r1 sinh 2r2``."""

    a: float
    b: float
    p: float

    @property
    def phi0(self) -> float:
        return math.sqrt(math.sqrt(self.b) / (2.0 * abs(self.p)))

    @property
    def dphi_min(self) -> float:
        return math.sqrt((math.sqrt(self.b) + self.a) / (2.0 * abs(self.p)))


def unseeded_smallphi_coefficients(config: SchemeConfig, printed: bool = False) -> SmallPhiCoefficients:
    r1, r2, mu = config.r1, config.r2, config.mu
    big_r = r1 + r2
    A, B = unseeded_ab(config)
    p = math.sinh(2 * r1) * math.sinh(2 * r2)
    a = math.cosh(2 * big_r) + A / 2.0
    b = math.sinh(2 * big_r) ** 2 + 2.0 * (A * math.sinh(big_r) ** 2 + B)
    if not printed:
        internal = (1 - mu) / mu
        a += 0.5 * internal * math.cosh(2 * r2)
        b += internal * math.sinh(2 * big_r) * math.sinh(2 * r2)
    return SmallPhiCoefficients(a, b, p)


def su11_direct_unseeded_smallphi(
    config: SchemeConfig, phi: float, printed: bool = False
) -> SensitivityPoint:
    """Leading small-``phi`` expansion of :func:`su11_direct_unseeded_exact`."""
    fid = "su11_direct_unseeded_smallphi" + ("_printed" if printed else "")
    if phi == 0.0:
        return _point(config, phi, math.inf, fid, False)
    k = unseeded_smallphi_coefficients(config, printed)
    d2 = 0.5 * (phi * phi + k.a / abs(k.p) + k.b / (4.0 * phi * phi * k.p * k.p))
    return _point(config, phi, math.sqrt(d2), fid, False)


def unseeded_phi_min(config: SchemeConfig, printed: bool = False) -> float:
    """Working point minimising the small-``phi`` unseeded sensitivity."""
    return unseeded_smallphi_coefficients(config, printed).phi0


def unseeded_dphi_opt(config: SchemeConfig, printed: bool = False) -> float:
    return unseeded_smallphi_coefficients(config, printed).dphi_min


def unseeded_asymptotic(config: SchemeConfig, phi: float, printed: bool = False) -> float:
    """``|r2| -> inf`` limit of the small-``phi`` form; detector terms drop out.

    The corrected variance collapses to ``(phi + c/(2 phi sinh 2r1))^2 / 2`` with
    ``c = e^{-2 r1} + (1-mu)/mu``.
    """
    r1, mu = config.r1, config.mu
    internal = (1 - mu) / mu
    e2 = math.exp(-2 * r1)
    sh = math.sinh(2 * r1)
    if printed:
        mid = (e2 + internal / 2.0) / sh
        last = (e2 * e2 + internal * e2 + internal * internal) / (4 * phi * phi * sh * sh)
    else:
        c = e2 + internal
        mid = c / sh
        last = c * c / (4 * phi * phi * sh * sh)
    return math.sqrt(0.5 * (phi * phi + mid + last))


def closed_form(config: SchemeConfig, phi: float, approx_n: bool = False) -> SensitivityPoint:
    """The reference closed form for ``config.scheme``."""
    scheme = config.scheme
    if scheme is Scheme.SU2_HOMODYNE:
        return su2_homodyne(config, phi, approx_n)
    if scheme is Scheme.SU11_SEEDED_HOMODYNE:
        return su11_homodyne(config, phi, approx_n)
    if scheme is Scheme.SU11_SEEDED_DIRECT:
        return su11_direct_seeded_exact(config, phi, approx_n)
    if scheme is Scheme.SU11_UNSEEDED_DIRECT:
        return su11_direct_unseeded_exact(config, phi)
    return nondegenerate_homodyne(config, phi, approx_n)


def is_homodyne(config: SchemeConfig) -> bool:
    return config.scheme in HOMODYNE_SCHEMES
