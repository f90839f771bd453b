"""
Phase sensitivity of squeezing-assisted SU(2) and SU(1,1) interferometers.

The Gaussian engine (:mod:`sqinterf.gaussian`) propagates quadrature means and
covariances; :mod:`sqinterf.schemes` assembles the interferometer layouts;
:mod:`sqinterf.analytic` holds closed-form sensitivities and
:mod:`sqinterf.metrology` the numeric error propagation, range search and
optimisers built on them. :mod:`sqinterf.fock` is a brute-force number-basis
simulator used only to check the engine.
"""

from .analytic import SensitivityPoint, closed_form, heisenberg, heisenberg_exact, snl, snl_for
from .gaussian import GaussianState, MomentReport, homodyne_stats, photon_stats, vacuum
from .metrology import (
    RangeResult,
    SweepSpec,
    numeric_sensitivity,
    optimal_working_point,
    optimize_r1,
    run_sweep,
    supersensitive_range,
)
from .schemes import ConfigError, Scheme, SchemeConfig, build

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "GaussianState",
    "MomentReport",
    "RangeResult",
    "Scheme",
    "SchemeConfig",
    "SensitivityPoint",
    "SweepSpec",
    "build",
    "closed_form",
    "heisenberg",
    "heisenberg_exact",
    "homodyne_stats",
    "numeric_sensitivity",
    "optimal_working_point",
    "optimize_r1",
    "photon_stats",
    "run_sweep",
    "snl",
    "snl_for",
    "supersensitive_range",
    "vacuum",
]
