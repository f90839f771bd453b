"""
Data series behind the sensitivity and range figures, plus deterministic CSV output.

Every figure is a list of ``(series, quantity, x, y)`` rows. Sensitivities are
normalised to the shot-noise limit with ``N ~ alpha^2`` for the seeded layouts,
which is how the published curves are drawn.
"""

from __future__ import annotations

import io
import math
import os
import tempfile
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import analytic as an
from .metrology import SweepSpec, default_window, frange, run_sweep, scan_grid
from .schemes import Scheme, SchemeConfig

FIGURE_IDS = (2, 3, 4, 5, 6, 7, 8, 9, 10)
ETA_SERIES = (1.0, 0.3, 0.1)
PHASE_POINTS = 721
# Detector noise used for the unseeded figures unless overridden.
UNSEEDED_DETECTOR_NOISE = 100.0

Row = tuple[str, str, float, float]


@dataclass(frozen=True)
class FigureData:
    fig_id: int
    params: dict[str, object]
    rows: list[Row]


def format_value(x: object) -> str:
    """12 significant digits; infinities as ``inf``."""
    if isinstance(x, (float, int, np.floating, np.integer)) and not isinstance(x, bool):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return f"{x:.12g}"
    return str(x)


def render_csv(params: Mapping[str, object], columns: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    buf = io.StringIO()
    header = ",".join(f"{k}={format_value(v)}" for k, v in params.items())
    buf.write(f"# {header}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(format_value(v) for v in row) + "\n")
    return buf.getvalue()


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    folder = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=".csv", dir=folder)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _phase_rows(series: str, config: SchemeConfig) -> list[Row]:
    window = default_window(config)
    if config.scheme in (Scheme.SU11_SEEDED_DIRECT, Scheme.SU11_UNSEEDED_DIRECT):
        grid = scan_grid(config, window, PHASE_POINTS)
    else:
        grid = np.linspace(window[0], window[1], PHASE_POINTS)
    rows = []
    for phi in grid:
        pt = an.closed_form(config, float(phi), approx_n=True)
        rows.append((series, "dphi_over_snl", float(phi), pt.dphi_over_snl))
    return rows


def _sweep_rows(series: str, sweep: SweepSpec) -> list[Row]:
    rows = []
    for r in run_sweep(sweep):
        rows.append((series, "dphi_min_over_snl", r.value, r.dphi_min_over_snl))
        rows.append((series, "range_width", r.value, r.range_width))
    return rows


def _r2_grid(scheme: Scheme) -> tuple[float, ...]:
    # the direct-detection signal vanishes identically without a second amplifier
    start = 0.0 if scheme in (Scheme.SU2_HOMODYNE, Scheme.SU11_SEEDED_HOMODYNE) else 0.05
    return frange(start, 5.0, 0.05)


def _eta_sweep(base: SchemeConfig) -> list[Row]:
    rows: list[Row] = []
    for eta in ETA_SERIES:
        sweep = SweepSpec("r2", _r2_grid(base.scheme), replace(base, eta=eta), approx_n=True)
        rows += _sweep_rows(f"eta={format_value(eta)}", sweep)
    return rows


def figure_data(fig_id: int, overrides: Mapping[str, object] | None = None) -> FigureData:
    """Rows for one figure; ``overrides`` replaces :class:`SchemeConfig` defaults."""
    if fig_id not in FIGURE_IDS:
        raise ValueError(f"unknown figure id {fig_id!r}; choose from {FIGURE_IDS}")
    overrides = dict(overrides or {})
    overrides.pop("scheme", None)
    if fig_id in (8, 9):
        overrides.setdefault("delta_n_d", UNSEEDED_DETECTOR_NOISE)
    base = SchemeConfig(**overrides)
    su2 = replace(base, scheme=Scheme.SU2_HOMODYNE)
    su11h = replace(base, scheme=Scheme.SU11_SEEDED_HOMODYNE)
    su11d = replace(base, scheme=Scheme.SU11_SEEDED_DIRECT)
    unseeded = replace(base, scheme=Scheme.SU11_UNSEEDED_DIRECT)

    rows: list[Row] = []
    if fig_id == 2:
        rows = _phase_rows("su2", su2)
    elif fig_id == 3:
        rows = _eta_sweep(su2)
    elif fig_id == 4:
        rows = _phase_rows("su11_homodyne", su11h) + _phase_rows("su2", su2)
    elif fig_id == 5:
        rows = _eta_sweep(su11h)
    elif fig_id == 6:
        psi_b = 0.2 if base.psi == 0.0 else 0.0
        for psi in sorted({base.psi, psi_b}):
            rows += _phase_rows(f"su11_direct_psi={format_value(psi)}", replace(su11d, psi=psi))
        rows += _phase_rows("su2", su2)
    elif fig_id == 7:
        rows = _eta_sweep(su11d)
    elif fig_id == 8:
        for dnd in sorted({0.0, base.delta_n_d}):
            rows += _phase_rows(f"su11_unseeded_dnd={format_value(dnd)}", replace(unseeded, delta_n_d=dnd))
    elif fig_id == 9:
        rows = _eta_sweep(unseeded)
    else:
        grid = frange(0.05, 2.0, 0.05)
        for name, cfg in (("su2", su2), ("su11_homodyne", su11h), ("su11_direct", su11d)):
            rows += _sweep_rows(name, SweepSpec("r1", grid, cfg, approx_n=True))

    params: dict[str, object] = {"figure": fig_id}
    params.update({k: v for k, v in base.as_dict().items() if k != "scheme"})
    params["approx_n"] = True
    return FigureData(fig_id, params, rows)


def figure_csv(fig_id: int, overrides: Mapping[str, object] | None = None) -> str:
    data = figure_data(fig_id, overrides)
    return render_csv(data.params, ("series", "quantity", "x", "y"), data.rows)
