"""Filtered discrete Fourier transform of the time series and exact references.

The spectral function on the frequency grid omega_m = m * d_omega is

    A(omega_m) = (dt / 2 pi) Re sum_{s=+-} sum_n e^{i omega_m t_sn} F_n P_sn,

with d_omega dt = 2 pi / L.  The n = 0 term is shared by both branches and
enters once (half weight per branch); with that convention the transform is
the full-line trapezoid rule and converges to the line-shape decomposition

    A(omega) = sum_{u,v} |c_u|^2 |c_v|^2 Ftilde(omega - (E_u - E_v)),

which exact_spectrum_oracle evaluates directly from the eigensystem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, NumericError, ParameterError
from .model import EigenDecomposition
from .simulator import InputOrientation, TimeGrid, TimeSeries, prepare_input
from .trotter import Filter, filter_value

_CHUNK = 512  # frequency rows per transform block, caps the cos-matrix memory


@dataclass
class Spectrum:
    """Real spectral values on a frequency grid, with filter and provenance.

    For DFT-produced spectra the grid covers a full period and the upper half
    mirrors negative frequencies; `omega_max_physical` marks the fold point
    so peak searches stay on the physical side.  Line-shape spectra built on
    arbitrary grids leave it None.
    """

    omegas: np.ndarray
    values: np.ndarray
    d_omega: float
    filter: Filter
    omega_max_physical: float | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.omegas = np.asarray(self.omegas, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.omegas.shape != self.values.shape:
            raise DataError("frequency grid and values differ in length")

    def total_weight(self) -> float:
        """d_omega * sum_m A_m; close to 1 when the grid spans all gaps."""
        return float(self.d_omega * self.values.sum())


def default_grid(filt: Filter, field_scale: float = 1.0) -> TimeGrid:
    """Sampling grid tied to the broadening: d_omega = eta/4, L = 2 ceil(7h/d_omega)."""
    if filt.family == "none" or filt.eta <= 0:
        raise ParameterError("the default grid needs a filter with eta > 0")
    d_omega = filt.eta / 4.0
    length = 2 * math.ceil(7.0 * field_scale / d_omega)
    dt = 2.0 * math.pi / (length * d_omega)
    return TimeGrid(dt=dt, length=length)


def transform(grid: TimeGrid, p_plus: np.ndarray, p_minus: np.ndarray,
              filt: Filter) -> np.ndarray:
    """The double-branch cosine transform with the shared n = 0 term counted once."""
    times = grid.times
    weights = filter_value(filt, times) * (np.asarray(p_plus, dtype=float)
                                           + np.asarray(p_minus, dtype=float))
    weights[0] *= 0.5
    omegas = np.arange(grid.length) * grid.d_omega
    out = np.empty(grid.length)
    for start in range(0, grid.length, _CHUNK):
        block = omegas[start:start + _CHUNK]
        out[start:start + _CHUNK] = np.cos(np.outer(block, times)) @ weights
    return out * (grid.dt / (2.0 * math.pi))


def spectral_function(series: TimeSeries, filt: Filter) -> Spectrum:
    """Filtered spectrum of a measured (or exact) time series."""
    grid = series.grid
    values = transform(grid, series.p_plus, series.p_minus, filt)
    omegas = np.arange(grid.length) * grid.d_omega
    return Spectrum(
        omegas=omegas, values=values, d_omega=grid.d_omega, filter=filt,
        omega_max_physical=grid.length // 2 * grid.d_omega,
        provenance={"dt": grid.dt, "length": grid.length,
                    "shots": series.shots, "seed": series.seed})


def filter_fourier(filt: Filter, omega):
    """Frequency-space line shape of the filter, unit area, FWHM = 2 eta."""
    if filt.family == "none" or filt.eta <= 0:
        raise ParameterError("the unfiltered line shape is a delta; need eta > 0")
    w = np.asarray(omega, dtype=float)
    if filt.family == "lorentzian":
        out = filt.eta / (math.pi * (w**2 + filt.eta**2))
    else:
        s = filt.sigma
        out = np.exp(-w**2 / (2.0 * s**2)) / (math.sqrt(2.0 * math.pi) * s)
    return out if out.ndim else float(out)


def exact_spectrum_oracle(eig: EigenDecomposition, orientation: InputOrientation,
                          filt: Filter, grid: TimeGrid, images: int = 1) -> Spectrum:
    """Line-shape spectrum from the eigensystem, on the DFT frequency grid.

    Sums |c_u|^2 |c_v|^2 Ftilde(omega - Delta_uv) over all ordered pairs,
    which carries both the positive- and negative-frequency image of every
    gap.  Grid points are taken at their signed (folded) frequency, and the
    line shapes are periodized over `images` grid periods on each side: the
    discrete transform of a sampled series sees exactly that aliased sum.
    """
    weights = np.abs(eig.overlaps(prepare_input(orientation))) ** 2
    gaps = np.subtract.outer(eig.energies, eig.energies).ravel()
    pair_w = np.outer(weights, weights).ravel()
    keep = pair_w > 1e-14 * pair_w.max()
    gaps, pair_w = gaps[keep], pair_w[keep]

    period = grid.length * grid.d_omega
    omegas = np.arange(grid.length) * grid.d_omega
    signed = np.where(omegas <= period / 2, omegas, omegas - period)
    values = np.zeros(grid.length)
    for k in range(-images, images + 1):
        shifted = signed[:, None] + k * period - gaps[None, :]
        values += filter_fourier(filt, shifted) @ pair_w
    return Spectrum(
        omegas=omegas, values=values, d_omega=grid.d_omega, filter=filt,
        omega_max_physical=grid.length // 2 * grid.d_omega,
        provenance={"oracle": True, "images": images})


# --------------------------------------------------------------------------
# Serialization.
# --------------------------------------------------------------------------


def spectrum_to_csv(spectrum: Spectrum, path, metadata: dict | None = None,
                    extra_columns: dict | None = None):
    from ._textio import write_table

    meta = dict(metadata or {})
    meta.update({"d_omega": spectrum.d_omega,
                 "filter": spectrum.filter.family, "eta": spectrum.filter.eta})
    meta.update(spectrum.provenance)
    columns = ["m", "omega_m", "A_m"] + list(extra_columns or {})
    extras = [np.asarray(v, dtype=float) for v in (extra_columns or {}).values()]
    rows = ((m, spectrum.omegas[m], spectrum.values[m], *(e[m] for e in extras))
            for m in range(len(spectrum.omegas)))
    write_table(path, meta, columns, rows)


def read_spectrum(path):
    """Inverse of spectrum_to_csv; returns (Spectrum, metadata)."""
    from ._textio import read_table

    meta, columns, rows = read_table(path)
    if columns[:3] != ["m", "omega_m", "A_m"]:
        raise DataError(f"unexpected columns {columns}")
    omegas = np.array([float(r[1]) for r in rows])
    values = np.array([float(r[2]) for r in rows])
    filt = Filter(meta.get("filter", "none"), float(meta.get("eta", 0.0)))
    if len(omegas) < 2:
        raise NumericError("spectrum file needs at least two rows")
    return Spectrum(omegas=omegas, values=values,
                    d_omega=float(meta["d_omega"]), filter=filt), meta
