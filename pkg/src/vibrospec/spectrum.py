"""Absorption spectra from correlation blocks, peak analysis and sum rules."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import signal

__all__ = [
    "SpectrumResult",
    "Peak",
    "PeakList",
    "absorption",
    "spectrum_from_blocks",
    "sweep_from_rows",
    "integrated_intensity",
    "find_peaks",
]


@dataclass(frozen=True)
class SpectrumResult:
    """Spectrum values on a frequency grid, plus full run provenance.

    `f` has shape (len(omega),) for a plain spectrum or
    (len(axis_values), len(omega)) for a parameter sweep.  `meta` carries the
    complete input record needed to reproduce the run.
    """

    omega: np.ndarray
    f: np.ndarray
    meta: dict
    axis_values: np.ndarray = None

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        f = np.asarray(self.f, dtype=float)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "f", f)
        if self.axis_values is not None:
            axis = np.asarray(self.axis_values, dtype=float)
            object.__setattr__(self, "axis_values", axis)
            if f.shape != (len(axis), len(omega)):
                raise ValueError("2-d spectrum shape must be (axis, omega)")
        elif f.shape != omega.shape:
            raise ValueError("spectrum and grid lengths differ")

    @property
    def epsilon(self) -> float:
        return float(self.meta["numerics"]["epsilon"])


@dataclass(frozen=True)
class Peak:
    omega: float
    height: float
    prominence: float


@dataclass(frozen=True)
class PeakList:
    peaks: tuple

    def __len__(self):
        return len(self.peaks)

    def positions(self) -> np.ndarray:
        return np.array([p.omega for p in self.peaks])


def absorption(block, dipoles) -> float:
    """Spectrum value at one Laplace point: sum_nm mu_n mu_m Re c~_nm."""
    mu = np.asarray(dipoles, dtype=float)
    return float(mu @ block.c_tilde.real @ mu)


def spectrum_from_blocks(blocks, dipoles, meta) -> SpectrumResult:
    """Assemble a 1-d SpectrumResult from per-point correlation blocks."""
    omega = np.array([b.s.omega for b in blocks])
    f = np.array([absorption(b, dipoles) for b in blocks])
    meta = dict(meta)
    meta["residual_max"] = max((b.residual for b in blocks), default=0.0)
    return SpectrumResult(omega=omega, f=f, meta=meta)


def sweep_from_rows(rows, axis_values, dipoles, meta) -> SpectrumResult:
    """Assemble a 2-d SpectrumResult from sweep_parameter output."""
    if len(rows) == 0:
        raise ValueError("no sweep rows")
    omega = np.array([b.s.omega for b in rows[0]])
    f = np.array([[absorption(b, dipoles) for b in row] for row in rows])
    meta = dict(meta)
    meta["residual_max"] = max(b.residual for row in rows for b in row)
    return SpectrumResult(
        omega=omega, f=f, meta=meta, axis_values=np.asarray(axis_values, float)
    )


def integrated_intensity(result: SpectrumResult) -> float:
    """Trapezoidal integral of F over the grid.

    For unit dipoles this equals pi * N independent of g, gamma and V, because
    the correlation starts at the identity.  A warning is issued when the
    boundary values are not negligible against the peak (mass outside the
    window would be lost).
    """
    f = result.f
    if f.ndim != 1:
        return np.array([_integrate_row(result.omega, row) for row in f])
    return _integrate_row(result.omega, f)


def _integrate_row(omega, f) -> float:
    top = np.abs(f).max()
    if top > 0 and max(abs(f[0]), abs(f[-1])) >= 1e-4 * top:
        warnings.warn(
            "spectrum is not negligible at the grid boundary; the integral "
            "misses out-of-window mass",
            stacklevel=3,
        )
    return float(np.trapezoid(f, omega))


def find_peaks(
    result: SpectrumResult,
    rel_threshold: float = 1e-3,
    min_separation: float = None,
) -> PeakList:
    """Local maxima above rel_threshold * max(f), merged within min_separation.

    Maxima closer than `min_separation` (default 2 epsilon, the resolvability
    scale of the artificial broadening) keep only the higher one.  Positions
    and heights are refined by a three-point parabolic fit.
    """
    if result.f.ndim != 1:
        raise ValueError("find_peaks expects a 1-d spectrum; select a sweep row first")
    if not 0.0 < rel_threshold < 1.0:
        raise ValueError("rel_threshold must lie strictly between 0 and 1")
    f = result.f
    omega = result.omega
    if len(f) < 3 or not np.any(f > 0):
        raise ValueError("empty spectrum: nothing to search for peaks")
    if min_separation is None:
        min_separation = 2.0 * result.epsilon

    height = rel_threshold * f.max()
    idx, _ = signal.find_peaks(f, height=height)
    if len(idx) == 0:
        return PeakList(peaks=())
    prominences = signal.peak_prominences(f, idx)[0]

    merged = []
    for i, prom in zip(idx, prominences):
        if merged and omega[i] - omega[merged[-1][0]] < min_separation:
            if f[i] > f[merged[-1][0]]:
                merged[-1] = (i, prom)
        else:
            merged.append((i, prom))

    peaks = []
    for i, prom in merged:
        w, h = _parabolic_refine(omega, f, i)
        peaks.append(Peak(omega=w, height=h, prominence=float(prom)))
    return PeakList(peaks=tuple(peaks))


def _parabolic_refine(omega, f, i):
    """Sub-grid vertex of the parabola through (i-1, i, i+1)."""
    if i == 0 or i == len(f) - 1:
        return float(omega[i]), float(f[i])
    y0, y1, y2 = f[i - 1], f[i], f[i + 1]
    denom = y0 - 2.0 * y1 + y2
    if denom >= 0.0:  # not locally concave; keep the grid point
        return float(omega[i]), float(f[i])
    delta = 0.5 * (y0 - y2) / denom
    h = omega[i + 1] - omega[i]
    return float(omega[i] + delta * h), float(y1 - 0.25 * (y0 - y2) * delta)
