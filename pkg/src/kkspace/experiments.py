"""Scan drivers: profiles, spectra, (delta0, delta_p) maps, length sweeps, lattice contrast.

Detuning scans are cut into fixed-size blocks that are farmed out to a
thread pool. Block boundaries never depend on the worker count, so results
are bit-identical for any number of threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import peak_prominences

from .kk import DEFAULT_THRESHOLDS, Regime, Thresholds, classify_regime, dkk_batch, principal_value_transform
from .model import Params, lattice_params
from .susceptibility import Model, chi_grid, slice_centers
from .transfer import contrast, stack_matrix

BLOCK = 256
MAX_EVALUATIONS = 4_000_000
PEAK_PROMINENCE = 0.005


class InsufficientDataError(ValueError):
    pass


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("KKSPACE_THREADS", "1")))
    except ValueError:
        return 1


def axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Inclusive uniform axis lo, lo + step, ... <= hi."""
    if not step > 0:
        raise ValueError("step must be positive")
    if hi < lo:
        raise ValueError("empty range")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


@dataclass(frozen=True)
class ScanGrid:
    """Scan axes in units of gamma12 (lengths in m)."""

    delta_p_min: float = -150.0
    delta_p_max: float = 50.0
    delta_p_step: float = 0.25
    delta0_min: float | None = None
    delta0_max: float | None = None
    delta0_step: float | None = None
    max_evaluations: int = MAX_EVALUATIONS

    def delta_p(self) -> np.ndarray:
        return axis(self.delta_p_min, self.delta_p_max, self.delta_p_step)

    def delta0(self) -> np.ndarray:
        if self.delta0_min is None or self.delta0_max is None or self.delta0_step is None:
            raise ValueError("delta0 axis not configured")
        return axis(self.delta0_min, self.delta0_max, self.delta0_step)

    def check(self, n_points: int) -> None:
        if n_points > self.max_evaluations:
            raise ValueError(f"scan has {n_points} points, limit is {self.max_evaluations}")


@dataclass(frozen=True)
class SpectrumRow:
    delta_p: float
    R_l: float
    R_r: float
    T: float
    C: float
    d_kk: float
    regime: Regime


@dataclass(frozen=True)
class ProfileTable:
    delta_p: float
    x: np.ndarray
    chi: np.ndarray
    chi_kk: np.ndarray


@dataclass(frozen=True)
class MapResult:
    delta0: np.ndarray
    delta_p: np.ndarray
    d_kk: np.ndarray
    R_l: np.ndarray
    R_r: np.ndarray


@dataclass(frozen=True)
class LatticeReport:
    rows: list[SpectrumRow]
    max_C: float
    delta_p_at_max_C: float
    max_R_r: float
    R_l_at_max_R_r: float
    delta_p_at_max_R_r: float
    band: tuple[float, float] | None
    contrast_threshold: float

    @property
    def band_width(self) -> float:
        return 0.0 if self.band is None else self.band[1] - self.band[0]


@dataclass
class _Spectrum:
    delta_p: np.ndarray
    R_l: np.ndarray
    R_r: np.ndarray
    T: np.ndarray
    d_kk: np.ndarray = field(default=None)


def _block(delta_ps, params, model, thresholds, with_dkk):
    g = params.geometry
    chi = chi_grid(delta_ps, params, model)
    M = stack_matrix(chi, g.slice_len, params.medium.lambda_p)
    t = 1 / M.m22
    R_l = np.abs(M.m21 * t) ** 2
    R_r = np.abs(M.m12 * t) ** 2
    T = np.abs(t) ** 2
    d = dkk_batch(delta_ps, params, model, thresholds) if with_dkk else None
    return R_l, R_r, T, d


def _evaluate(tasks, threads):
    """Run (fn, args) tasks on a pool; results in task order."""
    threads = threads or default_threads()
    if threads <= 1 or len(tasks) <= 1:
        return [fn(*args) for fn, args in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, *args) for fn, args in tasks]
        return [f.result() for f in futures]


def _spectrum_tasks(delta_ps, params, model, thresholds, with_dkk):
    return [
        (_block, (delta_ps[i : i + BLOCK], params, model, thresholds, with_dkk))
        for i in range(0, len(delta_ps), BLOCK)
    ]


def _assemble(delta_ps, parts, with_dkk) -> _Spectrum:
    R_l = np.concatenate([p[0] for p in parts])
    R_r = np.concatenate([p[1] for p in parts])
    T = np.concatenate([p[2] for p in parts])
    d = np.concatenate([p[3] for p in parts]) if with_dkk else None
    return _Spectrum(np.asarray(delta_ps, dtype=float), R_l, R_r, T, d)


def spectrum_arrays(delta_ps, params: Params, model=Model.TWO_LEVEL, thresholds=DEFAULT_THRESHOLDS, threads=None, with_dkk=True) -> _Spectrum:
    delta_ps = np.atleast_1d(np.asarray(delta_ps, dtype=float))
    parts = _evaluate(_spectrum_tasks(delta_ps, params, model, thresholds, with_dkk), threads)
    return _assemble(delta_ps, parts, with_dkk)


def _rows(spec: _Spectrum, thresholds) -> list[SpectrumRow]:
    C = contrast(spec.R_l, spec.R_r)
    return [
        SpectrumRow(
            float(spec.delta_p[i]),
            float(spec.R_l[i]),
            float(spec.R_r[i]),
            float(spec.T[i]),
            float(C[i]),
            float(spec.d_kk[i]),
            classify_regime(float(spec.d_kk[i]), thresholds),
        )
        for i in range(len(spec.delta_p))
    ]


def run_profile(delta_p: float, params: Params, model=Model.TWO_LEVEL) -> ProfileTable:
    """chi and its spatial KK reconstruction at the slice centres."""
    g = params.geometry
    x = slice_centers(g.L, g.slice_len)
    chi = chi_grid([delta_p], params, model)[0]
    chi_kk = principal_value_transform(chi.imag, g.slice_len, g.L)
    return ProfileTable(float(delta_p), x, chi, chi_kk)


def run_spectrum(grid: ScanGrid, params: Params, model=Model.TWO_LEVEL, thresholds=DEFAULT_THRESHOLDS, threads=None) -> list[SpectrumRow]:
    dps = grid.delta_p()
    grid.check(len(dps))
    return _rows(spectrum_arrays(dps, params, model, thresholds, threads), thresholds)


def run_map(grid: ScanGrid, params: Params, model=Model.TWO_LEVEL, thresholds=DEFAULT_THRESHOLDS, threads=None) -> MapResult:
    """D_kk, R_l and R_r over (delta0, delta_p); arrays have shape (n_delta0, n_delta_p)."""
    d0s = grid.delta0()
    dps = grid.delta_p()
    grid.check(len(d0s) * len(dps))
    tasks, spans = [], []
    for d0 in d0s:
        row = _spectrum_tasks(dps, params.with_shift(float(d0)), model, thresholds, True)
        spans.append((len(tasks), len(tasks) + len(row)))
        tasks += row
    parts = _evaluate(tasks, threads)
    specs = [_assemble(dps, parts[a:b], True) for a, b in spans]
    return MapResult(
        d0s,
        dps,
        np.vstack([s.d_kk for s in specs]),
        np.vstack([s.R_l for s in specs]),
        np.vstack([s.R_r for s in specs]),
    )


def run_length_sweep(lengths, grid: ScanGrid, params: Params, model=Model.TWO_LEVEL, thresholds=DEFAULT_THRESHOLDS, threads=None) -> dict[float, list[SpectrumRow]]:
    """One spectrum per sample length with the peak density held fixed."""
    dps = grid.delta_p()
    grid.check(len(dps) * len(lengths))
    tasks, spans = [], []
    for L in lengths:
        row = _spectrum_tasks(dps, params.with_length(float(L)), model, thresholds, True)
        spans.append((len(tasks), len(tasks) + len(row)))
        tasks += row
    parts = _evaluate(tasks, threads)
    return {float(L): _rows(_assemble(dps, parts[a:b], True), thresholds) for L, (a, b) in zip(lengths, spans)}


def unbroken_band(rows: list[SpectrumRow]) -> list[SpectrumRow]:
    """Longest contiguous run of unbroken rows."""
    best, cur = [], []
    for row in rows:
        if row.regime is Regime.UNBROKEN:
            cur.append(row)
            if len(cur) > len(best):
                best = list(cur)
        else:
            cur = []
    return best


def local_maxima(values, prominence: float = PEAK_PROMINENCE) -> np.ndarray:
    """Indices of strict three-point maxima whose prominence reaches ``prominence``."""
    v = np.asarray(values, dtype=float)
    if len(v) < 3:
        return np.array([], dtype=int)
    idx = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])) + 1
    if len(idx) == 0:
        return idx
    prom = peak_prominences(v, idx)[0]
    return idx[prom >= prominence]


def estimate_oscillation_period(rows, prominence: float = PEAK_PROMINENCE) -> float:
    """Mean spacing between successive R_r maxima, in units of gamma12.

    ``rows`` should already be restricted to the unbroken band.
    """
    dps = np.array([r.delta_p for r in rows])
    R_r = np.array([r.R_r for r in rows])
    peaks = local_maxima(R_r, prominence)
    if len(peaks) < 3:
        raise InsufficientDataError(f"need at least 3 maxima of R_r, found {len(peaks)}")
    return float(np.mean(np.diff(dps[peaks])))


def rough_period(params: Params) -> float:
    """Spacing estimate delta0 * lambda_p / (2 L) from a lambda/2 shift of the resonance."""
    return abs(params.delta0) * params.medium.lambda_p / (2 * params.geometry.L)


def contrast_band(dps, C, threshold: float) -> tuple[float, float] | None:
    """Widest contiguous detuning interval with C above ``threshold``."""
    best = None
    start = None
    above = np.nan_to_num(np.asarray(C), nan=-np.inf) > threshold
    for i, flag in enumerate(list(above) + [False]):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            lo, hi = float(dps[start]), float(dps[i - 1])
            if best is None or hi - lo > best[1] - best[0]:
                best = (lo, hi)
            start = None
    return best


def run_lattice(
    params: Params | None = None,
    grid: ScanGrid | None = None,
    contrast_threshold: float = 0.9,
    r_l_cap: float = 0.02,
    model=Model.TWO_LEVEL,
    thresholds=DEFAULT_THRESHOLDS,
    threads=None,
) -> LatticeReport:
    """Spectrum of the Bragg-lattice sample plus contrast statistics.

    ``max_R_r`` is taken over the rows where R_l stays at or below ``r_l_cap``.
    """
    params = params or lattice_params()
    grid = grid or ScanGrid(-45.0, 15.0, 0.25)
    rows = run_spectrum(grid, params, model, thresholds, threads)
    dps = np.array([r.delta_p for r in rows])
    C = np.array([r.C for r in rows])
    R_l = np.array([r.R_l for r in rows])
    R_r = np.array([r.R_r for r in rows])

    Cz = np.nan_to_num(C, nan=-np.inf)
    i_c = int(np.argmax(Cz))
    capped = np.where(R_l <= r_l_cap, R_r, -np.inf)
    i_r = int(np.argmax(capped))
    if not np.isfinite(capped[i_r]):
        max_r, r_l_at, dp_r = math.nan, math.nan, math.nan
    else:
        max_r, r_l_at, dp_r = float(R_r[i_r]), float(R_l[i_r]), float(dps[i_r])
    return LatticeReport(
        rows=rows,
        max_C=float(C[i_c]),
        delta_p_at_max_C=float(dps[i_c]),
        max_R_r=max_r,
        R_l_at_max_R_r=r_l_at,
        delta_p_at_max_R_r=dp_r,
        band=contrast_band(dps, C, contrast_threshold),
        contrast_threshold=contrast_threshold,
    )
