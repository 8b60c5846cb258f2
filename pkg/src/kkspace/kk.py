"""Spatial Kramers-Kronig reconstruction and the D_kk figure of merit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.signal import fftconvolve

from .model import Params
from .susceptibility import Model, SusceptibilityProfile, chi_grid


class Regime(str, Enum):
    UNBROKEN = "unbroken"
    TRANSITIONAL = "transitional"
    BROKEN = "broken"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class Thresholds:
    unbroken: float = 0.05
    broken: float = 0.95
    # denominator floor relative to K * L
    den_floor: float = 1e-12


DEFAULT_THRESHOLDS = Thresholds()


@dataclass(frozen=True)
class KKReport:
    delta_p: float
    d_kk: float
    regime: Regime
    residual: float


def principal_value_transform(f: np.ndarray, slice_len: float, L: float) -> np.ndarray:
    """(1/pi) PV int_0^L f(s) / (s - x) ds at every midpoint-grid node.

    ``f`` is sampled at ``x_i = (i + 1/2) * slice_len``; the last axis is the
    spatial one so a stack of profiles is transformed in one call. The
    singularity is subtracted:

        PV int f(s)/(s-x) ds = int [f(s) - f(x)]/(s-x) ds + f(x) ln((L-x)/x)

    and the regular part uses equal weights h on every node (trapezoid over the
    nodes closed by the two boundary half-cells). Its value at s = x is f'(x).
    """
    f = np.asarray(f, dtype=float)
    J = f.shape[-1]
    h = slice_len
    x = (np.arange(J) + 0.5) * h

    m = np.arange(-(J - 1), J, dtype=float)
    kernel = np.zeros_like(m)
    nz = m != 0
    kernel[nz] = 1.0 / m[nz]
    # full[J-1+i] = sum_j f_j / (j - i)
    full = fftconvolve(f, kernel[::-1].reshape((1,) * (f.ndim - 1) + (-1,)), axes=-1)
    cross = full[..., J - 1 : 2 * J - 1]

    harmonic = np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, J))))
    i = np.arange(J)
    self_sum = harmonic[J - 1 - i] - harmonic[i]

    deriv = np.gradient(f, h, axis=-1)
    regular = cross - f * self_sum + h * deriv
    return (regular + f * np.log((L - x) / x)) / math.pi


def kk_reconstruct(profile: SusceptibilityProfile) -> np.ndarray:
    """Real part of chi rebuilt from its imaginary part over the sample."""
    return principal_value_transform(profile.chi.imag, profile.slice_len, profile.L)


def _dkk_parts(chi: np.ndarray, slice_len: float, L: float):
    kk = principal_value_transform(chi.imag, slice_len, L)
    num = slice_len * np.sum(chi.real - kk, axis=-1)
    den = slice_len * np.sum(chi.real, axis=-1)
    return num, den, kk


def dkk_batch(
    delta_ps,
    params: Params,
    model: Model | str = Model.TWO_LEVEL,
    thresholds: Thresholds = DEFAULT_THRESHOLDS,
    resolve_symmetric: bool = True,
) -> np.ndarray:
    """D_kk for each detuning; NaN marks an indeterminate value.

    When |int chi' dx| drops below ``den_floor * K * L`` the ratio is 0/0.
    With ``resolve_symmetric`` such a point takes the mean of the two
    one-sided values at ``delta_p -/+ h``, provided both are determinate and
    differ by no more than twice the unbroken threshold.
    """
    delta_ps = np.atleast_1d(np.asarray(delta_ps, dtype=float))
    g = params.geometry
    floor = thresholds.den_floor * params.K * g.L
    chi = chi_grid(delta_ps, params, model)
    num, den, _ = _dkk_parts(chi, g.slice_len, g.L)
    out = np.full(delta_ps.shape, np.nan)
    ok = np.abs(den) > floor
    out[ok] = num[ok] / np.abs(den[ok])

    if resolve_symmetric and not ok.all():
        h = 1e-6 * max(1.0, abs(params.delta0))
        bad = delta_ps[~ok]
        side = chi_grid(np.concatenate((bad - h, bad + h)), params, model)
        n2, d2, _ = _dkk_parts(side, g.slice_len, g.L)
        n2, d2 = n2.reshape(2, -1), d2.reshape(2, -1)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.where(np.abs(d2) > floor, n2 / np.abs(d2), np.nan)
        # a jump wider than the unbroken band is a genuine discontinuity
        jump = np.abs(vals[1] - vals[0])
        out[~ok] = np.where(jump <= 2 * thresholds.unbroken, vals.mean(axis=0), np.nan)
    return out


def d_kk(delta_p: float, params: Params, model=Model.TWO_LEVEL, thresholds=DEFAULT_THRESHOLDS, resolve_symmetric=True) -> float:
    """Figure of merit int (chi' - chi'_KK) dx / |int chi' dx|; NaN when indeterminate."""
    return float(dkk_batch([delta_p], params, model, thresholds, resolve_symmetric)[0])


def classify_regime(value: float, thresholds: Thresholds = DEFAULT_THRESHOLDS) -> Regime:
    if value is None or not math.isfinite(value):
        return Regime.INDETERMINATE
    a = abs(value)
    if a < thresholds.unbroken:
        return Regime.UNBROKEN
    if a > thresholds.broken:
        return Regime.BROKEN
    return Regime.TRANSITIONAL


def kk_report(delta_p: float, params: Params, model=Model.TWO_LEVEL, thresholds=DEFAULT_THRESHOLDS) -> KKReport:
    g = params.geometry
    chi = chi_grid([delta_p], params, model)[0]
    kk = principal_value_transform(chi.imag, g.slice_len, g.L)
    value = d_kk(delta_p, params, model, thresholds)
    scale = np.max(np.abs(chi.real))
    residual = float(np.max(np.abs(kk - chi.real)) / scale) if scale > 0 else 0.0
    return KKReport(float(delta_p), value, classify_regime(value, thresholds), residual)
