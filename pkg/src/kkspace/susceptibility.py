"""Level shift, density envelope and probe susceptibilities on a spatial grid.

All detunings are in units of gamma12. Functions broadcast over numpy arrays
of positions and detunings.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import Lattice, Params

# Gaussians farther than this many widths from x are dropped (< e^-25).
TRAP_CUTOFF = 5.0


class Model(str, Enum):
    TWO_LEVEL = "two-level"
    THREE_LEVEL = "three-level"


@dataclass(frozen=True)
class SusceptibilityProfile:
    delta_p: float
    positions: np.ndarray
    chi: np.ndarray
    slice_len: float
    L: float

    def __len__(self):
        return len(self.positions)

    def reversed(self) -> "SusceptibilityProfile":
        """Mirror image x -> L - x."""
        return SusceptibilityProfile(self.delta_p, self.positions, self.chi[::-1].copy(), self.slice_len, self.L)


def _check_domain(x, L):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(x > L):
        raise ValueError(f"position outside sample [0, {L}]")
    return x


def slice_centers(L: float, slice_len: float) -> np.ndarray:
    J = int(round(L / slice_len))
    return (np.arange(J) + 0.5) * slice_len


def level_shift(x, delta0: float, L: float):
    """Ground-level shift x * delta0 / L produced by the linear control ramp."""
    x = _check_domain(x, L)
    return x * delta0 / L


def effective_detuning(delta_p, x, delta0: float, L: float):
    return np.asarray(delta_p) + level_shift(x, delta0, L)


def density_envelope(x, params: Params):
    """Atomic density relative to the peak density N0."""
    geometry = params.geometry
    x = _check_domain(x, geometry.L)
    dens = geometry.density
    if not isinstance(dens, Lattice):
        return np.ones_like(x)
    a, w = dens.period, dens.delta_x
    n_traps = int(np.floor(geometry.L / a + 0.5 + 1e-9))
    centers = (np.arange(1, n_traps + 1) - 0.5) * a
    centers = centers[centers <= geometry.L]

    flat = np.atleast_1d(x).ravel()
    out = np.zeros_like(flat)
    # only traps within TRAP_CUTOFF widths contribute
    reach = int(np.ceil(TRAP_CUTOFF * w / a)) + 1
    nearest = np.clip(np.rint(flat / a + 0.5).astype(int) - 1, 0, len(centers) - 1)
    for off in range(-reach, reach + 1):
        idx = nearest + off
        valid = (idx >= 0) & (idx < len(centers))
        d = np.where(valid, flat - centers[np.clip(idx, 0, len(centers) - 1)], np.inf)
        near = np.abs(d) <= TRAP_CUTOFF * w
        out += np.where(near, np.exp(-((np.where(near, d, 0.0) / w) ** 2)), 0.0)
    return out.reshape(np.shape(x))


def chi_two(delta_p, x, params: Params):
    """Two-level susceptibility with position-dependent level shift.

    chi = i K / (1 - i (delta_p + delta(x))), scaled by the local density.
    """
    K = params.K
    L = params.geometry.L
    d_eff = effective_detuning(delta_p, x, params.delta0, L)
    return 1j * K / (1 - 1j * d_eff) * density_envelope(x, params)


def chi_three_raw(delta_p, omega2, delta_c, g13, g23, K):
    """V-system steady-state probe susceptibility for squared control Rabi frequency ``omega2``.

    ``delta_c`` here is the control detuning as it appears in the expression;
    callers using the shift convention pass ``-control.delta_c``. All rates in
    units of gamma12.
    """
    delta_p = np.asarray(delta_p, dtype=float)
    a = g13**2 + delta_c**2 + omega2
    two_photon = g23 - 1j * (delta_c - delta_p)
    num = a * two_photon - omega2 * (g13 - 1j * delta_c)
    den = a * (two_photon * (1 - 1j * delta_p) + omega2)
    if np.any(den == 0):
        raise ZeroDivisionError("three-level susceptibility denominator vanishes")
    return 1j * K * num / den


def chi_three(delta_p, x, params: Params):
    """Three-level V-system susceptibility with control intensity ramped linearly in x.

    The printed V-system expression relaxes to an effective detuning
    ``delta_p - omega_c**2 / delta_c`` once level |3> is eliminated. The
    two-level model uses ``delta_p + delta(x)`` with ``delta0 = omega_c0**2 / delta_c``,
    so the control detuning enters here with the opposite sign. With that
    choice both models agree in the far-detuned limit.
    """
    m, c, g = params.medium, params.control, params.geometry
    x = _check_domain(x, g.L)
    omega2 = x * c.omega_c0**2 / g.L
    g13 = m.gamma13 / m.gamma12
    g23 = m.gamma23 / m.gamma12
    chi = chi_three_raw(delta_p, omega2, -c.delta_c, g13, g23, params.K)
    return chi * density_envelope(x, params)


def chi_grid(delta_ps, params: Params, model: Model | str = Model.TWO_LEVEL) -> np.ndarray:
    """Susceptibility at every slice centre for each detuning; shape (n_detunings, J)."""
    model = Model(model)
    g = params.geometry
    x = slice_centers(g.L, g.slice_len)
    dp = np.atleast_1d(np.asarray(delta_ps, dtype=float))[:, None]
    fn = chi_two if model is Model.TWO_LEVEL else chi_three
    return fn(dp, x[None, :], params)


def sample_profile(delta_p: float, params: Params, model: Model | str = Model.TWO_LEVEL) -> SusceptibilityProfile:
    g = params.geometry
    x = slice_centers(g.L, g.slice_len)
    chi = chi_grid([delta_p], params, model)[0]
    return SusceptibilityProfile(float(delta_p), x, chi, g.slice_len, g.L)
