"""Transfer matrices for a stack of thin homogeneous slices in vacuum.

Field basis: (E+, E-) forward/backward vacuum amplitudes referenced at a
slice face. A matrix maps the left-face amplitudes to the right-face ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class SingularIndexError(ValueError):
    pass


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex matrix; entries may be numpy arrays for batched stacks."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex

    @property
    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def to_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def mirrored(self) -> "TransferMatrix":
        """Matrix of the spatially reversed stack (valid for unimodular M)."""
        return TransferMatrix(self.m11, -self.m21, -self.m12, self.m22)


@dataclass(frozen=True)
class ScatteringResult:
    delta_p: float
    r_l: complex
    r_r: complex
    t: complex

    @property
    def R_l(self):
        return np.abs(self.r_l) ** 2

    @property
    def R_r(self):
        return np.abs(self.r_r) ** 2

    @property
    def T(self):
        return np.abs(self.t) ** 2


def refractive_index(chi):
    """sqrt(1 + chi) on the branch Im(n) >= 0 (Re(n) >= 0 when Im(n) == 0)."""
    n = np.sqrt(np.asarray(1 + chi, dtype=complex))
    flip = (n.imag < 0) | ((n.imag == 0) & (n.real < 0))
    return np.where(flip, -n, n)


def _slice_entries(chi, k_l):
    chi = np.asarray(chi, dtype=complex)
    if np.any(chi == -1):
        raise SingularIndexError("chi = -1 gives a vanishing refractive index")
    n = refractive_index(chi)
    phase = n * k_l
    c = np.cos(phase)
    s = np.sin(phase)
    s_over_n = s / n
    diag = 0.5j * (s_over_n + n * s)
    off = 0.5j * chi * s_over_n
    return c + diag, off, -off, c - diag


def slice_matrix(chi, slice_len, lambda_p: float) -> TransferMatrix:
    """Unimodular matrix of a slab of index sqrt(1 + chi) embedded in vacuum.

    Composed as interface(n -> 1) . propagation . interface(1 -> n), which
    collapses to

        [[cos + i (n + 1/n)/2 sin,   i (n^2 - 1)/(2n) sin],
         [-i (n^2 - 1)/(2n) sin,     cos - i (n + 1/n)/2 sin]]

    with sin/cos of n k l; the determinant is exactly one. ``chi`` and
    ``slice_len`` broadcast against each other.
    """
    slice_len = np.asarray(slice_len, dtype=float)
    if np.any(slice_len <= 0):
        raise ValueError("slice_len must be positive")
    k_l = 2 * math.pi / lambda_p * slice_len
    return TransferMatrix(*_slice_entries(chi, k_l))


def interface_matrix(n_a, n_b) -> TransferMatrix:
    """Fields on side a to side b of an n_a | n_b interface; det = n_a / n_b."""
    t_ba = 2 * n_b / (n_a + n_b)
    r_ba = (n_b - n_a) / (n_a + n_b)
    return TransferMatrix(1 / t_ba, r_ba / t_ba, r_ba / t_ba, 1 / t_ba)


def propagation_matrix(n, length, lambda_p) -> TransferMatrix:
    e = np.exp(1j * n * 2 * math.pi / lambda_p * length)
    return TransferMatrix(e, 0 * e, 0 * e, 1 / e)


def stack_matrix(chi: np.ndarray, slice_len: float, lambda_p: float) -> TransferMatrix:
    """Ordered product M_J ... M_1 along the last axis of ``chi``.

    Leading axes are batch dimensions (e.g. detunings); the result holds
    arrays of that batch shape.
    """
    chi = np.asarray(chi, dtype=complex)
    if chi.shape[-1] == 0:
        raise ValueError("empty profile")
    k_l = 2 * math.pi / lambda_p * slice_len
    a11, a12, a21, a22 = _slice_entries(chi, k_l)
    m11, m12, m21, m22 = a11[..., 0], a12[..., 0], a21[..., 0], a22[..., 0]
    for j in range(1, chi.shape[-1]):
        b11, b12, b21, b22 = a11[..., j], a12[..., j], a21[..., j], a22[..., j]
        m11, m12, m21, m22 = (
            b11 * m11 + b12 * m21,
            b11 * m12 + b12 * m22,
            b21 * m11 + b22 * m21,
            b21 * m12 + b22 * m22,
        )
    return TransferMatrix(m11, m12, m21, m22)


def total_matrix(profile, lambda_p: float) -> TransferMatrix:
    """Total matrix of a :class:`SusceptibilityProfile`, slice at x = 0 applied first."""
    return stack_matrix(profile.chi, profile.slice_len, lambda_p)


def scattering(matrix: TransferMatrix, delta_p=math.nan) -> ScatteringResult:
    """Amplitudes for incidence from the left and from the right.

    Left: (1, r_l) -> (t, 0); right: (0, t) -> (r_r, 1).
    """
    m22 = matrix.m22
    if np.any(m22 == 0):
        raise ZeroDivisionError("m22 vanishes; scattering amplitudes undefined")
    return ScatteringResult(delta_p, -matrix.m21 / m22, matrix.m12 / m22, 1 / m22)


def contrast(R_l, R_r):
    """(R_r - R_l) / (R_r + R_l); NaN where both reflectivities vanish."""
    R_l = np.asarray(R_l, dtype=float)
    R_r = np.asarray(R_r, dtype=float)
    total = R_l + R_r
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(total > 0, (R_r - R_l) / total, np.nan)
    return c if c.ndim else float(c)
