import cmath
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kkspace.model import reference_params
from kkspace.susceptibility import chi_grid, sample_profile
from kkspace.transfer import (
    SingularIndexError,
    TransferMatrix,
    contrast,
    interface_matrix,
    propagation_matrix,
    refractive_index,
    scattering,
    slice_matrix,
    stack_matrix,
    total_matrix,
)

LAM = 795e-9
K0 = 2 * math.pi / LAM


def airy_slab(n, d):
    """Closed-form amplitudes of a slab of index n and thickness d in vacuum."""
    r12 = (1 - n) / (1 + n)
    phase = cmath.exp(1j * n * K0 * d)
    den = 1 - r12**2 * phase**2
    r = r12 * (1 - phase**2) / den
    t = (1 - r12**2) * phase / den
    return r, t


def test_vacuum_slice():
    l = 10e-9
    M = slice_matrix(0.0, l, LAM)
    assert M.m11 == pytest.approx(cmath.exp(1j * K0 * l), abs=1e-15)
    assert M.m22 == pytest.approx(cmath.exp(-1j * K0 * l), abs=1e-15)
    assert M.m12 == 0 and M.m21 == 0
    assert abs(M.det - 1) < 1e-15


@pytest.mark.parametrize("chi", [0.5, 2.0, 0.3 + 0.2j, -0.4 + 1.5j])
@pytest.mark.parametrize("d", [37e-9, 400e-9, 2.1e-6])
def test_single_slab_matches_airy(chi, d):
    res = scattering(slice_matrix(chi, d, LAM))
    n = complex(refractive_index(chi))
    r, t = airy_slab(n, d)
    assert res.R_l == pytest.approx(abs(r) ** 2, rel=1e-10)
    assert res.R_r == pytest.approx(abs(r) ** 2, rel=1e-10)
    assert res.T == pytest.approx(abs(t) ** 2, rel=1e-10)
    assert res.t == pytest.approx(t, rel=1e-10)


def test_lossless_slab_fabry_perot():
    n, d = 1.8, 1.234e-6
    res = scattering(slice_matrix(n**2 - 1, d, LAM))
    F = 4 * ((1 - n) / (1 + n)) ** 2 / (1 - ((1 - n) / (1 + n)) ** 2) ** 2
    s2 = math.sin(n * K0 * d) ** 2
    assert res.R_l == pytest.approx(F * s2 / (1 + F * s2), rel=1e-10)
    assert res.T == pytest.approx(1 / (1 + F * s2), rel=1e-10)
    assert res.R_l + res.T == pytest.approx(1.0, abs=1e-12)


def test_closed_form_equals_interface_composition():
    for chi in (0.38j, 1.2 + 0.1j, -0.3 + 0.05j):
        n = complex(refractive_index(chi))
        composed = interface_matrix(n, 1.0) @ propagation_matrix(n, 10e-9, LAM) @ interface_matrix(1.0, n)
        direct = slice_matrix(chi, 10e-9, LAM)
        assert np.allclose(composed.to_array(), direct.to_array(), rtol=1e-13, atol=1e-15)


def test_resonant_slice_unimodular(ref):
    M = slice_matrix(1j * ref.K, 10e-9, LAM)
    assert abs(M.det - 1) < 1e-13
    M2 = slice_matrix(0.38j, 10e-9, LAM)
    assert abs(M2.det - 1) < 1e-13


def test_singular_index():
    with pytest.raises(SingularIndexError):
        slice_matrix(-1.0, 10e-9, LAM)


def test_branch_choice():
    n = refractive_index(np.array([-2.0 + 0j, 0.5j, 3.0, -1.5 - 1e-30j]))
    assert np.all(n.imag >= 0)
    assert np.all((n.imag > 0) | (n.real >= 0))


def test_vacuum_stack_is_phase():
    chi = np.zeros(500)
    M = stack_matrix(chi, 10e-9, LAM)
    L = 500 * 10e-9
    assert M.m11 == pytest.approx(cmath.exp(1j * K0 * L), abs=1e-12)
    assert M.m22 == pytest.approx(cmath.exp(-1j * K0 * L), abs=1e-12)
    assert abs(M.m12) < 1e-15 and abs(M.m21) < 1e-15
    res = scattering(M)
    assert res.R_l == 0 and res.R_r == 0
    assert res.T == pytest.approx(1.0, abs=1e-12)


def test_product_order():
    a = slice_matrix(0.5 + 0.1j, 30e-9, LAM)
    b = slice_matrix(1.5 + 0.2j, 30e-9, LAM)
    M = stack_matrix(np.array([0.5 + 0.1j, 1.5 + 0.2j]), 30e-9, LAM)
    assert np.allclose(M.to_array(), (b @ a).to_array(), rtol=1e-14)


def test_reversed_profile_mirror_relation(ref):
    prof = sample_profile(-30.0, ref)
    M = total_matrix(prof, LAM)
    Mr = total_matrix(prof.reversed(), LAM)
    assert np.allclose(Mr.to_array(), M.mirrored().to_array(), rtol=1e-9, atol=1e-12)
    fwd, rev = scattering(M), scattering(Mr)
    assert rev.T == pytest.approx(fwd.T, abs=1e-9)
    assert rev.R_l == pytest.approx(fwd.R_r, abs=1e-9)
    assert rev.R_r == pytest.approx(fwd.R_l, abs=1e-9)


def test_reference_stack_determinant(ref):
    M = total_matrix(sample_profile(-50.0, ref), LAM)
    assert abs(M.det - 1) < 1e-9


def test_symmetric_stack_reflects_equally():
    p = reference_params(0.0)
    for dp in (-3.0, 0.0, 2.5):
        res = scattering(total_matrix(sample_profile(dp, p), LAM))
        assert res.R_l == pytest.approx(res.R_r, abs=1e-12)


def test_region_three_values(ref):
    dps = np.arange(-80.0, -19.0, 1.0)
    M = stack_matrix(chi_grid(dps, ref), 10e-9, LAM)
    res = scattering(M)
    assert np.all(res.R_l < 0.01)
    assert 0.04 < res.T.mean() < 0.07
    assert 0.15 < res.R_r.mean() < 0.25
    assert res.R_r.max() - res.R_r.min() > 0.01  # oscillating


def test_scattering_rejects_zero_m22():
    with pytest.raises(ZeroDivisionError):
        scattering(TransferMatrix(1, 0, 0, 0))


def test_contrast_examples():
    assert contrast(0.3, 0.3) == 0.0
    assert contrast(0.0, 0.2) == 1.0
    assert contrast(0.01, 0.54) == pytest.approx(0.9636, abs=1e-4)
    assert math.isnan(contrast(0.0, 0.0))


@settings(max_examples=200, deadline=None)
@given(
    re=st.floats(-0.9, 5.0),
    im=st.floats(0.0, 5.0),
    l=st.floats(1e-9, 1e-7),
)
def test_slice_unimodular_and_passive(re, im, l):
    # slices up to ten times the default length; thicker lossy slabs grow
    # entries like exp(k Im(n) l) and det loses digits to cancellation
    M = slice_matrix(complex(re, im), l, LAM)
    assert abs(M.det - 1) < 1e-9
    res = scattering(M)
    assert res.R_l + res.T <= 1 + 1e-9
    assert res.R_r + res.T <= 1 + 1e-9


@settings(max_examples=30, deadline=None)
@given(dp=st.floats(-200, 100), delta0=st.floats(-150, 150))
def test_reciprocity_and_mirror_law(dp, delta0):
    prof = sample_profile(dp, reference_params(delta0))
    fwd = scattering(total_matrix(prof, LAM))
    rev = scattering(total_matrix(prof.reversed(), LAM))
    assert abs(fwd.T - rev.T) < 1e-9
    assert abs(fwd.R_l - rev.R_r) < 1e-9
    assert fwd.R_l + fwd.T <= 1 + 1e-9 and fwd.R_r + fwd.T <= 1 + 1e-9


@pytest.mark.parametrize("delta0", [100.0, 40.0, -70.0])
def test_parameter_mirror_identity(delta0):
    dps = np.linspace(-150, 50, 25)
    a = scattering(stack_matrix(chi_grid(dps, reference_params(delta0)), 10e-9, LAM))
    b = scattering(stack_matrix(chi_grid(dps + delta0, reference_params(-delta0)), 10e-9, LAM))
    assert np.max(np.abs(a.R_l - b.R_r)) < 1e-9
    assert np.max(np.abs(a.R_r - b.R_l)) < 1e-9


def _ref_spectrum(slice_len, params):
    dps = np.arange(-150.0, 50.0 + 1e-9, 0.25)
    q = replace(params, geometry=replace(params.geometry, slice_len=slice_len))
    return scattering(stack_matrix(chi_grid(dps, q), slice_len, LAM))


def _max_change(a, b):
    return max(np.max(np.abs(getattr(a, n) - getattr(b, n))) for n in ("R_l", "R_r", "T"))


@pytest.mark.xfail(strict=True, reason="staircase error at 10 nm is about 5e-4 near the sample edges")
def test_slice_length_convergence(ref):
    assert _max_change(_ref_spectrum(10e-9, ref), _ref_spectrum(5e-9, ref)) < 1e-4


def test_slice_length_second_order(ref):
    r = [_ref_spectrum(h, ref) for h in (10e-9, 5e-9, 2.5e-9)]
    coarse, fine = _max_change(r[0], r[1]), _max_change(r[1], r[2])
    assert coarse / fine == pytest.approx(4.0, rel=0.05)
    assert coarse < 1e-3
