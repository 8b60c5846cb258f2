import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kkspace.model import (
    AtomMedium,
    ControlField,
    Lattice,
    SampleGeometry,
    ValidationError,
    dimensionless_amplitude,
    reference_params,
    validate,
    validate_params,
)

# independent evaluation of N0 d^2 / (eps0 hbar gamma) with the stated constants
EPS0 = 8.8541878128e-12
HBAR = 1.054571817e-34


def k_oracle(N0, d12, gamma):
    return (N0 / EPS0) * (d12 / HBAR) * (d12 / gamma)


def test_amplitude_two_pi_convention():
    m = AtomMedium(N0=2.0e19, d12=1.79e-29, gamma12=2 * math.pi * 2.87e6, gamma13=1.0, gamma23=2 * math.pi * 2.87e6 + 1.0)
    K = dimensionless_amplitude(m)
    assert K == pytest.approx(k_oracle(2.0e19, 1.79e-29, 2 * math.pi * 2.87e6), rel=1e-14)
    assert K == pytest.approx(0.3806, abs=5e-5)


def test_amplitude_linear_in_density():
    base = AtomMedium(N0=2.0e19, gamma12=2 * math.pi * 2.87e6, gamma13=1.0, gamma23=2 * math.pi * 2.87e6 + 1.0)
    low = AtomMedium(N0=2.0e18, gamma12=base.gamma12, gamma13=1.0, gamma23=base.gamma23)
    assert dimensionless_amplitude(low) == pytest.approx(0.03806, abs=5e-6)


def test_default_medium_amplitude():
    # default uses gamma12 = 2.87e6 rad/s
    assert dimensionless_amplitude(AtomMedium()) == pytest.approx(k_oracle(2.0e19, 1.79e-29, 2.87e6), rel=1e-14)


def test_zero_dipole_rejected():
    with pytest.raises(ValidationError, match="d12"):
        dimensionless_amplitude(AtomMedium(d12=0.0))


@settings(max_examples=50, deadline=None)
@given(alpha=st.floats(1e-3, 1e3), beta=st.floats(1e-2, 1e2))
def test_amplitude_scaling(alpha, beta):
    m = AtomMedium()
    K = dimensionless_amplitude(m)
    assert dimensionless_amplitude(AtomMedium(N0=alpha * m.N0)) == pytest.approx(alpha * K, rel=1e-12)
    assert dimensionless_amplitude(AtomMedium(d12=beta * m.d12)) == pytest.approx(beta**2 * K, rel=1e-12)


@given(g21=st.floats(1e3, 1e9), g31=st.floats(1e3, 1e9))
def test_gamma23_from_decay_rates_exact(g21, g31):
    m = AtomMedium.from_decay_rates(g21, g31)
    assert abs(m.gamma23 - m.gamma12 - m.gamma13) <= 4 * np.finfo(float).eps * m.gamma23
    assert validate(m, ControlField.from_shift(100.0), SampleGeometry()).ok


def test_reference_parameters_validate_cleanly():
    report = validate_params(reference_params())
    assert report.ok
    assert report.warnings == []


def test_near_resonant_control_warns():
    control = ControlField(omega_c0=1000.0, delta_c=5000.0)
    report = validate(AtomMedium(), control, SampleGeometry())
    assert report.ok
    assert [k for k, _ in report.warnings] == ["delta_c"]


def test_zero_length_is_hard_violation():
    report = validate(AtomMedium(), ControlField.from_shift(100.0), SampleGeometry(L=0.0))
    assert not report.ok
    assert "L" in [k for k, _ in report.errors]


@pytest.mark.parametrize(
    "geometry, key",
    [
        (SampleGeometry(L=5e-6, slice_len=1e-6), "slice_len"),
        (SampleGeometry(L=5e-6, slice_len=6e-6), "slice_len"),
        (SampleGeometry(density=Lattice(period=400e-9, delta_x=500e-9)), "lattice_width"),
        (SampleGeometry(L=5e-6, density=Lattice(period=6e-6, delta_x=1e-6)), "lattice_period"),
    ],
)
def test_geometry_violations(geometry, key):
    report = validate(AtomMedium(), ControlField.from_shift(100.0), geometry)
    assert key in [k for k, _ in report.errors]


def test_inconsistent_gamma23_rejected():
    m = AtomMedium(gamma23=1e7)
    report = validate(m, ControlField.from_shift(1.0), SampleGeometry())
    assert "gamma23" in [k for k, _ in report.errors]


def test_zero_control_detuning_rejected():
    report = validate(AtomMedium(), ControlField(omega_c0=1.0, delta_c=0.0), SampleGeometry())
    assert "delta_c" in [k for k, _ in report.errors]


@pytest.mark.parametrize("delta0", [100.0, -100.0, 30.0, 1e-3])
def test_control_from_shift_roundtrip(delta0):
    c = ControlField.from_shift(delta0, 50.0)
    assert c.delta0 == pytest.approx(delta0, rel=1e-12)
    assert abs(c.delta_c) == pytest.approx(50.0 * c.omega_c0)
    assert math.copysign(1, c.delta_c) == math.copysign(1, delta0)


def test_slice_count():
    assert SampleGeometry(L=5e-6, slice_len=10e-9).n_slices == 500
