"""Spatial Kramers-Kronig susceptibility of a ramped cold-atom sample and its 1D scattering."""

from .model import (
    AtomMedium,
    ControlField,
    Lattice,
    Params,
    SampleGeometry,
    Uniform,
    dimensionless_amplitude,
    lattice_params,
    reference_params,
    validate,
)
from .susceptibility import Model, chi_three, chi_two, sample_profile
from .kk import Regime, classify_regime, d_kk, kk_reconstruct
from .transfer import contrast, scattering, slice_matrix, total_matrix
from .experiments import ScanGrid, run_lattice, run_length_sweep, run_map, run_profile, run_spectrum

__version__ = "0.1.0"
