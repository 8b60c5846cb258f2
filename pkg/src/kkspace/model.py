"""Physical constants, parameter sets and validation.

Rates and detunings are carried in units of the probe coherence dephasing
rate gamma12 everywhere except inside :class:`AtomMedium`, which keeps SI
values (rad/s). Lengths are in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Literal, Union

EPSILON_0 = 8.8541878128e-12  # F/m
HBAR = 1.054571817e-34  # J s

FAR_DETUNING_FACTOR = 10.0


class ValidationError(ValueError):
    """Raised when a parameter set violates a hard invariant."""

    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__("; ".join(f"{key}: {msg}" for key, msg in report.errors))


@dataclass(frozen=True)
class AtomMedium:
    """Atomic and probe constants.

    d12 in C m, rates in rad/s, N0 in m^-3, lambda_p in m.
    """

    d12: float = 1.79e-29
    gamma12: float = 2.87e6
    gamma13: float = 3.03e6
    gamma23: float = 2.87e6 + 3.03e6
    N0: float = 2.0e19
    lambda_p: float = 795e-9

    @classmethod
    def from_decay_rates(cls, gamma21_decay, gamma31_decay, **kwargs):
        """Build a medium from population decay rates of levels |2> and |3>."""
        g12 = gamma21_decay / 2
        g13 = gamma31_decay / 2
        return cls(gamma12=g12, gamma13=g13, gamma23=g12 + g13, **kwargs)

    @property
    def k(self) -> float:
        return 2 * math.pi / self.lambda_p


@dataclass(frozen=True)
class ControlField:
    """Control beam in units of gamma12.

    ``delta_c`` follows the sign of the level shift: ``delta0 = omega_c0**2 / delta_c``.
    """

    omega_c0: float
    delta_c: float

    @classmethod
    def from_shift(cls, delta0: float, detuning_ratio: float = 100.0) -> "ControlField":
        """Control field producing maximal shift ``delta0`` with ``|delta_c| = ratio * omega_c0``.

        A zero shift is represented by a vanishing Rabi frequency at the given
        ratio-scaled detuning.
        """
        if detuning_ratio <= 0:
            raise ValueError("detuning_ratio must be positive")
        omega = detuning_ratio * abs(delta0)
        if delta0 == 0:
            return cls(omega_c0=0.0, delta_c=detuning_ratio)
        return cls(omega_c0=omega, delta_c=math.copysign(detuning_ratio * omega, delta0))

    @property
    def delta0(self) -> float:
        return self.omega_c0**2 / self.delta_c


@dataclass(frozen=True)
class Uniform:
    kind: Literal["uniform"] = "uniform"


@dataclass(frozen=True)
class Lattice:
    """Gaussian traps of 1/e half-width ``delta_x`` centred at ``(j - 1/2) * period``."""

    period: float
    delta_x: float
    kind: Literal["lattice"] = "lattice"


DensityModel = Union[Uniform, Lattice]


@dataclass(frozen=True)
class SampleGeometry:
    L: float = 5.0e-6
    slice_len: float = 10e-9
    density: DensityModel = field(default_factory=Uniform)

    @property
    def n_slices(self) -> int:
        return int(round(self.L / self.slice_len))


@dataclass(frozen=True)
class Params:
    """Everything needed to evaluate one susceptibility profile."""

    medium: AtomMedium = field(default_factory=AtomMedium)
    control: ControlField = field(default_factory=lambda: ControlField.from_shift(100.0))
    geometry: SampleGeometry = field(default_factory=SampleGeometry)

    @property
    def delta0(self) -> float:
        return self.control.delta0

    @property
    def K(self) -> float:
        return dimensionless_amplitude(self.medium)

    def with_shift(self, delta0: float, detuning_ratio: float | None = None) -> "Params":
        if detuning_ratio is None:
            detuning_ratio = _current_ratio(self.control)
        return replace(self, control=ControlField.from_shift(delta0, detuning_ratio))

    def with_length(self, L: float) -> "Params":
        return replace(self, geometry=replace(self.geometry, L=L))


def _current_ratio(control: ControlField) -> float:
    if control.omega_c0 == 0:
        return abs(control.delta_c)
    return abs(control.delta_c) / control.omega_c0


def reference_params(delta0: float = 100.0) -> Params:
    """Default uniform 87Rb sample (L = 5 um, N0 = 2e13 cm^-3) with level shift ``delta0``."""
    return Params().with_shift(delta0)


def lattice_params() -> Params:
    """Bragg-lattice sample: N0 = 2e12 cm^-3, L = 60 um, a = 400 nm, delta_x = a/6."""
    a = 400e-9
    return Params(
        medium=AtomMedium(N0=2.0e18),
        control=ControlField.from_shift(30.0),
        geometry=SampleGeometry(L=60e-6, density=Lattice(period=a, delta_x=a / 6)),
    )


def dimensionless_amplitude(medium: AtomMedium) -> float:
    """Return K = N0 |d12|^2 / (eps0 hbar gamma12).

    The probe susceptibility on resonance equals ``1j * K``.
    """
    bad = _medium_errors(medium)
    if bad:
        raise ValidationError(ValidationReport(errors=bad))
    return medium.N0 * medium.d12**2 / (EPSILON_0 * HBAR * medium.gamma12)


@dataclass
class ValidationReport:
    errors: list[tuple[str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def raise_if_failed(self) -> None:
        if self.errors:
            raise ValidationError(self)


def _positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        return [(name, f"must be a positive finite number, got {value!r}")]
    return []


def _medium_errors(m: AtomMedium) -> list[tuple[str, str]]:
    errs = []
    for name in ("d12", "gamma12", "gamma13", "gamma23", "N0", "lambda_p"):
        errs += _positive(name, getattr(m, name))
    if not errs and abs(m.gamma23 - m.gamma12 - m.gamma13) > 1e-12 * m.gamma23:
        errs.append(("gamma23", "must equal gamma12 + gamma13"))
    return errs


def _geometry_errors(g: SampleGeometry) -> list[tuple[str, str]]:
    errs = _positive("L", g.L) + _positive("slice_len", g.slice_len)
    if errs:
        return errs
    if g.slice_len > g.L:
        errs.append(("slice_len", "must not exceed L"))
    elif g.n_slices < 10:
        errs.append(("slice_len", f"L/slice_len gives {g.n_slices} slices, need at least 10"))
    if isinstance(g.density, Lattice):
        d = g.density
        sub = _positive("lattice_period", d.period) + _positive("lattice_width", d.delta_x)
        if sub:
            errs += sub
        elif not d.delta_x < d.period:
            errs.append(("lattice_width", "must be smaller than lattice_period"))
        elif d.period > g.L:
            errs.append(("lattice_period", "must not exceed L"))
    return errs


def validate(medium: AtomMedium, control: ControlField, geometry: SampleGeometry) -> ValidationReport:
    """Check all hard invariants and the far-detuning condition.

    Never raises; inspect ``report.ok``.
    """
    report = ValidationReport()
    report.errors += _medium_errors(medium)
    report.errors += _geometry_errors(geometry)

    if not math.isfinite(control.delta_c) or control.delta_c == 0:
        report.errors.append(("delta_c", "must be finite and non-zero"))
    elif not math.isfinite(control.omega_c0) or control.omega_c0 < 0:
        report.errors.append(("omega_c0", "must be finite and non-negative"))
    elif not report.errors:
        g13 = medium.gamma13 / medium.gamma12
        limit = FAR_DETUNING_FACTOR * max(control.omega_c0, g13)
        if abs(control.delta_c) < limit:
            report.warnings.append(
                ("delta_c", f"|delta_c| = {abs(control.delta_c):.3g} is below the far-detuning limit {limit:.3g}")
            )
    return report


def validate_params(params: Params) -> ValidationReport:
    return validate(params.medium, params.control, params.geometry)
