"""Reactive load topologies, the feeding line, and their characteristic quantities.

All quantities are SI; frequencies are angular (rad/s) and complex valued
with the ``exp(j*omega*t)`` time convention.
"""
from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass

from .errors import EvaluationAtPole, ValidationError

SPEED_OF_LIGHT = 299_792_458.0

# Relative half-width of the band around tau*omega_res == 2 classified as Critical.
CRITICAL_TOLERANCE = 1e-9

# |denominator| below this (SI units) counts as an impedance pole.
POLE_THRESHOLD_SI = 1e-30

_EPS = sys.float_info.epsilon


class LoadKind(str, enum.Enum):
    SINGLE_INDUCTOR = "single_inductor"
    SINGLE_CAPACITOR = "single_capacitor"
    SERIES_LC = "series_lc"
    PARALLEL_LC = "parallel_lc"

    @property
    def has_inductor(self) -> bool:
        return self is not LoadKind.SINGLE_CAPACITOR

    @property
    def has_capacitor(self) -> bool:
        return self is not LoadKind.SINGLE_INDUCTOR

    @property
    def is_single(self) -> bool:
        return self in (LoadKind.SINGLE_INDUCTOR, LoadKind.SINGLE_CAPACITOR)


class Regime(str, enum.Enum):
    SINGLE_ELEMENT = "single_element"
    REGION1 = "region1"  # tau*omega_res > 2: two imaginary zeros
    CRITICAL = "critical"  # tau*omega_res == 2: one double imaginary zero
    REGION2 = "region2"  # tau*omega_res < 2: complex zeros at +-omega_r - j*sigma


def _check_positive(value, path: str) -> None:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ValidationError(f"expected a number, got {value!r}", path)
    if not math.isfinite(value) or value <= 0:
        raise ValidationError(f"must be positive and finite, got {value!r}", path)


@dataclass(frozen=True)
class LoadTopology:
    """One of the four lossless reactive one-ports.

    ``inductance`` is in henries, ``capacitance`` in farads; an element the
    topology does not use must be ``None``.
    """

    kind: LoadKind
    inductance: float | None = None
    capacitance: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", LoadKind(self.kind))
        if self.kind.has_inductor:
            _check_positive(self.inductance, "load.l_henry")
        elif self.inductance is not None:
            raise ValidationError("single capacitor carries no inductance", "load.l_henry")
        if self.kind.has_capacitor:
            _check_positive(self.capacitance, "load.c_farad")
        elif self.capacitance is not None:
            raise ValidationError("single inductor carries no capacitance", "load.c_farad")

    @classmethod
    def inductor(cls, inductance: float) -> LoadTopology:
        return cls(LoadKind.SINGLE_INDUCTOR, inductance=inductance)

    @classmethod
    def capacitor(cls, capacitance: float) -> LoadTopology:
        return cls(LoadKind.SINGLE_CAPACITOR, capacitance=capacitance)

    @classmethod
    def series(cls, inductance: float, capacitance: float) -> LoadTopology:
        return cls(LoadKind.SERIES_LC, inductance, capacitance)

    @classmethod
    def parallel(cls, inductance: float, capacitance: float) -> LoadTopology:
        return cls(LoadKind.PARALLEL_LC, inductance, capacitance)


@dataclass(frozen=True)
class DelaySpec:
    """Ideal matched TEM line section between the source port and the load."""

    length: float
    eps_eff: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.length) or self.length < 0:
            raise ValidationError(f"must be >= 0, got {self.length!r}", "delay.length_m")
        if not math.isfinite(self.eps_eff) or self.eps_eff < 1:
            raise ValidationError(f"must be >= 1, got {self.eps_eff!r}", "delay.eps_eff")

    @property
    def round_trip(self) -> float:
        """Two-way propagation time in seconds."""
        return 2.0 * self.length * math.sqrt(self.eps_eff) / SPEED_OF_LIGHT


@dataclass(frozen=True)
class LineParams:
    """Lossless line with real characteristic impedance ``r0`` (ohms).

    The source is assumed matched (internal resistance ``r0``).
    """

    r0: float = 50.0
    delay: DelaySpec | None = None

    def __post_init__(self):
        _check_positive(self.r0, "line.r0_ohm")


@dataclass(frozen=True)
class DerivedParams:
    tau: float
    omega_res: float | None
    tau_omega_product: float | None
    regime: Regime


def classify(tau_omega_product: float) -> Regime:
    if abs(tau_omega_product - 2.0) <= 2.0 * CRITICAL_TOLERANCE:
        return Regime.CRITICAL
    if tau_omega_product > 2.0:
        return Regime.REGION1
    return Regime.REGION2


def time_constant(load: LoadTopology, line: LineParams) -> float:
    """L/R0 for the inductor and parallel kinds, R0*C for capacitor and series."""
    if load.kind in (LoadKind.SINGLE_INDUCTOR, LoadKind.PARALLEL_LC):
        return load.inductance / line.r0
    return line.r0 * load.capacitance


def derive_params(load: LoadTopology, line: LineParams) -> DerivedParams:
    tau = time_constant(load, line)
    if load.kind.is_single:
        return DerivedParams(tau, None, None, Regime.SINGLE_ELEMENT)
    omega_res = 1.0 / math.sqrt(load.inductance * load.capacitance)
    product = tau * omega_res
    return DerivedParams(tau, omega_res, product, classify(product))


def impedance(load: LoadTopology, omega: complex) -> complex:
    """Load impedance Z_L(omega) in ohms, by direct complex evaluation.

    Raises EvaluationAtPole at omega = 0 for capacitive-series kinds and at
    omega = +-omega_res for the parallel tank.
    """
    w = complex(omega)
    kind = load.kind
    if kind is LoadKind.SINGLE_INDUCTOR:
        return 1j * w * load.inductance
    if kind is LoadKind.SINGLE_CAPACITOR:
        den = 1j * w * load.capacitance
        if abs(den) < POLE_THRESHOLD_SI:
            raise EvaluationAtPole(f"capacitor impedance pole at omega={w}")
        return 1.0 / den
    L, C = load.inductance, load.capacitance
    if kind is LoadKind.SERIES_LC:
        den = 1j * w * C
        if abs(den) < POLE_THRESHOLD_SI:
            raise EvaluationAtPole(f"series LC impedance pole at omega={w}")
        return 1j * w * L + 1.0 / den
    # parallel tank: denominator is dimensionless, compare against rounding scale
    wlc = w * w * L * C
    den = 1.0 - wlc
    if abs(den) <= max(POLE_THRESHOLD_SI, 4.0 * _EPS * (1.0 + abs(wlc))):
        raise EvaluationAtPole(f"parallel LC anti-resonance at omega={w}")
    return 1j * w * L / den
