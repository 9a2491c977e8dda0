"""Exponentially enveloped excitations that engage a chosen scattering zero.

The drive for a complex frequency ``omega = omega_r - j*sigma`` is

    a(t) = A * exp(sigma*(t - t0)) * cos(omega_r*(t - t0) + phi),   t_start <= t <= t0

and exactly zero after the kick-off time ``t0``. The sample grid is anchored
on ``t0`` so that kick-off always falls on a sample.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonGrowingEnvelope, UndersampledCarrier, ValidationError

DEFAULT_EPSILON_START = 1e-4
MIN_SAMPLES_PER_CARRIER = 40


def default_sample_interval(zero: complex) -> float:
    """min(1/(40*sigma), 2*pi/(80*omega_r)) over the terms that apply."""
    sigma = -zero.imag
    candidates = []
    if sigma > 0:
        candidates.append(1.0 / (40.0 * sigma))
    if zero.real != 0:
        candidates.append(2.0 * math.pi / (80.0 * abs(zero.real)))
    if not candidates:
        raise ValidationError("zero frequency has neither envelope nor carrier", "zero")
    return min(candidates)


@dataclass(frozen=True)
class SignalSpec:
    """Declarative description of one excitation.

    ``dt`` defaults to :func:`default_sample_interval`. ``pole_study`` admits
    constant or decaying envelopes (real-frequency or pole drives); such specs
    need an explicit ``t_start``.
    """

    zero: complex
    t_kickoff: float
    t_end: float
    amplitude: float = 1.0
    epsilon_start: float = DEFAULT_EPSILON_START
    phase: float = 0.0
    dt: float | None = None
    pole_study: bool = False
    t_start: float | None = None

    def __post_init__(self):
        z = complex(self.zero)
        object.__setattr__(self, "zero", z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValidationError("must be finite", "zero")
        if not self.amplitude > 0 or not math.isfinite(self.amplitude):
            raise ValidationError("must be > 0", "excitation.amplitude_v")
        if not 0.0 < self.epsilon_start < 1.0:
            raise ValidationError("must lie in (0, 1)", "excitation.epsilon_start")
        if not self.t_end > self.t_kickoff:
            raise ValidationError("record must end after kick-off", "excitation.t_end_s")
        if z.imag >= 0 and not self.pole_study:
            raise ValidationError("zero must have omega_i < 0 (growing envelope)", "zero")
        if self.dt is None:
            object.__setattr__(self, "dt", default_sample_interval(z))
        elif not self.dt > 0:
            raise ValidationError("must be > 0", "excitation.dt_s")
        if self.t_start is not None and not self.t_start < self.t_kickoff:
            raise ValidationError("must precede kick-off", "excitation.t_start_s")

    @property
    def sigma(self) -> float:
        return -self.zero.imag


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled realisation of a :class:`SignalSpec`.

    ``samples[k]`` is taken at ``t_start + k*dt``; ``kickoff_index`` points at
    the sample located exactly at ``t0``.
    """

    t_start: float
    dt: float
    samples: np.ndarray
    kickoff_index: int
    spec: SignalSpec = field(repr=False)

    @property
    def times(self) -> np.ndarray:
        return sample_times(self.spec)[0]


def start_time(spec: SignalSpec) -> float:
    """Time at which the envelope equals ``epsilon_start`` of its kick-off value."""
    if spec.sigma <= 0:
        raise NonGrowingEnvelope(f"sigma={spec.sigma:g} <= 0: start time undefined")
    return spec.t_kickoff - math.log(1.0 / spec.epsilon_start) / spec.sigma


def envelope(spec: SignalSpec, t):
    return spec.amplitude * np.exp(spec.sigma * (np.asarray(t, dtype=float) - spec.t_kickoff))


def waveform(spec: SignalSpec, t):
    """Untruncated drive ``A*exp(sigma*s)*cos(omega_r*s + phi)``, ``s = t - t0``."""
    s = np.asarray(t, dtype=float) - spec.t_kickoff
    return spec.amplitude * np.exp(spec.sigma * s) * np.cos(spec.zero.real * s + spec.phase)


def sample_times(spec: SignalSpec) -> tuple[np.ndarray, int]:
    """Sample instants anchored on ``t0`` and the index of the kick-off sample.

    The first sample is the latest grid point at or before the nominal start.
    """
    t_start = spec.t_start if spec.t_start is not None else start_time(spec)
    dt = spec.dt
    n_pre = math.ceil((spec.t_kickoff - t_start) / dt - 1e-9)
    n_post = math.ceil((spec.t_end - spec.t_kickoff) / dt - 1e-9)
    k = np.arange(-n_pre, n_post + 1, dtype=float)
    return spec.t_kickoff + k * dt, n_pre


def synthesize(spec: SignalSpec) -> SampledSignal:
    wr = abs(spec.zero.real)
    if wr > 0 and spec.dt > 2.0 * math.pi / (MIN_SAMPLES_PER_CARRIER * wr):
        raise UndersampledCarrier(
            f"dt={spec.dt:g} s gives fewer than {MIN_SAMPLES_PER_CARRIER} samples per carrier period")
    t, k0 = sample_times(spec)
    samples = waveform(spec, t)
    samples[k0 + 1:] = 0.0
    return SampledSignal(float(t[0]), spec.dt, samples, k0, spec)
