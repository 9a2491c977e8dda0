"""Time-domain simulation of a matched-source line terminated by a reactive load.

The line enters only through the wave decomposition at the load plane,

    v = a + b,    i = (a - b) / R0,

where ``a`` is the incident and ``b`` the reflected voltage wave. With a
matched source nothing re-reflects, so the load ODE driven by ``a`` is exact.
A physical line length is applied afterwards as a port-referencing transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InsufficientTail, NumericalBlowup, RecordTooShort
from .excitation import SampledSignal, SignalSpec, default_sample_interval
from .load_model import DelaySpec, LineParams, LoadKind, LoadTopology
from .scattering import analytic_singularities

BLOWUP_FACTOR = 1e12
TAIL_EFOLDS = 12.0
MAX_SAMPLES = 1_000_000
TAIL_ENERGY_FRACTION = 1e-4


class LoadState(NamedTuple):
    i_L: float = 0.0
    v_C: float = 0.0


def load_derivatives(load: LoadTopology, state: LoadState, a: float, r0: float) -> LoadState:
    """Time derivative of the load state under incident wave ``a``."""
    i_l, v_c = state
    kind = load.kind
    if kind is LoadKind.SINGLE_INDUCTOR:
        return LoadState((2.0 * a - r0 * i_l) / load.inductance, 0.0)
    if kind is LoadKind.SINGLE_CAPACITOR:
        return LoadState(0.0, (2.0 * a - v_c) / (r0 * load.capacitance))
    if kind is LoadKind.SERIES_LC:
        return LoadState((2.0 * a - r0 * i_l - v_c) / load.inductance, i_l / load.capacitance)
    return LoadState(v_c / load.inductance, ((2.0 * a - v_c) / r0 - i_l) / load.capacitance)


def terminal(load: LoadTopology, state: LoadState, a: float, r0: float) -> tuple[float, float, float]:
    """(v, i, b) at the load terminals."""
    i_l, v_c = state
    if load.kind in (LoadKind.SINGLE_INDUCTOR, LoadKind.SERIES_LC):
        v = 2.0 * a - r0 * i_l
        return v, i_l, v - a
    return v_c, (2.0 * a - v_c) / r0, v_c - a


def stored_energy(load: LoadTopology, state: LoadState) -> float:
    e = 0.0
    if load.kind.has_inductor:
        e += 0.5 * load.inductance * state.i_L ** 2
    if load.kind.has_capacitor:
        e += 0.5 * load.capacitance * state.v_C ** 2
    return e


@dataclass(frozen=True)
class SimRecord:
    """Per-sample load-plane series; sample ``k`` sits at ``t_start + k*dt``.

    At ``kickoff_index`` the series hold the values just before kick-off.
    The reflected wave just after it (incident already zero) is ``b_release``.
    """

    t_start: float
    dt: float
    r0: float
    a: np.ndarray
    b: np.ndarray
    v: np.ndarray
    i: np.ndarray
    E: np.ndarray
    kickoff_index: int
    b_release: float

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(len(self.a))

    @property
    def t_kickoff(self) -> float:
        return self.t_start + self.dt * self.kickoff_index

    @property
    def input_power(self) -> np.ndarray:
        return (self.a ** 2 - self.b ** 2) / self.r0


def _rk4_step(load, state, t, h, drive, r0):
    a1 = drive(t)
    a2 = drive(t + 0.5 * h)
    a4 = drive(t + h)
    k1 = load_derivatives(load, state, a1, r0)
    s2 = LoadState(state[0] + 0.5 * h * k1[0], state[1] + 0.5 * h * k1[1])
    k2 = load_derivatives(load, s2, a2, r0)
    s3 = LoadState(state[0] + 0.5 * h * k2[0], state[1] + 0.5 * h * k2[1])
    k3 = load_derivatives(load, s3, a2, r0)
    s4 = LoadState(state[0] + h * k3[0], state[1] + h * k3[1])
    k4 = load_derivatives(load, s4, a4, r0)
    return LoadState(state[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                     state[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]))


def _analytic_drive(spec: SignalSpec):
    amp, sigma, wr, phi, t0 = spec.amplitude, spec.sigma, spec.zero.real, spec.phase, spec.t_kickoff
    exp, cos = math.exp, math.cos

    def drive(t):
        s = t - t0
        return amp * exp(sigma * s) * cos(wr * s + phi)

    return drive


def _zero_drive(t):
    return 0.0


def simulate(load: LoadTopology, line: LineParams, signal: SampledSignal,
             initial_state: LoadState = LoadState(), blowup_factor: float = BLOWUP_FACTOR) -> SimRecord:
    """Integrate the load with fixed-step classical RK4 over the signal record.

    Every step lies wholly before or after kick-off; before it the incident
    wave at the RK4 stage times comes from the analytic waveform, after it
    the incident wave is zero.
    """
    r0 = line.r0
    n = len(signal.samples)
    k0 = signal.kickoff_index
    h = signal.dt
    drive_on = _analytic_drive(signal.spec)
    a = np.asarray(signal.samples, dtype=float)
    limit = blowup_factor * max(float(np.max(np.abs(a))), 1e-300)

    b = np.empty(n)
    v = np.empty(n)
    cur = np.empty(n)
    energy = np.empty(n)
    state = LoadState(*initial_state)
    b_release = 0.0
    for k in range(n):
        v[k], cur[k], b[k] = terminal(load, state, a[k], r0)
        energy[k] = stored_energy(load, state)
        if k == k0:
            b_release = terminal(load, state, 0.0, r0)[2]
        if k == n - 1:
            break
        t = signal.t_start + k * h
        state = _rk4_step(load, state, t, h, drive_on if k < k0 else _zero_drive, r0)
        if not (abs(state[0]) * r0 <= limit and abs(state[1]) <= limit):
            raise NumericalBlowup(f"state left the bounded range at step {k + 1}; dt={h:g} too large?")
    return SimRecord(signal.t_start, h, r0, a, b, v, cur, energy, k0, b_release)


def recommended_dt(load: LoadTopology, line: LineParams, drive: complex) -> float:
    """Step that resolves the drive and every natural mode of the load.

    The drive-only rule of :func:`default_sample_interval` is tightened to
    ``1/(40*|s|)`` for the fastest zero/pole ``s``; without it a drive at a
    slow zero leaves the fast mode under-resolved after kick-off.
    """
    fastest = max(abs(z) for z in analytic_singularities(load, line).zeros)
    candidates = [1.0 / (40.0 * fastest)]
    if drive.imag < 0 or drive.real != 0:
        candidates.append(default_sample_interval(drive))
    return min(candidates)


def default_tail(load: LoadTopology, line: LineParams, dt: float) -> float:
    """Record length after kick-off: 12 e-folds of the slowest natural mode."""
    slowest = min(p.imag for p in analytic_singularities(load, line).poles)
    return min(TAIL_EFOLDS / slowest, MAX_SAMPLES * dt)


def cumulative_integral(y: np.ndarray, h: float) -> np.ndarray:
    """Running integral of uniformly sampled ``y`` with fourth-order accuracy.

    Interior intervals use the cubic through four neighbouring samples,
    end intervals the one-sided cubic. Fewer than four samples fall back
    to the trapezoid rule.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    out = np.zeros(n)
    if n < 2:
        return out
    if n < 4:
        out[1:] = np.cumsum(0.5 * h * (y[1:] + y[:-1]))
        return out
    inc = np.empty(n - 1)
    inc[1:-1] = (-y[:-3] + 13.0 * y[1:-2] + 13.0 * y[2:-1] - y[3:]) * (h / 24.0)
    inc[0] = (9.0 * y[0] + 19.0 * y[1] - 5.0 * y[2] + y[3]) * (h / 24.0)
    inc[-1] = (y[-4] - 5.0 * y[-3] + 19.0 * y[-2] + 9.0 * y[-1]) * (h / 24.0)
    out[1:] = np.cumsum(inc)
    return out


def _release_segment(record: SimRecord) -> np.ndarray:
    tail = record.b[record.kickoff_index:].copy()
    tail[0] = record.b_release
    return tail


@dataclass(frozen=True)
class EnergyAudit:
    balance_residual: float
    released_over_stored: float


def energy_audit(record: SimRecord) -> EnergyAudit:
    """Compare delivered energy against stored energy and measure the release.

    Delivered energy is the running integral of ``(a**2 - b**2)/R0``, split at
    kick-off where the waves jump. ``balance_residual`` is the worst mismatch
    against the stored energy relative to its peak.
    """
    k0 = record.kickoff_index
    e = record.E
    e_max = float(np.max(e))
    if e_max == 0.0:
        return EnergyAudit(0.0, 0.0)
    e_kick = float(e[k0])
    if e_kick > 0 and e[-1] >= TAIL_ENERGY_FRACTION * e_kick:
        raise RecordTooShort(
            f"stored energy at record end is {e[-1] / e_kick:.3g} of its kick-off value")
    r0, h = record.r0, record.dt
    w_pre = cumulative_integral(record.input_power[:k0 + 1], h)
    release = _release_segment(record)
    w_post = w_pre[-1] + cumulative_integral(-(release ** 2) / r0, h)
    delivered = np.concatenate([w_pre, w_post[1:]])
    residual = float(np.max(np.abs(delivered - e))) / e_max
    released = float(cumulative_integral(release ** 2 / r0, h)[-1])
    ratio = released / e_kick if e_kick > 0 else 0.0
    return EnergyAudit(residual, ratio)


def reflected_energy_ratio(record: SimRecord) -> float:
    """Reflected over incident energy from the first sample up to kick-off."""
    k0 = record.kickoff_index
    inc = cumulative_integral(record.a[:k0 + 1] ** 2, record.dt)[-1]
    ref = cumulative_integral(record.b[:k0 + 1] ** 2, record.dt)[-1]
    return float(ref / inc) if inc > 0 else 0.0


def power_identity_residual(record: SimRecord) -> float:
    """max |v*i - (a**2 - b**2)/R0| relative to max(a**2)/R0."""
    scale = float(np.max(record.a ** 2)) / record.r0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(record.v * record.i - record.input_power))) / scale


def steady_state_ratio(record: SimRecord, omega: float, periods: float = 5.0) -> float:
    """|b|/|a| from least-squares sinusoid fits over the last periods before kick-off."""
    k0 = record.kickoff_index
    count = max(int(round(periods * 2.0 * math.pi / (abs(omega) * record.dt))), 8)
    sl = slice(max(k0 + 1 - count, 0), k0 + 1)
    t = record.times[sl]
    basis = np.column_stack([np.cos(omega * t), np.sin(omega * t), np.ones_like(t)])
    amps = []
    for y in (record.a[sl], record.b[sl]):
        coef = np.linalg.lstsq(basis, y, rcond=None)[0]
        amps.append(math.hypot(coef[0], coef[1]))
    return amps[1] / amps[0]


@dataclass(frozen=True)
class ReleaseFit:
    rate: float  # 1/s
    ring_frequency: float | None  # rad/s, None for a non-oscillating release


def _peaks(y: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Parabolically refined local maxima of |y| (interior samples only)."""
    m = np.abs(y)
    idx = np.nonzero((m[1:-1] >= m[:-2]) & (m[1:-1] > m[2:]))[0] + 1
    ym, y0, yp = m[idx - 1], m[idx], m[idx + 1]
    curv = ym - 2.0 * y0 + yp
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.where(curv != 0, 0.5 * (ym - yp) / curv, 0.0)
    return (idx + delta) * h, y0 - 0.25 * (ym - yp) * delta


def fit_release_decay(record: SimRecord, t0: float | None = None, min_efolds: float = 3.0) -> ReleaseFit:
    """Decay rate (and ring frequency) of the reflected wave after kick-off.

    Oscillating releases are fitted on the envelope formed by successive
    extrema of ``|b|``; monotone ones on ``ln|b|`` after its last sign change,
    skipping the first third so the slowest mode dominates.
    """
    k0 = record.kickoff_index if t0 is None else int(round((t0 - record.t_start) / record.dt))
    tail = _release_segment(record) if k0 == record.kickoff_index else record.b[k0:].copy()
    h = record.dt
    peak = float(np.max(np.abs(tail))) if len(tail) else 0.0
    if peak == 0.0:
        raise InsufficientTail("no release signal after kick-off")
    live = np.abs(tail) > 1e-9 * peak
    last_live = int(np.nonzero(live)[0][-1])
    tail = tail[:last_live + 1]
    signs = np.signbit(tail[np.abs(tail) > 1e-9 * peak])
    crossings = int(np.count_nonzero(signs[1:] != signs[:-1]))

    if crossings >= 4:
        tp, yp = _peaks(tail, h)
        keep = yp > 1e-8 * peak
        tp, yp = tp[keep], yp[keep]
        if len(tp) < 4 or math.log(yp.max() / yp.min()) < min_efolds:
            raise InsufficientTail(f"only {len(tp)} envelope peaks after kick-off")
        slope = np.polyfit(tp, np.log(yp), 1)[0]
        spacing = np.polyfit(np.arange(len(tp)), tp, 1)[0]
        return ReleaseFit(-float(slope), float(math.pi / spacing))

    nz = np.nonzero(np.signbit(tail[1:]) != np.signbit(tail[:-1]))[0]
    start = int(nz[-1]) + 1 if len(nz) else 0
    seg = tail[start:]
    seg = seg[len(seg) // 3:]
    if len(seg) < 4:
        raise InsufficientTail("release tail too short to fit")
    y = np.log(np.abs(seg))
    if y.max() - y.min() < min_efolds:
        raise InsufficientTail(f"release spans only {y.max() - y.min():.2f} e-folds")
    t = h * np.arange(len(seg))
    slope = np.polyfit(t, y, 1)[0]
    return ReleaseFit(-float(slope), None)


@dataclass(frozen=True)
class PortRecord:
    """Waves seen at the source port of an ideal matched delay line.

    ``delay`` is the exact round-trip time; ``shift`` the whole number of
    samples actually applied to the reflected wave.
    """

    t_start: float
    dt: float
    a: np.ndarray
    b: np.ndarray
    delay: float
    shift: int
    kickoff_index: int

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(len(self.a))


def apply_line_delay(record: SimRecord, delay: DelaySpec) -> PortRecord:
    dt_rt = delay.round_trip
    n = int(round(dt_rt / record.dt))
    a = np.concatenate([record.a, np.zeros(n)])
    b = np.concatenate([np.zeros(n), record.b])
    return PortRecord(record.t_start, record.dt, a, b, dt_rt, n, record.kickoff_index)


def release_onset(times: np.ndarray, b: np.ndarray, after_index: int, fraction: float = 0.01) -> float:
    """Time of the last quiet sample before ``|b|`` first exceeds ``fraction`` of its peak."""
    m = np.abs(b[after_index:])
    loud = np.nonzero(m > fraction * m.max())[0]
    if not len(loud):
        raise InsufficientTail("no release found")
    k = after_index + int(loud[0])
    return float(times[max(k - 1, 0)])
