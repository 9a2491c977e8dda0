"""Invariant checks run by ``cfmatch verify`` for a single scenario."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .excitation import synthesize
from .load_model import LineParams, Regime
from .scattering import analytic_singularities
from .scenario import Scenario, build_signal_spec
from .timedomain import (
    SimRecord, apply_line_delay, energy_audit, fit_release_decay, power_identity_residual,
    reflected_energy_ratio, release_onset, simulate, steady_state_ratio,
)

REFLECTION_LIMIT = 1e-3
RELEASE_BAND = (0.99, 1.01)
POWER_IDENTITY_LIMIT = 1e-10
BALANCE_LIMIT = 1e-6
MIN_CONVERGENCE = 8.0
RATE_TOLERANCE = 0.02
UNIMODULAR_TOLERANCE = 0.01


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    threshold: float | tuple[float, float]
    passed: bool

    def to_dict(self) -> dict:
        thr = list(self.threshold) if isinstance(self.threshold, tuple) else self.threshold
        return {"name": self.name, "measured": self.measured, "threshold": thr, "pass": self.passed}


@dataclass(frozen=True)
class Verdict:
    scenario: str
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "checks": [c.to_dict() for c in self.checks],
                "pass": self.passed}


def at_most(name: str, value: float, limit: float) -> Check:
    return Check(name, float(value), limit, bool(value <= limit))


def at_least(name: str, value: float, limit: float) -> Check:
    return Check(name, float(value), limit, bool(value >= limit))


def within(name: str, value: float, band: tuple[float, float]) -> Check:
    return Check(name, float(value), band, bool(band[0] <= value <= band[1]))


def relative_error(name: str, value: float, target: float, tol: float) -> Check:
    err = abs(value - target) / abs(target)
    return Check(name, float(err), tol, bool(err <= tol))


def run_scenario(sc: Scenario, dt: float | None = None) -> SimRecord:
    return simulate(sc.load, sc.line, synthesize(build_signal_spec(sc, dt)))


def verify_scenario(sc: Scenario, dt: float | None = None) -> Verdict:
    spec = build_signal_spec(sc, dt)
    record = simulate(sc.load, sc.line, synthesize(spec))
    checks = [at_most("power_identity", power_identity_residual(record), POWER_IDENTITY_LIMIT)]
    w = spec.zero

    if w.imag == 0.0 and w.real != 0.0:
        ratio = steady_state_ratio(record, w.real)
        checks.append(relative_error("steady_state_unimodularity", ratio, 1.0, UNIMODULAR_TOLERANCE))
        return Verdict(sc.name, tuple(checks))

    audit = energy_audit(record)
    halved = energy_audit(simulate(sc.load, sc.line, synthesize(replace(spec, dt=spec.dt / 2))))
    convergence = audit.balance_residual / halved.balance_residual if halved.balance_residual else math.inf
    checks += [
        at_most("energy_balance", audit.balance_residual, BALANCE_LIMIT),
        at_least("balance_convergence_ratio", convergence, MIN_CONVERGENCE),
    ]
    if sc.override is None:
        checks += [
            at_most("reflected_over_incident_energy", reflected_energy_ratio(record), REFLECTION_LIMIT),
            within("released_over_stored", audit.released_over_stored, RELEASE_BAND),
        ]
        checks += release_checks(sc, record)
    if sc.delay is not None:
        checks += delay_checks(sc, record)
    return Verdict(sc.name, tuple(checks))


def release_checks(sc: Scenario, record: SimRecord) -> list[Check]:
    sset = analytic_singularities(sc.load, sc.line)
    if sset.regime not in (Regime.SINGLE_ELEMENT, Regime.REGION2):
        return []
    pole = max(sset.poles, key=lambda p: p.real)
    fit = fit_release_decay(record)
    checks = [relative_error("release_decay_rate", fit.rate, pole.imag, RATE_TOLERANCE)]
    if sset.regime is Regime.REGION2:
        ring = fit.ring_frequency if fit.ring_frequency is not None else 0.0
        checks.append(relative_error("release_ring_frequency", ring, pole.real, RATE_TOLERANCE))
    return checks


def delay_checks(sc: Scenario, record: SimRecord) -> list[Check]:
    port = apply_line_delay(record, sc.delay)
    onset = release_onset(port.times, port.b, port.kickoff_index)
    expected = record.t_kickoff + port.delay
    bare = run_scenario(replace(sc, line=LineParams(sc.line.r0)), record.dt)
    same = all(np.array_equal(getattr(record, f), getattr(bare, f)) for f in ("a", "b", "v", "i", "E"))
    return [
        at_most("port_onset_delay_error_s", abs(onset - expected), record.dt),
        Check("load_plane_delay_independent", float(same), 1.0, same),
    ]
