"""Built-in reference set: published zero locations and the transient scenarios."""
from __future__ import annotations

import math

from .load_model import DelaySpec, LineParams, LoadTopology, impedance
from .scattering import ZeroChoice, analytic_singularities
from .scenario import Excitation, Scenario
from .verify import Check, Verdict, relative_error, verify_scenario

R0 = 50.0
LINE = LineParams(R0)

CRITICAL_LOADS = {
    "critical_inductor": LoadTopology.inductor(250e-9),
    "critical_capacitor": LoadTopology.capacitor(100e-12),
    "critical_series": LoadTopology.series(125e-9, 200e-12),
    "critical_parallel": LoadTopology.parallel(500e-9, 50e-12),
}
CRITICAL_ZERO = -2e8j

REGION1_LOAD = LoadTopology.series(120e-9, 200e-12)
REGION2_LOAD = LoadTopology.parallel(10e-9, 50e-12)
BENCH_PARALLEL = LoadTopology.parallel(333e-9, 2e-9)
BENCH_SERIES = LoadTopology.series(333e-9, 2e-9)
MICROSTRIP_LOAD = LoadTopology.parallel(0.5e-9, 2e-12)
MICROSTRIP_DELAY = DelaySpec(0.066, 3.25)


def matched_scenarios() -> list[Scenario]:
    """Every load driven at its engaged zero(s), epsilon_start = 1e-4."""
    out = [Scenario(name, load, LINE) for name, load in CRITICAL_LOADS.items()]
    out += [
        Scenario("region1_internal", REGION1_LOAD, LINE, ZeroChoice.INTERNAL),
        Scenario("region1_external", REGION1_LOAD, LINE, ZeroChoice.EXTERNAL),
        Scenario("region2_parallel", REGION2_LOAD, LINE),
        Scenario("bench_parallel", BENCH_PARALLEL, LINE),
        Scenario("bench_series_internal", BENCH_SERIES, LINE, ZeroChoice.INTERNAL),
        Scenario("bench_series_external", BENCH_SERIES, LINE, ZeroChoice.EXTERNAL),
    ]
    return out


def delay_scenario() -> Scenario:
    return Scenario("microstrip_delay", MICROSTRIP_LOAD, LineParams(R0, MICROSTRIP_DELAY))


def mismatch_scenario(sc: Scenario) -> Scenario:
    """Same load driven at the real frequency with the magnitude of its engaged zero."""
    zero = analytic_singularities(sc.load, sc.line).zeros
    w = max(abs(z) for z in zero) if sc.zero_choice is ZeroChoice.EXTERNAL else min(abs(z) for z in zero)
    return Scenario(f"{sc.name}_real_drive", sc.load, sc.line, None, Excitation(), complex(w, 0.0))


def zero_value_checks() -> list[Check]:
    checks = []
    for name, load in CRITICAL_LOADS.items():
        z = analytic_singularities(load, LINE).zeros[0]
        checks.append(_complex_check(f"{name}_zero", z, CRITICAL_ZERO, 0.005))

    internal, external = analytic_singularities(REGION1_LOAD, LINE).zeros
    checks += [_complex_check("region1_internal_zero", internal, -1.67e8j, 0.01),
               _complex_check("region1_external_zero", external, -2.5e8j, 0.01)]

    z = analytic_singularities(REGION2_LOAD, LINE).zeros[0]
    checks += [_complex_check("region2_zero", z, 1.4e9 - 2e8j, 0.01),
               relative_error("region2_carrier_hz", z.real / (2 * math.pi), 222e6, 0.01)]

    z = analytic_singularities(BENCH_PARALLEL, LINE).zeros[0]
    checks += [relative_error("bench_parallel_carrier_hz", z.real / (2 * math.pi), 6.1e6, 0.02),
               relative_error("bench_parallel_omega_i", z.imag, -5e6, 0.02)]

    internal, external = analytic_singularities(BENCH_SERIES, LINE).zeros
    checks += [_complex_check("bench_series_internal_zero", internal, -1.08e7j, 0.01),
               _complex_check("bench_series_external_zero", external, -1.41e8j, 0.01)]

    for name, load in (("series", CRITICAL_LOADS["critical_series"]), ("parallel", CRITICAL_LOADS["critical_parallel"])):
        p = analytic_singularities(load, LINE)
        zl = impedance(load, p.zeros[0])
        err = abs(zl - R0)
        checks.append(Check(f"{name}_impedance_at_critical_zero_ohm", err, 1e-6, err < 1e-6))
    return checks


def _complex_check(name: str, value: complex, target: complex, tol: float) -> Check:
    err = abs(value - target) / abs(target)
    return Check(name, err, tol, err <= tol)


def run_reproduction() -> dict:
    """Evaluate the full reference set. Output is deterministic."""
    zero_checks = zero_value_checks()
    verdicts: list[Verdict] = []
    for sc in matched_scenarios():
        verdicts.append(verify_scenario(sc))
        verdicts.append(verify_scenario(mismatch_scenario(sc)))
    verdicts.append(verify_scenario(delay_scenario()))
    passed = all(c.passed for c in zero_checks) and all(v.passed for v in verdicts)
    return {
        "zero_values": [c.to_dict() for c in zero_checks],
        "scenarios": [v.to_dict() for v in verdicts],
        "pass": passed,
    }
