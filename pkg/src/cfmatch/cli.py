"""Command-line entry point: ``cfmatch <command> --scenario <file.json|dir>``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import CfmatchError
from .excitation import synthesize
from .load_model import derive_params
from .reproduce import run_reproduction
from .scattering import (
    Grid, Window, analytic_singularities, numeric_zero_oracle, plane_map, select_excitable_zero,
)
from .scenario import Scenario, build_signal_spec, parse_scenario
from .timedomain import simulate
from .verify import verify_scenario

log = logging.getLogger("cfmatch")

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2
SIM_HEADER = "t,a,b,v,i,E,Pin"
PLANE_HEADER = "omega_r,omega_i,gamma_db"
AFG_HEADER = "t,v_normalized"


def fmt(x) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(x))


def write_csv(path: Path, header: str, columns, comment: str | None = None) -> None:
    with open(path, "w", newline="\n") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        fh.write(header + "\n")
        for row in zip(*columns):
            fh.write(",".join(fmt(x) for x in row) + "\n")


def freq_json(w: complex) -> dict:
    return {"omega_r": float(w.real), "omega_i": float(w.imag)}


def parse_grid(text: str) -> tuple[int, int]:
    try:
        nr, ni = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 201x201, got {text!r}")
    return nr, ni


def parse_window(text: str) -> Window:
    try:
        wr0, wr1, wi0, wi1 = (float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be wr0,wr1,wi0,wi1, got {text!r}")
    return Window((wr0, wr1), (wi0, wi1))


def default_window(sc: Scenario) -> Window:
    reach = 2.0 * max(abs(z) for z in analytic_singularities(sc.load, sc.line).zeros)
    return Window((-reach, reach), (-reach, reach))


def cmd_zeros(sc: Scenario, args) -> tuple[int, dict]:
    sset = analytic_singularities(sc.load, sc.line)
    params = derive_params(sc.load, sc.line)
    out = {
        "name": sc.name,
        "regime": sset.regime.value,
        "tau_s": params.tau,
        "omega_res": params.omega_res,
        "tau_omega_product": params.tau_omega_product,
        "zeros": [freq_json(z) for z in sset.zeros],
        "poles": [freq_json(p) for p in sset.poles],
    }
    if sc.zero_choice is not None:
        out["selected"] = freq_json(select_excitable_zero(sset, sc.zero_choice))
    if args.window is not None:
        out["oracle"] = [freq_json(z) for z in numeric_zero_oracle(sc.load, sc.line, args.window)]
    print(json.dumps(out, indent=2))
    return EXIT_OK, out


def cmd_plane(sc: Scenario, args) -> tuple[int, Path]:
    nr, ni = args.grid
    pm = plane_map(sc.load, sc.line, Grid(args.window or default_window(sc), nr, ni))
    wr, wi = np.meshgrid(pm.omega_r, pm.omega_i)
    path = args.out / f"{sc.name}_plane.csv"
    write_csv(path, PLANE_HEADER, (wr.ravel(), wi.ravel(), pm.samples.ravel()))
    return EXIT_OK, path


def cmd_simulate(sc: Scenario, args) -> tuple[int, Path]:
    rec = simulate(sc.load, sc.line, synthesize(build_signal_spec(sc, args.dt)))
    path = args.out / f"{sc.name}_sim.csv"
    write_csv(path, SIM_HEADER, (rec.times, rec.a, rec.b, rec.v, rec.i, rec.E, rec.input_power))
    return EXIT_OK, path


def cmd_verify(sc: Scenario, args) -> tuple[int, Path]:
    verdict = verify_scenario(sc, args.dt)
    path = args.out / f"{sc.name}_verdict.json"
    path.write_text(json.dumps(verdict.to_dict(), indent=2) + "\n")
    for c in verdict.checks:
        print(f"{sc.name}: {'PASS' if c.passed else 'FAIL'} {c.name} measured={c.measured:.6g} "
              f"threshold={c.threshold}")
    return (EXIT_OK if verdict.passed else EXIT_FAIL), path


def cmd_export_afg(sc: Scenario, args) -> tuple[int, Path]:
    sig = synthesize(build_signal_spec(sc, args.dt))
    peak = float(np.max(np.abs(sig.samples)))
    t = sig.dt * np.arange(len(sig.samples))
    path = args.out / f"{sc.name}_afg.csv"
    write_csv(path, AFG_HEADER, (t, sig.samples / peak), comment=f"peak_volts={fmt(peak)}")
    return EXIT_OK, path


COMMANDS = {
    "zeros": cmd_zeros,
    "plane": cmd_plane,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "export-afg": cmd_export_afg,
}


def cmd_paper(args) -> int:
    report = run_reproduction()
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "paper_report.json").write_text(json.dumps(report, indent=2) + "\n")
    rows = [("zero_values", c) for c in report["zero_values"]]
    rows += [(v["scenario"], c) for v in report["scenarios"] for c in v["checks"]]
    for group, c in rows:
        print(f"{'PASS' if c['pass'] else 'FAIL'} {group}.{c['name']} measured={c['measured']:.6g} "
              f"threshold={c['threshold']}")
    return EXIT_OK if report["pass"] else EXIT_FAIL


def _run_file(command: str, path: Path, args) -> int:
    try:
        sc = parse_scenario(path.read_text(encoding="utf-8"))
        return COMMANDS[command](sc, args)[0]
    except (CfmatchError, OSError) as exc:
        print(f"cfmatch: {path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cfmatch",
                                description="Complex-frequency matching of reactive loads.")
    p.add_argument("command", choices=[*COMMANDS, "paper"])
    p.add_argument("--scenario", type=Path, help="scenario JSON file or a directory of them")
    p.add_argument("--out", type=Path, default=None,
                   help="output directory (default: $CFMATCH_OUT or the current directory)")
    p.add_argument("--dt", type=float, default=None, help="sample interval override in seconds")
    p.add_argument("--grid", type=parse_grid, default=(201, 201), help="plane grid as NRxNI")
    p.add_argument("--window", type=parse_window, default=None,
                   help="complex-plane window wr0,wr1,wi0,wi1 in rad/s (write --window=-1e9,... for negative starts)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.out = args.out or Path(os.environ.get("CFMATCH_OUT", "."))
    if args.dt is not None and not args.dt > 0:
        print("cfmatch: --dt must be positive", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "paper":
        return cmd_paper(args)
    if args.scenario is None:
        print("cfmatch: --scenario is required for this command", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"cfmatch: cannot create {args.out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.scenario.is_dir():
        files = sorted(args.scenario.glob("*.json"))
        if not files:
            print(f"cfmatch: no scenario files in {args.scenario}", file=sys.stderr)
            return EXIT_CONFIG
        with ProcessPoolExecutor() as pool:
            codes = list(pool.map(_run_file, [args.command] * len(files), files, [args] * len(files)))
        return max(codes)
    return _run_file(args.command, args.scenario, args)


if __name__ == "__main__":
    sys.exit(main())
