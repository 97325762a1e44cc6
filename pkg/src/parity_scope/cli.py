"""Command-line front end: derivation, simulation, sweeps and validation.

Exit codes: 0 success, 2 configuration error, 3 physics-condition failure
(e.g. unsatisfiable parity condition), 4 numerical-convergence failure.
All numeric output uses shortest round-trip decimals, and parallel sweep
results are merged in input order, so repeated runs produce byte-identical
files for any worker count.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import MHZ, derive_scenario, load_config, preset, preset_names
from .dispersive import TcqSpec, tcq_mixing
from .dynamics import evolve, reflection
from .errors import (
    ConfigError,
    ConvergenceFailure,
    GridTooCoarse,
    ParityConditionUnsatisfiable,
    NegativeDiscriminant,
    QuadratureNonconvergent,
    StepTooLarge,
)
from .inference import analyze_trajectories, chi_sweep, worker_count
from .spectral import (
    ChargeBasisConfig,
    LadderConfig,
    charge_dispersion,
    chi_oracle,
    dressed_tcq_check,
    switch_splitting,
    tcq_charge_spectrum,
    transmon_charge_spectrum,
)

CONFIG_EXIT = 2
PHYSICS_EXIT = 3
NUMERICS_EXIT = 4


def _fmt(value):
    """Shortest decimal that round-trips the float exactly."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(cell) for cell in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
    return header, rows


def _emit(args, message):
    if not args.quiet:
        print(message)


def _load(args):
    if args.preset and args.config:
        raise ConfigError("give either --preset or --config, not both")
    if args.preset:
        cfg = preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise ConfigError("one of --preset or --config is required")
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    Path(cfg.output_dir).mkdir(parents=True, exist_ok=True)
    return cfg


# ---------------------------------------------------------------------------
# dispersive
# ---------------------------------------------------------------------------

def _scenario_summary(report):
    cfg = report.config
    kappa = report.kappa
    tau = cfg.analysis.resolve_measurement_time(kappa)
    payload = {
        "scenario": cfg.name,
        "resonator1_mhz": cfg.resonator1 / MHZ,
        "resonator2_mhz": report.resonator2 / MHZ,
        "kappa1_mhz": cfg.kappa1 / MHZ,
        "kappa2_mhz": cfg.kappa2 / MHZ,
        "measurement_time_us": tau,
        "parity_condition_satisfiable": report.parity_satisfiable,
        "qubits": [],
    }
    if report.parity_satisfiable:
        det = report.detunings.plus_branch
        payload["drive_detuning1_mhz"] = det[0] / MHZ
        payload["drive_detuning2_mhz"] = det[1] / MHZ
        payload["drive_frequency_mhz"] = (cfg.resonator1 - det[0]) / MHZ
        payload["parity_degenerate"] = report.detunings.degenerate
    else:
        payload["parity_condition_error"] = report.parity_error
        model = report.qubits[0].model
        payload["switch_excess"] = (model.quantum_switch ** 2
                                    - model.chi1 * model.chi2) / kappa ** 2
    for qubit in report.qubits:
        model = qubit.model
        entry = {
            "name": qubit.name,
            "g1_mhz": qubit.g1 / MHZ,
            "g2_mhz": qubit.g2 / MHZ,
            "chi1_mhz": model.chi1 / MHZ,
            "chi2_mhz": model.chi2 / MHZ,
            "quantum_switch_mhz": model.quantum_switch / MHZ,
            "static_switch_mhz": model.static_switch / MHZ,
            "warnings": list(model.warnings),
        }
        if qubit.purcell is not None:
            entry["purcell_time_us"] = qubit.purcell.time
            entry["purcell_time_kappa"] = qubit.purcell.dimensionless
        payload["qubits"].append(entry)
    return payload


def cmd_dispersive(args):
    cfg = _load(args)
    report = derive_scenario(cfg)
    payload = _scenario_summary(report)
    path = Path(cfg.output_dir) / "dispersive.json"
    path.write_text(json.dumps(payload, indent=2) + "\n")
    _emit(args, json.dumps(payload, indent=2))
    _emit(args, f"wrote {path}")
    if not report.parity_satisfiable:
        _emit(args, "parity condition unsatisfiable")
        return PHYSICS_EXIT
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

TRAJECTORY_HEADER = ["t", "re_a1", "im_a1", "re_a2", "im_a2", "re_bout", "im_bout"]


def trajectory_rows(traj):
    return [
        [float(t), a1.real, a1.imag, a2.real, a2.imag, b.real, b.imag]
        for t, a1, a2, b in zip(traj.times, traj.alpha1, traj.alpha2, traj.output)
    ]


def cmd_simulate(args):
    cfg = _load(args)
    report = derive_scenario(cfg)
    setup = report.measurement_setup()
    kappa = report.kappa
    tau = cfg.analysis.resolve_measurement_time(kappa)
    weights = range(4) if args.hw == "all" else [int(args.hw)]

    summary = {"scenario": cfg.name, "files": {}, "reflection": {}}
    trajectories = []
    for hw in weights:
        traj = evolve(setup, hw, tau)
        trajectories.append(traj)
        path = Path(cfg.output_dir) / f"trajectory_hw{hw}.csv"
        write_csv(path, TRAJECTORY_HEADER, trajectory_rows(traj))
        summary["files"][f"hw{hw}"] = str(path)
        r = reflection(setup, hw)
        summary["reflection"][f"hw{hw}"] = {"re": r.real, "im": r.imag,
                                            "abs_error": abs(abs(r) - 1.0)}
        _emit(args, f"h_w={hw}: wrote {path}")

    if args.hw == "all":
        r = {hw: complex(summary["reflection"][f"hw{hw}"]["re"],
                         summary["reflection"][f"hw{hw}"]["im"]) for hw in range(4)}
        summary["parity_collapse"] = max(abs(r[0] - r[2]), abs(r[1] - r[3]))
        summary["parity_contrast"] = abs(r[0] - r[1])
        gains = analyze_trajectories(trajectories, tau,
                                     phase=cfg.analysis.phase,
                                     tau_points=cfg.analysis.tau_points)
        summary["info_parity_bits"] = gains.info_parity
        summary["info_hamming_bits"] = gains.info_hamming
        summary["optimal_phase_rad"] = gains.optimal_phase
        rates_path = Path(cfg.output_dir) / "rates.csv"
        write_csv(rates_path, ["tau_kappa", "gamma_hw", "gamma_p"],
                  [[t * kappa, float(gh) / kappa, float(gp) / kappa]
                   for t, gh, gp in zip(gains.tau_grid, gains.rate_hamming,
                                        gains.rate_parity)])
        summary["files"]["rates"] = str(rates_path)
        _emit(args, f"info gains: parity {gains.info_parity:.6f} bits, "
                    f"hamming {gains.info_hamming:.6f} bits")

    path = Path(cfg.output_dir) / "simulate.json"
    path.write_text(json.dumps(summary, indent=2) + "\n")
    _emit(args, f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

SWEEP_HEADER = ["chi1_over_kappa", "chi2_over_kappa", "info_parity_bits",
                "info_hamming_bits", "delta_info_bits", "missing_parity_log10",
                "phi_star_rad"]


def sweep_rows(points):
    rows = []
    for p in points:
        missing = max(p.missing_parity, 1e-15)
        rows.append([p.chi1_over_kappa, p.chi2_over_kappa, p.info_parity,
                     p.info_hamming, p.delta_info, math.log10(missing), p.phase])
    return rows


def cmd_sweep(args):
    cfg = _load(args)
    kappa = max(cfg.kappa1, cfg.kappa2)
    pulse = cfg.pulse.resolve(kappa)
    tau = cfg.analysis.resolve_measurement_time(kappa)
    sweep = cfg.analysis.sweep
    grid = np.linspace(sweep.minimum, sweep.maximum, sweep.points)
    workers = worker_count()

    summary = {"scenario": cfg.name, "workers": workers, "cuts": {}}
    cuts = {
        "diagonal": [(chi, chi) for chi in grid],
        "asymmetric": [(chi, sweep.asymmetric_chi2) for chi in grid],
    }
    for cut_name, pairs in cuts.items():
        points = chi_sweep(pairs, kappa, pulse, tau, workers=workers)
        path = Path(cfg.output_dir) / f"sweep_{cut_name}.csv"
        write_csv(path, SWEEP_HEADER, sweep_rows(points))
        best = min(points, key=lambda p: p.missing_parity)
        summary["cuts"][cut_name] = {
            "file": str(path),
            "argmin_chi1_over_kappa": best.chi1_over_kappa,
            "argmin_chi2_over_kappa": best.chi2_over_kappa,
            "min_missing_parity": best.missing_parity,
            "max_info_parity": best.info_parity,
        }
        _emit(args, f"{cut_name}: argmin chi1/kappa = {best.chi1_over_kappa:.4f}, "
                    f"missing parity info {best.missing_parity:.3e}")

    path = Path(cfg.output_dir) / "sweep.json"
    path.write_text(json.dumps(summary, indent=2) + "\n")
    _emit(args, f"wrote {path}")
    return 0


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _validation_checks(cfg):
    ratio = cfg.validation.coupling_ratio
    checks = []

    ec = 0.3 * MHZ * 1e3
    flat = ChargeBasisConfig(ec, ec, 50 * ec, 50 * ec, -0.5 * ec,
                             charge_cutoff=cfg.validation.charge_cutoff)
    dispersion = charge_dispersion(flat, levels=6,
                                   grid_points=cfg.validation.dispersion_grid)
    checks.append(("charge_dispersion_flat", float(np.max(dispersion) / ec),
                   1e-3, float(np.max(dispersion)) < 1e-3 * ec, ""))

    steep = replace(flat, josephson_plus=ec, josephson_minus=ec)
    dispersion = charge_dispersion(steep, levels=6,
                                   grid_points=cfg.validation.dispersion_grid)
    checks.append(("charge_dispersion_contrast", float(dispersion[1] / ec),
                   0.05, float(dispersion[1]) > 0.05 * ec, "lower bound"))

    factor = replace(flat, interaction=0.0, offset_plus=0.13, offset_minus=0.41)
    coupled = tcq_charge_spectrum(factor, levels=6)
    single_p = transmon_charge_spectrum(factor.josephson_plus, factor.charging_plus,
                                        0.13, cutoff=16, levels=4)
    single_m = transmon_charge_spectrum(factor.josephson_minus, factor.charging_minus,
                                        0.41, cutoff=16, levels=4)
    sums = np.sort((single_p[:, None] + single_m[None, :]).ravel())[:6]
    residual = float(np.max(np.abs(coupled - sums)) / max(abs(sums[-1]), ec))
    checks.append(("interaction_free_factorization", residual, 1e-10,
                   residual < 1e-10, ""))

    j = -1.0
    spec = TcqSpec(5.0, 5.0, 0.1 * j, 0.1 * j, j)
    report = dressed_tcq_check(spec, levels=10)
    bound = 5.0 * (0.1 / 2.0) ** 2
    checks.append(("dressed_normal_form", float(report.worst_error), bound,
                   report.worst_error <= bound, ""))

    if ratio >= 0.3:
        reason = f"coupling ratio {ratio} >= 0.3: outside the dispersive regime"
        for name in ("transmon_chi_accuracy", "tcq_chi_accuracy", "zero_switch_splitting"):
            checks.append((name, float("nan"), float("nan"), True, "skipped: " + reason))
        return checks, [reason]

    frequency, anharmonicity = 5.0, -3.2
    w1, w2 = 7.0, 8.4
    ladder = LadderConfig(kind="transmon", qubit_frequency=frequency,
                          anharmonicity=anharmonicity,
                          resonator1_frequency=w1, resonator2_frequency=w2,
                          couplings=(ratio * abs(frequency - w1),
                                     0.2 * ratio * abs(frequency - w2)),
                          qubit_levels=3, photon_levels=4)
    err = float(chi_oracle(ladder).relative_errors[0])
    checks.append(("transmon_chi_accuracy", err, 3.0 * ratio ** 2,
                   err <= 3.0 * ratio ** 2, ""))

    dressed = replace(tcq_mixing(TcqSpec(6.4, 6.4, -1.2, -1.2, -0.4)),
                      delta_plus=-1.2, delta_minus=-1.2, delta_cross=-1.36)
    w1, w2 = 7.5, 8.5
    g1m = ratio * abs(dressed.omega_minus - w1)
    g2p = 0.2 * ratio * abs(dressed.omega_plus - w2)
    ladder = LadderConfig(kind="tcq", dressed=dressed,
                          resonator1_frequency=w1, resonator2_frequency=w2,
                          couplings=(0.0, g1m, g2p, 0.0),
                          qubit_levels=3, photon_levels=3)
    err = float(chi_oracle(ladder).relative_errors[0])
    checks.append(("tcq_chi_accuracy", err, 3.0 * ratio ** 2,
                   err <= 3.0 * ratio ** 2, ""))

    dressed_zs = replace(tcq_mixing(TcqSpec(6.4, 6.4, -0.3, -0.3, -0.4)),
                         delta_plus=-0.15, delta_minus=-0.15, delta_cross=-0.3)
    w1 = 7.5
    g1m = ratio * abs(dressed_zs.omega_minus - w1)
    g2p = ratio * abs(dressed_zs.omega_plus - w1)
    ladder = LadderConfig(kind="tcq", dressed=dressed_zs,
                          resonator1_frequency=w1, resonator2_frequency=w1 + 0.01,
                          couplings=(0.0, g1m, g2p, 0.0),
                          qubit_levels=3, photon_levels=3)
    gaps = switch_splitting(ladder)
    d1m = dressed_zs.omega_minus - w1
    chi1 = g1m ** 2 * dressed_zs.delta_minus / (d1m * (d1m + dressed_zs.delta_minus))
    state_dep = abs(gaps["excited"] - gaps["ground"]) / 2.0
    checks.append(("zero_switch_splitting", state_dep / abs(chi1), 1e-2,
                   state_dep < 1e-2 * abs(chi1), ""))
    return checks, []


def cmd_validate(args):
    cfg = _load(args)
    checks, notes = _validation_checks(cfg)
    rows = [[name, _fmt(value), _fmt(threshold), "pass" if ok else "fail", note]
            for name, value, threshold, ok, note in checks]
    path = Path(cfg.output_dir) / "validation.csv"
    lines = [",".join(["check", "value", "threshold", "status", "note"])]
    lines += [",".join(str(c) for c in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")
    for name, value, threshold, ok, note in checks:
        _emit(args, f"[{'PASS' if ok else 'FAIL'}] {name}: value={value!r} "
                    f"threshold={threshold!r} {note}")
    for note in notes:
        _emit(args, "note: " + note)
    _emit(args, f"wrote {path}")
    if not all(ok for _, _, _, ok, _ in checks):
        return NUMERICS_EXIT
    return 0


def cmd_scenario_list(args):
    for name, description in preset_names():
        print(f"{name}: {description}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="parity-scope",
        description="three-qubit dispersive parity readout toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="path to a scenario JSON file")
        p.add_argument("--preset", help="name of a shipped scenario preset")
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--quiet", action="store_true", help="suppress stdout chatter")

    p = sub.add_parser("dispersive", help="derive effective models and the parity verdict")
    common(p)
    p.set_defaults(func=cmd_dispersive)

    p = sub.add_parser("simulate", help="evolve the driven resonators and export trajectories")
    common(p)
    p.add_argument("--hw", default="all", choices=["0", "1", "2", "3", "all"],
                   help="Hamming weight(s) to simulate")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="information-gain sweep over chi/kappa")
    common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="run the exact-diagonalization validation suite")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("scenario-list", help="list the shipped presets")
    p.set_defaults(func=cmd_scenario_list)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return CONFIG_EXIT
    except (ParityConditionUnsatisfiable, NegativeDiscriminant) as exc:
        print(f"physics condition failed: {exc}", file=sys.stderr)
        return PHYSICS_EXIT
    except (ConvergenceFailure, StepTooLarge, GridTooCoarse,
            QuadratureNonconvergent) as exc:
        print(f"numerical convergence failure: {exc}", file=sys.stderr)
        return NUMERICS_EXIT


if __name__ == "__main__":
    sys.exit(main())
