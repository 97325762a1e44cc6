"""Scenario configuration: schema, unit handling, presets and derivation.

Configuration files are JSON trees quoting ordinary frequencies in MHz (the
/2pi convention) and times either in microseconds or in units of 1/kappa.
Internally everything becomes angular rad/us.  TCQ devices are specified by
their dressed qubit frequency, their transverse coupling and one effective
anharmonicity used for both the minus branch and the cross term -- the
parameter convention of the published coupling estimates, which cannot be
produced by a resonant bare pair (there the cross anharmonicity is twice the
branch one) but defines the effective model directly.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, replace

from .dispersive import (
    QubitCavityCoupling,
    TcqSpec,
    TransmonSpec,
    attach_resonators,
    dressed_sign_flip_couplings,
    parity_detunings,
    purcell_time,
    solve_couplings_for_chi,
    tcq_dispersive,
    tcq_mixing,
    tcq_state_shifts,
    transmon_dispersive,
    transmon_levels,
)
from .dynamics import DrivePulse
from .errors import ConfigError, ParityConditionUnsatisfiable

# ordinary frequency in MHz -> angular rad/us: omega = 2 pi f
MHZ = 2.0 * math.pi

MATCHED_CHI_RTOL = 1e-6


def _require(mapping, key, where):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required field {key!r}")
    return mapping[key]


def _number(mapping, key, where):
    value = _require(mapping, key, where)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class PulseConfig:
    amplitude: float          # drive amplitude in units of sqrt(kappa)
    ramp: float
    t_on: float
    t_off: float
    time_unit: str = "1/kappa"

    def resolve(self, kappa):
        """Physical DrivePulse for a given kappa (rad/us).

        The field amplitude carries dimension sqrt(rate), so the quoted
        number scales with sqrt(kappa); the resulting signal-to-noise of the
        integrated record is then kappa-independent.
        """
        scale = 1.0 / kappa if self.time_unit == "1/kappa" else 1.0
        return DrivePulse(amplitude=self.amplitude * math.sqrt(kappa),
                          ramp=self.ramp * scale,
                          t_on=self.t_on * scale,
                          t_off=self.t_off * scale)


@dataclass(frozen=True)
class SweepConfig:
    minimum: float = 0.1
    maximum: float = 1.2
    points: int = 61
    asymmetric_chi2: float = 0.3


@dataclass(frozen=True)
class AnalysisConfig:
    measurement_time: float = 28.0
    time_unit: str = "1/kappa"
    tau_points: int = 57
    phase: object = "optimal"
    sweep: SweepConfig = SweepConfig()

    def resolve_measurement_time(self, kappa):
        return (self.measurement_time / kappa
                if self.time_unit == "1/kappa" else self.measurement_time)


@dataclass(frozen=True)
class ValidationConfig:
    coupling_ratio: float = 0.05
    charge_cutoff: int = 12
    dispersion_grid: int = 21


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    devices: tuple
    resonator1: float              # rad/us
    resonator2: object             # rad/us or "auto-parity"
    kappa1: float
    kappa2: float
    chi_targets: tuple | None      # in units of kappa, e.g. (-0.5, -0.5)
    pulse: PulseConfig
    analysis: AnalysisConfig
    validation: ValidationConfig
    output_dir: str = "out"


def _parse_device(raw, index):
    where = f"devices[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = _require(raw, "type", where)
    name = raw.get("name", f"q{index}")
    if kind == "tcq":
        return {
            "type": "tcq",
            "name": name,
            "qubit_frequency": _number(raw, "qubit_frequency_mhz", where) * MHZ,
            "transverse_coupling": _number(raw, "transverse_coupling_mhz", where) * MHZ,
            "anharmonicity": _number(raw, "anharmonicity_mhz", where) * MHZ,
        }
    if kind == "transmon":
        return {
            "type": "transmon",
            "name": name,
            "josephson_energy": _number(raw, "josephson_energy_mhz", where) * MHZ,
            "charging_energy": _number(raw, "charging_energy_mhz", where) * MHZ,
            "g1": _number(raw, "g1_mhz", where) * MHZ,
            "g2": _number(raw, "g2_mhz", where) * MHZ,
        }
    raise ConfigError(f"{where}.type: unknown device type {kind!r}")


def parse_config(tree, name="config"):
    """Validate a configuration tree into a ScenarioConfig (rad/us units)."""
    if not isinstance(tree, dict):
        raise ConfigError("top level: expected a JSON object")

    raw_devices = _require(tree, "devices", "top level")
    if not isinstance(raw_devices, list) or not raw_devices:
        raise ConfigError("devices: expected a non-empty list")
    devices = tuple(_parse_device(d, i) for i, d in enumerate(raw_devices))

    bus = _require(tree, "bus", "top level")
    resonator1 = _number(bus, "resonator1_mhz", "bus") * MHZ
    raw_r2 = _require(bus, "resonator2_mhz", "bus")
    if raw_r2 == "auto-parity":
        resonator2 = "auto-parity"
    elif isinstance(raw_r2, (int, float)) and not isinstance(raw_r2, bool):
        resonator2 = float(raw_r2) * MHZ
    else:
        raise ConfigError(f"bus.resonator2_mhz: expected a number or 'auto-parity', got {raw_r2!r}")
    kappa1 = _number(bus, "kappa1_mhz", "bus") * MHZ
    kappa2 = _number(bus, "kappa2_mhz", "bus") * MHZ
    if kappa1 <= 0 or kappa2 <= 0:
        raise ConfigError("bus: decay rates must be positive")

    targets = tree.get("targets")
    chi_targets = None
    if targets is not None:
        chi_targets = (_number(targets, "chi1_over_kappa", "targets"),
                       _number(targets, "chi2_over_kappa", "targets"))

    raw_pulse = _require(tree, "pulse", "top level")
    pulse = PulseConfig(
        amplitude=_number(raw_pulse, "amplitude", "pulse"),
        ramp=_number(raw_pulse, "ramp", "pulse"),
        t_on=_number(raw_pulse, "t_on", "pulse"),
        t_off=_number(raw_pulse, "t_off", "pulse"),
        time_unit=raw_pulse.get("time_unit", "1/kappa"),
    )
    if pulse.time_unit not in ("1/kappa", "us"):
        raise ConfigError(f"pulse.time_unit: unknown unit {pulse.time_unit!r}")

    raw_analysis = tree.get("analysis", {})
    raw_sweep = raw_analysis.get("sweep", {})
    sweep = SweepConfig(
        minimum=float(raw_sweep.get("minimum", 0.1)),
        maximum=float(raw_sweep.get("maximum", 1.2)),
        points=int(raw_sweep.get("points", 61)),
        asymmetric_chi2=float(raw_sweep.get("asymmetric_chi2", 0.3)),
    )
    if sweep.points < 1 or sweep.minimum <= 0 or sweep.maximum < sweep.minimum:
        raise ConfigError("analysis.sweep: invalid range")
    analysis = AnalysisConfig(
        measurement_time=float(raw_analysis.get("measurement_time", 28.0)),
        time_unit=raw_analysis.get("time_unit", "1/kappa"),
        tau_points=int(raw_analysis.get("tau_points", 57)),
        phase=raw_analysis.get("phase", "optimal"),
        sweep=sweep,
    )
    raw_validation = tree.get("validation", {})
    validation = ValidationConfig(
        coupling_ratio=float(raw_validation.get("coupling_ratio", 0.05)),
        charge_cutoff=int(raw_validation.get("charge_cutoff", 12)),
        dispersion_grid=int(raw_validation.get("dispersion_grid", 21)),
    )

    return ScenarioConfig(
        name=tree.get("name", name),
        devices=devices,
        resonator1=resonator1,
        resonator2=resonator2,
        kappa1=kappa1,
        kappa2=kappa2,
        chi_targets=chi_targets,
        pulse=pulse,
        analysis=analysis,
        validation=validation,
        output_dir=tree.get("output_dir", "out"),
    )


def load_config(path):
    try:
        with open(path) as handle:
            tree = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_config(tree, name=str(path))


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _tcq_preset(chi1, chi2, name, description):
    return {
        "name": name,
        "description": description,
        "devices": [
            {"type": "tcq", "name": "a", "qubit_frequency_mhz": 6000.0,
             "transverse_coupling_mhz": -400.0, "anharmonicity_mhz": -300.0},
            {"type": "tcq", "name": "b", "qubit_frequency_mhz": 5600.0,
             "transverse_coupling_mhz": -400.0, "anharmonicity_mhz": -300.0},
            {"type": "tcq", "name": "c", "qubit_frequency_mhz": 5200.0,
             "transverse_coupling_mhz": -400.0, "anharmonicity_mhz": -300.0},
        ],
        "bus": {"resonator1_mhz": 7500.0, "resonator2_mhz": "auto-parity",
                "kappa1_mhz": 5.0, "kappa2_mhz": 5.0},
        "targets": {"chi1_over_kappa": chi1, "chi2_over_kappa": chi2},
        "pulse": {"amplitude": 0.5, "ramp": 4.0, "t_on": 1.0, "t_off": 16.0,
                  "time_unit": "1/kappa"},
        "analysis": {"measurement_time": 28.0, "time_unit": "1/kappa",
                     "tau_points": 57, "phase": "optimal",
                     "sweep": {"minimum": 0.1, "maximum": 1.2, "points": 61,
                               "asymmetric_chi2": 0.3}},
        "output_dir": "out",
    }


PRESETS = {
    "paper-sec5-symmetric": _tcq_preset(
        -0.5, -0.5, "paper-sec5-symmetric",
        "three TCQs, chi1 = chi2 = -kappa/2, published coupling estimate"),
    "paper-sec5-asymmetric": _tcq_preset(
        -0.3, -0.5, "paper-sec5-asymmetric",
        "weaker shift on the qubit-decay resonator for longer Purcell time"),
    "transmon-obstruction": {
        "name": "transmon-obstruction",
        "description": "three identical transmons; the parity condition must fail",
        "devices": [
            {"type": "transmon", "name": f"q{i}", "josephson_energy_mhz": 20000.0,
             "charging_energy_mhz": 300.0, "g1_mhz": 100.0, "g2_mhz": 100.0}
            for i in (1, 2, 3)
        ],
        "bus": {"resonator1_mhz": 7500.0, "resonator2_mhz": 7491.3,
                "kappa1_mhz": 5.0, "kappa2_mhz": 5.0},
        "pulse": {"amplitude": 0.5, "ramp": 4.0, "t_on": 1.0, "t_off": 16.0,
                  "time_unit": "1/kappa"},
        "analysis": {"measurement_time": 28.0},
        "output_dir": "out",
    },
    "fig4-cuts": _tcq_preset(
        0.5, 0.5, "fig4-cuts",
        "diagonal and asymmetric information-gain cuts over chi/kappa"),
}


def preset(name):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}")
    return parse_config(copy.deepcopy(PRESETS[name]), name=name)


def preset_names():
    return [(key, PRESETS[key]["description"]) for key in sorted(PRESETS)]


# ---------------------------------------------------------------------------
# scenario derivation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QubitResult:
    name: str
    model: object
    g1: float
    g2: float
    purcell: object


@dataclass(frozen=True)
class ScenarioReport:
    config: ScenarioConfig
    qubits: tuple
    resonator2: float
    detunings: object           # ParityDetunings or None
    parity_error: str | None

    @property
    def parity_satisfiable(self):
        return self.parity_error is None

    @property
    def kappa(self):
        return max(self.config.kappa1, self.config.kappa2)

    def measurement_setup(self):
        from .dynamics import MeasurementSetup
        from .errors import ParityConditionUnsatisfiable

        if not self.parity_satisfiable:
            raise ParityConditionUnsatisfiable(self.parity_error)
        pulse = self.config.pulse.resolve(self.kappa)
        det = self.detunings.plus_branch
        return MeasurementSetup(self.config.kappa1, self.config.kappa2,
                                det[0], det[1], self.qubits[0].model, pulse)


def _derive_tcq(device, config):
    kappa = max(config.kappa1, config.kappa2)
    chi1 = config.chi_targets[0] * kappa
    chi2 = config.chi_targets[1] * kappa
    omega1 = config.resonator1
    if config.resonator2 == "auto-parity":
        if chi1 * chi2 <= 0:
            raise ConfigError("auto-parity requires chi targets of equal sign")
        omega2 = omega1 + 2.0 * math.sqrt(3.0) * math.copysign(
            math.sqrt(chi1 * chi2), chi1)
    else:
        omega2 = config.resonator2

    bare = device["qubit_frequency"] - device["transverse_coupling"]
    spec = TcqSpec(bare, bare, device["anharmonicity"], device["anharmonicity"],
                   device["transverse_coupling"])
    dressed = tcq_mixing(spec)
    # effective-parameter convention of the scenario: one anharmonicity for
    # both the minus branch and the cross term
    dressed = replace(dressed, delta_plus=device["anharmonicity"],
                      delta_minus=device["anharmonicity"],
                      delta_cross=device["anharmonicity"])
    dressed = attach_resonators(dressed, omega1, omega2)
    g1, g2 = solve_couplings_for_chi((chi1, chi2), dressed)
    g1p, g1m, g2p, g2m = dressed_sign_flip_couplings(g1, g2)
    dressed = replace(dressed, g1_plus=g1p, g1_minus=g1m, g2_plus=g2p, g2_minus=g2m)
    model = tcq_dispersive(tcq_state_shifts(dressed), dressed)
    estimate = purcell_time(kappa, g1, dressed.omega_minus, omega1)
    return QubitResult(device["name"], model, g1, g2, estimate), omega2


def _derive_transmon(device, config):
    if config.resonator2 == "auto-parity":
        raise ConfigError("auto-parity is undefined for transmon scenarios")
    spec = TransmonSpec(device["josephson_energy"], device["charging_energy"])
    omega_t, _ = transmon_levels(spec)
    coupling = QubitCavityCoupling(device["g1"], device["g2"],
                                   omega_t - config.resonator1,
                                   omega_t - config.resonator2)
    model = transmon_dispersive(spec, coupling)
    return QubitResult(device["name"], model, device["g1"], device["g2"], None), \
        config.resonator2


def derive_scenario(config):
    """Resolve the device models, the bus and the parity verdict."""
    qubits = []
    omega2 = None
    for device in config.devices:
        if device["type"] == "tcq":
            if config.chi_targets is None:
                raise ConfigError("tcq scenarios need a targets block")
            result, omega2 = _derive_tcq(device, config)
        else:
            result, omega2 = _derive_transmon(device, config)
        qubits.append(result)

    # the parity scheme assumes matched shifts across the register
    for field in ("chi1", "chi2", "quantum_switch"):
        values = [getattr(q.model, field) for q in qubits]
        scale = max(max(abs(v) for v in values), 1e-30)
        if (max(values) - min(values)) / scale > MATCHED_CHI_RTOL:
            raise ConfigError(
                f"{field} differs across qubits by more than {MATCHED_CHI_RTOL:g} relative")

    detunings = None
    parity_error = None
    try:
        detunings = parity_detunings(qubits[0].model, config.kappa1, config.kappa2)
    except ParityConditionUnsatisfiable as exc:
        parity_error = str(exc)

    return ScenarioReport(config=config, qubits=tuple(qubits), resonator2=omega2,
                          detunings=detunings, parity_error=parity_error)
