"""Exact-diagonalization references validating the perturbative models.

Three layers of brute force:

* the two-island charge-basis Hamiltonian (cosine potential as symmetric
  nearest-neighbor hopping, interaction diagonal in charge), for charge
  dispersion and level structure;
* the coupled-Duffing pair in a truncated Fock space, for the mixing-angle
  normal form (dressed frequencies/anharmonicities);
* full qubit-plus-two-cavity ladders, for extracting dispersive shifts and
  the resonator-resonator switch from raw spectra.

All Hamiltonians are dense real-symmetric; sizes stay at desk scale
(<~ 4000) so plain eigh is both adequate and easy to audit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import minimize_scalar

from .dispersive import DressedTcq, tcq_mixing
from .errors import ConvergenceFailure, LevelIdentificationFailure

CONVERGENCE_RTOL = 1e-8
OVERLAP_FLOOR = 0.5


# ---------------------------------------------------------------------------
# charge basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChargeBasisConfig:
    """Two charge islands with Josephson hopping and a charge-charge term.

    Energies are angular frequencies; ``charge_cutoff`` is the initial
    per-island cutoff (basis -n..n), raised in steps of 4 until the lowest
    levels converge or ``cutoff_ceiling`` is hit.
    """

    charging_plus: float
    charging_minus: float
    josephson_plus: float
    josephson_minus: float
    interaction: float
    offset_plus: float = 0.0
    offset_minus: float = 0.0
    charge_cutoff: int = 20
    cutoff_ceiling: int = 44

    def __post_init__(self):
        if self.charge_cutoff < 8:
            raise ValueError("charge_cutoff must be at least 8")
        if self.cutoff_ceiling < self.charge_cutoff:
            raise ValueError("cutoff_ceiling below charge_cutoff")

    @property
    def charging_scale(self):
        return max(self.charging_plus, self.charging_minus)


def transmon_charge_hamiltonian(josephson, charging, offset, cutoff):
    """Single-island Hamiltonian 4 E_C (n - n_g)^2 - E_J cos(phi)."""
    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    h = np.diag(4.0 * charging * (n - offset) ** 2)
    hop = -josephson / 2.0 * np.ones(2 * cutoff)
    return h + np.diag(hop, 1) + np.diag(hop, -1)


def transmon_charge_spectrum(josephson, charging, offset=0.0, cutoff=20, levels=6):
    h = transmon_charge_hamiltonian(josephson, charging, offset, cutoff)
    return sla.eigh(h, eigvals_only=True, subset_by_index=(0, levels - 1))


def tcq_charge_hamiltonian(cfg, cutoff):
    """Two-island Hamiltonian with the 4 E_I (n+ - ng+)(n- - ng-) cross term."""
    dim = 2 * cutoff + 1
    n = np.arange(-cutoff, cutoff + 1, dtype=float)
    eye = np.eye(dim)
    h_plus = transmon_charge_hamiltonian(cfg.josephson_plus, cfg.charging_plus,
                                         cfg.offset_plus, cutoff)
    h_minus = transmon_charge_hamiltonian(cfg.josephson_minus, cfg.charging_minus,
                                          cfg.offset_minus, cutoff)
    charge_plus = np.diag(n - cfg.offset_plus)
    charge_minus = np.diag(n - cfg.offset_minus)
    return (np.kron(h_plus, eye) + np.kron(eye, h_minus)
            + 4.0 * cfg.interaction * np.kron(charge_plus, charge_minus))


def tcq_charge_spectrum(cfg, levels=6):
    """Lowest eigenvalues of the two-island Hamiltonian, cutoff-converged.

    The cutoff is raised by 4 until the requested levels move by less than
    1e-8 of the charging scale; failure at the ceiling raises
    ConvergenceFailure.
    """
    cutoff = cfg.charge_cutoff
    values = sla.eigh(tcq_charge_hamiltonian(cfg, cutoff), eigvals_only=True,
                      subset_by_index=(0, levels - 1))
    tol = CONVERGENCE_RTOL * cfg.charging_scale
    while True:
        probe = sla.eigh(tcq_charge_hamiltonian(cfg, cutoff + 4), eigvals_only=True,
                         subset_by_index=(0, levels - 1))
        if np.max(np.abs(probe - values)) <= tol:
            return values
        cutoff += 4
        values = probe
        if cutoff > cfg.cutoff_ceiling:
            raise ConvergenceFailure(
                f"charge-basis spectrum not converged at cutoff {cfg.cutoff_ceiling}")


def converged_charge_cutoff(cfg, levels=6):
    """Smallest cutoff (from cfg.charge_cutoff in steps of 4) passing the probe."""
    cutoff = cfg.charge_cutoff
    values = sla.eigh(tcq_charge_hamiltonian(cfg, cutoff), eigvals_only=True,
                      subset_by_index=(0, levels - 1))
    tol = CONVERGENCE_RTOL * cfg.charging_scale
    while True:
        probe = sla.eigh(tcq_charge_hamiltonian(cfg, cutoff + 4), eigvals_only=True,
                         subset_by_index=(0, levels - 1))
        if np.max(np.abs(probe - values)) <= tol:
            return cutoff
        cutoff += 4
        values = probe
        if cutoff > cfg.cutoff_ceiling:
            raise ConvergenceFailure(
                f"charge-basis spectrum not converged at cutoff {cfg.cutoff_ceiling}")


def charge_dispersion(cfg, levels=6, grid_points=21):
    """Max-min excursion of each level over the offset-charge unit square.

    One convergence probe (at the corner and the center of the square) fixes
    the cutoff for the whole sweep.
    """
    from dataclasses import replace

    cutoff = max(
        converged_charge_cutoff(replace(cfg, offset_plus=0.0, offset_minus=0.0), levels),
        converged_charge_cutoff(replace(cfg, offset_plus=0.5, offset_minus=0.5), levels),
    )
    grid = np.linspace(0.0, 1.0, grid_points)
    lows = np.full(levels, np.inf)
    highs = np.full(levels, -np.inf)
    for ng_plus in grid:
        for ng_minus in grid:
            probe = replace(cfg, offset_plus=float(ng_plus), offset_minus=float(ng_minus))
            vals = sla.eigh(tcq_charge_hamiltonian(probe, cutoff), eigvals_only=True,
                            subset_by_index=(0, levels - 1))
            lows = np.minimum(lows, vals)
            highs = np.maximum(highs, vals)
    return highs - lows


# ---------------------------------------------------------------------------
# coupled-Duffing normal form check
# ---------------------------------------------------------------------------

def _lowering(levels):
    return np.diag(np.sqrt(np.arange(1.0, levels)), 1)


def _number(levels):
    return np.diag(np.arange(float(levels)))


def duffing_pair_hamiltonian(spec, levels):
    """Bare coupled-Duffing TCQ in a (levels x levels) Fock space."""
    a = _lowering(levels)
    n = _number(levels)
    eye = np.eye(levels)

    def duffing(omega, delta):
        return omega * n + delta / 2.0 * (n @ n - n)

    return (np.kron(duffing(spec.omega_plus, spec.delta_plus), eye)
            + np.kron(eye, duffing(spec.omega_minus, spec.delta_minus))
            + spec.transverse_coupling * (np.kron(a, a.T) + np.kron(a.T, a)))


def _beam_splitter_frame(angle, levels):
    """Rotated product-state dictionary: columns of U^dagger label the
    dressed states |n+ n->."""
    a = _lowering(levels)
    generator = angle * (np.kron(a, a.T) - np.kron(a.T, a))
    return sla.expm(generator).T  # real orthogonal: U^dagger = U^T


def _identify(eigvecs, target):
    overlaps = np.abs(eigvecs.T @ target)
    k = int(np.argmax(overlaps))
    if overlaps[k] < OVERLAP_FLOOR:
        raise LevelIdentificationFailure(
            f"best overlap {overlaps[k]:.3f} below {OVERLAP_FLOOR}")
    return k, float(overlaps[k])


@dataclass(frozen=True)
class DressedCheckReport:
    """Exact vs normal-form dressed parameters of the coupled-Duffing pair."""

    exact: dict
    perturbative: dict
    relative_errors: dict
    min_overlap: float

    @property
    def worst_error(self):
        return max(self.relative_errors.values())


def dressed_tcq_check(spec, levels=8):
    """Extract dressed frequencies/anharmonicities from exact eigenvalues.

    Labels come from maximal overlap with the beam-splitter-rotated product
    states; the extracted combinations are

        omega_pm    = E(1 0) - E(0 0), E(0 1) - E(0 0)
        delta_pm    = E(2 0) - 2 E(1 0) + E(0 0)   (and the minus analogue)
        delta_cross = E(1 1) - E(1 0) - E(0 1) + E(0 0)
    """
    if levels < 6:
        raise ValueError("need at least 6 levels per mode")
    dressed = tcq_mixing(spec)
    h = duffing_pair_hamiltonian(spec, levels)
    values, vectors = sla.eigh(h)
    frame = _beam_splitter_frame(dressed.mixing_angle, levels)

    energies = {}
    min_overlap = 1.0
    for label in ((0, 0), (0, 1), (1, 0), (0, 2), (2, 0), (1, 1)):
        k, overlap = _identify(vectors, frame[:, label[0] * levels + label[1]])
        energies[label] = values[k]
        min_overlap = min(min_overlap, overlap)

    e = energies
    exact = {
        "omega_plus": e[(1, 0)] - e[(0, 0)],
        "omega_minus": e[(0, 1)] - e[(0, 0)],
        "delta_plus": e[(2, 0)] - 2.0 * e[(1, 0)] + e[(0, 0)],
        "delta_minus": e[(0, 2)] - 2.0 * e[(0, 1)] + e[(0, 0)],
        "delta_cross": e[(1, 1)] - e[(1, 0)] - e[(0, 1)] + e[(0, 0)],
    }
    perturbative = {name: getattr(dressed, name) for name in exact}
    freq_scale = max(abs(exact["omega_plus"]), abs(exact["omega_minus"]))
    errors = {}
    for name in exact:
        # floor keeps identically-zero quantities from reporting 0/0 as 1
        scale = max(abs(exact[name]), abs(perturbative[name]), 1e-9 * freq_scale)
        errors[name] = abs(exact[name] - perturbative[name]) / scale
    return DressedCheckReport(exact, perturbative, errors, min_overlap)


# ---------------------------------------------------------------------------
# qubit + two-cavity ladders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LadderConfig:
    """Exact-diagonalization setup for one qubit model plus two cavities.

    ``kind="transmon"`` uses a Duffing qubit with couplings ``(g1, g2)``;
    ``kind="tcq"`` the dressed TCQ normal form with per-branch couplings
    ``(g1_plus, g1_minus, g2_plus, g2_minus)``.  Cutoffs count levels per
    mode (so photon cutoff 3 keeps up to two photons).
    """

    kind: str
    qubit_frequency: float = 0.0
    anharmonicity: float = 0.0
    dressed: DressedTcq | None = None
    resonator1_frequency: float = 0.0
    resonator2_frequency: float = 0.0
    couplings: tuple = ()
    qubit_levels: int = 3
    photon_levels: int = 3

    def __post_init__(self):
        if self.kind not in ("transmon", "tcq"):
            raise ValueError("kind must be 'transmon' or 'tcq'")
        if self.qubit_levels < 3:
            raise ValueError("qubit modes need at least 3 levels")
        if self.photon_levels < 3:
            raise ValueError("cavities need at least 2 photons (3 levels)")
        n_g = 2 if self.kind == "transmon" else 4
        if len(self.couplings) != n_g:
            raise ValueError(f"{self.kind} ladder expects {n_g} couplings")
        if self.kind == "tcq" and self.dressed is None:
            raise ValueError("tcq ladder needs the dressed parameters")


def _transmon_ladder_hamiltonian(cfg, resonator2_frequency, photon_levels):
    nq, nc = cfg.qubit_levels, photon_levels
    b = _lowering(nq)
    a = _lowering(nc)
    iq, ic = np.eye(nq), np.eye(nc)
    n_ph = _number(nc)
    n_q = _number(nq)
    energy = cfg.qubit_frequency * n_q + cfg.anharmonicity / 2.0 * (n_q @ n_q - n_q)
    g1, g2 = cfg.couplings
    h = (np.kron(energy, np.kron(ic, ic))
         + cfg.resonator1_frequency * np.kron(iq, np.kron(n_ph, ic))
         + resonator2_frequency * np.kron(iq, np.kron(ic, n_ph)))
    h += g1 * (np.kron(b.T, np.kron(a, ic)) + np.kron(b, np.kron(a.T, ic)))
    h += g2 * (np.kron(b.T, np.kron(ic, a)) + np.kron(b, np.kron(ic, a.T)))
    return h


def _tcq_ladder_hamiltonian(cfg, resonator2_frequency, photon_levels):
    nq, nc = cfg.qubit_levels, photon_levels
    d = cfg.dressed
    b = _lowering(nq)
    a = _lowering(nc)
    iq, ic = np.eye(nq), np.eye(nc)
    n_ph = _number(nc)
    n_q = _number(nq)

    def op4(hp, hm, c1, c2):
        return np.kron(hp, np.kron(hm, np.kron(c1, c2)))

    def duffing(omega, delta):
        return omega * n_q + delta / 2.0 * (n_q @ n_q - n_q)

    h = (op4(duffing(d.omega_plus, d.delta_plus), iq, ic, ic)
         + op4(iq, duffing(d.omega_minus, d.delta_minus), ic, ic)
         + d.delta_cross * op4(n_q, n_q, ic, ic)
         + cfg.resonator1_frequency * op4(iq, iq, n_ph, ic)
         + resonator2_frequency * op4(iq, iq, ic, n_ph))
    g1p, g1m, g2p, g2m = cfg.couplings
    raising = {
        "1+": op4(b.T, iq, a, ic), "1-": op4(iq, b.T, a, ic),
        "2+": op4(b.T, iq, ic, a), "2-": op4(iq, b.T, ic, a),
    }
    for g, key in ((g1p, "1+"), (g1m, "1-"), (g2p, "2+"), (g2m, "2-")):
        if g != 0.0:
            h += g * (raising[key] + raising[key].T)
    return h


def _ladder_hamiltonian(cfg, resonator2_frequency=None, photon_levels=None):
    w2 = cfg.resonator2_frequency if resonator2_frequency is None else resonator2_frequency
    nc = cfg.photon_levels if photon_levels is None else photon_levels
    if cfg.kind == "transmon":
        return _transmon_ladder_hamiltonian(cfg, w2, nc)
    return _tcq_ladder_hamiltonian(cfg, w2, nc)


def _ladder_index(cfg, qubit_label, n1, n2, photon_levels=None):
    nc = cfg.photon_levels if photon_levels is None else photon_levels
    if cfg.kind == "transmon":
        return (qubit_label * nc + n1) * nc + n2
    n_plus, n_minus = qubit_label
    return (((n_plus * cfg.qubit_levels) + n_minus) * nc + n1) * nc + n2


def _qubit_labels(cfg):
    # ground / excited qubit labels: |0>,|1> for the transmon, |0+0->,|0+1->
    # for the TCQ
    if cfg.kind == "transmon":
        return 0, 1
    return (0, 0), (0, 1)


def _extract_chis(cfg, resonator2_frequency=None, photon_levels=None):
    h = _ladder_hamiltonian(cfg, resonator2_frequency, photon_levels)
    values, vectors = sla.eigh(h)
    ground, excited = _qubit_labels(cfg)

    def energy(label, n1, n2):
        idx = _ladder_index(cfg, label, n1, n2, photon_levels)
        target = np.zeros(h.shape[0])
        target[idx] = 1.0
        k, _ = _identify(vectors, target)
        return values[k]

    shift1_ground = energy(ground, 1, 0) - energy(ground, 0, 0)
    shift1_excited = energy(excited, 1, 0) - energy(excited, 0, 0)
    shift2_ground = energy(ground, 0, 1) - energy(ground, 0, 0)
    shift2_excited = energy(excited, 0, 1) - energy(excited, 0, 0)
    chi1 = 0.5 * (shift1_excited - shift1_ground)
    chi2 = 0.5 * (shift2_excited - shift2_ground)
    return chi1, chi2


@dataclass(frozen=True)
class ChiOracleReport:
    chi1: float
    chi2: float
    chi1_perturbative: float
    chi2_perturbative: float

    @property
    def relative_errors(self):
        return (abs(self.chi1 - self.chi1_perturbative) / abs(self.chi1),
                abs(self.chi2 - self.chi2_perturbative) / abs(self.chi2))


def _perturbative_chis(cfg):
    if cfg.kind == "transmon":
        g1, g2 = cfg.couplings
        d1 = cfg.qubit_frequency - cfg.resonator1_frequency
        d2 = cfg.qubit_frequency - cfg.resonator2_frequency
        delta = cfg.anharmonicity
        return (g1 ** 2 / d1 - g1 ** 2 / (d1 + delta),
                g2 ** 2 / d2 - g2 ** 2 / (d2 + delta))
    from dataclasses import replace

    from .dispersive import attach_resonators, tcq_dispersive, tcq_state_shifts

    dressed = attach_resonators(cfg.dressed, cfg.resonator1_frequency,
                                cfg.resonator2_frequency)
    g1p, g1m, g2p, g2m = cfg.couplings
    dressed = replace(dressed, g1_plus=g1p, g1_minus=g1m, g2_plus=g2p, g2_minus=g2m)
    model = tcq_dispersive(tcq_state_shifts(dressed), dressed)
    return model.chi1, model.chi2


def chi_oracle(cfg, check_convergence=True):
    """Dispersive shifts extracted from the exact ladder spectrum.

    chi_i is half the difference of the resonator-i photon addition energy
    between the excited and ground qubit states.  With
    ``check_convergence=True`` the extraction is repeated with the photon
    cutoff doubled and must agree within 1e-8 of the qubit frequency scale.
    """
    chi1, chi2 = _extract_chis(cfg)
    if check_convergence:
        probe1, probe2 = _extract_chis(cfg, photon_levels=2 * cfg.photon_levels)
        scale = max(abs(cfg.qubit_frequency),
                    abs(cfg.dressed.omega_minus) if cfg.dressed else 0.0, 1e-30)
        if max(abs(probe1 - chi1), abs(probe2 - chi2)) > CONVERGENCE_RTOL * scale:
            raise ConvergenceFailure("chi extraction not converged in photon cutoff")
    pert1, pert2 = _perturbative_chis(cfg)
    return ChiOracleReport(chi1, chi2, pert1, pert2)


def _photon_pair_gap(cfg, qubit_label, resonator2_frequency):
    h = _ladder_hamiltonian(cfg, resonator2_frequency)
    values, vectors = sla.eigh(h)
    i10 = _ladder_index(cfg, qubit_label, 1, 0)
    i01 = _ladder_index(cfg, qubit_label, 0, 1)
    k10 = int(np.argmax(np.abs(vectors[i10, :])))
    k01 = int(np.argmax(np.abs(vectors[i01, :])))
    if k10 == k01:
        # fully hybridized pair: take the two dominant eigenstates on the
        # two-dimensional photon subspace
        weight = vectors[i10, :] ** 2 + vectors[i01, :] ** 2
        k10, k01 = np.argsort(weight)[-2:]
    return abs(values[k10] - values[k01])


def switch_splitting(cfg, scan_halfwidth=None):
    """Minimal single-photon avoided-crossing gap per qubit state.

    Sweeps the second resonator through the first one's frequency and
    minimizes the splitting of the two photon-like eigenstates; at the
    crossing the minimal gap equals twice the magnitude of the effective
    resonator-resonator coupling for that qubit state.  Returns
    ``{"ground": gap, "excited": gap}``.
    """
    omega1 = cfg.resonator1_frequency
    if scan_halfwidth is None:
        scan_halfwidth = 0.02 * abs(omega1)
    ground, excited = _qubit_labels(cfg)
    gaps = {}
    for name, label in (("ground", ground), ("excited", excited)):
        result = minimize_scalar(
            lambda w2: _photon_pair_gap(cfg, label, w2),
            bounds=(omega1 - scan_halfwidth, omega1 + scan_halfwidth),
            method="bounded", options={"xatol": 1e-12 * max(abs(omega1), 1.0)})
        gaps[name] = float(result.fun)
    return gaps
