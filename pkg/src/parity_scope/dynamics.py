"""Hamming-weight-conditioned dynamics of the two driven readout resonators.

Everything lives in the rotating frame of the drive.  Detunings are
``detuning_i = omega_i - omega_drive`` (resonator minus drive), so the
coherent field amplitudes obey the linear pair

    d a1/dt = -i [D1 + chi1 K] a1 - i chi12 K a2
              - (k1/2) a1 - sqrt(k1 k2)/2 a2 - i sqrt(k1) beta_in(t)

with ``K = 3 - 2 h_w`` and the mirrored equation for a2.  The output field is
``beta_out = beta_in - i (sqrt(k1) a1 + sqrt(k2) a2)``; with this pairing the
steady-state reflection coefficient is exactly unimodular.  (The two drive
sign conventions found in input-output treatments differ by a global phase of
the intracavity field; observables are insensitive to the choice.)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateResponse, SingularResponseMatrix, StepTooLarge

# integrator defaults: classical fixed-step RK4, dt = 1e-3 / kappa, half-step
# convergence probe on by default
DEFAULT_STEP_FACTOR = 1e-3
STEP_MARGIN = 0.01          # dt <= STEP_MARGIN * min(1/kappa, 1/|D + 3 chi|)
PROBE_RTOL = 1e-8
RECORD_TARGET = 2800        # aim for ~2801 stored samples per trajectory


def hamming_prefactor(hamming_weight):
    """Collective qubit weight K = 3 - 2 h_w entering all chi terms."""
    if hamming_weight not in (0, 1, 2, 3):
        raise ValueError("hamming_weight must be one of 0..3")
    return 3 - 2 * hamming_weight


@dataclass(frozen=True)
class DrivePulse:
    """Piecewise cosine-ramped measurement pulse.

    Zero before ``t_on``, cosine ramp of duration ``ramp`` up to ``amplitude``,
    flat until ``t_off``, cosine ramp back to zero.  The envelope is C^1 at
    all four joints.
    """

    amplitude: float
    ramp: float
    t_on: float
    t_off: float

    def __post_init__(self):
        if self.ramp <= 0:
            raise ValueError("ramp duration must be positive")
        if self.t_on < 0:
            raise ValueError("t_on must be >= 0")
        if self.t_on + self.ramp > self.t_off:
            raise ValueError("ramp must finish before t_off")

    @property
    def t_end(self):
        return self.t_off + self.ramp


def drive_envelope(t, pulse):
    """Evaluate the pulse envelope at time(s) t."""
    t_arr = np.asarray(t, dtype=float)
    eps, sig = pulse.amplitude, pulse.ramp
    on, off = pulse.t_on, pulse.t_off
    out = np.zeros_like(t_arr)
    rising = (t_arr >= on) & (t_arr < on + sig)
    out[rising] = eps / 2.0 * (1.0 - np.cos(np.pi / sig * (t_arr[rising] - on)))
    flat = (t_arr >= on + sig) & (t_arr < off)
    out[flat] = eps
    falling = (t_arr >= off) & (t_arr < off + sig)
    out[falling] = eps / 2.0 * (1.0 + np.cos(np.pi / sig * (t_arr[falling] - off)))
    return float(out) if np.isscalar(t) else out


@dataclass(frozen=True)
class MeasurementSetup:
    """Resonator bus, drive-frame detunings, dispersive model and pulse."""

    kappa1: float
    kappa2: float
    detuning1: float
    detuning2: float
    model: "DispersiveModel"
    pulse: DrivePulse

    def __post_init__(self):
        if self.kappa1 < 0 or self.kappa2 < 0 or self.kappa1 + self.kappa2 == 0:
            raise ValueError("decay rates must be >= 0 and not both zero")

    @property
    def kappa_scale(self):
        return max(self.kappa1, self.kappa2)


def mode_matrix(setup, hamming_weight, drive_offset=0.0):
    """2x2 generator of the coherent-amplitude pair for one Hamming weight."""
    k = hamming_prefactor(hamming_weight)
    m = setup.model
    cross = -1j * m.quantum_switch * k - math.sqrt(setup.kappa1 * setup.kappa2) / 2.0
    return np.array([
        [-1j * ((setup.detuning1 - drive_offset) + m.chi1 * k) - setup.kappa1 / 2.0, cross],
        [cross, -1j * ((setup.detuning2 - drive_offset) + m.chi2 * k) - setup.kappa2 / 2.0],
    ])


def _drive_vector(setup):
    return np.array([math.sqrt(setup.kappa1), math.sqrt(setup.kappa2)])


@dataclass(frozen=True)
class Trajectory:
    """Recorded coherent amplitudes and output field on a uniform grid."""

    times: np.ndarray
    alpha1: np.ndarray
    alpha2: np.ndarray
    drive: np.ndarray
    output: np.ndarray
    hamming_weight: int
    step: float

    def __post_init__(self):
        n = self.times.size
        if any(arr.size != n for arr in (self.alpha1, self.alpha2, self.drive, self.output)):
            raise ValueError("trajectory arrays must share one grid")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("time grid must be strictly increasing")
        if self.hamming_weight not in (0, 1, 2, 3):
            raise ValueError("hamming_weight must be one of 0..3")


def output_field(alpha1, alpha2, drive, setup):
    """Input-output combination beta_out = beta_in - i (sqrt(k1) a1 + sqrt(k2) a2)."""
    return drive - 1j * (math.sqrt(setup.kappa1) * alpha1 + math.sqrt(setup.kappa2) * alpha2)


def _step_bound(setup):
    rate = max(
        setup.kappa1,
        setup.kappa2,
        abs(setup.detuning1) + 3.0 * abs(setup.model.chi1),
        abs(setup.detuning2) + 3.0 * abs(setup.model.chi2),
        3.0 * abs(setup.model.quantum_switch),
    )
    return STEP_MARGIN / rate if rate > 0 else math.inf


def _rk4_coefficients(m, dt, u):
    """One-step RK4 propagator for da/dt = M a + u b(t) with scalar drive b.

    Classical RK4 applied to a linear system collapses to a constant step
    matrix plus three drive weights (b at the left node, midpoint, right
    node); this is algebraically identical to the textbook four-stage form.
    """
    eye = np.eye(2, dtype=complex)
    m2 = m @ m
    m3 = m2 @ m
    m4 = m3 @ m
    step = eye + dt * m + dt ** 2 / 2.0 * m2 + dt ** 3 / 6.0 * m3 + dt ** 4 / 24.0 * m4
    w_left = dt / 6.0 * (eye + dt * m + dt ** 2 / 2.0 * m2 + dt ** 3 / 4.0 * m3) @ u
    w_mid = dt / 6.0 * (4.0 * eye + 2.0 * dt * m + dt ** 2 / 2.0 * m2) @ u
    w_right = dt / 6.0 * u
    return step, w_left, w_mid, w_right


def _integrate(m, u, beta_nodes, beta_mid, dt, n_steps, stride):
    step, w_left, w_mid, w_right = _rk4_coefficients(m, dt, u)
    s11, s12 = step[0]
    s21, s22 = step[1]
    a1 = a2 = 0.0 + 0.0j
    n_rec = n_steps // stride + 1
    rec1 = np.empty(n_rec, dtype=complex)
    rec2 = np.empty(n_rec, dtype=complex)
    rec1[0] = rec2[0] = 0.0
    k = 1
    for i in range(n_steps):
        b0, bm, b1 = beta_nodes[i], beta_mid[i], beta_nodes[i + 1]
        a1, a2 = (s11 * a1 + s12 * a2 + w_left[0] * b0 + w_mid[0] * bm + w_right[0] * b1,
                  s21 * a1 + s22 * a2 + w_left[1] * b0 + w_mid[1] * bm + w_right[1] * b1)
        if (i + 1) % stride == 0:
            rec1[k] = a1
            rec2[k] = a2
            k += 1
    return rec1, rec2


def evolve(setup, hamming_weight, t_final, dt=None, stride=None, probe=True):
    """Integrate the driven amplitude pair from vacuum with fixed-step RK4.

    ``dt`` defaults to ``1e-3 / max(kappa)`` and must respect
    ``dt <= 0.01 * min(1/kappa, 1/|detuning + 3 chi|)``; it is nudged so the
    horizon is a whole number of steps.  With ``probe=True`` the run is
    repeated at dt/2 and the final amplitudes must agree to 1e-8 relative,
    otherwise StepTooLarge.  ``stride`` controls the recorded grid (default
    ~2801 samples).
    """
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    if dt is None:
        dt = DEFAULT_STEP_FACTOR / setup.kappa_scale
    bound = _step_bound(setup)
    if dt > bound:
        raise StepTooLarge(f"dt = {dt:.3e} exceeds the stability margin {bound:.3e}")

    n_steps = max(1, int(round(t_final / dt)))
    dt = t_final / n_steps
    if stride is None:
        stride = max(1, n_steps // RECORD_TARGET)
        while n_steps % stride:
            stride -= 1
    elif n_steps % stride:
        raise ValueError("stride must divide the number of steps")

    m = mode_matrix(setup, hamming_weight)
    u = -1j * _drive_vector(setup)
    nodes = np.arange(n_steps + 1) * dt
    beta_nodes = drive_envelope(nodes, setup.pulse)
    beta_mid = drive_envelope(nodes[:-1] + dt / 2.0, setup.pulse)

    rec1, rec2 = _integrate(m, u, beta_nodes, beta_mid, dt, n_steps, stride)

    if probe:
        fine_nodes = np.arange(2 * n_steps + 1) * (dt / 2.0)
        fine_beta = drive_envelope(fine_nodes, setup.pulse)
        fine_mid = drive_envelope(fine_nodes[:-1] + dt / 4.0, setup.pulse)
        f1, f2 = _integrate(m, u, fine_beta, fine_mid, dt / 2.0, 2 * n_steps, 2 * n_steps)
        ref = max(abs(f1[-1]), abs(f2[-1]), 1e-30)
        err = max(abs(rec1[-1] - f1[-1]), abs(rec2[-1] - f2[-1])) / ref
        if err > PROBE_RTOL:
            raise StepTooLarge(f"half-step probe disagreement {err:.3e} > {PROBE_RTOL}")

    times = nodes[::stride]
    drive = beta_nodes[::stride]
    return Trajectory(
        times=times,
        alpha1=rec1,
        alpha2=rec2,
        drive=drive,
        output=output_field(rec1, rec2, drive, setup),
        hamming_weight=hamming_weight,
        step=dt,
    )


def steady_state(setup, hamming_weight, drive_amplitude=None, drive_offset=0.0):
    """Steady-state amplitudes under a constant drive.

    Solves the 2x2 response system M a = i v beta; for a decoupled resonator
    this reduces to ``a = -i sqrt(kappa) beta / (i(D + chi K) + kappa/2)``.
    """
    if drive_amplitude is None:
        drive_amplitude = setup.pulse.amplitude
    m = mode_matrix(setup, hamming_weight, drive_offset)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    scale = max(abs(m[0, 0]), abs(m[1, 1]), abs(m[0, 1])) ** 2
    if abs(det) <= 1e-15 * scale:
        raise SingularResponseMatrix("response matrix is singular")
    rhs = 1j * _drive_vector(setup) * drive_amplitude
    a1 = (m[1, 1] * rhs[0] - m[0, 1] * rhs[1]) / det
    a2 = (m[0, 0] * rhs[1] - m[1, 0] * rhs[0]) / det
    return a1, a2


def reflection(setup, hamming_weight, drive_offset=0.0):
    """Frequency-domain reflection coefficient at the (offset) drive frequency.

    Writing D_i' = detuning_i - drive_offset + chi_i K,

        X = D1' D2' - (K chi12)^2
        N = k1 D2' + k2 D1' - 2 sqrt(k1 k2) K chi12
        r = (X + i N/2) / (X - i N/2),

    manifestly unimodular for a lossless two-resonator bus.  Raises
    DegenerateResponse when the denominator vanishes.
    """
    k = hamming_prefactor(hamming_weight)
    m = setup.model
    d1 = (setup.detuning1 - drive_offset) + m.chi1 * k
    d2 = (setup.detuning2 - drive_offset) + m.chi2 * k
    cross = k * m.quantum_switch
    x = d1 * d2 - cross ** 2
    n = (setup.kappa1 * d2 + setup.kappa2 * d1
         - 2.0 * math.sqrt(setup.kappa1 * setup.kappa2) * cross)
    denom = complex(x, -0.5 * n)
    scale = max(d1 * d1, d2 * d2, cross * cross, setup.kappa1 ** 2, setup.kappa2 ** 2)
    if abs(denom) <= 1e-15 * scale:
        raise DegenerateResponse("reflection denominator vanished")
    return complex(x, 0.5 * n) / denom


def decay_envelope_bound(setup, hamming_weight):
    """Rigorous ring-down envelope constants for the free evolution.

    Returns ``(rate, condition)`` such that after the drive ends
    ``||a(t)|| <= condition * exp(-rate (t - t0)) * ||a(t0)||``; ``rate`` is
    the slowest eigenvalue decay and ``condition`` the eigenvector condition
    number of the 2x2 generator (non-normal transients can exceed the bare
    eigenvalue envelope by up to this factor).
    """
    m = mode_matrix(setup, hamming_weight)
    evals, evecs = np.linalg.eig(m)
    rate = -float(np.max(evals.real))
    condition = float(np.linalg.cond(evecs))
    return rate, condition
