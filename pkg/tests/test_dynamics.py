"""Tests for the driven two-resonator dynamics and reflection."""

import math

import numpy as np
import pytest
import scipy.linalg as sla

from parity_scope.dispersive import DispersiveModel, parity_detunings
from parity_scope.dynamics import (
    DrivePulse,
    MeasurementSetup,
    decay_envelope_bound,
    drive_envelope,
    evolve,
    hamming_prefactor,
    mode_matrix,
    output_field,
    reflection,
    steady_state,
)
from parity_scope.errors import StepTooLarge


def make_setup(chi1=0.5, chi2=0.5, chi12=0.0, kappa1=1.0, kappa2=1.0,
               detunings=None, amplitude=0.5, ramp=4.0, t_on=1.0, t_off=16.0):
    model = DispersiveModel(0.0, 0.0, 0.0, chi1, chi2, 0.0, chi12)
    if detunings is None:
        det = parity_detunings(model, kappa1, kappa2)
        detunings = det.plus_branch
    pulse = DrivePulse(amplitude=amplitude, ramp=ramp, t_on=t_on, t_off=t_off)
    return MeasurementSetup(kappa1, kappa2, detunings[0], detunings[1], model, pulse)


def constant_setup(**kwargs):
    # long flat top so the trajectory reaches steady state well before t_off
    return make_setup(ramp=1e-6, t_on=0.0, t_off=1e6, **kwargs)


# ---------------------------------------------------------------------------
# pulse envelope
# ---------------------------------------------------------------------------

def test_envelope_zero_before_switch_on():
    pulse = DrivePulse(0.5, 4.0, 1.0, 16.0)
    assert drive_envelope(0.0, pulse) == 0.0
    assert drive_envelope(0.999, pulse) == 0.0


def test_envelope_half_amplitude_mid_ramp():
    pulse = DrivePulse(0.5, 4.0, 1.0, 16.0)
    assert drive_envelope(1.0 + 2.0, pulse) == pytest.approx(0.25, rel=1e-12)
    assert drive_envelope(16.0 + 2.0, pulse) == pytest.approx(0.25, rel=1e-12)


def test_envelope_flat_top_and_tail():
    pulse = DrivePulse(0.5, 4.0, 1.0, 16.0)
    assert drive_envelope(10.0, pulse) == 0.5
    assert drive_envelope(20.0, pulse) == 0.0
    assert drive_envelope(25.0, pulse) == 0.0


def test_envelope_c1_at_joints():
    pulse = DrivePulse(0.5, 4.0, 1.0, 16.0)
    eps = 1e-7
    for joint in (1.0, 5.0, 16.0, 20.0):
        left = (drive_envelope(joint - eps, pulse) - drive_envelope(joint - 2 * eps, pulse)) / eps
        right = (drive_envelope(joint + 2 * eps, pulse) - drive_envelope(joint + eps, pulse)) / eps
        assert abs(left - right) < 1e-5


def test_pulse_validation():
    with pytest.raises(ValueError):
        DrivePulse(0.5, 0.0, 1.0, 16.0)
    with pytest.raises(ValueError):
        DrivePulse(0.5, 4.0, -1.0, 16.0)
    with pytest.raises(ValueError):
        DrivePulse(0.5, 4.0, 1.0, 3.0)


# ---------------------------------------------------------------------------
# evolve
# ---------------------------------------------------------------------------

def test_evolve_zero_drive_stays_in_vacuum():
    setup = make_setup(amplitude=0.0)
    traj = evolve(setup, 0, 28.0)
    assert np.all(traj.alpha1 == 0)
    assert np.all(traj.alpha2 == 0)
    assert np.all(traj.output == 0)


def test_evolve_linearity_is_exact():
    s1 = make_setup(amplitude=0.25)
    s2 = make_setup(amplitude=0.5)
    t1 = evolve(s1, 1, 28.0, probe=False)
    t2 = evolve(s2, 1, 28.0, probe=False)
    assert np.array_equal(2.0 * t1.alpha1, t2.alpha1)
    assert np.array_equal(2.0 * t1.alpha2, t2.alpha2)


def test_evolve_matches_steady_state():
    setup = constant_setup()
    for hw in range(4):
        traj = evolve(setup, hw, 30.0, probe=False)
        a1, a2 = steady_state(setup, hw)
        scale = max(abs(a1), abs(a2))
        assert abs(traj.alpha1[-1] - a1) / scale < 1e-6
        assert abs(traj.alpha2[-1] - a2) / scale < 1e-6


def test_evolve_single_mode_textbook_response():
    # kappa2 = 0 and chi12 = 0 decouples resonator 1 into the textbook form
    model = DispersiveModel(0.0, 0.0, 0.0, 0.5, 0.3, 0.0, 0.0)
    pulse = DrivePulse(0.4, 1e-6, 0.0, 1e6)
    setup = MeasurementSetup(1.0, 0.0, 0.7, -0.9, model, pulse)
    hw = 1
    traj = evolve(setup, hw, 30.0, probe=False)
    k = hamming_prefactor(hw)
    expected = -1j * math.sqrt(1.0) * 0.4 / (1j * (0.7 + 0.5 * k) + 0.5)
    assert traj.alpha1[-1] == pytest.approx(expected, rel=1e-6)
    assert abs(traj.alpha2[-1]) < 1e-12


def test_evolve_rk4_convergence_order():
    # independent oracle: alpha(T) = int_0^T expm(M (T-s)) u beta(s) ds,
    # ramp segment by 64-node Gauss-Legendre, flat segment in closed form
    setup = make_setup(ramp=0.5, t_on=0.0, t_off=1e6)
    m = mode_matrix(setup, 0)
    u = -1j * np.array([1.0, 1.0]) * 1.0
    t_final = 2.0
    sigma = setup.pulse.ramp
    nodes, weights = np.polynomial.legendre.leggauss(64)
    s_vals = 0.5 * sigma * (nodes + 1.0)
    exact = np.zeros(2, dtype=complex)
    for s, w in zip(s_vals, weights):
        beta = drive_envelope(s, setup.pulse)
        exact += 0.5 * sigma * w * (sla.expm(m * (t_final - s)) @ u) * beta
    exact += np.linalg.solve(
        m, (sla.expm(m * (t_final - sigma)) - np.eye(2)) @ u) * setup.pulse.amplitude
    errors = []
    steps = [4e-3, 2e-3, 1e-3]
    for dt in steps:
        traj = evolve(setup, 0, t_final, dt=dt, probe=False)
        errors.append(max(abs(traj.alpha1[-1] - exact[0]), abs(traj.alpha2[-1] - exact[1])))
    slope = np.polyfit(np.log(steps), np.log(errors), 1)[0]
    assert slope == pytest.approx(4.0, abs=0.3)


def test_evolve_step_guard():
    setup = make_setup()
    with pytest.raises(StepTooLarge):
        evolve(setup, 0, 28.0, dt=0.5)


def test_evolve_probe_passes_at_default_step():
    setup = make_setup()
    traj = evolve(setup, 2, 28.0, probe=True)
    assert traj.times.size == 2801
    assert traj.times[-1] == pytest.approx(28.0)


# ---------------------------------------------------------------------------
# steady state
# ---------------------------------------------------------------------------

def test_steady_state_sign_structure():
    # at zero detuning the K -> -K pair is related by conjugation and sign
    setup = make_setup(detunings=(0.0, 0.0))
    a = steady_state(setup, 0)   # K = +3
    b = steady_state(setup, 3)   # K = -3
    assert b[0] == pytest.approx(-np.conj(a[0]), rel=1e-12)
    assert b[1] == pytest.approx(-np.conj(a[1]), rel=1e-12)


def test_steady_state_drive_scaling():
    setup = make_setup()
    a = steady_state(setup, 1, drive_amplitude=1.0)
    b = steady_state(setup, 1, drive_amplitude=2.5)
    assert b[0] == pytest.approx(2.5 * a[0], rel=1e-14)
    assert b[1] == pytest.approx(2.5 * a[1], rel=1e-14)


# ---------------------------------------------------------------------------
# reflection
# ---------------------------------------------------------------------------

def test_reflection_unimodular_randomized():
    rng = np.random.default_rng(42)
    worst = 0.0
    for _ in range(10_000):
        setup = make_setup(
            chi1=rng.uniform(-1.5, 1.5), chi2=rng.uniform(-1.5, 1.5),
            chi12=rng.uniform(-0.5, 0.5),
            kappa1=rng.uniform(0.5, 2.0), kappa2=rng.uniform(0.5, 2.0),
            detunings=(rng.uniform(-3, 3), rng.uniform(-3, 3)))
        r = reflection(setup, rng.integers(0, 4))
        worst = max(worst, abs(abs(r) - 1.0))
    assert worst < 1e-12


def test_reflection_matches_steady_state_solve():
    rng = np.random.default_rng(7)
    for _ in range(200):
        setup = make_setup(
            chi1=rng.uniform(0.1, 1.0), chi2=rng.uniform(0.1, 1.0),
            chi12=rng.uniform(-0.2, 0.2),
            kappa1=rng.uniform(0.5, 2.0), kappa2=rng.uniform(0.5, 2.0),
            detunings=(rng.uniform(-2, 2), rng.uniform(-2, 2)))
        hw = int(rng.integers(0, 4))
        a1, a2 = steady_state(setup, hw, drive_amplitude=1.0)
        r_io = 1.0 - 1j * (math.sqrt(setup.kappa1) * a1 + math.sqrt(setup.kappa2) * a2)
        assert reflection(setup, hw) == pytest.approx(r_io, rel=1e-10)


def test_reflection_parity_collapse():
    setup = make_setup(chi1=0.5, chi2=0.5, chi12=0.0)
    r = [reflection(setup, hw) for hw in range(4)]
    assert abs(r[0] - r[2]) < 1e-12
    assert abs(r[1] - r[3]) < 1e-12
    assert abs(r[0] - r[1]) > 1e-6


def test_reflection_no_qubit_dependence_without_chi():
    setup = make_setup(chi1=0.0, chi2=0.0, chi12=0.0, detunings=(0.7, -0.3))
    r = {reflection(setup, hw) for hw in range(4)}
    assert len({(round(z.real, 14), round(z.imag, 14)) for z in r}) == 1


def test_reflection_collapse_randomized():
    rng = np.random.default_rng(3)
    for _ in range(500):
        chi1 = rng.uniform(0.05, 1.5)
        chi2 = rng.uniform(0.05, 1.5)
        chi12 = rng.uniform(0.0, 0.2)
        if chi1 * chi2 - chi12 ** 2 <= 1e-6:
            continue
        setup = make_setup(chi1=chi1, chi2=chi2, chi12=chi12,
                           kappa1=rng.uniform(0.5, 2.0), kappa2=rng.uniform(0.5, 2.0))
        r = [reflection(setup, hw) for hw in range(4)]
        assert max(abs(r[0] - r[2]), abs(r[1] - r[3])) < 1e-12
        assert abs(r[0] - r[1]) > 1e-6


# ---------------------------------------------------------------------------
# output field
# ---------------------------------------------------------------------------

def test_output_zero_for_empty_cavities():
    z = np.zeros(5, dtype=complex)
    setup = make_setup()
    assert np.all(output_field(z, z, np.zeros(5), setup) == 0)


def test_output_modulus_equals_input_at_steady_state():
    # |r| = 1: steady output power equals the input power
    setup = constant_setup()
    traj = evolve(setup, 2, 40.0, probe=False)
    assert abs(traj.output[-1]) == pytest.approx(abs(traj.drive[-1]), rel=1e-9)


def test_output_ring_down_envelope():
    # after the pulse ends the output decays inside the eigenvalue envelope
    # (with the non-normal condition-number prefactor)
    setup = make_setup()
    for hw in range(4):
        traj = evolve(setup, hw, 28.0, probe=False)
        rate, condition = decay_envelope_bound(setup, hw)
        t_end = setup.pulse.t_end
        i0 = int(np.searchsorted(traj.times, t_end))
        norm0 = math.hypot(abs(traj.alpha1[i0]), abs(traj.alpha2[i0]))
        tail = slice(i0, None)
        norms = np.hypot(np.abs(traj.alpha1[tail]), np.abs(traj.alpha2[tail]))
        envelope = condition * norm0 * np.exp(-rate * (traj.times[tail] - traj.times[i0]))
        assert np.all(norms <= envelope * (1.0 + 1e-6))
        # and the output field itself has fully rung down at the horizon
        assert abs(traj.output[-1]) < abs(traj.drive).max() * 2e-2
        assert rate == pytest.approx(min(setup.kappa1, setup.kappa2) / 2.0, rel=1e-9)
