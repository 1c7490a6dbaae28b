import numpy as np
import pytest

from nonkp.diagnostics import (
    DiagnosticsRecord,
    fit_phase_frequency,
    fit_plane_wave_frequency,
    hamiltonian_drift,
    make_record,
    mass_wave_residual,
)
from nonkp.diagonal import build_symbol_table, omega
from nonkp.initial import mass_wave_initial, plane_wave, random_state
from nonkp.integrate import RunConfig, Trajectory, run
from nonkp.model import StateUV
from nonkp.spectral import make_grid

from conftest import TWO_PI


def rec(t, H, mass=None):
    return DiagnosticsRecord(t, H, 0.0, 0.0, np.zeros(4) if mass is None else mass)


def test_drift_of_constant_records():
    assert hamiltonian_drift([rec(0, 2.0), rec(1, 2.0)]) == (0.0, True)


def test_drift_relative_and_degenerate():
    assert hamiltonian_drift([rec(0, 2.0), rec(1, 2.5), rec(2, 1.9)]).value == pytest.approx(0.25)
    d = hamiltonian_drift([rec(0, 0.0), rec(1, 1e-3)])
    assert d.value == pytest.approx(1e-3) and not d.relative


def test_drift_needs_two_records():
    with pytest.raises(ValueError):
        hamiltonian_drift([rec(0, 1.0)])


def test_linear_plane_wave_keeps_quadratic_energy(grid16):
    s0 = plane_wave(grid16, 1, 2, 2, 0.5)
    # v-only part of H is quadratic; use a state whose cubic term vanishes on average
    traj = run(RunConfig(grid16, 3.0, 0.1, "linear-exact"), s0)
    quad = [0.5 * r.l2_u**2 + 0.5 * np.sum((1 + grid16.XI**2) * np.abs(s.v.coeff) ** 2) * grid16.area
            for r, s in zip(traj.diagnostics, traj.snapshots)]
    assert np.ptp(quad) / quad[0] <= 1e-10


def test_conservation_short_run(grid32):
    s0 = random_state(grid32, 0.05, 4, np.random.default_rng(1))
    traj = run(RunConfig(grid32, 2.0), s0)
    assert hamiltonian_drift(traj).value <= 1e-6


def test_mass_residual_zero_mean_guard(grid16):
    s = StateUV.from_physical(np.cos(grid16.X), np.zeros(grid16.shape), grid16)
    traj = run(RunConfig(grid16, 0.5, 0.1, "linear-exact"), s)
    assert mass_wave_residual(traj) <= 1e-20


def test_mass_residual_linear(grid16):
    traj = run(RunConfig(grid16, 2 * np.pi, 0.01, "linear-exact"), mass_wave_initial(grid16))
    assert mass_wave_residual(traj) <= 1e-4


def test_mass_residual_detects_nonlinearity(grid16):
    traj = run(RunConfig(grid16, 1.0, 0.01, "diagonal-IFRK4"), mass_wave_initial(grid16, 5.0))
    assert mass_wave_residual(traj) > 1e-3


def test_mass_residual_needs_uniform_records(grid16):
    with pytest.raises(ValueError):
        mass_wave_residual([rec(t, 0.0) for t in range(4)], Ly=TWO_PI)
    with pytest.raises(ValueError):
        mass_wave_residual([rec(t, 0.0) for t in (0, 1, 2, 4, 5)], Ly=TWO_PI)


@pytest.mark.parametrize("w0", [0.0, 0.3, -2.5, 9.0])
def test_synthetic_frequency(w0):
    t = np.arange(50) * 0.1
    assert fit_phase_frequency(t, 0.7 * np.exp(-1j * w0 * t + 0.4j)) == pytest.approx(w0, abs=1e-12)


def test_frequency_rejects_vanishing_mode():
    with pytest.raises(ValueError):
        fit_phase_frequency(np.arange(3.0), np.zeros(3))


@pytest.mark.parametrize("mode, branch, expected", [((0, 3), 1, 3.0), ((1, 0), 1, 0.5)])
def test_fit_on_exact_run(grid16, mode, branch, expected):
    s0 = plane_wave(grid16, *mode, branch, 1.0)
    traj = run(RunConfig(grid16, 2.0, 0.1, "linear-exact"), s0)
    assert fit_plane_wave_frequency(traj, mode, branch) == pytest.approx(expected, abs=1e-10)


def test_fit_requires_excited_mode(grid16):
    s0 = plane_wave(grid16, 0, 3, 1, 1.0)
    traj = run(RunConfig(grid16, 1.0, 0.1, "linear-exact"), s0)
    with pytest.raises(ValueError):
        fit_plane_wave_frequency(traj, (2, 2), 1)


def test_nonlinear_frequency_shift_is_quadratic():
    grid = make_grid(16, 16, TWO_PI, TWO_PI)
    tab = build_symbol_table(grid)
    mode = (1, 1)
    exact = omega(1, 1.0, 1.0)
    shifts = []
    amps = [0.01, 0.02, 0.04]
    for eps in amps:
        traj = run(RunConfig(grid, 4.0, 0.05, "diagonal-IFRK4", 1, 10**6), plane_wave(grid, *mode, 1, eps, tab))
        shifts.append(abs(fit_plane_wave_frequency(traj, mode, 1, tab) - exact))
    slope = np.polyfit(np.log(amps), np.log(shifts), 1)[0]
    assert abs(slope - 2) <= 0.3


def test_records_are_finite(grid16):
    r = make_record(random_state(grid16, 0.1, 3, np.random.default_rng(0)))
    assert np.isfinite(r.H) and np.all(np.isfinite(r.mass)) and r.l2_u > 0


def test_trajectory_grid(grid16):
    traj = Trajectory([StateUV.zeros(grid16)], [])
    assert traj.grid == grid16
