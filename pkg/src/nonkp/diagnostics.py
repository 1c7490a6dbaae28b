"""Trajectory analysis: Hamiltonian drift, the mass wave-equation residual and
plane-wave frequency fits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple, Sequence

import numpy as np

from .model import StateUV, hamiltonian, mass_profile

if TYPE_CHECKING:
    from .integrate import Trajectory

__all__ = [
    "DiagnosticsRecord",
    "Drift",
    "make_record",
    "l2_norm",
    "hamiltonian_drift",
    "mass_wave_residual",
    "fit_phase_frequency",
    "fit_plane_wave_frequency",
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    H: float
    l2_u: float
    l2_v: float
    mass: np.ndarray


def l2_norm(coeff: np.ndarray, area: float) -> float:
    """L2 norm over the cell from mode amplitudes (Parseval)."""
    return float(np.sqrt(area * np.sum(np.abs(coeff) ** 2)))


def make_record(s: StateUV) -> DiagnosticsRecord:
    area = s.grid.area
    mass = mass_profile(s)
    mass.flags.writeable = False
    return DiagnosticsRecord(t=float(s.t), H=hamiltonian(s), l2_u=l2_norm(s.u.coeff, area),
                             l2_v=l2_norm(s.v.coeff, area), mass=mass)


class Drift(NamedTuple):
    """Maximum deviation of H from its initial value.

    ``relative`` is False when ``H(0)`` vanishes and ``value`` is absolute.
    """

    value: float
    relative: bool


def hamiltonian_drift(traj: "Trajectory | Sequence[DiagnosticsRecord]") -> Drift:
    records = getattr(traj, "diagnostics", traj)
    if len(records) < 2:
        raise ValueError("need at least two diagnostics records")
    H = np.array([r.H for r in records])
    dev = float(np.max(np.abs(H - H[0])))
    if H[0] == 0.0:
        return Drift(dev, False)
    return Drift(dev / abs(H[0]), True)


def _uniform_step(times: np.ndarray) -> float:
    h = np.diff(times)
    if np.any(h <= 0) or np.ptp(h) > 1e-9 * max(1.0, abs(h[0])):
        raise ValueError("records are not uniformly spaced in time")
    return float(np.mean(h))


def mass_wave_residual(traj: "Trajectory | Sequence[DiagnosticsRecord]", *, relative: bool = True,
                       Ly: float | None = None) -> float:
    """Residual of ``m_tt = m_yy`` over interior records.

    ``m_tt`` uses the five-point centered difference, ``m_yy`` is spectral.
    The worst per-time L2 residual is divided by the largest ``||m_yy||``
    seen over the same times, so instants where ``m_yy`` passes through zero
    do not blow up the ratio.  When that scale is below 1e-14 (or with
    ``relative=False``) the absolute residual is returned.  ``Ly`` is read
    from the trajectory grid unless given.
    """
    records = getattr(traj, "diagnostics", traj)
    if len(records) < 5:
        raise ValueError("mass residual needs at least five records")
    t = np.array([r.t for r in records])
    h = _uniform_step(t)
    m = np.array([r.mass for r in records])
    Ny = m.shape[1]
    if Ly is None:
        snaps = getattr(traj, "snapshots", None)
        if not snaps:
            raise ValueError("Ly is required when passing bare records")
        Ly = snaps[0].grid.Ly
    mu = 2 * np.pi * np.fft.fftfreq(Ny, 1.0 / Ny) / Ly
    mu[Ny // 2] = 0.0  # unpaired Nyquist row
    m_yy = np.fft.ifft(-(mu**2) * np.fft.fft(m[2:-2], axis=1), axis=1).real
    m_tt = (-m[4:] + 16 * m[3:-1] - 30 * m[2:-2] + 16 * m[1:-3] - m[:-4]) / (12 * h * h)
    cell = Ly / Ny
    res = np.sqrt(cell * np.sum((m_tt - m_yy) ** 2, axis=1))
    scale = np.sqrt(cell * np.sum(m_yy**2, axis=1))
    worst = float(np.max(res))
    top = float(np.max(scale))
    if not relative or top < 1e-14:
        return worst
    return worst / top


def fit_phase_frequency(times: np.ndarray, values: np.ndarray) -> float:
    """Least-squares ``omega`` for samples of ``A exp(-i omega t)``.

    Phases are unwrapped to the nearest branch, which is reliable while
    ``|omega| * dt < pi``.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=complex)
    if times.size < 2:
        raise ValueError("need at least two samples")
    if np.min(np.abs(values)) < 1e-12:
        raise ValueError("mode amplitude below 1e-12; phase is undefined")
    phase = np.unwrap(np.angle(values))
    tc = times - times.mean()
    slope = np.dot(tc, phase - phase.mean()) / np.dot(tc, tc)
    return float(-slope)


def fit_plane_wave_frequency(traj: "Trajectory", mode: tuple[int, int], branch: int,
                             tab=None) -> float:
    """Measured frequency of diagonal branch ``branch`` at integer mode ``(j, k)``."""
    from .diagonal import build_symbol_table

    if branch not in (1, 2):
        raise ValueError(f"branch must be 1 or 2, got {branch!r}")
    grid = traj.grid
    tab = tab or build_symbol_table(grid)
    idx = grid.index(*mode)
    P = tab.Pinv[branch - 1, :, idx[0], idx[1]]
    vals = np.array([P[0] * s.u.coeff[idx] + P[1] * s.v.coeff[idx] for s in traj.snapshots])
    return fit_phase_frequency(traj.times, vals)
