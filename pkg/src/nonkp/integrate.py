"""Time stepping: exact free propagation, Lawson RK4 on the diagonal form and
classical RK4 on the physical form.

The diagonal scheme realizes the Duhamel formula: the linear phase
``exp(-i omega_i dt)`` is applied exactly and only the forcing ``-M_i Lambda``
is advanced by RK4 in the interaction picture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import DiagnosticsRecord, make_record
from .diagonal import (
    StateW,
    SymbolTable,
    build_symbol_table,
    from_diagonal,
    nonlinear_arrays,
    to_diagonal,
)
from .model import StateUV, rhs_arrays
from .spectral import Grid2D, SpectralField

__all__ = [
    "SCHEMES",
    "BlowUpError",
    "RunConfig",
    "Trajectory",
    "default_dt",
    "free_propagate",
    "step_ifrk4",
    "step_rk4_physical",
    "run",
]

SCHEMES = ("diagonal-IFRK4", "physical-RK4", "linear-exact")
BLOWUP_LIMIT = 1e6


class BlowUpError(RuntimeError):
    """The state became non-finite or exceeded the amplitude limit."""

    def __init__(self, t: float, detail: str):
        super().__init__(f"blow-up at t={t:.17g}: {detail}")
        self.t = t
        self.detail = detail


def default_dt(grid: Grid2D) -> float:
    return 0.25 * min(grid.Lx / grid.Nx, grid.Ly / grid.Ny)


@dataclass(frozen=True)
class RunConfig:
    grid: Grid2D
    t_end: float
    dt: float | None = None
    scheme: str = "diagonal-IFRK4"
    snapshot_stride: int = 1
    diagnostics_stride: int = 1

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, "dt", default_dt(self.grid))
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not (math.isfinite(self.t_end) and self.t_end >= 0):
            raise ValueError(f"t_end must be non-negative, got {self.t_end!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        for name in ("snapshot_stride", "diagnostics_stride"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def n_steps(self) -> int:
        """Number of steps; ``dt`` is shrunk slightly so they land on ``t_end``."""
        if self.t_end == 0:
            return 0
        return max(1, math.ceil(self.t_end / self.dt - 1e-9))

    @property
    def step(self) -> float:
        n = self.n_steps
        return self.t_end / n if n else self.dt


@dataclass
class Trajectory:
    snapshots: list[StateUV] = field(default_factory=list)
    diagnostics: list[DiagnosticsRecord] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    @property
    def grid(self) -> Grid2D:
        return self.snapshots[0].grid


def free_propagate(w: StateW, dt: float, tab: SymbolTable) -> StateW:
    """Apply ``S_i(dt)``: multiply branch ``i`` by ``exp(-i omega_i dt)``."""
    e1 = np.exp(-1j * tab.propagation_omega(1) * dt)
    e2 = np.exp(-1j * tab.propagation_omega(2) * dt)
    return StateW(SpectralField(w.grid, e1 * w.w1.coeff),
                  SpectralField(w.grid, e2 * w.w2.coeff), w.t + dt)


class _Lawson:
    """Precomputed phases for Lawson RK4 at a fixed step."""

    def __init__(self, tab: SymbolTable, dt: float):
        self.tab = tab
        self.dt = dt
        w = np.stack([tab.propagation_omega(1), tab.propagation_omega(2)])
        self.E = np.exp(-1j * w * dt)
        self.E2 = np.exp(-1j * w * dt / 2)

    def nl(self, w):
        return np.stack(nonlinear_arrays(self.tab, w[0], w[1]))

    def __call__(self, w: np.ndarray) -> np.ndarray:
        dt, E, E2 = self.dt, self.E, self.E2
        k1 = self.nl(w)
        k2 = self.nl(E2 * (w + 0.5 * dt * k1))
        k3 = self.nl(E2 * w + 0.5 * dt * k2)
        k4 = self.nl(E * w + dt * E2 * k3)
        return E * w + (dt / 6) * (E * k1 + 2 * E2 * (k2 + k3) + k4)


def step_ifrk4(w: StateW, dt: float, tab: SymbolTable) -> StateW:
    if not dt > 0:
        raise ValueError("dt must be positive")
    out = _Lawson(tab, dt)(np.stack([w.w1.coeff, w.w2.coeff]))
    _check_finite(out, w.t + dt)
    return StateW(SpectralField(w.grid, out[0]), SpectralField(w.grid, out[1]), w.t + dt)


def _rk4_physical(grid: Grid2D, y: np.ndarray, dt: float) -> np.ndarray:
    def f(z):
        return np.stack(rhs_arrays(grid, z[0], z[1]))

    k1 = f(y)
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def step_rk4_physical(s: StateUV, dt: float) -> StateUV:
    if not dt > 0:
        raise ValueError("dt must be positive")
    out = _rk4_physical(s.grid, np.stack([s.u.coeff, s.v.coeff]), dt)
    _check_finite(out, s.t + dt)
    return StateUV(SpectralField(s.grid, out[0]), SpectralField(s.grid, out[1]), s.t + dt)


def _check_finite(coeffs: np.ndarray, t: float):
    if not np.all(np.isfinite(coeffs)):
        raise BlowUpError(t, "non-finite coefficient")


def _check_blowup(s: StateUV):
    u = s.u.coeff
    _check_finite(u, s.t)
    _check_finite(s.v.coeff, s.t)
    umax = float(np.max(np.abs(s.u.to_physical())))
    if umax > BLOWUP_LIMIT:
        raise BlowUpError(s.t, f"max|u| = {umax:.6g} exceeds {BLOWUP_LIMIT:g}")


def run(cfg: RunConfig, initial: StateUV) -> Trajectory:
    """Integrate from ``initial`` and record snapshots and diagnostics.

    Records are taken at every ``*_stride``-th step and always at the final
    step.  Raises :class:`BlowUpError` on a non-finite or oversized state.
    """
    grid = cfg.grid
    if initial.grid != grid:
        raise ValueError("initial state is not on the configured grid")
    for f in (initial.u, initial.v):
        if not np.all(np.isfinite(f.coeff)):
            raise ValueError("initial data contains NaN or infinite values")
    _check_blowup(initial)

    n, dt = cfg.n_steps, cfg.step
    t0 = initial.t
    traj = Trajectory()

    def record(i: int, s: StateUV):
        last = i == n
        if i % cfg.snapshot_stride == 0 or last:
            traj.snapshots.append(s)
        if i % cfg.diagnostics_stride == 0 or last:
            traj.diagnostics.append(make_record(s))

    record(0, initial)
    if n == 0:
        return traj

    if cfg.scheme == "physical-RK4":
        y = np.stack([initial.u.coeff, initial.v.coeff])
        for i in range(1, n + 1):
            y = _rk4_physical(grid, y, dt)
            s = StateUV(SpectralField(grid, y[0]), SpectralField(grid, y[1]), t0 + i * dt)
            _check_blowup(s)
            record(i, s)
        return traj

    tab = build_symbol_table(grid)
    w0 = to_diagonal(initial, tab)
    if cfg.scheme == "linear-exact":
        for i in range(1, n + 1):
            if i % cfg.snapshot_stride and i % cfg.diagnostics_stride and i != n:
                continue
            s = from_diagonal(free_propagate(w0, i * dt, tab), tab)
            record(i, s)
        return traj

    stepper = _Lawson(tab, dt)
    w = np.stack([w0.w1.coeff, w0.w2.coeff])
    for i in range(1, n + 1):
        w = stepper(w)
        _check_finite(w, t0 + i * dt)
        s = from_diagonal(StateW(SpectralField(grid, w[0]), SpectralField(grid, w[1]), t0 + i * dt), tab)
        _check_blowup(s)
        record(i, s)
    return traj
