"""Scenario drivers behind the command line.

Each driver runs its computation, writes its tables under ``out`` and
returns an :class:`Outcome` listing every asserted check.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .bourgain import (
    SpaceTimeField,
    bump_eval,
    loglog_slope,
    cutoff_norm_scaling,
    verify_duhamel_scaling,
    verify_free_estimate,
)
from .config import Scenario
from .diagnostics import fit_plane_wave_frequency, hamiltonian_drift, mass_wave_residual
from .diagonal import build_symbol_table, to_diagonal
from .dirichlet_neumann import (
    DNExpansion,
    G0_apply,
    first_order_closed,
    second_order_closed,
    Grid1D,
    Gj_apply,
    dn_apply,
    exact_trace_oracle,
    to_coeff,
    to_values,
)
from .initial import mass_wave_initial, plane_wave, random_smooth, random_state
from .integrate import RunConfig, run
from .io import write_csv, write_snapshot
from .model import StateUV
from .spectral import Grid2D

__all__ = ["Check", "Outcome", "DRIVERS", "execute"]


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: str
    passed: bool


@dataclass
class Outcome:
    checks: list[Check] = field(default_factory=list)
    metrics: dict[str, Any] = field(default_factory=dict)
    files: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, value: float, ok: bool, limit: str):
        self.checks.append(Check(name, float(value), limit, bool(ok)))

    def wrote(self, path: Path, out: Path):
        self.files.append(str(Path(path).relative_to(out)))


def _pool_map(fn: Callable, items, threads: int) -> list:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _initial(scn: Scenario) -> StateUV:
    p = scn.section("initial")
    grid = scn.grid
    if p["kind"] == "plane-wave":
        return plane_wave(grid, p["j"], p["k"], p["branch"], p["amplitude"])
    if p["kind"] == "mass-wave":
        return mass_wave_initial(grid, p["amplitude"])
    return random_state(grid, p["amplitude"], p["kmax"], np.random.default_rng(scn.seed))


def simulate(scn: Scenario, out: Path) -> Outcome:
    res = Outcome()
    traj = run(scn.run, _initial(scn))
    snap_dir = out / "snapshots"
    for n, s in enumerate(traj.snapshots):
        res.wrote(write_snapshot(snap_dir, n, s, scn.run.scheme), out)
    rows = [(r.t, r.H, r.l2_u, r.l2_v) for r in traj.diagnostics]
    res.wrote(write_csv(out / "diagnostics.csv", ("t", "H", "l2_u", "l2_v"), rows), out)
    y = scn.grid.y
    mass_rows = [(r.t, *r.mass) for r in traj.diagnostics]
    res.wrote(write_csv(out / "mass.csv", ("t", *[f"m(y={v:.17g})" for v in y]), mass_rows), out)
    res.metrics.update(n_snapshots=len(traj.snapshots), t_final=traj.snapshots[-1].t,
                       H_drift=hamiltonian_drift(traj).value if len(traj.diagnostics) > 1 else 0.0)
    return res


def conservation(scn: Scenario, out: Path) -> Outcome:
    res = Outcome()
    traj = run(scn.run, _initial(scn))
    drift = hamiltonian_drift(traj)
    tol = scn.section("check")["drift_tol"]
    rows = [(r.t, r.H, r.H - traj.diagnostics[0].H) for r in traj.diagnostics]
    res.wrote(write_csv(out / "hamiltonian.csv", ("t", "H", "H_minus_H0"), rows), out)
    res.metrics.update(drift=drift.value, relative=drift.relative, H0=traj.diagnostics[0].H,
                       steps=scn.run.n_steps, dt=scn.run.step)
    res.check("hamiltonian_drift", drift.value, drift.value <= tol, f"<= {tol:g}")
    return res


def dispersion_table(scn: Scenario, out: Path) -> Outcome:
    res = Outcome()
    grid = scn.grid
    K = min(scn.section("dispersion")["mode_max"], grid.Nx // 2 - 1, grid.Ny // 2 - 1)
    rng = np.random.default_rng(scn.seed)
    s0 = StateUV.from_physical(random_smooth(grid, 1.0, K, rng, zero_mean=False),
                               random_smooth(grid, 1.0, K, rng, zero_mean=False), grid)
    cfg = RunConfig(grid, scn.run.t_end, scn.run.dt, "linear-exact", 1, scn.run.diagnostics_stride)
    traj = run(cfg, s0)
    tab = build_symbol_table(grid)
    rows, worst = [], 0.0
    for k in range(-K, K + 1):
        for j in range(-K, K + 1):
            idx = grid.index(j, k)
            w1, w2 = tab.omega1[idx], tab.omega2[idx]
            for branch, exact in ((1, w1), (2, w2)):
                measured = fit_plane_wave_frequency(traj, (j, k), branch, tab)
                err = abs(measured - exact)
                worst = max(worst, err)
                rows.append((j, k, grid.xi[j % grid.Nx], grid.mu[k % grid.Ny], branch, w1, w2, measured, err))
    header = ("j", "k", "xi", "mu", "branch", "omega1", "omega2", "measured", "error")
    res.wrote(write_csv(out / "dispersion.csv", header, rows), out)
    tol = scn.section("check")["fit_tol"]
    res.metrics.update(modes=len(rows), mode_max=K, max_error=worst)
    res.check("dispersion_fit", worst, worst <= tol, f"<= {tol:g}")
    return res


def mass_wave(scn: Scenario, out: Path) -> Outcome:
    res = Outcome()
    grid = scn.grid
    chk = scn.section("check")
    p = scn.section("mass")
    lin_cfg = RunConfig(grid, scn.run.t_end, scn.run.dt, "linear-exact", 1, 1)
    lin = mass_wave_residual(run(lin_cfg, mass_wave_initial(grid)))
    res.check("linear_residual", lin, lin <= chk["residual_tol"], f"<= {chk['residual_tol']:g}")

    def nonlinear(eps):
        cfg = RunConfig(grid, p["nonlinear_t_end"], scn.run.dt, "diagonal-IFRK4", 1, 1)
        return mass_wave_residual(run(cfg, mass_wave_initial(grid, eps)), relative=False)

    eps = list(p["eps"])
    resid = _pool_map(nonlinear, eps, scn.threads)
    rows = [(e, r) for e, r in zip(eps, resid)]
    res.wrote(write_csv(out / "mass_residual.csv", ("eps", "abs_residual"), rows), out)
    res.metrics.update(linear_relative_residual=lin)
    if len(eps) >= 2:
        slope = loglog_slope(eps, resid)
        res.metrics["nonlinear_slope"] = slope
        res.check("nonlinear_slope", slope, abs(slope - 2) <= chk["slope_tol"], f"2 +- {chk['slope_tol']:g}")
    return res


def _mode_forcing(j: int, k: int, sigma: float):
    def make(grid: Grid2D, Nt: int, Lt: float) -> SpaceTimeField:
        c = np.zeros(grid.shape, dtype=complex)
        c[grid.index(j, k)] = 1.0
        return SpaceTimeField.from_function(grid, Nt, Lt, c, lambda t: bump_eval(t) * np.exp(1j * sigma * t))
    return make


# (j, k, temporal frequency, branch)
SAMPLE_FORCINGS = ((1, 1, 5.0, 1), (0, 1, 10.0, 2), (1, 0, 20.0, 1))


def bourgain_scaling(scn: Scenario, out: Path) -> Outcome:
    res = Outcome()
    p = scn.section("bourgain")
    grid = scn.grid
    tab = build_symbol_table(grid)
    rng = np.random.default_rng(scn.seed)
    kmax = max(1, min(4, grid.Nx // 3, grid.Ny // 3))
    samples = [to_diagonal(random_state(grid, 1.0, kmax, rng), tab) for _ in range(p["samples"])]
    free = verify_free_estimate(samples, p["b"], p["s"], tab, Lt=p["Lt"], Nt=p["Nt"])
    res.check("free_ratio_spread", free.spread, free.spread <= p["spread_tol"], f"<= {p['spread_tol']:g}")
    res.check("free_ratio_bound", free.max_ratio, free.passed, f"<= {free.C0:.6g}")
    res.metrics.update(free_max_ratio=free.max_ratio, free_C0=free.C0, free_spread=free.spread)

    rows = []
    Ts = np.geomspace(p["cutoff_T_min"], p["cutoff_T_max"], p["n_T"])
    norms, slope = cutoff_norm_scaling(Ts, p["b"])
    target = 0.5 - p["b"]
    for T, n in zip(Ts, norms):
        rows.append(("cutoff_norm", T, n, n / T**target, slope))
    res.metrics["cutoff_norm_slope"] = slope
    res.check("cutoff_norm_slope", slope, abs(slope - target) <= p["cutoff_slope_tol"],
              f"{target:g} +- {p['cutoff_slope_tol']:g}")

    # forcings are single modes, so a minimal grid carries them exactly
    small = Grid2D(4, 4, grid.Lx, grid.Ly)
    small_tab = build_symbol_table(small)
    Td = np.geomspace(p["T_min"], p["T_max"], p["n_T"])

    def one(forcing):
        j, k, sigma, branch = forcing
        return verify_duhamel_scaling(_mode_forcing(j, k, sigma), branch, p["eps"], p["s"], small_tab, Td)

    reports = _pool_map(one, list(SAMPLE_FORCINGS), scn.threads)
    for n, (forcing, rep) in enumerate(zip(SAMPLE_FORCINGS, reports)):
        name = f"duhamel_{n}"
        for T, lhs, R in zip(rep.T, rep.lhs, rep.R):
            rows.append((name, T, lhs, R, rep.slope))
        res.metrics[name] = dict(mode=forcing[:2], sigma=forcing[2], branch=forcing[3], slope=rep.slope,
                                 R_spread=rep.R_spread)
        res.check(f"{name}_R_spread", rep.R_spread, rep.R_spread <= 10.0, "<= 10")
        res.check(f"{name}_slope", rep.slope, rep.slope >= p["eps"] - 0.1, f">= {p['eps'] - 0.1:g}")
    res.wrote(write_csv(out / "bourgain.csv", ("series", "T", "norm", "ratio", "fitted_slope"), rows), out)
    return res


def dn_verify(scn: Scenario, out: Path) -> Outcome:
    res = Outcome()
    p = scn.section("dn")
    chk = scn.section("check")
    grid = Grid1D(p["N"], p["L"])
    h0 = p["h0"]
    rng = np.random.default_rng(scn.seed)

    # flat-surface eigenvalue on every resolved wavenumber
    worst = 0.0
    for m in range(-grid.N // 2 + 1, grid.N // 2):
        kk = 2 * np.pi * m / grid.L
        wave = np.exp(1j * kk * grid.x)
        lam = abs(kk) * math.tanh(abs(kk) * h0)
        got = to_values(G0_apply(to_coeff(wave), grid, h0))
        worst = max(worst, float(np.max(np.abs(got - lam * wave))) / max(1.0, lam))
    res.check("G0_eigenvalue", worst, worst <= 1e-12, "<= 1e-12 relative")

    band = max(1, grid.N // 16)
    eta = random_band(grid, band, 0.2 * h0, rng)
    phi = to_coeff(random_band(grid, band, 1.0, rng))
    exp = DNExpansion(h0, grid, 2, eta)
    scale = float(np.max(np.abs(phi)))
    e1 = float(np.max(np.abs(Gj_apply(1, exp, phi) - first_order_closed(exp, phi)))) / scale
    e2 = float(np.max(np.abs(Gj_apply(2, exp, phi) - second_order_closed(exp, phi)))) / scale
    res.check("G1_closed_form", e1, e1 <= 1e-10, "<= 1e-10")
    res.check("G2_closed_form", e2, e2 <= 1e-10, "<= 1e-10")

    k = 2 * np.pi * p["k"] / grid.L
    amps = list(p["amplitudes"])

    def sweep(J):
        errs = []
        for a in amps:
            surf = a * h0 * np.cos(2 * np.pi * grid.x / grid.L)
            Phi, G = exact_trace_oracle(surf, k, h0, grid)
            approx = to_values(dn_apply(DNExpansion(h0, grid, J, surf), to_coeff(Phi)))
            errs.append(float(np.max(np.abs(approx - G))))
        return errs

    orders = list(p["orders"])
    results = _pool_map(sweep, orders, scn.threads)
    rows = []
    for J, errs in zip(orders, results):
        slope = loglog_slope(amps, errs) if len(amps) > 1 else float("nan")
        rows.extend((a * h0, J, e, slope) for a, e in zip(amps, errs))
        res.metrics[f"order_{J}_slope"] = slope
        res.check(f"trace_order_{J}", slope, abs(slope - (J + 1)) <= chk["slope_tol"],
                  f"{J + 1} +- {chk['slope_tol']:g}")
    res.wrote(write_csv(out / "dn_convergence.csv", ("amplitude", "order", "error", "fitted_slope"), rows), out)
    return res


def random_band(grid: Grid1D, band: int, amplitude: float, rng: np.random.Generator) -> np.ndarray:
    """Real periodic samples with random modes ``1..band`` scaled to ``max|f| = amplitude``."""
    c = np.zeros(grid.N, dtype=complex)
    ks = np.arange(1, band + 1)
    vals = rng.standard_normal(band) + 1j * rng.standard_normal(band)
    c[ks] = vals
    c[-ks] = np.conj(vals)
    f = to_values(c).real
    return f * (amplitude / np.max(np.abs(f)))


DRIVERS: dict[str, Callable[[Scenario, Path], Outcome]] = {
    "simulate": simulate,
    "dispersion-table": dispersion_table,
    "mass-wave": mass_wave,
    "bourgain-scaling": bourgain_scaling,
    "dn-verify": dn_verify,
    "conservation": conservation,
}


def execute(scn: Scenario, out: Path) -> Outcome:
    return DRIVERS[scn.kind](scn, Path(out))
