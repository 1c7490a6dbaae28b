r"""Discrete Bourgain-type norms and scaling checks for the linear estimates.

Temporal transforms use :math:`\hat f(\tau) = \int f(t) e^{-i\tau t}\,dt`,
sampled on the lattice :math:`\tau_n = 2\pi n / L_t` of a window of length
``Lt``, and norms use the Plancherel measure :math:`d\tau / 2\pi`:

.. math::

    \|f\|_{H^b}^2 = \frac{1}{L_t} \sum_n \langle\tau_n\rangle^{2b} |\hat f(\tau_n)|^2 ,

so ``b = 0`` is the plain L2 norm of the samples.  Spatial sums run over
mode amplitudes (the coefficient convention of :mod:`nonkp.spectral`).

With free waves behaving like :math:`e^{-i\omega_i t}`, the branch-adapted
weight is :math:`\langle\tau + \omega_i\rangle^b`.  It is applied by
modulating the samples with :math:`e^{i\omega_i t}` (that is, undoing the
free flow) before the temporal transform, which is exact for frequencies off
the lattice as well.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .diagonal import StateW, SymbolTable
from .spectral import Grid2D, SpectralField

__all__ = [
    "bump_eval",
    "bump_scaled",
    "japanese",
    "norm_Hb",
    "norm_Zs",
    "SpaceTimeField",
    "norm_Hbs",
    "norm_Xibs",
    "FreeEstimateReport",
    "verify_free_estimate",
    "DuhamelReport",
    "verify_duhamel_scaling",
    "cutoff_norm_scaling",
    "loglog_slope",
]


def japanese(x):
    """``<x> = sqrt(1 + x**2)``."""
    return np.sqrt(1.0 + np.asarray(x, dtype=float) ** 2)


def _q(s):
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(s > 0, np.exp(-1.0 / np.where(s > 0, s, 1.0)), 0.0)


def bump_eval(t):
    """Smooth cutoff equal to 1 on ``[-1, 1]`` and 0 outside ``(-2, 2)``."""
    a = np.abs(np.asarray(t, dtype=float))
    inner, outer = _q(2.0 - a), _q(a - 1.0)
    out = inner / (inner + outer)
    return out[()] if out.ndim == 0 else out


def bump_scaled(t, T: float):
    """The cutoff rescaled to ``[-2T, 2T]``."""
    if not T > 0:
        raise ValueError("T must be positive")
    return bump_eval(np.asarray(t, dtype=float) / T)


def _time_grid(Nt: int, Lt: float) -> np.ndarray:
    return (np.arange(Nt) - Nt // 2) * (Lt / Nt)


def _tau(Nt: int, Lt: float) -> np.ndarray:
    return 2 * np.pi * np.fft.fftfreq(Nt, Lt / Nt)


def _time_transform(samples: np.ndarray, Lt: float) -> np.ndarray:
    """Continuous-transform samples along the last axis (window centred on 0)."""
    Nt = samples.shape[-1]
    dt = Lt / Nt
    # t_0 = -(Nt//2) dt shifts every lattice frequency by a unimodular phase
    phase = np.exp(1j * _tau(Nt, Lt) * (Nt // 2) * dt)
    return dt * np.fft.fft(samples, axis=-1) * phase


def norm_Hb(f, b: float, Lt: float) -> float:
    """Weighted temporal norm of samples ``f(t_m)``, ``t_m = (m - Nt/2) Lt/Nt``."""
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1 or f.size < 4:
        raise ValueError("time series must be one-dimensional with at least 4 samples")
    if not Lt > 0:
        raise ValueError("Lt must be positive")
    fh = _time_transform(f, Lt)
    w = japanese(_tau(f.size, Lt)) ** (2 * b)
    return float(np.sqrt(np.sum(w * np.abs(fh) ** 2) / Lt))


def _space_weight(grid: Grid2D, s: float) -> np.ndarray:
    xi, mu = grid.XI, grid.MU
    return (1.0 + xi**2) ** 2 * japanese(np.abs(xi) + np.abs(mu)) ** (2 * s)


def norm_Zs(f: SpectralField, s: float) -> float:
    """``|| <xi>^2 <|xi|+|mu|>^s f ||`` over mode amplitudes."""
    return float(np.sqrt(np.sum(_space_weight(f.grid, s) * np.abs(f.coeff) ** 2)))


@dataclass(frozen=True, eq=False)
class SpaceTimeField:
    """Mode amplitudes sampled in time, ``values[k, j, m]`` at ``t_m``.

    The window is ``[-Lt/2, Lt/2)`` with ``t_m = (m - Nt/2) Lt / Nt``;
    ``coeff`` holds the space-time transform on the ``(xi, mu, tau)`` lattice.
    """

    grid: Grid2D
    Lt: float
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[:2] != self.grid.shape or v.shape[2] < 4:
            raise ValueError(f"values must have shape {self.grid.shape + ('Nt>=4',)}, got {v.shape}")
        if not self.Lt > 0:
            raise ValueError("Lt must be positive")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def Nt(self) -> int:
        return self.values.shape[2]

    @cached_property
    def t(self) -> np.ndarray:
        return _time_grid(self.Nt, self.Lt)

    @cached_property
    def tau(self) -> np.ndarray:
        return _tau(self.Nt, self.Lt)

    @cached_property
    def coeff(self) -> np.ndarray:
        c = _time_transform(self.values, self.Lt)
        c.flags.writeable = False
        return c

    @classmethod
    def from_function(cls, grid: Grid2D, Nt: int, Lt: float, profile, temporal) -> "SpaceTimeField":
        """Separable field ``profile(xi, mu) * temporal(t)``."""
        t = _time_grid(Nt, Lt)
        spatial = profile.coeff if isinstance(profile, SpectralField) else np.asarray(profile)
        return cls(grid, Lt, spatial[:, :, None] * np.asarray(temporal(t))[None, None, :])

    def slice(self, m: int) -> SpectralField:
        return SpectralField(self.grid, self.values[:, :, m])


def _weighted(coeff: np.ndarray, grid: Grid2D, tau: np.ndarray, Lt: float, b: float, s: float) -> float:
    w = _space_weight(grid, s)[:, :, None] * japanese(tau)[None, None, :] ** (2 * b)
    return float(np.sqrt(np.sum(w * np.abs(coeff) ** 2) / Lt))


def norm_Hbs(f: SpaceTimeField, b: float, s: float) -> float:
    return _weighted(f.coeff, f.grid, f.tau, f.Lt, b, s)


def _unpropagated(f: SpaceTimeField, branch: int, tab: SymbolTable) -> np.ndarray:
    if tab.grid != f.grid:
        raise ValueError("field and symbol table are on different grids")
    om = tab.propagation_omega(branch)
    return f.values * np.exp(1j * om[:, :, None] * f.t[None, None, :])


def norm_Xibs(branch: int, f: SpaceTimeField, b: float, s: float, tab: SymbolTable) -> float:
    """Norm with the temporal weight centred on the branch's dispersion surface."""
    if branch not in (1, 2):
        raise ValueError(f"branch must be 1 or 2, got {branch!r}")
    g = _unpropagated(f, branch, tab)
    return _weighted(_time_transform(g, f.Lt), f.grid, f.tau, f.Lt, b, s)


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


def cutoff_norm_scaling(Ts: Sequence[float], b: float, *, points_per_unit: int = 200) -> tuple[np.ndarray, float]:
    """``||psi_T||_{H^b}`` over ``Ts`` and the fitted log-log slope.

    Each value uses the window ``Lt = 8 max(T, 1)`` and step ``min(T, 1) / points_per_unit``.
    """
    norms = []
    for T in Ts:
        Lt = 8.0 * max(T, 1.0)
        Nt = int(np.ceil(Lt * points_per_unit / min(T, 1.0)))
        Nt += Nt % 2
        norms.append(norm_Hb(bump_scaled(_time_grid(Nt, Lt), T), b, Lt))
    norms = np.array(norms)
    return norms, loglog_slope(Ts, norms)


@dataclass(frozen=True)
class FreeEstimateReport:
    ratios: np.ndarray  # (n_samples, 2): LHS / RHS per sample and branch
    C0: float
    max_ratio: float
    spread: float  # (max - min) / min over all ratios
    passed: bool


def verify_free_estimate(samples: Sequence[StateW], b: float, s: float, tab: SymbolTable, *,
                         Lt: float = 8.0, Nt: int = 256) -> FreeEstimateReport:
    """Ratio ``||psi(t) S_i(t) w_i0||_X / ||w_i0||_Z`` for every sample and branch.

    The bound ``C0`` is ``1.2 ||psi||_{H^b}`` on the same time lattice.
    """
    if not samples:
        raise ValueError("need at least one sample")
    t = _time_grid(Nt, Lt)
    cutoff = bump_eval(t)
    C0 = 1.2 * norm_Hb(cutoff, b, Lt)
    ratios = np.empty((len(samples), 2))
    for n, w in enumerate(samples):
        for i, comp in enumerate((w.w1, w.w2)):
            rhs = norm_Zs(comp, s)
            if rhs == 0:
                raise ValueError(f"sample {n} has zero norm on branch {i + 1}")
            phase = np.exp(-1j * tab.propagation_omega(i + 1)[:, :, None] * t[None, None, :])
            u = SpaceTimeField(tab.grid, Lt, comp.coeff[:, :, None] * phase * cutoff[None, None, :])
            ratios[n, i] = norm_Xibs(i + 1, u, b, s, tab) / rhs
    lo, hi = float(ratios.min()), float(ratios.max())
    return FreeEstimateReport(ratios, C0, hi, (hi - lo) / lo, hi <= C0)


@dataclass(frozen=True)
class DuhamelReport:
    T: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    R: np.ndarray  # lhs / (T**eps * rhs)
    slope: float  # log-log slope of lhs against T
    R_spread: float  # max(R) / min(R)
    eps: float
    passed: bool


def _duhamel_norms(forcing, branch: int, T: float, eps: float, s: float, tab: SymbolTable,
                   points_per_unit: int) -> tuple[float, float]:
    b, bp = 0.5 + eps, 0.5 - 2 * eps
    Lt = 8.0 * max(T, 1.0)
    Nt = int(np.ceil(Lt * points_per_unit / min(T, 1.0)))
    Nt += Nt % 2
    F = forcing(tab.grid, Nt, Lt)
    rhs = norm_Xibs(branch, F, -bp, s, tab)
    # S_i(-t) u = psi_T(t) int_0^t S_i(-t') F(t') dt'
    g = _unpropagated(F, branch, tab)
    m0 = Nt // 2  # index of t = 0
    G = np.zeros_like(g)
    G[:, :, m0:] = cumulative_trapezoid(g[:, :, m0:], F.t[m0:], axis=-1, initial=0.0)
    back = cumulative_trapezoid(g[:, :, m0::-1], F.t[m0::-1], axis=-1, initial=0.0)
    G[:, :, :m0 + 1] = back[:, :, ::-1]
    om = tab.propagation_omega(branch)[:, :, None]
    u = G * np.exp(-1j * om * F.t[None, None, :]) * bump_scaled(F.t, T)[None, None, :]
    lhs = norm_Xibs(branch, SpaceTimeField(tab.grid, Lt, u), b, s, tab)
    return lhs, rhs


def verify_duhamel_scaling(forcing, branch: int, eps: float, s: float, tab: SymbolTable,
                           Ts: Sequence[float], *, points_per_unit: int = 200,
                           threads: int = 1) -> DuhamelReport:
    """Sweep ``T`` for the truncated Duhamel term driven by ``forcing``.

    ``forcing(grid, Nt, Lt)`` returns the :class:`SpaceTimeField` of the
    branch forcing on a window of length ``Lt``; it must not depend on ``T``
    beyond the window.  With ``b = 1/2 + eps`` and ``b' = 1/2 - 2 eps``, the
    report holds ``LHS = ||psi_T int_0^t S_i(t - t') F(t') dt'||_{X^{b,s}}``
    and ``RHS = ||F||_{X^{-b',s}}``.  It passes when the slope of LHS is at
    least ``eps - 0.1`` and ``R`` stays within a factor 10 over the sweep.
    """
    if not 0 < eps < 0.25:
        raise ValueError("eps must lie in (0, 1/4)")
    Ts = np.asarray(Ts, dtype=float)
    if Ts.size < 2 or Ts.max() / Ts.min() < 100:
        raise ValueError("the T sweep must span at least two decades")

    def one(T):
        return _duhamel_norms(forcing, branch, float(T), eps, s, tab, points_per_unit)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, Ts))
    else:
        results = [one(T) for T in Ts]
    lhs = np.array([r[0] for r in results])
    rhs = np.array([r[1] for r in results])
    if np.any(rhs == 0):
        raise ValueError("forcing has zero norm")
    R = lhs / (Ts**eps * rhs)
    slope = loglog_slope(Ts, lhs)
    spread = float(R.max() / R.min())
    return DuhamelReport(Ts, lhs, rhs, R, slope, spread, eps,
                         bool(slope >= eps - 0.1 and spread <= 10.0))
