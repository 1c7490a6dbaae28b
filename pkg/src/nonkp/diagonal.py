r"""Eigen-structure of the linear part and the diagonal form of the system.

For each mode the linear symbol

.. math::

    \hat A = i \begin{pmatrix} -\xi/(1+\xi^2) & -\mu \\ -\mu/(1+\xi^2) & 0 \end{pmatrix}

has eigenvalues :math:`-i\omega_1, -i\omega_2`.  With :math:`\hat\eta = \hat P \hat w`
the system becomes

.. math::

    \partial_t \hat w_i = -i\omega_i \hat w_i - \hat M_i \hat\Lambda,
    \qquad \hat M_1 = \frac{i}{2}\frac{\xi\omega_1 + \mu^2}{\sqrt{\xi^2 + 4\mu^2(1+\xi^2)}},
    \quad \hat M_2 = -\frac{i}{2}\frac{\xi\omega_2 + \mu^2}{\sqrt{\xi^2 + 4\mu^2(1+\xi^2)}},

where :math:`\hat\Lambda` is the dealiased transform of :math:`u^2`.  Free
modes evolve as :math:`e^{-i\omega_i t}`, i.e. like the plane wave
:math:`e^{i(\xi x + \mu y - \omega t)}`.

On ``mu == 0`` modes :math:`\hat P` is singular but :math:`\hat A` is already
diagonal; there ``(w1, w2)`` is ``(u, v)`` when ``xi >= 0`` and ``(v, u)``
when ``xi < 0``, so the branch carrying ``u`` is the one whose frequency is
``xi / (1 + xi**2)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .model import StateUV
from .spectral import Grid2D, SpectralField

__all__ = [
    "omega",
    "sqrt_disc",
    "multiplier_M",
    "SymbolTable",
    "StateW",
    "build_symbol_table",
    "to_diagonal",
    "from_diagonal",
    "rhs_diagonal",
    "OperatorFamily",
    "KP",
    "BBM",
    "generalized_dispersion",
]


def sqrt_disc(xi, mu):
    xi = np.asarray(xi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    return np.sqrt(xi**2 + 4 * mu**2 * (1 + xi**2))


def _omegas(xi, mu):
    xi = np.asarray(xi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    k2 = 1.0 + xi**2
    d = sqrt_disc(xi, mu)
    # the root whose two terms add is computed directly, the other through
    # omega1 * omega2 = -mu**2 / (1 + xi**2)
    big = (xi + np.where(xi >= 0, d, -d)) / (2 * k2)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big != 0, -(mu**2) / (k2 * np.where(big != 0, big, 1.0)), 0.0)
    pos = xi >= 0
    w1 = np.where(pos, big, small)
    w2 = np.where(pos, small, big)
    return w1, w2


def omega(branch: int, xi, mu):
    """Frequency of dispersion branch 1 (``+`` root) or 2 (``-`` root)."""
    w1, w2 = _omegas(xi, mu)
    if branch == 1:
        out = w1
    elif branch == 2:
        out = w2
    else:
        raise ValueError(f"branch must be 1 or 2, got {branch!r}")
    return out[()] if np.ndim(out) == 0 else out


def _multipliers(xi, mu, w1, w2):
    d = sqrt_disc(xi, mu)
    safe = np.where(d > 0, d, 1.0)
    m1 = np.where(d > 0, 0.5j * (xi * w1 + mu**2) / safe, 0.0)
    m2 = np.where(d > 0, -0.5j * (xi * w2 + mu**2) / safe, 0.0)
    return m1, m2


def multiplier_M(branch: int, xi, mu):
    """Symbol of the nonlinear forcing on branch ``branch``; 0 at the origin."""
    xi = np.asarray(xi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    m1, m2 = _multipliers(xi, mu, *_omegas(xi, mu))
    if branch not in (1, 2):
        raise ValueError(f"branch must be 1 or 2, got {branch!r}")
    out = m1 if branch == 1 else m2
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True, eq=False)
class SymbolTable:
    """Per-mode symbols on a grid; every array has the grid shape.

    ``P`` and ``Pinv`` have shape ``(2, 2, Ny, Nx)``.  ``nyquist`` marks the
    unpaired modes on which the derivative symbols are zeroed; the dynamics
    hold those modes fixed.
    """

    grid: Grid2D
    omega1: np.ndarray
    omega2: np.ndarray
    sqrt_disc: np.ndarray
    M1: np.ndarray
    M2: np.ndarray
    degenerate: np.ndarray
    nyquist: np.ndarray
    P: np.ndarray
    Pinv: np.ndarray

    def omega(self, branch: int) -> np.ndarray:
        return self.omega1 if branch == 1 else self.omega2

    def M(self, branch: int) -> np.ndarray:
        return self.M1 if branch == 1 else self.M2

    def propagation_omega(self, branch: int) -> np.ndarray:
        """Frequencies used by the dynamics (zero on Nyquist modes)."""
        return np.where(self.nyquist, 0.0, self.omega(branch))

    def forcing_M(self, branch: int) -> np.ndarray:
        return np.where(self.nyquist, 0.0, self.M(branch))

    def A_hat(self) -> np.ndarray:
        xi, mu = self.grid.XI, self.grid.MU
        k2 = 1.0 + xi**2
        return 1j * np.array([[-xi / k2, -mu], [-mu / k2, np.zeros_like(xi)]])


def build_symbol_table(grid: Grid2D) -> SymbolTable:
    xi, mu = grid.XI, grid.MU
    k2 = 1.0 + xi**2
    w1, w2 = _omegas(xi, mu)
    d = sqrt_disc(xi, mu)
    m1, m2 = _multipliers(xi, mu, w1, w2)
    degenerate = mu == 0

    safe_mu = np.where(degenerate, 1.0, mu)
    # E_i = (1, mu / ((1 + xi^2) omega_i)) written as (1, -omega_j / mu)
    P = np.empty((2, 2) + grid.shape, dtype=float)
    P[0, 0] = 1.0
    P[0, 1] = 1.0
    P[1, 0] = -w2 / safe_mu
    P[1, 1] = -w1 / safe_mu
    gap = np.where(degenerate, 1.0, d / k2)  # omega1 - omega2
    Pinv = np.empty_like(P)
    Pinv[0, 0] = w1 / gap
    Pinv[0, 1] = safe_mu / gap
    Pinv[1, 0] = -w2 / gap
    Pinv[1, 1] = -safe_mu / gap

    # mu == 0: identity pairing, swapped for xi < 0
    swap = degenerate & (xi < 0)
    keep = degenerate & ~swap
    for M in (P, Pinv):
        M[0, 0] = np.where(keep, 1.0, np.where(swap, 0.0, M[0, 0]))
        M[0, 1] = np.where(keep, 0.0, np.where(swap, 1.0, M[0, 1]))
        M[1, 0] = np.where(keep, 0.0, np.where(swap, 1.0, M[1, 0]))
        M[1, 1] = np.where(keep, 1.0, np.where(swap, 0.0, M[1, 1]))

    arrays = dict(omega1=w1, omega2=w2, sqrt_disc=d, M1=m1, M2=m2,
                  degenerate=degenerate, nyquist=grid.nyquist_mask.copy(), P=P, Pinv=Pinv)
    for a in arrays.values():
        a.flags.writeable = False
    return SymbolTable(grid=grid, **arrays)


@dataclass(frozen=True)
class StateW:
    w1: SpectralField
    w2: SpectralField
    t: float = 0.0

    @property
    def grid(self) -> Grid2D:
        return self.w1.grid


def _check_grid(grid: Grid2D, tab: SymbolTable):
    if grid != tab.grid:
        raise ValueError("state and symbol table are on different grids")


def to_diagonal(s: StateUV, tab: SymbolTable) -> StateW:
    _check_grid(s.grid, tab)
    u, v = s.u.coeff, s.v.coeff
    Q = tab.Pinv
    w1 = Q[0, 0] * u + Q[0, 1] * v
    w2 = Q[1, 0] * u + Q[1, 1] * v
    return StateW(SpectralField(s.grid, w1), SpectralField(s.grid, w2), s.t)


def from_diagonal(w: StateW, tab: SymbolTable) -> StateUV:
    _check_grid(w.grid, tab)
    a, b = w.w1.coeff, w.w2.coeff
    P = tab.P
    u = P[0, 0] * a + P[0, 1] * b
    v = P[1, 0] * a + P[1, 1] * b
    return StateUV(SpectralField(w.grid, u), SpectralField(w.grid, v), w.t)


def nonlinear_arrays(tab: SymbolTable, w1: np.ndarray, w2: np.ndarray):
    """``-M_i Lambda`` for both branches, with ``Lambda`` the dealiased ``u**2``."""
    grid = tab.grid
    n = grid.Nx * grid.Ny
    uh = tab.P[0, 0] * w1 + tab.P[0, 1] * w2
    u = np.fft.ifft2(uh).real * n
    lam = np.fft.fft2(u * u) / n
    lam = np.where(grid.dealias_mask, lam, 0.0)
    return -tab.forcing_M(1) * lam, -tab.forcing_M(2) * lam


def rhs_diagonal(w: StateW, tab: SymbolTable) -> tuple[SpectralField, SpectralField]:
    _check_grid(w.grid, tab)
    a, b = w.w1.coeff, w.w2.coeff
    n1, n2 = nonlinear_arrays(tab, a, b)
    d1 = -1j * tab.propagation_omega(1) * a + n1
    d2 = -1j * tab.propagation_omega(2) * b + n2
    return SpectralField(w.grid, d1), SpectralField(w.grid, d2)


@dataclass(frozen=True)
class OperatorFamily:
    """Fourier symbols of the four operators ``K1, K2, L1, L2`` as functions of xi."""

    name: str
    K1: Callable[[np.ndarray], np.ndarray]
    K2: Callable[[np.ndarray], np.ndarray]
    L1: Callable[[np.ndarray], np.ndarray]
    L2: Callable[[np.ndarray], np.ndarray]


def _one(xi):
    return np.ones_like(np.asarray(xi, dtype=float))


# d_X -> i xi, so d_X^2 -> -xi^2
KP = OperatorFamily("KP", K1=lambda xi: 1.0 + np.asarray(xi, float) ** 2, K2=_one, L1=_one, L2=_one)
BBM = OperatorFamily(
    "BBM",
    K1=lambda xi: (1.0 - np.asarray(xi, float) ** 2 / 6) / (1.0 + np.asarray(xi, float) ** 2 / 6),
    K2=_one,
    L1=_one,
    L2=lambda xi: np.sqrt(1.0 + np.asarray(xi, float) ** 2 / 6),
)
FAMILIES = {"KP": KP, "BBM": BBM}


def generalized_dispersion(selection: OperatorFamily | str, U: float, xi, mu):
    """Both roots ``(omega_plus, omega_minus)`` of the four-operator family.

    ``4 omega = xi (L1^2 + K1 - 2 U L1) +- sqrt(xi^2 (L1^2 + K1 - 2 U L1)^2
    + 4 mu^2 K2 (L1^2 + K1))``.
    """
    fam = FAMILIES[selection] if isinstance(selection, str) else selection
    xi = np.asarray(xi, dtype=float)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(all="ignore"):
        K1, K2, L1 = fam.K1(xi), fam.K2(xi), fam.L1(xi)
        a = -2 * U * L1 + L1**2 + K1
        disc = xi**2 * a**2 + 4 * mu**2 * K2 * (L1**2 + K1)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(disc))):
        raise ValueError(f"{fam.name} symbols are not finite at the requested modes")
    if np.any(disc < 0):
        raise ValueError(f"{fam.name} dispersion is complex at the requested modes")
    root = np.sqrt(disc)
    plus = (xi * a + root) / 4
    minus = (xi * a - root) / 4
    if plus.ndim == 0:
        return float(plus), float(minus)
    return plus, minus
