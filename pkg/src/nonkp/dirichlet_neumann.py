r"""Taylor expansion of the Dirichlet-Neumann operator over a flat bottom.

For a periodic surface :math:`\eta(x)` above depth :math:`h_0` the operator
expands as :math:`G(\eta) = \sum_j G_j(\eta)` with :math:`G_j` homogeneous of
degree ``j``.  The terms follow from matching degrees in the trace identity
for the harmonic family
:math:`\phi_k = e^{ikx}\cosh(|k|(y + h_0))`:

.. math::

    G_j = \frac{1}{j!}\Big[\eta^j |D|^{j+1} T_j - i\,\partial_x(\eta^j)\, D|D|^{j-1} T_j\Big]
          - \sum_{\nu<j} \frac{1}{(j-\nu)!}\, G_\nu\, \eta^{j-\nu} |D|^{j-\nu} S_{j-\nu},

where :math:`D = -i\partial_x` and :math:`T_m` is :math:`\tanh(|D|h_0)` for
even ``m`` and the identity for odd ``m``, while :math:`S_m` is the reverse.

Fields are one-dimensional Fourier amplitude arrays (``fft / N``).
Products are formed on a grid padded to twice the resolution and truncated.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import factorial

import numpy as np

__all__ = [
    "Grid1D",
    "DNExpansion",
    "to_coeff",
    "to_values",
    "G0_apply",
    "Gj_apply",
    "dn_apply",
    "first_order_closed",
    "second_order_closed",
    "exact_trace_oracle",
]


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid of ``N`` points on ``[0, L)``."""

    N: int
    L: float = 2 * np.pi

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 4 or self.N % 2:
            raise ValueError(f"N must be an even integer >= 4, got {self.N!r}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"L must be positive, got {self.L!r}")

    @cached_property
    def k(self) -> np.ndarray:
        return 2 * np.pi * np.fft.fftfreq(self.N, self.L / self.N)

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.N) * (self.L / self.N)

    @cached_property
    def nyquist(self) -> np.ndarray:
        return np.arange(self.N) == self.N // 2


def to_coeff(values: np.ndarray) -> np.ndarray:
    return np.fft.fft(values) / len(values)


def to_values(coeff: np.ndarray) -> np.ndarray:
    return np.fft.ifft(coeff) * len(coeff)


def _pad(c: np.ndarray, M: int) -> np.ndarray:
    N = c.size
    out = np.zeros(M, dtype=complex)
    h = N // 2
    out[:h] = c[:h]
    out[M - h + 1:] = c[h + 1:]
    return out


def _truncate(c: np.ndarray, N: int) -> np.ndarray:
    M = c.size
    h = N // 2
    out = np.zeros(N, dtype=complex)
    out[:h] = c[:h]
    out[h + 1:] = c[M - h + 1:]
    return out


def product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Coefficients of the pointwise product, computed at twice the resolution."""
    N = a.size
    M = 2 * N
    pa = np.fft.ifft(_pad(a, M)) * M
    pb = np.fft.ifft(_pad(b, M)) * M
    return _truncate(np.fft.fft(pa * pb) / M, N)


def _tanh_symbol(grid: Grid1D, h0: float) -> np.ndarray:
    return np.tanh(np.abs(grid.k) * h0)


def G0_apply(phi: np.ndarray, grid: Grid1D, h0: float) -> np.ndarray:
    """Flat-surface operator: mode ``k`` times ``|k| tanh(|k| h0)``."""
    if not h0 > 0:
        raise ValueError("h0 must be positive")
    return np.abs(grid.k) * _tanh_symbol(grid, h0) * np.asarray(phi, dtype=complex)


@dataclass(frozen=True, eq=False)
class DNExpansion:
    """Truncated expansion of order ``J`` about the flat surface.

    ``eta`` holds the physical surface samples on ``grid``.
    """

    h0: float
    grid: Grid1D
    J: int
    eta: np.ndarray

    def __post_init__(self):
        eta = np.array(self.eta, dtype=float)
        if eta.shape != (self.grid.N,):
            raise ValueError(f"eta must have {self.grid.N} samples, got shape {eta.shape}")
        if not (np.isfinite(self.h0) and self.h0 > 0):
            raise ValueError(f"h0 must be positive, got {self.h0!r}")
        if int(self.J) != self.J or self.J < 0:
            raise ValueError(f"J must be a non-negative integer, got {self.J!r}")
        if not np.all(np.isfinite(eta)) or np.max(np.abs(eta)) >= self.h0:
            raise ValueError("surface must be finite and stay above the bottom (max|eta| < h0)")
        eta.flags.writeable = False
        object.__setattr__(self, "eta", eta)

    @cached_property
    def eta_coeff(self) -> np.ndarray:
        return to_coeff(self.eta)

    @cached_property
    def powers(self) -> list[np.ndarray]:
        """Coefficients of ``eta**m`` for ``m = 0..J``."""
        one = np.zeros(self.grid.N, dtype=complex)
        one[0] = 1.0
        out = [one]
        for _ in range(self.J):
            out.append(product(out[-1], self.eta_coeff))
        return out

    @cached_property
    def tanh(self) -> np.ndarray:
        return _tanh_symbol(self.grid, self.h0)


def _depth_factor(exp: DNExpansion, m: int, even: bool) -> np.ndarray | float:
    """``tanh(|D| h0)`` when ``m`` has the requested parity, else 1."""
    return exp.tanh if (m % 2 == 0) == even else 1.0


def Gj_apply(j: int, exp: DNExpansion, phi: np.ndarray) -> np.ndarray:
    """Apply the degree-``j`` term of the expansion to coefficients ``phi``."""
    if int(j) != j or j < 0:
        raise ValueError(f"j must be a non-negative integer, got {j!r}")
    if j > exp.J:
        raise ValueError(f"order {j} exceeds the expansion order J={exp.J}")
    phi = np.asarray(phi, dtype=complex)
    if phi.shape != (exp.grid.N,):
        raise ValueError(f"phi must have {exp.grid.N} coefficients")
    k = exp.grid.k
    absk = np.abs(k)
    if j == 0:
        return absk * exp.tanh * phi

    T = _depth_factor(exp, j, even=True)
    eta_j = exp.powers[j]
    # D |D|^{j-1} is set to 0 at k = 0
    d_mult = np.where(k == 0, 0.0, k * absk ** (j - 1))
    deta_j = 1j * k * eta_j
    out = (product(eta_j, absk ** (j + 1) * T * phi) - 1j * product(deta_j, d_mult * T * phi)) / factorial(j)
    for nu in range(j):
        m = j - nu
        inner = product(exp.powers[m], absk**m * _depth_factor(exp, m, even=False) * phi)
        out -= Gj_apply(nu, exp, inner) / factorial(m)
    return out


def dn_apply(exp: DNExpansion, phi: np.ndarray) -> np.ndarray:
    """Sum of the terms of degree ``0..J``."""
    return sum(Gj_apply(j, exp, phi) for j in range(exp.J + 1))


def first_order_closed(exp: DNExpansion, phi: np.ndarray) -> np.ndarray:
    """``D eta D - G0 eta G0`` in one horizontal dimension."""
    k = exp.grid.k
    g0 = np.abs(k) * exp.tanh
    eta = exp.eta_coeff
    return k * product(eta, k * phi) - g0 * product(eta, g0 * phi)


def second_order_closed(exp: DNExpansion, phi: np.ndarray) -> np.ndarray:
    """``-(|D|^2 eta^2 G0 + G0 eta^2 |D|^2 - 2 G0 eta G0 eta G0) / 2``."""
    k2 = exp.grid.k ** 2
    g0 = np.abs(exp.grid.k) * exp.tanh
    eta = exp.eta_coeff
    eta2 = product(eta, eta)
    a = k2 * product(eta2, g0 * phi)
    b = g0 * product(eta2, k2 * phi)
    c = g0 * product(eta, g0 * product(eta, g0 * phi))
    return -0.5 * (a + b - 2 * c)


def exact_trace_oracle(eta: np.ndarray, k: float, h0: float, grid: Grid1D) -> tuple[np.ndarray, np.ndarray]:
    """Trace datum and exact normal derivative for the harmonic ``e^{ikx} cosh(|k|(y+h0))``.

    Returns physical samples ``(Phi_k, G(eta) Phi_k)`` on ``grid``.
    """
    eta = np.asarray(eta, dtype=float)
    x = grid.x
    if not np.isclose((k * grid.L / (2 * np.pi)) % 1.0, 0.0) and not np.isclose(
            (k * grid.L / (2 * np.pi)) % 1.0, 1.0):
        raise ValueError(f"k={k!r} is not a wavenumber of the grid")
    eta_x = np.real(to_values(1j * grid.k * np.where(grid.nyquist, 0.0, to_coeff(eta))))
    depth = np.abs(k) * (eta + h0)
    wave = np.exp(1j * k * x)
    phi = wave * np.cosh(depth)
    g = np.abs(k) * wave * np.sinh(depth) - eta_x * 1j * k * wave * np.cosh(depth)
    return phi, g
