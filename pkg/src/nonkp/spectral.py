"""Periodic 2D grids, Fourier transforms and Fourier multipliers.

Normalization: the forward transform divides by ``Nx * Ny`` so that a
coefficient is the amplitude of its mode, e.g. ``cos(x)`` has coefficient
1/2 at ``j = +1`` and ``j = -1``.  Arrays are stored ``[y, x]`` (row-major,
y outer) and coefficient arrays follow numpy's FFT ordering.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "Grid2D",
    "SpectralField",
    "make_grid",
    "transform",
    "inverse_transform",
    "apply_symbol",
    "helmholtz_inverse_Q",
    "dealias_2_3",
]


@dataclass(frozen=True)
class Grid2D:
    """Uniform periodic grid on ``[0, Lx) x [0, Ly)``."""

    Nx: int
    Ny: int
    Lx: float
    Ly: float

    def __post_init__(self):
        for name in ("Nx", "Ny"):
            n = getattr(self, name)
            if int(n) != n or n < 4 or n % 2:
                raise ValueError(f"{name} must be an even integer >= 4, got {n!r}")
        for name in ("Lx", "Ly"):
            length = getattr(self, name)
            if not np.isfinite(length) or length <= 0:
                raise ValueError(f"{name} must be positive, got {length!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.Ny, self.Nx)

    @cached_property
    def jx(self) -> np.ndarray:
        """Integer x-wavenumbers in FFT order."""
        return np.fft.fftfreq(self.Nx, 1.0 / self.Nx).astype(int)

    @cached_property
    def ky(self) -> np.ndarray:
        return np.fft.fftfreq(self.Ny, 1.0 / self.Ny).astype(int)

    @cached_property
    def xi(self) -> np.ndarray:
        return 2 * np.pi * self.jx / self.Lx

    @cached_property
    def mu(self) -> np.ndarray:
        return 2 * np.pi * self.ky / self.Ly

    @cached_property
    def XI(self) -> np.ndarray:
        return np.broadcast_to(self.xi[None, :], self.shape)

    @cached_property
    def MU(self) -> np.ndarray:
        return np.broadcast_to(self.mu[:, None], self.shape)

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.Nx) * (self.Lx / self.Nx)

    @cached_property
    def y(self) -> np.ndarray:
        return np.arange(self.Ny) * (self.Ly / self.Ny)

    @cached_property
    def X(self) -> np.ndarray:
        return np.broadcast_to(self.x[None, :], self.shape)

    @cached_property
    def Y(self) -> np.ndarray:
        return np.broadcast_to(self.y[:, None], self.shape)

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        """True on the unpaired ``j = -Nx/2`` column and ``k = -Ny/2`` row."""
        return (self.jx[None, :] == -self.Nx // 2) | (self.ky[:, None] == -self.Ny // 2)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True on modes kept by the 2/3 rule."""
        return (np.abs(self.jx)[None, :] <= self.Nx / 3) & (np.abs(self.ky)[:, None] <= self.Ny / 3)

    @property
    def area(self) -> float:
        return self.Lx * self.Ly

    def index(self, j: int, k: int) -> tuple[int, int]:
        """Array index of the mode with integer wavenumbers ``(j, k)``."""
        if not (-self.Nx // 2 <= j < self.Nx // 2 and -self.Ny // 2 <= k < self.Ny // 2):
            raise ValueError(f"mode ({j}, {k}) is not on the grid")
        return (k % self.Ny, j % self.Nx)


def make_grid(Nx: int, Ny: int, Lx: float, Ly: float) -> Grid2D:
    grid = Grid2D(Nx, Ny, float(Lx), float(Ly))
    return Grid2D(int(grid.Nx), int(grid.Ny), grid.Lx, grid.Ly)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a field on ``grid`` (read-only array)."""

    grid: Grid2D
    coeff: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeff, dtype=complex)
        if c.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {c.shape} does not match grid {self.grid.shape}")
        c.flags.writeable = False
        object.__setattr__(self, "coeff", c)

    @classmethod
    def zeros(cls, grid: Grid2D) -> "SpectralField":
        return cls(grid, np.zeros(grid.shape, dtype=complex))

    def to_physical(self) -> np.ndarray:
        return inverse_transform(self)

    def mode(self, j: int, k: int) -> complex:
        return complex(self.coeff[self.grid.index(j, k)])

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        c = self.coeff
        flipped = np.conj(np.roll(np.flip(c, axis=(0, 1)), shift=(1, 1), axis=(0, 1)))
        return bool(np.max(np.abs(c - flipped), initial=0.0) <= tol * max(1.0, np.max(np.abs(c))))

    def _check(self, other: "SpectralField"):
        if other.grid != self.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeff + other.coeff)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeff - other.coeff)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.coeff * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeff)


def transform(field_physical: np.ndarray, grid: Grid2D) -> SpectralField:
    f = np.asarray(field_physical)
    if f.shape != grid.shape:
        raise ValueError(f"array shape {f.shape} does not match grid {grid.shape}")
    return SpectralField(grid, np.fft.fft2(f) / (grid.Nx * grid.Ny))


def inverse_transform(f: SpectralField, *, real: bool = True) -> np.ndarray:
    """Physical values of ``f``; the imaginary part is dropped when ``real``."""
    out = np.fft.ifft2(f.coeff) * (f.grid.Nx * f.grid.Ny)
    return out.real.copy() if real else out


def apply_symbol(f: SpectralField, sigma: Callable[[np.ndarray, np.ndarray], np.ndarray] | np.ndarray,
                 *, zero_nyquist: bool = False) -> SpectralField:
    """Multiply every mode ``(xi, mu)`` of ``f`` by ``sigma(xi, mu)``.

    ``sigma`` may also be a precomputed array on the grid.  Pass
    ``zero_nyquist=True`` for odd (derivative-type) symbols, whose value on
    the unpaired Nyquist modes would break real-valuedness.
    """
    grid = f.grid
    s = sigma(grid.XI, grid.MU) if callable(sigma) else sigma
    s = np.broadcast_to(np.asarray(s, dtype=complex), grid.shape)
    if not np.all(np.isfinite(s)):
        raise ValueError("symbol is not finite on every grid mode")
    out = s * f.coeff
    if zero_nyquist:
        out = np.where(grid.nyquist_mask, 0.0, out)
    return SpectralField(grid, out)


def q_symbol(xi):
    return 1.0 / (1.0 + xi**2)


def helmholtz_inverse_Q(f: SpectralField) -> SpectralField:
    """Apply ``(1 - d_xx)^{-1}``."""
    return SpectralField(f.grid, f.coeff * q_symbol(f.grid.XI))


def dealias_2_3(f: SpectralField) -> SpectralField:
    return SpectralField(f.grid, np.where(f.grid.dealias_mask, f.coeff, 0.0))
