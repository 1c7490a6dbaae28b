"""Initial data builders."""
from __future__ import annotations

import numpy as np

from .diagonal import SymbolTable, build_symbol_table
from .model import StateUV
from .spectral import Grid2D, SpectralField, transform

__all__ = ["random_smooth", "random_state", "plane_wave", "mass_wave_initial"]


def random_smooth(grid: Grid2D, amplitude: float, kmax: int, rng: np.random.Generator, *,
                  zero_mean: bool = True) -> np.ndarray:
    """Real field with random modes ``|j|, |k| <= kmax`` scaled to ``max|f| = amplitude``."""
    mask = (np.abs(grid.jx)[None, :] <= kmax) & (np.abs(grid.ky)[:, None] <= kmax) & ~grid.nyquist_mask
    c = np.zeros(grid.shape, dtype=complex)
    c[mask] = rng.standard_normal(mask.sum()) + 1j * rng.standard_normal(mask.sum())
    if zero_mean:
        c[0, 0] = 0.0
    f = np.fft.ifft2(c).real
    peak = np.max(np.abs(f))
    return f * (amplitude / peak) if peak > 0 else f


def random_state(grid: Grid2D, amplitude: float, kmax: int, rng: np.random.Generator) -> StateUV:
    u = random_smooth(grid, amplitude, kmax, rng)
    v = random_smooth(grid, amplitude, kmax, rng)
    return StateUV.from_physical(u, v, grid)


def plane_wave(grid: Grid2D, j: int, k: int, branch: int, amplitude: float,
               tab: SymbolTable | None = None) -> StateUV:
    """Real free wave carried by ``branch`` at mode ``(j, k)`` and its conjugate mode."""
    tab = tab or build_symbol_table(grid)
    idx = grid.index(j, k)
    nidx = grid.index(-j, -k) if (j, k) != (0, 0) else idx
    col = tab.P[:, branch - 1, idx[0], idx[1]]
    u = np.zeros(grid.shape, dtype=complex)
    v = np.zeros(grid.shape, dtype=complex)
    u[idx] += amplitude * col[0]
    v[idx] += amplitude * col[1]
    u[nidx] += np.conj(amplitude * col[0])
    v[nidx] += np.conj(amplitude * col[1])
    return StateUV(SpectralField(grid, u), SpectralField(grid, v))


def mass_wave_initial(grid: Grid2D, amplitude: float = 1.0) -> StateUV:
    """``u = amplitude cos(y) (1 + cos x) / Lx``, ``v = 0``: unit-amplitude mass profile ``cos(y)``."""
    u = amplitude * np.cos(2 * np.pi * grid.Y / grid.Ly) * (1 + np.cos(2 * np.pi * grid.X / grid.Lx)) / grid.Lx
    return StateUV(transform(u, grid), SpectralField.zeros(grid))
