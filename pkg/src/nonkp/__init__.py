"""Pseudospectral simulation and verification toolkit for the Non-KP system."""
from .spectral import (
    Grid2D,
    SpectralField,
    apply_symbol,
    dealias_2_3,
    helmholtz_inverse_Q,
    inverse_transform,
    make_grid,
    transform,
)
from .model import StateUV, apply_J, grad_H, hamiltonian, mass_profile, rhs_linearized, rhs_physical
from .diagonal import (
    BBM,
    KP,
    StateW,
    SymbolTable,
    build_symbol_table,
    from_diagonal,
    generalized_dispersion,
    multiplier_M,
    omega,
    rhs_diagonal,
    to_diagonal,
)
from .diagnostics import (
    DiagnosticsRecord,
    fit_plane_wave_frequency,
    hamiltonian_drift,
    mass_wave_residual,
)
from .integrate import (
    BlowUpError,
    RunConfig,
    Trajectory,
    free_propagate,
    run,
    step_ifrk4,
    step_rk4_physical,
)

__version__ = "0.1.0"
