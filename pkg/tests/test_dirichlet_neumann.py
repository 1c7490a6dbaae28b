import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonkp.bourgain import loglog_slope
from nonkp.dirichlet_neumann import (
    DNExpansion,
    G0_apply,
    first_order_closed,
    second_order_closed,
    Gj_apply,
    Grid1D,
    dn_apply,
    exact_trace_oracle,
    to_coeff,
    to_values,
)
from nonkp.scenarios import random_band

GRID = Grid1D(64)


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(7)
    with pytest.raises(ValueError):
        Grid1D(8, 0.0)


@pytest.mark.parametrize("m", [1, -3, 7, 20])
@pytest.mark.parametrize("h0", [0.5, 1.0, 3.0])
def test_G0_plane_wave(m, h0):
    k = 2 * np.pi * m / GRID.L
    wave = np.exp(1j * k * GRID.x)
    got = to_values(G0_apply(to_coeff(wave), GRID, h0))
    lam = abs(k) * np.tanh(abs(k) * h0)
    assert np.max(np.abs(got - lam * wave)) <= 1e-12 * max(1.0, lam)


def test_G0_kills_constants():
    assert np.all(G0_apply(to_coeff(np.full(GRID.N, 3.0)), GRID, 1.0) == 0)


def test_G0_deep_water_limit():
    phi = to_coeff(random_band(GRID, 5, 1.0, np.random.default_rng(0)))
    np.testing.assert_allclose(G0_apply(phi, GRID, 50.0), np.abs(GRID.k) * phi, atol=1e-14)


def test_G0_rejects_bad_depth():
    with pytest.raises(ValueError):
        G0_apply(np.zeros(GRID.N), GRID, 0.0)


def _setup(seed, amp=0.2, J=3):
    rng = np.random.default_rng(seed)
    eta = random_band(GRID, 4, amp, rng)
    phi = to_coeff(random_band(GRID, 4, 1.0, rng))
    return DNExpansion(1.0, GRID, J, eta), phi


def test_order_zero_is_flat_operator():
    exp, phi = _setup(1)
    np.testing.assert_allclose(Gj_apply(0, exp, phi), G0_apply(phi, GRID, 1.0), atol=0)


def test_G1_for_constant_surface():
    # a raised flat surface: G1 is the depth derivative of |k| tanh(|k| h)
    c = 0.1
    exp = DNExpansion(1.0, GRID, 1, np.full(GRID.N, c))
    m = 3
    k = 2 * np.pi * m / GRID.L
    phi = to_coeff(np.cos(k * GRID.x))
    got = Gj_apply(1, exp, phi)
    expected = c * k**2 / np.cosh(k * 1.0) ** 2 * phi
    np.testing.assert_allclose(got, expected, atol=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_recursion_matches_closed_forms(seed):
    exp, phi = _setup(seed)
    scale = np.max(np.abs(phi))
    assert np.max(np.abs(Gj_apply(1, exp, phi) - first_order_closed(exp, phi))) / scale <= 1e-10
    assert np.max(np.abs(Gj_apply(2, exp, phi) - second_order_closed(exp, phi))) / scale <= 1e-10


def test_flat_surface_has_no_corrections():
    exp = DNExpansion(1.0, GRID, 3, np.zeros(GRID.N))
    phi = to_coeff(random_band(GRID, 4, 1.0, np.random.default_rng(2)))
    for j in (1, 2, 3):
        assert np.max(np.abs(Gj_apply(j, exp, phi))) == 0
    np.testing.assert_allclose(dn_apply(exp, phi), G0_apply(phi, GRID, 1.0), atol=0)


def test_order_zero_expansion():
    exp, phi = _setup(3, J=0)
    np.testing.assert_array_equal(dn_apply(exp, phi), G0_apply(phi, GRID, 1.0))
    with pytest.raises(ValueError):
        Gj_apply(1, exp, phi)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_terms_are_homogeneous(j):
    exp, phi = _setup(4)
    half = DNExpansion(1.0, GRID, 3, 0.5 * exp.eta)
    np.testing.assert_allclose(Gj_apply(j, half, phi), 0.5**j * Gj_apply(j, exp, phi), atol=1e-13)


def _inner(a, b):
    return np.sum(np.conj(a) * b)


@pytest.mark.parametrize("j", [0, 1, 2, 3])
def test_terms_are_symmetric(j):
    exp, phi = _setup(5)
    psi = to_coeff(random_band(GRID, 4, 1.0, np.random.default_rng(9)))
    a = _inner(psi, Gj_apply(j, exp, phi))
    b = _inner(Gj_apply(j, exp, psi), phi)
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


def test_truncated_operator_is_nonnegative():
    exp, _ = _setup(6, amp=0.05)
    rng = np.random.default_rng(7)
    for _ in range(5):
        phi = to_coeff(random_band(GRID, 6, 1.0, rng))
        assert _inner(phi, dn_apply(exp, phi)).real >= 0


@pytest.mark.parametrize("m", [1, 2, 5])
def test_trace_oracle_on_flat_surface(m):
    k = 2 * np.pi * m / GRID.L
    Phi, G = exact_trace_oracle(np.zeros(GRID.N), k, 1.0, GRID)
    np.testing.assert_allclose(to_values(G0_apply(to_coeff(Phi), GRID, 1.0)), G, atol=1e-12)


def test_trace_oracle_rejects_off_grid_wavenumber():
    with pytest.raises(ValueError):
        exact_trace_oracle(np.zeros(GRID.N), 1.5, 1.0, GRID)


@pytest.mark.parametrize("J", [1, 2, 3])
def test_expansion_converges_at_order_J_plus_one(J):
    amps = [0.01, 0.02, 0.04]
    errs = []
    for a in amps:
        eta = a * np.cos(GRID.x)
        Phi, G = exact_trace_oracle(eta, 1.0, 1.0, GRID)
        approx = to_values(dn_apply(DNExpansion(1.0, GRID, J, eta), to_coeff(Phi)))
        errs.append(np.max(np.abs(approx - G)))
    assert abs(loglog_slope(amps, errs) - (J + 1)) <= 0.3


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), amp=st.floats(0.01, 0.5))
def test_closed_form_property(seed, amp):
    exp, phi = _setup(seed, amp=amp, J=2)
    scale = np.max(np.abs(phi))
    assert np.max(np.abs(Gj_apply(2, exp, phi) - second_order_closed(exp, phi))) / scale <= 1e-10


def test_expansion_validation():
    with pytest.raises(ValueError):
        DNExpansion(1.0, GRID, 2, np.zeros(10))
    with pytest.raises(ValueError):
        DNExpansion(1.0, GRID, 2, np.full(GRID.N, 1.0))
    with pytest.raises(ValueError):
        DNExpansion(-1.0, GRID, 2, np.zeros(GRID.N))
    with pytest.raises(ValueError):
        DNExpansion(1.0, GRID, -1, np.zeros(GRID.N))
    exp, phi = _setup(0)
    with pytest.raises(ValueError):
        Gj_apply(1, exp, phi[:10])
    with pytest.raises(ValueError):
        Gj_apply(-1, exp, phi)
