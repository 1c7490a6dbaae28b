import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonkp.bourgain import (
    SpaceTimeField,
    bump_scaled,
    bump_eval,
    japanese,
    loglog_slope,
    norm_Hb,
    norm_Hbs,
    norm_Xibs,
    norm_Zs,
    cutoff_norm_scaling,
    verify_duhamel_scaling,
    verify_free_estimate,
)
from nonkp.diagonal import StateW, build_symbol_table, to_diagonal
from nonkp.initial import random_state
from nonkp.integrate import free_propagate
from nonkp.spectral import SpectralField, make_grid

from conftest import TWO_PI, random_coeff_field


def test_bump_values():
    assert bump_eval(0.0) == 1.0
    assert bump_eval(1.0) == 1.0
    assert bump_eval(2.5) == 0.0 and bump_eval(-2.5) == 0.0
    assert bump_eval(2.0) == 0.0
    assert bump_eval(1.5) == pytest.approx(0.5, abs=1e-15)


def test_bump_is_even_and_monotone():
    t = np.linspace(0, 3, 301)
    vals = bump_eval(t)
    np.testing.assert_array_equal(vals, bump_eval(-t))
    assert np.all(np.diff(vals) <= 0)
    assert np.all((vals >= 0) & (vals <= 1))


def test_bump_T_rescales():
    assert bump_scaled(3.0, 2.0) == bump_eval(1.5)
    with pytest.raises(ValueError):
        bump_scaled(0.0, 0.0)


def test_japanese():
    np.testing.assert_allclose(japanese([0, 3]), [1, np.sqrt(10)])


def test_Hb_of_zero():
    assert norm_Hb(np.zeros(16), 0.6, 1.0) == 0.0


@pytest.mark.parametrize("b", [0.0, 0.6, -0.4])
def test_Hb_single_lattice_mode(b):
    Lt, Nt, n = 1.0, 32, 3
    t = (np.arange(Nt) - Nt // 2) * Lt / Nt
    tau0 = 2 * np.pi * n / Lt
    f = np.exp(1j * tau0 * t)
    assert norm_Hb(f, b, Lt) == pytest.approx(np.sqrt(Lt) * japanese(tau0) ** b, rel=1e-12)


def test_Hb_zero_weight_is_sample_l2():
    rng = np.random.default_rng(0)
    f = rng.standard_normal(64)
    Lt = 3.0
    assert norm_Hb(f, 0.0, Lt) == pytest.approx(np.sqrt(np.sum(f**2) * Lt / 64), rel=1e-12)


def test_Hb_validation():
    with pytest.raises(ValueError):
        norm_Hb(np.zeros(2), 0.5, 1.0)
    with pytest.raises(ValueError):
        norm_Hb(np.zeros(8), 0.5, 0.0)


def test_Zs_single_mode(grid16):
    f = SpectralField.zeros(grid16)
    c = f.coeff.copy()
    c[grid16.index(2, -1)] = 0.5
    f = SpectralField(grid16, c)
    xi, mu = 2.0, -1.0
    expected = 0.5 * (1 + xi**2) * japanese(abs(xi) + abs(mu))
    assert norm_Zs(f, 1.0) == pytest.approx(expected, rel=1e-14)
    assert norm_Zs(f, 0.0) == pytest.approx(0.5 * (1 + xi**2), rel=1e-14)


def _mode_field(grid, mode, Nt, Lt, temporal):
    c = np.zeros(grid.shape, complex)
    c[grid.index(*mode)] = 1.0
    return SpaceTimeField.from_function(grid, Nt, Lt, c, temporal)


def test_Hbs_and_Xibs_zero(grid16):
    tab = build_symbol_table(grid16)
    f = SpaceTimeField(grid16, 1.0, np.zeros(grid16.shape + (8,)))
    assert norm_Hbs(f, 0.6, 1.0) == 0.0
    assert norm_Xibs(1, f, 0.6, 1.0, tab) == 0.0


def test_Xibs_on_free_wave(grid16):
    tab = build_symbol_table(grid16)
    # mode (0, 3) has branch-1 frequency 3, which is on the lattice for Lt = 2 pi
    Lt, Nt = TWO_PI, 64
    om = tab.propagation_omega(1)[grid16.index(0, 3)]
    assert om == pytest.approx(3.0)
    f = _mode_field(grid16, (0, 3), Nt, Lt, lambda t: np.exp(-1j * om * t))
    spatial = japanese(3.0)
    # the free wave sits on tau = -omega, where the X weight is 1
    assert norm_Xibs(1, f, 0.6, 1.0, tab) == pytest.approx(np.sqrt(Lt) * spatial, rel=1e-12)
    assert norm_Hbs(f, 0.6, 1.0) == pytest.approx(np.sqrt(Lt) * spatial * japanese(3.0) ** 0.6, rel=1e-12)


def test_Xibs_equals_Hbs_of_backward_flow(grid16, rng):
    tab = build_symbol_table(grid16)
    Nt, Lt = 16, 4.0
    t = (np.arange(Nt) - Nt // 2) * Lt / Nt
    vals = rng.standard_normal(grid16.shape + (Nt,)) + 1j * rng.standard_normal(grid16.shape + (Nt,))
    f = SpaceTimeField(grid16, Lt, vals)
    z = SpectralField.zeros(grid16)
    back = np.stack([free_propagate(StateW(f.slice(m), z), -t[m], tab).w1.coeff for m in range(Nt)], axis=-1)
    g = SpaceTimeField(grid16, Lt, back)
    assert norm_Xibs(1, f, 0.6, 1.0, tab) == pytest.approx(norm_Hbs(g, 0.6, 1.0), rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(-5, 5).filter(lambda x: abs(x) > 1e-3), b=st.floats(-1, 1), s=st.floats(0, 2))
def test_norms_are_homogeneous(scale, b, s):
    grid = make_grid(8, 8, TWO_PI, TWO_PI)
    tab = build_symbol_table(grid)
    vals = np.random.default_rng(1).standard_normal(grid.shape + (8,))
    f = SpaceTimeField(grid, 2.0, vals)
    g = SpaceTimeField(grid, 2.0, scale * vals)
    assert norm_Hbs(g, b, s) == pytest.approx(abs(scale) * norm_Hbs(f, b, s), rel=1e-12)
    assert norm_Xibs(2, g, b, s, tab) == pytest.approx(abs(scale) * norm_Xibs(2, f, b, s, tab), rel=1e-12)


def test_norm_monotone_in_b_and_s(grid16, rng):
    vals = rng.standard_normal(grid16.shape + (16,))
    f = SpaceTimeField(grid16, 3.0, vals)
    assert norm_Hbs(f, 0.3, 1.0) <= norm_Hbs(f, 0.6, 1.0)
    assert norm_Hbs(f, 0.6, 0.5) <= norm_Hbs(f, 0.6, 1.0)


def test_field_validation(grid16):
    with pytest.raises(ValueError):
        SpaceTimeField(grid16, 1.0, np.zeros((4, 4, 8)))
    with pytest.raises(ValueError):
        SpaceTimeField(grid16, 0.0, np.zeros(grid16.shape + (8,)))
    tab = build_symbol_table(make_grid(8, 8, TWO_PI, TWO_PI))
    with pytest.raises(ValueError):
        norm_Xibs(1, SpaceTimeField(grid16, 1.0, np.zeros(grid16.shape + (8,))), 0.5, 1.0, tab)
    with pytest.raises(ValueError):
        norm_Xibs(3, SpaceTimeField(grid16, 1.0, np.zeros(grid16.shape + (8,))), 0.5, 1.0,
                  build_symbol_table(grid16))


def test_loglog_slope():
    x = np.geomspace(1, 100, 5)
    assert loglog_slope(x, 3 * x**-0.7) == pytest.approx(-0.7, abs=1e-12)


def test_free_estimate_ratio_is_constant(grid16):
    tab = build_symbol_table(grid16)
    rng = np.random.default_rng(5)
    samples = [to_diagonal(random_state(grid16, 1.0, 4, rng), tab) for _ in range(20)]
    rep = verify_free_estimate(samples, 0.6, 1.0, tab)
    assert rep.spread <= 0.05
    assert rep.passed and rep.max_ratio <= rep.C0


def test_free_estimate_rejects_empty_component(grid16, rng):
    tab = build_symbol_table(grid16)
    w = StateW(random_coeff_field(grid16, rng), SpectralField.zeros(grid16))
    with pytest.raises(ValueError):
        verify_free_estimate([w], 0.6, 1.0, tab)
    with pytest.raises(ValueError):
        verify_free_estimate([], 0.6, 1.0, tab)


def test_cutoff_norm_short_times():
    Ts = np.geomspace(1e-3, 0.1, 5)
    _, slope = cutoff_norm_scaling(Ts, 0.6)
    assert abs(slope + 0.1) <= 0.05


def test_cutoff_norm_grows_for_long_times():
    # at long times the cutoff is an almost flat plateau whose norm grows like sqrt(T)
    Ts = np.geomspace(10, 100, 3)
    _, slope = cutoff_norm_scaling(Ts, 0.6, points_per_unit=50)
    assert slope == pytest.approx(0.5, abs=0.05)


def _forcing(mode, sigma):
    def make(grid, Nt, Lt):
        return _mode_field(grid, mode, Nt, Lt, lambda t: bump_eval(t) * np.exp(1j * sigma * t))
    return make


def test_duhamel_scaling_off_resonance():
    grid = make_grid(4, 4, TWO_PI, TWO_PI)
    tab = build_symbol_table(grid)
    rep = verify_duhamel_scaling(_forcing((1, 1), 5.0), 1, 0.1, 1.0, tab, np.geomspace(0.05, 5, 5),
                                 points_per_unit=100)
    assert rep.passed and rep.R_spread <= 10


def test_duhamel_rejects_bad_input():
    grid = make_grid(4, 4, TWO_PI, TWO_PI)
    tab = build_symbol_table(grid)
    with pytest.raises(ValueError):
        verify_duhamel_scaling(_forcing((1, 1), 5.0), 1, 0.3, 1.0, tab, [0.05, 5])
    with pytest.raises(ValueError):
        verify_duhamel_scaling(_forcing((1, 1), 5.0), 1, 0.1, 1.0, tab, [0.5, 5])

    def zero(grid, Nt, Lt):
        return SpaceTimeField(grid, Lt, np.zeros(grid.shape + (Nt,)))
    with pytest.raises(ValueError):
        verify_duhamel_scaling(zero, 1, 0.1, 1.0, tab, [0.05, 5], points_per_unit=20)
