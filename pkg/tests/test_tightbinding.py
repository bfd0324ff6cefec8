import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tripod import bands as bands_mod
from tripod import tightbinding as tb
from tripod.bands import BlochBandSet, default_q_grid
from conftest import make_params


def synthetic_set(qs, energies, p=None):
    p = p or make_params()
    e = np.asarray(energies, dtype=complex)[:, None]
    dummy = np.zeros((len(qs), 1, 4), dtype=complex)
    pops = np.zeros((len(qs), 1, 4))
    return BlochBandSet(q_grid=np.asarray(qs, float), energies=e,
                        coeffs=dummy, populations=pops, method="full",
                        params=p)


def test_pure_cosine_recovered_exactly():
    p = make_params(n_q=64)
    qs = default_q_grid(p)
    bs = synthetic_set(qs, 1.0 + 0.5 * np.cos(qs))
    fit = tb.extract_J(bs, 1, 6)
    assert fit.hoppings[0] == pytest.approx(1.0, abs=1e-12)
    assert fit.hoppings[2] == pytest.approx(0.5, abs=1e-12)
    others = np.delete(fit.hoppings, [0, 2])
    assert np.max(np.abs(others)) < 1e-12
    assert fit.residual < 1e-12


def test_flat_band_all_hoppings_vanish():
    p = make_params(n_q=32)
    qs = default_q_grid(p)
    fit = tb.extract_J(synthetic_set(qs, np.full(32, 2.5)), 1, 8)
    assert fit.hoppings[0] == pytest.approx(2.5)
    assert np.max(np.abs(fit.hoppings[1:])) < 1e-13


@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-0.1, 0.1)),
                min_size=3, max_size=7))
@settings(max_examples=40, deadline=None)
def test_round_trip_random_cosine_series(coeffs):
    p = make_params(n_q=64)
    qs = default_q_grid(p)
    js = np.array([re + 1j * im for re, im in coeffs])
    e = tb.rebuild_dispersion(js, qs)
    fit = tb.extract_J(synthetic_set(qs, e), 1, v_max=len(js) + 1)
    assert np.max(np.abs(fit.hoppings[:len(js)] - js)) < 1e-11
    assert fit.residual < 1e-11


def test_reflection_invariance_of_extraction():
    # for a symmetric band E(q) = E(-q) the projection is reflection-blind
    p = make_params(n_q=64)
    qs = default_q_grid(p)
    e = 0.3 * np.cos(0.5 * qs) + 0.1 * np.cos(qs) + 2.0
    j_fwd = tb.extract_J(synthetic_set(qs, e), 1, 6).hoppings
    # reflect: evaluate the same symmetric band on the reflected grid
    e_ref = 0.3 * np.cos(0.5 * (-qs)) + 0.1 * np.cos(-qs) + 2.0
    j_ref = tb.extract_J(synthetic_set(qs, e_ref), 1, 6).hoppings
    assert np.max(np.abs(j_fwd - j_ref)) < 1e-10


def test_nonuniform_grid_rejected():
    p = make_params(n_q=32)
    qs = np.sort(np.concatenate([default_q_grid(p)[:-1], [1.234]]))
    with pytest.raises(tb.TightBindingError, match="uniform"):
        tb.extract_J(synthetic_set(qs, np.cos(qs)), 1, 4)


def test_vmax_bounded_by_grid():
    p = make_params(n_q=32)
    qs = default_q_grid(p)
    with pytest.raises(tb.TightBindingError, match="v_max"):
        tb.extract_J(synthetic_set(qs, np.cos(qs)), 1, 16)


@pytest.fixture(scope="module")
def dark_hoppings():
    out = {}
    for alpha in (0.0, np.pi / 6, np.pi / 4, np.radians(85.0)):
        p = make_params(eps=0.1, alpha=alpha, n_q=64, n_bands=2)
        bs = bands_mod.dark_bands(p)
        out[alpha] = {s: tb.extract_J(bs, s, 8) for s in (1, 2)}
    return out


def test_fit_residual_small_for_converged_bands(dark_hoppings):
    for alpha in (0.0, np.pi / 4):
        fit = dark_hoppings[alpha][1]
        assert fit.residual <= 1e-3 * fit.bandwidth


def test_tail_decay_parity_respecting(dark_hoppings):
    # |J_v| decays along each parity subsequence in the tail; at alpha = 0
    # the odd-v couplings are suppressed separately, so a blind
    # v-monotonicity would compare across the two families
    for alpha in (0.0, np.pi / 4):
        mags = np.abs(dark_hoppings[alpha][1].hoppings)
        for v in range(6, 9):
            assert mags[v] < mags[v - 2]
    # away from the suppressed-parity point the plain tail is monotone
    mags = np.abs(dark_hoppings[np.pi / 4][1].hoppings)
    assert all(mags[v] < mags[v - 1] for v in range(5, 9))


def test_band1_odd_hoppings_rise_steeply_with_alpha(dark_hoppings):
    j0 = np.abs(dark_hoppings[0.0][1].hoppings)
    j30 = np.abs(dark_hoppings[np.pi / 6][1].hoppings)
    assert j30[1] / j0[1] > 20.0
    assert j30[2] / j0[2] < 3.0
    assert j30[3] / j0[3] > 20.0


def test_band1_hoppings_orders_of_magnitude_near_half_pi(dark_hoppings):
    j0 = np.abs(dark_hoppings[0.0][1].hoppings)
    j85 = np.abs(dark_hoppings[np.radians(85.0)][1].hoppings)
    # the odd-v couplings explode as the band merges with the free
    # parabola; the even-v ones start from already sizable values
    for v in (1, 3):
        assert j85[v] > 100.0 * j0[v]
    for v in (2, 4):
        assert j85[v] > 10.0 * j0[v]


def test_band2_only_nn_survives_near_half_pi(dark_hoppings):
    j45 = np.abs(dark_hoppings[np.pi / 4][2].hoppings)
    j85 = np.abs(dark_hoppings[np.radians(85.0)][2].hoppings)
    assert j85[1] > 3.0 * np.max(j85[2:5])
    # the v = 2 coupling dies toward alpha = pi/2
    assert j85[2] < j45[2]


def test_band2_nnn_negative(dark_hoppings):
    assert dark_hoppings[0.0][2].hoppings[2].real < 0.0


def test_band_parity_sets_nnn_sign(dark_hoppings):
    fits = dark_hoppings[0.0]
    assert fits[1].hoppings[2].real > 0.0   # odd band
    assert fits[2].hoppings[2].real < 0.0   # even band


def test_sweep_alpha_table_structure():
    p = make_params(eps=0.1, n_q=32, n_bands=1)
    table = tb.sweep_alpha(p, [0.0, 0.3], 1, v_max=4, method="dark")
    assert table.axis == "alpha"
    assert len(table.fits) == 2
    assert table.fits[0].hoppings.shape == (5,)


def test_sweep_delta_table_structure():
    p = make_params(eps=0.1, n_q=16, n_bands=1, n_harmonics=32)
    table = tb.sweep_delta(p, [0.0, 100.0], 1, v_max=4, method="dark")
    assert table.axis == "delta"
    # the dark Hamiltonian carries no detuning: fits identical
    assert np.allclose(table.fits[0].hoppings, table.fits[1].hoppings)


def test_bracket_requires_sign_change():
    p = make_params(eps=0.1, n_q=16, n_bands=1, n_harmonics=32)
    with pytest.raises(tb.TightBindingError, match="change sign"):
        tb.bracket_sign_change(p, 2, 1, 0.0, 100.0, method="dark", v_max=4)
