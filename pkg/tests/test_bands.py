import numpy as np
import pytest

from tripod import optical
from tripod.bands import (
    DarkPotentialTable,
    SolverError,
    assemble_dark_hamiltonian,
    assemble_full_hamiltonian,
    dark_bands,
    default_q_grid,
    full_bands,
    reconstruct_realspace,
)
from conftest import make_params


def test_default_q_grid_spans_extended_zone():
    p = make_params(n_q=32)
    qs = default_q_grid(p)
    assert len(qs) == 32
    assert qs[-1] == pytest.approx(2.0 * np.pi)
    assert qs[0] > -2.0 * np.pi
    assert np.allclose(np.diff(qs), 4.0 * np.pi / 32)


def test_full_hamiltonian_hermitian_without_decay():
    p = make_params(eps=0.1, alpha=0.4, delta=500.0, gamma=0.0)
    h, _ = assemble_full_hamiltonian(0.7, p)
    assert np.max(np.abs(h - h.conj().T)) < 1e-9 * np.max(np.abs(h))


def test_full_hamiltonian_decay_only_on_excited_channel():
    p = make_params(gamma=800.0)
    h, basis = assemble_full_hamiltonian(0.1, p)
    anti = h - h.conj().T
    npc = basis.n_per_channel
    block = anti[:npc, :npc]
    assert np.allclose(np.diag(block), -800.0j)
    anti[:npc, :npc] -= np.diag(np.diag(block))
    assert np.max(np.abs(anti)) < 1e-10 * p.omega_c


def test_decoupled_limit_recovers_free_dispersion():
    # vanishing fields: the lowest band is the folded free parabola over
    # the ground-channel wavenumber combs (the excited channel is detuned
    # away so the degenerate limit stays unambiguous)
    p = make_params(eps=0.5, omega_p=1e-6, delta=500.0, n_harmonics=8,
                    n_bands=1)
    qs = np.array([-2.5, 0.37, 1.8, 2.0 * np.pi])
    bs = full_bands(p, q_grid=qs)
    for iq, q in enumerate(qs):
        combs = [(q + 2 * np.pi * (2 * n + 1)) ** 2 for n in range(-4, 5)]
        combs += [(q + 4 * np.pi * n) ** 2 for n in range(-4, 5)]
        expected = min(combs) / np.pi**2
        assert bs.energies.real[iq, 0] == pytest.approx(expected, abs=1e-6)


def test_reconstruction_parity_and_parseval(fig1a_nq32):
    bs, _ = fig1a_nq32
    st = bs.state(5, 1)
    x = np.linspace(0.0, 1.0, 257)[:-1]
    psi = reconstruct_realspace(st, x)
    psi_shift = reconstruct_realspace(st, x + 0.5)
    g = psi * np.exp(-1j * st.q * x)
    g_shift = psi_shift * np.exp(-1j * st.q * (x + 0.5))
    signs = np.array([-1.0, -1.0, 1.0, 1.0])
    err = np.max(np.abs(g_shift - signs[:, None] * g))
    assert err < 1e-9
    # Parseval: cell average of the total density is the coefficient norm
    dense = np.linspace(0.0, 1.0, 2049)[:-1]
    psi_d = reconstruct_realspace(st, dense)
    assert np.mean(np.sum(np.abs(psi_d) ** 2, axis=0)) == \
        pytest.approx(1.0, abs=1e-9)


def test_dark_weight_of_low_bands(fig1a_nq32):
    # oracle: real-space projection onto the internal frame
    bs, _ = fig1a_nq32
    iq = 7
    st = bs.state(iq, 1)
    x = np.arange(4096) / 4096.0
    psi = reconstruct_realspace(st, x)
    frame = optical.internal_frame(x, bs.params)
    pop_d1 = np.mean(np.abs(np.sum(frame.dark1 * psi[1:], axis=0)) ** 2)
    pop_d2 = np.mean(np.abs(np.sum(frame.dark2 * psi[1:], axis=0)) ** 2)
    kernel = bs.populations[iq, 0]
    assert pop_d1 == pytest.approx(kernel[0], abs=1e-9)
    assert pop_d2 == pytest.approx(kernel[1], abs=1e-9)
    assert kernel[0] + kernel[1] > 0.99
    # populations of retained bands sum to one over the four components
    assert np.allclose(bs.populations.sum(axis=2), 1.0, atol=1e-9)


def test_imaginary_parts_nonpositive_with_decay(fig1a_nq32):
    bs, _ = fig1a_nq32
    assert np.max(bs.energies.imag) < 1e-10


def test_time_reversal_symmetry_small():
    p = make_params(eps=0.1, alpha=0.3, delta=0.0, gamma=0.0, n_q=16,
                    n_bands=4)
    bs = full_bands(p)
    n = len(bs.q_grid)
    worst = 0.0
    for j in range(n - 1):
        worst = max(worst, float(np.max(np.abs(
            bs.energies[j] - bs.energies[n - 2 - j]))))
    assert worst < 1e-9


def test_linewidth_hierarchy_and_loss_minima(fig1a_nq64):
    bs = fig1a_nq64
    e1 = bs.energies[:, 0]
    width1 = np.ptp(e1.real)
    assert np.max(np.abs(e1.imag)) / width1 < 0.1
    # band-1 losses are smallest near the double-well minima q a = +-pi
    qmin = bs.q_grid[np.argmin(np.abs(e1.imag))]
    assert min(abs(abs(qmin) - np.pi), abs(abs(qmin) - np.pi)) < 0.25
    # band-2 losses vanish toward the dispersion minimum at q = 0 (and its
    # zone-edge images)
    e2im = np.abs(bs.energies.imag[:, 1])
    iq0 = np.argmin(np.abs(bs.q_grid))
    assert e2im[iq0] < 0.2 * np.max(e2im)


def test_dark_bands_match_full_at_zero_detuning(delta0_sets):
    full, dark = delta0_sets[0.0]
    dev = np.max(np.abs(full.energies.real[:, 0] - dark.energies.real[:, 0]))
    assert dev < 0.05


def test_dark_free_particle_with_zero_potentials():
    p = make_params(n_harmonics=12, n_bands=6)
    n_fft = 64
    zeros = np.zeros(n_fft, dtype=complex)
    pots = DarkPotentialTable(ay=zeros, ay2=zeros, v11=zeros, v12=zeros,
                              v22=zeros)
    qs = np.array([0.4, -1.3])
    bs = dark_bands(p, q_grid=qs, pots=pots)
    for iq, q in enumerate(qs):
        free = sorted((q + 4 * np.pi * n) ** 2 / np.pi**2
                      for n in range(-12, 13))
        doubled = np.repeat(free, 2)[:p.n_bands]  # two identical channels
        assert bs.energies.real[iq] == pytest.approx(doubled, abs=1e-10)


def test_dark_hamiltonian_hermitian():
    p = make_params(eps=0.12, alpha=0.5)
    h, _ = assemble_dark_hamiltonian(0.9, p)
    assert np.max(np.abs(h - h.conj().T)) < 1e-10 * np.max(np.abs(h))


def test_aliasing_guard_fires_for_coarse_cutoff():
    p = make_params(eps=0.02, n_harmonics=8)
    with pytest.raises(SolverError, match="increase n_harmonics"):
        dark_bands(p, q_grid=[0.1])


def test_full_solver_reports_missing_bands():
    # demanding every basis state defeats the excited-weight filter
    p = make_params(n_harmonics=8, n_bands=4 * 17, gamma=100.0)
    with pytest.raises(SolverError, match="low-loss bands"):
        full_bands(p, q_grid=[0.2])


def test_threads_do_not_change_results():
    p = make_params(eps=0.1, alpha=0.2, delta=0.0, gamma=0.0, n_q=16,
                    n_bands=2, n_harmonics=16)
    a = full_bands(p, threads=1)
    b = full_bands(p, threads=2)
    assert np.array_equal(a.energies, b.energies)
