"""Bloch band solvers: full four-channel and adiabatic dark-state.

Both solvers assemble H(q) in the symmetry-adapted plane-wave basis over
the extended Brillouin zone (-2*pi/a, 2*pi/a] and diagonalize per q.
The full solver keeps, at every q, the low-lying bands that live in the
dark manifold: eigenpairs are filtered by their excited-state weight
before sorting by the real part of the energy.  Without that filter the
retained window would be flooded by the strongly light-shifted
bright/excited dressed bands, which at the parameters of interest sit
thousands of recoil energies below the dark bands and carry linewidths
of order Gamma.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import optical
from .eigen import (
    DARK_CHANNELS,
    FULL_CHANNELS,
    PlaneWaveBasis,
    build_basis,
    eig_dense,
)
from .params import INV_TWO_MASS, K_LATTICE, LatticeParams

DEFAULT_EXCITED_WEIGHT_MAX = 0.25


class SolverError(RuntimeError):
    """Raised when a band solve cannot satisfy its contract."""


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, then TRIPOD_THREADS, then cores."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("TRIPOD_THREADS")
    if env:
        return max(1, int(env))
    return max(1, min(8, os.cpu_count() or 1))


def default_q_grid(p: LatticeParams, n_q: int | None = None) -> np.ndarray:
    """Uniform n_q-point grid over (-2*pi/a, 2*pi/a], endpoint included."""
    n = int(n_q if n_q is not None else p.n_q)
    edge = K_LATTICE / p.a  # 2*pi/a, the extended-zone boundary
    return -edge + 2.0 * edge * (np.arange(1, n + 1)) / n


@dataclass(frozen=True)
class SpinorBlochState:
    """Fourier coefficients of one Bloch state, unit 2-norm."""

    q: float
    s: int
    energy: complex
    basis: PlaneWaveBasis
    coeffs: np.ndarray  # (n_channels, n_per_channel)


@dataclass(frozen=True)
class BlochBandSet:
    """Band energies, states and populations on a quasi-momentum grid.

    energies[iq, s-1] is the complex band energy E_{q,s}; coeffs[iq, s-1]
    the flattened eigenvector; populations[iq, s-1] the weights on
    (D1, D2, B, 0).  method is "full" or "dark".
    """

    q_grid: np.ndarray
    energies: np.ndarray
    coeffs: np.ndarray
    populations: np.ndarray
    method: str
    params: LatticeParams

    @property
    def n_bands(self) -> int:
        return self.energies.shape[1]

    def basis(self, q: float) -> PlaneWaveBasis:
        channels = FULL_CHANNELS if self.method == "full" else DARK_CHANNELS
        return build_basis(q, self.params, channels)

    def state(self, iq: int, s: int) -> SpinorBlochState:
        """Bloch state of band s (1-based) at grid index iq."""
        basis = self.basis(float(self.q_grid[iq]))
        vec = self.coeffs[iq, s - 1].reshape(len(basis.channels), -1)
        return SpinorBlochState(q=float(self.q_grid[iq]), s=s,
                                energy=complex(self.energies[iq, s - 1]),
                                basis=basis, coeffs=vec)


# ---------------------------------------------------------------------------
# full four-channel problem


def assemble_full_hamiltonian(q: float, p: LatticeParams):
    """H(q) for the four-channel problem; returns (matrix, basis).

    Diagonal: kinetic (q + k_n)^2 / 2m per channel plus the excited-channel
    shift -delta - i gamma/2.  Couplings are the exact Fourier components
    of Omega_j(x)/2: a single one for the constant probe, two (at +-2pi/a)
    for each standing wave.
    """
    basis = build_basis(q, p, FULL_CHANNELS)
    npc = basis.n_per_channel
    dim = basis.size
    h = np.zeros((dim, dim), dtype=complex)

    kin = INV_TWO_MASS * (q + basis.momenta) ** 2
    h[np.arange(dim), np.arange(dim)] = kin.ravel()
    s0 = basis.channel_slice(0)
    h[s0, s0] += (-p.delta - 0.5j * p.gamma) * np.eye(npc)

    idx = np.arange(npc)
    s1, s2, s3 = (basis.channel_slice(c) for c in (1, 2, 3))

    def couple(block_rows, block_cols, offsets_values):
        # offsets_values: iterable of (d, value) placing value at m = n + d
        for d, value in offsets_values:
            m = idx[(idx + d >= 0) & (idx + d < npc)]
            h[block_rows.start + m + d, block_cols.start + m] += value
            h[block_cols.start + m, block_rows.start + m + d] += np.conj(value)

    # probe Omega_1/2: constant, momentum-diagonal between channels 0 and 1
    couple(s0, s1, [(0, 0.5 * p.omega_p)])
    # probe Omega_2/2 = (omega_p/4)(e^{i alpha} e^{ikx} + e^{-i alpha} e^{-ikx})
    couple(s0, s2, [(0, 0.25 * p.omega_p * np.exp(1j * p.alpha)),
                    (-1, 0.25 * p.omega_p * np.exp(-1j * p.alpha))])
    # control Omega_3/2 = (omega_c/4i)(e^{ikx} - e^{-ikx})
    couple(s0, s3, [(0, -0.25j * p.omega_c),
                    (-1, 0.25j * p.omega_c)])
    return h, basis


@lru_cache(maxsize=8)
def _dark_projection_kernels(eps: float, alpha: float, n_harmonics: int,
                             n_pop: int = 4096):
    """Quadratic-form kernels giving dark-state weights of full eigenvectors.

    K_Y[(i,m),(j,n)] is the Fourier coefficient of Y_i(x) Y_j(x) at the
    momentum difference of ground-channel basis functions (i,m), (j,n),
    so pop_Y = v_g^H K_Y v_g for the ground block v_g of a unit vector.
    """
    p = LatticeParams(eps=eps, omega_p=1.0, alpha=alpha, delta=0.0,
                      gamma=0.0, n_harmonics=n_harmonics)
    xs = np.arange(n_pop) / n_pop * p.a
    frame = optical.internal_frame(xs, p)

    n = np.arange(-n_harmonics, n_harmonics + 1)
    # integer wavenumbers (units 2*pi/a) of the ground channels 1, 2, 3
    kints = [2 * n + 1, 2 * n, 2 * n]
    diff = [[ki[:, None] - kj[None, :] for kj in kints] for ki in kints]

    kernels = []
    for vec in (frame.dark1, frame.dark2):
        fhat = np.fft.fft(vec[:, None, :] * vec[None, :, :], axis=-1) / n_pop
        npc = len(n)
        kern = np.zeros((3 * npc, 3 * npc), dtype=complex)
        for i in range(3):
            for j in range(3):
                kern[i * npc:(i + 1) * npc, j * npc:(j + 1) * npc] = \
                    fhat[i, j][diff[i][j] % n_pop]
        kernels.append(kern)
    return tuple(kernels)


def _full_populations(vecs: np.ndarray, p: LatticeParams) -> np.ndarray:
    """Weights (D1, D2, B, 0) of unit-norm column vectors, shape (ncol, 4)."""
    npc = 2 * p.n_harmonics + 1
    k1, k2 = _dark_projection_kernels(p.eps, p.alpha, p.n_harmonics)
    ground = vecs[npc:, :]
    pop_ground = np.sum(np.abs(ground) ** 2, axis=0)
    pop_0 = np.sum(np.abs(vecs[:npc, :]) ** 2, axis=0)
    pop_d1 = np.real(np.sum(np.conj(ground) * (k1 @ ground), axis=0))
    pop_d2 = np.real(np.sum(np.conj(ground) * (k2 @ ground), axis=0))
    pop_b = pop_ground - pop_d1 - pop_d2
    return np.stack([pop_d1, pop_d2, pop_b, pop_0], axis=1)


def _solve_full_single(q: float, p: LatticeParams, excited_weight_max: float):
    h, basis = assemble_full_hamiltonian(q, p)
    res = eig_dense(h, hermitian=(p.gamma == 0.0), compute_residuals=False)
    npc = basis.n_per_channel
    pop_0 = np.sum(np.abs(res.eigenvectors[:npc, :]) ** 2, axis=0)
    keep = np.flatnonzero(pop_0 <= excited_weight_max)
    if keep.size < p.n_bands:
        raise SolverError(
            f"only {keep.size} low-loss bands at q={q:.4f}; "
            f"need n_bands={p.n_bands}"
        )
    keep = keep[:p.n_bands]  # eigenvalues are already sorted by real part
    vecs = res.eigenvectors[:, keep]
    pops = _full_populations(vecs, p)
    return res.eigenvalues[keep], vecs.T, pops


def full_bands(p: LatticeParams, q_grid=None, threads: int | None = None,
               excited_weight_max: float = DEFAULT_EXCITED_WEIGHT_MAX,
               ) -> BlochBandSet:
    """Exact bands of the four-channel Hamiltonian over the extended 1BZ."""
    qs = np.asarray(q_grid if q_grid is not None else default_q_grid(p),
                    dtype=float)
    nw = resolve_threads(threads)

    def work(q):
        return _solve_full_single(q, p, excited_weight_max)

    if nw > 1 and qs.size > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(work, qs))
    else:
        results = [work(q) for q in qs]

    energies = np.array([r[0] for r in results])
    coeffs = np.array([r[1] for r in results])
    pops = np.array([r[2] for r in results])
    return BlochBandSet(q_grid=qs, energies=energies, coeffs=coeffs,
                        populations=pops, method="full", params=p)


# ---------------------------------------------------------------------------
# adiabatic dark-state problem


@dataclass(frozen=True)
class DarkPotentialTable:
    """Fourier data of the geometric potentials on the a/2 period.

    Coefficient index l corresponds to exp(i 4*pi*l*x/a).  v11/v12/v22
    already include the 1/2m factor; ay2 is the square of the bare a_y.
    """

    ay: np.ndarray
    ay2: np.ndarray
    v11: np.ndarray
    v12: np.ndarray
    v22: np.ndarray

    @property
    def n_fft(self) -> int:
        return self.ay.size


@lru_cache(maxsize=8)
def dark_potential_table(eps: float, alpha: float, n_x: int,
                         a: float = 1.0) -> DarkPotentialTable:
    """FFT of a_y, a_y^2 and the scalar-potential entries over [0, a/2)."""
    p = LatticeParams(eps=eps, omega_p=1.0, alpha=alpha, delta=0.0, gamma=0.0,
                      a=a, n_x=n_x)
    n = n_x // 2
    xs = np.arange(n) / n * (0.5 * a)
    g = optical.geometric_potentials(xs, p)

    def coeff(samples):
        return np.fft.fft(samples) / n

    return DarkPotentialTable(
        ay=coeff(g.a_y),
        ay2=coeff(g.a_y**2),
        v11=coeff(g.v_mat[0, 0]),
        v12=coeff(g.v_mat[0, 1]),
        v22=coeff(g.v_mat[1, 1]),
    )


def _check_dark_aliasing(pots: DarkPotentialTable, n_harmonics: int) -> None:
    n = pots.n_fft
    cutoff = 2 * n_harmonics
    idx = np.fft.fftfreq(n, d=1.0 / n).astype(int)
    tail = np.abs(idx) > cutoff
    for name in ("v11", "v12", "v22"):
        c = getattr(pots, name)
        total = float(np.sum(np.abs(c) ** 2))
        if total == 0.0:
            continue
        frac = float(np.sum(np.abs(c[tail]) ** 2)) / total
        if frac > 1e-6:
            raise SolverError(
                f"{name} carries {frac:.2e} relative Fourier weight beyond "
                f"the plane-wave cutoff; increase n_harmonics"
            )


def assemble_dark_hamiltonian(q: float, p: LatticeParams,
                              pots: DarkPotentialTable | None = None):
    """H_D(q) = (1/2m)(-i d/dx - A)^2 + V in the a/2-periodic basis.

    The vector-potential cross term is the symmetrized p.A + A.p; all
    potential matrix elements come from the Fourier table, which may be
    injected (e.g. zeroed) for testing.  Returns (matrix, basis).
    """
    if pots is None:
        pots = dark_potential_table(p.eps, p.alpha, p.n_x, p.a)
    basis = build_basis(q, p, DARK_CHANNELS)
    npc = basis.n_per_channel
    n_fft = pots.n_fft

    lint = np.arange(-p.n_harmonics, p.n_harmonics + 1)
    diff = (lint[:, None] - lint[None, :]) % n_fft
    kvals = q + basis.momenta[0]
    ksum = kvals[:, None] + kvals[None, :]

    ay = pots.ay[diff]
    kin = np.diag(INV_TWO_MASS * kvals**2) + INV_TWO_MASS * pots.ay2[diff]
    cross = INV_TWO_MASS * ksum * ay  # from -(p.A + A.p), before sigma_y

    h = np.zeros((2 * npc, 2 * npc), dtype=complex)
    h[:npc, :npc] = kin + pots.v11[diff]
    h[npc:, npc:] = kin + pots.v22[diff]
    h[:npc, npc:] = 1j * cross + pots.v12[diff]   # -(sigma_y)_{12} = +i
    h[npc:, :npc] = -1j * cross + pots.v12[diff]
    return h, basis


def dark_bands(p: LatticeParams, q_grid=None, threads: int | None = None,
               pots: DarkPotentialTable | None = None) -> BlochBandSet:
    """Bands of the projected two-component dark-state Hamiltonian."""
    qs = np.asarray(q_grid if q_grid is not None else default_q_grid(p),
                    dtype=float)
    if pots is None:
        pots = dark_potential_table(p.eps, p.alpha, p.n_x, p.a)
        _check_dark_aliasing(pots, p.n_harmonics)
    npc = 2 * p.n_harmonics + 1
    if p.n_bands > 2 * npc:
        raise SolverError("n_bands exceeds the dark-sector basis size")
    nw = resolve_threads(threads)

    def work(q):
        h, _ = assemble_dark_hamiltonian(q, p, pots)
        res = eig_dense(h, hermitian=True, compute_residuals=False)
        w = res.eigenvalues[:p.n_bands]
        v = res.eigenvectors[:, :p.n_bands]
        pop_d1 = np.sum(np.abs(v[:npc, :]) ** 2, axis=0)
        pops = np.stack([pop_d1, 1.0 - pop_d1,
                         np.zeros_like(pop_d1), np.zeros_like(pop_d1)], axis=1)
        return w, v.T, pops

    if nw > 1 and qs.size > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(work, qs))
    else:
        results = [work(q) for q in qs]

    energies = np.array([r[0] for r in results])
    coeffs = np.array([r[1] for r in results])
    pops = np.array([r[2] for r in results])
    return BlochBandSet(q_grid=qs, energies=energies, coeffs=coeffs,
                        populations=pops, method="dark", params=p)


def reorder_by_continuity(bands: BlochBandSet) -> BlochBandSet:
    """Relabel bands along q by eigenvector-overlap continuity.

    The default band index counts sorted real parts at each q, which
    swaps characters wherever bands cross; this optional pass assigns
    each q-point's states to the labels of the previous point by
    maximizing the total squared overlap (Hungarian assignment).
    """
    from scipy.optimize import linear_sum_assignment

    energies = bands.energies.copy()
    coeffs = bands.coeffs.copy()
    pops = bands.populations.copy()
    for iq in range(1, len(bands.q_grid)):
        prev = coeffs[iq - 1]
        cur = coeffs[iq]
        overlap = np.abs(prev.conj() @ cur.T) ** 2
        _, perm = linear_sum_assignment(-overlap)
        energies[iq] = energies[iq, perm]
        coeffs[iq] = coeffs[iq, perm]
        pops[iq] = pops[iq, perm]
    return BlochBandSet(q_grid=bands.q_grid, energies=energies,
                        coeffs=coeffs, populations=pops,
                        method=bands.method, params=bands.params)


def reconstruct_realspace(state: SpinorBlochState, x_grid) -> np.ndarray:
    """Channel amplitudes psi_j(x) = sum_n c_{jn} exp(i (q + k_n) x).

    Normalized so that the cell average of sum_j |psi_j|^2 over one
    lattice constant equals 1 (Parseval for a unit coefficient vector).
    """
    x = np.asarray(x_grid, dtype=float)
    phases = np.exp(1j * np.multiply.outer(state.q + state.basis.momenta, x))
    return np.einsum("cn,cnx->cx", state.coeffs.astype(complex), phases)
