"""Maximally localized multi-component Wannier functions.

A Wannier function centered at x = n a/2 is the phase-coherent sum
W_n(x) = N^{-1/2} sum_q e^{i chi_q} e^{-i q n a/2} psi^{(q)}(x) over a
uniform q grid of N points spanning the extended zone.  The per-q phase
chi_q is fixed by demanding that a projection of the Bloch function at
(or near) the localization center is real, following Kohn's
prescription.  Realness alone leaves a sign per q; it is resolved by
making the optimized projection real-positive for even n and
real-negative for odd n, which is exactly the choice under which the
translation rule
    W_{n,D_l}(x) = W_{D_l}(x - n a/2),
    W_{n,B/0}(x) = (-1)^n W_{B/0}(x - n a/2)
holds (a center-independent sign would instead attach a global (-1)^n
to every component).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import optical
from .bands import BlochBandSet
from .params import LatticeParams

FULL_COMPONENTS = ("D1", "D2", "B", "0")
DARK_COMPONENTS = ("D1", "D2")


class WannierError(RuntimeError):
    """Raised when the phase optimization is ill-defined."""


@dataclass(frozen=True)
class ProjectionVectors:
    """Ground-state superpositions used to optimize the Wannier phase."""

    nbar: np.ndarray
    nbar_perp: np.ndarray
    center: int
    alpha: float


def projection_vectors(n: int, p: LatticeParams) -> ProjectionVectors:
    """The unit vectors (|1> -+ (-1)^n |2> cos(alpha)) / sqrt(1+cos^2).

    nbar is the superposition featured in the second dark state near
    the barriers that confine the Wannier function centered at n a/2;
    nbar_perp is its orthogonal complement in the same plane.
    """
    c = np.cos(p.alpha)
    sign = 1.0 if n % 2 == 0 else -1.0
    norm = np.sqrt(1.0 + c * c)
    nbar = np.array([1.0, -sign * c, 0.0]) / norm
    nbar_perp = np.array([c, sign * 1.0, 0.0]) / norm
    return ProjectionVectors(nbar=nbar, nbar_perp=nbar_perp, center=n,
                             alpha=p.alpha)


@dataclass(frozen=True)
class WannierFunction:
    """Sampled multi-component Wannier function.

    comps[k] holds the complex samples of component components[k] on
    x_grid, which covers the full supercell of n_q half-cells; overlap
    integrals on this grid are exact Riemann sums for band-limited
    integrands.
    """

    band: int
    center: int
    method: str
    x_grid: np.ndarray
    comps: np.ndarray
    components: tuple[str, ...]
    n_q: int

    def norm(self) -> float:
        dx = self.x_grid[1] - self.x_grid[0]
        return float(np.sum(np.abs(self.comps) ** 2) * dx)


def overlaps(w1: WannierFunction, w2: WannierFunction) -> complex:
    """sum_Y integral conj(W1_Y) W2_Y dx on the common grid."""
    if w1.x_grid.shape != w2.x_grid.shape or not np.allclose(
            w1.x_grid, w2.x_grid):
        raise WannierError("Wannier functions sampled on different grids")
    if w1.components != w2.components:
        raise WannierError("component sets differ")
    dx = w1.x_grid[1] - w1.x_grid[0]
    return complex(np.sum(np.conj(w1.comps) * w2.comps) * dx)


def auto_method(s: int, alpha: float,
                lambda_threshold: float = np.radians(80.0)) -> str:
    """Method choice: center for odd bands, shifted for even bands,
    lambda-limit for even bands past the (heuristic) alpha threshold."""
    if s % 2 == 1:
        return "center"
    return "lambda-limit" if alpha > lambda_threshold else "shifted"


def _supercell_grid(p: LatticeParams, n_q: int, n_sub: int) -> np.ndarray:
    """Grid over the length n_q*a/2 supercell centered at x = 0.

    n_sub samples per half-cell; 2*n_sub per lattice constant must
    exceed twice the largest reconstructed wavenumber (in units 2*pi/a)
    for the Riemann quadrature of state products to be exact.
    """
    n_tot = n_q * n_sub
    half = 0.25 * p.a * n_q
    return -half + np.arange(n_tot) * (0.5 * p.a / n_sub)


def _phases(functional: np.ndarray, center: int,
            fallback_tol: float = 1e-10) -> np.ndarray:
    """Phase factors making (-1)^center * functional real positive."""
    sign = 1.0 if center % 2 == 0 else -1.0
    target = sign * functional
    phase = np.ones_like(target)
    good = np.abs(target) >= fallback_tol
    phase[good] = np.abs(target[good]) / target[good]
    if not np.all(good):
        if not np.any(good):
            raise WannierError("phase functional vanishes at every q")
        # isolated nodes in q are gauge artifacts: inherit a neighbor phase
        idx = np.flatnonzero(good)
        for j in np.flatnonzero(~good):
            phase[j] = phase[idx[np.argmin(np.abs(idx - j))]]
    return phase


def _g_at(bands: BlochBandSet, iq: int, s: int, x0: float) -> np.ndarray:
    """Periodic part g_j(x0) per channel from the Fourier coefficients."""
    st = bands.state(iq, s)
    return np.einsum("cn,cn->c", st.coeffs.astype(complex),
                     np.exp(1j * st.basis.momenta * x0))


def _accumulate(bands: BlochBandSet, s: int, weights: np.ndarray,
                x_grid: np.ndarray, n_sub: int) -> np.ndarray:
    """sum_q weights[iq] * psi^{(q)}(x) / sqrt(L) on the supercell grid.

    Each periodic part is evaluated once per lattice constant and tiled,
    so memory stays at a few arrays of the grid size.
    """
    p = bands.params
    n_per = 2 * n_sub
    x_cell = np.arange(n_per) * (p.a / n_per)
    n_tiles = len(x_grid) // n_per
    length = 0.5 * p.a * len(bands.q_grid)

    # grid offset of x_grid[0] relative to the [0, a) cell sampling
    off = (x_grid[0] / (p.a / n_per)) % n_per
    if abs(off - round(off)) > 1e-9:
        raise WannierError("supercell grid misaligned with the unit cell")
    off = int(round(off)) % n_per

    total = None
    for iq in range(len(bands.q_grid)):
        st = bands.state(iq, s)
        phases = np.exp(1j * np.multiply.outer(st.basis.momenta, x_cell))
        g_cell = np.einsum("cn,cnx->cx", st.coeffs.astype(complex), phases)
        g_tiled = np.roll(np.tile(g_cell, (1, n_tiles)), -off, axis=1)
        psi = g_tiled * np.exp(1j * st.q * x_grid)
        contrib = weights[iq] * psi
        total = contrib if total is None else total + contrib
    return total / np.sqrt(length)


def _functional(bands: BlochBandSet, s: int, n: int, method: str):
    """Kohn functional per q for the chosen optimization method."""
    p = bands.params
    vec = projection_vectors(n, p).nbar
    if method == "center":
        x0 = 0.5 * n * p.a
        shift = np.ones(len(bands.q_grid))
    elif method == "shifted":
        # fixed + sign of the +-a/4 alternative, recorded in metadata
        x0 = 0.5 * n * p.a + 0.25 * p.a
        shift = np.exp(1j * bands.q_grid * 0.25 * p.a)
    elif method == "lambda-limit":
        x0 = 0.5 * n * p.a + 0.25 * p.a
        shift = np.ones(len(bands.q_grid))
    else:
        raise WannierError(f"unknown method {method!r}")
    vals = np.empty(len(bands.q_grid), dtype=complex)
    for iq in range(len(bands.q_grid)):
        g = _g_at(bands, iq, s, x0)
        vals[iq] = vec[0] * g[1] + vec[1] * g[2]
    return vals * shift


def build_wannier(bands: BlochBandSet, s: int, n: int = 0,
                  method: str = "auto", n_sub: int = 256) -> WannierFunction:
    """Wannier function of band s centered at n a/2 from full-solver bands.

    method: "center" projects at the center (odd bands, small alpha),
    "shifted" a quarter period off center with the compensating
    e^{i q a/4} (even bands), "lambda-limit" centers the function
    between barriers (even bands as alpha -> pi/2), "auto" picks by
    band parity and alpha.  Components are resolved in the local
    internal frame (D1, D2, B, 0).
    """
    if bands.method != "full":
        raise WannierError("build_wannier needs full-solver bands")
    p = bands.params
    if method == "auto":
        method = auto_method(s, p.alpha)
    n_q = len(bands.q_grid)
    x_grid = _supercell_grid(p, n_q, n_sub)

    chi = _phases(_functional(bands, s, n, method), n)
    x_c = 0.5 * n * p.a + (0.25 * p.a if method == "lambda-limit" else 0.0)
    weights = chi * np.exp(-1j * bands.q_grid * x_c) / np.sqrt(n_q)
    psi = _accumulate(bands, s, weights, x_grid, n_sub)

    frame = optical.internal_frame(x_grid, p)
    comps = np.empty((4, len(x_grid)), dtype=complex)
    comps[0] = np.sum(frame.dark1 * psi[1:], axis=0)
    comps[1] = np.sum(frame.dark2 * psi[1:], axis=0)
    comps[2] = np.sum(frame.bright * psi[1:], axis=0)
    comps[3] = psi[0]
    return WannierFunction(band=s, center=n, method=method, x_grid=x_grid,
                           comps=comps, components=FULL_COMPONENTS, n_q=n_q)


def adiabatic_wannier(bands: BlochBandSet, s: int, n: int = 0,
                      n_sub: int = 256) -> WannierFunction:
    """Two-component Wannier function from the dark-state solver.

    The optimized quantity is W_{D1} at the center for odd bands and
    W_{D1} + W_{D2} a quarter period off center for even bands.  Both
    dark channels are a/2-periodic, so translated centers need no
    parity sign here.
    """
    if bands.method != "dark":
        raise WannierError("adiabatic_wannier needs dark-solver bands")
    p = bands.params
    n_q = len(bands.q_grid)
    x_grid = _supercell_grid(p, n_q, n_sub)

    vals = np.empty(n_q, dtype=complex)
    for iq in range(n_q):
        st = bands.state(iq, s)
        if s % 2 == 1:
            x0 = 0.5 * n * p.a
            g = _g_at(bands, iq, s, x0)
            vals[iq] = g[0]
        else:
            x0 = 0.5 * n * p.a + 0.25 * p.a
            g = _g_at(bands, iq, s, x0)
            vals[iq] = (g[0] + g[1]) * np.exp(1j * st.q * 0.25 * p.a)
    chi = _phases(vals, 0)
    weights = chi * np.exp(-1j * bands.q_grid * 0.5 * n * p.a) / np.sqrt(n_q)
    comps = _accumulate(bands, s, weights, x_grid, n_sub)
    return WannierFunction(band=s, center=n, method="adiabatic",
                           x_grid=x_grid, comps=comps,
                           components=DARK_COMPONENTS, n_q=n_q)
