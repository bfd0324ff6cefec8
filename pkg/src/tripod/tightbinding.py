"""Hopping amplitudes from computed band dispersions.

The extended-zone dispersion of band s is the cosine series
E_q = J_0 + sum_v J_v cos(v q a / 2), so on a uniform q grid the
complex J_v follow from discrete cosine projections; the imaginary
parts carry the loss rates.  Sweeps over the standing-wave phase or the
detuning tabulate the J_v behind the brick-wall phenomenology.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .bands import BlochBandSet, dark_bands, full_bands
from .params import LatticeParams


class TightBindingError(ValueError):
    """Raised for grids unsuited to the cosine projection."""


@dataclass(frozen=True)
class HoppingFit:
    """Cosine-series fit of one band: J[v] multiplies cos(v q a/2)."""

    band: int
    hoppings: np.ndarray
    residual: float
    bandwidth: float


@dataclass(frozen=True)
class TightBindingTable:
    """Hopping fits along a parameter sweep.

    axis is "alpha" or "delta"; values[i] pairs with fits[i].
    """

    axis: str
    values: np.ndarray
    fits: tuple[HoppingFit, ...]
    band: int
    method: str


def extract_J(bands: BlochBandSet, s: int, v_max: int = 8) -> HoppingFit:
    """Project band s of a BlochBandSet onto the cosine series.

    Requires the uniform extended-zone grid produced by the solvers;
    J_0 is the mean, J_v = 2 <E_q cos(v q a/2)> for v >= 1.  The
    residual is the max over q of the reconstruction error.
    """
    qs = bands.q_grid
    steps = np.diff(qs)
    if qs.ndim != 1 or not np.allclose(steps, steps[0], rtol=0, atol=1e-12):
        raise TightBindingError("cosine projection needs a uniform q grid")
    if not 1 <= s <= bands.n_bands:
        raise TightBindingError(f"band {s} not present")
    if v_max >= len(qs) // 2:
        raise TightBindingError("v_max too large for this q grid")
    e = bands.energies[:, s - 1]
    a = bands.params.a
    hop = np.empty(v_max + 1, dtype=complex)
    hop[0] = np.mean(e)
    for v in range(1, v_max + 1):
        hop[v] = 2.0 * np.mean(e * np.cos(0.5 * v * qs * a))
    recon = rebuild_dispersion(hop, qs, a)
    residual = float(np.max(np.abs(e - recon)))
    bandwidth = float(np.ptp(e.real))
    return HoppingFit(band=s, hoppings=hop, residual=residual,
                      bandwidth=bandwidth)


def rebuild_dispersion(hoppings: np.ndarray, qs: np.ndarray,
                       a: float = 1.0) -> np.ndarray:
    """E_q from a hopping list: the round-trip of extract_J."""
    vs = np.arange(len(hoppings))
    return np.cos(0.5 * np.multiply.outer(qs * a, vs)) @ hoppings


def _band_solver(method: str) -> Callable[[LatticeParams], BlochBandSet]:
    if method == "full":
        return full_bands
    if method == "dark":
        return dark_bands
    raise TightBindingError(f"unknown band method {method!r}")


def sweep_alpha(p: LatticeParams, alphas, s: int, v_max: int = 8,
                method: str = "full") -> TightBindingTable:
    """extract_J of band s for each standing-wave phase in alphas."""
    solver = _band_solver(method)
    values = np.asarray(alphas, dtype=float)
    fits = []
    for alpha in values:
        bands = solver(replace(p, alpha=float(alpha)))
        fits.append(extract_J(bands, s, v_max))
    return TightBindingTable(axis="alpha", values=values, fits=tuple(fits),
                             band=s, method=method)


def sweep_delta(p: LatticeParams, deltas, s: int, v_max: int = 8,
                method: str = "full") -> TightBindingTable:
    """extract_J of band s for each detuning in deltas."""
    solver = _band_solver(method)
    values = np.asarray(deltas, dtype=float)
    fits = []
    for delta in values:
        bands = solver(replace(p, delta=float(delta)))
        fits.append(extract_J(bands, s, v_max))
    return TightBindingTable(axis="delta", values=values, fits=tuple(fits),
                             band=s, method=method)


def bracket_sign_change(p: LatticeParams, v: int, s: int,
                        delta_lo: float, delta_hi: float,
                        tol: float = 50.0, method: str = "full",
                        v_max: int = 8) -> tuple[float, float]:
    """Bisect the detuning at which Re J_v of band s changes sign.

    Returns the final (lo, hi) bracket with hi - lo <= 2*tol.  Raises
    TightBindingError when the endpoints do not straddle a sign change.
    """
    solver = _band_solver(method)

    def jv(delta: float) -> float:
        bands = solver(replace(p, delta=float(delta)))
        return float(extract_J(bands, s, v_max).hoppings[v].real)

    lo, hi = float(delta_lo), float(delta_hi)
    f_lo, f_hi = jv(lo), jv(hi)
    if f_lo == 0.0:
        return lo, lo
    if f_lo * f_hi > 0.0:
        raise TightBindingError(
            f"Re J_{v} does not change sign on [{delta_lo}, {delta_hi}]"
        )
    while hi - lo > 2.0 * tol:
        mid = 0.5 * (lo + hi)
        f_mid = jv(mid)
        if f_mid == 0.0:
            return mid, mid
        if f_lo * f_mid < 0.0:
            hi, f_hi = mid, f_mid
        else:
            lo, f_lo = mid, f_mid
    return lo, hi
