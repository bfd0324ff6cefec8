"""Closed-form optics of the tripod lattice.

Laser fields, mixing angles with analytic derivatives, the internal
bright/dark frame, the geometric vector and scalar potentials, the
sub-wavelength barrier and its Lorentzian-squared approximation, and the
spin-rotation angle gamma0 accumulated between adjacent barriers.

Everything is a pure function of (x, params); x may be a scalar or any
numpy array and is measured in units of the lattice constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import INV_TWO_MASS, K_LATTICE, LatticeParams


@dataclass(frozen=True)
class FieldSample:
    """Rabi frequencies at given positions, in E_R."""

    x: np.ndarray
    omega1: np.ndarray
    omega2: np.ndarray
    omega3: np.ndarray
    omega_tot: np.ndarray


@dataclass(frozen=True)
class MixingAngles:
    """Spherical angles of the Rabi vector and their exact derivatives."""

    x: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    dtheta: np.ndarray
    dphi: np.ndarray


@dataclass(frozen=True)
class InternalFrame:
    """Orthonormal bright/dark triad over the ground states {|1>,|2>,|3>}.

    Each member has shape (3,) + x.shape; the leading axis runs over the
    bare ground states.
    """

    x: np.ndarray
    bright: np.ndarray
    dark1: np.ndarray
    dark2: np.ndarray


@dataclass(frozen=True)
class GeometricPotentials:
    """Geometric potentials of the dark-state manifold.

    a_y    : coefficient phi' cos(theta) of sigma_y in the vector potential
    c1, c2 : phi' sin(theta) and -theta', the scalar-potential row vector
    v_mat  : (2, 2) + x.shape array, (1/2m) (c1, c2)^T (c1, c2) in E_R

    a_y and v_mat are periodic with period a/2; c1 and c2 individually
    flip sign under x -> x + a/2 (only their products are a/2-periodic).
    """

    x: np.ndarray
    a_y: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    v_mat: np.ndarray


def rabi(x, p: LatticeParams) -> FieldSample:
    """Evaluate the three Rabi frequencies and their quadrature sum."""
    x = np.asarray(x, dtype=float)
    k = K_LATTICE
    omega1 = np.full_like(x, p.omega_p)
    omega2 = p.omega_p * np.cos(k * x + p.alpha)
    omega3 = p.omega_c * np.sin(k * x)
    omega_tot = np.sqrt(omega1**2 + omega2**2 + omega3**2)
    return FieldSample(x, omega1, omega2, omega3, omega_tot)


def angles(x, p: LatticeParams) -> MixingAngles:
    """Mixing angles theta, phi and their analytic spatial derivatives.

    phi = arctan(Omega_2/Omega_1) stays on the branch (-pi/2, pi/2)
    because Omega_1 = Omega_p > 0, which keeps it continuous.  theta is
    in [0, pi]; sin(theta) >= eps/sqrt(1+eps^2) > 0 keeps dtheta regular.
    """
    x = np.asarray(x, dtype=float)
    k = K_LATTICE
    f = rabi(x, p)
    phi = np.arctan2(f.omega2, f.omega1)
    theta = np.arccos(f.omega3 / f.omega_tot)

    # dphi = (W2' W1 - W1' W2) / (W1^2 + W2^2) with W1' = 0
    c = np.cos(k * x + p.alpha)
    dphi = -k * np.sin(k * x + p.alpha) / (1.0 + c * c)

    # dtheta = -(d/dx)(W3/W) / sin(theta); P = W1^2 + W2^2
    pp = f.omega1**2 + f.omega2**2
    dp = -k * p.omega_p**2 * np.sin(2.0 * (k * x + p.alpha))
    ds = k * p.omega_c * np.cos(k * x)
    dtheta = -(ds * pp - 0.5 * f.omega3 * dp) / (f.omega_tot**2 * np.sqrt(pp))
    return MixingAngles(x, theta, phi, dtheta, dphi)


def internal_frame(x, p: LatticeParams) -> InternalFrame:
    """Bright state and the two dark states in the standard gauge.

    The first dark state depends on phi only; the bright/dark triad is
    orthonormal and the coupling operator annihilates both dark states.
    """
    ang = angles(x, p)
    st, ct = np.sin(ang.theta), np.cos(ang.theta)
    sp, cp = np.sin(ang.phi), np.cos(ang.phi)
    bright = np.stack([st * cp, st * sp, ct])
    dark1 = np.stack([sp, -cp, np.zeros_like(sp)])
    dark2 = np.stack([ct * cp, ct * sp, -st])
    return InternalFrame(ang.x, bright, dark1, dark2)


def geometric_potentials(x, p: LatticeParams) -> GeometricPotentials:
    """Exact geometric vector and scalar potentials of the dark manifold."""
    ang = angles(x, p)
    st, ct = np.sin(ang.theta), np.cos(ang.theta)
    a_y = ang.dphi * ct
    c1 = ang.dphi * st
    c2 = -ang.dtheta
    v_mat = INV_TWO_MASS * np.stack(
        [np.stack([c1 * c1, c1 * c2]), np.stack([c1 * c2, c2 * c2])]
    )
    return GeometricPotentials(ang.x, a_y, c1, c2, v_mat)


def eps_tilde(p: LatticeParams) -> float:
    """Effective probe/control ratio (eps/2) sqrt(cos(2 alpha) + 3)."""
    return 0.5 * p.eps * np.sqrt(np.cos(2.0 * p.alpha) + 3.0)


def barrier_width(p: LatticeParams) -> float:
    """Width parameter of the single-barrier profile, eps sqrt(1+cos^2 alpha).

    Expanding the exact barrier (theta')^2/2m around x = n a/2 gives
    exactly the profile of single_barrier() with this width, which is
    sqrt(2) times eps_tilde().  The two ratios agree in no limit; the
    sqrt(2) is kept explicit so either convention can be requested.
    """
    return np.sqrt(2.0) * eps_tilde(p)


def single_barrier(x, width: float) -> np.ndarray:
    """Lorentzian-squared barrier (k^2/2m) w^2 / (w^2 + k^2 x^2)^2."""
    x = np.asarray(x, dtype=float)
    kx = K_LATTICE * x
    return (K_LATTICE**2 * INV_TWO_MASS) * width**2 / (width**2 + kx * kx) ** 2


def barrier_exact(x, p: LatticeParams) -> np.ndarray:
    """Exact scalar barrier (theta')^2 / 2m from the closed form.

    Equivalent to INV_TWO_MASS * dtheta^2 from angles(); kept as an
    independent expression so the two can be cross-checked.
    """
    x = np.asarray(x, dtype=float)
    k = K_LATTICE
    e2 = p.eps**2
    num = (np.cos(k * x + 2.0 * p.alpha) + 3.0 * np.cos(k * x)) ** 2
    den = (np.cos(k * x + p.alpha) ** 2 + 1.0) * (
        e2 * np.cos(k * x + p.alpha) ** 2 + np.sin(k * x) ** 2 + e2
    ) ** 2
    return np.pi**2 * e2 * INV_TWO_MASS * num / den


def barrier_approx(x, p: LatticeParams, n_tail: int = 64,
                   width: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact barrier and its sum-of-Lorentzians approximation.

    Returns (v_exact, v_approx) where v_approx = sum_n v(x - n a/2) with
    the single_barrier profile.  The default width is barrier_width(p),
    which matches the exact profile near every barrier; pass
    width=eps_tilde(p) for the narrower convention.
    """
    x = np.asarray(x, dtype=float)
    if width is None:
        width = barrier_width(p)
    v_exact = barrier_exact(x, p)
    n0 = np.floor(2.0 * x / p.a)
    v_approx = np.zeros_like(x)
    for dn in range(-n_tail, n_tail + 1):
        v_approx += single_barrier(x - (n0 + dn) * 0.5 * p.a, width)
    return v_exact, v_approx


def gamma0(p: LatticeParams, n_x: int | None = None,
           return_error: bool = False):
    """Spin-rotation angle -int_0^{a/2} phi' cos(theta) dx.

    Composite Simpson quadrature on a uniform grid of n_x intervals
    (default p.n_x), with a Richardson half-grid comparison as the error
    estimate.  Returns the angle, or (angle, error_estimate) when
    return_error is True.
    """
    n = int(n_x if n_x is not None else p.n_x)
    n -= n % 2
    value = _gamma0_simpson(p, n)
    if not return_error:
        return value
    coarse = _gamma0_simpson(p, n // 2)
    return value, abs(value - coarse) / 15.0


def _gamma0_simpson(p: LatticeParams, n: int) -> float:
    xs = np.linspace(0.0, 0.5 * p.a, n + 1)
    ang = angles(xs, p)
    integrand = ang.dphi * np.cos(ang.theta)
    h = 0.5 * p.a / n
    weights = np.ones(n + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(-(h / 3.0) * np.dot(weights, integrand))


def gamma0_shortcut(p: LatticeParams) -> float:
    """Zero-order shortcut phi(0) - phi(a/2), dropping the cos(theta)."""
    ph0 = float(angles(0.0, p).phi)
    ph_half = float(angles(0.5 * p.a, p).phi)
    return ph0 - ph_half
