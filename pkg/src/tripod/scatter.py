"""Transfer-matrix dispersion within the dark-state manifold.

Away from the sub-wavelength barriers the spinor rotates by the angle
gamma0 between neighboring barriers, while the second dark state
scatters off each barrier with amplitudes t(E), r(E).  Collecting both
processes into the 4x4 one-cell transfer operator W_Q gives a linear
eigenvalue problem in exp(-i q a / 2) at fixed energy, so a single sweep
over the momentum Q yields every dispersion branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import optical
from .params import INV_TWO_MASS, K_LATTICE, LatticeParams


class ScatterError(ValueError):
    """Raised for invalid scattering inputs."""


@dataclass(frozen=True)
class ScatterAmplitudes:
    """Single-barrier transmission and reflection at energy E."""

    energy: float
    momentum: float
    t: complex
    r: complex
    validity: float  # a Q eps_eff / pi^2, small when the formula is accurate


def momentum_of_energy(energy) -> np.ndarray:
    """Q = sqrt(2 m E) in units 1/a; equals pi sqrt(E/E_R)."""
    return np.sqrt(np.asarray(energy, dtype=float) / INV_TWO_MASS)


def tr_amplitudes(energy: float, p: LatticeParams | None = None,
                  width: float | None = None) -> ScatterAmplitudes:
    """Barrier amplitudes t, r at energy E > 0.

    The width parameter defaults to barrier_width(p), the value that
    reproduces the exact barrier profile; |t|^2 + |r|^2 = 1 holds as an
    algebraic identity for any width.
    """
    if width is None:
        if p is None:
            raise ScatterError("need either params or an explicit width")
        width = optical.barrier_width(p)
    if not energy > 0.0:
        raise ScatterError("energy must be positive")
    q_mom = float(momentum_of_energy(energy))
    a = p.a if p is not None else 1.0
    strength = np.pi**2 / (a * q_mom * width)
    t = 1.0 / (-1.0 + 1j * strength)
    r = -1.0 / (1.0 - 1j / strength)
    return ScatterAmplitudes(energy=float(energy), momentum=q_mom,
                             t=complex(t), r=complex(r),
                             validity=1.0 / strength)


def barrier_matrix(t: complex, r: complex) -> np.ndarray:
    """2x2 transfer matrix of one barrier from its t, r amplitudes."""
    return np.array([
        [1.0 / t, np.conj(r) / np.conj(t)],
        [r / t, 1.0 / np.conj(t)],
    ])


def exact_tr(energies, width: float, x_cut: float = 0.6,
             n_steps: int = 8000) -> tuple[np.ndarray, np.ndarray]:
    """Numerically exact t(E), r(E) for the single Lorentzian-squared barrier.

    Integrates psi'' = 2m (v - E) psi from +x_cut to -x_cut with a
    fixed-step RK4, vectorized over all energies, and matches plane
    waves on both sides.  The closed-form amplitudes of tr_amplitudes
    are the leading asymptote of this result for a Q width / pi^2 -> 0;
    at band energies of a few E_R the asymptote is several percent off,
    which is why the dispersion solver defaults to this exact table.
    """
    from .params import TWO_MASS

    e = np.atleast_1d(np.asarray(energies, dtype=float))
    if np.any(e <= 0.0):
        raise ScatterError("energies must be positive")
    q = momentum_of_energy(e)
    psi = np.exp(1j * q * x_cut).astype(complex)
    dpsi = 1j * q * psi
    h = -2.0 * x_cut / n_steps
    x = x_cut

    def accel(xv, psiv):
        return TWO_MASS * (optical.single_barrier(xv, width) - e) * psiv

    for _ in range(n_steps):
        k1p, k1d = dpsi, accel(x, psi)
        k2p, k2d = dpsi + 0.5 * h * k1d, accel(x + 0.5 * h, psi + 0.5 * h * k1p)
        k3p, k3d = dpsi + 0.5 * h * k2d, accel(x + 0.5 * h, psi + 0.5 * h * k2p)
        k4p, k4d = dpsi + h * k3d, accel(x + h, psi + h * k3p)
        psi = psi + (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        dpsi = dpsi + (h / 6.0) * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        x += h

    # left side: psi = A e^{iQx} + B e^{-iQx}; incoming A, reflected B
    ep = np.exp(-1j * q * x_cut)
    a_amp = (dpsi + 1j * q * psi) / (2j * q * ep)
    b_amp = (1j * q * psi - dpsi) / (2j * q) * ep
    return 1.0 / a_amp, b_amp / a_amp


class AmplitudeTable:
    """Single-barrier amplitudes t(E), r(E) over an energy range.

    mode="exact" precomputes exact_tr on a dense grid and interpolates
    (cubic in real and imaginary parts); mode="formula" evaluates the
    closed-form asymptote of tr_amplitudes directly.
    """

    def __init__(self, width: float, e_max: float, mode: str = "exact",
                 e_min: float = 1e-3, n_grid: int = 512):
        from scipy.interpolate import CubicSpline

        self.width = float(width)
        self.mode = mode
        if mode == "exact":
            grid = np.linspace(e_min, 1.05 * e_max, n_grid)
            t, r = exact_tr(grid, width)
            self._t = CubicSpline(grid, t)
            self._r = CubicSpline(grid, r)
            self._range = (grid[0], grid[-1])
        elif mode == "formula":
            self._range = (0.0, np.inf)
        else:
            raise ScatterError(f"unknown amplitude mode {mode!r}")

    def __call__(self, energy: float) -> tuple[complex, complex]:
        if self.mode == "formula":
            amp = tr_amplitudes(energy, width=self.width)
            return amp.t, amp.r
        lo, hi = self._range
        if not (lo <= energy <= hi):
            raise ScatterError(f"energy {energy} outside amplitude table")
        return complex(self._t(energy)), complex(self._r(energy))


def _wq_from_parts(q_mom: float, a: float, gamma0: float,
                   t: complex, r: complex) -> np.ndarray:
    iq = np.diag([np.exp(-0.5j * q_mom * a), np.exp(0.5j * q_mom * a)])
    iqm = iq @ barrier_matrix(t, r)
    c, s = np.cos(gamma0), np.sin(gamma0)
    w = np.zeros((4, 4), dtype=complex)
    w[:2, :2] = c * iq
    w[:2, 2:] = s * iqm
    w[2:, :2] = -s * iq
    w[2:, 2:] = c * iqm
    return w


def build_WQ(q_mom: float, p: LatticeParams, gamma0: float | None = None,
             width: float | None = None) -> np.ndarray:
    """One-cell transfer operator W_Q, block form of the spin rotation.

    W_Q = exp(i gamma0 sigma_y) . blockdiag(I_Q, I_Q M) with
    I_Q = diag(e^{-i Q a/2}, e^{i Q a/2}); sigma_y acts on the two
    dark-state blocks.  Uses the closed-form amplitudes of Eq.-style
    tr_amplitudes; dispersion() can substitute exact ones.
    """
    if gamma0 is None:
        gamma0 = optical.gamma0(p)
    energy = q_mom**2 * INV_TWO_MASS
    amp = tr_amplitudes(energy, p, width=width)
    return _wq_from_parts(q_mom, p.a, gamma0, amp.t, amp.r)


def fold_extended(q) -> np.ndarray:
    """Fold quasi-momenta into the extended zone (-2*pi/a, 2*pi/a]."""
    edge = K_LATTICE
    folded = np.mod(np.asarray(q, dtype=float) + edge, 2.0 * edge) - edge
    return np.where(folded <= -edge + 1e-15, folded + 2.0 * edge, folded)


@dataclass(frozen=True)
class DispersionPointSet:
    """Unimodular-eigenvalue dispersion points from a Q sweep.

    Arrays are index-aligned: point i sits at quasi-momentum q[i] with
    energy e[i] = Q[i]^2/2m, belongs to branch branch[i], and came from
    a W_Q eigenvalue of modulus lambda_mod[i].
    """

    q_mom: np.ndarray
    e: np.ndarray
    q: np.ndarray
    branch: np.ndarray
    lambda_mod: np.ndarray
    gamma0: float
    width: float


def _group_branches(q_mom, qs, es, e_jump: float, q_jump: float) -> np.ndarray:
    """Greedy continuity grouping; points arrive ordered by Q."""
    branch = np.full(len(qs), -1, dtype=int)
    open_q: list[float] = []
    open_e: list[float] = []
    edge = K_LATTICE
    order = np.argsort(q_mom, kind="stable")
    for i in order:
        best, best_d = -1, np.inf
        for b, (bq, be) in enumerate(zip(open_q, open_e)):
            dq = abs(qs[i] - bq)
            dq = min(dq, 2.0 * edge - dq)  # zone-edge wrap
            de = abs(es[i] - be)
            if dq <= q_jump and de <= e_jump:
                d = dq / q_jump + de / e_jump
                if d < best_d:
                    best, best_d = b, d
        if best < 0:
            open_q.append(qs[i])
            open_e.append(es[i])
            branch[i] = len(open_q) - 1
        else:
            branch[i] = best
            open_q[best] = qs[i]
            open_e[best] = es[i]
    return branch


def _resolve_amplitudes(energies: np.ndarray, width: float, amplitudes: str):
    if amplitudes == "exact":
        return exact_tr(energies, width)
    if amplitudes == "formula":
        ts, rs = [], []
        for e in energies:
            amp = tr_amplitudes(float(e), width=width)
            ts.append(amp.t)
            rs.append(amp.r)
        return np.array(ts), np.array(rs)
    raise ScatterError(f"unknown amplitude mode {amplitudes!r}")


def dispersion(p: LatticeParams, q_mom_grid, gamma0: float | None = None,
               width: float | None = None, amplitudes: str = "exact",
               unimodular_tol: float = 1e-6,
               e_jump: float = 0.1, q_jump: float = 0.2,
               ) -> DispersionPointSet:
    """Sweep Q, keep unimodular W_Q eigenvalues, convert phases to q.

    Eigenvalues with ||lambda| - 1| < unimodular_tol map to
    q = -(2/a) Arg(lambda), folded into the extended zone; all others
    are evanescent and dropped.  Residuals ||W v - lambda v|| of kept
    pairs are checked against 1e-8.  amplitudes selects exact numeric
    t, r (default) or the closed-form asymptote.
    """
    if gamma0 is None:
        gamma0 = optical.gamma0(p)
    if width is None:
        width = optical.barrier_width(p)
    q_moms = np.asarray(q_mom_grid, dtype=float)
    if np.any(q_moms <= 0.0):
        raise ScatterError("Q grid must be positive")
    energies = q_moms**2 * INV_TWO_MASS
    t_arr, r_arr = _resolve_amplitudes(energies, width, amplitudes)

    qm_list, q_list, e_list, mod_list = [], [], [], []
    for q_mom, energy, t, r in zip(q_moms, energies, t_arr, r_arr):
        w = _wq_from_parts(q_mom, p.a, gamma0, t, r)
        lam, vec = np.linalg.eig(w)
        keep = np.abs(np.abs(lam) - 1.0) < unimodular_tol
        if not np.any(keep):
            continue
        resid = np.linalg.norm(w @ vec - vec * lam, axis=0)
        if np.max(resid[keep]) > 1e-8:
            raise ScatterError(
                f"transfer-matrix residual {np.max(resid[keep]):.2e} at Q={q_mom}"
            )
        qs = fold_extended(-2.0 / p.a * np.angle(lam[keep]))
        for qq, lm in zip(qs, np.abs(lam[keep])):
            qm_list.append(q_mom)
            q_list.append(qq)
            e_list.append(energy)
            mod_list.append(lm)
    qm = np.array(qm_list)
    qs = np.array(q_list)
    es = np.array(e_list)
    branch = _group_branches(qm, qs, es, e_jump, q_jump)
    return DispersionPointSet(q_mom=qm, e=es, q=qs, branch=branch,
                              lambda_mod=np.array(mod_list),
                              gamma0=float(gamma0), width=float(width))


def reduced_dispersion_alpha0(p: LatticeParams, q_mom_grid,
                              width: float | None = None,
                              amplitudes: str = "formula",
                              unimodular_tol: float = 1e-6,
                              ) -> DispersionPointSet:
    """Reduced 2x2 eigenproblem -I_Q^2 M psi = e^{-i q a} psi.

    Valid in the gamma0 = pi/2 limit (alpha near 0), where the second
    dark state scatters at every other barrier only.  Each solution of
    the period-a problem appears twice in the extended zone, at q and
    q + 2*pi/a.
    """
    if width is None:
        width = optical.barrier_width(p)
    q_moms = np.asarray(q_mom_grid, dtype=float)
    if np.any(q_moms <= 0.0):
        raise ScatterError("Q grid must be positive")
    energies = q_moms**2 * INV_TWO_MASS
    t_arr, r_arr = _resolve_amplitudes(energies, width, amplitudes)

    qm_list, q_list, e_list, mod_list = [], [], [], []
    for q_mom, energy, t, r in zip(q_moms, energies, t_arr, r_arr):
        iq = np.diag([np.exp(-0.5j * q_mom * p.a), np.exp(0.5j * q_mom * p.a)])
        mat = -iq @ iq @ barrier_matrix(t, r)
        lam = np.linalg.eigvals(mat)
        keep = np.abs(np.abs(lam) - 1.0) < unimodular_tol
        base = -np.angle(lam[keep]) / p.a
        for q0, lm in zip(base, np.abs(lam[keep])):
            for shift in (0.0, K_LATTICE):  # twice-degenerate in the zone
                qm_list.append(q_mom)
                q_list.append(float(fold_extended(q0 + shift)))
                e_list.append(energy)
                mod_list.append(lm)
    qm = np.array(qm_list)
    qs = np.array(q_list)
    es = np.array(e_list)
    branch = _group_branches(qm, qs, es, 0.1, 0.2)
    return DispersionPointSet(q_mom=qm, e=es, q=qs, branch=branch,
                              lambda_mod=np.array(mod_list),
                              gamma0=0.5 * np.pi, width=float(width))


def energies_at_q(p: LatticeParams, q: float, e_lo: float, e_hi: float,
                  gamma0: float | None = None, width: float | None = None,
                  amplitudes: str = "exact", n_scan: int = 400,
                  table: AmplitudeTable | None = None,
                  mod_tol: float = 1e-3) -> np.ndarray:
    """Scattering band energies at a fixed quasi-momentum q.

    Scans the energy window for sign changes of the phase mismatch
    between the unimodular W_Q eigenvalues and exp(-i q a/2), then
    refines each root with brentq.  Used for pointwise method
    comparisons, where sweep-and-regroup interpolation is too coarse.
    mod_tol is looser than the sweep default because propagating
    eigenvalues approach the unit circle only gradually near band edges.
    """
    from scipy.optimize import brentq

    if gamma0 is None:
        gamma0 = optical.gamma0(p)
    if width is None:
        width = optical.barrier_width(p)
    if table is None:
        table = AmplitudeTable(width, e_hi, mode=amplitudes)
    mu = np.exp(-0.5j * q * p.a)

    def mismatch(energy: float):
        t, r = table(energy)
        q_mom = float(momentum_of_energy(energy))
        lam = np.linalg.eigvals(_wq_from_parts(q_mom, p.a, gamma0, t, r))
        lam = lam[np.abs(np.abs(lam) - 1.0) < mod_tol]
        if lam.size == 0:
            return None
        d = np.angle(lam * np.conj(mu))
        return float(d[np.argmin(np.abs(d))])

    grid = np.linspace(max(e_lo, 1e-3), e_hi, n_scan)
    vals = [mismatch(e) for e in grid]
    roots = []
    for i in range(len(grid) - 1):
        va, vb = vals[i], vals[i + 1]
        if va is None or vb is None:
            continue
        # restrict to small mismatches so +-pi wraps do not fake roots
        if abs(va) < 1.0 and abs(vb) < 1.0 and va * vb <= 0.0 and va != vb:
            try:
                roots.append(brentq(mismatch, grid[i], grid[i + 1], xtol=1e-10))
            except ValueError:
                continue
    return np.array(sorted(roots))


def branch_energies_at(points: DispersionPointSet, q: float) -> np.ndarray:
    """Interpolated branch energies at quasi-momentum q.

    Within each branch the points trace a single-valued E(q) curve, so a
    per-branch linear interpolation is well defined wherever the branch
    covers q.  Returns the (possibly empty) array of energies.
    """
    out = []
    for b in np.unique(points.branch):
        mask = points.branch == b
        if np.count_nonzero(mask) < 2:
            continue
        bq = points.q[mask]
        be = points.e[mask]
        order = np.argsort(bq)
        bq, be = bq[order], be[order]
        if bq[0] - 1e-12 <= q <= bq[-1] + 1e-12:
            out.append(np.interp(q, bq, be))
    return np.array(out)
