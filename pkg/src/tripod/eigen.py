"""Dense complex eigendecomposition and symmetry-adapted plane-wave bases.

The extended Brillouin zone (-2*pi/a, 2*pi/a] comes from the combined
half-period shift symmetry: channels that are even under it expand in
wavenumbers 4*pi*n/a, odd channels in 2*pi*(2n+1)/a.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import K_LATTICE, LatticeParams

MAX_DIM = 4096

PERIODIC = "periodic"
ANTIPERIODIC = "antiperiodic"

# Channel layouts for the two eigenproblems: (name, parity under the
# combined a/2 shift).  The excited and first ground channel are odd,
# the other two ground channels even; both dark channels are even.
FULL_CHANNELS = (
    ("0", ANTIPERIODIC),
    ("1", ANTIPERIODIC),
    ("2", PERIODIC),
    ("3", PERIODIC),
)
DARK_CHANNELS = (
    ("D1", PERIODIC),
    ("D2", PERIODIC),
)


class EigenError(RuntimeError):
    """Raised when the dense eigensolver fails or its input is invalid."""


class BasisError(ValueError):
    """Raised for quasi-momenta outside the extended Brillouin zone."""


@dataclass(frozen=True)
class PlaneWaveBasis:
    """Plane-wave basis at one quasi-momentum.

    momenta has shape (n_channels, 2*n_harmonics + 1); row c lists the
    wavenumbers k_n of channel c, so basis function (c, n) is
    exp(i (q + k_n) x) on that channel.  Flattened indexing is
    channel-major: index = c * n_per_channel + n.
    """

    q: float
    channels: tuple[str, ...]
    parities: tuple[str, ...]
    momenta: np.ndarray

    @property
    def n_per_channel(self) -> int:
        return self.momenta.shape[1]

    @property
    def size(self) -> int:
        return self.momenta.size

    def channel_slice(self, c: int) -> slice:
        n = self.n_per_channel
        return slice(c * n, (c + 1) * n)


def build_basis(q: float, p: LatticeParams, channels) -> PlaneWaveBasis:
    """Construct the channel-tagged momentum lists for quasi-momentum q."""
    edge = K_LATTICE / p.a  # 2*pi/a
    if not (-edge - 1e-12 < q <= edge + 1e-12):
        raise BasisError(f"q = {q} outside the extended 1BZ (-2pi/a, 2pi/a]")
    n = np.arange(-p.n_harmonics, p.n_harmonics + 1)
    rows = []
    for _, parity in channels:
        if parity == PERIODIC:
            rows.append(2.0 * K_LATTICE * n / p.a)
        elif parity == ANTIPERIODIC:
            rows.append(K_LATTICE * (2 * n + 1) / p.a)
        else:
            raise ValueError(f"unknown parity tag {parity!r}")
    names = tuple(name for name, _ in channels)
    parities = tuple(par for _, par in channels)
    return PlaneWaveBasis(q=float(q), channels=names, parities=parities,
                          momenta=np.array(rows))


@dataclass(frozen=True)
class EigenResult:
    """Spectrum of one dense matrix.

    eigenvalues sorted by (real part, imaginary part); eigenvectors are
    unit-norm columns with the largest-magnitude component made real and
    positive; residuals[i] = ||H v_i - w_i v_i||_2.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray


def eig_dense(matrix: np.ndarray, hermitian: bool = False,
              compute_residuals: bool = True) -> EigenResult:
    """Full spectrum of a dense complex matrix with deterministic gauge.

    hermitian=True routes to the (much faster) Hermitian solver; the
    caller asserts the property, it is not checked.  Raises EigenError
    on non-finite input, oversized matrices, or LAPACK non-convergence.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise EigenError(f"matrix must be square, got shape {a.shape}")
    if a.shape[0] > MAX_DIM:
        raise EigenError(f"dimension {a.shape[0]} exceeds MAX_DIM={MAX_DIM}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise EigenError("matrix has non-finite entries")
    try:
        if hermitian:
            w, v = np.linalg.eigh(a)
            w = w.astype(complex)
        else:
            w, v = np.linalg.eig(a)
    except np.linalg.LinAlgError as exc:
        raise EigenError(
            f"eigensolver failed on {a.shape[0]}x{a.shape[1]} matrix "
            f"(fro norm {np.linalg.norm(a):.3e}): {exc}"
        ) from exc

    order = np.lexsort((w.imag, w.real))
    w = w[order]
    v = v[:, order]

    # unit columns, largest-magnitude component real positive
    v = v / np.linalg.norm(v, axis=0, keepdims=True)
    lead = np.argmax(np.abs(v), axis=0)
    phase = v[lead, np.arange(v.shape[1])]
    v = v * np.conj(phase / np.abs(phase))

    if compute_residuals:
        residuals = np.linalg.norm(a @ v - v * w, axis=0)
    else:
        residuals = np.full(w.shape, np.nan)
    return EigenResult(eigenvalues=w, eigenvectors=v, residuals=residuals)
