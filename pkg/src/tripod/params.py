"""Parameter bundle and unit conventions shared by all solvers.

Internal units: the lattice constant is a = 1, hbar = 1, and the recoil
energy E_R = (pi/a)^2 / (2m) = 1, which fixes 2m = pi^2.  All energies
(omega_p, delta, gamma, band energies) are measured in E_R, all lengths
in a, all wavenumbers in 1/a.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace

# Lattice wavenumber k = 2*pi/a and the mass factor 1/(2m) = 1/pi^2.
K_LATTICE = 2.0 * math.pi
TWO_MASS = math.pi**2
INV_TWO_MASS = 1.0 / math.pi**2


class ParamError(ValueError):
    """Raised for invalid or inconsistent lattice parameters."""


@dataclass(frozen=True)
class LatticeParams:
    """Validated physical and numerical parameters of the tripod lattice.

    eps         : probe/control amplitude ratio Omega_p / Omega_c  (> 0)
    omega_p     : probe Rabi amplitude in E_R                       (> 0)
    alpha       : phase between the two standing waves, radians
    delta       : one-photon detuning in E_R
    gamma       : excited-state decay rate in E_R                   (>= 0)
    a           : lattice constant, fixed to 1 in internal units
    n_harmonics : plane-wave cutoff N; each channel keeps 2N+1 waves
    n_q         : quasi-momentum grid size over the extended 1BZ (even)
    n_x         : real-space samples per lattice constant
    n_bands     : number of retained bands
    """

    eps: float
    omega_p: float
    alpha: float
    delta: float
    gamma: float = 0.0
    a: float = 1.0
    n_harmonics: int = 64
    n_q: int = 256
    n_x: int = 8192
    n_bands: int = 6

    @property
    def omega_c(self) -> float:
        """Control Rabi amplitude Omega_p / eps, always derived."""
        return self.omega_p / self.eps

    @property
    def basis_size(self) -> int:
        """Dimension of the four-channel plane-wave basis."""
        return 4 * (2 * self.n_harmonics + 1)


def fold_alpha(alpha: float) -> float:
    """Reduce an arbitrary phase to the equivalent value in [0, pi/2].

    The spectrum is invariant under alpha -> alpha + pi (a half-period
    shift of the fields) and under alpha -> -alpha (complex conjugation
    combined with x -> -x), so every phase maps into [0, pi/2].
    """
    a = math.fmod(alpha, math.pi)
    if a < 0.0:
        a += math.pi
    if a > 0.5 * math.pi:
        a = math.pi - a
    # fmod noise can leave a hair above pi/2
    return min(max(a, 0.0), 0.5 * math.pi)


def validate(params: LatticeParams) -> LatticeParams:
    """Normalize and check a parameter bundle.

    Returns a new bundle with alpha folded into [0, pi/2].  Raises
    ParamError for non-positive eps or omega_p, negative gamma, a != 1,
    an odd or too small q grid, or an oversized band count.  Idempotent:
    validate(validate(p)) == validate(p).
    """
    if not params.eps > 0.0:
        raise ParamError("eps must be positive")
    if not params.omega_p > 0.0:
        raise ParamError("omega_p must be positive")
    if params.gamma < 0.0:
        raise ParamError("gamma must be non-negative")
    if params.a != 1.0:
        raise ParamError("lattice constant is fixed to a = 1 in internal units")
    if params.n_harmonics < 8:
        raise ParamError("n_harmonics must be at least 8")
    if params.n_q < 16 or params.n_q % 2 != 0:
        raise ParamError("n_q must be an even integer >= 16")
    if params.n_x < 1024:
        raise ParamError("n_x must be at least 1024")
    if params.n_bands < 1:
        raise ParamError("n_bands must be positive")
    if params.n_bands > params.basis_size:
        raise ParamError(
            f"n_bands = {params.n_bands} exceeds basis size {params.basis_size}"
        )
    for name in ("eps", "omega_p", "alpha", "delta", "gamma"):
        if not math.isfinite(getattr(params, name)):
            raise ParamError(f"{name} must be finite")
    return replace(params, alpha=fold_alpha(params.alpha))


def parse_angle(value: float | int | str) -> float:
    """Parse an angle given in radians or as a '<number>deg' string."""
    if isinstance(value, str):
        text = value.strip().lower()
        if text.endswith("deg"):
            return math.radians(float(text[:-3]))
        return float(text)
    return float(value)


_CONFIG_FIELDS = (
    "eps", "omega_p", "alpha", "delta", "gamma",
    "a", "n_harmonics", "n_q", "n_x", "n_bands",
)
_REQUIRED_FIELDS = ("eps", "omega_p", "alpha", "delta", "gamma")


def params_from_dict(raw: dict) -> LatticeParams:
    """Build a validated LatticeParams from a plain config mapping.

    Keys must match the LatticeParams field names exactly; unknown keys
    are an error.  The angle accepts radians or '<x>deg' strings.
    """
    unknown = set(raw) - set(_CONFIG_FIELDS)
    if unknown:
        raise ParamError(f"unknown config keys: {sorted(unknown)}")
    missing = [k for k in _REQUIRED_FIELDS if k not in raw]
    if missing:
        raise ParamError(f"missing config keys: {missing}")
    kwargs = dict(raw)
    kwargs["alpha"] = parse_angle(kwargs["alpha"])
    for key in ("eps", "omega_p", "delta", "gamma", "a"):
        if key in kwargs:
            kwargs[key] = float(kwargs[key])
    for key in ("n_harmonics", "n_q", "n_x", "n_bands"):
        if key in kwargs:
            if float(kwargs[key]) != int(kwargs[key]):
                raise ParamError(f"{key} must be an integer")
            kwargs[key] = int(kwargs[key])
    return validate(LatticeParams(**kwargs))


def load_config(path) -> LatticeParams:
    """Load and validate a JSON parameter file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParamError(f"malformed config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParamError(f"config {path} must contain a JSON object")
    return params_from_dict(raw)


def params_to_dict(params: LatticeParams) -> dict:
    """Plain-dict form of a parameter bundle (for manifests)."""
    out = asdict(params)
    out["omega_c"] = params.omega_c
    return out
