"""Shared fixtures: the expensive band solves are session-scoped so the
acceptance criteria and unit tests reuse them."""

import time

import numpy as np
import pytest

from tripod.params import LatticeParams, validate
from tripod import bands as bands_mod


def make_params(**kw):
    base = dict(eps=0.1, omega_p=2000.0, alpha=0.0, delta=0.0, gamma=0.0,
                n_q=32, n_bands=4, n_harmonics=64)
    base.update(kw)
    return validate(LatticeParams(**base))


# Parameters of the reference figure-style runs.
FIG1A = dict(eps=0.1, omega_p=2000.0, alpha=0.0, delta=2000.0, gamma=1000.0)
FIG4 = dict(eps=0.1, omega_p=8000.0, alpha=0.0, delta=8000.0, gamma=4000.0)


@pytest.fixture(scope="session")
def fig1a_nq32():
    """Fig.-1a-style full solve on 32 q points, with its wall time."""
    p = make_params(**FIG1A, n_q=32, n_bands=4)
    t0 = time.perf_counter()
    bands = bands_mod.full_bands(p)
    return bands, time.perf_counter() - t0


@pytest.fixture(scope="session")
def fig1a_nq64():
    p = make_params(**FIG1A, n_q=64, n_bands=4)
    return bands_mod.full_bands(p)


@pytest.fixture(scope="session")
def delta0_sets():
    """Full and dark solves at delta = 0, gamma = 1000, alpha in {0, pi/4}."""
    out = {}
    for alpha in (0.0, np.pi / 4):
        p = make_params(eps=0.1, alpha=alpha, delta=0.0, gamma=1000.0,
                        n_q=32, n_bands=4)
        out[alpha] = (bands_mod.full_bands(p), bands_mod.dark_bands(p))
    return out


@pytest.fixture(scope="session")
def alpha85_bands():
    p = make_params(eps=0.1, alpha=np.radians(85.0), delta=0.0, gamma=1000.0,
                    n_q=64, n_bands=6)
    return bands_mod.full_bands(p)


@pytest.fixture(scope="session")
def fig4_bands():
    p = make_params(**FIG4, n_q=48, n_bands=3)
    return bands_mod.full_bands(p)


@pytest.fixture(scope="session")
def fig4_dark_bands():
    p = make_params(**FIG4, n_q=48, n_bands=3)
    return bands_mod.dark_bands(p)
