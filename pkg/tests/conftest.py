import numpy as np
import pytest

from orbitforms.linalg import expm


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_traceless(rng, n, complex_entries=False):
    m = rng.standard_normal((n, n))
    if complex_entries:
        m = m + 1j * rng.standard_normal((n, n))
    return m - np.trace(m) / n * np.eye(n)


def random_group_element(rng, n, complex_entries=False, scale=0.4):
    return expm(scale * random_traceless(rng, n, complex_entries))


def random_ub(rng, n_sites, scale=1.0):
    from orbitforms.toda_aks import CanonicalUB

    u = scale * rng.standard_normal(n_sites)
    b = rng.standard_normal(n_sites)
    b = scale * (b + 1.5 * np.where(b >= 0, 1.0, -1.0))
    return CanonicalUB(u, b)


def random_wz(rng, n_sites, scale=1.0):
    from orbitforms.toda_cartan import WZPoint

    w = scale * rng.standard_normal(n_sites)
    z = rng.standard_normal(n_sites)
    z = scale * (z + 1.5 * np.where(z >= 0, 1.0, -1.0))
    return WZPoint(w, z)


def random_gaudin_orbit(rng, sites=3, n=2, scale=1.0, real=False):
    from orbitforms.gaudin import GaudinOrbit

    jitter = rng.standard_normal(sites)
    if not real:
        jitter = jitter + 1j * rng.standard_normal(sites)
    poles = 2.0 * np.arange(sites) - (sites - 1.0) + 0.3 * jitter
    seeds = np.stack([scale * random_traceless(rng, n, not real) for _ in range(sites)])
    groups = np.stack([random_group_element(rng, n, not real) for _ in range(sites)])
    constant = 0.5 * scale * random_traceless(rng, n, not real)
    return GaudinOrbit(poles, seeds, groups, constant)


def ring_residue(f, center, radius=0.05, points=24):
    """Independent residue extraction: average of (lam-center) f(lam) on a ring."""
    ring = center + radius * np.exp(2j * np.pi * np.arange(points) / points)
    return sum((lam - center) * f(lam) for lam in ring) / points
