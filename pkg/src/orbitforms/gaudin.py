"""Rational Gaudin model: Lax matrices with simple poles and their first two flow levels.

The Lax matrix is the matrix-valued rational function

    L(lam) = sum_r A_r / (lam - zeta_r) + Omega,

with pairwise-distinct poles zeta_r in C and a constant term Omega.  On the
orbit parametrization each residue is A_r = phi_r Lambda_r phi_r^{-1} with a
fixed seed Lambda_r and an invertible group element phi_r carrying the
dynamical degrees of freedom.

The site Hamiltonians are the residues

    H_{k,r} = Res_{lam=zeta_r} Tr(L(lam)^(k+1)) / (k+1),      k = 1, 2,

and every flow is the Lax equation dL/dt = [M_{k,r}(lam), L(lam)] with
M_{k,r} = -(principal part of L^k at zeta_r).  All series-level bookkeeping
is realized through partial fractions: the only data ever materialized are
residues and local regular values

    G_r = sum_{s != r} A_s / (zeta_r - zeta_s) + Omega,
    S_r = sum_{s != r} A_s / (zeta_r - zeta_s)^2       (= -G'(zeta_r)).

Site indices r are 0-based throughout the code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import commutator, frobenius

MAX_SITES = 6
MAX_MATRIX_DIM = 4
MIN_POLE_SEPARATION = 1e-8

#: evaluation (or M-matrix sampling) closer than this to a pole is rejected
_POLE_GUARD = 1e-8


def _site_matrices(x, n_sites: int, name: str) -> np.ndarray:
    m = np.asarray(x, dtype=complex)
    if m.ndim != 3 or m.shape[0] != n_sites or m.shape[1] != m.shape[2]:
        raise ValueError(f"{name} must have shape (sites, n, n), got {m.shape}")
    if not 2 <= m.shape[1] <= MAX_MATRIX_DIM:
        raise ValueError(f"{name} matrix size {m.shape[1]} outside supported 2..{MAX_MATRIX_DIM}")
    if not np.isfinite(m).all():
        raise ValueError(f"{name} has non-finite entries")
    return m.copy()


def _poles(z) -> np.ndarray:
    p = np.asarray(z, dtype=complex)
    if p.ndim != 1 or not 1 <= p.size <= MAX_SITES:
        raise ValueError(f"need 1..{MAX_SITES} poles, got shape {p.shape}")
    if p.size > 1:
        diff = np.abs(p[:, None] - p[None, :]) + np.eye(p.size)
        if diff.min() < MIN_POLE_SEPARATION:
            raise ValueError("poles must be pairwise distinct")
    return p.copy()


@dataclass(frozen=True)
class RationalLax:
    """Pole locations, residue matrices and the constant term of L(lam)."""

    poles: np.ndarray
    residues: np.ndarray
    constant: np.ndarray

    def __post_init__(self):
        poles = _poles(self.poles)
        residues = _site_matrices(self.residues, poles.size, "residues")
        constant = np.asarray(self.constant, dtype=complex)
        if constant.shape != residues.shape[1:]:
            raise ValueError("constant term shape does not match the residues")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "residues", residues)
        object.__setattr__(self, "constant", constant.copy())

    @property
    def n_sites(self) -> int:
        return self.poles.size

    @property
    def dim(self) -> int:
        return self.constant.shape[0]

    @property
    def is_real(self) -> bool:
        """True for real-restricted instances (real poles, real matrices)."""
        return (
            np.abs(self.poles.imag).max(initial=0.0) == 0.0
            and np.abs(self.residues.imag).max(initial=0.0) == 0.0
            and np.abs(self.constant.imag).max(initial=0.0) == 0.0
        )


@dataclass(frozen=True)
class GaudinOrbit:
    """Orbit data: fixed seeds Lambda_r and Omega, dynamical group elements phi_r."""

    poles: np.ndarray
    seeds: np.ndarray
    groups: np.ndarray
    constant: np.ndarray

    def __post_init__(self):
        poles = _poles(self.poles)
        seeds = _site_matrices(self.seeds, poles.size, "seeds")
        groups = _site_matrices(self.groups, poles.size, "groups")
        constant = np.asarray(self.constant, dtype=complex)
        if groups.shape != seeds.shape or constant.shape != seeds.shape[1:]:
            raise ValueError("seed/group/constant shapes are inconsistent")
        for r, g in enumerate(groups):
            if abs(np.linalg.det(g)) < 1e-10:
                raise ValueError(f"group element at site {r} is singular")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "seeds", seeds)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "constant", constant.copy())

    @property
    def n_sites(self) -> int:
        return self.poles.size

    @property
    def residues(self) -> np.ndarray:
        """A_r = phi_r Lambda_r phi_r^{-1}."""
        return np.stack(
            [g @ s @ np.linalg.inv(g) for g, s in zip(self.groups, self.seeds)]
        )

    @property
    def lax(self) -> RationalLax:
        return RationalLax(self.poles, self.residues, self.constant)


def _lax_of(obj) -> RationalLax:
    return obj.lax if isinstance(obj, GaudinOrbit) else obj


def eval_lax(lax, lam: complex) -> np.ndarray:
    """Evaluate L(lam) = sum_r A_r / (lam - zeta_r) + Omega away from the poles."""
    lx = _lax_of(lax)
    lam = complex(lam)
    dist = np.abs(lam - lx.poles)
    if dist.min() < _POLE_GUARD:
        raise ValueError(f"evaluation point {lam} is too close to a pole")
    return np.tensordot(1.0 / (lam - lx.poles), lx.residues, axes=1) + lx.constant


def local_regular_value(lax, r: int) -> np.ndarray:
    """G_r = sum_{s != r} A_s / (zeta_r - zeta_s) + Omega, the regular part of L at zeta_r."""
    lx = _lax_of(lax)
    _check_site(lx, r)
    g = lx.constant.copy()
    for s in range(lx.n_sites):
        if s != r:
            g += lx.residues[s] / (lx.poles[r] - lx.poles[s])
    return g


def local_curvature_value(lax, r: int) -> np.ndarray:
    """S_r = sum_{s != r} A_s / (zeta_r - zeta_s)^2 = -dG/dlam at zeta_r."""
    lx = _lax_of(lax)
    _check_site(lx, r)
    s_mat = np.zeros_like(lx.constant)
    for s in range(lx.n_sites):
        if s != r:
            s_mat += lx.residues[s] / (lx.poles[r] - lx.poles[s]) ** 2
    return s_mat


def _check_site(lx: RationalLax, r: int) -> None:
    if not 0 <= r < lx.n_sites:
        raise ValueError(f"site index {r} out of range 0..{lx.n_sites - 1}")


def _check_level(k: int) -> None:
    if k not in (1, 2):
        raise ValueError(f"unsupported flow level k={k}")


def gaudin_hamiltonian(obj, k: int, r: int) -> complex:
    """Site Hamiltonian H_{k,r}.

    H_{1,r} = sum_{s != r} Tr(A_r A_s)/(zeta_r - zeta_s) + Tr(A_r Omega)
            = Tr(A_r G_r),
    H_{2,r} = Tr(A_r G_r^2) - Tr(A_r^2 S_r).
    """
    lx = _lax_of(obj)
    _check_level(k)
    _check_site(lx, r)
    a_r = lx.residues[r]
    g_r = local_regular_value(lx, r)
    if k == 1:
        return complex(np.trace(a_r @ g_r))
    s_r = local_curvature_value(lx, r)
    return complex(np.trace(a_r @ g_r @ g_r) - np.trace(a_r @ a_r @ s_r))


def gaudin_m_matrix(obj, k: int, r: int, lam: complex) -> np.ndarray:
    """M_{k,r}(lam), minus the principal part of L(lam)^k at zeta_r.

    k=1:  -A_r / (lam - zeta_r)
    k=2:  -A_r^2/(lam - zeta_r)^2 - (A_r G_r + G_r A_r)/(lam - zeta_r)
    """
    lx = _lax_of(obj)
    _check_level(k)
    _check_site(lx, r)
    lam = complex(lam)
    mu = lam - lx.poles[r]
    if abs(mu) < _POLE_GUARD:
        raise ValueError(f"sample point {lam} is too close to the pole at site {r}")
    a_r = lx.residues[r]
    if k == 1:
        return -a_r / mu
    g_r = local_regular_value(lx, r)
    return -(a_r @ a_r) / mu**2 - (a_r @ g_r + g_r @ a_r) / mu


def gaudin_flow_field(obj, k: int, r: int) -> np.ndarray:
    """Time derivatives dA_s of all residues under the (k, r) flow; dOmega = 0.

    k=1:  dA_s = [A_r, A_s]/(zeta_r - zeta_s)  for s != r,
          dA_r = -sum_{s != r} [A_r, A_s]/(zeta_r - zeta_s) - [A_r, Omega]
               = [G_r, A_r].
    k=2:  dA_s = [M_{2,r}(zeta_s), A_s]  for s != r,
          dA_r = sum_{s != r} [A_r^2, A_s]/(zeta_r - zeta_s)^2 - [A_r, G_r^2].
    """
    lx = _lax_of(obj)
    _check_level(k)
    _check_site(lx, r)
    a = lx.residues
    a_r = a[r]
    g_r = local_regular_value(lx, r)
    field = np.zeros_like(a)
    if k == 1:
        for s in range(lx.n_sites):
            if s != r:
                field[s] = commutator(a_r, a[s]) / (lx.poles[r] - lx.poles[s])
        field[r] = commutator(g_r, a_r)
        return field
    for s in range(lx.n_sites):
        if s != r:
            field[s] = commutator(gaudin_m_matrix(lx, 2, r, lx.poles[s]), a[s])
    acc = -commutator(a_r, g_r @ g_r)
    for s in range(lx.n_sites):
        if s != r:
            acc += commutator(a_r @ a_r, a[s]) / (lx.poles[r] - lx.poles[s]) ** 2
    field[r] = acc
    return field


def gaudin_phi_flow_field(orbit: GaudinOrbit, k: int, r: int) -> np.ndarray:
    """Group-chart lift dphi_s = V_s phi_s of the (k, r) flow.

    V_s for s != r is the sample value M_{k,r}(zeta_s); V_r is the constant
    Taylor coefficient of the regular part of L^k at zeta_r:

    k=1:  V_r = G_r,
    k=2:  V_r = G_r^2 - (A_r S_r + S_r A_r).

    Trajectories of this field induce exactly :func:`gaudin_flow_field` on
    the residues A_s = phi_s Lambda_s phi_s^{-1}.
    """
    _check_level(k)
    lx = orbit.lax
    _check_site(lx, r)
    a_r = lx.residues[r]
    g_r = local_regular_value(lx, r)
    vel = np.zeros_like(orbit.groups)
    for s in range(lx.n_sites):
        if s != r:
            vel[s] = gaudin_m_matrix(lx, k, r, lx.poles[s]) @ orbit.groups[s]
    if k == 1:
        v_r = g_r
    else:
        s_r = local_curvature_value(lx, r)
        v_r = g_r @ g_r - (a_r @ s_r + s_r @ a_r)
    vel[r] = v_r @ orbit.groups[r]
    return vel


def gaudin_lagrangian_coeff(orbit: GaudinOrbit, k: int, r: int, vel) -> complex:
    """Lagrangian coefficient L_{k,r} = sum_s Tr(Lambda_s phi_s^{-1} dphi_s) - H_{k,r}.

    ``vel`` stacks the group velocities dphi_s (off-shell values allowed).
    The total-derivative boundary term carried by the constant part of the
    Lax matrix does not affect the flow equations and is not included.
    """
    _check_level(k)
    dphi = _site_matrices(vel, orbit.n_sites, "vel")
    kinetic = 0.0 + 0.0j
    for s in range(orbit.n_sites):
        kinetic += np.trace(orbit.seeds[s] @ np.linalg.solve(orbit.groups[s], dphi[s]))
    return complex(kinetic - gaudin_hamiltonian(orbit, k, r))


def gaudin_hamiltonian_gradients(obj, k: int, r: int) -> np.ndarray:
    """Matrix gradients dH_{k,r}/dA_s under the trace pairing, stacked over s.

    k=1:  grad_s = A_r/(zeta_r - zeta_s) (s != r),   grad_r = G_r
    k=2:  grad_s = (G_r A_r + A_r G_r)/(zeta_r - zeta_s) - A_r^2/(zeta_r - zeta_s)^2,
          grad_r = G_r^2 - (A_r S_r + S_r A_r)
    """
    lx = _lax_of(obj)
    _check_level(k)
    _check_site(lx, r)
    a_r = lx.residues[r]
    g_r = local_regular_value(lx, r)
    grads = np.zeros_like(lx.residues)
    if k == 1:
        for s in range(lx.n_sites):
            if s != r:
                grads[s] = a_r / (lx.poles[r] - lx.poles[s])
        grads[r] = g_r
        return grads
    s_r = local_curvature_value(lx, r)
    for s in range(lx.n_sites):
        if s != r:
            dz = lx.poles[r] - lx.poles[s]
            grads[s] = (g_r @ a_r + a_r @ g_r) / dz - (a_r @ a_r) / dz**2
    grads[r] = g_r @ g_r - (a_r @ s_r + s_r @ a_r)
    return grads


def hamiltonian_flow_derivative(obj, j: int, s: int, k: int, r: int) -> complex:
    """d H_{j,s} / d t_k^r, the Poisson bracket of the two site Hamiltonians.

    Evaluated analytically as sum_s' Tr(dH_{j,s}/dA_s' * dA_s'); involution
    makes this vanish for every pair of flows.
    """
    lx = _lax_of(obj)
    grads = gaudin_hamiltonian_gradients(lx, j, s)
    field = gaudin_flow_field(lx, k, r)
    return complex(sum(np.trace(g @ f) for g, f in zip(grads, field)))


def charpoly_sample_points(lax, count: int = 5) -> np.ndarray:
    """Deterministic spectral-curve sample points, on a circle clear of all poles."""
    lx = _lax_of(lax)
    center = lx.poles.mean()
    radius = 1.0 + 2.0 * float(np.abs(lx.poles - center).max(initial=0.0))
    angles = np.pi * (2.0 * np.arange(count) + 1.0) / count
    return center + radius * np.exp(1j * angles)
