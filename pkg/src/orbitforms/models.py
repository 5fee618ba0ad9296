"""Uniform model adapters over flat state vectors.

The multi-time integrator, the verification harness and the CLI all drive
models through the same small surface:

    flow_ids            iterable of flow labels (ints for Toda, (k, site)
                        tuples for Gaudin)
    dim, dtype          flat state vector shape/scalar type
    flow_field(fid, y)  on-shell velocity at state y
    lagrangian(fid, y, v)
                        Lagrangian coefficient of flow fid at (state, velocity);
                        only charts carrying the kinetic term support it
    hamiltonian(fid, y)
    lax_matrix(y) / spectral_matrices(y)
                        matrices whose spectra the flows preserve
    coordinate_names    CSV column labels for the chart

Toda models in their canonical charts additionally expose the constant
symplectic matrix ``omega()``, the momentum map ``momentum(y)`` and its
Jacobian, and analytic positional Hamiltonian gradients; this is the
surface the multi-time identity checker requires.
"""

from __future__ import annotations

import numpy as np

from . import gaudin as gd
from . import toda_aks as aks
from . import toda_cartan as car


class TodaAksModel:
    """Open Toda chain, AKS structure, in the 'ub' (canonical) or 'flaschka' chart."""

    name = "toda-aks"
    flow_ids = (1, 2)
    dtype = float

    def __init__(self, n_sites: int, chart: str = "ub"):
        if n_sites < 1:
            raise ValueError("need at least one site")
        if chart not in ("ub", "flaschka"):
            raise ValueError(f"unknown chart {chart!r} for {self.name}")
        self.n_sites = n_sites
        self.chart = chart
        self.dim = 2 * n_sites if chart == "ub" else 2 * n_sites + 1

    # -- chart packing -------------------------------------------------
    def pack(self, pt) -> np.ndarray:
        if self.chart == "ub":
            return np.concatenate([pt.u, pt.b])
        return np.concatenate([pt.a, pt.b])

    def unpack(self, y: np.ndarray):
        n = self.n_sites
        if self.chart == "ub":
            return aks.CanonicalUB(y[:n], y[n:])
        return aks.FlaschkaPoint(y[: n + 1], y[n + 1 :])

    def coordinate_names(self) -> list[str]:
        n = self.n_sites
        if self.chart == "ub":
            return [f"u{j}" for j in range(1, n + 1)] + [f"b{j}" for j in range(1, n + 1)]
        return [f"a{j}" for j in range(1, n + 2)] + [f"b{j}" for j in range(1, n + 1)]

    # -- dynamics ------------------------------------------------------
    def flow_field(self, fid: int, y: np.ndarray) -> np.ndarray:
        if self.chart == "ub":
            du, db = aks.flow_field_ub(fid, self.unpack(y))
            return np.concatenate([du, db])
        da, db = aks.flow_field_flaschka(fid, self.unpack(y))
        return np.concatenate([da, db])

    def lax_matrix(self, y: np.ndarray) -> np.ndarray:
        pt = self.unpack(y)
        if self.chart == "ub":
            pt = aks.ub_to_flaschka(pt)
        return aks.lax_from_flaschka(pt)

    def hamiltonian(self, fid: int, y: np.ndarray) -> float:
        return aks.hamiltonian_aks(fid, self.lax_matrix(y))

    def lagrangian(self, fid: int, y: np.ndarray, v: np.ndarray):
        if self.chart != "ub":
            raise ValueError("the Lagrangian coefficients live in the 'ub' chart")
        n = self.n_sites
        return aks.lagrangian_coeff_aks(fid, self.unpack(y), (v[:n], v[n:]))

    # -- canonical-chart surface ----------------------------------------
    def omega(self) -> np.ndarray:
        """Constant symplectic matrix of sum_j db_j ^ du_j in (u, b) ordering."""
        self._require_canonical()
        n = self.n_sites
        om = np.zeros((2 * n, 2 * n))
        om[:n, n:] = -np.eye(n)
        om[n:, :n] = np.eye(n)
        return om

    def momentum(self, y: np.ndarray) -> np.ndarray:
        """Momentum map pi = (-b, 0): each u_j is conjugate to -b_j."""
        self._require_canonical()
        n = self.n_sites
        return np.concatenate([-y[n:], np.zeros(n)])

    def momentum_jacobian(self, y: np.ndarray) -> np.ndarray:
        self._require_canonical()
        n = self.n_sites
        jac = np.zeros((2 * n, 2 * n))
        jac[:n, n:] = -np.eye(n)
        return jac

    def grad_hamiltonian(self, fid: int, y: np.ndarray) -> np.ndarray:
        """Analytic chart gradient of H_fid via the chain rule through the Lax matrix."""
        self._require_canonical()
        n = self.n_sites
        u, b = y[:n], y[n:]
        lm = self.lax_matrix(y)
        lk = aks.H_SCALE * np.linalg.matrix_power(lm, fid)  # pairing gradient of H
        ddiag = np.diagonal(lk)[:-1] - np.diagonal(lk)[1:]  # Tr(grad * (E_jj - E_j+1,j+1))
        doff = 2.0 * np.diagonal(lk, 1)
        return np.concatenate([b * ddiag, doff + u * ddiag])

    def _require_canonical(self):
        if self.chart != "ub":
            raise ValueError("canonical-chart data requires the 'ub' chart")


class TodaCartanModel:
    """Open Toda chain, Cartan structure, in the 'wz' (canonical) or 'flaschka' chart."""

    name = "toda-cartan"
    flow_ids = (1, 2)
    dtype = float

    def __init__(self, n_sites: int, chart: str = "wz"):
        if n_sites < 1:
            raise ValueError("need at least one site")
        if chart not in ("wz", "flaschka"):
            raise ValueError(f"unknown chart {chart!r} for {self.name}")
        self.n_sites = n_sites
        self.chart = chart
        self.dim = 2 * n_sites if chart == "wz" else 2 * n_sites + 1

    def pack(self, pt) -> np.ndarray:
        if self.chart == "wz":
            return np.concatenate([pt.w, pt.z])
        return np.concatenate([pt.a, pt.b])

    def unpack(self, y: np.ndarray):
        n = self.n_sites
        if self.chart == "wz":
            return car.WZPoint(y[:n], y[n:])
        return aks.FlaschkaPoint(y[: n + 1], y[n + 1 :])

    def coordinate_names(self) -> list[str]:
        n = self.n_sites
        if self.chart == "wz":
            return [f"w{j}" for j in range(1, n + 1)] + [f"z{j}" for j in range(1, n + 1)]
        return [f"a{j}" for j in range(1, n + 2)] + [f"b{j}" for j in range(1, n + 1)]

    def flow_field(self, fid: int, y: np.ndarray) -> np.ndarray:
        if self.chart == "wz":
            dw, dz = car.flow_field_wz(fid, self.unpack(y))
            return np.concatenate([dw, dz])
        da, db = aks.flow_field_flaschka(fid, self.unpack(y))
        return np.concatenate([da, db])

    def lax_matrix(self, y: np.ndarray) -> np.ndarray:
        pt = self.unpack(y)
        if self.chart == "wz":
            pt = car.wz_to_flaschka(pt)
        return aks.lax_from_flaschka(pt)

    def hamiltonian(self, fid: int, y: np.ndarray) -> float:
        return car.hamiltonian_cartan(fid, self.lax_matrix(y))

    def lagrangian(self, fid: int, y: np.ndarray, v: np.ndarray):
        if self.chart != "wz":
            raise ValueError("the Lagrangian coefficients live in the 'wz' chart")
        n = self.n_sites
        return car.lagrangian_coeff_cartan(fid, self.unpack(y), (v[:n], v[n:]))

    def omega(self) -> np.ndarray:
        """Constant symplectic matrix of sum_i dz_i ^ dw_i in (w, z) ordering."""
        self._require_canonical()
        n = self.n_sites
        om = np.zeros((2 * n, 2 * n))
        om[:n, n:] = np.eye(n)
        om[n:, :n] = -np.eye(n)
        return om

    def momentum(self, y: np.ndarray) -> np.ndarray:
        """Momentum map pi = (z, 0): each w_i is conjugate to z_i."""
        self._require_canonical()
        n = self.n_sites
        return np.concatenate([y[n:], np.zeros(n)])

    def momentum_jacobian(self, y: np.ndarray) -> np.ndarray:
        self._require_canonical()
        n = self.n_sites
        jac = np.zeros((2 * n, 2 * n))
        jac[:n, n:] = np.eye(n)
        return jac

    def grad_hamiltonian(self, fid: int, y: np.ndarray) -> np.ndarray:
        self._require_canonical()
        n = self.n_sites
        w, z = y[:n], y[n:]
        lm = self.lax_matrix(y)
        lk = car.H_SCALE * np.linalg.matrix_power(lm, fid)
        ddiag = np.diagonal(lk)[:-1] - np.diagonal(lk)[1:]
        doff = np.diagonal(lk, 1)
        # dL/dw_i = (z_i/2)(E_ii - E_i+1,i+1);  dL/dz_i adds the off-diagonal pair
        return np.concatenate([0.5 * z * ddiag, doff + 0.5 * w * ddiag])

    def _require_canonical(self):
        if self.chart != "wz":
            raise ValueError("canonical-chart data requires the 'wz' chart")


class GaudinModel:
    """Rational Gaudin model over the residue chart (A_r) or the group chart (phi_r).

    The residue chart is the production integration chart (cheap, with the
    spectral-curve drift certifying orbit preservation); the group chart
    carries the kinetic term and is what action/closure evaluations use.
    Real-restricted instances (real poles and matrices) run with real state
    vectors, which keeps trajectories exactly real.
    """

    name = "gaudin"

    def __init__(self, orbit: gd.GaudinOrbit, chart: str = "residues"):
        if chart not in ("residues", "group"):
            raise ValueError(f"unknown chart {chart!r} for {self.name}")
        self.orbit = orbit
        self.chart = chart
        self.n_sites = orbit.n_sites
        self.matrix_dim = orbit.constant.shape[0]
        self.dim = self.n_sites * self.matrix_dim**2
        self.dtype = float if (chart == "residues" and orbit.lax.is_real) else complex
        self.flow_ids = tuple((k, r) for k in (1, 2) for r in range(self.n_sites))

    # -- chart packing -------------------------------------------------
    def pack(self, mats: np.ndarray) -> np.ndarray:
        flat = np.asarray(mats, dtype=complex).reshape(self.dim)
        return flat.real.copy() if self.dtype is float else flat.copy()

    def unpack(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y, dtype=complex).reshape(
            self.n_sites, self.matrix_dim, self.matrix_dim
        )

    def initial_state(self) -> np.ndarray:
        start = self.orbit.residues if self.chart == "residues" else self.orbit.groups
        return self.pack(start)

    def coordinate_names(self) -> list[str]:
        stem = "A" if self.chart == "residues" else "phi"
        return [
            f"{stem}{r + 1}_{i + 1}{j + 1}"
            for r in range(self.n_sites)
            for i in range(self.matrix_dim)
            for j in range(self.matrix_dim)
        ]

    def _lax_from_state(self, y: np.ndarray) -> gd.RationalLax:
        mats = self.unpack(y)
        if self.chart == "group":
            mats = gd.GaudinOrbit(
                self.orbit.poles, self.orbit.seeds, mats, self.orbit.constant
            ).residues
        return gd.RationalLax(self.orbit.poles, mats, self.orbit.constant)

    # -- dynamics ------------------------------------------------------
    def flow_field(self, fid, y: np.ndarray) -> np.ndarray:
        k, r = fid
        if self.chart == "residues":
            lax = gd.RationalLax(self.orbit.poles, self.unpack(y), self.orbit.constant)
            return self.pack(gd.gaudin_flow_field(lax, k, r))
        orbit = gd.GaudinOrbit(
            self.orbit.poles, self.orbit.seeds, self.unpack(y), self.orbit.constant
        )
        return self.pack(gd.gaudin_phi_flow_field(orbit, k, r))

    def hamiltonian(self, fid, y: np.ndarray) -> complex:
        k, r = fid
        return gd.gaudin_hamiltonian(self._lax_from_state(y), k, r)

    def lagrangian(self, fid, y: np.ndarray, v: np.ndarray) -> complex:
        if self.chart != "group":
            raise ValueError("the Lagrangian coefficients live in the 'group' chart")
        k, r = fid
        orbit = gd.GaudinOrbit(
            self.orbit.poles, self.orbit.seeds, self.unpack(y), self.orbit.constant
        )
        return gd.gaudin_lagrangian_coeff(orbit, k, r, self.unpack(v))

    def spectral_matrices(self, y: np.ndarray) -> list[np.ndarray]:
        """L(lam) at the fixed spectral-curve sample points (flows preserve their spectra)."""
        lax = self._lax_from_state(y)
        return [gd.eval_lax(lax, lam) for lam in gd.charpoly_sample_points(lax)]


def build_toda_model(name: str, n_sites: int, chart: str | None = None):
    if name == "toda-aks":
        return TodaAksModel(n_sites, chart or "ub")
    if name == "toda-cartan":
        return TodaCartanModel(n_sites, chart or "wz")
    raise ValueError(f"unknown Toda model {name!r}")
