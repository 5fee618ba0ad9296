"""Open Toda chain with the skew-symmetric Cartan r-matrix on sl(N+1).

Same chain, different dialgebra: sl(N+1) is split into strictly-upper,
diagonal and strictly-lower parts and R annihilates the diagonal
(``cartan_toda`` in the dialgebra module).  The natural chart is (w, z),

    b_i = z_i / 2,   a_i = (w_i z_i - w_{i-1} z_{i-1}) / 2,

with Hamiltonians normalized as

    H_k(L) = 2 Tr(L^(k+1)) / (k+1),       k = 1, 2,

and kinetic term sum_i z_i dw_i/dt, so (w, z) are canonical with symplectic
form sum_i dz_i ^ dw_i.  With these conventions the induced flows on the
Flaschka chart coincide exactly with the AKS-structure flows (time scale
``TIME_SCALE_VS_AKS`` = 1), which is the cross-structure statement the test
suite pins down.

Boundary conventions: w_0 z_0 = w_{N+1} z_{N+1} = 0 and z_0 = z_{N+1} = 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import liealg
from .linalg import as_square
from .toda_aks import FlaschkaPoint, lax_from_flaschka

#: H_k = H_SCALE * Tr(L^(k+1)) / (k+1) in this structure
H_SCALE = 2.0

#: Ratio of this structure's flow speed (in the Flaschka chart) to the AKS one.
TIME_SCALE_VS_AKS = 1.0

_MIN_Z = 1e-12


def _vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d real array")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} has non-finite entries")
    return v.copy()


@dataclass(frozen=True)
class WZPoint:
    """Canonical chart point of the Cartan structure (z_i pairs with w_i)."""

    w: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        w = _vector(self.w, "w")
        z = _vector(self.z, "z")
        if w.size != z.size:
            raise ValueError(f"w and z must have equal length, got {w.size} and {z.size}")
        if np.min(np.abs(z)) < _MIN_Z:
            raise ValueError("z entries must stay away from zero")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "z", z)

    @property
    def n_sites(self) -> int:
        return self.z.size


def wz_to_flaschka(pt: WZPoint) -> FlaschkaPoint:
    """b_i = z_i/2 and a_i = (x_i - x_{i-1})/2 with x_i = w_i z_i."""
    x = pt.w * pt.z
    a = np.diff(np.concatenate(([0.0], x, [0.0]))) / 2.0
    return FlaschkaPoint(a, pt.z / 2.0)


def flaschka_to_wz(pt: FlaschkaPoint) -> WZPoint:
    """Inverse chart map z_i = 2 b_i, w_i = 2 (a_1 + ... + a_i) / z_i."""
    z = 2.0 * pt.b
    return WZPoint(2.0 * np.cumsum(pt.a[:-1]) / z, z)


def lax_from_wz(pt: WZPoint) -> np.ndarray:
    """Tridiagonal Lax matrix, entrywise (1/2)*[x_i diag differences, z_i off-diag]."""
    return lax_from_flaschka(wz_to_flaschka(pt))


def hamiltonian_cartan(k: int, lm) -> float:
    """H_1 = Tr(L^2) or H_2 = (2/3) Tr(L^3)."""
    if k not in (1, 2):
        raise ValueError(f"unsupported flow index k={k}")
    m = as_square(lm, "L")
    return H_SCALE * float(np.trace(np.linalg.matrix_power(m, k + 1)).real) / (k + 1)


def grad_hamiltonian_cartan(k: int, lm) -> np.ndarray:
    """Pairing-gradient of H_k, the matrix 2 L^k."""
    if k not in (1, 2):
        raise ValueError(f"unsupported flow index k={k}")
    return liealg.grad_trace_power(lm, k, H_SCALE)


def hamiltonian_cartan_poly(k: int, pt: WZPoint) -> float:
    """H_k written out as a polynomial in (w, z); dual route to the trace formula.

    H_1 = sum_i (z_i^2 + w_i^2 z_i^2)/2 - sum_{i<N} x_i x_{i+1} / 2
    H_2 = sum_{i<N} (z_i^2 x_{i+1} - z_{i+1}^2 x_i + x_i^2 x_{i+1} - x_i x_{i+1}^2)/4
    """
    w, z = pt.w, pt.z
    x = w * z
    if k == 1:
        val = 0.5 * float((z**2 + x**2).sum()) - 0.5 * float((x[:-1] * x[1:]).sum())
    elif k == 2:
        val = 0.25 * float(
            (
                z[:-1] ** 2 * x[1:]
                - z[1:] ** 2 * x[:-1]
                + x[:-1] ** 2 * x[1:]
                - x[:-1] * x[1:] ** 2
            ).sum()
        )
    else:
        raise ValueError(f"unsupported flow index k={k}")
    return val


def flow_field_wz(k: int, pt: WZPoint) -> tuple[np.ndarray, np.ndarray]:
    """Hamiltonian flows in the (w, z) chart, i.e. the Euler-Lagrange systems.

    With x_i = w_i z_i (x_0 = x_{N+1} = 0, z_0 = z_{N+1} = 0):

    k=1:  dw_i = z_i - (w_i/2) (x_{i+1} - 2 x_i + x_{i-1}),
          dz_i = (z_i/2) (x_{i+1} - 2 x_i + x_{i-1})
    k=2:  dw_i = (z_i/2) (x_{i+1} - x_{i-1}) - (w_i/4) D_i,
          dz_i = (z_i/4) D_i,
          D_i = (x_{i+1}-x_i)^2 - (x_i-x_{i-1})^2 + z_{i+1}^2 - z_{i-1}^2.
    """
    w, z = pt.w, pt.z
    x = w * z
    xe = np.concatenate(([0.0], x, [0.0]))
    ze = np.concatenate(([0.0], z, [0.0]))
    if k == 1:
        lap = xe[2:] - 2.0 * xe[1:-1] + xe[:-2]
        dw = z - 0.5 * w * lap
        dz = 0.5 * z * lap
    elif k == 2:
        quad = (
            (xe[2:] - xe[1:-1]) ** 2
            - (xe[1:-1] - xe[:-2]) ** 2
            + ze[2:] ** 2
            - ze[:-2] ** 2
        )
        dw = 0.5 * z * (xe[2:] - xe[:-2]) - 0.25 * w * quad
        dz = 0.25 * z * quad
    else:
        raise ValueError(f"unsupported flow index k={k}")
    return dw, dz


def lagrangian_coeff_cartan(k: int, pt: WZPoint, vel) -> float:
    """Lagrangian coefficient L_k = sum_i z_i dw_i/dt - H_k(L(pt)).

    Velocity (dw, dz) may be off shell; only dw enters the kinetic term.
    """
    dw, _ = vel
    dw = np.asarray(dw, dtype=float)
    if dw.shape != pt.w.shape:
        raise ValueError(f"velocity shape {dw.shape} does not match chart {pt.w.shape}")
    return float(pt.z @ dw) - hamiltonian_cartan(k, lax_from_wz(pt))
