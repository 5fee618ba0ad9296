"""Open Toda chain in the non-skew (AKS) dialgebra on sl(N+1).

The Lax matrix is symmetric tridiagonal with diagonal a_1..a_{N+1} and
off-diagonal b_1..b_N (Flaschka variables).  The Hamiltonians are

    H_k(L) = -Tr(L^(k+1)) / (k+1),        k = 1, 2,

whose gradients -L^k generate the chain flows through the ``aks_toda``
R operator.  The canonical chart is (u, b): u_j pairs with -b_j in the
kinetic term -sum_j b_j du_j/dt of the Lagrangian coefficients, so the
symplectic form is sum_j db_j ^ du_j.

Index conventions: arrays are 0-based, formulas below use the 1-based
labels a_1..a_{N+1}, b_1..b_N with the boundary convention
b_0 = b_{N+1} = 0 (and x_0 = x_{N+1} = 0 for x_j = b_j u_j), which folds
all chain-edge cases into one formula.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import liealg
from .linalg import as_square, expm, frobenius, qr_decompose

#: sign of the Hamiltonian family H_k = H_SCALE * Tr(L^(k+1))/(k+1) in this structure
H_SCALE = -1.0

_MIN_B = 1e-12
_TRACE_TOL = 1e-10


def _vector(x, name: str) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d real array")
    if not np.isfinite(v).all():
        raise ValueError(f"{name} has non-finite entries")
    return v.copy()


@dataclass(frozen=True)
class FlaschkaPoint:
    """Orbit point in Flaschka variables: diagonal a (N+1 entries), off-diagonal b (N)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = _vector(self.a, "a")
        b = _vector(self.b, "b")
        if a.size != b.size + 1:
            raise ValueError(f"need len(a) = len(b) + 1, got {a.size} and {b.size}")
        if abs(a.sum()) > _TRACE_TOL * max(1.0, float(np.linalg.norm(a))):
            raise ValueError(f"sum of a must vanish (traceless orbit), got {a.sum()!r}")
        if np.min(np.abs(b)) < _MIN_B:
            raise ValueError("off-diagonal entries b must stay away from zero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def n_sites(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class CanonicalUB:
    """Canonical chart point: coordinates u_1..u_N with momenta -b_1..-b_N."""

    u: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        u = _vector(self.u, "u")
        b = _vector(self.b, "b")
        if u.size != b.size:
            raise ValueError(f"u and b must have equal length, got {u.size} and {b.size}")
        if np.min(np.abs(b)) < _MIN_B:
            raise ValueError("b entries must stay away from zero")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "b", b)

    @property
    def n_sites(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class CanonicalQP:
    """Position/momentum chart: q_1..q_N and p_1..p_{N+1} with sum(p) a Casimir."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _vector(self.q, "q")
        p = _vector(self.p, "p")
        if p.size != q.size + 1:
            raise ValueError(f"need len(p) = len(q) + 1, got {p.size} and {q.size}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


def lax_from_flaschka(pt: FlaschkaPoint) -> np.ndarray:
    """Symmetric tridiagonal Lax matrix with diagonal a and off-diagonal b."""
    lm = np.diag(pt.a)
    idx = np.arange(pt.n_sites)
    lm[idx, idx + 1] = pt.b
    lm[idx + 1, idx] = pt.b
    return liealg.check_traceless(lm, name="Lax matrix")


def flaschka_from_lax(lm) -> FlaschkaPoint:
    """Read (a, b) back off a symmetric tridiagonal matrix."""
    m = as_square(lm, "L")
    sym_defect = frobenius(m - m.T)
    tri_defect = frobenius(np.triu(m, 2))
    if max(sym_defect, tri_defect) > 1e-10 * max(1.0, frobenius(m)):
        raise ValueError("matrix is not symmetric tridiagonal")
    return FlaschkaPoint(np.diagonal(m).copy(), np.diagonal(m, 1).copy())


def ub_to_flaschka(pt: CanonicalUB) -> FlaschkaPoint:
    """a_j = x_j - x_{j-1} with x_j = b_j u_j (telescoping makes sum(a) = 0 exactly)."""
    x = pt.b * pt.u
    a = np.diff(np.concatenate(([0.0], x, [0.0])))
    return FlaschkaPoint(a, pt.b)


def flaschka_to_ub(pt: FlaschkaPoint) -> CanonicalUB:
    """Inverse chart map u_j = (a_1 + ... + a_j) / b_j."""
    return CanonicalUB(np.cumsum(pt.a[:-1]) / pt.b, pt.b)


def ub_to_qp(pt: CanonicalUB) -> CanonicalQP:
    """q_j = sum_{k>=j} ln b_k and p_j = a_j; requires b > 0 for the logarithms."""
    if np.min(pt.b) <= 0.0:
        raise ValueError("the (q, p) chart needs positive b")
    q = np.cumsum(np.log(pt.b)[::-1])[::-1]
    p = ub_to_flaschka(pt).a
    return CanonicalQP(q, p)


def hamiltonian_aks(k: int, lm) -> float:
    """H_1 = -Tr(L^2)/2 or H_2 = -Tr(L^3)/3."""
    if k not in (1, 2):
        raise ValueError(f"unsupported flow index k={k}")
    m = as_square(lm, "L")
    return H_SCALE * float(np.trace(np.linalg.matrix_power(m, k + 1)).real) / (k + 1)


def grad_hamiltonian_aks(k: int, lm) -> np.ndarray:
    """Pairing-gradient of H_k, the matrix -L^k."""
    if k not in (1, 2):
        raise ValueError(f"unsupported flow index k={k}")
    return liealg.grad_trace_power(lm, k, H_SCALE)


def hamiltonian_qp(pt: CanonicalQP) -> float:
    """Quadratic Hamiltonian in the (q, p) chart:

    H_1 = -sum p_j^2 / 2 - sum_{j<N} exp(2(q_j - q_{j+1})) - exp(2 q_N).
    """
    q, p = pt.q, pt.p
    bulk = float(np.exp(2.0 * (q[:-1] - q[1:])).sum()) if q.size > 1 else 0.0
    return -0.5 * float(p @ p) - bulk - float(np.exp(2.0 * q[-1]))


def flow_field_flaschka(k: int, pt: FlaschkaPoint) -> tuple[np.ndarray, np.ndarray]:
    """Chain flows in Flaschka variables.

    k=1:  da_j = 2(b_j^2 - b_{j-1}^2),  db_j = b_j (a_{j+1} - a_j)
    k=2:  da_j = 2 b_j^2 (a_j + a_{j+1}) - 2 b_{j-1}^2 (a_{j-1} + a_j),
          db_j = b_j (a_{j+1}^2 - a_j^2 + b_{j+1}^2 - b_{j-1}^2)
    """
    a, b = pt.a, pt.b
    be = np.concatenate(([0.0], b, [0.0]))
    if k == 1:
        da = 2.0 * (be[1:] ** 2 - be[:-1] ** 2)
        db = b * (a[1:] - a[:-1])
    elif k == 2:
        edge = b**2 * (a[:-1] + a[1:])
        se = np.concatenate(([0.0], edge, [0.0]))
        da = 2.0 * (se[1:] - se[:-1])
        db = b * (a[1:] ** 2 - a[:-1] ** 2 + be[2:] ** 2 - be[:-2] ** 2)
    else:
        raise ValueError(f"unsupported flow index k={k}")
    return da, db


def flow_field_ub(k: int, pt: CanonicalUB) -> tuple[np.ndarray, np.ndarray]:
    """Chain flows in the canonical (u, b) chart; these are the
    Euler-Lagrange systems of the first two Lagrangian coefficients.

    With x_j = b_j u_j and a_j = x_j - x_{j-1}:

    k=1:  du_j = u_j (a_j - a_{j+1}) + 2 b_j,       db_j = b_j (a_{j+1} - a_j)
    k=2:  du_j = u_j (a_j^2 - a_{j+1}^2) + u_j (b_{j-1}^2 - b_{j+1}^2)
                 + 2 b_j (x_{j+1} - x_{j-1}),
          db_j = b_j (a_{j+1}^2 - a_j^2 + b_{j+1}^2 - b_{j-1}^2)
    """
    u, b = pt.u, pt.b
    x = b * u
    af = np.diff(np.concatenate(([0.0], x, [0.0])))
    be = np.concatenate(([0.0], b, [0.0]))
    xe = np.concatenate(([0.0], x, [0.0]))
    if k == 1:
        du = u * (af[:-1] - af[1:]) + 2.0 * b
        db = b * (af[1:] - af[:-1])
    elif k == 2:
        du = (
            u * (af[:-1] ** 2 - af[1:] ** 2)
            + u * (be[:-2] ** 2 - be[2:] ** 2)
            + 2.0 * b * (xe[2:] - xe[:-2])
        )
        db = b * (af[1:] ** 2 - af[:-1] ** 2 + be[2:] ** 2 - be[:-2] ** 2)
    else:
        raise ValueError(f"unsupported flow index k={k}")
    return du, db


def lagrangian_coeff_aks(k: int, pt: CanonicalUB, vel) -> float:
    """Lagrangian coefficient L_k = -sum_j b_j du_j/dt - H_k(L(pt)).

    The velocity is an arbitrary (du, db) pair; the kinetic term only reads
    du, and off-shell evaluation is allowed.  The potential part -H_k is
    evaluated through the Lax matrix traces, which keeps all chain-edge
    cases unambiguous.
    """
    du, _ = vel
    du = np.asarray(du, dtype=float)
    if du.shape != pt.u.shape:
        raise ValueError(f"velocity shape {du.shape} does not match chart {pt.u.shape}")
    lm = lax_from_flaschka(ub_to_flaschka(pt))
    return -float(pt.b @ du) - hamiltonian_aks(k, lm)


# per-chunk cap on ||sum_k t_k L0^k||_F; keeps the exponential's condition
# number well inside double precision so the QR splitting stays meaningful
_FACTOR_CHUNK_NORM = 10.0


def _check_orbit_form(l0) -> np.ndarray:
    m = as_square(l0, "L0")
    if frobenius(m - m.T) > 1e-12 * max(1.0, frobenius(m)) or frobenius(np.triu(m, 2)) > 1e-12:
        raise ValueError("L0 must be symmetric tridiagonal")
    return m


def _factorisation_step(m: np.ndarray, times) -> np.ndarray:
    arg = np.zeros_like(m)
    for k, t in enumerate(times, start=1):
        arg += float(t) * np.linalg.matrix_power(m, k)
    try:
        q, _ = qr_decompose(expm(arg))
    except (OverflowError, ValueError) as exc:
        raise RuntimeError(f"factorisation breakdown: {exc}") from exc
    return q.T @ m @ q


def solve_hierarchy_by_factorisation(l0, times) -> np.ndarray:
    """Multi-time closed form: L(t) = Q^T L0 Q with exp(sum_k t_k L0^k) = Q R.

    ``times[k-1]`` is the time along the k-th flow (gradient -L0^k); any
    number of flow times may be combined since the flows commute.  Long
    times are split into chunks through the flow's own composition property,
    which keeps every QR factorisation well conditioned.
    """
    m = _check_orbit_form(l0)
    times = [float(t) for t in times]
    arg_norm = frobenius(
        sum(t * np.linalg.matrix_power(m, k) for k, t in enumerate(times, start=1))
    )
    chunks = max(1, int(np.ceil(arg_norm / _FACTOR_CHUNK_NORM)))
    step_times = [t / chunks for t in times]
    for _ in range(chunks):
        m = _factorisation_step(m, step_times)
    return m


def solve_by_factorisation(l0, t: float) -> np.ndarray:
    """Closed-form first flow: L(t) = Q(t)^T L0 Q(t) with exp(t L0) = Q(t) R(t).

    L0 must be symmetric tridiagonal (an orbit point).  The gradient of H_1
    is -L0, so the group factor to split is exp(t L0); the QR normalization
    with positive diag(R) makes the splitting unique, and the Q^T L0 Q
    orientation is the one matching da_1/dt = 2 b_1^2 > 0 as t -> 0+ (pinned
    by a regression test against the direct integrator).
    """
    return solve_hierarchy_by_factorisation(l0, [float(t)])
