"""The r-matrix layer: R operators, the R-bracket, and generic Lax vector fields.

A linear operator R on sl(n) solving the modified classical Yang-Baxter
equation

    [R(X), R(Y)] - R([R(X), Y] + [X, R(Y)]) = -[X, Y]

induces a second Lie bracket [X, Y]_R = ([R(X), Y] + [X, R(Y)]) / 2 and,
through it, a second Lie-Poisson structure.  The flows of invariant
Hamiltonians with respect to that structure are Lax equations
dL/dt = [R_plus(grad H), L] with R_pm = (R +- id)/2.

Two concrete operators are provided for the open Toda chain:

``aks_toda``
    Splitting of sl(n) into skew-symmetric plus upper-triangular
    subalgebras, R = P_plus - P_minus with P_pm the projectors along each
    other.  Not skew-symmetric under the trace pairing.

``cartan_toda``
    Splitting into strictly-upper, diagonal and strictly-lower parts;
    R kills the diagonal and is strict-upper minus strict-lower.
    Skew-symmetric under the trace pairing.

A third kind, ``gaudin_partial_fraction``, is declared for taxonomy: it acts
on rational Lax data rather than on single matrices, and its application
lives in the gaudin module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_square, commutator, frobenius, require_same_dim
from .liealg import trace_pairing

AKS_TODA = "aks_toda"
CARTAN_TODA = "cartan_toda"
GAUDIN_PARTIAL_FRACTION = "gaudin_partial_fraction"

_KINDS = (AKS_TODA, CARTAN_TODA, GAUDIN_PARTIAL_FRACTION)

#: Relative tolerance on ||[grad H, L]|| for a gradient to count as invariant.
COMMUTING_GRADIENT_RTOL = 1e-10


def _skew_along_upper(x: np.ndarray) -> np.ndarray:
    # Projector onto skew-symmetric matrices along upper-triangular ones:
    # the strict lower part of x fixes the skew component uniquely.
    lo = np.tril(x, -1)
    return lo - lo.T


@dataclass(frozen=True)
class ROperator:
    """A classical r-matrix on sl(n), given by closed-form projector combinations."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown R operator kind {self.kind!r}")
        if not 2 <= self.n <= 12:
            raise ValueError(f"unsupported dimension {self.n}")

    @property
    def skew(self) -> bool:
        """True when <R(X), Y> = -<X, R(Y)> under the trace pairing."""
        return self.kind != AKS_TODA

    def _check(self, x) -> np.ndarray:
        if self.kind == GAUDIN_PARTIAL_FRACTION:
            raise TypeError(
                "the partial-fraction R acts on rational Lax data, not on a "
                "single matrix; see the gaudin module"
            )
        m = as_square(x, "X")
        if m.shape[0] != self.n:
            raise ValueError(f"dimension mismatch: operator is {self.n}, X is {m.shape[0]}")
        return m

    def r(self, x) -> np.ndarray:
        m = self._check(x)
        if self.kind == AKS_TODA:
            return 2.0 * _skew_along_upper(m) - m
        return np.triu(m, 1) - np.tril(m, -1)

    def r_plus(self, x) -> np.ndarray:
        m = self._check(x)
        if self.kind == AKS_TODA:
            return _skew_along_upper(m)
        return np.triu(m, 1) + np.diag(np.diagonal(m).copy()) / 2.0

    def r_minus(self, x) -> np.ndarray:
        m = self._check(x)
        if self.kind == AKS_TODA:
            return _skew_along_upper(m) - m
        return -np.tril(m, -1) - np.diag(np.diagonal(m).copy()) / 2.0


def apply_r(op: ROperator, x, which: str = "R") -> np.ndarray:
    """Apply R, R_plus = (R + id)/2 or R_minus = (R - id)/2 to a matrix."""
    if which == "R":
        return op.r(x)
    if which in ("R+", "Rplus", "plus"):
        return op.r_plus(x)
    if which in ("R-", "Rminus", "minus"):
        return op.r_minus(x)
    raise ValueError(f"unknown component {which!r}, expected 'R', 'R+' or 'R-'")


def mcybe_residual(op: ROperator, x, y) -> float:
    """Norm of [R(X),R(Y)] - R([R(X),Y] + [X,R(Y)]) + [X,Y]; zero iff mCYBE holds."""
    xm, ym = as_square(x, "X"), as_square(y, "Y")
    require_same_dim(xm, ym)
    rx, ry = op.r(xm), op.r(ym)
    lhs = commutator(rx, ry) - op.r(commutator(rx, ym) + commutator(xm, ry))
    return frobenius(lhs + commutator(xm, ym))


def r_bracket(op: ROperator, x, y) -> np.ndarray:
    """Second Lie bracket [X, Y]_R = ([R(X), Y] + [X, R(Y)]) / 2."""
    xm, ym = as_square(x, "X"), as_square(y, "Y")
    require_same_dim(xm, ym)
    return (commutator(op.r(xm), ym) + commutator(xm, op.r(ym))) / 2.0


def lie_poisson_r(op: ROperator, l, grad_f, grad_g):
    """Lie-Poisson R-bracket {f, g}_R(L) = <L, [grad f, grad g]_R>."""
    return trace_pairing(l, r_bracket(op, grad_f, grad_g))


def skewness_defect(op: ROperator, x, y) -> float:
    """|<R(X), Y> + <X, R(Y)>|; zero for a skew-symmetric R."""
    return abs(trace_pairing(op.r(x), y) + trace_pairing(x, op.r(y)))


def lax_vector_field(op: ROperator, l, grad_h) -> np.ndarray:
    """Vector field [R_plus(grad H), L] of an invariant Hamiltonian.

    Requires [grad H, L] ~ 0 (the invariance property); with it the R_minus
    variant [R_minus(grad H), L] gives the same field, since R_plus and
    R_minus differ by the identity.
    """
    lm = as_square(l, "L")
    gm = as_square(grad_h, "grad H")
    require_same_dim(lm, gm)
    defect = frobenius(commutator(gm, lm))
    scale = max(1.0, frobenius(lm) * frobenius(gm))
    if defect > COMMUTING_GRADIENT_RTOL * scale:
        raise ValueError(
            "gradient does not commute with L "
            f"(relative defect {defect / scale:.3e}); not an invariant Hamiltonian"
        )
    return commutator(op.r_plus(gm), lm)
