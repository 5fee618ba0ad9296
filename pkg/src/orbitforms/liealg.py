"""sl(n)-specific structure: trace pairing, subspace projections, invariant gradients.

The ambient algebra is sl(n) realized as traceless n x n matrices (real for
the Toda structures, complex for Gaudin).  The Ad-invariant pairing is
<X, Y> = Tr(XY); all gradients below are taken with respect to it.
"""

from __future__ import annotations

import numpy as np

from .linalg import as_square, frobenius, require_same_dim

#: Linear projections available from :func:`project`.
PARTS = ("skew", "sym", "strict_upper", "strict_lower", "diag", "upper")

MAX_TRACE_POWER = 5  # gradients of Tr L^(k+1) supported for k+1 <= 6


def trace_pairing(x, y):
    """Ad-invariant pairing <X, Y> = Tr(XY); symmetric in its arguments."""
    xm, ym = as_square(x, "X"), as_square(y, "Y")
    require_same_dim(xm, ym)
    val = np.trace(xm @ ym)
    return complex(val) if np.iscomplexobj(val) else float(val)


def project(x, part: str) -> np.ndarray:
    """Linear projection of a matrix onto the requested subspace.

    skew + sym = id, and strict_upper + diag + strict_lower = id;
    'upper' includes the diagonal.
    """
    m = as_square(x, "X")
    if part == "skew":
        return (m - m.T) / 2.0
    if part == "sym":
        return (m + m.T) / 2.0
    if part == "strict_upper":
        return np.triu(m, 1)
    if part == "strict_lower":
        return np.tril(m, -1)
    if part == "diag":
        return np.diag(np.diagonal(m).copy())
    if part == "upper":
        return np.triu(m)
    raise ValueError(f"unknown projection {part!r}, expected one of {PARTS}")


def grad_trace_power(l, k: int, c=1.0) -> np.ndarray:
    """Pairing-gradient of H(L) = c * Tr(L^(k+1)) / (k+1), namely c * L^k.

    These are the gradients of the invariant Hamiltonians generating all the
    flows in this package; they commute with L, which is what makes the
    induced vector fields Lax fields.
    """
    m = as_square(l, "L")
    if not 1 <= k <= MAX_TRACE_POWER:
        raise ValueError(f"trace power k={k} outside supported range 1..{MAX_TRACE_POWER}")
    return c * np.linalg.matrix_power(m, k)


def check_traceless(m, tol: float = 1e-12, name: str = "matrix") -> np.ndarray:
    """Validate |Tr m| <= tol * max(1, ||m||); returns m unchanged."""
    a = as_square(m, name)
    if abs(np.trace(a)) > tol * max(1.0, frobenius(a)):
        raise ValueError(f"{name} is not traceless: Tr = {np.trace(a)!r}")
    return a
